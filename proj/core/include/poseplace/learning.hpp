#pragma once

#include <span>
#include <string>
#include <vector>

#include "poseplace/densities.hpp"
#include "poseplace/dp_sampler.hpp"
#include "poseplace/scene.hpp"

namespace poseplace {

struct LearnConfig {
  int samples_per_scene = 50;  // pose snapshots pooled per scene per outer iteration
  int max_outer_iters = 50;
  double tol = 1e-4;  // relative change of the mean per-object log potential
  int min_pairs = 10;
  DPConfig dp;  // burn_in, thinning, and seed are honored; sweeps derive from samples_per_scene
};

inline constexpr double kSigmaFloor = 0.02;  // meters, keeps degenerate spreads scorable

struct GaussianFit {
  double mu = 0.0;
  double sigma = kSigmaFloor;
};

struct VonMisesFit {
  double mu = 0.0;
  double kappa = 0.0;
  double rbar = 0.0;  // mean resultant length the kappa was solved against
};

// Closed-form Gaussian MLE with population variance, sigma floored at kSigmaFloor.
// Weights default to 1; fewer than two values throws InsufficientData.
GaussianFit fit_gaussian_mle(std::span<const double> values,
                             std::span<const double> weights = {});

// Gaussian MLE on ln(values); values must be positive.
GaussianFit fit_lognormal_mle(std::span<const double> values,
                              std::span<const double> weights = {});

// Circular mean direction; kappa inverts A(kappa) = I1/I0 = rbar by bisection,
// clamped to 0 below rbar = 1e-3 and to 700 above A(700).
VonMisesFit fit_vonmises_mle(std::span<const double> angles,
                             std::span<const double> weights = {});

// Normalized counts with kTableSmoothing added to every cell first.
std::array<double, kActivityCount> fit_activity_row(
    std::span<const double> weighted_counts);

// One pooled observation: an object placement against a pose sampled for it.
struct TrainingPair {
  std::array<double, 4> joint_distance{};  // indexed like kDistanceJointCandidates
  double rel_bearing = 0.0;
  double ori_diff = 0.0;
  double rel_height = 0.0;
  PoseType pose_type = PoseType::standing;
  Activity activity = Activity::working;
  double weight = 1.0;
};

TrainingPair make_training_pair(const HumanPose& pose, Vec3 location, double orientation,
                                double weight = 1.0);

// Log-normal held-in likelihood over {head, torso, left_hand, right_hand};
// the torso wins ties.
Joint select_distance_joint(std::span<const TrainingPair> pairs);

// Per-category relation parameters fit from weighted pairs.
CategoryParams fit_category_params(std::span<const TrainingPair> pairs);

struct LearnResult {
  ModelParams params;
  std::vector<double> objective;     // mean per-pair log potential per outer iteration
  std::vector<std::string> skipped;  // categories left at defaults, with the reason
  int iterations = 0;
};

CategoryParams default_category_params();

// Alternates pose sampling over the training scenes (placements stay clamped)
// with per-category, per-term MLE until the objective stabilizes.
LearnResult learn_parameters(std::span<const Scene> scenes, const LearnConfig& config);

}  // namespace poseplace
