#pragma once

#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "poseplace/densities.hpp"
#include "poseplace/dp_sampler.hpp"
#include "poseplace/scene.hpp"

namespace poseplace {

// Location statistics the simple baselines train on.
struct CategoryStats {
  std::vector<double> yaws;  // observed orientations
  double mean_height = 0.0;  // mean base z
  Vec3 room_mean;            // mean of (x/W, y/D, base z/H)
  int count = 0;
};
using CategoryStatsMap = std::map<std::string, CategoryStats>;

CategoryStatsMap fit_category_stats(std::span<const Scene> scenes);

// Relative placement of a target category in a reference object's yaw frame.
struct PairStats {
  double mean_x = 0.0, mean_y = 0.0;
  double cov_xx = 0.0, cov_xy = 0.0, cov_yy = 0.0;
  double ori_mu = 0.0, ori_kappa = 0.0;
  int count = 0;

  double dispersion() const { return cov_xx + cov_yy; }
  // Log density of a relative offset and orientation; covariance floored to
  // stay invertible, near-singular cross terms dropped.
  double log_density(double dx, double dy, double rel_ori) const;
};
using PairKey = std::pair<std::string, std::string>;  // (target, reference)
using PairStatsMap = std::map<PairKey, PairStats>;

PairStatsMap fit_pair_stats(std::span<const Scene> scenes);

struct BaselinePick {
  PlacementCandidate candidate;
  std::uint64_t candidate_hash = 0;
};

// Index-level scoring over a fixed candidate list. `context` supplies the
// objects the score reacts to; ties resolve to the earlier candidate.
int open_area_pick(std::span<const PlacementCandidate> candidates,
                   std::span<const ObjectInstance> context);
int height_pick(std::span<const PlacementCandidate> candidates, double mean_height);
int room_context_pick(std::span<const PlacementCandidate> candidates, const Scene& scene,
                      Vec3 normalized_mean);

struct ObjectContextScores {
  std::vector<double> log_scores;  // per candidate
  std::string reference;           // chosen reference category
};
// Scores against the co-present reference category with the smallest offset
// dispersion; throws NoReference when none of the references appears.
ObjectContextScores object_context_scores(std::span<const PlacementCandidate> candidates,
                                          std::span<const ObjectInstance> context,
                                          const std::string& category,
                                          const PairStatsMap& pairs);

// Keeps the max-min-distance location but swaps in the training orientation
// nearest the winning bin, so placements copy observed facings.
PlacementCandidate apply_training_orientation(PlacementCandidate pick,
                                              std::span<const double> training_yaws);

// Spec'd single-shot baselines: generate the shared candidate list and pick.
BaselinePick baseline_open_area(const Scene& scene, const std::string& category,
                                const CategoryStats& stats);
BaselinePick baseline_height(const Scene& scene, const std::string& category,
                             const CategoryStats& stats);
BaselinePick baseline_room_context(const Scene& scene, const std::string& category,
                                   const CategoryStats& stats);
BaselinePick baseline_object_context(const Scene& scene, const std::string& category,
                                     const PairStatsMap& pairs);

// --- discriminative baseline ---

struct ClassifierTrainConfig {
  double l2 = 1e-2;
  double grad_tol = 1e-5;
  int max_iters = 2000;
  double positive_radius = 0.5;  // meters from a labeled placement
  int negative_ratio = 5;
  std::uint64_t seed = 0;
};

struct ClassifierModel {
  std::vector<double> weights;
  double bias = 0.0;
  std::vector<std::string> context_categories;  // top-8 by training frequency
  int feature_version = 1;
  std::vector<double> objective_trace;  // penalized log-likelihood per accepted step
};
using ClassifierSet = std::map<std::string, ClassifierModel>;

// Fixed schema, version 1 (31 features): height above floor; normalized x, y;
// distance to nearest wall; min distance to existing objects; per context
// category distance and bearing to the nearest instance (zeros when absent);
// 8-way orientation one-hot; footprint area; support surface area.
std::vector<double> extract_features(const Scene& scene,
                                     std::span<const ObjectInstance> context,
                                     const PlacementCandidate& candidate,
                                     const std::string& category,
                                     std::span<const std::string> context_categories);

// L2-regularized logistic regression per category, positives within
// positive_radius of a label, gradient ascent with backtracking line search.
// Categories with fewer than 3 positives throw InsufficientData.
ClassifierModel train_category_classifier(std::span<const Scene> scenes,
                                          const std::string& category,
                                          std::span<const std::string> context_categories,
                                          const ClassifierTrainConfig& config);
ClassifierSet train_classifier(std::span<const Scene> scenes,
                               const ClassifierTrainConfig& config);

int classifier_pick(std::span<const PlacementCandidate> candidates, const Scene& scene,
                    std::span<const ObjectInstance> context, const std::string& category,
                    const ClassifierModel& model);
BaselinePick baseline_classifier(const Scene& scene, const std::string& category,
                                 const ClassifierModel& model);

// --- finite mixture model ---

struct FMMConfig {
  int k = 3;
  int em_iters = 100;
  double em_tol = 1e-6;
  std::uint64_t seed = 0;
};

struct FMMTrainResult {
  ModelParams params;
  std::vector<double> loglik;  // observed-data log-likelihood, non-decreasing
};

// EM over K poses per scene with uniform mixture weights; the M-step alternates
// weighted per-term MLE for the parameters with pose argmax updates. An update
// that would lower the observed log-likelihood is rejected and ends the run.
FMMTrainResult fmm_fit(std::span<const Scene> scenes, const FMMConfig& config);

struct FMMPredictResult {
  std::vector<ObjectInstance> objects;
  std::vector<double> loglik;
  std::map<std::string, std::uint64_t> candidate_hashes;
};

// EM placement: E-step responsibilities over the K poses, M-step alternating
// pose argmax and per-target placement argmax (at most 20 inner rounds).
FMMPredictResult fmm_predict(const Scene& scene, std::span<const TargetSpec> targets,
                             const ModelParams& params, const FMMConfig& config);

// --- combination ---

// Normalized per-candidate scores folded into the coarse-cell histogram form.
PlacementDistribution score_distribution(std::span<const PlacementCandidate> candidates,
                                         std::span<const double> log_scores,
                                         std::uint64_t candidate_hash);

// Cellwise omega * human + (1 - omega) * object; zero-mass cells are dropped so
// either endpoint reproduces its input exactly. Candidate hashes must agree.
PlacementDistribution combine_human_object(const PlacementDistribution& human,
                                           const PlacementDistribution& object, double omega);

}  // namespace poseplace
