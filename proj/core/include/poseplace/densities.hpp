#pragma once

#include <array>
#include <map>
#include <string>

#include "poseplace/candidates.hpp"
#include "poseplace/skeleton.hpp"

namespace poseplace {

// log N(x; mu, sigma^2)
double gaussian_logpdf(double x, double mu, double sigma);

// log LogNormal(x; mu, sigma) for x > 0; mu, sigma act on ln x.
double lognormal_logpdf(double x, double mu, double sigma);

// log VonMises(theta; mu, kappa) with the stable ln I0; kappa in [0, 700].
double vonmises_logpdf(double theta, double mu, double kappa);

inline constexpr double kKappaMax = 700.0;
inline constexpr double kTableSmoothing = 1e-3;  // additive mass per cell before renormalizing
inline constexpr double kMinDistance = 1e-6;     // clamp for coincident object and joint

// How one object category relates to a pose: distance to a designated joint
// (log-normal), bearing around the facing direction and relative orientation
// (von Mises), height against the torso (Gaussian), and activity affinity.
struct CategoryParams {
  Joint distance_joint = Joint::torso;
  double dist_mu = 0.0;     // of ln distance, meters
  double dist_sigma = 1.0;
  double rel_mu = 0.0;
  double rel_kappa = 0.0;
  double ori_mu = 0.0;
  double ori_kappa = 0.0;
  double height_mu = 0.0;   // object base z minus torso z
  double height_sigma = 1.0;
  std::array<double, kActivityCount> object_activity{0.2, 0.2, 0.2, 0.2, 0.2};

  void validate(const std::string& name = "category params") const;
};

// P(activity | pose template); rows indexed by PoseType.
struct PoseActivityTable {
  std::array<std::array<double, kActivityCount>, kPoseTypeCount> rows{};

  PoseActivityTable();  // uniform rows
  double at(PoseType t, Activity a) const {
    return rows[static_cast<int>(t)][static_cast<int>(a)];
  }
  void validate() const;
};

struct RelativeGeometry {
  double distance = 0.0;    // 3-D distance from the designated joint, >= kMinDistance
  double rel_bearing = 0.0; // candidate bearing from the root, measured against facing; (-pi, pi]
  double ori_diff = 0.0;    // candidate orientation minus the direction facing the root; (-pi, pi]
  double rel_height = 0.0;  // candidate base z minus torso z
};

RelativeGeometry relative_geometry(const HumanPose& pose, Vec3 location, double orientation,
                                   Joint distance_joint);
inline RelativeGeometry relative_geometry(const HumanPose& pose, const PlacementCandidate& c,
                                          Joint distance_joint) {
  return relative_geometry(pose, c.location, c.orientation, distance_joint);
}

// ln Psi: the six log terms (distance, bearing, orientation, height,
// object-activity affinity, pose-activity affinity) summed.
double log_potential(const HumanPose& pose, Vec3 location, double orientation,
                     const CategoryParams& params, const PoseActivityTable& pa);
inline double log_potential(const HumanPose& pose, const PlacementCandidate& c,
                            const CategoryParams& params, const PoseActivityTable& pa) {
  return log_potential(pose, c.location, c.orientation, params, pa);
}

// Same potential with the per-category constants (ln I0, ln tables) precomputed.
class PotentialScorer {
 public:
  PotentialScorer(const CategoryParams& params, const PoseActivityTable& pa);

  double operator()(const HumanPose& pose, Vec3 location, double orientation) const;
  double operator()(const HumanPose& pose, const PlacementCandidate& c) const {
    return (*this)(pose, c.location, c.orientation);
  }

 private:
  CategoryParams p_;
  double ln_i0_rel_ = 0.0, ln_i0_ori_ = 0.0;
  double ln_dist_norm_ = 0.0, ln_height_norm_ = 0.0;
  std::array<double, kActivityCount> ln_activity_{};
  std::array<std::array<double, kActivityCount>, kPoseTypeCount> ln_pa_{};
};

using CategoryParamsMap = std::map<std::string, CategoryParams>;

// Everything the samplers need to score poses against placements.
struct ModelParams {
  CategoryParamsMap categories;
  PoseActivityTable pose_activity;
  // Prior weights over skeleton templates; normalized over the candidate set in use.
  std::array<double, kPoseTypeCount> pose_type_weights{1, 1, 1, 1, 1, 1};

  const CategoryParams& at(const std::string& category) const;
  void validate() const;
};

}  // namespace poseplace
