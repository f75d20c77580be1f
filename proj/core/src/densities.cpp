#include "poseplace/densities.hpp"

#include <cmath>

#include "poseplace/errors.hpp"
#include "poseplace/numerics.hpp"

namespace poseplace {

namespace {
constexpr double kLnTwoPi = 1.8378770664093454836;  // ln(2*pi)
}

double gaussian_logpdf(double x, double mu, double sigma) {
  if (!(sigma > 0.0)) throw DomainError("gaussian_logpdf: sigma must be positive");
  const double z = (x - mu) / sigma;
  return -0.5 * z * z - std::log(sigma) - 0.5 * kLnTwoPi;
}

double lognormal_logpdf(double x, double mu, double sigma) {
  if (!(x > 0.0)) throw DomainError("lognormal_logpdf: x must be positive");
  if (!(sigma > 0.0)) throw DomainError("lognormal_logpdf: sigma must be positive");
  const double lx = std::log(x);
  const double z = (lx - mu) / sigma;
  return -0.5 * z * z - lx - std::log(sigma) - 0.5 * kLnTwoPi;
}

double vonmises_logpdf(double theta, double mu, double kappa) {
  if (!(kappa >= 0.0)) throw DomainError("vonmises_logpdf: kappa must be >= 0");
  return kappa * std::cos(theta - mu) - kLnTwoPi - log_bessel_i0(kappa);
}

void CategoryParams::validate(const std::string& name) const {
  if (!(dist_sigma > 0.0)) throw ValidationError(name + ": dist_sigma must be positive");
  if (!(height_sigma > 0.0)) throw ValidationError(name + ": height_sigma must be positive");
  if (!(rel_kappa >= 0.0 && rel_kappa <= kKappaMax))
    throw ValidationError(name + ": rel_kappa must lie in [0, 700]");
  if (!(ori_kappa >= 0.0 && ori_kappa <= kKappaMax))
    throw ValidationError(name + ": ori_kappa must lie in [0, 700]");
  double sum = 0.0;
  for (double v : object_activity) {
    if (!(v > 0.0)) throw ValidationError(name + ": object_activity entries must be positive");
    sum += v;
  }
  if (std::abs(sum - 1.0) > 1e-9)
    throw ValidationError(name + ": object_activity must sum to 1");
}

PoseActivityTable::PoseActivityTable() {
  for (auto& row : rows) row.fill(1.0 / kActivityCount);
}

void PoseActivityTable::validate() const {
  for (int t = 0; t < kPoseTypeCount; ++t) {
    double sum = 0.0;
    for (double v : rows[t]) {
      if (!(v > 0.0))
        throw ValidationError("pose-activity table: entries must be positive");
      sum += v;
    }
    if (std::abs(sum - 1.0) > 1e-9)
      throw ValidationError("pose-activity table: rows must sum to 1");
  }
}

RelativeGeometry relative_geometry(const HumanPose& pose, Vec3 location, double orientation,
                                   Joint distance_joint) {
  RelativeGeometry g;
  const Vec3 anchor = pose.joint(distance_joint);
  g.distance = std::max(norm(location - anchor), kMinDistance);

  const double dx = location.x - pose.root.x;
  const double dy = location.y - pose.root.y;
  g.rel_bearing = wrap_pi(std::atan2(dy, dx) - pose.facing);

  // Orientation measured against the direction that would face the pose root.
  const double to_root = std::atan2(-dy, -dx);
  g.ori_diff = wrap_pi(orientation - to_root);

  g.rel_height = location.z - pose.joint(Joint::torso).z;
  return g;
}

double log_potential(const HumanPose& pose, Vec3 location, double orientation,
                     const CategoryParams& params, const PoseActivityTable& pa) {
  const RelativeGeometry g = relative_geometry(pose, location, orientation, params.distance_joint);
  return lognormal_logpdf(g.distance, params.dist_mu, params.dist_sigma) +
         vonmises_logpdf(g.rel_bearing, params.rel_mu, params.rel_kappa) +
         vonmises_logpdf(g.ori_diff, params.ori_mu, params.ori_kappa) +
         gaussian_logpdf(g.rel_height, params.height_mu, params.height_sigma) +
         std::log(params.object_activity[static_cast<int>(pose.activity)]) +
         std::log(pa.at(pose.type, pose.activity));
}

PotentialScorer::PotentialScorer(const CategoryParams& params, const PoseActivityTable& pa)
    : p_(params) {
  ln_i0_rel_ = log_bessel_i0(p_.rel_kappa);
  ln_i0_ori_ = log_bessel_i0(p_.ori_kappa);
  ln_dist_norm_ = -std::log(p_.dist_sigma) - 0.5 * kLnTwoPi;
  ln_height_norm_ = -std::log(p_.height_sigma) - 0.5 * kLnTwoPi;
  for (int a = 0; a < kActivityCount; ++a) ln_activity_[a] = std::log(p_.object_activity[a]);
  for (int t = 0; t < kPoseTypeCount; ++t)
    for (int a = 0; a < kActivityCount; ++a)
      ln_pa_[t][a] = std::log(pa.rows[t][a]);
}

const CategoryParams& ModelParams::at(const std::string& category) const {
  auto it = categories.find(category);
  if (it == categories.end())
    throw ValidationError("no parameters for category '" + category + "'");
  return it->second;
}

void ModelParams::validate() const {
  for (const auto& [name, params] : categories) params.validate("categories['" + name + "']");
  pose_activity.validate();
  double sum = 0.0;
  for (double w : pose_type_weights) {
    if (!(w >= 0.0)) throw ValidationError("pose_type_weights must be non-negative");
    sum += w;
  }
  if (!(sum > 0.0)) throw ValidationError("pose_type_weights must not all be zero");
}

double PotentialScorer::operator()(const HumanPose& pose, Vec3 location,
                                   double orientation) const {
  const Vec3 anchor = pose.joint(p_.distance_joint);
  const double dist = std::max(norm(location - anchor), kMinDistance);
  const double ldist = std::log(dist);
  const double zd = (ldist - p_.dist_mu) / p_.dist_sigma;

  const double dx = location.x - pose.root.x;
  const double dy = location.y - pose.root.y;
  const double bearing = std::atan2(dy, dx) - pose.facing;
  const double ori = orientation - std::atan2(-dy, -dx);

  const double zh =
      (location.z - pose.joint(Joint::torso).z - p_.height_mu) / p_.height_sigma;

  double lp = -0.5 * zd * zd - ldist + ln_dist_norm_;
  lp += p_.rel_kappa * std::cos(bearing - p_.rel_mu) - kLnTwoPi - ln_i0_rel_;
  lp += p_.ori_kappa * std::cos(ori - p_.ori_mu) - kLnTwoPi - ln_i0_ori_;
  lp += -0.5 * zh * zh + ln_height_norm_;
  lp += ln_activity_[static_cast<int>(pose.activity)];
  lp += ln_pa_[static_cast<int>(pose.type)][static_cast<int>(pose.activity)];
  return lp;
}

}  // namespace poseplace
