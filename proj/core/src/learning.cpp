#include "poseplace/learning.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "poseplace/errors.hpp"

namespace poseplace {

namespace {

double weight_at(std::span<const double> weights, std::size_t i) {
  return weights.empty() ? 1.0 : weights[i];
}

}  // namespace

GaussianFit fit_gaussian_mle(std::span<const double> values, std::span<const double> weights) {
  if (values.size() < 2)
    throw InsufficientData("gaussian fit needs at least two values");
  double wsum = 0.0, mean = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double w = weight_at(weights, i);
    wsum += w;
    mean += w * values[i];
  }
  if (!(wsum > 0.0)) throw InsufficientData("gaussian fit needs positive total weight");
  mean /= wsum;
  double var = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double d = values[i] - mean;
    var += weight_at(weights, i) * d * d;
  }
  var /= wsum;
  return {mean, std::max(std::sqrt(var), kSigmaFloor)};
}

GaussianFit fit_lognormal_mle(std::span<const double> values, std::span<const double> weights) {
  std::vector<double> logs(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!(values[i] > 0.0))
      throw DomainError("lognormal fit: values must be positive");
    logs[i] = std::log(values[i]);
  }
  return fit_gaussian_mle(logs, weights);
}

VonMisesFit fit_vonmises_mle(std::span<const double> angles, std::span<const double> weights) {
  if (angles.size() < 2)
    throw InsufficientData("von Mises fit needs at least two angles");
  double ws = 0.0, sx = 0.0, sy = 0.0;
  for (std::size_t i = 0; i < angles.size(); ++i) {
    const double w = weight_at(weights, i);
    ws += w;
    sx += w * std::cos(angles[i]);
    sy += w * std::sin(angles[i]);
  }
  if (!(ws > 0.0)) throw InsufficientData("von Mises fit needs positive total weight");
  VonMisesFit fit;
  fit.rbar = std::sqrt(sx * sx + sy * sy) / ws;
  fit.mu = (fit.rbar > 0.0) ? std::atan2(sy, sx) : 0.0;
  fit.kappa = solve_vonmises_kappa(fit.rbar);
  return fit;
}

std::array<double, kActivityCount> fit_activity_row(std::span<const double> weighted_counts) {
  std::array<double, kActivityCount> row{};
  double total = 0.0;
  for (int a = 0; a < kActivityCount; ++a) {
    row[a] = weighted_counts[a] + kTableSmoothing;
    total += row[a];
  }
  for (double& v : row) v /= total;
  return row;
}

TrainingPair make_training_pair(const HumanPose& pose, Vec3 location, double orientation,
                                double weight) {
  TrainingPair pair;
  const RelativeGeometry g = relative_geometry(pose, location, orientation, Joint::torso);
  pair.rel_bearing = g.rel_bearing;
  pair.ori_diff = g.ori_diff;
  pair.rel_height = g.rel_height;
  for (std::size_t j = 0; j < kDistanceJointCandidates.size(); ++j) {
    pair.joint_distance[j] =
        std::max(norm(location - pose.joint(kDistanceJointCandidates[j])), kMinDistance);
  }
  pair.pose_type = pose.type;
  pair.activity = pose.activity;
  pair.weight = weight;
  return pair;
}

Joint select_distance_joint(std::span<const TrainingPair> pairs) {
  if (pairs.size() < 2)
    throw InsufficientData("distance joint selection needs at least two pairs");
  std::array<double, 4> loglik{};
  std::vector<double> values(pairs.size()), weights(pairs.size());
  for (std::size_t j = 0; j < kDistanceJointCandidates.size(); ++j) {
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      values[i] = pairs[i].joint_distance[j];
      weights[i] = pairs[i].weight;
    }
    const GaussianFit fit = fit_lognormal_mle(values, weights);
    double ll = 0.0;
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      ll += weights[i] * lognormal_logpdf(values[i], fit.mu, fit.sigma);
    }
    loglik[j] = ll;
  }
  double best = *std::max_element(loglik.begin(), loglik.end());
  constexpr std::size_t torso_slot = 1;
  if (loglik[torso_slot] >= best - 1e-12) return Joint::torso;
  for (std::size_t j = 0; j < loglik.size(); ++j) {
    if (loglik[j] >= best - 1e-12) return kDistanceJointCandidates[j];
  }
  return Joint::torso;
}

CategoryParams fit_category_params(std::span<const TrainingPair> pairs) {
  CategoryParams params;
  params.distance_joint = select_distance_joint(pairs);
  std::size_t joint_slot = 0;
  for (std::size_t j = 0; j < kDistanceJointCandidates.size(); ++j) {
    if (kDistanceJointCandidates[j] == params.distance_joint) joint_slot = j;
  }

  std::vector<double> values(pairs.size()), weights(pairs.size());
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    values[i] = pairs[i].joint_distance[joint_slot];
    weights[i] = pairs[i].weight;
  }
  const GaussianFit dist = fit_lognormal_mle(values, weights);
  params.dist_mu = dist.mu;
  params.dist_sigma = dist.sigma;

  for (std::size_t i = 0; i < pairs.size(); ++i) values[i] = pairs[i].rel_bearing;
  const VonMisesFit rel = fit_vonmises_mle(values, weights);
  params.rel_mu = rel.mu;
  params.rel_kappa = rel.kappa;

  for (std::size_t i = 0; i < pairs.size(); ++i) values[i] = pairs[i].ori_diff;
  const VonMisesFit ori = fit_vonmises_mle(values, weights);
  params.ori_mu = ori.mu;
  params.ori_kappa = ori.kappa;

  for (std::size_t i = 0; i < pairs.size(); ++i) values[i] = pairs[i].rel_height;
  const GaussianFit height = fit_gaussian_mle(values, weights);
  params.height_mu = height.mu;
  params.height_sigma = height.sigma;

  std::array<double, kActivityCount> counts{};
  for (const auto& pair : pairs) counts[static_cast<int>(pair.activity)] += pair.weight;
  params.object_activity = fit_activity_row(counts);
  return params;
}

CategoryParams default_category_params() { return CategoryParams{}; }

namespace {

Scene training_view(const Scene& scene) {
  // Labeled placements count as observed objects while learning.
  Scene view = scene;
  view.objects.insert(view.objects.end(), scene.labeled_placements.begin(),
                      scene.labeled_placements.end());
  view.labeled_placements.clear();
  return view;
}

double pair_log_potential(const TrainingPair& pair, const CategoryParams& params,
                          const PoseActivityTable& pa) {
  std::size_t joint_slot = 0;
  for (std::size_t j = 0; j < kDistanceJointCandidates.size(); ++j) {
    if (kDistanceJointCandidates[j] == params.distance_joint) joint_slot = j;
  }
  return lognormal_logpdf(pair.joint_distance[joint_slot], params.dist_mu, params.dist_sigma) +
         vonmises_logpdf(pair.rel_bearing, params.rel_mu, params.rel_kappa) +
         vonmises_logpdf(pair.ori_diff, params.ori_mu, params.ori_kappa) +
         gaussian_logpdf(pair.rel_height, params.height_mu, params.height_sigma) +
         std::log(params.object_activity[static_cast<int>(pair.activity)]) +
         std::log(pa.at(pair.pose_type, pair.activity));
}

}  // namespace

LearnResult learn_parameters(std::span<const Scene> scenes, const LearnConfig& config) {
  if (scenes.empty()) throw TooFewScenes("learning needs at least one training scene");
  if (config.samples_per_scene < 1)
    throw ValidationError("learn config: samples_per_scene must be >= 1");

  std::vector<Scene> views;
  views.reserve(scenes.size());
  for (const auto& s : scenes) views.push_back(training_view(s));

  LearnResult result;
  for (const auto& view : views) {
    for (const auto& [name, size] : view.categories) {
      if (!result.params.categories.count(name))
        result.params.categories[name] = default_category_params();
    }
    for (const auto& obj : view.objects) {
      if (!result.params.categories.count(obj.category))
        result.params.categories[obj.category] = default_category_params();
    }
  }

  DPConfig dp = config.dp;
  dp.sweeps = dp.burn_in + 1 + (config.samples_per_scene - 1) * dp.thinning;
  dp.validate();

  std::map<std::string, bool> ever_fit;
  double prev_objective = 0.0;

  for (int outer = 0; outer < config.max_outer_iters; ++outer) {
    std::map<std::string, std::vector<TrainingPair>> pairs;
    std::array<std::array<double, kActivityCount>, kPoseTypeCount> pose_counts{};

    for (std::size_t s = 0; s < views.size(); ++s) {
      DPConfig scene_dp = dp;
      scene_dp.seed = split_seed(config.dp.seed, s, static_cast<std::uint64_t>(outer));
      const ChainResult chain = run_chain(views[s], {}, result.params, scene_dp);
      for (const auto& snap : chain.snapshots) {
        for (std::size_t i = 0; i < views[s].objects.size(); ++i) {
          const HumanPose& pose =
              chain.pose_candidates[snap.component_pose[snap.assignment[i]]];
          const auto& obj = views[s].objects[i];
          pairs[obj.category].push_back(
              make_training_pair(pose, obj.base_center(), obj.box.yaw));
        }
        for (int slot : snap.component_pose) {
          const HumanPose& pose = chain.pose_candidates[slot];
          pose_counts[static_cast<int>(pose.type)][static_cast<int>(pose.activity)] += 1.0;
        }
      }
    }

    for (auto& [category, category_pairs] : pairs) {
      if (static_cast<int>(category_pairs.size()) < config.min_pairs) continue;
      result.params.categories[category] = fit_category_params(category_pairs);
      ever_fit[category] = true;
    }
    for (int t = 0; t < kPoseTypeCount; ++t) {
      result.params.pose_activity.rows[t] = fit_activity_row(pose_counts[t]);
    }

    double objective = 0.0;
    std::size_t pair_count = 0;
    for (const auto& [category, category_pairs] : pairs) {
      const CategoryParams& params = result.params.categories.at(category);
      for (const auto& pair : category_pairs) {
        objective += pair_log_potential(pair, params, result.params.pose_activity);
        ++pair_count;
      }
    }
    if (pair_count > 0) objective /= static_cast<double>(pair_count);
    result.objective.push_back(objective);
    result.iterations = outer + 1;

    if (outer > 0 &&
        std::abs(objective - prev_objective) <= config.tol * std::max(1.0, std::abs(prev_objective))) {
      break;
    }
    prev_objective = objective;
  }

  for (const auto& [category, params] : result.params.categories) {
    if (!ever_fit.count(category)) {
      result.skipped.push_back(category + ": fewer than min_pairs observations");
    }
  }
  result.params.validate();
  return result;
}

}  // namespace poseplace
