#include "poseplace/methods.hpp"

#include <algorithm>

#include "poseplace/errors.hpp"

namespace poseplace {

ModelBundle train_models(std::span<const Scene> scenes, const TrainOptions& options) {
  ModelBundle bundle;
  auto learned = learn_parameters(scenes, options.learn);
  bundle.human = std::move(learned.params);
  bundle.learn_objective = std::move(learned.objective);
  bundle.learn_skipped = std::move(learned.skipped);

  auto mixture = fmm_fit(scenes, options.fmm);
  bundle.mixture = std::move(mixture.params);
  bundle.mixture_loglik = std::move(mixture.loglik);
  bundle.mixture_k = options.fmm.k;

  bundle.stats = fit_category_stats(scenes);
  bundle.pairs = fit_pair_stats(scenes);
  bundle.classifiers = train_classifier(scenes, options.classifier);
  return bundle;
}

const std::vector<std::string>& method_names() {
  static const std::vector<std::string> names{"dp",   "fmm", "open",  "height",
                                              "room", "obj", "class", "dp+obj"};
  return names;
}

bool is_known_method(const std::string& method) {
  const auto& names = method_names();
  return std::find(names.begin(), names.end(), method) != names.end();
}

namespace {

const CategoryStats& stats_for(const ModelBundle& bundle, const std::string& category) {
  auto it = bundle.stats.find(category);
  if (it == bundle.stats.end()) {
    throw InsufficientData("no training observations for category '" + category + "'");
  }
  return it->second;
}

ArrangeResult arrange_pose_marginals(const ModelBundle& bundle, const Scene& scene,
                                     std::span<const TargetSpec> targets, bool mix_object_context,
                                     const ArrangeOptions& options) {
  auto chain = run_chain(scene, targets, bundle.human, options.dp);
  auto marginals =
      estimate_marginals(chain.snapshots, chain.target_candidates, chain.target_hashes);

  if (mix_object_context) {
    for (std::size_t t = 0; t < targets.size(); ++t) {
      try {
        auto scores = object_context_scores(chain.target_candidates[t], scene.objects,
                                            targets[t].category, bundle.pairs);
        auto object_dist = score_distribution(chain.target_candidates[t], scores.log_scores,
                                              chain.target_hashes[t]);
        marginals[t] = combine_human_object(marginals[t], object_dist, options.omega);
      } catch (const NoReference&) {
        // Without a co-present reference the pose marginal stands alone.
      }
    }
  }

  ArrangeResult result;
  result.objects = predict_arrangement(marginals, scene, targets);
  for (std::size_t t = 0; t < targets.size(); ++t) {
    result.candidate_hashes[targets[t].category] = chain.target_hashes[t];
  }
  return result;
}

ArrangeResult arrange_sequential(const ModelBundle& bundle, const Scene& scene,
                                 std::span<const TargetSpec> targets, const std::string& method) {
  ArrangeResult result;
  std::map<std::string, std::vector<PlacementCandidate>> per_category;
  std::vector<ObjectInstance> context = scene.objects;

  for (const auto& target : targets) {
    auto it = per_category.find(target.category);
    if (it == per_category.end()) {
      auto candidates = feasible_candidates(scene, target.category);
      result.candidate_hashes[target.category] = candidate_set_hash(candidates);
      it = per_category.emplace(target.category, std::move(candidates)).first;
    }
    const auto& candidates = it->second;
    const auto& stats = stats_for(bundle, target.category);

    PlacementCandidate pick;
    if (method == "open") {
      pick = apply_training_orientation(candidates[open_area_pick(candidates, context)],
                                        stats.yaws);
    } else if (method == "height") {
      pick = candidates[height_pick(candidates, stats.mean_height)];
    } else if (method == "room") {
      pick = candidates[room_context_pick(candidates, scene, stats.room_mean)];
    } else if (method == "obj") {
      try {
        auto scores = object_context_scores(candidates, context, target.category, bundle.pairs);
        int best = 0;
        for (std::size_t i = 1; i < scores.log_scores.size(); ++i) {
          if (scores.log_scores[i] > scores.log_scores[best]) best = static_cast<int>(i);
        }
        pick = candidates[best];
      } catch (const NoReference&) {
        pick = candidates[room_context_pick(candidates, scene, stats.room_mean)];
      }
    } else {  // "class"
      auto model = bundle.classifiers.find(target.category);
      if (model == bundle.classifiers.end()) {
        pick = candidates[room_context_pick(candidates, scene, stats.room_mean)];
      } else {
        pick = candidates[classifier_pick(candidates, scene, context, target.category,
                                          model->second)];
      }
    }

    ObjectInstance inst = scene.make_instance(target.category, pick.location, pick.orientation);
    context.push_back(inst);
    result.objects.push_back(std::move(inst));
  }
  return result;
}

}  // namespace

ArrangeResult arrange(const ModelBundle& bundle, const Scene& scene,
                      std::span<const TargetSpec> targets, const std::string& method,
                      const ArrangeOptions& options) {
  if (!is_known_method(method)) throw ValidationError("unknown method '" + method + "'");
  if (targets.empty()) return {};

  if (method == "dp") return arrange_pose_marginals(bundle, scene, targets, false, options);
  if (method == "dp+obj") return arrange_pose_marginals(bundle, scene, targets, true, options);
  if (method == "fmm") {
    auto predicted = fmm_predict(scene, targets, bundle.mixture, options.fmm);
    ArrangeResult result;
    result.objects = std::move(predicted.objects);
    result.candidate_hashes = std::move(predicted.candidate_hashes);
    return result;
  }
  return arrange_sequential(bundle, scene, targets, method);
}

}  // namespace poseplace
