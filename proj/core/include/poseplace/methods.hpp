#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include "poseplace/baselines.hpp"
#include "poseplace/dp_sampler.hpp"
#include "poseplace/learning.hpp"
#include "poseplace/scene.hpp"

namespace poseplace {

struct TrainOptions {
  LearnConfig learn;
  FMMConfig fmm;
  ClassifierTrainConfig classifier;
};

// Every trained model, so one training pass serves all placement methods.
struct ModelBundle {
  ModelParams human;    // pose-context parameters, sampled training
  ModelParams mixture;  // pose-context parameters, fixed-size EM training
  int mixture_k = 3;
  CategoryStatsMap stats;
  PairStatsMap pairs;
  ClassifierSet classifiers;

  std::vector<double> learn_objective;
  std::vector<std::string> learn_skipped;
  std::vector<double> mixture_loglik;
};

ModelBundle train_models(std::span<const Scene> scenes, const TrainOptions& options);

struct ArrangeOptions {
  DPConfig dp;
  FMMConfig fmm;
  double omega = 0.5;  // weight of the pose marginal in "dp+obj"
};

struct ArrangeResult {
  std::vector<ObjectInstance> objects;  // one per target, in target order
  std::map<std::string, std::uint64_t> candidate_hashes;
};

// "dp", "fmm", "open", "height", "room", "obj", "class", "dp+obj".
const std::vector<std::string>& method_names();
bool is_known_method(const std::string& method);

// Runs one placement method. Baselines place targets in order, seeing earlier
// predictions as context; candidate lists stay fixed to the input scene.
// Categories the object-context or classifier baselines cannot model fall back
// to the room-context pick.
ArrangeResult arrange(const ModelBundle& bundle, const Scene& scene,
                      std::span<const TargetSpec> targets, const std::string& method,
                      const ArrangeOptions& options);

}  // namespace poseplace
