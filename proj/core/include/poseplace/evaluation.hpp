#pragma once

#include <span>
#include <string>
#include <vector>

#include "poseplace/methods.hpp"
#include "poseplace/scene.hpp"

namespace poseplace {

// Horizontal distance between predicted and true base points.
double location_error(Vec3 predicted, Vec3 truth);
// Absolute base-height difference.
double height_error(Vec3 predicted, Vec3 truth);

// Seeded shuffle, then round-robin: returns the fold index per scene.
std::vector<int> fold_assignment(std::size_t scene_count, int folds, std::uint64_t seed);

struct EvalRecord {
  std::string scene;
  std::string category;
  std::string method;
  std::string scenario;
  int fold = 0;
  int matched = 0;  // instance pairs behind the averages; 0 means the run failed
  double location_error = 0.0;
  double height_error = 0.0;
  // Why the method produced no predictions (a fold whose training scenes never
  // saw the category, a fully blocked room). Failed runs stay out of averages.
  std::string note;
};

struct EvalOptions {
  std::vector<std::string> methods;        // placement methods plus optionally "oracle"
  std::string scenario = "new_objects";    // or "empty_room"
  int folds = 5;
  std::uint64_t seed = 0;
  TrainOptions train;
  ArrangeOptions arrange;
};

// Cross-validated errors: per held-out scene, remove the evaluated objects,
// re-place them with each method, and score against the removed ground truth
// by greedy nearest matching. "oracle" replays the ground truth itself and
// bounds what the harness can measure. One record per (scene, category, method).
std::vector<EvalRecord> cross_validate(std::span<const Scene> scenes,
                                       std::span<const std::string> scene_names,
                                       const EvalOptions& options);

// Two CSV sections (location, height): one row per method, one column per
// category plus an AVG column formatted as mean +/- standard error.
std::string render_report(std::span<const EvalRecord> records);

std::string records_to_csv(std::span<const EvalRecord> records);

}  // namespace poseplace
