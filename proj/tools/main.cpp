// poseplace command line: train placement models from labeled scenes, arrange
// new objects, evaluate methods by cross-validation, export placement heatmaps,
// and sample the latent human poses a scene implies.
//
// Exit codes: 0 success, 1 runtime failure, 2 usage error. Failures print one
// "error: <kind>: <message>" line on stderr.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <map>
#include <numeric>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include <poseplace/dp_sampler.hpp>
#include <poseplace/errors.hpp>
#include <poseplace/evaluation.hpp>
#include <poseplace/fixtures.hpp>
#include <poseplace/io.hpp>
#include <poseplace/methods.hpp>
#include <poseplace/numerics.hpp>

namespace {

namespace fs = std::filesystem;
using namespace poseplace;

struct SceneSet {
  std::vector<std::string> names;
  std::vector<Scene> scenes;
};

SceneSet load_scene_dir(const fs::path& dir) {
  if (!fs::is_directory(dir)) {
    throw ValidationError("scene directory '" + dir.string() + "' does not exist");
  }
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json") {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) {
    throw ValidationError("no .json scene files in '" + dir.string() + "'");
  }
  SceneSet set;
  for (const auto& f : files) {
    set.scenes.push_back(load_scene(f));
    set.names.push_back(f.stem().string());
  }
  return set;
}

std::vector<std::string> split_list(const std::string& csv, const char* what) {
  std::vector<std::string> items;
  std::size_t start = 0;
  while (start <= csv.size()) {
    const std::size_t comma = csv.find(',', start);
    const std::size_t end = comma == std::string::npos ? csv.size() : comma;
    std::string item = csv.substr(start, end - start);
    if (item.empty()) throw ValidationError(std::string(what) + ": empty entry in list '" + csv + "'");
    items.push_back(std::move(item));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  if (items.empty()) throw ValidationError(std::string(what) + ": empty list");
  return items;
}

// Targets are named "<category>-<k>" with k counting within the category, so
// requesting "mug,mug" yields mug-0 and mug-1.
std::vector<TargetSpec> targets_from_categories(const std::vector<std::string>& categories) {
  std::map<std::string, int> counts;
  std::vector<TargetSpec> targets;
  for (const auto& cat : categories) {
    targets.push_back({cat + "-" + std::to_string(counts[cat]++), cat});
  }
  return targets;
}

// Optional training configuration file. Every key is optional; unknown keys
// are rejected so typos fail loudly.
TrainOptions read_train_config(const fs::path& path) {
  TrainOptions opts;
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_text_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("train config '" + path.string() + "': " + e.what());
  }
  try {
    auto take = [](nlohmann::json& obj, const char* key, auto& field) {
      if (auto it = obj.find(key); it != obj.end()) {
        field = it->get<std::remove_reference_t<decltype(field)>>();
        obj.erase(it);
      }
    };
    auto finish = [&path](nlohmann::json& obj, const char* section) {
      if (!obj.is_object()) throw ParseError("train config '" + path.string() + "': '" + section + "' must be an object");
      if (!obj.empty()) {
        throw ParseError("train config '" + path.string() + "': unknown key '" + obj.begin().key() + "' in '" + section + "'");
      }
    };
    if (auto it = j.find("learn"); it != j.end()) {
      auto& l = *it;
      take(l, "samples_per_scene", opts.learn.samples_per_scene);
      take(l, "max_outer_iters", opts.learn.max_outer_iters);
      take(l, "tol", opts.learn.tol);
      take(l, "min_pairs", opts.learn.min_pairs);
      take(l, "alpha", opts.learn.dp.alpha);
      take(l, "burn_in", opts.learn.dp.burn_in);
      take(l, "thinning", opts.learn.dp.thinning);
      finish(l, "learn");
      j.erase("learn");
    }
    if (auto it = j.find("mixture"); it != j.end()) {
      auto& m = *it;
      take(m, "components", opts.fmm.k);
      take(m, "em_iters", opts.fmm.em_iters);
      take(m, "em_tol", opts.fmm.em_tol);
      finish(m, "mixture");
      j.erase("mixture");
    }
    if (auto it = j.find("classifier"); it != j.end()) {
      auto& c = *it;
      take(c, "l2", opts.classifier.l2);
      take(c, "grad_tol", opts.classifier.grad_tol);
      take(c, "max_iters", opts.classifier.max_iters);
      take(c, "positive_radius", opts.classifier.positive_radius);
      take(c, "negative_ratio", opts.classifier.negative_ratio);
      finish(c, "classifier");
      j.erase("classifier");
    }
    finish(j, "top level");
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("train config '" + path.string() + "': " + e.what());
  }
  return opts;
}

// Seed streams, so one user seed cannot couple unrelated stages.
void apply_train_seed(TrainOptions& opts, std::uint64_t seed) {
  opts.learn.dp.seed = split_seed(seed, 101);
  opts.fmm.seed = split_seed(seed, 102);
  opts.classifier.seed = split_seed(seed, 103);
}

ModelParams default_params_for(const Scene& scene) {
  ModelParams params;
  for (const auto& entry : scene.categories) {
    params.categories[entry.first] = default_category_params();
  }
  return params;
}

ModelParams params_for(const Scene& scene, const std::string& params_path) {
  if (params_path.empty()) return default_params_for(scene);
  return load_bundle(params_path).human;
}

int run_train(const std::string& scenes_dir, const std::string& out,
              const std::string& config_path, std::uint64_t seed) {
  TrainOptions opts;
  if (!config_path.empty()) opts = read_train_config(config_path);
  apply_train_seed(opts, seed);
  const SceneSet set = load_scene_dir(scenes_dir);
  const ModelBundle bundle = train_models(set.scenes, opts);
  atomic_write_file(out, bundle_to_json(bundle));
  return 0;
}

int run_arrange(const std::string& scene_path, const std::string& params_path,
                const std::string& objects_csv, const std::string& method, double omega,
                std::uint64_t seed, const std::string& out) {
  const Scene scene = load_scene(scene_path);
  const ModelBundle bundle = load_bundle(params_path);
  const auto targets = targets_from_categories(split_list(objects_csv, "--objects"));
  ArrangeOptions opts;
  opts.omega = omega;
  opts.dp.seed = split_seed(seed, 0);
  opts.fmm.seed = split_seed(seed, 1);
  const ArrangeResult result = arrange(bundle, scene, targets, method, opts);
  atomic_write_file(out, arrangement_to_json(method, result.objects, result.candidate_hashes));
  return 0;
}

int run_eval(const std::string& scenes_dir, const std::string& scenario,
             const std::string& methods_csv, const std::string& config_path, int folds,
             std::uint64_t seed, const std::string& out, const std::string& records_out) {
  EvalOptions opts;
  opts.methods = split_list(methods_csv, "--methods");
  for (const auto& m : opts.methods) {
    if (!is_known_method(m) && m != "oracle") {
      throw ValidationError("unknown method '" + m + "' in --methods");
    }
  }
  opts.scenario = scenario == "new" ? "new_objects" : "empty_room";
  opts.folds = folds;
  opts.seed = seed;
  if (!config_path.empty()) opts.train = read_train_config(config_path);
  apply_train_seed(opts.train, seed);
  const SceneSet set = load_scene_dir(scenes_dir);
  const auto records = cross_validate(set.scenes, set.names, opts);
  atomic_write_file(out, render_report(records));
  if (!records_out.empty()) atomic_write_file(records_out, records_to_csv(records));
  return 0;
}

int run_heatmap(const std::string& scene_path, const std::string& params_path,
                const std::string& category, double resolution, std::uint64_t seed,
                const std::string& out_base) {
  const Scene scene = load_scene(scene_path);
  const ModelParams params = params_for(scene, params_path);
  const std::vector<TargetSpec> targets{{category + "-0", category}};
  DPConfig config;
  config.seed = split_seed(seed, 0);
  const ChainResult chain = run_chain(scene, targets, params, config);
  const HeatmapGrid grid =
      sample_heatmap(chain.snapshots, scene, 0, resolution, chain.target_candidates[0]);
  atomic_write_file(out_base + ".csv", heatmap_to_csv(grid));
  atomic_write_file(out_base + ".pgm", heatmap_to_pgm(grid));
  return 0;
}

int run_sample_poses(const std::string& scene_path, const std::string& params_path,
                     std::uint64_t seed, const std::string& out) {
  const Scene scene = load_scene(scene_path);
  const ModelParams params = params_for(scene, params_path);
  ChainContext ctx = make_chain_context(scene, {}, params);
  std::vector<double> freq(ctx.pose_candidates.size(), 0.0);
  if (ctx.objects.empty()) {
    // Nothing to condition on: the pose posterior is the candidate prior itself.
    for (std::size_t p = 0; p < freq.size(); ++p) freq[p] = std::exp(ctx.ln_p0[p]);
  } else {
    DPConfig config;
    config.seed = split_seed(seed, 0);
    const ChainResult chain = run_chain(ctx, config);
    double total = 0.0;
    for (const auto& snap : chain.snapshots) {
      for (int p : snap.component_pose) {
        freq[static_cast<std::size_t>(p)] += 1.0;
        total += 1.0;
      }
    }
    if (total > 0.0) {
      for (auto& f : freq) f /= total;
    }
  }
  std::vector<std::size_t> order(freq.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return freq[a] > freq[b]; });
  std::vector<HumanPose> poses;
  std::vector<double> frequencies;
  for (std::size_t idx : order) {
    if (freq[idx] <= 0.0) break;
    poses.push_back(ctx.pose_candidates[idx]);
    frequencies.push_back(freq[idx]);
  }
  atomic_write_file(out, poses_to_json(poses, frequencies));
  return 0;
}

int run_gen_fixture(const std::string& kind, int count, std::uint64_t seed,
                    const std::string& out_dir) {
  const auto scenes = make_fixture_set(kind, count, seed);
  fs::create_directories(out_dir);
  for (std::size_t i = 0; i < scenes.size(); ++i) {
    char name[64];
    std::snprintf(name, sizeof(name), "%s_%02zu.json", kind.c_str(), i);
    atomic_write_file(fs::path(out_dir) / name, scene_to_json(scenes[i]));
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"learn how objects sit around people and use that to place objects in rooms"};
  app.require_subcommand(1);

  std::string scenes_dir, scene_path, params_path, config_path, out, out_base;
  std::string objects_csv, methods_csv, records_out, category, method, scenario = "new";
  std::string kind = "office";
  double omega = 0.5, resolution = 0.05;
  int folds = 5, count = 1;
  std::uint64_t seed = 0;

  auto* train = app.add_subcommand("train", "fit all placement models from labeled scenes");
  train->add_option("--scenes", scenes_dir, "directory of scene .json files")->required();
  train->add_option("--out", out, "output parameter file")->required();
  train->add_option("--config", config_path, "training configuration .json");
  train->add_option("--seed", seed, "RNG seed");

  auto* arrange_cmd = app.add_subcommand("arrange", "place new objects into a scene");
  arrange_cmd->add_option("--scene", scene_path, "scene .json file")->required();
  arrange_cmd->add_option("--params", params_path, "trained parameter file")->required();
  arrange_cmd->add_option("--objects", objects_csv, "comma-separated object categories")->required();
  arrange_cmd->add_option("--method", method, "placement method")
      ->required()
      ->check(CLI::IsMember(method_names()));
  arrange_cmd->add_option("--omega", omega, "pose-marginal weight for dp+obj")
      ->check(CLI::Range(0.0, 1.0));
  arrange_cmd->add_option("--seed", seed, "RNG seed");
  arrange_cmd->add_option("--out", out, "output arrangement file")->required();

  auto* eval_cmd = app.add_subcommand("eval", "cross-validate placement methods");
  eval_cmd->add_option("--scenes", scenes_dir, "directory of scene .json files")->required();
  eval_cmd->add_option("--scenario", scenario, "new: replace one category; empty: refill the room")
      ->check(CLI::IsMember({"new", "empty"}));
  eval_cmd->add_option("--methods", methods_csv, "comma-separated methods (oracle allowed)")
      ->required();
  eval_cmd->add_option("--config", config_path, "training configuration .json");
  eval_cmd->add_option("--folds", folds, "cross-validation folds")->check(CLI::Range(2, 1000));
  eval_cmd->add_option("--seed", seed, "RNG seed");
  eval_cmd->add_option("--out", out, "output report .csv")->required();
  eval_cmd->add_option("--records", records_out, "optional per-prediction record dump .csv");

  auto* heatmap_cmd = app.add_subcommand("heatmap", "export a placement heatmap for one category");
  heatmap_cmd->add_option("--scene", scene_path, "scene .json file")->required();
  heatmap_cmd->add_option("--params", params_path, "trained parameter file (default: untrained)");
  heatmap_cmd->add_option("--object", category, "object category")->required();
  heatmap_cmd->add_option("--resolution", resolution, "cell size in meters")
      ->check(CLI::PositiveNumber);
  heatmap_cmd->add_option("--seed", seed, "RNG seed");
  heatmap_cmd->add_option("--out", out_base, "output basename for .csv and .pgm")->required();

  auto* poses_cmd = app.add_subcommand("sample-poses", "sample the poses a scene's objects imply");
  poses_cmd->add_option("--scene", scene_path, "scene .json file")->required();
  poses_cmd->add_option("--params", params_path, "trained parameter file (default: untrained)");
  poses_cmd->add_option("--seed", seed, "RNG seed");
  poses_cmd->add_option("--out", out, "output pose .json file")->required();

  auto* gen = app.add_subcommand("gen-fixture", "generate synthetic scenes");
  gen->group("");  // internal: used by tests and demos
  gen->add_option("--kind", kind, "fixture family")->check(CLI::IsMember(fixture_kinds()));
  gen->add_option("--count", count, "number of scenes")->check(CLI::Range(1, 1000));
  gen->add_option("--seed", seed, "RNG seed");
  gen->add_option("--out", out, "output directory")->required();

  try {
    app.parse(argc, argv);
    if (train->parsed()) return run_train(scenes_dir, out, config_path, seed);
    if (arrange_cmd->parsed())
      return run_arrange(scene_path, params_path, objects_csv, method, omega, seed, out);
    if (eval_cmd->parsed())
      return run_eval(scenes_dir, scenario, methods_csv, config_path, folds, seed, out,
                      records_out);
    if (heatmap_cmd->parsed())
      return run_heatmap(scene_path, params_path, category, resolution, seed, out_base);
    if (poses_cmd->parsed()) return run_sample_poses(scene_path, params_path, seed, out);
    if (gen->parsed()) return run_gen_fixture(kind, count, seed, out);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::fprintf(stderr, "error: usage: %s\n", e.what());
    return 2;
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s: %s\n", e.kind(), e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: runtime: %s\n", e.what());
    return 1;
  }
  return 0;
}
