#include "poseplace/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>

#include "poseplace/errors.hpp"
#include "poseplace/numerics.hpp"

namespace poseplace {

double location_error(Vec3 predicted, Vec3 truth) { return horizontal_norm(predicted - truth); }

double height_error(Vec3 predicted, Vec3 truth) { return std::abs(predicted.z - truth.z); }

std::vector<int> fold_assignment(std::size_t scene_count, int folds, std::uint64_t seed) {
  if (folds < 2) throw ValidationError("cross-validation needs at least 2 folds");
  std::vector<std::size_t> order(scene_count);
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  Rng rng(seed);
  for (std::size_t i = 0; i + 1 < order.size(); ++i) {
    std::swap(order[i], order[i + rng.below(order.size() - i)]);
  }
  std::vector<int> fold(scene_count, 0);
  for (std::size_t p = 0; p < order.size(); ++p) {
    fold[order[p]] = static_cast<int>(p % static_cast<std::size_t>(folds));
  }
  return fold;
}

namespace {

struct MatchedErrors {
  int matched = 0;
  double location = 0.0;
  double height = 0.0;
};

// Greedy nearest pairing; every prediction and truth is used at most once.
MatchedErrors match_errors(std::span<const ObjectInstance> predictions,
                           std::span<const ObjectInstance> truths) {
  struct Pair {
    double loc;
    std::size_t p, t;
  };
  std::vector<Pair> pairs;
  pairs.reserve(predictions.size() * truths.size());
  for (std::size_t p = 0; p < predictions.size(); ++p) {
    for (std::size_t t = 0; t < truths.size(); ++t) {
      pairs.push_back({location_error(predictions[p].base_center(), truths[t].base_center()), p, t});
    }
  }
  std::sort(pairs.begin(), pairs.end(), [](const Pair& a, const Pair& b) {
    if (a.loc != b.loc) return a.loc < b.loc;
    if (a.p != b.p) return a.p < b.p;
    return a.t < b.t;
  });

  std::vector<bool> p_used(predictions.size(), false), t_used(truths.size(), false);
  MatchedErrors out;
  for (const auto& pair : pairs) {
    if (p_used[pair.p] || t_used[pair.t]) continue;
    p_used[pair.p] = true;
    t_used[pair.t] = true;
    out.matched += 1;
    out.location += pair.loc;
    out.height += height_error(predictions[pair.p].base_center(), truths[pair.t].base_center());
  }
  if (out.matched > 0) {
    out.location /= out.matched;
    out.height /= out.matched;
  }
  return out;
}

std::vector<ObjectInstance> run_method(const ModelBundle& bundle, const Scene& g,
                                       std::span<const TargetSpec> targets,
                                       std::span<const ObjectInstance> truths,
                                       const std::string& method, const EvalOptions& options,
                                       std::uint64_t run_key, std::size_t method_index) {
  if (method == "oracle") return {truths.begin(), truths.end()};
  ArrangeOptions opts = options.arrange;
  opts.dp.seed = split_seed(run_key, method_index, 0);
  opts.fmm.seed = split_seed(run_key, method_index, 1);
  return arrange(bundle, g, targets, method, opts).objects;
}

void eval_scene(std::vector<EvalRecord>& records, const ModelBundle& bundle, const Scene& scene,
                const std::string& name, std::size_t scene_index, int fold,
                const EvalOptions& options) {
  std::map<std::string, std::vector<ObjectInstance>> by_category;
  for (const auto& obj : scene.objects) by_category[obj.category].push_back(obj);

  auto emit = [&](const std::string& category, const std::string& method,
                  const MatchedErrors& err) {
    records.push_back({name, category, method, options.scenario, fold, err.matched, err.location,
                       err.height, ""});
  };

  if (options.scenario == "new_objects") {
    for (const auto& [category, truths] : by_category) {
      Scene g = scene;
      g.labeled_placements.clear();
      std::erase_if(g.objects, [&](const ObjectInstance& o) { return o.category == category; });
      std::vector<TargetSpec> targets;
      for (std::size_t j = 0; j < truths.size(); ++j) {
        targets.push_back({category + "-" + std::to_string(j), category});
      }
      const std::uint64_t run_key =
          split_seed(options.seed, scene_index, fnv1a64(category.data(), category.size()));
      for (std::size_t mi = 0; mi < options.methods.size(); ++mi) {
        try {
          auto predictions =
              run_method(bundle, g, targets, truths, options.methods[mi], options, run_key, mi);
          emit(category, options.methods[mi], match_errors(predictions, truths));
        } catch (const Error& e) {
          records.push_back({name, category, options.methods[mi], options.scenario, fold, 0, 0.0,
                             0.0, e.what()});
        }
      }
    }
    return;
  }

  // empty_room: place everything at once into the cleared room.
  Scene g = scene;
  g.objects.clear();
  g.labeled_placements.clear();
  std::vector<TargetSpec> targets;
  std::vector<ObjectInstance> truths;
  for (const auto& [category, instances] : by_category) {
    for (std::size_t j = 0; j < instances.size(); ++j) {
      targets.push_back({category + "-" + std::to_string(j), category});
      truths.push_back(instances[j]);
    }
  }
  const std::uint64_t run_key = split_seed(options.seed, scene_index, fnv1a64("", 0));
  for (std::size_t mi = 0; mi < options.methods.size(); ++mi) {
    try {
      auto predictions =
          run_method(bundle, g, targets, truths, options.methods[mi], options, run_key, mi);
      std::size_t offset = 0;
      for (const auto& [category, instances] : by_category) {
        std::span<const ObjectInstance> pred{predictions.data() + offset, instances.size()};
        emit(category, options.methods[mi], match_errors(pred, instances));
        offset += instances.size();
      }
    } catch (const Error& e) {
      for (const auto& entry : by_category) {
        records.push_back({name, entry.first, options.methods[mi], options.scenario, fold, 0, 0.0,
                           0.0, e.what()});
      }
    }
  }
}

}  // namespace

std::vector<EvalRecord> cross_validate(std::span<const Scene> scenes,
                                       std::span<const std::string> scene_names,
                                       const EvalOptions& options) {
  if (scenes.size() != scene_names.size()) {
    throw ValidationError("one name per scene is required");
  }
  if (options.methods.empty()) throw ValidationError("no methods selected");
  for (const auto& m : options.methods) {
    if (m != "oracle" && !is_known_method(m)) throw ValidationError("unknown method '" + m + "'");
  }
  if (options.scenario != "new_objects" && options.scenario != "empty_room") {
    throw ValidationError("unknown scenario '" + options.scenario + "'");
  }
  if (scenes.size() < static_cast<std::size_t>(options.folds)) {
    throw TooFewScenes("cross-validation needs at least one scene per fold");
  }

  const auto fold = fold_assignment(scenes.size(), options.folds, options.seed);
  std::vector<EvalRecord> records;
  for (int f = 0; f < options.folds; ++f) {
    std::vector<Scene> train_set;
    for (std::size_t i = 0; i < scenes.size(); ++i) {
      if (fold[i] != f) train_set.push_back(scenes[i]);
    }
    const ModelBundle bundle = train_models(train_set, options.train);
    for (std::size_t i = 0; i < scenes.size(); ++i) {
      if (fold[i] != f) continue;
      eval_scene(records, bundle, scenes[i], scene_names[i], i, f, options);
    }
  }
  return records;
}

namespace {

std::string fmt2(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

// Standard errors print without the leading zero: 0.18 renders as .18.
std::string fmt_sem(double v) {
  std::string s = fmt2(v);
  if (s.rfind("0.", 0) == 0) s.erase(0, 1);
  return s;
}

std::string render_section(std::span<const EvalRecord> records,
                           double EvalRecord::* field, const std::string& title,
                           std::span<const std::string> methods,
                           std::span<const std::string> categories) {
  std::string out = title + "\nmethod";
  for (const auto& c : categories) out += "," + c;
  out += ",AVG\n";

  for (const auto& method : methods) {
    out += method;
    for (const auto& category : categories) {
      double sum = 0.0;
      int n = 0;
      for (const auto& r : records) {
        if (r.method != method || r.category != category || r.matched == 0) continue;
        sum += r.*field;
        n += 1;
      }
      out += ",";
      if (n > 0) out += fmt2(sum / n);
    }

    double sum = 0.0;
    int n = 0;
    for (const auto& r : records) {
      if (r.method != method || r.matched == 0) continue;
      sum += r.*field;
      n += 1;
    }
    const double mean = n > 0 ? sum / n : 0.0;
    double sem = 0.0;
    if (n > 1) {
      double ss = 0.0;
      for (const auto& r : records) {
        if (r.method != method || r.matched == 0) continue;
        ss += (r.*field - mean) * (r.*field - mean);
      }
      sem = std::sqrt(ss / (n - 1)) / std::sqrt(static_cast<double>(n));
    }
    out += "," + fmt2(mean) + "±" + fmt_sem(sem) + "\n";
  }
  return out;
}

}  // namespace

std::string render_report(std::span<const EvalRecord> records) {
  std::vector<std::string> methods;
  std::set<std::string> category_set;
  for (const auto& r : records) {
    if (std::find(methods.begin(), methods.end(), r.method) == methods.end()) {
      methods.push_back(r.method);
    }
    category_set.insert(r.category);
  }
  std::vector<std::string> categories(category_set.begin(), category_set.end());

  return render_section(records, &EvalRecord::location_error, "location (m)", methods,
                        categories) +
         "\n" +
         render_section(records, &EvalRecord::height_error, "height (m)", methods, categories);
}

std::string records_to_csv(std::span<const EvalRecord> records) {
  auto quoted = [](const std::string& s) {
    if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) {
      if (c == '"') q += '"';
      q += c;
    }
    q += '"';
    return q;
  };
  std::string out = "scene,category,method,scenario,fold,matched,location_error,height_error,note\n";
  char buf[64];
  for (const auto& r : records) {
    out += r.scene + "," + r.category + "," + r.method + "," + r.scenario + ",";
    out += std::to_string(r.fold) + "," + std::to_string(r.matched);
    if (r.matched > 0) {
      std::snprintf(buf, sizeof(buf), ",%.6f,%.6f", r.location_error, r.height_error);
      out += buf;
    } else {
      out += ",,";
    }
    out += "," + quoted(r.note) + "\n";
  }
  return out;
}

}  // namespace poseplace
