#include "poseplace/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "poseplace/errors.hpp"
#include "poseplace/learning.hpp"
#include "poseplace/numerics.hpp"

namespace poseplace {

namespace {

// Training scenes carry ground truth in `objects`; extra labeled placements
// count as observations too.
std::vector<const ObjectInstance*> training_instances(const Scene& scene) {
  std::vector<const ObjectInstance*> out;
  out.reserve(scene.objects.size() + scene.labeled_placements.size());
  for (const auto& o : scene.objects) out.push_back(&o);
  for (const auto& o : scene.labeled_placements) out.push_back(&o);
  return out;
}

Scene merged_view(const Scene& scene) {
  Scene view = scene;
  view.objects.insert(view.objects.end(), scene.labeled_placements.begin(),
                      scene.labeled_placements.end());
  view.labeled_placements.clear();
  return view;
}

double min_horizontal_distance(Vec3 point, std::span<const ObjectInstance> objects) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& obj : objects) best = std::min(best, horizontal_norm(point - obj.base_center()));
  return best;
}

}  // namespace

CategoryStatsMap fit_category_stats(std::span<const Scene> scenes) {
  CategoryStatsMap stats;
  struct Acc {
    double z = 0, nx = 0, ny = 0, nz = 0;
  };
  std::map<std::string, Acc> acc;
  for (const auto& scene : scenes) {
    for (const auto* obj : training_instances(scene)) {
      auto& s = stats[obj->category];
      auto& a = acc[obj->category];
      Vec3 base = obj->base_center();
      s.yaws.push_back(obj->box.yaw);
      s.count += 1;
      a.z += base.z;
      a.nx += base.x / scene.room_width;
      a.ny += base.y / scene.room_depth;
      a.nz += base.z / scene.room_height;
    }
  }
  for (auto& [category, s] : stats) {
    const auto& a = acc[category];
    s.mean_height = a.z / s.count;
    s.room_mean = {a.nx / s.count, a.ny / s.count, a.nz / s.count};
  }
  return stats;
}

double PairStats::log_density(double dx, double dy, double rel_ori) const {
  const double det = cov_xx * cov_yy - cov_xy * cov_xy;
  const double ux = dx - mean_x;
  const double uy = dy - mean_y;
  const double q = (cov_yy * ux * ux - 2.0 * cov_xy * ux * uy + cov_xx * uy * uy) / det;
  return -std::log(kTwoPi) - 0.5 * std::log(det) - 0.5 * q +
         vonmises_logpdf(rel_ori, ori_mu, ori_kappa);
}

PairStatsMap fit_pair_stats(std::span<const Scene> scenes) {
  struct Samples {
    std::vector<double> dx, dy, ori;
  };
  std::map<PairKey, Samples> samples;
  for (const auto& scene : scenes) {
    auto instances = training_instances(scene);
    for (std::size_t t = 0; t < instances.size(); ++t) {
      for (std::size_t r = 0; r < instances.size(); ++r) {
        if (t == r) continue;
        const auto& target = *instances[t];
        const auto& ref = *instances[r];
        Vec3 d = target.base_center() - ref.base_center();
        rotate_xy(-ref.box.yaw, d.x, d.y);
        auto& s = samples[{target.category, ref.category}];
        s.dx.push_back(d.x);
        s.dy.push_back(d.y);
        s.ori.push_back(wrap_pi(target.box.yaw - ref.box.yaw));
      }
    }
  }

  PairStatsMap out;
  const double floor2 = kSigmaFloor * kSigmaFloor;
  for (auto& [key, s] : samples) {
    PairStats p;
    const std::size_t n = s.dx.size();
    p.count = static_cast<int>(n);
    for (std::size_t i = 0; i < n; ++i) {
      p.mean_x += s.dx[i];
      p.mean_y += s.dy[i];
    }
    p.mean_x /= n;
    p.mean_y /= n;
    for (std::size_t i = 0; i < n; ++i) {
      const double ux = s.dx[i] - p.mean_x;
      const double uy = s.dy[i] - p.mean_y;
      p.cov_xx += ux * ux;
      p.cov_xy += ux * uy;
      p.cov_yy += uy * uy;
    }
    p.cov_xx = std::max(p.cov_xx / n, floor2);
    p.cov_yy = std::max(p.cov_yy / n, floor2);
    p.cov_xy /= n;
    // Keep the matrix safely invertible; a near-singular cross term collapses
    // to an axis-aligned model.
    if (p.cov_xx * p.cov_yy - p.cov_xy * p.cov_xy < 1e-12) p.cov_xy = 0.0;

    if (n == 1) {
      p.ori_mu = s.ori[0];
      p.ori_kappa = kKappaMax;
    } else {
      auto fit = fit_vonmises_mle(s.ori);
      p.ori_mu = fit.mu;
      p.ori_kappa = fit.kappa;
    }
    out.emplace(key, p);
  }
  return out;
}

int open_area_pick(std::span<const PlacementCandidate> candidates,
                   std::span<const ObjectInstance> context) {
  if (candidates.empty()) throw EmptyCandidateSet("open-area pick needs candidates");
  int best = 0;
  double best_score = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const double score = min_horizontal_distance(candidates[i].location, context);
    if (score > best_score) {
      best_score = score;
      best = static_cast<int>(i);
    }
  }
  return best;
}

int height_pick(std::span<const PlacementCandidate> candidates, double mean_height) {
  if (candidates.empty()) throw EmptyCandidateSet("height pick needs candidates");
  int best = 0;
  double best_err = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const double err = std::abs(candidates[i].location.z - mean_height);
    if (err < best_err) {
      best_err = err;
      best = static_cast<int>(i);
    }
  }
  return best;
}

int room_context_pick(std::span<const PlacementCandidate> candidates, const Scene& scene,
                      Vec3 normalized_mean) {
  if (candidates.empty()) throw EmptyCandidateSet("room-context pick needs candidates");
  const Vec3 target{normalized_mean.x * scene.room_width, normalized_mean.y * scene.room_depth,
                    normalized_mean.z * scene.room_height};
  int best = 0;
  double best_err = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const double err = norm(candidates[i].location - target);
    if (err < best_err) {
      best_err = err;
      best = static_cast<int>(i);
    }
  }
  return best;
}

ObjectContextScores object_context_scores(std::span<const PlacementCandidate> candidates,
                                          std::span<const ObjectInstance> context,
                                          const std::string& category,
                                          const PairStatsMap& pairs) {
  if (candidates.empty()) throw EmptyCandidateSet("object-context scoring needs candidates");
  const PairStats* chosen = nullptr;
  std::string reference;
  for (const auto& [key, stats] : pairs) {
    if (key.first != category) continue;
    bool present = false;
    for (const auto& obj : context) {
      if (obj.category == key.second) {
        present = true;
        break;
      }
    }
    if (!present) continue;
    if (chosen == nullptr || stats.dispersion() < chosen->dispersion()) {
      chosen = &stats;
      reference = key.second;
    }
  }
  if (chosen == nullptr) {
    throw NoReference("no trained reference category is present for '" + category + "'");
  }

  ObjectContextScores out;
  out.reference = reference;
  out.log_scores.reserve(candidates.size());
  for (const auto& c : candidates) {
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& obj : context) {
      if (obj.category != reference) continue;
      Vec3 d = c.location - obj.base_center();
      rotate_xy(-obj.box.yaw, d.x, d.y);
      best = std::max(best,
                      chosen->log_density(d.x, d.y, wrap_pi(c.orientation - obj.box.yaw)));
    }
    out.log_scores.push_back(best);
  }
  return out;
}

PlacementCandidate apply_training_orientation(PlacementCandidate pick,
                                              std::span<const double> training_yaws) {
  if (training_yaws.empty()) return pick;
  double best = training_yaws[0];
  for (double yaw : training_yaws.subspan(1)) {
    if (circular_distance(yaw, pick.orientation) < circular_distance(best, pick.orientation)) {
      best = yaw;
    }
  }
  pick.orientation = wrap_two_pi(best);
  const double bin_width = kTwoPi / kOrientationBins;
  pick.orientation_bin =
      static_cast<int>(std::llround(pick.orientation / bin_width)) % kOrientationBins;
  return pick;
}

BaselinePick baseline_open_area(const Scene& scene, const std::string& category,
                                const CategoryStats& stats) {
  auto candidates = feasible_candidates(scene, category);
  BaselinePick pick;
  pick.candidate_hash = candidate_set_hash(candidates);
  pick.candidate = apply_training_orientation(
      candidates[open_area_pick(candidates, scene.objects)], stats.yaws);
  return pick;
}

BaselinePick baseline_height(const Scene& scene, const std::string& category,
                             const CategoryStats& stats) {
  auto candidates = feasible_candidates(scene, category);
  BaselinePick pick;
  pick.candidate_hash = candidate_set_hash(candidates);
  pick.candidate = candidates[height_pick(candidates, stats.mean_height)];
  return pick;
}

BaselinePick baseline_room_context(const Scene& scene, const std::string& category,
                                   const CategoryStats& stats) {
  auto candidates = feasible_candidates(scene, category);
  BaselinePick pick;
  pick.candidate_hash = candidate_set_hash(candidates);
  pick.candidate = candidates[room_context_pick(candidates, scene, stats.room_mean)];
  return pick;
}

BaselinePick baseline_object_context(const Scene& scene, const std::string& category,
                                     const PairStatsMap& pairs) {
  auto candidates = feasible_candidates(scene, category);
  auto scores = object_context_scores(candidates, scene.objects, category, pairs);
  int best = 0;
  for (std::size_t i = 1; i < scores.log_scores.size(); ++i) {
    if (scores.log_scores[i] > scores.log_scores[best]) best = static_cast<int>(i);
  }
  BaselinePick pick;
  pick.candidate_hash = candidate_set_hash(candidates);
  pick.candidate = candidates[best];
  return pick;
}

std::vector<double> extract_features(const Scene& scene,
                                     std::span<const ObjectInstance> context,
                                     const PlacementCandidate& candidate,
                                     const std::string& category,
                                     std::span<const std::string> context_categories) {
  std::vector<double> f;
  f.reserve(31);
  const Vec3 loc = candidate.location;
  f.push_back(loc.z);
  f.push_back(loc.x / scene.room_width);
  f.push_back(loc.y / scene.room_depth);
  f.push_back(std::min({loc.x, scene.room_width - loc.x, loc.y, scene.room_depth - loc.y}));
  const double min_dist = min_horizontal_distance(loc, context);
  f.push_back(std::isfinite(min_dist) ? min_dist : 0.0);

  for (const auto& cat : context_categories) {
    const ObjectInstance* nearest = nullptr;
    double nearest_dist = std::numeric_limits<double>::infinity();
    for (const auto& obj : context) {
      if (obj.category != cat) continue;
      const double d = horizontal_norm(loc - obj.base_center());
      if (d < nearest_dist) {
        nearest_dist = d;
        nearest = &obj;
      }
    }
    if (nearest == nullptr) {
      f.push_back(0.0);
      f.push_back(0.0);
    } else {
      const Vec3 d = nearest->base_center() - loc;
      f.push_back(nearest_dist);
      f.push_back(wrap_pi(std::atan2(d.y, d.x) - candidate.orientation));
    }
  }
  for (std::size_t i = context_categories.size(); i < 8; ++i) {
    f.push_back(0.0);
    f.push_back(0.0);
  }

  for (int b = 0; b < kOrientationBins; ++b) f.push_back(b == candidate.orientation_bin ? 1.0 : 0.0);

  const Vec3 size = scene.category_size(category);
  f.push_back(size.x * size.y);
  if (candidate.support.is_floor()) {
    f.push_back(scene.room_width * scene.room_depth);
  } else {
    const auto& top = scene.furniture[candidate.support.furniture].box;
    f.push_back(top.size.x * top.size.y);
  }
  return f;
}

namespace {

double log_sigmoid(double s) {
  return s > 0 ? -std::log1p(std::exp(-s)) : s - std::log1p(std::exp(s));
}

struct LabeledExample {
  std::vector<double> features;
  int label = 0;  // 1 placement-like, 0 background
};

// Penalized Bernoulli log-likelihood; the bias stays unregularized.
double lr_objective(std::span<const LabeledExample> data, std::span<const double> w, double b,
                    double l2) {
  double obj = 0.0;
  for (const auto& ex : data) {
    double s = b;
    for (std::size_t j = 0; j < w.size(); ++j) s += w[j] * ex.features[j];
    obj += ex.label == 1 ? log_sigmoid(s) : log_sigmoid(-s);
  }
  double penalty = 0.0;
  for (double wj : w) penalty += wj * wj;
  return obj - 0.5 * l2 * penalty;
}

}  // namespace

ClassifierModel train_category_classifier(std::span<const Scene> scenes,
                                          const std::string& category,
                                          std::span<const std::string> context_categories,
                                          const ClassifierTrainConfig& config) {
  std::vector<LabeledExample> data;
  int positives = 0;
  for (std::size_t s = 0; s < scenes.size(); ++s) {
    const Scene& full = merged_view(scenes[s]);
    std::vector<ObjectInstance> labels;
    Scene stripped = full;
    stripped.objects.clear();
    for (const auto& obj : full.objects) {
      (obj.category == category ? labels : stripped.objects).push_back(obj);
    }
    if (labels.empty()) continue;

    auto candidates = feasible_candidates(stripped, category);
    std::vector<std::size_t> negatives;
    int scene_positives = 0;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
      double d = std::numeric_limits<double>::infinity();
      for (const auto& label : labels) {
        d = std::min(d, norm(candidates[i].location - label.base_center()));
      }
      if (d <= config.positive_radius) {
        data.push_back({extract_features(stripped, stripped.objects, candidates[i], category,
                                         context_categories),
                        1});
        ++scene_positives;
      } else {
        negatives.push_back(i);
      }
    }
    positives += scene_positives;

    // Seeded sample without replacement, negative_ratio per positive.
    Rng rng(split_seed(config.seed, fnv1a64(category.data(), category.size()), s));
    std::size_t want = std::min(negatives.size(),
                                static_cast<std::size_t>(scene_positives) *
                                    static_cast<std::size_t>(config.negative_ratio));
    for (std::size_t i = 0; i < want; ++i) {
      std::size_t j = i + rng.below(negatives.size() - i);
      std::swap(negatives[i], negatives[j]);
      data.push_back({extract_features(stripped, stripped.objects, candidates[negatives[i]],
                                       category, context_categories),
                      0});
    }
  }
  if (positives < 3) {
    throw InsufficientData("category '" + category + "': needs at least 3 nearby candidates, found " +
                           std::to_string(positives));
  }

  ClassifierModel model;
  model.context_categories.assign(context_categories.begin(), context_categories.end());
  const std::size_t dim = data.front().features.size();
  model.weights.assign(dim, 0.0);

  double objective = lr_objective(data, model.weights, model.bias, config.l2);
  model.objective_trace.push_back(objective);
  double step = 1.0;
  std::vector<double> grad(dim), trial(dim);
  for (int iter = 0; iter < config.max_iters; ++iter) {
    std::fill(grad.begin(), grad.end(), 0.0);
    double grad_b = 0.0;
    for (const auto& ex : data) {
      double s = model.bias;
      for (std::size_t j = 0; j < dim; ++j) s += model.weights[j] * ex.features[j];
      const double resid = ex.label - 1.0 / (1.0 + std::exp(-s));
      for (std::size_t j = 0; j < dim; ++j) grad[j] += resid * ex.features[j];
      grad_b += resid;
    }
    for (std::size_t j = 0; j < dim; ++j) grad[j] -= config.l2 * model.weights[j];

    double gnorm2 = grad_b * grad_b;
    for (double g : grad) gnorm2 += g * g;
    if (std::sqrt(gnorm2) <= config.grad_tol) break;

    bool accepted = false;
    for (int halving = 0; halving < 60; ++halving) {
      for (std::size_t j = 0; j < dim; ++j) trial[j] = model.weights[j] + step * grad[j];
      const double trial_b = model.bias + step * grad_b;
      const double trial_obj = lr_objective(data, trial, trial_b, config.l2);
      if (trial_obj >= objective + 1e-4 * step * gnorm2) {
        model.weights = trial;
        model.bias = trial_b;
        objective = trial_obj;
        model.objective_trace.push_back(objective);
        step *= 1.2;
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;  // no ascent direction left at machine precision
  }
  return model;
}

ClassifierSet train_classifier(std::span<const Scene> scenes,
                               const ClassifierTrainConfig& config) {
  if (scenes.empty()) throw TooFewScenes("classifier training requires at least one scene");

  std::map<std::string, int> counts;
  for (const auto& scene : scenes) {
    for (const auto* obj : training_instances(scene)) counts[obj->category] += 1;
  }
  std::vector<std::pair<std::string, int>> ranked(counts.begin(), counts.end());
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  std::vector<std::string> context_categories;
  for (const auto& entry : ranked) {
    if (context_categories.size() == 8) break;
    context_categories.push_back(entry.first);
  }

  ClassifierSet set;
  for (const auto& entry : counts) {
    try {
      set.emplace(entry.first,
                  train_category_classifier(scenes, entry.first, context_categories, config));
    } catch (const InsufficientData&) {
      // Categories without enough nearby candidates stay unmodeled.
    }
  }
  return set;
}

int classifier_pick(std::span<const PlacementCandidate> candidates, const Scene& scene,
                    std::span<const ObjectInstance> context, const std::string& category,
                    const ClassifierModel& model) {
  if (candidates.empty()) throw EmptyCandidateSet("classifier pick needs candidates");
  int best = 0;
  double best_score = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    auto f = extract_features(scene, context, candidates[i], category, model.context_categories);
    double s = model.bias;
    for (std::size_t j = 0; j < f.size(); ++j) s += model.weights[j] * f[j];
    if (s > best_score) {
      best_score = s;
      best = static_cast<int>(i);
    }
  }
  return best;
}

BaselinePick baseline_classifier(const Scene& scene, const std::string& category,
                                 const ClassifierModel& model) {
  auto candidates = feasible_candidates(scene, category);
  BaselinePick pick;
  pick.candidate_hash = candidate_set_hash(candidates);
  pick.candidate =
      candidates[classifier_pick(candidates, scene, scene.objects, category, model)];
  return pick;
}

namespace {

void check_fmm_config(const FMMConfig& config) {
  if (config.k < 1) throw ValidationError("mixture size must be at least 1");
  if (config.em_iters < 1) throw ValidationError("em_iters must be at least 1");
  if (!(config.em_tol >= 0)) throw ValidationError("em_tol must be non-negative");
}

std::map<std::string, PotentialScorer> build_scorers(const ModelParams& params) {
  std::map<std::string, PotentialScorer> scorers;
  for (const auto& [cat, cp] : params.categories) {
    scorers.emplace(cat, PotentialScorer(cp, params.pose_activity));
  }
  return scorers;
}

struct FmmScene {
  Scene view;
  std::vector<HumanPose> poses;
  std::vector<int> h;                       // pose index per mixture slot
  std::vector<std::vector<double>> scores;  // [object][pose] under current parameters
};

void rebuild_scores(FmmScene& s, const std::map<std::string, PotentialScorer>& scorers) {
  s.scores.assign(s.view.objects.size(), {});
  for (std::size_t i = 0; i < s.view.objects.size(); ++i) {
    const auto& obj = s.view.objects[i];
    const auto& scorer = scorers.at(obj.category);
    auto& row = s.scores[i];
    row.resize(s.poses.size());
    for (std::size_t p = 0; p < s.poses.size(); ++p) {
      row[p] = scorer(s.poses[p], obj.base_center(), obj.box.yaw);
    }
  }
}

double fmm_observed_ll(std::span<const FmmScene> scenes, int k) {
  const double ln_k = std::log(static_cast<double>(k));
  double ll = 0.0;
  std::vector<double> logs(static_cast<std::size_t>(k));
  for (const auto& s : scenes) {
    for (const auto& row : s.scores) {
      for (int c = 0; c < k; ++c) logs[static_cast<std::size_t>(c)] = row[s.h[c]];
      ll += log_sum_exp(logs) - ln_k;
    }
  }
  return ll;
}

}  // namespace

FMMTrainResult fmm_fit(std::span<const Scene> scenes, const FMMConfig& config) {
  check_fmm_config(config);
  if (scenes.empty()) throw TooFewScenes("mixture training requires at least one scene");
  const int k = config.k;

  FMMTrainResult result;
  for (const auto& scene : scenes) {
    for (const auto& entry : scene.categories) {
      result.params.categories.emplace(entry.first, default_category_params());
    }
  }
  for (const auto& scene : scenes) {
    for (const auto* obj : training_instances(scene)) {
      result.params.categories.emplace(obj->category, default_category_params());
    }
  }

  std::vector<FmmScene> states;
  states.reserve(scenes.size());
  for (std::size_t s = 0; s < scenes.size(); ++s) {
    FmmScene state;
    state.view = merged_view(scenes[s]);
    state.poses = generate_pose_candidates(state.view);
    Rng rng(split_seed(config.seed, s));
    state.h.resize(static_cast<std::size_t>(k));
    for (auto& h : state.h) h = static_cast<int>(rng.below(state.poses.size()));
    states.push_back(std::move(state));
  }

  auto scorers = build_scorers(result.params);
  for (auto& state : states) rebuild_scores(state, scorers);
  double ll = fmm_observed_ll(states, k);
  result.loglik.push_back(ll);

  for (int iter = 0; iter < config.em_iters; ++iter) {
    // E-step: responsibilities over the equally weighted mixture slots.
    std::vector<std::vector<std::vector<double>>> gamma(states.size());
    for (std::size_t s = 0; s < states.size(); ++s) {
      const auto& state = states[s];
      gamma[s].resize(state.view.objects.size());
      std::vector<double> logs(static_cast<std::size_t>(k));
      for (std::size_t i = 0; i < state.view.objects.size(); ++i) {
        for (int c = 0; c < k; ++c) logs[static_cast<std::size_t>(c)] = state.scores[i][state.h[c]];
        const double lse = log_sum_exp(logs);
        gamma[s][i].resize(static_cast<std::size_t>(k));
        for (int c = 0; c < k; ++c) {
          gamma[s][i][c] = std::exp(logs[static_cast<std::size_t>(c)] - lse);
        }
      }
    }

    auto saved_params = result.params;
    auto saved_h = states;

    // M-step: alternate weighted parameter fits with pose argmax updates.
    for (int round = 0; round < 3; ++round) {
      std::map<std::string, std::vector<TrainingPair>> pooled;
      std::array<std::array<double, kActivityCount>, kPoseTypeCount> pa_counts{};
      for (std::size_t s = 0; s < states.size(); ++s) {
        const auto& state = states[s];
        for (std::size_t i = 0; i < state.view.objects.size(); ++i) {
          const auto& obj = state.view.objects[i];
          for (int c = 0; c < k; ++c) {
            const double w = gamma[s][i][c];
            const HumanPose& pose = state.poses[state.h[c]];
            pooled[obj.category].push_back(
                make_training_pair(pose, obj.base_center(), obj.box.yaw, w));
            pa_counts[static_cast<int>(pose.type)][static_cast<int>(pose.activity)] += w;
          }
        }
      }
      for (auto& [cat, pairs] : pooled) {
        if (pairs.size() < 2) continue;
        result.params.categories[cat] = fit_category_params(pairs);
      }
      for (int t = 0; t < kPoseTypeCount; ++t) {
        result.params.pose_activity.rows[t] = fit_activity_row(pa_counts[t]);
      }

      scorers = build_scorers(result.params);
      bool changed = false;
      for (std::size_t s = 0; s < states.size(); ++s) {
        auto& state = states[s];
        rebuild_scores(state, scorers);
        if (state.view.objects.empty()) continue;
        for (int c = 0; c < k; ++c) {
          int best = state.h[c];
          double best_score = -std::numeric_limits<double>::infinity();
          for (std::size_t p = 0; p < state.poses.size(); ++p) {
            double total = 0.0;
            for (std::size_t i = 0; i < state.view.objects.size(); ++i) {
              total += gamma[s][i][c] * state.scores[i][p];
            }
            if (total > best_score) {
              best_score = total;
              best = static_cast<int>(p);
            }
          }
          if (best != state.h[c]) {
            state.h[c] = best;
            changed = true;
          }
        }
      }
      if (!changed) break;
    }

    const double next_ll = fmm_observed_ll(states, k);
    if (next_ll < ll - 1e-12) {
      // Floors and smoothing can nudge the exact maximizer; reject and stop
      // rather than record a decrease.
      result.params = std::move(saved_params);
      states = std::move(saved_h);
      break;
    }
    result.loglik.push_back(next_ll);
    const bool converged = std::abs(next_ll - ll) <= config.em_tol * std::max(1.0, std::abs(ll));
    ll = next_ll;
    if (converged) break;
  }

  result.params.validate();
  return result;
}

FMMPredictResult fmm_predict(const Scene& scene, std::span<const TargetSpec> targets,
                             const ModelParams& params, const FMMConfig& config) {
  check_fmm_config(config);
  const int k = config.k;
  for (const auto& t : targets) params.at(t.category);
  auto scorers = build_scorers(params);
  const auto poses = generate_pose_candidates(scene);

  FMMPredictResult result;
  std::map<std::string, std::vector<PlacementCandidate>> per_category;
  for (const auto& t : targets) {
    if (per_category.contains(t.category)) continue;
    auto candidates = feasible_candidates(scene, t.category);
    result.candidate_hashes[t.category] = candidate_set_hash(candidates);
    per_category.emplace(t.category, std::move(candidates));
  }

  struct Slot {
    const std::string* category;
    const PotentialScorer* scorer;
    Vec3 location;
    double orientation = 0.0;
    const std::vector<PlacementCandidate>* candidates = nullptr;  // null for fixed objects
    int pick = -1;
  };
  std::vector<Slot> slots;
  for (const auto& obj : scene.objects) {
    // Objects of categories the model never learned carry no pose evidence.
    if (!params.categories.contains(obj.category)) continue;
    slots.push_back({&obj.category, &scorers.at(obj.category), obj.base_center(), obj.box.yaw,
                     nullptr, -1});
  }
  Rng rng(config.seed);
  for (const auto& t : targets) {
    const auto& candidates = per_category.at(t.category);
    Slot slot{&t.category, &scorers.at(t.category), {}, 0.0, &candidates,
              static_cast<int>(rng.below(candidates.size()))};
    slot.location = candidates[slot.pick].location;
    slot.orientation = candidates[slot.pick].orientation;
    slots.push_back(slot);
  }
  std::vector<int> h(static_cast<std::size_t>(k));
  for (auto& hc : h) hc = static_cast<int>(rng.below(poses.size()));

  auto score_row = [&](const Slot& slot, std::vector<double>& row) {
    row.resize(poses.size());
    for (std::size_t p = 0; p < poses.size(); ++p) {
      row[p] = (*slot.scorer)(poses[p], slot.location, slot.orientation);
    }
  };
  std::vector<std::vector<double>> rows(slots.size());
  for (std::size_t i = 0; i < slots.size(); ++i) score_row(slots[i], rows[i]);

  auto observed_ll = [&]() {
    const double ln_k = std::log(static_cast<double>(k));
    double ll = 0.0;
    std::vector<double> logs(static_cast<std::size_t>(k));
    for (const auto& row : rows) {
      for (int c = 0; c < k; ++c) logs[static_cast<std::size_t>(c)] = row[h[c]];
      ll += log_sum_exp(logs) - ln_k;
    }
    return ll;
  };

  double ll = observed_ll();
  result.loglik.push_back(ll);

  for (int iter = 0; iter < config.em_iters; ++iter) {
    std::vector<std::vector<double>> gamma(slots.size(),
                                           std::vector<double>(static_cast<std::size_t>(k)));
    std::vector<double> logs(static_cast<std::size_t>(k));
    for (std::size_t i = 0; i < slots.size(); ++i) {
      for (int c = 0; c < k; ++c) logs[static_cast<std::size_t>(c)] = rows[i][h[c]];
      const double lse = log_sum_exp(logs);
      for (int c = 0; c < k; ++c) gamma[i][c] = std::exp(logs[static_cast<std::size_t>(c)] - lse);
    }

    auto saved_h = h;
    auto saved_slots = slots;
    auto saved_rows = rows;

    for (int round = 0; round < 20; ++round) {
      bool changed = false;
      for (int c = 0; c < k; ++c) {
        int best = h[c];
        double best_score = -std::numeric_limits<double>::infinity();
        for (std::size_t p = 0; p < poses.size(); ++p) {
          double total = 0.0;
          for (std::size_t i = 0; i < slots.size(); ++i) total += gamma[i][c] * rows[i][p];
          if (total > best_score) {
            best_score = total;
            best = static_cast<int>(p);
          }
        }
        if (best != h[c]) {
          h[c] = best;
          changed = true;
        }
      }
      for (std::size_t i = 0; i < slots.size(); ++i) {
        auto& slot = slots[i];
        if (slot.candidates == nullptr) continue;
        int best = slot.pick;
        double best_score = -std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < slot.candidates->size(); ++j) {
          const auto& c = (*slot.candidates)[j];
          double total = 0.0;
          for (int m = 0; m < k; ++m) {
            total += gamma[i][m] * (*slot.scorer)(poses[h[m]], c.location, c.orientation);
          }
          if (total > best_score) {
            best_score = total;
            best = static_cast<int>(j);
          }
        }
        if (best != slot.pick) {
          slot.pick = best;
          slot.location = (*slot.candidates)[best].location;
          slot.orientation = (*slot.candidates)[best].orientation;
          score_row(slot, rows[i]);
          changed = true;
        }
      }
      if (!changed) break;
    }

    const double next_ll = observed_ll();
    if (next_ll < ll - 1e-12) {
      h = std::move(saved_h);
      slots = std::move(saved_slots);
      rows = std::move(saved_rows);
      break;
    }
    result.loglik.push_back(next_ll);
    const bool converged = std::abs(next_ll - ll) <= config.em_tol * std::max(1.0, std::abs(ll));
    ll = next_ll;
    if (converged) break;
  }

  for (const auto& slot : slots) {
    if (slot.candidates == nullptr) continue;
    result.objects.push_back(scene.make_instance(*slot.category, slot.location, slot.orientation));
  }
  return result;
}

PlacementDistribution score_distribution(std::span<const PlacementCandidate> candidates,
                                         std::span<const double> log_scores,
                                         std::uint64_t candidate_hash) {
  if (candidates.empty()) throw EmptyCandidateSet("score distribution needs candidates");
  if (candidates.size() != log_scores.size()) {
    throw ValidationError("one score per candidate is required");
  }
  const double lse = log_sum_exp(log_scores);

  PlacementDistribution dist;
  dist.candidate_hash = candidate_hash;
  std::map<CellKey, double> best_mass;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const double p = std::isfinite(lse) ? std::exp(log_scores[i] - lse)
                                        : 1.0 / static_cast<double>(candidates.size());
    const CellKey key = cell_of(candidates[i]);
    auto& cell = dist.cells[key];
    cell.freq += p;
    auto [it, inserted] = best_mass.emplace(key, -1.0);
    if (p > it->second) {
      it->second = p;
      cell.representative = static_cast<int>(i);
      cell.candidate = candidates[i];
    }
  }
  std::erase_if(dist.cells, [](const auto& kv) { return kv.second.freq <= 0.0; });
  return dist;
}

PlacementDistribution combine_human_object(const PlacementDistribution& human,
                                           const PlacementDistribution& object, double omega) {
  if (!(omega >= 0.0 && omega <= 1.0)) throw DomainError("omega must lie in [0, 1]");
  if (human.candidate_hash != object.candidate_hash) {
    throw MismatchedCandidates("distributions to combine score different candidate sets");
  }

  PlacementDistribution out;
  out.candidate_hash = human.candidate_hash;
  out.samples = omega == 1.0   ? human.samples
                : omega == 0.0 ? object.samples
                               : std::max(human.samples, object.samples);

  auto add = [&](const CellKey& key, const CellStat* h, const CellStat* o) {
    const double mass_h = omega * (h ? h->freq : 0.0);
    const double mass_o = (1.0 - omega) * (o ? o->freq : 0.0);
    const double freq = mass_h + mass_o;
    if (freq == 0.0) return;
    CellStat stat = (h && mass_h >= mass_o) ? *h : *o;
    stat.freq = freq;
    out.cells.emplace(key, stat);
  };
  auto hi = human.cells.begin();
  auto oi = object.cells.begin();
  while (hi != human.cells.end() || oi != object.cells.end()) {
    if (oi == object.cells.end() || (hi != human.cells.end() && hi->first < oi->first)) {
      add(hi->first, &hi->second, nullptr);
      ++hi;
    } else if (hi == human.cells.end() || oi->first < hi->first) {
      add(oi->first, nullptr, &oi->second);
      ++oi;
    } else {
      add(hi->first, &hi->second, &oi->second);
      ++hi;
      ++oi;
    }
  }
  return out;
}

}  // namespace poseplace
