#include "poseplace/dp_sampler.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "poseplace/errors.hpp"

namespace poseplace {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
}

void DPConfig::validate() const {
  if (!(alpha > 0.0)) throw ValidationError("dp config: alpha must be positive");
  if (aux < 1) throw ValidationError("dp config: aux must be >= 1");
  if (sweeps < 1) throw ValidationError("dp config: sweeps must be >= 1");
  if (burn_in < 0 || burn_in >= sweeps)
    throw ValidationError("dp config: burn_in must lie in [0, sweeps)");
  if (thinning < 1) throw ValidationError("dp config: thinning must be >= 1");
}

double ChainContext::score(int object, int pose) const {
  if (!fixed_scores_.empty() && objects[object].target < 0) {
    return fixed_scores_[object][pose];
  }
  const ObjectSlot& o = objects[object];
  return scorers[o.scorer](pose_candidates[pose], o.location, o.orientation);
}

void ChainContext::cache_fixed_scores() {
  fixed_scores_.assign(objects.size(), {});
  for (std::size_t i = 0; i < objects.size(); ++i) {
    if (objects[i].target >= 0) continue;
    auto& row = fixed_scores_[i];
    row.resize(pose_candidates.size());
    const ObjectSlot& o = objects[i];
    const PotentialScorer& sc = scorers[o.scorer];
    for (std::size_t p = 0; p < pose_candidates.size(); ++p) {
      row[p] = sc(pose_candidates[p], o.location, o.orientation);
    }
  }
}

int ChainContext::draw_p0(Rng& rng) const {
  const double total = p0_cumulative_.back();
  const double u = rng.uniform() * total;
  auto it = std::upper_bound(p0_cumulative_.begin(), p0_cumulative_.end(), u);
  std::size_t idx = static_cast<std::size_t>(it - p0_cumulative_.begin());
  if (idx >= p0_cumulative_.size()) idx = p0_cumulative_.size() - 1;
  return static_cast<int>(idx);
}

void ChainContext::set_placement(int target, const PlacementCandidate& c) {
  for (std::size_t i = 0; i < objects.size(); ++i) {
    if (objects[i].target == target) {
      objects[i].location = c.location;
      objects[i].orientation = c.orientation;
      return;
    }
  }
}

void ChainContext::finalize(const std::array<double, kPoseTypeCount>& pose_type_weights) {
  // P0 over the candidate list: template prior weight, normalized.
  std::vector<double> weights(pose_candidates.size());
  double total = 0.0;
  for (std::size_t p = 0; p < pose_candidates.size(); ++p) {
    weights[p] = pose_type_weights[static_cast<int>(pose_candidates[p].type)];
    total += weights[p];
  }
  if (!(total > 0.0))
    throw ValidationError("pose_type_weights exclude every pose candidate");
  ln_p0.resize(weights.size());
  p0_cumulative_.resize(weights.size());
  double running = 0.0;
  for (std::size_t p = 0; p < weights.size(); ++p) {
    ln_p0[p] = weights[p] > 0.0 ? std::log(weights[p] / total) : kNegInf;
    running += weights[p];
    p0_cumulative_[p] = running;
  }
  cache_fixed_scores();
}

ChainContext make_chain_context(const Scene& scene, std::span<const TargetSpec> targets,
                                const ModelParams& params) {
  ChainContext ctx;
  ctx.pose_candidates = generate_pose_candidates(scene);

  std::map<std::string, int> scorer_index;
  auto scorer_for = [&](const std::string& category) {
    auto it = scorer_index.find(category);
    if (it != scorer_index.end()) return it->second;
    ctx.scorers.emplace_back(params.at(category), params.pose_activity);
    const int idx = static_cast<int>(ctx.scorers.size()) - 1;
    scorer_index.emplace(category, idx);
    return idx;
  };

  for (const auto& obj : scene.objects) {
    // Objects of categories the model never learned carry no pose evidence.
    if (!params.categories.contains(obj.category)) continue;
    ChainContext::ObjectSlot slot;
    slot.category = obj.category;
    slot.scorer = scorer_for(obj.category);
    slot.target = -1;
    slot.location = obj.base_center();
    slot.orientation = obj.box.yaw;
    ctx.objects.push_back(std::move(slot));
  }

  for (std::size_t t = 0; t < targets.size(); ++t) {
    auto candidates = feasible_candidates(scene, targets[t].category);
    ctx.target_hashes.push_back(candidate_set_hash(candidates));

    ChainContext::ObjectSlot slot;
    slot.category = targets[t].category;
    slot.scorer = scorer_for(targets[t].category);
    slot.target = static_cast<int>(t);
    slot.location = candidates.front().location;
    slot.orientation = candidates.front().orientation;
    ctx.objects.push_back(std::move(slot));
    ctx.target_candidates.push_back(std::move(candidates));
  }

  ctx.finalize(params.pose_type_weights);
  return ctx;
}

AssignmentWeights assignment_log_weights(const ChainContext& ctx, const ChainState& state,
                                         int object, std::span<const int> aux_poses,
                                         const DPConfig& config) {
  AssignmentWeights out;
  const double ln_denominator =
      std::log(static_cast<double>(ctx.objects.size()) - 1.0 + config.alpha);
  for (const auto& [label, comp] : state.components) {
    if (comp.count <= 0) continue;
    out.labels.push_back(label);
    out.log_weights.push_back(std::log(static_cast<double>(comp.count)) - ln_denominator +
                              ctx.score(object, comp.pose));
  }
  const double ln_aux_mass = std::log(config.alpha / config.aux) - ln_denominator;
  for (int pose : aux_poses) {
    out.log_weights.push_back(ln_aux_mass + ctx.score(object, pose));
  }
  return out;
}

void sample_assignment(ChainContext& ctx, ChainState& state, int object,
                       std::span<const int> aux_poses, const DPConfig& config, Rng& rng) {
  std::vector<int> aux(aux_poses.begin(), aux_poses.end());

  // Detach the object; a vacated singleton's pose becomes the first auxiliary.
  const int old_label = state.assignment[object];
  if (old_label >= 0) {
    auto it = state.components.find(old_label);
    if (--it->second.count == 0) {
      if (!aux.empty()) aux[0] = it->second.pose;
      state.components.erase(it);
    }
    state.assignment[object] = -1;
  }

  AssignmentWeights w = assignment_log_weights(ctx, state, object, aux, config);
  int pick = log_categorical_sample(rng, w.log_weights);
  if (pick < 0) {
    // Every weight vanished; keep the chain alive with a uniform auxiliary pick.
    pick = static_cast<int>(w.labels.size() + rng.below(aux.size()));
  }

  if (pick < static_cast<int>(w.labels.size())) {
    const int label = w.labels[pick];
    state.assignment[object] = label;
    state.components[label].count += 1;
  } else {
    const int pose = aux[pick - static_cast<int>(w.labels.size())];
    const int label = state.next_label++;
    state.components[label] = Component{pose, 1};
    state.assignment[object] = label;
  }
}

void resample_pose(ChainContext& ctx, ChainState& state, int label, Rng& rng) {
  auto it = state.components.find(label);
  if (it == state.components.end()) return;

  std::vector<int> members;
  for (std::size_t i = 0; i < ctx.objects.size(); ++i) {
    if (state.assignment[i] == label) members.push_back(static_cast<int>(i));
  }

  std::vector<double> logw(ctx.pose_candidates.size());
  for (std::size_t p = 0; p < ctx.pose_candidates.size(); ++p) {
    double v = ctx.ln_p0[p];
    for (int i : members) v += ctx.score(i, static_cast<int>(p));
    logw[p] = v;
  }
  const int pick = log_categorical_sample(rng, logw);
  if (pick >= 0) it->second.pose = pick;  // degenerate case retains the previous pose
}

void resample_placement(ChainContext& ctx, ChainState& state, int target, Rng& rng) {
  const int object = ctx.fixed_count() + target;
  const int label = state.assignment[object];
  const int pose = state.components.at(label).pose;
  const auto& candidates = ctx.target_candidates[target];
  const PotentialScorer& sc = ctx.scorers[ctx.objects[object].scorer];
  const HumanPose& h = ctx.pose_candidates[pose];

  std::vector<double> logw(candidates.size());
  for (std::size_t c = 0; c < candidates.size(); ++c) {
    logw[c] = sc(h, candidates[c].location, candidates[c].orientation);
  }
  int pick = log_categorical_sample(rng, logw);
  if (pick < 0) pick = static_cast<int>(rng.below(candidates.size()));

  state.target_placement[target] = pick;
  ctx.set_placement(target, candidates[pick]);
}

namespace {

SweepSnapshot snapshot_of(const ChainState& state) {
  SweepSnapshot snap;
  std::map<int, int> slot_of;
  for (const auto& [label, comp] : state.components) {
    slot_of[label] = static_cast<int>(snap.component_pose.size());
    snap.component_pose.push_back(comp.pose);
  }
  snap.assignment.reserve(state.assignment.size());
  for (int label : state.assignment) snap.assignment.push_back(slot_of.at(label));
  snap.target_placement = state.target_placement;
  return snap;
}

}  // namespace

ChainResult run_chain(ChainContext& ctx, const DPConfig& config) {
  config.validate();
  Rng rng(config.seed);

  ChainState state;
  state.assignment.assign(ctx.objects.size(), -1);
  state.target_placement.assign(ctx.target_candidates.size(), -1);

  for (std::size_t t = 0; t < ctx.target_candidates.size(); ++t) {
    const int pick = static_cast<int>(rng.below(ctx.target_candidates[t].size()));
    state.target_placement[t] = pick;
    ctx.set_placement(static_cast<int>(t), ctx.target_candidates[t][pick]);
  }
  for (std::size_t i = 0; i < ctx.objects.size(); ++i) {
    const int label = state.next_label++;
    state.components[label] = Component{ctx.draw_p0(rng), 1};
    state.assignment[i] = label;
  }

  ChainResult result;
  std::vector<int> aux(config.aux);
  for (int sweep = 0; sweep < config.sweeps; ++sweep) {
    for (std::size_t i = 0; i < ctx.objects.size(); ++i) {
      for (int& a : aux) a = ctx.draw_p0(rng);
      sample_assignment(ctx, state, static_cast<int>(i), aux, config, rng);
    }
    std::vector<int> labels;
    labels.reserve(state.components.size());
    for (const auto& [label, comp] : state.components) labels.push_back(label);
    for (int label : labels) resample_pose(ctx, state, label, rng);
    for (std::size_t t = 0; t < ctx.target_candidates.size(); ++t) {
      resample_placement(ctx, state, static_cast<int>(t), rng);
    }
    if (sweep >= config.burn_in && (sweep - config.burn_in) % config.thinning == 0) {
      result.snapshots.push_back(snapshot_of(state));
    }
  }

  result.pose_candidates = ctx.pose_candidates;
  result.target_candidates = ctx.target_candidates;
  result.target_hashes = ctx.target_hashes;
  return result;
}

ChainResult run_chain(const Scene& scene, std::span<const TargetSpec> targets,
                      const ModelParams& params, const DPConfig& config) {
  ChainContext ctx = make_chain_context(scene, targets, params);
  return run_chain(ctx, config);
}

CellKey cell_of(const PlacementCandidate& c) {
  auto bucket = [](double v, double width) {
    return static_cast<int>(std::floor(v / width + 1e-9));
  };
  return CellKey{bucket(c.location.x, 0.25), bucket(c.location.y, 0.25),
                 bucket(c.location.z, 0.1), c.orientation_bin};
}

std::vector<PlacementDistribution> estimate_marginals(
    std::span<const SweepSnapshot> snapshots,
    const std::vector<std::vector<PlacementCandidate>>& target_candidates,
    std::span<const std::uint64_t> hashes) {
  std::vector<PlacementDistribution> out(target_candidates.size());
  for (std::size_t t = 0; t < target_candidates.size(); ++t) {
    std::map<CellKey, std::map<int, int>> counts;
    for (const auto& snap : snapshots) {
      const int idx = snap.target_placement[t];
      counts[cell_of(target_candidates[t][idx])][idx] += 1;
    }
    PlacementDistribution& dist = out[t];
    dist.samples = snapshots.size();
    dist.candidate_hash = t < hashes.size() ? hashes[t] : 0;
    for (const auto& [key, by_candidate] : counts) {
      CellStat stat;
      int total = 0, best = -1, best_count = -1;
      for (const auto& [idx, n] : by_candidate) {
        total += n;
        if (n > best_count) {  // map order breaks ties toward the smaller index
          best_count = n;
          best = idx;
        }
      }
      stat.freq = static_cast<double>(total) / static_cast<double>(snapshots.size());
      stat.representative = best;
      stat.candidate = target_candidates[t][best];
      dist.cells.emplace(key, std::move(stat));
    }
  }
  return out;
}

namespace {

// Candidate ordering key used for deterministic tie-breaks.
std::tuple<int, double, double, int> candidate_order_key(const PlacementCandidate& c) {
  return {c.support.furniture, c.location.x, c.location.y, c.orientation_bin};
}

}  // namespace

std::vector<ObjectInstance> predict_arrangement(std::span<const PlacementDistribution> marginals,
                                                const Scene& scene,
                                                std::span<const TargetSpec> targets) {
  if (marginals.size() != targets.size())
    throw ValidationError("predict_arrangement: one marginal per target required");

  std::vector<std::size_t> order(targets.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  auto peak = [&](std::size_t t) {
    double best = 0.0;
    for (const auto& [key, stat] : marginals[t].cells) best = std::max(best, stat.freq);
    return best;
  };
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return peak(a) > peak(b); });

  std::vector<ObjectInstance> placed(targets.size());
  std::vector<bool> done(targets.size(), false);
  for (std::size_t t : order) {
    std::vector<const CellStat*> cells;
    cells.reserve(marginals[t].cells.size());
    for (const auto& [key, stat] : marginals[t].cells) cells.push_back(&stat);
    std::stable_sort(cells.begin(), cells.end(), [](const CellStat* a, const CellStat* b) {
      if (a->freq != b->freq) return a->freq > b->freq;
      return candidate_order_key(a->candidate) < candidate_order_key(b->candidate);
    });

    bool ok = false;
    for (const CellStat* cell : cells) {
      ObjectInstance inst =
          scene.make_instance(targets[t].category, cell->candidate.location,
                              cell->candidate.orientation);
      bool hit = false;
      for (const auto& f : scene.furniture) {
        if (check_collision(inst.box, f.box)) { hit = true; break; }
      }
      if (!hit) {
        for (const auto& o : scene.objects) {
          if (check_collision(inst.box, o.box)) { hit = true; break; }
        }
      }
      if (!hit) {
        for (std::size_t u = 0; u < targets.size(); ++u) {
          if (done[u] && check_collision(inst.box, placed[u].box)) { hit = true; break; }
        }
      }
      if (hit) continue;
      placed[t] = std::move(inst);
      done[t] = true;
      ok = true;
      break;
    }
    if (!ok)
      throw NoFeasiblePlacement("no collision-free cell left for target '" + targets[t].id + "'");
  }
  return placed;
}

HeatmapGrid sample_heatmap(std::span<const SweepSnapshot> snapshots, const Scene& scene,
                           int target, double resolution,
                           std::span<const PlacementCandidate> candidates) {
  if (!(resolution > 0.0)) throw ValidationError("heatmap: resolution must be positive");
  HeatmapGrid grid;
  grid.resolution = resolution;
  grid.nx = std::max(1, static_cast<int>(std::floor(scene.room_width / resolution + 1e-9)));
  grid.ny = std::max(1, static_cast<int>(std::floor(scene.room_depth / resolution + 1e-9)));
  grid.counts.assign(static_cast<std::size_t>(grid.nx) * grid.ny, 0);

  auto bucket = [&](double v, int n) {
    int idx = static_cast<int>(std::floor(v / resolution + 1e-9));
    return std::clamp(idx, 0, n - 1);
  };
  for (const auto& snap : snapshots) {
    const auto& c = candidates[snap.target_placement[target]];
    const int ix = bucket(c.location.x, grid.nx);
    const int iy = bucket(c.location.y, grid.ny);
    grid.counts[static_cast<std::size_t>(iy) * grid.nx + ix] += 1;
  }
  return grid;
}

}  // namespace poseplace
