#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include "poseplace/densities.hpp"
#include "poseplace/numerics.hpp"
#include "poseplace/scene.hpp"

namespace poseplace {

struct DPConfig {
  double alpha = 1.0;  // concentration
  int aux = 3;         // auxiliary components offered per assignment draw
  int sweeps = 500;
  int burn_in = 200;
  int thinning = 2;
  std::uint64_t seed = 0;

  void validate() const;
};

struct TargetSpec {
  std::string id;
  std::string category;
};

// One sampling problem: pose candidates, scored objects (fixed scene objects
// first, then movable targets), and per-target placement candidates.
class ChainContext {
 public:
  struct ObjectSlot {
    std::string category;
    int scorer = 0;
    int target = -1;  // index into targets; -1 for fixed objects
    Vec3 location;    // current base center
    double orientation = 0.0;
  };

  std::vector<HumanPose> pose_candidates;
  std::vector<double> ln_p0;  // log P0 over pose_candidates, normalized
  std::vector<PotentialScorer> scorers;
  std::vector<ObjectSlot> objects;
  std::vector<std::vector<PlacementCandidate>> target_candidates;
  std::vector<std::uint64_t> target_hashes;

  int fixed_count() const { return static_cast<int>(objects.size() - target_candidates.size()); }

  // ln Psi of object i against pose candidate p at the object's current placement.
  double score(int object, int pose) const;

  // Precomputes fixed-object rows of the (object, pose) score table.
  void cache_fixed_scores();

  // Index drawn from P0; uses the pose-type prior weights baked into ln_p0.
  int draw_p0(Rng& rng) const;

  void set_placement(int target, const PlacementCandidate& c);

  // Builds ln_p0 from the template prior weights and caches fixed-object scores.
  // Must run after candidates, objects, and scorers are in place.
  void finalize(const std::array<double, kPoseTypeCount>& pose_type_weights);

 private:
  std::vector<std::vector<double>> fixed_scores_;
  std::vector<double> p0_cumulative_;
};

ChainContext make_chain_context(const Scene& scene, std::span<const TargetSpec> targets,
                                const ModelParams& params);

struct Component {
  int pose = -1;  // pose candidate index
  int count = 0;
};

struct ChainState {
  std::vector<int> assignment;        // per object: component label, -1 unassigned
  std::map<int, Component> components;
  std::vector<int> target_placement;  // per target: placement candidate index
  int next_label = 0;
};

// Collapsed assignment draw with auxiliary components. When the object leaves a
// singleton, that component's pose replaces the first auxiliary so the move stays
// reversible. Occupied components weigh n_{-i,c} * Psi; each auxiliary weighs
// (alpha / aux) * Psi. A draw with no finite weight falls back to a uniform
// choice among the auxiliaries.
void sample_assignment(ChainContext& ctx, ChainState& state, int object,
                       std::span<const int> aux_poses, const DPConfig& config, Rng& rng);

// The weights sample_assignment draws from, for direct inspection: entries for
// each occupied label (skipping the object's own singleton) then each auxiliary.
struct AssignmentWeights {
  std::vector<int> labels;      // occupied component labels
  std::vector<double> log_weights;  // labels then auxiliaries
};
AssignmentWeights assignment_log_weights(const ChainContext& ctx, const ChainState& state,
                                         int object, std::span<const int> aux_poses,
                                         const DPConfig& config);

// Pose conditional: categorical over pose candidates with weight
// ln P0 + sum of member potentials. No finite weight: the pose is retained.
void resample_pose(ChainContext& ctx, ChainState& state, int label, Rng& rng);

// Placement conditional: categorical over the target's candidates under its
// component's pose. No finite weight: uniform over the candidates.
void resample_placement(ChainContext& ctx, ChainState& state, int target, Rng& rng);

struct SweepSnapshot {
  std::vector<int> assignment;       // per object: compact component slot
  std::vector<int> component_pose;   // per slot: pose candidate index
  std::vector<int> target_placement; // per target: placement candidate index
};

struct ChainResult {
  std::vector<SweepSnapshot> snapshots;
  std::vector<HumanPose> pose_candidates;
  std::vector<std::vector<PlacementCandidate>> target_candidates;
  std::vector<std::uint64_t> target_hashes;
};

// Initializes every object in its own component with a P0 pose and targets at
// uniform random placements, then Gibbs-sweeps assignments, poses, placements.
// Snapshots are kept after burn_in at the thinning interval.
ChainResult run_chain(const Scene& scene, std::span<const TargetSpec> targets,
                      const ModelParams& params, const DPConfig& config);
ChainResult run_chain(ChainContext& ctx, const DPConfig& config);

// Placement marginals are histograms over coarse cells: 0.25 m in x and y,
// 0.1 m in z, one slot per orientation bin.
struct CellKey {
  int ix = 0, iy = 0, iz = 0, bin = 0;
  friend auto operator<=>(const CellKey&, const CellKey&) = default;
};
CellKey cell_of(const PlacementCandidate& c);

struct CellStat {
  double freq = 0.0;
  int representative = -1;  // most-sampled candidate index in the cell
  PlacementCandidate candidate;
};

struct PlacementDistribution {
  std::map<CellKey, CellStat> cells;
  std::uint64_t candidate_hash = 0;
  std::size_t samples = 0;
};

std::vector<PlacementDistribution> estimate_marginals(
    std::span<const SweepSnapshot> snapshots,
    const std::vector<std::vector<PlacementCandidate>>& target_candidates,
    std::span<const std::uint64_t> hashes);

// Greedy readout: targets ordered by peak cell frequency; each takes its best
// cell whose representative does not collide with furniture, existing objects,
// or placements made so far. Throws NoFeasiblePlacement when a target runs out.
std::vector<ObjectInstance> predict_arrangement(std::span<const PlacementDistribution> marginals,
                                                const Scene& scene,
                                                std::span<const TargetSpec> targets);

struct HeatmapGrid {
  int nx = 0, ny = 0;
  double resolution = 0.0;
  std::vector<long> counts;  // row-major over y, then x

  long at(int ix, int iy) const { return counts[static_cast<std::size_t>(iy) * nx + ix]; }
};

// Horizontal histogram of one target's kept samples; z and orientation marginalized.
HeatmapGrid sample_heatmap(std::span<const SweepSnapshot> snapshots, const Scene& scene,
                           int target, double resolution,
                           std::span<const PlacementCandidate> candidates);

}  // namespace poseplace
