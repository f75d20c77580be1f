#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "poseplace/scene.hpp"
#include "poseplace/skeleton.hpp"

namespace poseplace {

inline constexpr int kOrientationBins = 8;  // k * pi/4

// Floor or the top face of a furniture box.
struct SupportId {
  int furniture = -1;  // -1 means the floor

  bool is_floor() const { return furniture < 0; }
  std::string label() const {
    return is_floor() ? "floor" : "furniture:" + std::to_string(furniture);
  }
  friend auto operator<=>(const SupportId&, const SupportId&) = default;
};

struct PlacementCandidate {
  Vec3 location;           // base center of the object footprint
  double orientation = 0;  // bin * pi/4 for generated candidates
  int orientation_bin = 0;
  SupportId support;
};

// True when at least 80% of the footprint's base cells (at scene.grid_resolution)
// sit on the floor or a furniture top within 1 cm below location.z.
bool check_stability(const Scene& scene, const OrientedBox& footprint, Vec3 location);

// Grid points of every support surface crossed with the 8 orientation bins,
// keeping placements that are inside the room, stable, and collision-free
// against furniture. Ordered by (support, x, y, orientation bin).
// Throws EmptyCandidateSet when nothing survives.
std::vector<PlacementCandidate> generate_placement_candidates(const Scene& scene,
                                                              const std::string& category);

// The list every placement method scores: generated candidates minus those
// whose box collides with an existing object. Throws EmptyCandidateSet when
// existing objects block everything.
std::vector<PlacementCandidate> feasible_candidates(const Scene& scene,
                                                    const std::string& category);

// Pose grid: 6 templates x 0.25 m floor grid x 8 facings x 5 activities,
// collision-checked against furniture and the room shell. Sitting templates are
// kept only where a support surface 0.35-0.55 m high lies under the pelvis.
// Ordered by (template, root x, root y, facing bin, activity).
std::vector<HumanPose> generate_pose_candidates(const Scene& scene);
std::vector<HumanPose> generate_pose_candidates(const Scene& scene,
                                                std::span<const SkeletonTemplate> templates);

inline constexpr double kPoseGridResolution = 0.25;

// Content fingerprint; equal hashes certify that two methods scored one list.
std::uint64_t candidate_set_hash(std::span<const PlacementCandidate> candidates);

}  // namespace poseplace
