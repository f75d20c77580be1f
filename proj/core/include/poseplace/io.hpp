#pragma once

#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "poseplace/dp_sampler.hpp"
#include "poseplace/methods.hpp"
#include "poseplace/scene.hpp"
#include "poseplace/skeleton.hpp"

namespace poseplace {

// All JSON documents carry this version and reject anything newer or older.
inline constexpr int kSchemaVersion = 1;

std::string read_text_file(const std::filesystem::path& path);

// Writes to a sibling temp file, then renames over the target, so a crash
// never leaves a half-written file behind.
void atomic_write_file(const std::filesystem::path& path, const std::string& content);

// Scenes serialize object placements as (category, base point, yaw); boxes are
// rebuilt from the category registry on load. validate() runs on every load.
Scene scene_from_json(const std::string& text);
std::string scene_to_json(const Scene& scene);
Scene load_scene(const std::filesystem::path& path);

std::vector<SkeletonTemplate> skeletons_from_json(const std::string& text);
std::string skeletons_to_json(std::span<const SkeletonTemplate> templates);
std::vector<SkeletonTemplate> load_skeletons(const std::filesystem::path& path);

// The full trained bundle round-trips, including diagnostics.
ModelBundle bundle_from_json(const std::string& text);
std::string bundle_to_json(const ModelBundle& bundle);
ModelBundle load_bundle(const std::filesystem::path& path);

std::string arrangement_to_json(const std::string& method,
                                std::span<const ObjectInstance> objects,
                                const std::map<std::string, std::uint64_t>& candidate_hashes);

// Poses paired with how often the sampler visited them; spans must match in length.
std::string poses_to_json(std::span<const HumanPose> poses, std::span<const double> frequencies);

// Sparse cell counts: "x_index,y_index,count" rows for nonzero cells, x-major.
std::string heatmap_to_csv(const HeatmapGrid& grid);
// Plain PGM (P2), 255 max gray, counts rescaled linearly; row y, column x.
std::string heatmap_to_pgm(const HeatmapGrid& grid);

}  // namespace poseplace
