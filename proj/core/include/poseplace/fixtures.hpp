#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "poseplace/scene.hpp"

namespace poseplace {

// Synthetic rooms with plausible furniture and jittered object placements.
// A fixed seed gives a fixed scene.
Scene make_office_scene(std::uint64_t seed);
Scene make_kitchen_scene(std::uint64_t seed);
Scene make_living_scene(std::uint64_t seed);

// Degenerate room whose single category fits exactly one grid point, at the
// room center; its heatmap must put all mass on one pixel.
Scene make_calibration_scene();

// "office", "kitchen", "living", "mixed" (round-robin), "calibration".
const std::vector<std::string>& fixture_kinds();
std::vector<Scene> make_fixture_set(const std::string& kind, int count, std::uint64_t seed);

}  // namespace poseplace
