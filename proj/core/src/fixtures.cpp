#include "poseplace/fixtures.hpp"

#include "poseplace/errors.hpp"
#include "poseplace/geometry.hpp"
#include "poseplace/numerics.hpp"

namespace poseplace {

namespace {

// Position jitter stays well under the margins the layouts reserve, so every
// jittered object remains on its surface and clear of its neighbors.
constexpr double kPosJitter = 0.04;
constexpr double kYawJitter = 0.06;

struct Jitter {
  Rng rng;
  explicit Jitter(std::uint64_t seed) : rng(seed) {}

  Vec3 at(double x, double y, double z) {
    return {x + rng.uniform(-kPosJitter, kPosJitter), y + rng.uniform(-kPosJitter, kPosJitter),
            z};
  }
  double yaw(double base) { return wrap_two_pi(base + rng.uniform(-kYawJitter, kYawJitter)); }
};

}  // namespace

Scene make_office_scene(std::uint64_t seed) {
  Scene s;
  s.room_width = 3.2;
  s.room_depth = 3.0;
  s.room_height = 2.6;
  s.grid_resolution = 0.1;
  s.categories = {{"keyboard", {0.45, 0.15, 0.03}},
                  {"monitor", {0.55, 0.18, 0.40}},
                  {"mug", {0.09, 0.09, 0.10}},
                  {"lamp", {0.15, 0.15, 0.45}},
                  {"trash_bin", {0.30, 0.30, 0.35}}};
  s.furniture = {{{{1.6, 0.35, 0.37}, {1.2, 0.6, 0.74}, 0.0}, "desk"},
                 {{{1.6, 1.08, 0.225}, {0.45, 0.45, 0.45}, 0.0}, "chair"},
                 {{{0.25, 2.7, 0.45}, {0.5, 0.3, 0.9}, 0.0}, "shelf"}};

  Jitter j(seed);
  const double desk_top = 0.74;
  s.objects.push_back(s.make_instance("keyboard", j.at(1.60, 0.52, desk_top), j.yaw(kPi)));
  s.objects.push_back(s.make_instance("monitor", j.at(1.68, 0.18, desk_top), j.yaw(kPi)));
  s.objects.push_back(s.make_instance("mug", j.at(2.02, 0.50, desk_top), j.yaw(0.0)));
  s.objects.push_back(s.make_instance("lamp", j.at(1.12, 0.16, desk_top), j.yaw(0.0)));
  s.objects.push_back(s.make_instance("trash_bin", j.at(2.85, 0.40, 0.0), j.yaw(0.0)));
  s.validate();
  return s;
}

Scene make_kitchen_scene(std::uint64_t seed) {
  Scene s;
  s.room_width = 3.0;
  s.room_depth = 3.0;
  s.room_height = 2.6;
  s.grid_resolution = 0.1;
  s.categories = {{"plate", {0.24, 0.24, 0.02}},
                  {"kettle", {0.18, 0.18, 0.22}},
                  {"cutting_board", {0.35, 0.25, 0.02}},
                  {"glass", {0.07, 0.07, 0.12}}};
  s.furniture = {{{{0.35, 1.5, 0.45}, {0.7, 2.2, 0.9}, 0.0}, "counter"},
                 {{{1.05, 1.5, 0.21}, {0.4, 0.4, 0.42}, 0.0}, "stool"}};

  Jitter j(seed);
  const double counter_top = 0.9;
  s.objects.push_back(s.make_instance("plate", j.at(0.42, 1.50, counter_top), j.yaw(kPi / 2)));
  s.objects.push_back(s.make_instance("glass", j.at(0.48, 1.14, counter_top), j.yaw(0.0)));
  s.objects.push_back(
      s.make_instance("cutting_board", j.at(0.38, 0.72, counter_top), j.yaw(kPi / 2)));
  s.objects.push_back(s.make_instance("kettle", j.at(0.30, 2.22, counter_top), j.yaw(0.0)));
  s.validate();
  return s;
}

Scene make_living_scene(std::uint64_t seed) {
  Scene s;
  s.room_width = 3.4;
  s.room_depth = 3.0;
  s.room_height = 2.6;
  s.grid_resolution = 0.1;
  s.categories = {{"remote", {0.05, 0.15, 0.03}},
                  {"book", {0.15, 0.21, 0.03}},
                  {"vase", {0.12, 0.12, 0.30}}};
  s.furniture = {{{{1.7, 0.5, 0.25}, {1.8, 0.8, 0.5}, 0.0}, "sofa"},
                 {{{1.7, 1.45, 0.16}, {0.9, 0.4, 0.32}, 0.0}, "coffee_table"},
                 {{{1.7, 2.8, 0.30}, {1.2, 0.4, 0.6}, 0.0}, "tv_stand"}};

  Jitter j(seed);
  s.objects.push_back(s.make_instance("remote", j.at(1.48, 1.42, 0.32), j.yaw(kPi / 2)));
  s.objects.push_back(s.make_instance("book", j.at(1.95, 1.48, 0.32), j.yaw(0.0)));
  s.objects.push_back(s.make_instance("vase", j.at(1.35, 2.80, 0.6), j.yaw(0.0)));
  s.validate();
  return s;
}

Scene make_calibration_scene() {
  Scene s;
  s.room_width = 10.0;
  s.room_depth = 10.0;
  s.room_height = 2.6;
  // 5.0 = (62 + 0.5) * 0.08, so the tile's center is also a floor grid point.
  s.grid_resolution = 0.08;
  s.categories = {{"rug", {9.96, 9.96, 0.01}}};
  // The tile blocks every floor placement of the rug (their boxes overlap
  // whatever the offset), leaving exactly one candidate point: on the tile.
  s.furniture = {{{{5.0, 5.0, 0.005}, {0.04, 0.04, 0.01}, 0.0}, "tile"}};
  s.validate();
  return s;
}

const std::vector<std::string>& fixture_kinds() {
  static const std::vector<std::string> kinds{"office", "kitchen", "living", "mixed",
                                              "calibration"};
  return kinds;
}

std::vector<Scene> make_fixture_set(const std::string& kind, int count, std::uint64_t seed) {
  if (count < 1) throw ValidationError("fixture count must be at least 1");
  std::vector<Scene> scenes;
  scenes.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    const std::uint64_t s = split_seed(seed, static_cast<std::uint64_t>(i));
    if (kind == "office") {
      scenes.push_back(make_office_scene(s));
    } else if (kind == "kitchen") {
      scenes.push_back(make_kitchen_scene(s));
    } else if (kind == "living") {
      scenes.push_back(make_living_scene(s));
    } else if (kind == "mixed") {
      switch (i % 3) {
        case 0: scenes.push_back(make_office_scene(s)); break;
        case 1: scenes.push_back(make_kitchen_scene(s)); break;
        default: scenes.push_back(make_living_scene(s)); break;
      }
    } else if (kind == "calibration") {
      scenes.push_back(make_calibration_scene());
    } else {
      throw ValidationError("unknown fixture kind '" + kind + "'");
    }
  }
  return scenes;
}

}  // namespace poseplace
