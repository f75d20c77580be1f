#include "poseplace/candidates.hpp"

#include <cmath>

#include "poseplace/errors.hpp"
#include "poseplace/numerics.hpp"

namespace poseplace {

namespace {

constexpr double kSupportGap = 0.01;       // max drop from base to its support
constexpr double kStabilityFraction = 0.8;

int grid_count(double extent, double resolution) {
  return std::max(1, static_cast<int>(std::floor(extent / resolution + 1e-9)));
}

bool supported_at(const Scene& scene, double x, double y, double base_z) {
  if (base_z <= kSupportGap + 1e-12) return true;  // floor
  for (const auto& f : scene.furniture) {
    const double drop = base_z - f.box.top();
    if (drop >= -1e-12 && drop <= kSupportGap + 1e-12 && f.box.contains_xy(x, y)) return true;
  }
  return false;
}

}  // namespace

bool check_stability(const Scene& scene, const OrientedBox& footprint, Vec3 location) {
  const int nx = grid_count(footprint.size.x, scene.grid_resolution);
  const int ny = grid_count(footprint.size.y, scene.grid_resolution);
  const double sx = footprint.size.x / nx, sy = footprint.size.y / ny;

  int supported = 0;
  for (int ix = 0; ix < nx; ++ix) {
    for (int iy = 0; iy < ny; ++iy) {
      double u = -0.5 * footprint.size.x + (ix + 0.5) * sx;
      double v = -0.5 * footprint.size.y + (iy + 0.5) * sy;
      rotate_xy(footprint.yaw, u, v);
      if (supported_at(scene, location.x + u, location.y + v, location.z)) ++supported;
    }
  }
  return supported >= static_cast<int>(std::ceil(kStabilityFraction * nx * ny - 1e-9));
}

std::vector<PlacementCandidate> generate_placement_candidates(const Scene& scene,
                                                              const std::string& category) {
  const Vec3 size = scene.category_size(category);
  std::vector<PlacementCandidate> out;

  auto try_point = [&](Vec3 base, SupportId support) {
    for (int bin = 0; bin < kOrientationBins; ++bin) {
      const double yaw = bin * (kPi / 4.0);
      OrientedBox box{{base.x, base.y, base.z + 0.5 * size.z}, size, yaw};
      if (!scene.box_inside_room(box)) continue;
      if (!check_stability(scene, box, base)) continue;
      bool hit = false;
      for (const auto& f : scene.furniture) {
        if (check_collision(box, f.box)) {
          hit = true;
          break;
        }
      }
      if (hit) continue;
      out.push_back({base, yaw, bin, support});
    }
  };

  // Floor grid, x-major then y.
  const double res = scene.grid_resolution;
  const int fx = grid_count(scene.room_width, res);
  const int fy = grid_count(scene.room_depth, res);
  for (int ix = 0; ix < fx; ++ix) {
    for (int iy = 0; iy < fy; ++iy) {
      try_point({(ix + 0.5) * res, (iy + 0.5) * res, 0.0}, SupportId{});
    }
  }

  // Furniture tops, sampled in each box's local frame so rotated tops grid cleanly.
  for (std::size_t fi = 0; fi < scene.furniture.size(); ++fi) {
    const OrientedBox& fb = scene.furniture[fi].box;
    const int nx = grid_count(fb.size.x, res);
    const int ny = grid_count(fb.size.y, res);
    const double sx = fb.size.x / nx, sy = fb.size.y / ny;
    for (int ix = 0; ix < nx; ++ix) {
      for (int iy = 0; iy < ny; ++iy) {
        double u = -0.5 * fb.size.x + (ix + 0.5) * sx;
        double v = -0.5 * fb.size.y + (iy + 0.5) * sy;
        rotate_xy(fb.yaw, u, v);
        try_point({fb.center.x + u, fb.center.y + v, fb.top()},
                  SupportId{static_cast<int>(fi)});
      }
    }
  }

  if (out.empty())
    throw EmptyCandidateSet("no feasible placement candidates for category '" + category + "'");
  return out;
}

std::vector<HumanPose> generate_pose_candidates(const Scene& scene) {
  return generate_pose_candidates(scene, default_templates());
}

std::vector<HumanPose> generate_pose_candidates(const Scene& scene,
                                                std::span<const SkeletonTemplate> templates) {
  std::vector<HumanPose> out;
  const int nx = grid_count(scene.room_width, kPoseGridResolution);
  const int ny = grid_count(scene.room_depth, kPoseGridResolution);

  for (const auto& tmpl : templates) {
    for (int ix = 0; ix < nx; ++ix) {
      for (int iy = 0; iy < ny; ++iy) {
        const Vec3 root{(ix + 0.5) * kPoseGridResolution, (iy + 0.5) * kPoseGridResolution, 0.0};
        for (int fb = 0; fb < kOrientationBins; ++fb) {
          const double facing = fb * (kPi / 4.0);
          const OrientedBox body = pose_bounding_box(tmpl, root, facing);
          if (!scene.box_inside_room(body)) continue;
          bool hit = false;
          for (const auto& f : scene.furniture) {
            if (check_collision(body, f.box)) {
              hit = true;
              break;
            }
          }
          if (hit) continue;
          if (is_sitting(tmpl.type)) {
            const Vec3 pelvis =
                root + rotate_z(facing, tmpl.joints[static_cast<int>(Joint::pelvis)]);
            bool seated = false;
            for (const auto& f : scene.furniture) {
              const double top = f.box.top();
              if (top >= 0.35 && top <= 0.55 && f.box.contains_xy(pelvis.x, pelvis.y)) {
                seated = true;
                break;
              }
            }
            if (!seated) continue;
          }
          for (int a = 0; a < kActivityCount; ++a) {
            out.push_back(instantiate_pose(tmpl, root, facing, static_cast<Activity>(a)));
          }
        }
      }
    }
  }

  if (out.empty()) throw EmptyCandidateSet("no feasible pose candidates in scene");
  return out;
}

std::vector<PlacementCandidate> feasible_candidates(const Scene& scene,
                                                    const std::string& category) {
  auto candidates = generate_placement_candidates(scene, category);
  std::erase_if(candidates, [&](const PlacementCandidate& c) {
    ObjectInstance inst = scene.make_instance(category, c.location, c.orientation);
    for (const auto& obj : scene.objects) {
      if (check_collision(inst.box, obj.box)) return true;
    }
    return false;
  });
  if (candidates.empty()) {
    throw EmptyCandidateSet("existing objects block every placement candidate for '" + category +
                            "'");
  }
  return candidates;
}

std::uint64_t candidate_set_hash(std::span<const PlacementCandidate> candidates) {
  std::uint64_t h = fnv1a64("placements", 10);
  for (const auto& c : candidates) {
    h = fnv1a64_double(c.location.x, h);
    h = fnv1a64_double(c.location.y, h);
    h = fnv1a64_double(c.location.z, h);
    h = fnv1a64_double(c.orientation, h);
    const std::int64_t support = c.support.furniture;
    h = fnv1a64(&support, sizeof(support), h);
  }
  return h;
}

}  // namespace poseplace
