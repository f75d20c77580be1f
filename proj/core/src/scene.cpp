#include "poseplace/scene.hpp"

#include <cmath>

#include "poseplace/errors.hpp"

namespace poseplace {

bool Scene::box_inside_room(const OrientedBox& box) const {
  if (box.z_lo() < -1e-9 || box.z_hi() > room_height + 1e-9) return false;
  for (const auto& c : box.footprint_corners()) {
    if (c[0] < -1e-9 || c[0] > room_width + 1e-9) return false;
    if (c[1] < -1e-9 || c[1] > room_depth + 1e-9) return false;
  }
  return true;
}

void Scene::validate() const {
  if (!(room_width > 0.0 && room_depth > 0.0 && room_height > 0.0))
    throw ValidationError("scene: room extents must be positive");
  if (!(grid_resolution > 0.0))
    throw ValidationError("scene: grid_resolution must be positive");

  auto check_box = [](const OrientedBox& b, const std::string& what) {
    if (!(b.size.x > 0.0 && b.size.y > 0.0 && b.size.z > 0.0))
      throw ValidationError(what + ": box extents must be positive");
    if (!(b.yaw >= 0.0 && b.yaw < kTwoPi))
      throw ValidationError(what + ": yaw must lie in [0, 2*pi)");
  };

  for (std::size_t i = 0; i < furniture.size(); ++i) {
    check_box(furniture[i].box, "furniture[" + std::to_string(i) + "]");
    if (!box_inside_room(furniture[i].box))
      throw ValidationError("furniture[" + std::to_string(i) + "]: box must lie within room extents");
  }
  auto check_object = [&](const ObjectInstance& o, const std::string& what) {
    check_box(o.box, what);
    if (!box_inside_room(o.box))
      throw ValidationError(what + ": box must lie within room extents");
    if (!categories.count(o.category))
      throw ValidationError(what + ": category '" + o.category + "' is not registered");
  };
  for (std::size_t i = 0; i < objects.size(); ++i)
    check_object(objects[i], "objects[" + std::to_string(i) + "]");
  for (std::size_t i = 0; i < labeled_placements.size(); ++i)
    check_object(labeled_placements[i], "labeled_placements[" + std::to_string(i) + "]");

  for (const auto& [name, size] : categories) {
    if (!(size.x > 0.0 && size.y > 0.0 && size.z > 0.0))
      throw ValidationError("categories['" + name + "']: default extents must be positive");
  }
}

Vec3 Scene::category_size(const std::string& category) const {
  auto it = categories.find(category);
  if (it == categories.end())
    throw ValidationError("category '" + category + "' is not registered");
  return it->second;
}

ObjectInstance Scene::make_instance(const std::string& category, Vec3 base, double yaw) const {
  const Vec3 size = category_size(category);
  ObjectInstance inst;
  inst.category = category;
  inst.box.center = {base.x, base.y, base.z + 0.5 * size.z};
  inst.box.size = size;
  inst.box.yaw = wrap_two_pi(yaw);
  return inst;
}

}  // namespace poseplace
