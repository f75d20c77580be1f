#pragma once

#include <map>
#include <string>
#include <vector>

#include "poseplace/geometry.hpp"

namespace poseplace {

// Registered object categories with their default box extents (meters).
using CategoryRegistry = std::map<std::string, Vec3>;

struct Furniture {
  OrientedBox box;
  std::string name;  // optional label, empty when unnamed
};

struct ObjectInstance {
  std::string category;
  OrientedBox box;

  Vec3 base_center() const { return {box.center.x, box.center.y, box.z_lo()}; }
};

struct Scene {
  double room_width = 0.0;   // x extent
  double room_depth = 0.0;   // y extent
  double room_height = 0.0;  // z extent
  double grid_resolution = 0.05;

  CategoryRegistry categories;
  std::vector<Furniture> furniture;
  std::vector<ObjectInstance> objects;
  // Extra labeled placements usable as additional training observations.
  std::vector<ObjectInstance> labeled_placements;

  bool box_inside_room(const OrientedBox& box) const;

  // Throws ValidationError naming the violated invariant.
  void validate() const;

  // Default box for a category; throws ValidationError when unregistered.
  Vec3 category_size(const std::string& category) const;

  // Instance at a placement: box centered above the base point, rotated by yaw.
  ObjectInstance make_instance(const std::string& category, Vec3 base, double yaw) const;
};

}  // namespace poseplace
