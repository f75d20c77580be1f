#pragma once

#include <array>
#include <string>
#include <vector>

#include "poseplace/geometry.hpp"

namespace poseplace {

enum class PoseType : int {
  reaching = 0,
  standing,
  leaning_forward,
  sitting_upright,
  sitting_reclined,
  sitting_forward,
};
inline constexpr int kPoseTypeCount = 6;

enum class Activity : int {
  reading = 0,
  working,
  talking,
  writing,
  resting,
};
inline constexpr int kActivityCount = 5;

enum class Joint : int {
  head = 0,
  torso,
  pelvis,
  left_hand,
  right_hand,
  left_foot,
  right_foot,
};
inline constexpr int kJointCount = 7;

// Joints eligible as a category's designated distance anchor.
inline constexpr std::array<Joint, 4> kDistanceJointCandidates = {
    Joint::head, Joint::torso, Joint::left_hand, Joint::right_hand};

const std::string& to_string(PoseType t);
const std::string& to_string(Activity a);
const std::string& to_string(Joint j);
PoseType pose_type_from_string(const std::string& s);
Activity activity_from_string(const std::string& s);
Joint joint_from_string(const std::string& s);

inline bool is_sitting(PoseType t) {
  return t == PoseType::sitting_upright || t == PoseType::sitting_reclined ||
         t == PoseType::sitting_forward;
}

// Joint offsets in the template frame: origin on the floor under the body root,
// +x the facing direction, z up. Sitting templates place the pelvis at seat height
// and keep their bounding box above it so the seat itself never collides.
struct SkeletonTemplate {
  PoseType type = PoseType::standing;
  std::array<Vec3, kJointCount> joints{};
  OrientedBox bounding_box;

  void validate() const;
};

struct HumanPose {
  PoseType type = PoseType::standing;
  Vec3 root;           // on the floor, z = 0
  double facing = 0.0; // [0, 2*pi)
  Activity activity = Activity::working;
  std::array<Vec3, kJointCount> joints{};  // world frame

  const Vec3& joint(Joint j) const { return joints[static_cast<int>(j)]; }
};

// World pose: joints and box rotated by facing about z, then translated to root.
HumanPose instantiate_pose(const SkeletonTemplate& tmpl, Vec3 root, double facing,
                           Activity activity);
OrientedBox pose_bounding_box(const SkeletonTemplate& tmpl, Vec3 root, double facing);

// The six built-in skeletons, indexed by PoseType.
const std::vector<SkeletonTemplate>& default_templates();

}  // namespace poseplace
