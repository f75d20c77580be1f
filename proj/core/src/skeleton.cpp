#include "poseplace/skeleton.hpp"

#include <stdexcept>

#include "poseplace/errors.hpp"

namespace poseplace {

namespace {

const std::array<std::string, kPoseTypeCount> kPoseTypeNames = {
    "reaching", "standing", "leaning_forward", "sitting_upright", "sitting_reclined",
    "sitting_forward"};
const std::array<std::string, kActivityCount> kActivityNames = {
    "reading", "working", "talking", "writing", "resting"};
const std::array<std::string, kJointCount> kJointNames = {
    "head", "torso", "pelvis", "left_hand", "right_hand", "left_foot", "right_foot"};

template <typename E, std::size_t N>
E enum_from_string(const std::array<std::string, N>& names, const std::string& s,
                   const char* what) {
  for (std::size_t i = 0; i < N; ++i) {
    if (names[i] == s) return static_cast<E>(i);
  }
  throw ParseError(std::string(what) + ": unknown value '" + s + "'");
}

}  // namespace

const std::string& to_string(PoseType t) { return kPoseTypeNames[static_cast<int>(t)]; }
const std::string& to_string(Activity a) { return kActivityNames[static_cast<int>(a)]; }
const std::string& to_string(Joint j) { return kJointNames[static_cast<int>(j)]; }

PoseType pose_type_from_string(const std::string& s) {
  return enum_from_string<PoseType>(kPoseTypeNames, s, "pose type");
}
Activity activity_from_string(const std::string& s) {
  return enum_from_string<Activity>(kActivityNames, s, "activity");
}
Joint joint_from_string(const std::string& s) {
  return enum_from_string<Joint>(kJointNames, s, "joint");
}

void SkeletonTemplate::validate() const {
  if (!(bounding_box.size.x > 0.0 && bounding_box.size.y > 0.0 && bounding_box.size.z > 0.0))
    throw ValidationError("skeleton template: bounding box extents must be positive");
  const double pelvis_z = joints[static_cast<int>(Joint::pelvis)].z;
  if (is_sitting(type)) {
    if (!(pelvis_z >= 0.35 && pelvis_z <= 0.55))
      throw ValidationError("skeleton template: sitting pelvis height must lie in [0.35, 0.55]");
  } else if (!(pelvis_z >= 0.0)) {
    throw ValidationError("skeleton template: pelvis height must be non-negative");
  }
}

HumanPose instantiate_pose(const SkeletonTemplate& tmpl, Vec3 root, double facing,
                           Activity activity) {
  HumanPose pose;
  pose.type = tmpl.type;
  pose.root = root;
  pose.facing = wrap_two_pi(facing);
  pose.activity = activity;
  for (int j = 0; j < kJointCount; ++j) {
    pose.joints[j] = root + rotate_z(pose.facing, tmpl.joints[j]);
  }
  return pose;
}

OrientedBox pose_bounding_box(const SkeletonTemplate& tmpl, Vec3 root, double facing) {
  OrientedBox box = tmpl.bounding_box;
  box.center = root + rotate_z(facing, box.center);
  box.yaw = wrap_two_pi(box.yaw + facing);
  return box;
}

const std::vector<SkeletonTemplate>& default_templates() {
  static const std::vector<SkeletonTemplate> templates = [] {
    auto make = [](PoseType type, std::array<Vec3, kJointCount> joints, Vec3 bb_center,
                   Vec3 bb_size) {
      SkeletonTemplate t;
      t.type = type;
      t.joints = joints;
      t.bounding_box = {bb_center, bb_size, 0.0};
      t.validate();
      return t;
    };
    std::vector<SkeletonTemplate> v;
    // joints: head, torso, pelvis, left_hand, right_hand, left_foot, right_foot
    v.push_back(make(PoseType::reaching,
                     {{{0.05, 0.0, 1.62}, {0.03, 0.0, 1.12}, {0.0, 0.0, 0.92},
                       {0.10, 0.28, 0.85}, {0.52, -0.12, 1.48}, {0.02, 0.14, 0.03},
                       {0.02, -0.14, 0.03}}},
                     {0.13, 0.0, 0.85}, {0.85, 0.62, 1.70}));
    v.push_back(make(PoseType::standing,
                     {{{0.0, 0.0, 1.66}, {0.0, 0.0, 1.15}, {0.0, 0.0, 0.95},
                       {0.04, 0.26, 0.82}, {0.04, -0.26, 0.82}, {0.01, 0.13, 0.03},
                       {0.01, -0.13, 0.03}}},
                     {0.0, 0.0, 0.85}, {0.50, 0.62, 1.70}));
    v.push_back(make(PoseType::leaning_forward,
                     {{{0.38, 0.0, 1.32}, {0.20, 0.0, 1.02}, {0.02, 0.0, 0.90},
                       {0.42, 0.24, 0.96}, {0.42, -0.24, 0.96}, {0.0, 0.13, 0.03},
                       {0.0, -0.13, 0.03}}},
                     {0.18, 0.0, 0.75}, {0.85, 0.60, 1.50}));
    v.push_back(make(PoseType::sitting_upright,
                     {{{0.02, 0.0, 1.22}, {0.01, 0.0, 0.84}, {0.0, 0.0, 0.45},
                       {0.30, 0.18, 0.66}, {0.30, -0.18, 0.66}, {0.32, 0.14, 0.03},
                       {0.32, -0.14, 0.03}}},
                     {0.04, 0.0, 0.93}, {0.60, 0.55, 0.76}));
    v.push_back(make(PoseType::sitting_reclined,
                     {{{-0.14, 0.0, 1.10}, {-0.06, 0.0, 0.78}, {0.0, 0.0, 0.44},
                       {0.16, 0.22, 0.60}, {0.16, -0.22, 0.60}, {0.48, 0.14, 0.03},
                       {0.48, -0.14, 0.03}}},
                     {0.0, 0.0, 0.93}, {0.62, 0.58, 0.74}));
    v.push_back(make(PoseType::sitting_forward,
                     {{{0.30, 0.0, 1.02}, {0.16, 0.0, 0.74}, {0.0, 0.0, 0.45},
                       {0.38, 0.16, 0.62}, {0.38, -0.16, 0.62}, {0.36, 0.14, 0.03},
                       {0.36, -0.14, 0.03}}},
                     {0.12, 0.0, 0.90}, {0.70, 0.55, 0.70}));
    return v;
  }();
  return templates;
}

}  // namespace poseplace
