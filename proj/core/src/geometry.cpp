#include "poseplace/geometry.hpp"

#include <algorithm>
#include <limits>

namespace poseplace {

std::array<std::array<double, 2>, 4> OrientedBox::footprint_corners() const {
  const double hx = 0.5 * size.x, hy = 0.5 * size.y;
  const double c = std::cos(yaw), s = std::sin(yaw);
  std::array<std::array<double, 2>, 4> out;
  const double lx[4] = {hx, -hx, -hx, hx};
  const double ly[4] = {hy, hy, -hy, -hy};
  for (int i = 0; i < 4; ++i) {
    out[i][0] = center.x + c * lx[i] - s * ly[i];
    out[i][1] = center.y + s * lx[i] + c * ly[i];
  }
  return out;
}

bool OrientedBox::contains_xy(double x, double y) const {
  double dx = x - center.x, dy = y - center.y;
  rotate_xy(-yaw, dx, dy);
  return std::abs(dx) <= 0.5 * size.x + 1e-12 && std::abs(dy) <= 0.5 * size.y + 1e-12;
}

namespace {

// Projects both footprints on the given axis; true when the open intervals overlap.
bool overlap_on_axis(double ax, double ay,
                     const std::array<std::array<double, 2>, 4>& pa,
                     const std::array<std::array<double, 2>, 4>& pb) {
  double alo = std::numeric_limits<double>::infinity(), ahi = -alo;
  double blo = alo, bhi = ahi;
  for (int i = 0; i < 4; ++i) {
    const double da = ax * pa[i][0] + ay * pa[i][1];
    const double db = ax * pb[i][0] + ay * pb[i][1];
    alo = std::min(alo, da);
    ahi = std::max(ahi, da);
    blo = std::min(blo, db);
    bhi = std::max(bhi, db);
  }
  return alo < bhi && blo < ahi;
}

}  // namespace

bool check_collision(const OrientedBox& a, const OrientedBox& b) {
  if (!(a.z_lo() < b.z_hi() && b.z_lo() < a.z_hi())) return false;

  const auto pa = a.footprint_corners();
  const auto pb = b.footprint_corners();
  // Separating axes: the two edge normals of each rotated rectangle.
  const double axes[4][2] = {
      {std::cos(a.yaw), std::sin(a.yaw)},
      {-std::sin(a.yaw), std::cos(a.yaw)},
      {std::cos(b.yaw), std::sin(b.yaw)},
      {-std::sin(b.yaw), std::cos(b.yaw)},
  };
  for (const auto& ax : axes) {
    if (!overlap_on_axis(ax[0], ax[1], pa, pb)) return false;
  }
  return true;
}

}  // namespace poseplace
