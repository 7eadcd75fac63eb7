#include "mfpose/se3.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mfpose/error.hpp"

namespace mfpose {
namespace {

constexpr double kDegenerateNorm = 1e-12;

Eigen::Quaterniond canonical(Eigen::Quaterniond q) {
  const double n2 = q.squaredNorm();
  if (!(n2 > kDegenerateNorm * kDegenerateNorm) || !std::isfinite(n2)) {
    throw Error(ErrorCode::DegenerateQuaternion, "quaternion norm <= 1e-12 or non-finite");
  }
  // Leave already-normalized input untouched so that encode/decode is exact.
  if (std::abs(n2 - 1.0) > 8.0 * std::numeric_limits<double>::epsilon()) {
    q.coeffs() /= std::sqrt(n2);
  }
  bool flip = false;
  if (q.w() < 0.0) {
    flip = true;
  } else if (q.w() == 0.0) {
    for (double c : {q.x(), q.y(), q.z()}) {
      if (c != 0.0) {
        flip = c < 0.0;
        break;
      }
    }
  }
  if (flip) q.coeffs() = -q.coeffs();
  if (q.w() == 0.0) q.w() = 0.0;  // drop -0.0
  return q;
}

}  // namespace

Pose::Pose() : q_(Eigen::Quaterniond::Identity()), t_(Vec3::Zero()) {}

Pose::Pose(const Eigen::Quaterniond& q, const Vec3& t) : q_(canonical(q)), t_(t) {}

Pose Pose::from_axis_angle(const Vec3& axis, double angle, const Vec3& t) {
  const double n = axis.norm();
  if (n == 0.0) return Pose(Eigen::Quaterniond::Identity(), t);
  return Pose(Eigen::Quaterniond(Eigen::AngleAxisd(angle, axis / n)), t);
}

Pose Pose::from_matrix(const Mat3& r, const Vec3& t) { return Pose(Eigen::Quaterniond(r), t); }

Pose Pose::from_euler(const EulerAngles& e, const Vec3& t) {
  const Eigen::Quaterniond q = Eigen::AngleAxisd(e.yaw, Vec3::UnitZ()) *
                               Eigen::AngleAxisd(e.pitch, Vec3::UnitY()) *
                               Eigen::AngleAxisd(e.roll, Vec3::UnitX());
  return Pose(q, t);
}

EulerAngles Pose::euler() const {
  const Mat3 r = rotation_matrix();
  EulerAngles e;
  e.yaw = std::atan2(r(1, 0), r(0, 0));
  e.pitch = std::asin(std::clamp(-r(2, 0), -1.0, 1.0));
  e.roll = std::atan2(r(2, 1), r(2, 2));
  return e;
}

Pose Pose::inverse() const {
  const Eigen::Quaterniond qi = q_.conjugate();
  return Pose(qi, -(qi * t_));
}

std::vector<Vec3> pose_apply(const Pose& pose, std::span<const Vec3> points) {
  const Mat3 r = pose.rotation_matrix();
  std::vector<Vec3> out;
  out.reserve(points.size());
  for (const Vec3& p : points) out.push_back(r * p + pose.translation());
  return out;
}

Eigen::Matrix3Xd pose_apply(const Pose& pose, const Eigen::Matrix3Xd& points) {
  return (pose.rotation_matrix() * points).colwise() + pose.translation();
}

Pose compose(const Pose& a, const Pose& b) {
  return Pose(a.rotation() * b.rotation(), a.rotation() * b.translation() + a.translation());
}

Pose pose_from_vector(const PoseVector& v) {
  return Pose(Eigen::Quaterniond(v[0], v[1], v[2], v[3]), Vec3(v[4], v[5], v[6]));
}

PoseVector pose_to_vector(const Pose& p) {
  const auto& q = p.rotation();
  const auto& t = p.translation();
  return {q.w(), q.x(), q.y(), q.z(), t.x(), t.y(), t.z()};
}

double rotation_distance(const Pose& a, const Pose& b) {
  const Eigen::Quaterniond d = a.rotation().conjugate() * b.rotation();
  return 2.0 * std::atan2(d.vec().norm(), std::abs(d.w()));
}

double translation_distance(const Pose& a, const Pose& b) {
  return (a.translation() - b.translation()).norm();
}

Pose rotation_z(double angle) { return Pose::from_axis_angle(Vec3::UnitZ(), angle); }

}  // namespace mfpose
