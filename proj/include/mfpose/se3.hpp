#pragma once

#include <array>
#include <span>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace mfpose {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

/// Flat optimizer-facing parameterization: (qw, qx, qy, qz, tx, ty, tz).
using PoseVector = std::array<double, 7>;

/// Roll, pitch, yaw in radians (Z-Y-X convention: R = Rz(yaw) Ry(pitch) Rx(roll)).
struct EulerAngles {
  double roll = 0.0;
  double pitch = 0.0;
  double yaw = 0.0;
};

/// Rigid transform stored as a unit quaternion plus translation.
///
/// The quaternion is kept in a canonical hemisphere (w >= 0, and when w == 0
/// the first nonzero of x, y, z is positive) so that every rotation has exactly
/// one stored representative.
class Pose {
 public:
  Pose();
  /// Normalizes and canonicalizes `q`. Throws DegenerateQuaternion if |q| <= 1e-12.
  Pose(const Eigen::Quaterniond& q, const Vec3& t);

  static Pose identity() { return Pose(); }
  static Pose from_axis_angle(const Vec3& axis, double angle, const Vec3& t = Vec3::Zero());
  static Pose from_matrix(const Mat3& r, const Vec3& t = Vec3::Zero());
  static Pose from_euler(const EulerAngles& e, const Vec3& t = Vec3::Zero());

  const Eigen::Quaterniond& rotation() const noexcept { return q_; }
  const Vec3& translation() const noexcept { return t_; }
  Mat3 rotation_matrix() const { return q_.toRotationMatrix(); }
  EulerAngles euler() const;

  Vec3 apply(const Vec3& p) const { return q_ * p + t_; }
  Pose inverse() const;

  friend bool operator==(const Pose& a, const Pose& b) {
    return a.q_.coeffs() == b.q_.coeffs() && a.t_ == b.t_;
  }

 private:
  Eigen::Quaterniond q_;
  Vec3 t_;
};

/// q_i = R p_i + t for each input point, order preserved.
std::vector<Vec3> pose_apply(const Pose& pose, std::span<const Vec3> points);
Eigen::Matrix3Xd pose_apply(const Pose& pose, const Eigen::Matrix3Xd& points);

/// The pose that applies `b` first and then `a`.
Pose compose(const Pose& a, const Pose& b);

Pose pose_from_vector(const PoseVector& v);
PoseVector pose_to_vector(const Pose& p);

/// Geodesic angle between the two rotations, in [0, pi].
double rotation_distance(const Pose& a, const Pose& b);
double translation_distance(const Pose& a, const Pose& b);

Pose rotation_z(double angle);

}  // namespace mfpose
