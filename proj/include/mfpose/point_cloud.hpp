#pragma once

#include <Eigen/Core>

#include "mfpose/se3.hpp"

namespace mfpose {

/// Tolerance on |z| - 1 accepted for a stored unit descriptor.
inline constexpr double kUnitTolerance = 1e-6;

/// Pointcloud whose points each carry a unit-length feature descriptor.
///
/// Points are stored column-wise (3 x N) and descriptors column-wise (d x N).
class StructuredPointCloud {
 public:
  /// Validates N >= 1, finite coordinates and unit descriptors.
  /// Throws EmptyInput, DimensionMismatch, NonFiniteCoordinate or NotNormalized.
  StructuredPointCloud(Eigen::Matrix3Xd points, Eigen::MatrixXd descriptors);

  /// Same as the constructor but rescales every descriptor to unit length first.
  static StructuredPointCloud normalized(Eigen::Matrix3Xd points, Eigen::MatrixXd descriptors);

  Eigen::Index size() const noexcept { return points_.cols(); }
  Eigen::Index descriptor_dim() const noexcept { return descriptors_.rows(); }

  const Eigen::Matrix3Xd& points() const noexcept { return points_; }
  const Eigen::MatrixXd& descriptors() const noexcept { return descriptors_; }

  Vec3 point(Eigen::Index i) const { return points_.col(i); }
  auto descriptor(Eigen::Index i) const { return descriptors_.col(i); }

  /// Concatenation of two clouds with equal descriptor dimension.
  static StructuredPointCloud concat(const StructuredPointCloud& a, const StructuredPointCloud& b);

 private:
  Eigen::Matrix3Xd points_;
  Eigen::MatrixXd descriptors_;
};

}  // namespace mfpose
