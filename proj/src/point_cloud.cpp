#include "mfpose/point_cloud.hpp"

#include <cmath>
#include <string>

#include "mfpose/error.hpp"

namespace mfpose {

StructuredPointCloud::StructuredPointCloud(Eigen::Matrix3Xd points, Eigen::MatrixXd descriptors)
    : points_(std::move(points)), descriptors_(std::move(descriptors)) {
  if (points_.cols() == 0) throw Error(ErrorCode::EmptyInput, "pointcloud has no points");
  if (descriptors_.cols() != points_.cols() || descriptors_.rows() == 0) {
    throw Error(ErrorCode::DimensionMismatch, "descriptor matrix must be d x N with d >= 1");
  }
  if (!points_.allFinite()) throw Error(ErrorCode::NonFiniteCoordinate, "non-finite point coordinate");
  if (!descriptors_.allFinite()) throw Error(ErrorCode::NonFiniteValue, "non-finite descriptor");
  for (Eigen::Index i = 0; i < descriptors_.cols(); ++i) {
    if (std::abs(descriptors_.col(i).norm() - 1.0) > kUnitTolerance) {
      throw Error(ErrorCode::NotNormalized, "descriptor " + std::to_string(i) + " is not unit length");
    }
  }
}

StructuredPointCloud StructuredPointCloud::normalized(Eigen::Matrix3Xd points, Eigen::MatrixXd descriptors) {
  for (Eigen::Index i = 0; i < descriptors.cols(); ++i) {
    const double n = descriptors.col(i).norm();
    if (!(n > 0.0) || !std::isfinite(n)) {
      throw Error(ErrorCode::InvalidValue, "cannot normalize zero or non-finite descriptor " + std::to_string(i));
    }
    descriptors.col(i) /= n;
  }
  return StructuredPointCloud(std::move(points), std::move(descriptors));
}

StructuredPointCloud StructuredPointCloud::concat(const StructuredPointCloud& a, const StructuredPointCloud& b) {
  if (a.descriptor_dim() != b.descriptor_dim()) {
    throw Error(ErrorCode::DimensionMismatch, "cannot concatenate clouds with different descriptor dims");
  }
  Eigen::Matrix3Xd p(3, a.size() + b.size());
  p << a.points(), b.points();
  Eigen::MatrixXd z(a.descriptor_dim(), a.size() + b.size());
  z << a.descriptors(), b.descriptors();
  return StructuredPointCloud(std::move(p), std::move(z));
}

}  // namespace mfpose
