#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "mfpose/extended_real.hpp"
#include "mfpose/point_cloud.hpp"

namespace mfpose {

enum class CellTag : std::uint8_t { Empty = 0, Null = 1, Regular = 2 };

/// Value of the scene function at a coordinate: a unit descriptor, observed
/// free space (Empty) or unobserved space (Null).
class DescriptorValue {
 public:
  static DescriptorValue empty() { return DescriptorValue(CellTag::Empty, {}); }
  static DescriptorValue null() { return DescriptorValue(CellTag::Null, {}); }
  /// Throws NotNormalized unless |z| is within 1e-6 of 1.
  static DescriptorValue regular(Eigen::VectorXd z);

  CellTag tag() const noexcept { return tag_; }
  bool is_regular() const noexcept { return tag_ == CellTag::Regular; }
  /// Payload of a Regular value; empty vector otherwise.
  const Eigen::VectorXd& vector() const noexcept { return z_; }

 private:
  DescriptorValue(CellTag tag, Eigen::VectorXd z) : tag_(tag), z_(std::move(z)) {}
  CellTag tag_;
  Eigen::VectorXd z_;
};

/// Extended inner product: z.b for Regular, 0 for Null, NEG_INF for Empty.
ExtendedReal similarity(const DescriptorValue& a, const Eigen::Ref<const Eigen::VectorXd>& b);

using VoxelIndex = Eigen::Vector3i;

/// Axis-aligned voxel lattice. Voxel (i,j,k) spans origin + [i,i+1) * voxel_size
/// (per axis) and its center is origin + (i + 0.5) * voxel_size.
struct GridGeometry {
  Vec3 origin = Vec3::Zero();
  double voxel_size = 1.0;
  std::array<int, 3> dims{1, 1, 1};

  std::size_t cell_count() const {
    return static_cast<std::size_t>(dims[0]) * static_cast<std::size_t>(dims[1]) * static_cast<std::size_t>(dims[2]);
  }
  /// x-fastest linear index.
  std::size_t linear_index(int i, int j, int k) const {
    return static_cast<std::size_t>(i) +
           static_cast<std::size_t>(dims[0]) * (static_cast<std::size_t>(j) + static_cast<std::size_t>(dims[1]) * static_cast<std::size_t>(k));
  }
  VoxelIndex unravel(std::size_t linear) const;
  bool in_range(int i, int j, int k) const {
    return i >= 0 && j >= 0 && k >= 0 && i < dims[0] && j < dims[1] && k < dims[2];
  }
  Vec3 voxel_center(int i, int j, int k) const;
  Vec3 voxel_center(std::size_t linear) const;
  Vec3 aabb_min() const { return origin; }
  Vec3 aabb_max() const;
  /// Closed-box test against the grid AABB.
  bool contains(const Vec3& x) const;

  /// Throws InvalidValue for non-positive sizes or a non-finite origin.
  void validate() const;

  friend bool operator==(const GridGeometry&, const GridGeometry&) = default;
};

/// Grid covering every point with one voxel of padding, aligned to the global
/// lattice of multiples of `voxel_size`.
GridGeometry grid_for_points(const Eigen::Matrix3Xd& points, double voxel_size);

/// Lattice cell of `p` inside `grid` (may be out of range).
VoxelIndex voxel_of(const GridGeometry& grid, const Vec3& p);

/// Trilinear neighborhood of a coordinate: up to 8 voxels with nonzero weight.
/// Coordinates within 1e-9 voxels of a voxel-center plane snap onto it so that
/// centers are evaluated without interpolation error.
struct Stencil {
  std::array<VoxelIndex, 8> voxel;
  std::array<double, 8> weight;
  int count = 0;
};
Stencil trilinear_stencil(const GridGeometry& grid, const Vec3& x);

/// Dense voxel realization of the scene function.
class SceneField {
 public:
  /// `values` holds descriptor_dim doubles per cell (zeros for non-Regular cells).
  /// Throws DimensionMismatch, NotNormalized or InvalidValue on inconsistent input.
  SceneField(GridGeometry grid, int descriptor_dim, std::vector<CellTag> tags, std::vector<double> values);

  const GridGeometry& geometry() const noexcept { return grid_; }
  int descriptor_dim() const noexcept { return dim_; }
  std::size_t cell_count() const noexcept { return tags_.size(); }

  CellTag tag(std::size_t linear) const { return tags_[linear]; }
  std::span<const double> cell_values(std::size_t linear) const {
    return {values_.data() + linear * static_cast<std::size_t>(dim_), static_cast<std::size_t>(dim_)};
  }
  const std::vector<CellTag>& tags() const noexcept { return tags_; }
  const std::vector<double>& values() const noexcept { return values_; }
  DescriptorValue cell(std::size_t linear) const;
  std::size_t regular_count() const;

  /// f_scn(x) with Empty dominance, Null dropout and renormalization.
  DescriptorValue query_descriptor(const Vec3& x) const;

  /// similarity(query_descriptor(x), z) without materializing the descriptor.
  /// `scratch` must hold at least descriptor_dim doubles.
  ExtendedReal similarity_at(const Vec3& x, const double* z, std::span<double> scratch) const;

 private:
  GridGeometry grid_;
  int dim_;
  std::vector<CellTag> tags_;
  std::vector<double> values_;
};

/// Dense grid of floored log-probabilities log p_O, each in [c_min, 0].
class ClassifierField {
 public:
  /// Throws InvalidValue unless c_min < 0 and every value lies in [c_min, 0].
  ClassifierField(GridGeometry grid, double c_min, std::vector<double> values);

  /// Every cell at the same value.
  static ClassifierField constant(const GridGeometry& grid, double c_min, double value);

  const GridGeometry& geometry() const noexcept { return grid_; }
  double c_min() const noexcept { return c_min_; }
  const std::vector<double>& values() const noexcept { return values_; }
  double value(std::size_t linear) const { return values_[linear]; }

  /// Trilinear interpolation; c_min outside the grid; clamped to [c_min, 0].
  double query(const Vec3& x) const;

 private:
  GridGeometry grid_;
  double c_min_;
  std::vector<double> values_;
};

inline constexpr double kDefaultCMin = -1e4;

/// Predicate deciding whether a point-free voxel was observed as free space.
using ObservedEmpty = std::function<bool(const VoxelIndex& voxel, const Vec3& center)>;

/// Voxel-downsamples `points`: occupied voxels hold the renormalized mean of
/// their descriptors, point-free voxels are Empty where `observed_empty` holds
/// and Null otherwise. Grid from grid_for_points.
SceneField build_scene_field(const StructuredPointCloud& points, double voxel_size, const ObservedEmpty& observed_empty);

/// Same, on a caller-chosen grid. Points outside the grid are an InvalidValue error.
SceneField build_scene_field(const StructuredPointCloud& points, const GridGeometry& grid, const ObservedEmpty& observed_empty);


/// Throws GeometryMismatch unless both fields share the same grid.
void require_same_geometry(const SceneField& scene, const ClassifierField& classifier);

}  // namespace mfpose
