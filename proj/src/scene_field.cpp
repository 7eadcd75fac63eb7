#include "mfpose/scene_field.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mfpose/error.hpp"

namespace mfpose {
namespace {

constexpr double kSnap = 1e-9;
constexpr std::size_t kMaxCells = std::size_t{1} << 31;

}  // namespace

DescriptorValue DescriptorValue::regular(Eigen::VectorXd z) {
  if (z.size() == 0 || !z.allFinite() || std::abs(z.norm() - 1.0) > kUnitTolerance) {
    throw Error(ErrorCode::NotNormalized, "Regular descriptor must be a finite unit vector");
  }
  return DescriptorValue(CellTag::Regular, std::move(z));
}

ExtendedReal similarity(const DescriptorValue& a, const Eigen::Ref<const Eigen::VectorXd>& b) {
  switch (a.tag()) {
    case CellTag::Empty: return ExtendedReal::neg_inf();
    case CellTag::Null: return ExtendedReal(0.0);
    case CellTag::Regular: break;
  }
  if (a.vector().size() != b.size()) throw Error(ErrorCode::DimensionMismatch, "descriptor dimension mismatch");
  return ExtendedReal(a.vector().dot(b));
}

VoxelIndex GridGeometry::unravel(std::size_t linear) const {
  const auto nx = static_cast<std::size_t>(dims[0]);
  const auto ny = static_cast<std::size_t>(dims[1]);
  return VoxelIndex(static_cast<int>(linear % nx), static_cast<int>((linear / nx) % ny),
                    static_cast<int>(linear / (nx * ny)));
}

Vec3 GridGeometry::voxel_center(int i, int j, int k) const {
  return origin + voxel_size * Vec3(i + 0.5, j + 0.5, k + 0.5);
}

Vec3 GridGeometry::voxel_center(std::size_t linear) const {
  const VoxelIndex v = unravel(linear);
  return voxel_center(v.x(), v.y(), v.z());
}

Vec3 GridGeometry::aabb_max() const {
  return origin + voxel_size * Vec3(dims[0], dims[1], dims[2]);
}

bool GridGeometry::contains(const Vec3& x) const {
  const Vec3 hi = aabb_max();
  for (int a = 0; a < 3; ++a) {
    if (!(x[a] >= origin[a] && x[a] <= hi[a])) return false;
  }
  return true;
}

void GridGeometry::validate() const {
  if (!(voxel_size > 0.0) || !std::isfinite(voxel_size)) throw Error(ErrorCode::InvalidValue, "voxel_size must be positive");
  if (!origin.allFinite()) throw Error(ErrorCode::InvalidValue, "grid origin must be finite");
  for (int d : dims) {
    if (d <= 0) throw Error(ErrorCode::InvalidValue, "grid dims must be positive");
  }
  const double cells = static_cast<double>(dims[0]) * dims[1] * dims[2];
  if (cells > static_cast<double>(kMaxCells)) throw Error(ErrorCode::InvalidValue, "grid too large");
}

GridGeometry grid_for_points(const Eigen::Matrix3Xd& points, double voxel_size) {
  if (!(voxel_size > 0.0) || !std::isfinite(voxel_size)) throw Error(ErrorCode::InvalidValue, "voxel_size must be positive");
  if (points.cols() == 0) throw Error(ErrorCode::EmptyInput, "no points");
  if (!points.allFinite()) throw Error(ErrorCode::NonFiniteCoordinate, "non-finite point coordinate");
  const Vec3 lo = (points.rowwise().minCoeff() / voxel_size).array().floor();
  const Vec3 hi = (points.rowwise().maxCoeff() / voxel_size).array().floor();
  GridGeometry g;
  g.voxel_size = voxel_size;
  g.origin = (lo.array() - 1.0) * voxel_size;
  for (int a = 0; a < 3; ++a) {
    const double n = hi[a] - lo[a] + 3.0;
    if (n > static_cast<double>(kMaxCells)) throw Error(ErrorCode::InvalidValue, "point extent too large for voxel_size");
    g.dims[a] = static_cast<int>(n);
  }
  g.validate();
  return g;
}

VoxelIndex voxel_of(const GridGeometry& grid, const Vec3& p) {
  const Vec3 u = ((p - grid.origin) / grid.voxel_size).array().floor();
  return u.cast<int>();
}

Stencil trilinear_stencil(const GridGeometry& grid, const Vec3& x) {
  std::array<int, 3> base{};
  std::array<double, 3> frac{};
  for (int a = 0; a < 3; ++a) {
    double u = (x[a] - grid.origin[a]) / grid.voxel_size - 0.5;
    const double r = std::round(u);
    if (std::abs(u - r) < kSnap) u = r;
    const double f = std::floor(u);
    base[a] = static_cast<int>(f);
    frac[a] = u - f;
  }
  Stencil s;
  for (int dz = 0; dz < 2; ++dz) {
    const double wz = dz ? frac[2] : 1.0 - frac[2];
    if (wz == 0.0) continue;
    for (int dy = 0; dy < 2; ++dy) {
      const double wy = dy ? frac[1] : 1.0 - frac[1];
      if (wy == 0.0) continue;
      for (int dx = 0; dx < 2; ++dx) {
        const double wx = dx ? frac[0] : 1.0 - frac[0];
        if (wx == 0.0) continue;
        s.voxel[s.count] = VoxelIndex(base[0] + dx, base[1] + dy, base[2] + dz);
        s.weight[s.count] = wx * wy * wz;
        ++s.count;
      }
    }
  }
  return s;
}

SceneField::SceneField(GridGeometry grid, int descriptor_dim, std::vector<CellTag> tags, std::vector<double> values)
    : grid_(std::move(grid)), dim_(descriptor_dim), tags_(std::move(tags)), values_(std::move(values)) {
  grid_.validate();
  if (dim_ <= 0) throw Error(ErrorCode::DimensionMismatch, "descriptor_dim must be positive");
  if (tags_.size() != grid_.cell_count()) throw Error(ErrorCode::DimensionMismatch, "tag count != nx*ny*nz");
  if (values_.size() != tags_.size() * static_cast<std::size_t>(dim_)) {
    throw Error(ErrorCode::DimensionMismatch, "value count != cells * descriptor_dim");
  }
  for (std::size_t c = 0; c < tags_.size(); ++c) {
    const auto v = cell_values(c);
    switch (tags_[c]) {
      case CellTag::Regular: {
        double n2 = 0.0;
        for (double x : v) {
          if (!std::isfinite(x)) throw Error(ErrorCode::NonFiniteValue, "non-finite descriptor in cell " + std::to_string(c));
          n2 += x * x;
        }
        if (std::abs(std::sqrt(n2) - 1.0) > kUnitTolerance) {
          throw Error(ErrorCode::NotNormalized, "Regular cell " + std::to_string(c) + " is not unit length");
        }
        break;
      }
      case CellTag::Empty:
      case CellTag::Null:
        if (std::any_of(v.begin(), v.end(), [](double x) { return x != 0.0; })) {
          throw Error(ErrorCode::InvalidValue, "non-Regular cell " + std::to_string(c) + " carries a payload");
        }
        break;
      default:
        throw Error(ErrorCode::InvalidValue, "unknown cell tag in cell " + std::to_string(c));
    }
  }
}

DescriptorValue SceneField::cell(std::size_t linear) const {
  switch (tags_[linear]) {
    case CellTag::Empty: return DescriptorValue::empty();
    case CellTag::Null: return DescriptorValue::null();
    default: break;
  }
  const auto v = cell_values(linear);
  return DescriptorValue::regular(Eigen::Map<const Eigen::VectorXd>(v.data(), dim_));
}

std::size_t SceneField::regular_count() const {
  return static_cast<std::size_t>(std::count(tags_.begin(), tags_.end(), CellTag::Regular));
}

DescriptorValue SceneField::query_descriptor(const Vec3& x) const {
  if (!grid_.contains(x)) return DescriptorValue::null();
  const Stencil s = trilinear_stencil(grid_, x);
  Eigen::VectorXd acc = Eigen::VectorXd::Zero(dim_);
  double wsum = 0.0;
  int regular = 0;
  std::size_t last = 0;
  for (int n = 0; n < s.count; ++n) {
    const VoxelIndex& v = s.voxel[n];
    if (!grid_.in_range(v.x(), v.y(), v.z())) continue;  // outside the grid counts as Null
    const std::size_t c = grid_.linear_index(v.x(), v.y(), v.z());
    if (tags_[c] == CellTag::Empty) return DescriptorValue::empty();
    if (tags_[c] == CellTag::Null) continue;
    acc += s.weight[n] * Eigen::Map<const Eigen::VectorXd>(values_.data() + c * dim_, dim_);
    wsum += s.weight[n];
    last = c;
    ++regular;
  }
  if (regular == 0) return DescriptorValue::null();
  if (regular == 1) return cell(last);
  const double n = acc.norm();
  if (!(n > 0.0)) return DescriptorValue::null();
  return DescriptorValue::regular(acc / n);
}

ExtendedReal SceneField::similarity_at(const Vec3& x, const double* z, std::span<double> scratch) const {
  if (!grid_.contains(x)) return ExtendedReal(0.0);
  const Stencil s = trilinear_stencil(grid_, x);
  const auto d = static_cast<std::size_t>(dim_);
  double* acc = scratch.data();
  int regular = 0;
  std::size_t last = 0;
  for (int n = 0; n < s.count; ++n) {
    const VoxelIndex& v = s.voxel[n];
    if (!grid_.in_range(v.x(), v.y(), v.z())) continue;
    const std::size_t c = grid_.linear_index(v.x(), v.y(), v.z());
    const CellTag t = tags_[c];
    if (t == CellTag::Empty) return ExtendedReal::neg_inf();
    if (t == CellTag::Null) continue;
    const double* cv = values_.data() + c * d;
    const double w = s.weight[n];
    if (regular == 0) {
      for (std::size_t k = 0; k < d; ++k) acc[k] = w * cv[k];
    } else {
      for (std::size_t k = 0; k < d; ++k) acc[k] += w * cv[k];
    }
    last = c;
    ++regular;
  }
  if (regular == 0) return ExtendedReal(0.0);
  if (regular == 1) {
    const double* cv = values_.data() + last * d;
    double dot = 0.0;
    for (std::size_t k = 0; k < d; ++k) dot += cv[k] * z[k];
    return ExtendedReal(dot);
  }
  double dot = 0.0;
  double n2 = 0.0;
  for (std::size_t k = 0; k < d; ++k) {
    dot += acc[k] * z[k];
    n2 += acc[k] * acc[k];
  }
  if (!(n2 > 0.0)) return ExtendedReal(0.0);
  return ExtendedReal(dot / std::sqrt(n2));
}

ClassifierField::ClassifierField(GridGeometry grid, double c_min, std::vector<double> values)
    : grid_(std::move(grid)), c_min_(c_min), values_(std::move(values)) {
  grid_.validate();
  if (!std::isfinite(c_min_) || !(c_min_ < 0.0)) throw Error(ErrorCode::InvalidValue, "c_min must be finite and negative");
  if (values_.size() != grid_.cell_count()) throw Error(ErrorCode::DimensionMismatch, "value count != nx*ny*nz");
  for (std::size_t c = 0; c < values_.size(); ++c) {
    const double v = values_[c];
    if (!std::isfinite(v)) throw Error(ErrorCode::NonFiniteValue, "non-finite log-probability in cell " + std::to_string(c));
    if (v > 0.0 || v < c_min_) {
      throw Error(ErrorCode::InvalidValue, "log-probability outside [c_min, 0] in cell " + std::to_string(c));
    }
  }
}

ClassifierField ClassifierField::constant(const GridGeometry& grid, double c_min, double value) {
  return ClassifierField(grid, c_min, std::vector<double>(grid.cell_count(), value));
}

double ClassifierField::query(const Vec3& x) const {
  if (!grid_.contains(x)) return c_min_;
  const Stencil s = trilinear_stencil(grid_, x);
  if (s.count == 1 && grid_.in_range(s.voxel[0].x(), s.voxel[0].y(), s.voxel[0].z())) {
    return values_[grid_.linear_index(s.voxel[0].x(), s.voxel[0].y(), s.voxel[0].z())];
  }
  double acc = 0.0;
  for (int n = 0; n < s.count; ++n) {
    const VoxelIndex& v = s.voxel[n];
    const double val = grid_.in_range(v.x(), v.y(), v.z()) ? values_[grid_.linear_index(v.x(), v.y(), v.z())] : c_min_;
    acc += s.weight[n] * val;
  }
  return std::clamp(acc, c_min_, 0.0);
}

SceneField build_scene_field(const StructuredPointCloud& points, double voxel_size, const ObservedEmpty& observed_empty) {
  return build_scene_field(points, grid_for_points(points.points(), voxel_size), observed_empty);
}

SceneField build_scene_field(const StructuredPointCloud& points, const GridGeometry& grid, const ObservedEmpty& observed_empty) {
  grid.validate();
  const auto d = static_cast<std::size_t>(points.descriptor_dim());
  std::vector<double> values(grid.cell_count() * d, 0.0);
  std::vector<int> counts(grid.cell_count(), 0);
  for (Eigen::Index i = 0; i < points.size(); ++i) {
    const VoxelIndex v = voxel_of(grid, points.point(i));
    if (!grid.in_range(v.x(), v.y(), v.z())) throw Error(ErrorCode::InvalidValue, "point outside the scene grid");
    const std::size_t c = grid.linear_index(v.x(), v.y(), v.z());
    for (std::size_t k = 0; k < d; ++k) values[c * d + k] += points.descriptors()(static_cast<Eigen::Index>(k), i);
    ++counts[c];
  }
  std::vector<CellTag> tags(grid.cell_count(), CellTag::Null);
  for (std::size_t c = 0; c < tags.size(); ++c) {
    double* v = values.data() + c * d;
    if (counts[c] == 0) {
      const VoxelIndex idx = grid.unravel(c);
      tags[c] = (observed_empty && observed_empty(idx, grid.voxel_center(idx.x(), idx.y(), idx.z()))) ? CellTag::Empty : CellTag::Null;
      continue;
    }
    if (counts[c] == 1) {
      tags[c] = CellTag::Regular;  // single point: keep its descriptor bit-exact
      continue;
    }
    double n2 = 0.0;
    for (std::size_t k = 0; k < d; ++k) {
      v[k] /= counts[c];
      n2 += v[k] * v[k];
    }
    if (!(n2 > 0.0)) {
      // Descriptors cancelled out; nothing observable remains.
      std::fill(v, v + d, 0.0);
      tags[c] = CellTag::Null;
      continue;
    }
    const double n = std::sqrt(n2);
    for (std::size_t k = 0; k < d; ++k) v[k] /= n;
    tags[c] = CellTag::Regular;
  }
  return SceneField(grid, static_cast<int>(d), std::move(tags), std::move(values));
}

void require_same_geometry(const SceneField& scene, const ClassifierField& classifier) {
  if (!(scene.geometry() == classifier.geometry())) {
    throw Error(ErrorCode::GeometryMismatch, "scene and classifier grids differ");
  }
}

}  // namespace mfpose
