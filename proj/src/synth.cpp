#include "mfpose/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "mfpose/error.hpp"

namespace mfpose {
namespace {

constexpr double kPi = std::numbers::pi;

[[noreturn]] void invalid(const std::string& msg) { throw Error(ErrorCode::InvalidSpec, msg); }

// ---------------------------------------------------------------------------
// Best buddies

constexpr Eigen::Index kVoxelBlock = 4096;

Eigen::MatrixXd regular_block(const SceneField& scene, const std::vector<std::size_t>& cells, std::size_t begin,
                              std::size_t end) {
  const int d = scene.descriptor_dim();
  Eigen::MatrixXd v(d, static_cast<Eigen::Index>(end - begin));
  for (std::size_t j = begin; j < end; ++j) {
    const auto z = scene.cell_values(cells[j]);
    for (int k = 0; k < d; ++k) v(k, static_cast<Eigen::Index>(j - begin)) = z[static_cast<std::size_t>(k)];
  }
  return v;
}

// ---------------------------------------------------------------------------
// Descriptor model

constexpr int kFeatureCount = 12;

struct FeaturePoint {
  double height = 0.0;  // normalized to [0, 1] over the object
  double radius = 0.0;  // normalized
  double part = 0.0;
  double angle = 0.0;   // already reduced to the fundamental sector
};

class DescriptorModel {
 public:
  DescriptorModel(const SynthSpec& spec) : k_(spec.symmetry_order), textured_(!spec.textureless) {
    std::mt19937_64 rng(spec.seed ^ 0xD35C'0000ull);
    std::normal_distribution<double> g(0.0, 1.0);
    projection_.resize(spec.descriptor_dim, kFeatureCount);
    for (Eigen::Index c = 0; c < projection_.cols(); ++c) {
      for (Eigen::Index r = 0; r < projection_.rows(); ++r) projection_(r, c) = g(rng);
    }
  }

  Eigen::VectorXd operator()(const FeaturePoint& f) const {
    Eigen::Matrix<double, kFeatureCount, 1> x;
    for (int m = 1; m <= 3; ++m) {
      x(2 * m - 2) = std::cos(kPi * m * f.height);
      x(2 * m - 1) = std::sin(kPi * m * f.height);
    }
    x(6) = f.radius;
    x(7) = 1.5 * f.part;
    const double a = textured_ ? 1.0 : 0.0;
    x(8) = a * std::cos(k_ * f.angle);
    x(9) = a * std::sin(k_ * f.angle);
    x(10) = a * std::cos(2.0 * k_ * f.angle);
    x(11) = a * std::sin(2.0 * k_ * f.angle);
    Eigen::VectorXd z = projection_ * x;
    return z / z.norm();
  }

  // Angle of (u, v) reduced to [0, 2 pi / k). Quarter and half turns are
  // folded with exact coordinate swaps so that symmetric lattice points share
  // bit-identical descriptors.
  double sector_angle(double u, double v) const {
    if (k_ == 2 && (u < 0.0 || (u == 0.0 && v < 0.0))) {
      u = -u;
      v = -v;
    } else if (k_ == 4) {
      for (int turn = 0; turn < 4 && !(u > 0.0 && v >= 0.0); ++turn) {
        const double t = u;
        u = v;
        v = -t;
      }
    }
    double theta = std::atan2(v, u);
    if (k_ == 2 || k_ == 4) return theta;
    const double sector = 2.0 * kPi / k_;
    theta -= sector * std::floor(theta / sector);
    return theta;
  }

 private:
  int k_;
  bool textured_;
  Eigen::MatrixXd projection_;
};

// ---------------------------------------------------------------------------
// Object construction

struct ObjectModel {
  Eigen::Matrix3Xd points;
  Eigen::MatrixXd descriptors;
  std::vector<bool> handle;  // per point
};

ObjectModel cylinder_object(const SynthSpec& s, const DescriptorModel& dm, double& body_radius) {
  const double h = s.voxel_size;
  const double R = s.cylinder_radius * h;
  body_radius = R;
  const int H = s.cylinder_height;
  const int k = s.symmetry_order;
  // Angular sampling: about one sample per voxel of arc, a multiple of k so
  // the point set itself is k-fold symmetric.
  const int per_ring = k * std::max(1, static_cast<int>(std::ceil(2.0 * kPi * s.cylinder_radius / k)));

  std::vector<Vec3> pts;
  std::vector<Eigen::VectorXd> desc;
  std::vector<bool> handle;
  for (int layer = 0; layer < H; ++layer) {
    const double z = (layer + 0.5) * h;
    const double hn = (layer + 0.5) / H;
    for (int j = 0; j < per_ring; ++j) {
      const double th = 2.0 * kPi * j / per_ring;
      pts.emplace_back(R * std::cos(th), R * std::sin(th), z);
      desc.push_back(dm({hn, 1.0, 0.0, dm.sector_angle(std::cos(th), std::sin(th))}));
      handle.push_back(false);
    }
  }
  if (s.handle) {
    const int lo = H / 4, hi = std::max(lo + 1, H - H / 4);
    for (int layer = lo; layer < hi; ++layer) {
      const double z = (layer + 0.5) * h;
      for (double r = s.cylinder_radius + 5.0; r <= s.cylinder_radius + 6.5 + 1e-9; r += 0.5) {
        pts.emplace_back(r * h, 0.0, z);
        desc.push_back(dm({(layer + 0.5) / H, 1.8, 1.0, 0.0}));
        handle.push_back(true);
      }
    }
  }
  ObjectModel m;
  m.points.resize(3, static_cast<Eigen::Index>(pts.size()));
  m.descriptors.resize(s.descriptor_dim, static_cast<Eigen::Index>(pts.size()));
  for (std::size_t i = 0; i < pts.size(); ++i) {
    m.points.col(static_cast<Eigen::Index>(i)) = pts[i];
    m.descriptors.col(static_cast<Eigen::Index>(i)) = desc[i];
  }
  m.handle = std::move(handle);
  return m;
}

Eigen::VectorXd box_descriptor(const SynthSpec& s, const DescriptorModel& dm, int i, int j, int k) {
  const auto& a = s.box_half_extent;
  const double u = i + 0.5, v = j + 0.5;
  const double rmax = std::hypot(a[0], a[1]);
  return dm({(k + a[2] + 0.5) / (2.0 * a[2]), std::hypot(u, v) / rmax, 0.0, dm.sector_angle(u, v)});
}

ObjectModel box_object(const SynthSpec& s, const DescriptorModel& dm) {
  const double h = s.voxel_size;
  const auto& a = s.box_half_extent;
  std::vector<Vec3> pts;
  std::vector<Eigen::VectorXd> desc;
  for (int k = -a[2]; k < a[2]; ++k) {
    for (int j = -a[1]; j < a[1]; ++j) {
      for (int i = -a[0]; i < a[0]; ++i) {
        const bool surface = i == -a[0] || i == a[0] - 1 || j == -a[1] || j == a[1] - 1 || k == -a[2] || k == a[2] - 1;
        if (!surface) continue;
        pts.emplace_back((i + 0.5) * h, (j + 0.5) * h, (k + 0.5) * h);
        desc.push_back(box_descriptor(s, dm, i, j, k));
      }
    }
  }
  ObjectModel m;
  m.points.resize(3, static_cast<Eigen::Index>(pts.size()));
  m.descriptors.resize(s.descriptor_dim, static_cast<Eigen::Index>(pts.size()));
  for (std::size_t n = 0; n < pts.size(); ++n) {
    m.points.col(static_cast<Eigen::Index>(n)) = pts[n];
    m.descriptors.col(static_cast<Eigen::Index>(n)) = desc[n];
  }
  m.handle.assign(pts.size(), false);
  return m;
}

Eigen::VectorXd custom_descriptor(const DescriptorModel& dm, const Vec3& p, double zmin, double zspan, double rmax) {
  return dm({(p.z() - zmin) / zspan, std::hypot(p.x(), p.y()) / rmax, 0.0, dm.sector_angle(p.x(), p.y())});
}

struct CustomFrame {
  double zmin, zspan, rmax;
};

CustomFrame custom_frame(const Eigen::Matrix3Xd& pts) {
  CustomFrame f{pts.row(2).minCoeff(), pts.row(2).maxCoeff() - pts.row(2).minCoeff(), 0.0};
  for (Eigen::Index i = 0; i < pts.cols(); ++i) f.rmax = std::max(f.rmax, std::hypot(pts(0, i), pts(1, i)));
  if (!(f.zspan > 0.0)) f.zspan = 1.0;
  if (!(f.rmax > 0.0)) f.rmax = 1.0;
  return f;
}

ObjectModel custom_object(const SynthSpec& s, const DescriptorModel& dm) {
  ObjectModel m;
  m.points = s.custom_points;
  const CustomFrame f = custom_frame(m.points);
  m.descriptors.resize(s.descriptor_dim, m.points.cols());
  for (Eigen::Index i = 0; i < m.points.cols(); ++i) {
    m.descriptors.col(i) = custom_descriptor(dm, m.points.col(i), f.zmin, f.zspan, f.rmax);
  }
  m.handle.assign(static_cast<std::size_t>(m.points.cols()), false);
  return m;
}

// ---------------------------------------------------------------------------
// Scene construction

struct ScenePoints {
  std::vector<Vec3> pts;
  std::vector<Eigen::VectorXd> desc;
  void add(const Vec3& p, Eigen::VectorXd z) {
    pts.push_back(p);
    desc.push_back(std::move(z));
  }
};

// Lattice voxel centers of the wall |r - R| <= band around the posed cylinder
// axis, one extra layer above and below, each carrying the body descriptor of
// its layer.
void add_cylinder_wall(const SynthSpec& s, const DescriptorModel& dm, ScenePoints& out) {
  const double h = s.voxel_size;
  const double R = s.cylinder_radius * h;
  const double band = s.band_half_width * h;
  const int H = s.cylinder_height;
  const Pose inv = s.gt_pose.inverse();

  Eigen::Matrix3Xd corners(3, 8);
  for (int c = 0; c < 8; ++c) {
    corners.col(c) = Vec3((c & 1) ? R + band : -(R + band), (c & 2) ? R + band : -(R + band), (c & 4) ? (H + 1) * h : -h);
  }
  const Eigen::Matrix3Xd world = pose_apply(s.gt_pose, corners);
  const Eigen::Vector3i lo = (world.rowwise().minCoeff() / h).array().floor().cast<int>() - 1;
  const Eigen::Vector3i hi = (world.rowwise().maxCoeff() / h).array().floor().cast<int>() + 1;
  for (int k = lo.z(); k <= hi.z(); ++k) {
    for (int j = lo.y(); j <= hi.y(); ++j) {
      for (int i = lo.x(); i <= hi.x(); ++i) {
        const Vec3 c((i + 0.5) * h, (j + 0.5) * h, (k + 0.5) * h);
        const Vec3 p = inv.apply(c);
        const double r = std::hypot(p.x(), p.y());
        const int layer = static_cast<int>(std::floor(p.z() / h));
        if (std::abs(r - R) > band || layer < -1 || layer > H) continue;
        out.add(c, dm({(layer + 0.5) / H, 1.0, 0.0, dm.sector_angle(p.x(), p.y())}));
      }
    }
  }
}

double object_horizontal_extent(const Eigen::Matrix3Xd& pts) {
  double r = 0.0;
  for (Eigen::Index i = 0; i < pts.cols(); ++i) r = std::max(r, std::hypot(pts(0, i), pts(1, i)));
  return r;
}

void add_clutter(const SynthSpec& s, const Eigen::Matrix3Xd& object_pts, std::mt19937_64& rng, ScenePoints& out) {
  if (s.clutter_points == 0) return;
  const double h = s.voxel_size;
  // Clutter stays out of the cylinder swept by the object rotating about its
  // own z axis, so it never interacts with symmetric copies of the object.
  const double keep_out = object_horizontal_extent(object_pts) + 4.0 * h;
  const double zmin = object_pts.row(2).minCoeff() - 3.0 * h, zmax = object_pts.row(2).maxCoeff() + 3.0 * h;
  const double reach = keep_out + 8.0 * h;
  std::uniform_real_distribution<double> ux(-reach, reach), uz(zmin, zmax);
  std::normal_distribution<double> g(0.0, 1.0);
  int placed = 0;
  for (int attempt = 0; placed < s.clutter_points; ++attempt) {
    if (attempt > 1000 * s.clutter_points) invalid("could not place clutter points");
    const Vec3 local(ux(rng), ux(rng), uz(rng));
    if (std::hypot(local.x(), local.y()) < keep_out) continue;
    Eigen::VectorXd z(s.descriptor_dim);
    for (Eigen::Index k = 0; k < z.size(); ++k) z(k) = g(rng);
    if (!(z.norm() > 0.0)) continue;
    out.add(s.gt_pose.apply(local), z / z.norm());
    ++placed;
  }
}

std::vector<Pose> symmetry_group(int k) {
  std::vector<Pose> g;
  g.reserve(static_cast<std::size_t>(k));
  for (int m = 0; m < k; ++m) g.push_back(Pose::from_axis_angle(Vec3::UnitZ(), 2.0 * kPi * m / k, Vec3::Zero()));
  return g;
}

}  // namespace

ClassifierField best_buddy_classifier(const StructuredPointCloud& obj, const SceneField& scene, double threshold,
                                      const BestBuddyConfig& cfg) {
  if (obj.descriptor_dim() != scene.descriptor_dim()) {
    throw Error(ErrorCode::DimensionMismatch, "object and scene descriptor dimensions differ");
  }
  std::vector<std::size_t> cells;
  for (std::size_t c = 0; c < scene.cell_count(); ++c) {
    if (scene.tag(c) == CellTag::Regular) cells.push_back(c);
  }
  if (cells.empty()) throw Error(ErrorCode::NoRegularVoxels, "scene has no Regular voxels");

  const Eigen::MatrixXd zt = obj.descriptors().transpose();  // N x d
  const Eigen::Index n = zt.rows();
  Eigen::VectorXd row_max = Eigen::VectorXd::Constant(n, -std::numeric_limits<double>::infinity());
  std::vector<double> col_max(cells.size());

  for (std::size_t b = 0; b < cells.size(); b += kVoxelBlock) {
    const std::size_t e = std::min(cells.size(), b + static_cast<std::size_t>(kVoxelBlock));
    const Eigen::MatrixXd s = zt * regular_block(scene, cells, b, e);
    row_max = row_max.cwiseMax(s.rowwise().maxCoeff());
    const Eigen::VectorXd cm = s.colwise().maxCoeff().transpose();
    for (std::size_t j = b; j < e; ++j) col_max[j] = cm(static_cast<Eigen::Index>(j - b));
  }

  std::vector<double> values(scene.cell_count(), cfg.c_min);
  const double tol = cfg.tie_tolerance;
  for (std::size_t b = 0; b < cells.size(); b += kVoxelBlock) {
    const std::size_t e = std::min(cells.size(), b + static_cast<std::size_t>(kVoxelBlock));
    const Eigen::MatrixXd s = zt * regular_block(scene, cells, b, e);
    for (std::size_t j = b; j < e; ++j) {
      const auto col = static_cast<Eigen::Index>(j - b);
      for (Eigen::Index i = 0; i < n; ++i) {
        const double v = s(i, col);
        if (v >= threshold && v >= row_max(i) - tol && v >= col_max[j] - tol) {
          values[cells[j]] = 0.0;
          break;
        }
      }
    }
  }
  return ClassifierField(scene.geometry(), cfg.c_min, std::move(values));
}

void SynthSpec::validate() const {
  if (symmetry_order < 1) invalid("symmetry order k must be >= 1");
  if (descriptor_dim < 2) invalid("descriptor_dim must be >= 2");
  if (!(descriptor_noise >= 0.0) || !std::isfinite(descriptor_noise)) invalid("descriptor noise must be >= 0");
  if (!(voxel_size > 0.0) || !std::isfinite(voxel_size)) invalid("voxel_size must be positive");
  if (clutter_points < 0) invalid("clutter_points must be >= 0");
  if (!(c_min < 0.0) || !std::isfinite(c_min)) invalid("c_min must be negative and finite");
  if (!std::isfinite(best_buddy_threshold)) invalid("best-buddy threshold must be finite");
  if (occlusion_half_space && !(occlusion_half_space->normal.norm() > 0.0)) invalid("occlusion half-space normal is zero");
  if (occlusion_box && (occlusion_box->min.array() > occlusion_box->max.array()).any()) invalid("occlusion box is empty");
  switch (kind) {
    case ObjectKind::CylinderWithHandle:
      if (!(cylinder_radius >= 1.0) || cylinder_height < 1) invalid("cylinder needs radius >= 1 and height >= 1 voxel");
      if (!(band_half_width >= 1.5)) invalid("band_half_width must be >= 1.5 voxels");
      break;
    case ObjectKind::Box:
      for (int a : box_half_extent) {
        if (a < 1) invalid("box half extents must be >= 1 voxel");
      }
      break;
    case ObjectKind::Custom:
      if (custom_points.cols() == 0) invalid("custom object has no points");
      if (!custom_points.allFinite()) invalid("custom object has non-finite coordinates");
      break;
  }
}

bool SynthSpec::occluded(const Vec3& world) const {
  return (occlusion_box && occlusion_box->contains(world)) || (occlusion_half_space && occlusion_half_space->contains(world));
}

SynthInstance generate(const SynthSpec& spec) {
  spec.validate();
  const DescriptorModel dm(spec);
  std::mt19937_64 rng(spec.seed);

  double body_radius = 0.0;
  ObjectModel om;
  switch (spec.kind) {
    case ObjectKind::CylinderWithHandle: om = cylinder_object(spec, dm, body_radius); break;
    case ObjectKind::Box: om = box_object(spec, dm); break;
    case ObjectKind::Custom: om = custom_object(spec, dm); break;
  }
  StructuredPointCloud object(om.points, om.descriptors);
  const Eigen::Matrix3Xd world = pose_apply(spec.gt_pose, om.points);

  ScenePoints sp;
  if (spec.kind == ObjectKind::CylinderWithHandle) {
    add_cylinder_wall(spec, dm, sp);
    for (Eigen::Index i = 0; i < world.cols(); ++i) {
      if (om.handle[static_cast<std::size_t>(i)]) sp.add(world.col(i), om.descriptors.col(i));
    }
  } else {
    for (Eigen::Index i = 0; i < world.cols(); ++i) sp.add(world.col(i), om.descriptors.col(i));
  }
  add_clutter(spec, om.points, rng, sp);

  if (spec.descriptor_noise > 0.0) {
    std::normal_distribution<double> g(0.0, spec.descriptor_noise);
    for (auto& z : sp.desc) {
      for (Eigen::Index k = 0; k < z.size(); ++k) z(k) += g(rng);
      z /= z.norm();
    }
  }

  std::vector<std::size_t> visible;
  for (std::size_t i = 0; i < sp.pts.size(); ++i) {
    if (!spec.occluded(sp.pts[i])) visible.push_back(i);
  }
  if (visible.empty()) invalid("occlusion removes every scene point");
  Eigen::Matrix3Xd scene_pts(3, static_cast<Eigen::Index>(visible.size()));
  Eigen::MatrixXd scene_desc(spec.descriptor_dim, static_cast<Eigen::Index>(visible.size()));
  for (std::size_t n = 0; n < visible.size(); ++n) {
    scene_pts.col(static_cast<Eigen::Index>(n)) = sp.pts[visible[n]];
    scene_desc.col(static_cast<Eigen::Index>(n)) = sp.desc[visible[n]];
  }
  const StructuredPointCloud scene_cloud(scene_pts, scene_desc);

  // Looking down -z: free space is observed above the first surface hit in
  // each column; below it and in columns without a return nothing is known.
  const GridGeometry grid = grid_for_points(scene_pts, spec.voxel_size);
  std::vector<int> top(static_cast<std::size_t>(grid.dims[0]) * static_cast<std::size_t>(grid.dims[1]), -1);
  for (Eigen::Index n = 0; n < scene_pts.cols(); ++n) {
    const VoxelIndex v = voxel_of(grid, scene_pts.col(n));
    int& t = top[static_cast<std::size_t>(v.x()) + static_cast<std::size_t>(grid.dims[0]) * static_cast<std::size_t>(v.y())];
    t = std::max(t, v.z());
  }
  const ObservedEmpty observed = [&](const VoxelIndex& v, const Vec3& center) {
    if (spec.occluded(center)) return false;
    const int t = top[static_cast<std::size_t>(v.x()) + static_cast<std::size_t>(grid.dims[0]) * static_cast<std::size_t>(v.y())];
    return t >= 0 && v.z() > t;
  };
  SceneField scene = build_scene_field(scene_cloud, grid, observed);
  ClassifierField classifier =
      best_buddy_classifier(object, scene, spec.best_buddy_threshold, BestBuddyConfig{.c_min = spec.c_min});

  SynthInstance inst{std::move(object), std::move(scene), std::move(classifier), spec.gt_pose,
                     symmetry_group(spec.symmetry_order)};

  for (Eigen::Index i = 0; i < world.cols(); ++i) {
    const Vec3 q = world.col(i);
    if (spec.occluded(q)) continue;
    const VoxelIndex v = voxel_of(grid, q);
    if (!grid.in_range(v.x(), v.y(), v.z()) || inst.scene.tag(grid.linear_index(v.x(), v.y(), v.z())) != CellTag::Regular) {
      invalid("visible object point " + std::to_string(i) + " does not land in a Regular voxel");
    }
  }
  return inst;
}

namespace {

SynthSpec with_common(SynthSpec s, std::uint64_t seed) {
  s.seed = seed;
  return s;
}

}  // namespace

SynthSpec mug_spec(std::uint64_t seed) {
  SynthSpec s;
  s.kind = ObjectKind::CylinderWithHandle;
  s.textureless = true;
  s.symmetry_order = 36;
  s.clutter_points = 30;
  const double h = s.voxel_size;
  const double yaw = 0.7;
  s.gt_pose = Pose::from_axis_angle(Vec3::UnitZ(), yaw, Vec3(0.1, 0.05, 0.0625));
  // A camera-facing blocker hides everything beyond the wall on the handle side.
  const Vec3 n(std::cos(yaw), std::sin(yaw), 0.0);
  s.occlusion_half_space = HalfSpace{n, n.dot(s.gt_pose.translation()) + (s.cylinder_radius + 3.0) * h};
  return with_common(s, seed);
}

SynthSpec unique_box_spec(std::uint64_t seed) {
  SynthSpec s;
  s.kind = ObjectKind::Box;
  s.symmetry_order = 1;
  s.box_half_extent = {4, 3, 2};
  const double h = s.voxel_size;
  s.gt_pose = Pose::from_euler(EulerAngles{kPi / 2, 0.0, kPi / 2}, Vec3(8 * h, -4 * h, 6 * h));
  return with_common(s, seed);
}

SynthSpec four_fold_box_spec(std::uint64_t seed) {
  SynthSpec s;
  s.kind = ObjectKind::Box;
  s.symmetry_order = 4;
  s.box_half_extent = {3, 3, 2};
  const double h = s.voxel_size;
  s.gt_pose = Pose(Eigen::Quaterniond::Identity(), Vec3(5 * h, 2 * h, 3 * h));
  return with_common(s, seed);
}

}  // namespace mfpose
