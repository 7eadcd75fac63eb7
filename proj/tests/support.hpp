#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Core>

#include "mfpose/point_cloud.hpp"
#include "mfpose/scene_field.hpp"
#include "mfpose/se3.hpp"

namespace fixture {

using Rng = std::mt19937_64;

inline double uniform(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

inline Eigen::VectorXd unit_vector(Rng& rng, int d) {
  std::normal_distribution<double> n(0.0, 1.0);
  Eigen::VectorXd v(d);
  do {
    for (int k = 0; k < d; ++k) v[k] = n(rng);
  } while (v.norm() < 1e-6);
  return v.normalized();
}

inline mfpose::Vec3 point_in(Rng& rng, const mfpose::Vec3& lo, const mfpose::Vec3& hi) {
  return {uniform(rng, lo.x(), hi.x()), uniform(rng, lo.y(), hi.y()), uniform(rng, lo.z(), hi.z())};
}

inline mfpose::Pose random_pose(Rng& rng, const mfpose::Vec3& lo, const mfpose::Vec3& hi) {
  std::normal_distribution<double> n(0.0, 1.0);
  Eigen::Quaterniond q(n(rng), n(rng), n(rng), n(rng));
  return mfpose::Pose(q.normalized(), point_in(rng, lo, hi));
}

inline mfpose::StructuredPointCloud random_object(Rng& rng, int n, int d, double extent) {
  Eigen::Matrix3Xd p(3, n);
  Eigen::MatrixXd z(d, n);
  for (int i = 0; i < n; ++i) {
    p.col(i) = point_in(rng, mfpose::Vec3::Constant(-extent), mfpose::Vec3::Constant(extent));
    z.col(i) = unit_vector(rng, d);
  }
  return {p, z};
}

struct TagMix {
  double empty = 0.1;
  double null = 0.2;
};

inline mfpose::SceneField random_scene(Rng& rng, const mfpose::GridGeometry& g, int d, TagMix mix = {}) {
  std::vector<mfpose::CellTag> tags(g.cell_count());
  std::vector<double> values(g.cell_count() * static_cast<std::size_t>(d), 0.0);
  for (std::size_t c = 0; c < tags.size(); ++c) {
    const double u = uniform(rng, 0.0, 1.0);
    if (u < mix.empty) {
      tags[c] = mfpose::CellTag::Empty;
    } else if (u < mix.empty + mix.null) {
      tags[c] = mfpose::CellTag::Null;
    } else {
      tags[c] = mfpose::CellTag::Regular;
      const Eigen::VectorXd z = unit_vector(rng, d);
      for (int k = 0; k < d; ++k) values[c * d + k] = z[k];
    }
  }
  return {g, d, tags, values};
}

inline mfpose::ClassifierField random_classifier(Rng& rng, const mfpose::GridGeometry& g, double c_min) {
  std::vector<double> v(g.cell_count());
  for (double& x : v) x = uniform(rng, 0.0, 1.0) < 0.3 ? c_min : uniform(rng, -5.0, 0.0);
  return {g, c_min, v};
}

inline mfpose::GridGeometry grid(mfpose::Vec3 origin, double h, int nx, int ny, int nz) {
  mfpose::GridGeometry g;
  g.origin = origin;
  g.voxel_size = h;
  g.dims = {nx, ny, nz};
  return g;
}

}  // namespace fixture
