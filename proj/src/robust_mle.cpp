#include "mfpose/robust_mle.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/SVD>

#include "mfpose/error.hpp"

namespace mfpose {
namespace {

constexpr double kRankTol = 1e-10;

}  // namespace

GridPoints build_grid(const SceneField& scene) {
  GridPoints g;
  for (std::size_t c = 0; c < scene.cell_count(); ++c) {
    if (scene.tag(c) == CellTag::Regular) g.cells.push_back(c);
  }
  if (g.cells.empty()) throw Error(ErrorCode::NoRegularVoxels, "scene has no Regular voxels");
  g.coords.resize(3, static_cast<Eigen::Index>(g.cells.size()));
  for (std::size_t j = 0; j < g.cells.size(); ++j) {
    g.coords.col(static_cast<Eigen::Index>(j)) = scene.geometry().voxel_center(g.cells[j]);
  }
  return g;
}

CostMatrix cost_matrix(const StructuredPointCloud& obj, const GridPoints& grid, const SceneField& scene,
                       const ClassifierField& cls, const LikelihoodConfig& cfg) {
  require_same_geometry(scene, cls);
  if (obj.descriptor_dim() != scene.descriptor_dim()) {
    throw Error(ErrorCode::DimensionMismatch, "object and scene descriptor dimensions differ");
  }
  const Eigen::Index m = grid.size();
  const Eigen::Index d = scene.descriptor_dim();
  Eigen::MatrixXd voxel_desc(d, m);
  Eigen::RowVectorXd log_p(m);
  for (Eigen::Index j = 0; j < m; ++j) {
    const std::size_t c = grid.cells[static_cast<std::size_t>(j)];
    voxel_desc.col(j) = Eigen::Map<const Eigen::VectorXd>(scene.cell_values(c).data(), d);
    log_p(j) = cls.value(c);
  }
  CostMatrix out;
  out.c_min = cls.c_min();
  out.values = cfg.beta * (obj.descriptors().transpose() * voxel_desc);
  out.values.rowwise() += log_p;
  return out;
}

CorrespondenceSet correspondences_from_costs(const CostMatrix& c, int k) {
  if (k < 1) throw Error(ErrorCode::InvalidConfig, "K must be >= 1");
  CorrespondenceSet set;
  set.k = k;
  const Eigen::Index m = c.values.cols();
  std::vector<Eigen::Index> order(static_cast<std::size_t>(m));
  for (Eigen::Index i = 0; i < c.values.rows(); ++i) {
    const auto row = c.values.row(i);
    const double best = row.maxCoeff();
    if (!(best >= c.c_min / 2.0)) {
      ++set.dropped_rows;
      continue;
    }
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    const auto top = static_cast<std::ptrdiff_t>(std::min<Eigen::Index>(k, m));
    std::partial_sort(order.begin(), order.begin() + top, order.end(), [&](Eigen::Index a, Eigen::Index b) {
      return row(a) > row(b) || (row(a) == row(b) && a < b);
    });
    double total = 0.0;
    const std::size_t first = set.pairs.size();
    for (std::ptrdiff_t n = 0; n < top; ++n) {
      const Eigen::Index j = order[static_cast<std::size_t>(n)];
      const double w = std::exp(row(j) - best);
      set.pairs.push_back({i, j, w});
      total += w;
    }
    for (std::size_t p = first; p < set.pairs.size(); ++p) set.pairs[p].weight /= total;
  }
  return set;
}

double robust_cost(double r, double threshold) { return std::min(r * r, threshold * threshold); }

Pose weighted_rigid_align(std::span<const Vec3> src, std::span<const Vec3> dst, std::span<const double> weights) {
  if (src.size() != dst.size() || src.size() != weights.size()) {
    throw Error(ErrorCode::DimensionMismatch, "src, dst and weights must have equal length");
  }
  if (src.empty()) throw Error(ErrorCode::EmptyInput, "no point pairs");
  double wsum = 0.0;
  Vec3 cs = Vec3::Zero();
  Vec3 cd = Vec3::Zero();
  for (std::size_t k = 0; k < src.size(); ++k) {
    if (!(weights[k] >= 0.0)) throw Error(ErrorCode::InvalidValue, "weights must be nonnegative");
    wsum += weights[k];
    cs += weights[k] * src[k];
    cd += weights[k] * dst[k];
  }
  if (!(wsum > 0.0)) throw Error(ErrorCode::ZeroWeightSum, "weight sum is zero");
  cs /= wsum;
  cd /= wsum;

  Mat3 h = Mat3::Zero();
  for (std::size_t k = 0; k < src.size(); ++k) {
    if (weights[k] == 0.0) continue;
    h += weights[k] * (src[k] - cs) * (dst[k] - cd).transpose();
  }

  Eigen::JacobiSVD<Mat3> svd(h, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Vec3 sv = svd.singularValues();
  Mat3 r = Mat3::Identity();
  if (sv(0) <= 0.0 || !std::isfinite(sv(0))) {
    r = Mat3::Identity();
  } else if (sv(1) <= kRankTol * sv(0)) {
    // Rank one: only the principal direction is constrained.
    r = Eigen::Quaterniond::FromTwoVectors(svd.matrixU().col(0), svd.matrixV().col(0)).toRotationMatrix();
  } else {
    const Mat3 u = svd.matrixU();
    const Mat3 v = svd.matrixV();
    Mat3 d = Mat3::Identity();
    d(2, 2) = (v * u.transpose()).determinant() < 0.0 ? -1.0 : 1.0;
    r = v * d * u.transpose();
  }
  const Pose rot = Pose::from_matrix(r);
  return Pose(rot.rotation(), cd - rot.rotation() * cs);
}

void GncConfig::validate() const {
  if (!(truncation > 0.0) || !std::isfinite(truncation)) throw Error(ErrorCode::InvalidConfig, "truncation must be > 0");
  if (!(mu_update_factor > 1.0)) throw Error(ErrorCode::InvalidConfig, "mu_update_factor must be > 1");
  if (max_iterations < 1 || inner_iterations < 1) throw Error(ErrorCode::InvalidConfig, "iterations must be >= 1");
  if (!(convergence_tol > 0.0)) throw Error(ErrorCode::InvalidConfig, "convergence_tol must be > 0");
}

GncConfig default_gnc_config(double voxel_size) {
  GncConfig cfg;
  cfg.truncation = kDefaultTruncationFactor * voxel_size;
  return cfg;
}

double gnc_tls_weight(double r2, double mu, double c2) {
  if (r2 <= mu / (mu + 1.0) * c2) return 1.0;
  if (r2 >= (mu + 1.0) / mu * c2) return 0.0;
  return std::clamp(std::sqrt(c2 / r2 * mu * (mu + 1.0)) - mu, 0.0, 1.0);
}

double gnc_tls_surrogate(double r2, double mu, double c2) {
  if (r2 <= mu / (mu + 1.0) * c2) return r2;
  if (r2 >= (mu + 1.0) / mu * c2) return c2;
  return 2.0 * std::sqrt(c2 * r2 * mu * (mu + 1.0)) - mu * (c2 + r2);
}

GncResult gnc_solve(const StructuredPointCloud& obj, const GridPoints& grid, const CorrespondenceSet& corr,
                    const GncConfig& cfg, const std::optional<Pose>& init) {
  cfg.validate();
  if (corr.empty()) throw Error(ErrorCode::NoCorrespondences, "correspondence set is empty");
  const std::size_t n = corr.pairs.size();
  std::vector<Vec3> src(n), dst(n);
  std::vector<double> prior(n);
  for (std::size_t k = 0; k < n; ++k) {
    src[k] = obj.point(corr.pairs[k].point);
    dst[k] = grid.coords.col(corr.pairs[k].target);
    prior[k] = corr.pairs[k].weight;
  }
  const double c2 = cfg.truncation * cfg.truncation;

  GncResult res;
  res.pose = init ? *init : weighted_rigid_align(src, dst, prior);
  std::vector<double> r2(n);
  auto update_residuals = [&] {
    for (std::size_t k = 0; k < n; ++k) r2[k] = (dst[k] - res.pose.apply(src[k])).squaredNorm();
  };
  update_residuals();

  double r2max = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    if (prior[k] > 0.0) r2max = std::max(r2max, r2[k]);
  }
  res.weights.assign(n, 1.0);
  if (2.0 * r2max <= c2) {
    // Every pair already sits inside the convex region of the TLS cost.
    if (init) res.pose = weighted_rigid_align(src, dst, prior);
    res.converged = true;
    return res;
  }

  double mu = c2 / (2.0 * r2max - c2);
  std::vector<double> m(n), combined(n);
  auto objective = [&] {
    double total = 0.0;
    for (std::size_t k = 0; k < n; ++k) total += prior[k] * gnc_tls_surrogate(r2[k], mu, c2);
    return total;
  };

  for (int stage = 0; stage < cfg.max_iterations; ++stage) {
    const std::vector<double> stage_start = res.weights;
    res.log.push_back({stage, mu, objective(), 0.0});
    for (int inner = 0; inner < cfg.inner_iterations; ++inner) {
      double change = 0.0;
      double mass = 0.0;
      for (std::size_t k = 0; k < n; ++k) {
        m[k] = gnc_tls_weight(r2[k], mu, c2);
        change = std::max(change, std::abs(m[k] - res.weights[k]));
        combined[k] = prior[k] * m[k];
        mass += combined[k];
      }
      res.weights = m;
      if (!(mass > 0.0)) break;  // every pair rejected; keep the last pose
      res.pose = weighted_rigid_align(src, dst, combined);
      update_residuals();
      res.log.push_back({stage, mu, objective(), change});
      if (change < cfg.convergence_tol) break;
    }
    res.stages = stage + 1;

    double stage_change = 0.0;
    bool binary = true;
    for (std::size_t k = 0; k < n; ++k) {
      stage_change = std::max(stage_change, std::abs(res.weights[k] - stage_start[k]));
      if (res.weights[k] > cfg.convergence_tol && res.weights[k] < 1.0 - cfg.convergence_tol) binary = false;
    }
    if (binary && stage_change < cfg.convergence_tol) {
      res.converged = true;
      break;
    }
    mu *= cfg.mu_update_factor;
  }
  return res;
}

MleResult mle_estimate(const StructuredPointCloud& obj, const SceneField& scene, const ClassifierField& cls,
                       const MleConfig& cfg) {
  cfg.likelihood.validate();
  const GridPoints grid = build_grid(scene);
  const CostMatrix costs = cost_matrix(obj, grid, scene, cls, cfg.likelihood);
  const CorrespondenceSet corr = correspondences_from_costs(costs, cfg.top_k);
  const GncConfig gnc = cfg.gnc.value_or(default_gnc_config(scene.geometry().voxel_size));

  MleResult out;
  out.gnc = gnc_solve(obj, grid, corr, gnc, cfg.init);
  const double at_result = objective_for_optimizer(obj, out.gnc.pose, scene, cls, cfg.likelihood);
  const double at_init = objective_for_optimizer(obj, cfg.init, scene, cls, cfg.likelihood);
  if (at_result >= at_init) {
    out.pose = out.gnc.pose;
    out.objective = at_result;
  } else {
    out.pose = cfg.init;
    out.objective = at_init;
    out.kept_init = true;
  }
  return out;
}

}  // namespace mfpose
