#pragma once

#include <optional>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "mfpose/likelihood.hpp"
#include "mfpose/point_cloud.hpp"
#include "mfpose/scene_field.hpp"
#include "mfpose/se3.hpp"

namespace mfpose {

/// Centers of the Regular voxels of a scene, x-fastest order.
struct GridPoints {
  Eigen::Matrix3Xd coords;
  std::vector<std::size_t> cells;  // linear voxel index of each column

  Eigen::Index size() const noexcept { return coords.cols(); }
};

/// Throws NoRegularVoxels if the scene has none.
GridPoints build_grid(const SceneField& scene);

/// values(i, j) = log p_O(y_j) + beta * f_scn(y_j).z_i (N x M).
struct CostMatrix {
  Eigen::MatrixXd values;
  double c_min = kDefaultCMin;
};

CostMatrix cost_matrix(const StructuredPointCloud& obj, const GridPoints& grid, const SceneField& scene,
                       const ClassifierField& cls, const LikelihoodConfig& cfg);

struct Correspondence {
  Eigen::Index point = 0;   // object point i
  Eigen::Index target = 0;  // grid point j
  double weight = 0.0;      // w_ij
};

/// Up to K weighted grid candidates per kept object point, grouped by point.
struct CorrespondenceSet {
  std::vector<Correspondence> pairs;
  int k = 0;
  Eigen::Index dropped_rows = 0;

  bool empty() const noexcept { return pairs.empty(); }
};

inline constexpr int kDefaultTopK = 8;

/// Softmax over each row's top-K entries (ties to the lower index). Rows whose
/// best entry is below c_min / 2 are dropped. Throws InvalidConfig if k < 1.
CorrespondenceSet correspondences_from_costs(const CostMatrix& c, int k);

/// Truncated least squares: min(r^2, threshold^2).
double robust_cost(double r, double threshold);

/// Minimizer of sum_k w_k |dst_k - (R src_k + t)|^2 (weighted Kabsch with a
/// determinant fix). When the weighted cross-covariance has rank <= 1 the
/// rotation is the smallest one consistent with the data: identity for a
/// single effective point, the shortest arc between the principal directions
/// for collinear data.
/// Throws DimensionMismatch, EmptyInput or ZeroWeightSum.
Pose weighted_rigid_align(std::span<const Vec3> src, std::span<const Vec3> dst, std::span<const double> weights);

struct GncConfig {
  double truncation = 1.0;       // TLS threshold (length)
  double mu_update_factor = 1.4;
  int max_iterations = 100;      // mu stages
  int inner_iterations = 10;     // alternations per stage
  double convergence_tol = 1e-6;

  /// Throws InvalidConfig on non-positive truncation, factor <= 1, or iterations < 1.
  void validate() const;
};

inline constexpr double kDefaultTruncationFactor = 0.75;

/// GncConfig with truncation = kDefaultTruncationFactor * voxel_size.
GncConfig default_gnc_config(double voxel_size);

struct GncLogEntry {
  int stage = 0;
  double mu = 0.0;
  double objective = 0.0;  // sum_k w_k * rho_mu(r_k) after the pose update
  double weight_change = 0.0;
};

struct GncResult {
  Pose pose;
  std::vector<double> weights;  // GNC inlier weight per correspondence pair
  std::vector<GncLogEntry> log;
  int stages = 0;
  bool converged = false;
};

/// GNC weight for squared residual r2 at control parameter mu, threshold^2 = c2.
double gnc_tls_weight(double r2, double mu, double c2);
/// GNC-TLS surrogate cost at mu (tends to robust_cost as mu grows).
double gnc_tls_surrogate(double r2, double mu, double c2);

/// Robust registration of the object onto the grid through the weighted
/// correspondences. Throws NoCorrespondences for an empty set.
GncResult gnc_solve(const StructuredPointCloud& obj, const GridPoints& grid, const CorrespondenceSet& corr,
                    const GncConfig& cfg, const std::optional<Pose>& init = std::nullopt);

struct MleConfig {
  LikelihoodConfig likelihood;
  int top_k = kDefaultTopK;
  std::optional<GncConfig> gnc;  // default_gnc_config(voxel_size) when unset
  Pose init = Pose::identity();
};

struct MleResult {
  Pose pose;
  double objective = 0.0;  // objective_for_optimizer at pose
  GncResult gnc;
  bool kept_init = false;  // GNC result scored below the initialization
};

/// build_grid -> cost_matrix -> correspondences_from_costs -> gnc_solve.
/// Never returns a pose scoring below `init` under objective_for_optimizer.
MleResult mle_estimate(const StructuredPointCloud& obj, const SceneField& scene, const ClassifierField& cls,
                       const MleConfig& cfg = {});

}  // namespace mfpose
