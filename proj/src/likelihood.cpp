#include "mfpose/likelihood.hpp"

#include <cmath>
#include <vector>

#include "mfpose/error.hpp"

namespace mfpose {
namespace {

void check_inputs(const StructuredPointCloud& obj, const SceneField& scene, const ClassifierField& cls) {
  require_same_geometry(scene, cls);
  if (obj.descriptor_dim() != scene.descriptor_dim()) {
    throw Error(ErrorCode::DimensionMismatch, "object and scene descriptor dimensions differ");
  }
}

ExtendedReal sum_over_points(const StructuredPointCloud& obj, const Pose& pose, const SceneField& scene,
                             const ClassifierField& cls, double beta) {
  const Mat3 r = pose.rotation_matrix();
  const Vec3& t = pose.translation();
  std::vector<double> scratch(static_cast<std::size_t>(scene.descriptor_dim()));
  const Eigen::MatrixXd& z = obj.descriptors();
  double total = 0.0;
  for (Eigen::Index i = 0; i < obj.size(); ++i) {
    const Vec3 q = r * obj.points().col(i) + t;
    const ExtendedReal s = scene.similarity_at(q, z.col(i).data(), scratch);
    if (s.is_neg_inf()) return ExtendedReal::neg_inf();
    total += cls.query(q) + beta * s.value();
  }
  return ExtendedReal(total);
}

}  // namespace

void LikelihoodConfig::validate() const {
  if (!(beta > 0.0) || !std::isfinite(beta)) throw Error(ErrorCode::InvalidConfig, "beta must be positive and finite");
  if (!(log_floor < 0.0) || !std::isfinite(log_floor)) {
    throw Error(ErrorCode::InvalidConfig, "log_floor must be negative and finite");
  }
}

ExtendedReal point_log_loc(const Vec3& q, const Eigen::Ref<const Eigen::VectorXd>& z, const SceneField& scene,
                           const ClassifierField& cls, const LikelihoodConfig& cfg) {
  if (z.size() != scene.descriptor_dim()) throw Error(ErrorCode::DimensionMismatch, "descriptor dimension mismatch");
  std::vector<double> scratch(static_cast<std::size_t>(scene.descriptor_dim()));
  const Eigen::VectorXd zc = z;
  const ExtendedReal s = scene.similarity_at(q, zc.data(), scratch);
  if (s.is_neg_inf()) return s;
  return ExtendedReal(cls.query(q) + cfg.beta * s.value());
}

ExtendedReal object_log_likelihood(const StructuredPointCloud& obj, const Pose& pose, const SceneField& scene,
                                   const ClassifierField& cls, const LikelihoodConfig& cfg) {
  check_inputs(obj, scene, cls);
  return sum_over_points(obj, pose, scene, cls, cfg.beta);
}

double objective_for_optimizer(const StructuredPointCloud& obj, const Pose& pose, const SceneField& scene,
                               const ClassifierField& cls, const LikelihoodConfig& cfg) {
  return object_log_likelihood(obj, pose, scene, cls, cfg).value_or(cfg.log_floor);
}

LikelihoodModel::LikelihoodModel(const StructuredPointCloud& obj, const SceneField& scene, const ClassifierField& cls,
                                 LikelihoodConfig cfg)
    : obj_(obj), scene_(scene), cls_(cls), cfg_(cfg) {
  cfg_.validate();
  check_inputs(obj_, scene_, cls_);
  const double lowest_feasible = static_cast<double>(obj_.size()) * (cls_.c_min() - cfg_.beta);
  if (!(cfg_.log_floor < lowest_feasible)) {
    throw Error(ErrorCode::InvalidConfig, "log_floor must lie below N * (c_min - beta)");
  }
}

ExtendedReal LikelihoodModel::log_likelihood(const Pose& pose) const {
  return sum_over_points(obj_, pose, scene_, cls_, cfg_.beta);
}

}  // namespace mfpose
