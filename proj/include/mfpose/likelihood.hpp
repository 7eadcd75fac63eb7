#pragma once

#include <Eigen/Core>

#include "mfpose/extended_real.hpp"
#include "mfpose/point_cloud.hpp"
#include "mfpose/scene_field.hpp"
#include "mfpose/se3.hpp"

namespace mfpose {

inline constexpr double kDefaultBeta = 10.0;
inline constexpr double kDefaultLogFloor = -1e9;

struct LikelihoodConfig {
  double beta = kDefaultBeta;       // temperature on descriptor similarity
  double log_floor = kDefaultLogFloor;  // finite stand-in for NEG_INF

  /// Throws InvalidConfig unless beta > 0 and log_floor < 0 (both finite).
  void validate() const;
};

/// log p_O(q) + beta * sim(f_scn(q), z), or NEG_INF when f_scn(q) is Empty.
ExtendedReal point_log_loc(const Vec3& q, const Eigen::Ref<const Eigen::VectorXd>& z, const SceneField& scene,
                           const ClassifierField& cls, const LikelihoodConfig& cfg);

/// Sum of point_log_loc over the posed object; NEG_INF as soon as any point is.
ExtendedReal object_log_likelihood(const StructuredPointCloud& obj, const Pose& pose, const SceneField& scene,
                                   const ClassifierField& cls, const LikelihoodConfig& cfg);

/// object_log_likelihood with NEG_INF mapped to cfg.log_floor.
double objective_for_optimizer(const StructuredPointCloud& obj, const Pose& pose, const SceneField& scene,
                               const ClassifierField& cls, const LikelihoodConfig& cfg);

/// Binds an object to a scene so poses can be scored repeatedly. Holds
/// references: the bound objects must outlive the model. Thread-safe.
class LikelihoodModel {
 public:
  /// Validates descriptor dimensions, grid geometry and that log_floor lies
  /// strictly below every feasible score (N * (c_min - beta)).
  LikelihoodModel(const StructuredPointCloud& obj, const SceneField& scene, const ClassifierField& cls,
                  LikelihoodConfig cfg = {});

  ExtendedReal log_likelihood(const Pose& pose) const;
  double objective(const Pose& pose) const { return log_likelihood(pose).value_or(cfg_.log_floor); }

  const StructuredPointCloud& object() const noexcept { return obj_; }
  const SceneField& scene() const noexcept { return scene_; }
  const ClassifierField& classifier() const noexcept { return cls_; }
  const LikelihoodConfig& config() const noexcept { return cfg_; }

 private:
  const StructuredPointCloud& obj_;
  const SceneField& scene_;
  const ClassifierField& cls_;
  LikelihoodConfig cfg_;
};

}  // namespace mfpose
