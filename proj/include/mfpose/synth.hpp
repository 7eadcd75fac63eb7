#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Core>

#include "mfpose/point_cloud.hpp"
#include "mfpose/scene_field.hpp"
#include "mfpose/se3.hpp"

namespace mfpose {

struct BestBuddyConfig {
  double c_min = kDefaultCMin;
  double tie_tolerance = 1e-9;  // similarities this close count as tied maxima
};

inline constexpr double kDefaultBestBuddyThreshold = 0.7;

/// Classifier from mutual nearest neighbours in descriptor space: a Regular
/// voxel v is positive (log-value 0) when some object point i has v among its
/// most similar voxels, i among v's most similar object points, and the
/// similarity reaches `threshold`. Every other cell stores c_min. Tied maxima
/// all qualify, so symmetric instances yield symmetric classifiers.
/// Throws NoRegularVoxels or DimensionMismatch.
ClassifierField best_buddy_classifier(const StructuredPointCloud& obj, const SceneField& scene, double threshold,
                                      const BestBuddyConfig& cfg = {});

enum class ObjectKind { CylinderWithHandle, Box, Custom };

struct Aabb {
  Vec3 min = Vec3::Zero();
  Vec3 max = Vec3::Zero();
  bool contains(const Vec3& x) const { return (x.array() >= min.array()).all() && (x.array() <= max.array()).all(); }
};

/// Points with normal . x >= offset.
struct HalfSpace {
  Vec3 normal = Vec3::UnitX();
  double offset = 0.0;
  bool contains(const Vec3& x) const { return normal.dot(x) >= offset; }
};

struct SynthSpec {
  ObjectKind kind = ObjectKind::CylinderWithHandle;
  int symmetry_order = 1;         // k: descriptors are invariant under Rz(2 pi / k)
  bool textureless = false;       // drop angular features (any rotation about z is a symmetry)
  int descriptor_dim = 16;
  double descriptor_noise = 0.0;  // sigma_z, applied to scene descriptors
  std::optional<Aabb> occlusion_box;
  std::optional<HalfSpace> occlusion_half_space;
  int clutter_points = 0;
  double voxel_size = 1.0 / 64.0;
  Pose gt_pose;
  std::uint64_t seed = 0;

  // Geometry in voxel units.
  double cylinder_radius = 5.0;
  int cylinder_height = 8;             // layers
  bool handle = true;
  double band_half_width = 2.0;        // radial thickness of the observed wall on each side
  std::array<int, 3> box_half_extent{3, 3, 2};
  Eigen::Matrix3Xd custom_points;      // object frame, length units

  double best_buddy_threshold = kDefaultBestBuddyThreshold;
  double c_min = kDefaultCMin;

  /// Throws InvalidSpec.
  void validate() const;
  bool occluded(const Vec3& world) const;
};

struct SynthInstance {
  StructuredPointCloud object;
  SceneField scene;
  ClassifierField classifier;
  Pose gt_pose;
  std::vector<Pose> symmetry_group;  // g with L(gt o g) = L(gt)
};

/// Deterministic for a given spec. Object descriptors are smooth functions of
/// height, radius, part and (unless textureless) k-fold angle, projected to d
/// dimensions by a seeded random matrix. The scene holds the visible part of
/// the posed object (a radially thickened wall for cylinders) plus clutter
/// with random descriptors; unoccupied voxels above the topmost occupied voxel
/// of their column are Empty, everything else unobserved is Null.
/// Throws InvalidSpec.
SynthInstance generate(const SynthSpec& spec);

/// Textureless occluded-handle cylinder ("mug").
SynthSpec mug_spec(std::uint64_t seed = 0);
/// Box with distinct descriptors at every point and a lattice-aligned pose.
SynthSpec unique_box_spec(std::uint64_t seed = 0);
/// Square box with 4-fold descriptor symmetry about z.
SynthSpec four_fold_box_spec(std::uint64_t seed = 0);

}  // namespace mfpose
