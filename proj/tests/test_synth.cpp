#include <cmath>
#include <numbers>

#include "doctest.h"
#include "mfpose/error.hpp"
#include "mfpose/likelihood.hpp"
#include "mfpose/synth.hpp"
#include "support.hpp"

using namespace mfpose;

namespace {

const double kPi = std::numbers::pi;

SceneField regular_row(const std::vector<Eigen::VectorXd>& z) {
  const int d = static_cast<int>(z[0].size());
  std::vector<double> v;
  for (const auto& c : z) v.insert(v.end(), c.data(), c.data() + d);
  return SceneField(fixture::grid(Vec3::Zero(), 1.0, static_cast<int>(z.size()), 1, 1), d,
                    std::vector<CellTag>(z.size(), CellTag::Regular), v);
}

StructuredPointCloud cloud(const std::vector<Eigen::VectorXd>& z) {
  Eigen::MatrixXd m(z[0].size(), static_cast<Eigen::Index>(z.size()));
  for (std::size_t i = 0; i < z.size(); ++i) m.col(static_cast<Eigen::Index>(i)) = z[i];
  return {Eigen::Matrix3Xd::Zero(3, m.cols()), m};
}

// Positive set computed pair by pair, from the object side and from the scene side.
std::vector<bool> brute_force_buddies(const StructuredPointCloud& obj, const SceneField& scene, double threshold, double tol) {
  const int d = scene.descriptor_dim();
  std::vector<std::size_t> cells;
  for (std::size_t c = 0; c < scene.cell_count(); ++c) {
    if (scene.tag(c) == CellTag::Regular) cells.push_back(c);
  }
  auto sim = [&](Eigen::Index i, std::size_t c) {
    double s = 0.0;
    for (int k = 0; k < d; ++k) s += obj.descriptors()(k, i) * scene.values()[c * d + k];
    return s;
  };
  std::vector<bool> pos(scene.cell_count(), false);
  for (Eigen::Index i = 0; i < obj.size(); ++i) {
    double best_voxel = -INFINITY;
    for (std::size_t c : cells) best_voxel = std::max(best_voxel, sim(i, c));
    for (std::size_t c : cells) {
      double best_point = -INFINITY;
      for (Eigen::Index i2 = 0; i2 < obj.size(); ++i2) best_point = std::max(best_point, sim(i2, c));
      const double s = sim(i, c);
      if (s >= threshold && s >= best_voxel - tol && s >= best_point - tol) pos[c] = true;
    }
  }
  return pos;
}

}  // namespace

TEST_SUITE("synth") {
  TEST_CASE("best buddies in small constructed cases") {
    const Eigen::Vector2d a(1, 0), b(0.6, 0.8);
    const ClassifierField one = best_buddy_classifier(cloud({a}), regular_row({a}), 0.5);
    CHECK(one.value(0) == 0.0);

    const Eigen::Vector2d near_a = Eigen::Vector2d(0.95, -0.3).normalized();
    const ClassifierField two = best_buddy_classifier(cloud({a, b}), regular_row({near_a, a}), 0.5);
    CHECK(two.value(0) == kDefaultCMin);  // nearest to a, but a prefers the other voxel
    CHECK(two.value(1) == 0.0);

    // Tied maxima all qualify.
    const ClassifierField tied = best_buddy_classifier(cloud({a}), regular_row({a, a, b}), 0.5);
    CHECK(tied.value(0) == 0.0);
    CHECK(tied.value(1) == 0.0);
    CHECK(tied.value(2) == kDefaultCMin);

    const SceneField empty(fixture::grid(Vec3::Zero(), 1.0, 1, 1, 1), 2, {CellTag::Null}, {0, 0});
    CHECK_THROWS_AS(best_buddy_classifier(cloud({a}), empty, 0.5), Error);
  }

  TEST_CASE("threshold above one rejects everything") {
    fixture::Rng rng(61);
    std::vector<Eigen::VectorXd> obj, vox;
    for (int i = 0; i < 20; ++i) {
      obj.push_back(fixture::unit_vector(rng, 6));
      vox.push_back((obj.back() + 0.05 * fixture::unit_vector(rng, 6)).normalized());
    }
    const ClassifierField c = best_buddy_classifier(cloud(obj), regular_row(vox), 1.0 + 1e-9);
    for (double v : c.values()) CHECK(v == kDefaultCMin);
    const ClassifierField loose = best_buddy_classifier(cloud(obj), regular_row(vox), 0.5);
    CHECK(std::count(loose.values().begin(), loose.values().end(), 0.0) > 10);
  }

  TEST_CASE("best buddies match a pairwise recomputation") {
    fixture::Rng rng(62);
    for (int n = 0; n < 20; ++n) {
      std::vector<Eigen::VectorXd> obj, vox;
      for (int i = 0; i < 15; ++i) obj.push_back(fixture::unit_vector(rng, 4));
      for (int j = 0; j < 25; ++j) {
        // Some voxels duplicate object descriptors to create ties.
        vox.push_back(j % 5 == 0 ? obj[static_cast<std::size_t>(j % 15)] : fixture::unit_vector(rng, 4));
      }
      const StructuredPointCloud o = cloud(obj);
      const SceneField s = regular_row(vox);
      const ClassifierField c = best_buddy_classifier(o, s, 0.3);
      const std::vector<bool> ref = brute_force_buddies(o, s, 0.3, 1e-9);
      for (std::size_t j = 0; j < ref.size(); ++j) CHECK((c.value(j) == 0.0) == ref[j]);
    }
  }

  TEST_CASE("four-fold box is symmetric under quarter turns") {
    const SynthInstance inst = generate(four_fold_box_spec(0));
    REQUIRE(inst.symmetry_group.size() == 4);
    const LikelihoodModel model(inst.object, inst.scene, inst.classifier);
    const ExtendedReal gt = model.log_likelihood(inst.gt_pose);
    REQUIRE(gt.is_finite());
    for (const Pose& g : inst.symmetry_group) {
      CHECK(std::abs(model.log_likelihood(compose(inst.gt_pose, g)).value() - gt.value()) < 1e-6);
    }
    CHECK(std::abs(model.log_likelihood(compose(inst.gt_pose, rotation_z(kPi / 2))).value() - gt.value()) < 1e-6);
    CHECK(model.log_likelihood(compose(inst.gt_pose, rotation_z(kPi / 4))) < gt);
  }

  TEST_CASE("occluded mug handle contributes the classifier floor") {
    const SynthSpec spec = mug_spec(0);
    const SynthInstance inst = generate(spec);
    const LikelihoodConfig cfg;
    int occluded = 0;
    for (Eigen::Index i = 0; i < inst.object.size(); ++i) {
      const Vec3 q = inst.gt_pose.apply(inst.object.point(i));
      if (!spec.occluded(q)) continue;
      const ExtendedReal v = point_log_loc(q, inst.object.descriptor(i), inst.scene, inst.classifier, cfg);
      ++occluded;
      REQUIRE(v.is_finite());
      CHECK(v.value() == doctest::Approx(spec.c_min).epsilon(1e-12));
    }
    CHECK(occluded > 0);
    const ExtendedReal at_gt = object_log_likelihood(inst.object, inst.gt_pose, inst.scene, inst.classifier, cfg);
    CHECK(at_gt.is_finite());
    // The textureless mug looks the same under any yaw about its axis.
    const Pose turned = compose(inst.gt_pose, rotation_z(1.234));
    CHECK(object_log_likelihood(inst.object, turned, inst.scene, inst.classifier, cfg).is_finite());
  }

  TEST_CASE("generation is deterministic and validated") {
    const SynthInstance a = generate(unique_box_spec(3)), b = generate(unique_box_spec(3));
    CHECK(a.scene.values() == b.scene.values());
    CHECK(a.classifier.values() == b.classifier.values());
    CHECK(a.object.descriptors() == b.object.descriptors());
    CHECK(a.symmetry_group.size() == 1);

    SynthSpec bad = unique_box_spec();
    bad.symmetry_order = 0;
    CHECK_THROWS_AS(generate(bad), Error);
    bad = unique_box_spec();
    bad.voxel_size = -1;
    CHECK_THROWS_AS(generate(bad), Error);
    bad = unique_box_spec();
    bad.occlusion_box = Aabb{Vec3::Constant(-10), Vec3::Constant(10)};
    try {
      generate(bad);
      FAIL("expected InvalidSpec");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::InvalidSpec);
    }
  }

  TEST_CASE("visible object points land in Regular voxels") {
    for (const SynthSpec& spec : {mug_spec(1), unique_box_spec(1), four_fold_box_spec(1)}) {
      const SynthInstance inst = generate(spec);
      CHECK(inst.scene.regular_count() > 0);
      int positive = 0;
      for (double v : inst.classifier.values()) positive += v == 0.0;
      CHECK(positive > 0);
      for (Eigen::Index i = 0; i < inst.object.size(); ++i) {
        const Vec3 q = inst.gt_pose.apply(inst.object.point(i));
        if (spec.occluded(q)) continue;
        CHECK(inst.scene.query_descriptor(q).is_regular());
      }
    }
  }

  TEST_CASE("custom objects") {
    SynthSpec s;
    s.kind = ObjectKind::Custom;
    // Points at voxel centres, posed by a lattice translation, keep every
    // trilinear stencil inside a single voxel.
    fixture::Rng rng(63);
    s.custom_points.resize(3, 30);
    for (int i = 0; i < 30; ++i) {
      for (int a = 0; a < 3; ++a) s.custom_points(a, i) = (std::floor(fixture::uniform(rng, -6, 6)) + 0.5) * s.voxel_size;
    }
    s.gt_pose = Pose(Eigen::Quaterniond::Identity(), Vec3(12, 5, 0) * s.voxel_size);
    const SynthInstance inst = generate(s);
    CHECK(inst.object.size() == 30);
    CHECK(object_log_likelihood(inst.object, inst.gt_pose, inst.scene, inst.classifier, {}).is_finite());
  }
}
