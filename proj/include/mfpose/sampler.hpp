#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "mfpose/extended_real.hpp"
#include "mfpose/kde.hpp"
#include "mfpose/likelihood.hpp"
#include "mfpose/robust_mle.hpp"
#include "mfpose/se3.hpp"

namespace mfpose {

/// Weighted pose hypotheses representing the pose distribution.
struct ParticleSet {
  std::vector<Pose> poses;
  std::vector<ExtendedReal> log_liks;
  std::vector<double> weights;  // empty until weighted

  std::size_t size() const noexcept { return poses.size(); }
  bool has_weights() const noexcept { return !weights.empty(); }

  /// Throws InvalidValue when the lists disagree in length, are empty, or
  /// the weights violate normalization / the NEG_INF -> 0 rule.
  void validate() const;
};

/// Normalized importance weights exp(l - max l); exactly 0 for NEG_INF.
/// Throws AllInfeasible when no particle is finite.
std::vector<double> importance_weights(const std::vector<ExtendedReal>& log_liks);

/// Copy of `p` carrying importance weights.
ParticleSet with_importance_weights(ParticleSet p);

/// 1 / sum w^2. Throws InvalidValue when weights are absent.
double effective_sample_size(const ParticleSet& p);

/// Systematic resampling of `count` particles; output weights are uniform.
/// Throws AllInfeasible or InvalidValue (count == 0).
ParticleSet importance_resample(const ParticleSet& p, std::size_t count, std::uint64_t seed);

using PoseObjective = std::function<double(const Pose&)>;
using PoseLogDensity = std::function<ExtendedReal(const Pose&)>;

inline constexpr int kDefaultPopulation = 64;
inline constexpr int kDefaultGenerations = 312;  // 64 * 312 ~ 2e4 evaluations

struct DeConfig {
  int population_size = kDefaultPopulation;
  int generations = kDefaultGenerations;
  double differential_weight = 0.8;  // F
  double crossover_rate = 0.9;       // probability of the two-point crossover
  Vec3 lower = Vec3::Zero();         // translation bounds
  Vec3 upper = Vec3::Zero();
  std::uint64_t seed = 0;

  /// Throws InvalidBounds for an empty/non-finite box, InvalidConfig otherwise.
  void validate() const;
};

struct DeResult {
  ParticleSet population;           // final members, log_liks = objective values
  std::vector<double> best_trace;   // best objective after each generation
  Pose best;
  double best_objective = 0.0;
};

/// Two-point differential evolution over raw 7-vectors (quaternion + translation):
/// mutant = best + F (donor1 - donor2), two-point crossover with the member,
/// decode with quaternion renormalization and translation clamping, greedy
/// selection. `init`, when given, replaces the first initial member.
/// Deterministic for a given seed.
DeResult de_sample(const PoseObjective& objective, const DeConfig& cfg, const std::optional<Pose>& init = std::nullopt);

struct McmcConfig {
  int steps = 10000;
  double sigma_t = 0.01;  // length
  double sigma_r = 0.05;  // radians
  std::uint64_t seed = 0;

  void validate() const;
};

struct McmcResult {
  ParticleSet chain;
  double acceptance_rate = 0.0;
};

/// Random-walk Metropolis over poses: Gaussian translation step, rotation
/// left-composed with an axis-angle step of angle |N(0, sigma_r)| about a
/// uniform axis. NEG_INF proposals are always rejected.
/// Throws InfeasibleInit when log_density(init) is NEG_INF.
McmcResult mcmc_sample(const PoseLogDensity& log_density, const McmcConfig& cfg, const Pose& init);

enum class PoseCoordinate { Tx, Ty, Tz, Roll, Pitch, Yaw };
inline constexpr std::array<PoseCoordinate, 6> kAllCoordinates{PoseCoordinate::Tx,   PoseCoordinate::Ty,
                                                               PoseCoordinate::Tz,   PoseCoordinate::Roll,
                                                               PoseCoordinate::Pitch, PoseCoordinate::Yaw};
const char* coordinate_name(PoseCoordinate c);
bool is_angular(PoseCoordinate c);
std::vector<double> coordinate_samples(const ParticleSet& p, PoseCoordinate c);

inline constexpr std::size_t kDefaultParticles = 10000;
inline constexpr int kDefaultRestarts = 128;
inline constexpr int kPipelinePopulation = 16;
inline constexpr int kPipelineGenerations = 300;

struct EstimateConfig {
  LikelihoodConfig likelihood;
  bool mle_init = true;
  MleConfig mle;                  // likelihood field is overwritten from above
  DeConfig de{.population_size = kPipelinePopulation, .generations = kPipelineGenerations};  // bounds default to the scene AABB
  int restarts = kDefaultRestarts;  // independent DE runs whose final populations are pooled
  std::size_t particles = kDefaultParticles;
  std::uint64_t seed = 0;         // drives DE and resampling
};

struct EstimateTimings {
  double mle_seconds = 0.0;
  double de_seconds = 0.0;
  double resample_seconds = 0.0;
  double kde_seconds = 0.0;
};

struct EstimateResult {
  ParticleSet particles;          // resampled, uniform weights
  std::vector<MarginalDensity> marginals;  // tx, ty, tz, roll, pitch, yaw
  ParticleSet raw;                // pooled DE populations with exact log-likelihoods and importance weights
  std::optional<MleResult> mle;
  double raw_ess = 0.0;
  ExtendedReal best_log_lik;
  Pose best_pose;
  EstimateTimings timings;
};

/// Optional MLE seed -> DE -> importance resampling -> KDE marginals. The MLE
/// pose seeds the first DE run; the remaining runs start from random
/// populations with seeds derived from cfg.seed.
EstimateResult estimate_distribution(const StructuredPointCloud& obj, const SceneField& scene,
                                     const ClassifierField& cls, const EstimateConfig& cfg = {});

}  // namespace mfpose
