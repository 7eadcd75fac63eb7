#include "mfpose/sampler.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>
#include <random>

#include "mfpose/error.hpp"
#include "mfpose/parallel.hpp"

namespace mfpose {
namespace {

using Rng = std::mt19937_64;

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

double uniform01(Rng& rng) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng); }

Eigen::Quaterniond random_rotation(Rng& rng) {
  const double u1 = uniform01(rng), u2 = uniform01(rng), u3 = uniform01(rng);
  const double a = std::sqrt(1.0 - u1), b = std::sqrt(u1);
  constexpr double tau = 2.0 * std::numbers::pi;
  return Eigen::Quaterniond(b * std::cos(tau * u3), a * std::sin(tau * u2), a * std::cos(tau * u2), b * std::sin(tau * u3));
}

using Vec7 = Eigen::Matrix<double, 7, 1>;

Vec7 to_vec7(const Pose& p) {
  const PoseVector v = pose_to_vector(p);
  return Eigen::Map<const Vec7>(v.data());
}

// Population genes are the raw 7-vectors with the quaternion part kept on the
// unit sphere but never sign-canonicalized: folding q and -q together would
// tear the rotation space apart at w = 0 and bias the search toward it.
Vec7 repair(Vec7 v, const DeConfig& cfg, const Vec7& fallback) {
  v.tail<3>() = v.tail<3>().cwiseMax(cfg.lower).cwiseMin(cfg.upper);
  const double n = v.head<4>().norm();
  if (!(n > 1e-12) || !std::isfinite(n)) {
    v.head<4>() = fallback.head<4>();
  } else {
    v.head<4>() /= n;
  }
  return v;
}

Pose gene_pose(const Vec7& v) { return Pose(Eigen::Quaterniond(v(0), v(1), v(2), v(3)), v.tail<3>()); }

}  // namespace

void ParticleSet::validate() const {
  if (poses.empty()) throw Error(ErrorCode::InvalidValue, "particle set is empty");
  if (log_liks.size() != poses.size()) throw Error(ErrorCode::InvalidValue, "log_liks length mismatch");
  if (weights.empty()) return;
  if (weights.size() != poses.size()) throw Error(ErrorCode::InvalidValue, "weights length mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (!(weights[i] >= 0.0)) throw Error(ErrorCode::InvalidValue, "negative weight");
    if (log_liks[i].is_neg_inf() && weights[i] != 0.0) throw Error(ErrorCode::InvalidValue, "infeasible particle has weight");
    s += weights[i];
  }
  if (std::abs(s - 1.0) > 1e-9) throw Error(ErrorCode::InvalidValue, "weights do not sum to 1");
}

std::vector<double> importance_weights(const std::vector<ExtendedReal>& log_liks) {
  double best = -std::numeric_limits<double>::infinity();
  bool any = false;
  for (const auto& l : log_liks) {
    if (l.is_finite()) {
      best = any ? std::max(best, l.value()) : l.value();
      any = true;
    }
  }
  if (!any) throw Error(ErrorCode::AllInfeasible, "every particle has NEG_INF log-likelihood");
  std::vector<double> w(log_liks.size(), 0.0);
  double total = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (log_liks[i].is_finite()) {
      w[i] = std::exp(log_liks[i].value() - best);
      total += w[i];
    }
  }
  for (double& x : w) x /= total;
  return w;
}

ParticleSet with_importance_weights(ParticleSet p) {
  p.weights = importance_weights(p.log_liks);
  return p;
}

double effective_sample_size(const ParticleSet& p) {
  if (!p.has_weights()) throw Error(ErrorCode::InvalidValue, "particle set has no weights");
  double s2 = 0.0;
  for (double w : p.weights) s2 += w * w;
  return 1.0 / s2;
}

ParticleSet importance_resample(const ParticleSet& p, std::size_t count, std::uint64_t seed) {
  if (count == 0) throw Error(ErrorCode::InvalidValue, "resample count must be positive");
  if (p.log_liks.size() != p.poses.size() || p.poses.empty()) {
    throw Error(ErrorCode::InvalidValue, "malformed particle set");
  }
  const std::vector<double> w = importance_weights(p.log_liks);
  Rng rng(splitmix(seed));
  const double n = static_cast<double>(count);
  const double u0 = uniform01(rng) / n;

  ParticleSet out;
  out.poses.reserve(count);
  out.log_liks.reserve(count);
  std::size_t src = 0;
  double cumulative = w[0];
  for (std::size_t k = 0; k < count; ++k) {
    const double u = u0 + static_cast<double>(k) / n;
    while (u >= cumulative && src + 1 < w.size()) cumulative += w[++src];
    // Round-off at the top end must never land on a zero-weight particle.
    std::size_t pick = src;
    while (w[pick] == 0.0 && pick > 0) --pick;
    out.poses.push_back(p.poses[pick]);
    out.log_liks.push_back(p.log_liks[pick]);
  }
  out.weights.assign(count, 1.0 / n);
  return out;
}

void DeConfig::validate() const {
  if (!lower.allFinite() || !upper.allFinite() || (lower.array() > upper.array()).any()) {
    throw Error(ErrorCode::InvalidBounds, "translation bounds must be finite with lower <= upper");
  }
  if (population_size < 4) throw Error(ErrorCode::InvalidConfig, "population_size must be >= 4");
  if (generations < 0) throw Error(ErrorCode::InvalidConfig, "generations must be >= 0");
  if (!(differential_weight > 0.0 && differential_weight < 2.0)) {
    throw Error(ErrorCode::InvalidConfig, "differential_weight must lie in (0, 2)");
  }
  if (!(crossover_rate >= 0.0 && crossover_rate <= 1.0)) throw Error(ErrorCode::InvalidConfig, "crossover_rate must lie in [0, 1]");
}

DeResult de_sample(const PoseObjective& objective, const DeConfig& cfg, const std::optional<Pose>& init) {
  cfg.validate();
  const auto np = static_cast<std::size_t>(cfg.population_size);
  Rng rng(splitmix(cfg.seed));

  std::vector<Vec7> genes(np);
  for (auto& g : genes) {
    const Eigen::Quaterniond q = random_rotation(rng);
    g.head<4>() << q.w(), q.x(), q.y(), q.z();
    for (int a = 0; a < 3; ++a) g(4 + a) = cfg.lower[a] + uniform01(rng) * (cfg.upper[a] - cfg.lower[a]);
  }
  if (init) genes[0] = repair(to_vec7(*init), cfg, genes[0]);

  std::vector<Pose> members(np);
  std::vector<double> fitness(np);
  parallel_for(np, [&](std::size_t i) {
    members[i] = gene_pose(genes[i]);
    fitness[i] = objective(members[i]);
  });

  auto best_index = [&] {
    return static_cast<std::size_t>(std::distance(fitness.begin(), std::max_element(fitness.begin(), fitness.end())));
  };

  DeResult res;
  res.best_trace.reserve(static_cast<std::size_t>(cfg.generations));
  std::vector<Vec7> trial_genes(np);
  std::vector<Pose> trials(np);
  std::vector<double> trial_fitness(np);
  std::uniform_int_distribution<std::size_t> pick(0, np - 1);
  std::uniform_int_distribution<int> cut(0, 4);

  for (int g = 0; g < cfg.generations; ++g) {
    const Vec7 best = genes[best_index()];
    // Trials are generated sequentially so the random stream does not depend
    // on the evaluation schedule.
    for (std::size_t i = 0; i < np; ++i) {
      std::size_t d1 = pick(rng);
      while (d1 == i) d1 = pick(rng);
      std::size_t d2 = pick(rng);
      while (d2 == i || d2 == d1) d2 = pick(rng);
      Vec7 trial = best + cfg.differential_weight * (genes[d1] - genes[d2]);
      if (uniform01(rng) < cfg.crossover_rate) {
        // Two-point crossover over the genes (q, tx, ty, tz): a proper,
        // non-empty run of them is restored from the member.
        int a = cut(rng), b = cut(rng);
        while (a == b || std::abs(a - b) == 4) {
          a = cut(rng);
          b = cut(rng);
        }
        if (a > b) std::swap(a, b);
        const int lo = a == 0 ? 0 : a + 3, hi = b + 3;
        trial.segment(lo, hi - lo) = genes[i].segment(lo, hi - lo);
      }
      trial_genes[i] = repair(trial, cfg, genes[i]);
    }
    parallel_for(np, [&](std::size_t i) {
      trials[i] = gene_pose(trial_genes[i]);
      trial_fitness[i] = objective(trials[i]);
    });
    for (std::size_t i = 0; i < np; ++i) {
      if (trial_fitness[i] >= fitness[i]) {
        genes[i] = trial_genes[i];
        members[i] = trials[i];
        fitness[i] = trial_fitness[i];
      }
    }
    res.best_trace.push_back(fitness[best_index()]);
  }

  const std::size_t b = best_index();
  res.best = members[b];
  res.best_objective = fitness[b];
  res.population.poses = std::move(members);
  res.population.log_liks.reserve(np);
  for (double f : fitness) res.population.log_liks.emplace_back(f);
  return res;
}

void McmcConfig::validate() const {
  if (steps < 1) throw Error(ErrorCode::InvalidConfig, "steps must be >= 1");
  if (!(sigma_t > 0.0) || !(sigma_r > 0.0)) throw Error(ErrorCode::InvalidConfig, "sigmas must be positive");
}

McmcResult mcmc_sample(const PoseLogDensity& log_density, const McmcConfig& cfg, const Pose& init) {
  cfg.validate();
  ExtendedReal current_lp = log_density(init);
  if (current_lp.is_neg_inf()) throw Error(ErrorCode::InfeasibleInit, "initial pose has NEG_INF log-density");
  Rng rng(splitmix(cfg.seed));
  std::normal_distribution<double> gauss(0.0, 1.0);

  McmcResult res;
  auto& chain = res.chain;
  chain.poses.reserve(static_cast<std::size_t>(cfg.steps));
  chain.log_liks.reserve(static_cast<std::size_t>(cfg.steps));
  Pose current = init;
  std::size_t accepted = 0;
  for (int s = 0; s < cfg.steps; ++s) {
    const Vec3 dt(gauss(rng), gauss(rng), gauss(rng));
    Vec3 axis(gauss(rng), gauss(rng), gauss(rng));
    const double angle = std::abs(cfg.sigma_r * gauss(rng));
    const double u = uniform01(rng);
    if (!(axis.norm() > 0.0)) axis = Vec3::UnitZ();
    const Eigen::Quaterniond dq(Eigen::AngleAxisd(angle, axis.normalized()));
    const Pose proposal(dq * current.rotation(), current.translation() + cfg.sigma_t * dt);
    const ExtendedReal lp = log_density(proposal);
    if (lp.is_finite()) {
      const double delta = lp.value() - current_lp.value();
      if (delta >= 0.0 || u < std::exp(delta)) {
        current = proposal;
        current_lp = lp;
        ++accepted;
      }
    }
    chain.poses.push_back(current);
    chain.log_liks.push_back(current_lp);
  }
  res.acceptance_rate = static_cast<double>(accepted) / cfg.steps;
  return res;
}

const char* coordinate_name(PoseCoordinate c) {
  switch (c) {
    case PoseCoordinate::Tx: return "tx";
    case PoseCoordinate::Ty: return "ty";
    case PoseCoordinate::Tz: return "tz";
    case PoseCoordinate::Roll: return "roll";
    case PoseCoordinate::Pitch: return "pitch";
    case PoseCoordinate::Yaw: return "yaw";
  }
  return "?";
}

bool is_angular(PoseCoordinate c) {
  return c == PoseCoordinate::Roll || c == PoseCoordinate::Pitch || c == PoseCoordinate::Yaw;
}

std::vector<double> coordinate_samples(const ParticleSet& p, PoseCoordinate c) {
  std::vector<double> out;
  out.reserve(p.size());
  for (const Pose& pose : p.poses) {
    switch (c) {
      case PoseCoordinate::Tx: out.push_back(pose.translation().x()); break;
      case PoseCoordinate::Ty: out.push_back(pose.translation().y()); break;
      case PoseCoordinate::Tz: out.push_back(pose.translation().z()); break;
      case PoseCoordinate::Roll: out.push_back(pose.euler().roll); break;
      case PoseCoordinate::Pitch: out.push_back(pose.euler().pitch); break;
      case PoseCoordinate::Yaw: out.push_back(pose.euler().yaw); break;
    }
  }
  return out;
}

EstimateResult estimate_distribution(const StructuredPointCloud& obj, const SceneField& scene,
                                     const ClassifierField& cls, const EstimateConfig& cfg) {
  using Clock = std::chrono::steady_clock;
  auto seconds_since = [](Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); };

  const LikelihoodModel model(obj, scene, cls, cfg.likelihood);
  if (scene.regular_count() == 0) {
    throw Error(ErrorCode::AllInfeasible, "scene has no Regular voxels to localize against");
  }
  EstimateResult res;

  std::optional<Pose> seed_pose;
  auto t0 = Clock::now();
  if (cfg.mle_init) {
    MleConfig mc = cfg.mle;
    mc.likelihood = cfg.likelihood;
    res.mle = mle_estimate(obj, scene, cls, mc);
    seed_pose = res.mle->pose;
  }
  res.timings.mle_seconds = seconds_since(t0);

  DeConfig de = cfg.de;
  if (de.lower == de.upper) {
    de.lower = scene.geometry().aabb_min();
    de.upper = scene.geometry().aabb_max();
  }
  if (cfg.restarts < 1) throw Error(ErrorCode::InvalidConfig, "restarts must be >= 1");
  t0 = Clock::now();
  for (int r = 0; r < cfg.restarts; ++r) {
    de.seed = splitmix(splitmix(cfg.seed) + static_cast<std::uint64_t>(r));
    DeResult run = de_sample([&](const Pose& p) { return model.objective(p); }, de, r == 0 ? seed_pose : std::nullopt);
    res.raw.poses.insert(res.raw.poses.end(), run.population.poses.begin(), run.population.poses.end());
  }
  res.timings.de_seconds = seconds_since(t0);

  t0 = Clock::now();
  res.raw.log_liks.resize(res.raw.size());
  parallel_for(res.raw.size(), [&](std::size_t i) { res.raw.log_liks[i] = model.log_likelihood(res.raw.poses[i]); });
  res.raw.weights = importance_weights(res.raw.log_liks);
  res.raw_ess = effective_sample_size(res.raw);
  const auto best = std::max_element(res.raw.log_liks.begin(), res.raw.log_liks.end(),
                                     [](const ExtendedReal& a, const ExtendedReal& b) { return a < b; });
  res.best_log_lik = *best;
  res.best_pose = res.raw.poses[static_cast<std::size_t>(std::distance(res.raw.log_liks.begin(), best))];
  res.particles = importance_resample(res.raw, cfg.particles, splitmix(cfg.seed ^ 0x5A));
  res.timings.resample_seconds = seconds_since(t0);

  t0 = Clock::now();
  for (PoseCoordinate c : kAllCoordinates) {
    const std::vector<double> s = coordinate_samples(res.particles, c);
    res.marginals.push_back(kde_marginal(s, coordinate_name(c), is_angular(c)));
  }
  res.timings.kde_seconds = seconds_since(t0);
  return res;
}

}  // namespace mfpose
