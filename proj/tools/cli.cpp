#include "cli.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>

#include <CLI11.hpp>

#include "mfpose/error.hpp"
#include "mfpose/io.hpp"
#include "mfpose/kde.hpp"
#include "mfpose/likelihood.hpp"
#include "mfpose/robust_mle.hpp"

namespace mfpose::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::string fmt(double v) {
  if (std::isinf(v)) return v < 0 ? "-inf" : "inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

json extended_to_json(const ExtendedReal& v) {
  if (v.is_neg_inf()) return "-inf";
  return v.value();
}

[[noreturn]] void bad_input(const std::string& msg) { throw Error(ErrorCode::InvalidConfig, msg); }

// ---------------------------------------------------------------------------
// Run configuration: CLI flags layered over an optional flat JSON file.

struct RunConfig {
  std::string subcommand;
  std::optional<std::string> object, scene, classifier, spec, out, pose, config;
  std::optional<double> beta, c_min, truncation, voxel_size;
  std::optional<long long> particles, seed, population, generations, restarts, top_k;
  std::optional<bool> mle_init;
};

template <typename T>
void take(std::optional<T>& field, const json& cfg, const char* key) {
  if (field || !cfg.contains(key)) return;
  try {
    field = cfg.at(key).get<T>();
  } catch (const json::exception&) {
    bad_input(std::string("config key '") + key + "' has the wrong type");
  }
}

void apply_config_file(RunConfig& rc) {
  if (!rc.config) return;
  const json cfg = read_json_file(*rc.config);
  if (!cfg.is_object()) bad_input("config file must hold a JSON object");
  static const std::set<std::string> known{"object",    "scene",      "classifier", "spec",        "out",
                                           "pose",      "beta",       "c_min",      "truncation",  "voxel_size",
                                           "particles", "seed",       "population", "generations", "restarts",
                                           "top_k",     "mle_init"};
  for (const auto& [key, value] : cfg.items()) {
    if (!known.count(key)) bad_input("unknown config key '" + key + "'");
  }
  take(rc.object, cfg, "object");
  take(rc.scene, cfg, "scene");
  take(rc.classifier, cfg, "classifier");
  take(rc.spec, cfg, "spec");
  take(rc.out, cfg, "out");
  take(rc.pose, cfg, "pose");
  take(rc.beta, cfg, "beta");
  take(rc.c_min, cfg, "c_min");
  take(rc.truncation, cfg, "truncation");
  take(rc.voxel_size, cfg, "voxel_size");
  take(rc.particles, cfg, "particles");
  take(rc.seed, cfg, "seed");
  take(rc.population, cfg, "population");
  take(rc.generations, cfg, "generations");
  take(rc.restarts, cfg, "restarts");
  take(rc.top_k, cfg, "top_k");
  take(rc.mle_init, cfg, "mle_init");
}

void validate(const RunConfig& rc) {
  const bool inputs = rc.object || rc.scene || rc.classifier;
  if (rc.subcommand == "synth") {
    if (!rc.spec) bad_input("synth requires --spec");
    if (inputs) bad_input("synth takes a spec, not input files");
  } else {
    if (rc.spec) bad_input(rc.subcommand + " takes input files, not a synth spec");
    if (!rc.object || !rc.scene || !rc.classifier) bad_input(rc.subcommand + " requires --object, --scene and --classifier");
  }
  if ((rc.subcommand == "synth" || rc.subcommand == "mle" || rc.subcommand == "estimate") && !rc.out) {
    bad_input(rc.subcommand + " requires --out");
  }
  if (rc.subcommand == "eval" && !rc.pose) bad_input("eval requires --pose");
  if (rc.particles && *rc.particles < 1) bad_input("particles must be >= 1");
  if (rc.seed && *rc.seed < 0) bad_input("seed must be >= 0");
  if (rc.restarts && *rc.restarts < 1) bad_input("restarts must be >= 1");
  if (rc.top_k && *rc.top_k < 1) bad_input("top_k must be >= 1");
  if (rc.population && *rc.population < 4) bad_input("population must be >= 4");
  if (rc.generations && *rc.generations < 0) bad_input("generations must be >= 0");
  if (rc.c_min && !(*rc.c_min < 0.0)) bad_input("c_min must be negative");
}

// ---------------------------------------------------------------------------
// Inputs and outputs

struct Inputs {
  StructuredPointCloud object;
  SceneField scene;
  ClassifierField classifier;
};

Inputs load_inputs(const RunConfig& rc) {
  Inputs in{load_object(*rc.object), load_scene(*rc.scene), load_classifier(*rc.classifier)};
  require_same_geometry(in.scene, in.classifier);
  if (rc.c_min) {
    // Re-floor the stored log-probabilities at the requested c_min.
    std::vector<double> v = in.classifier.values();
    for (double& x : v) x = std::max(x, *rc.c_min);
    in.classifier = ClassifierField(in.classifier.geometry(), *rc.c_min, std::move(v));
  }
  return in;
}

LikelihoodConfig likelihood_config(const RunConfig& rc) {
  LikelihoodConfig c;
  if (rc.beta) c.beta = *rc.beta;
  c.validate();
  return c;
}

MleConfig mle_config(const RunConfig& rc, const SceneField& scene) {
  MleConfig m;
  m.likelihood = likelihood_config(rc);
  if (rc.top_k) m.top_k = static_cast<int>(*rc.top_k);
  GncConfig g = default_gnc_config(scene.geometry().voxel_size);
  if (rc.truncation) g.truncation = *rc.truncation;
  g.validate();
  m.gnc = g;
  return m;
}

fs::path prepare_out_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw Error(ErrorCode::Io, "cannot create output directory " + dir);
  return dir;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::Io, "cannot open for writing: " + path.string());
  out << text;
  out.flush();
  if (!out) throw Error(ErrorCode::Io, "write failed: " + path.string());
}

json gnc_to_json(const GncResult& g) {
  json log = json::array();
  for (const auto& e : g.log) {
    log.push_back({{"stage", e.stage}, {"mu", e.mu}, {"objective", e.objective}, {"weight_change", e.weight_change}});
  }
  return {{"stages", g.stages}, {"converged", g.converged}, {"log", log}};
}

json mle_to_json(const MleResult& r, const ExtendedReal& loglik) {
  return {{"pose", pose_to_json(r.pose)},
          {"objective", r.objective},
          {"log_likelihood", extended_to_json(loglik)},
          {"kept_init", r.kept_init},
          {"gnc", gnc_to_json(r.gnc)}};
}

// ---------------------------------------------------------------------------
// Subcommands

int cmd_synth(const RunConfig& rc, std::ostream& out) {
  SynthSpec spec = synth_spec_from_json(read_json_file(*rc.spec));
  if (rc.seed) spec.seed = static_cast<std::uint64_t>(*rc.seed);
  if (rc.c_min) spec.c_min = *rc.c_min;
  if (rc.voxel_size) spec.voxel_size = *rc.voxel_size;
  const SynthInstance inst = generate(spec);

  const fs::path dir = prepare_out_dir(*rc.out);
  save_object(inst.object, dir / "object.spcl");
  save_scene(inst.scene, dir / "scene.svol");
  save_classifier(inst.classifier, dir / "classifier.pcls");
  json group = json::array();
  for (const Pose& g : inst.symmetry_group) group.push_back(pose_to_json(g));
  const json gt{{"gt_pose", pose_to_json(inst.gt_pose)},
                {"symmetry_group", group},
                {"voxel_size", spec.voxel_size},
                {"object_points", inst.object.size()},
                {"regular_voxels", inst.scene.regular_count()}};
  write_text(dir / "gt.json", gt.dump(2) + "\n");
  out << "wrote " << (dir / "object.spcl").string() << ", scene.svol, classifier.pcls, gt.json\n";
  return kOk;
}

int cmd_mle(const RunConfig& rc, std::ostream& out) {
  const Inputs in = load_inputs(rc);
  const MleConfig cfg = mle_config(rc, in.scene);
  const MleResult r = mle_estimate(in.object, in.scene, in.classifier, cfg);
  const ExtendedReal ll = object_log_likelihood(in.object, r.pose, in.scene, in.classifier, cfg.likelihood);
  const fs::path dir = prepare_out_dir(*rc.out);
  write_text(dir / "mle_pose.json", mle_to_json(r, ll).dump(2) + "\n");
  out << "objective " << fmt(r.objective) << "\n";
  return kOk;
}

json coordinate_summary(const std::vector<double>& s, bool angular) {
  json j{{"mean", mean(s)}, {"std", stddev(s)}};
  if (angular) {
    const double cs = circular_std(s);
    j["circular_mean"] = circular_mean(s);
    j["circular_std"] = std::isinf(cs) ? json("inf") : json(cs);
    j["circular_std_deg"] = std::isinf(cs) ? json("inf") : json(cs * 180.0 / std::numbers::pi);
  }
  return j;
}

int cmd_estimate(const RunConfig& rc, std::ostream& out) {
  using Clock = std::chrono::steady_clock;
  const auto t0 = Clock::now();
  const Inputs in = load_inputs(rc);
  const double load_seconds = std::chrono::duration<double>(Clock::now() - t0).count();

  EstimateConfig cfg;
  cfg.likelihood = likelihood_config(rc);
  cfg.mle = mle_config(rc, in.scene);
  if (rc.mle_init) cfg.mle_init = *rc.mle_init;
  if (rc.particles) cfg.particles = static_cast<std::size_t>(*rc.particles);
  if (rc.seed) cfg.seed = static_cast<std::uint64_t>(*rc.seed);
  if (rc.population) cfg.de.population_size = static_cast<int>(*rc.population);
  if (rc.generations) cfg.de.generations = static_cast<int>(*rc.generations);
  if (rc.restarts) cfg.restarts = static_cast<int>(*rc.restarts);

  const EstimateResult r = estimate_distribution(in.object, in.scene, in.classifier, cfg);

  const auto t_write = Clock::now();
  const fs::path dir = prepare_out_dir(*rc.out);
  std::string lines;
  for (std::size_t i = 0; i < r.particles.size(); ++i) {
    json p = pose_to_json(r.particles.poses[i]);
    p["loglik"] = extended_to_json(r.particles.log_liks[i]);
    p["weight"] = r.particles.weights[i];
    lines += p.dump() + "\n";
  }
  write_text(dir / "particles.jsonl", lines);

  for (const MarginalDensity& m : r.marginals) {
    std::string csv = "value,density\n";
    for (std::size_t g = 0; g < m.grid.size(); ++g) csv += fmt(m.grid[g]) + "," + fmt(m.density[g]) + "\n";
    write_text(dir / ("marginal_" + m.coordinate + ".csv"), csv);
  }

  json coords = json::object();
  for (PoseCoordinate c : kAllCoordinates) {
    json s = coordinate_summary(coordinate_samples(r.particles, c), is_angular(c));
    for (const MarginalDensity& m : r.marginals) {
      if (m.coordinate == coordinate_name(c)) s["bandwidth"] = m.bandwidth;
    }
    coords[coordinate_name(c)] = s;
  }
  const double write_seconds = std::chrono::duration<double>(Clock::now() - t_write).count();
  json summary{{"particles", r.particles.size()},
               {"raw_particles", r.raw.size()},
               {"ess", r.raw_ess},
               {"best_log_lik", extended_to_json(r.best_log_lik)},
               {"best_pose", pose_to_json(r.best_pose)},
               {"yaw_ks_uniform", ks_uniform_circle(coordinate_samples(r.particles, PoseCoordinate::Yaw))},
               {"coordinates", coords},
               {"timings",
                {{"load_seconds", load_seconds},
                 {"mle_seconds", r.timings.mle_seconds},
                 {"de_seconds", r.timings.de_seconds},
                 {"resample_seconds", r.timings.resample_seconds},
                 {"kde_seconds", r.timings.kde_seconds},
                 {"write_seconds", write_seconds},
                 {"total_seconds", std::chrono::duration<double>(Clock::now() - t0).count()}}}};
  if (r.mle) {
    summary["mle"] = {{"pose", pose_to_json(r.mle->pose)}, {"objective", r.mle->objective}, {"kept_init", r.mle->kept_init}};
  }
  write_text(dir / "summary.json", summary.dump(2) + "\n");
  out << "wrote " << r.particles.size() << " particles to " << (dir / "particles.jsonl").string() << "\n";
  return kOk;
}

int cmd_eval(const RunConfig& rc, std::ostream& out) {
  const Inputs in = load_inputs(rc);
  const Pose pose = pose_from_json(read_json_file(*rc.pose));
  const ExtendedReal ll = object_log_likelihood(in.object, pose, in.scene, in.classifier, likelihood_config(rc));
  out << (ll.is_neg_inf() ? std::string("-inf") : fmt(ll.value())) << "\n";
  return kOk;
}

// ---------------------------------------------------------------------------
// JSON helpers

double number(const json& j, const char* key) {
  if (!j.contains(key)) throw Error(ErrorCode::InvalidValue, std::string("missing key '") + key + "'");
  if (!j.at(key).is_number()) throw Error(ErrorCode::InvalidValue, std::string("key '") + key + "' must be a number");
  return j.at(key).get<double>();
}

double number_or(const json& j, const char* key, double fallback) { return j.contains(key) ? number(j, key) : fallback; }

Vec3 vec3(const json& j) {
  if (!j.is_array() || j.size() != 3) throw Error(ErrorCode::InvalidSpec, "expected a 3-element array");
  Vec3 v;
  for (int a = 0; a < 3; ++a) {
    if (!j[a].is_number()) throw Error(ErrorCode::InvalidSpec, "expected numbers");
    v[a] = j[a].get<double>();
  }
  return v;
}

// strtod rather than stod: density tails may be subnormal.
double parse_double(const std::string& s) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size()) throw Error(ErrorCode::InvalidValue, "bad number '" + s + "'");
  return v;
}

}  // namespace

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::Io: return kIoFailure;
    case ErrorCode::NoCorrespondences: return kNoCorrespondences;
    case ErrorCode::AllInfeasible: return kAllInfeasible;
    default: return kBadInput;
  }
}

json pose_to_json(const Pose& pose) {
  const auto& q = pose.rotation();
  const Vec3& t = pose.translation();
  return {{"qw", q.w()}, {"qx", q.x()}, {"qy", q.y()}, {"qz", q.z()}, {"tx", t.x()}, {"ty", t.y()}, {"tz", t.z()}};
}

Pose pose_from_json(const json& j) {
  if (!j.is_object()) throw Error(ErrorCode::InvalidValue, "pose must be a JSON object");
  if (j.contains("pose")) return pose_from_json(j.at("pose"));
  if (j.contains("gt_pose")) return pose_from_json(j.at("gt_pose"));
  const Vec3 t(number_or(j, "tx", 0.0), number_or(j, "ty", 0.0), number_or(j, "tz", 0.0));
  if (j.contains("qw") || j.contains("qx") || j.contains("qy") || j.contains("qz")) {
    const Eigen::Quaterniond q(number(j, "qw"), number(j, "qx"), number(j, "qy"), number(j, "qz"));
    if (!q.coeffs().allFinite() || !t.allFinite()) throw Error(ErrorCode::NonFiniteValue, "pose has non-finite values");
    return Pose(q, t);
  }
  const EulerAngles e{number_or(j, "roll", 0.0), number_or(j, "pitch", 0.0), number_or(j, "yaw", 0.0)};
  if (!std::isfinite(e.roll) || !std::isfinite(e.pitch) || !std::isfinite(e.yaw) || !t.allFinite()) {
    throw Error(ErrorCode::NonFiniteValue, "pose has non-finite values");
  }
  return Pose::from_euler(e, t);
}

SynthSpec synth_spec_from_json(const json& j) {
  if (!j.is_object()) throw Error(ErrorCode::InvalidSpec, "spec must be a JSON object");
  SynthSpec s;
  if (j.contains("preset")) {
    const json& p = j.at("preset");
    if (p == "mug") {
      s = mug_spec();
    } else if (p == "unique_box") {
      s = unique_box_spec();
    } else if (p == "four_fold_box") {
      s = four_fold_box_spec();
    } else {
      throw Error(ErrorCode::InvalidSpec, "unknown preset " + p.dump());
    }
  }
  try {
    for (const auto& [key, v] : j.items()) {
      if (key == "preset") {
        continue;
      } else if (key == "kind") {
        const std::string k = v.get<std::string>();
        if (k == "cylinder_with_handle") {
          s.kind = ObjectKind::CylinderWithHandle;
        } else if (k == "box") {
          s.kind = ObjectKind::Box;
        } else if (k == "custom") {
          s.kind = ObjectKind::Custom;
        } else {
          throw Error(ErrorCode::InvalidSpec, "unknown object kind '" + k + "'");
        }
      } else if (key == "symmetry_order") {
        s.symmetry_order = v.get<int>();
      } else if (key == "textureless") {
        s.textureless = v.get<bool>();
      } else if (key == "descriptor_dim") {
        s.descriptor_dim = v.get<int>();
      } else if (key == "descriptor_noise") {
        s.descriptor_noise = v.get<double>();
      } else if (key == "occlusion_box") {
        s.occlusion_box = v.is_null() ? std::nullopt : std::optional<Aabb>(Aabb{vec3(v.at("min")), vec3(v.at("max"))});
      } else if (key == "occlusion_half_space") {
        s.occlusion_half_space = v.is_null() ? std::nullopt
                                             : std::optional<HalfSpace>(HalfSpace{vec3(v.at("normal")), v.at("offset").get<double>()});
      } else if (key == "clutter_points") {
        s.clutter_points = v.get<int>();
      } else if (key == "voxel_size") {
        s.voxel_size = v.get<double>();
      } else if (key == "gt_pose") {
        s.gt_pose = pose_from_json(v);
      } else if (key == "seed") {
        s.seed = v.get<std::uint64_t>();
      } else if (key == "cylinder_radius") {
        s.cylinder_radius = v.get<double>();
      } else if (key == "cylinder_height") {
        s.cylinder_height = v.get<int>();
      } else if (key == "handle") {
        s.handle = v.get<bool>();
      } else if (key == "band_half_width") {
        s.band_half_width = v.get<double>();
      } else if (key == "box_half_extent") {
        s.box_half_extent = v.get<std::array<int, 3>>();
      } else if (key == "custom_points") {
        if (!v.is_array()) throw Error(ErrorCode::InvalidSpec, "custom_points must be an array");
        s.custom_points.resize(3, static_cast<Eigen::Index>(v.size()));
        for (std::size_t i = 0; i < v.size(); ++i) s.custom_points.col(static_cast<Eigen::Index>(i)) = vec3(v[i]);
      } else if (key == "best_buddy_threshold") {
        s.best_buddy_threshold = v.get<double>();
      } else if (key == "c_min") {
        s.c_min = v.get<double>();
      } else {
        throw Error(ErrorCode::InvalidSpec, "unknown spec key '" + key + "'");
      }
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidSpec, std::string("ill-typed spec value: ") + e.what());
  } catch (const Error& e) {
    if (e.code() == ErrorCode::InvalidSpec) throw;
    throw Error(ErrorCode::InvalidSpec, e.what());
  }
  s.validate();
  return s;
}

json read_json_file(const fs::path& path) {
  const Bytes bytes = read_file(path);
  json j = json::parse(bytes.begin(), bytes.end(), nullptr, false);
  if (j.is_discarded()) throw Error(ErrorCode::InvalidValue, "malformed JSON in " + path.string());
  return j;
}

std::vector<ParticleRecord> read_particles_jsonl(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  std::vector<ParticleRecord> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const json j = json::parse(line, nullptr, false);
    if (j.is_discarded()) throw Error(ErrorCode::InvalidValue, "malformed particle line");
    ParticleRecord r{pose_from_json(j), 0.0, number(j, "weight")};
    const json& ll = j.at("loglik");
    r.loglik = ll.is_string() ? -std::numeric_limits<double>::infinity() : ll.get<double>();
    out.push_back(r);
  }
  return out;
}

MarginalTable read_marginal_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line) || line != "value,density") throw Error(ErrorCode::InvalidValue, "bad marginal header");
  MarginalTable t;
  while (std::getline(in, line)) {
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw Error(ErrorCode::InvalidValue, "bad marginal row");
    t.value.push_back(parse_double(line.substr(0, comma)));
    t.density.push_back(parse_double(line.substr(comma + 1)));
  }
  return t;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Probabilistic 6DOF pose estimation from structured pointclouds", "mfpose"};
  app.require_subcommand(1);
  RunConfig rc;

  auto add_common = [&](CLI::App* sub, bool synth) {
    sub->add_option("--config", rc.config, "flat JSON config; flags override its keys");
    sub->add_option("--out", rc.out, "output directory");
    sub->add_option("--seed", rc.seed, "random seed");
    sub->add_option("--c-min", rc.c_min, "log-probability floor");
    if (synth) {
      sub->add_option("--spec", rc.spec, "synthetic instance spec (JSON)");
      sub->add_option("--voxel-size", rc.voxel_size, "voxel edge length");
      // Accepted so that the "exactly one input source" rule can be reported.
      sub->add_option("--object", rc.object);
      sub->add_option("--scene", rc.scene);
      sub->add_option("--classifier", rc.classifier);
      return;
    }
    sub->add_option("--object", rc.object, "object pointcloud (SPCL)");
    sub->add_option("--scene", rc.scene, "scene volume (SVOL)");
    sub->add_option("--classifier", rc.classifier, "classifier volume (PCLS)");
    sub->add_option("--spec", rc.spec);
    sub->add_option("--beta", rc.beta, "similarity temperature");
  };

  CLI::App* synth = app.add_subcommand("synth", "generate a synthetic instance");
  add_common(synth, true);
  CLI::App* mle = app.add_subcommand("mle", "robust maximum-likelihood pose");
  add_common(mle, false);
  mle->add_option("--top-k", rc.top_k, "candidates per object point");
  mle->add_option("--truncation", rc.truncation, "TLS threshold (length)");
  CLI::App* estimate = app.add_subcommand("estimate", "sample the pose distribution");
  add_common(estimate, false);
  estimate->add_option("--particles", rc.particles, "resampled particle count");
  estimate->add_option("--population", rc.population, "DE population size");
  estimate->add_option("--generations", rc.generations, "DE generations per run");
  estimate->add_option("--restarts", rc.restarts, "independent DE runs");
  estimate->add_option("--top-k", rc.top_k, "candidates per object point");
  estimate->add_option("--truncation", rc.truncation, "TLS threshold (length)");
  estimate->add_option("--mle-init", rc.mle_init, "seed DE with the MLE pose (true/false)");
  CLI::App* eval = app.add_subcommand("eval", "print the log-likelihood of a pose");
  add_common(eval, false);
  eval->add_option("--pose", rc.pose, "pose JSON");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    std::ostringstream o, x;
    const int code = app.exit(e, o, x);
    out << o.str();
    err << x.str();
    return code == 0 ? kOk : kBadInput;
  }

  try {
    rc.subcommand = app.get_subcommands().front()->get_name();
    apply_config_file(rc);
    validate(rc);
    if (rc.subcommand == "synth") return cmd_synth(rc, out);
    if (rc.subcommand == "mle") return cmd_mle(rc, out);
    if (rc.subcommand == "estimate") return cmd_estimate(rc, out);
    return cmd_eval(rc, out);
  } catch (const Error& e) {
    err << "error [" << to_string(e.code()) << "]: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const json::exception& e) {
    err << "error: " << e.what() << "\n";
    return kBadInput;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kIoFailure;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kInternal;
  }
}

}  // namespace mfpose::cli
