#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "mfpose/error.hpp"
#include "mfpose/sampler.hpp"
#include "mfpose/se3.hpp"
#include "mfpose/synth.hpp"

namespace mfpose::cli {

enum ExitCode : int {
  kOk = 0,
  kInternal = 1,
  kBadInput = 2,
  kIoFailure = 3,
  kNoCorrespondences = 4,
  kAllInfeasible = 5,
};

/// Runs one subcommand (synth, mle, estimate, eval) as the executable would.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int exit_code_for(ErrorCode code);

// Serialization shared by the subcommands and their tests.
nlohmann::json pose_to_json(const Pose& pose);
/// Accepts {qw,qx,qy,qz,tx,ty,tz} or {roll,pitch,yaw,tx,ty,tz}, optionally
/// wrapped as {"pose": ...} or {"gt_pose": ...}.
Pose pose_from_json(const nlohmann::json& j);
/// Throws InvalidSpec on unknown keys or ill-typed values. A "preset" key
/// ("mug", "unique_box", "four_fold_box") selects the starting spec.
SynthSpec synth_spec_from_json(const nlohmann::json& j);
nlohmann::json read_json_file(const std::filesystem::path& path);

struct ParticleRecord {
  Pose pose;
  double loglik = 0.0;
  double weight = 0.0;
};
std::vector<ParticleRecord> read_particles_jsonl(const std::filesystem::path& path);

struct MarginalTable {
  std::vector<double> value;
  std::vector<double> density;
};
MarginalTable read_marginal_csv(const std::filesystem::path& path);

}  // namespace mfpose::cli
