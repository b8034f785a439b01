// File formats: record CSV + JSON sidecar, state dumps, rates tables.
//
// Record CSV header is `t,I,dW1` (single) or `t,I,Q,dW1,dW2` (I/Q); values
// are written with enough digits to round-trip bit-exactly. The sidecar
// carries the full simulation config and a git-style SHA-1 of the CSV bytes
// so estimator inputs can be checked against simulator outputs.

#pragma once

#include <string>

#include <json.hpp>

#include "cqed/trajectory.hpp"

namespace cqed {

std::string sha1_hex(const std::string& bytes);
// sha1 over "blob <len>\0<bytes>", as git computes object ids
std::string git_blob_sha1(const std::string& bytes);

std::string record_to_csv(const TrajectoryRecord& rec);
TrajectoryRecord record_from_csv(const std::string& csv);

void write_record(const std::string& csv_path, const TrajectoryRecord& rec,
                  const SimConfig& cfg);  // writes csv + <path>.json sidecar
TrajectoryRecord read_record(const std::string& csv_path);

nlohmann::json sim_config_to_json(const SimConfig& cfg);
SimConfig sim_config_from_json(const nlohmann::json& j);
SimConfig load_sim_config(const std::string& path);

// {nmax, ordering:"qubit_major", re:[...], im:[...]}
nlohmann::json state_dump(const JointState& state);
JointState state_from_dump(const nlohmann::json& j);

// t, Re/Im alpha_g, Re/Im alpha_e, B, Gamma_d, Gamma_ci, Gamma_ba, Gamma_m,
// D_overlap, D_integral on a uniform grid; the header documents the
// theta_beta sign convention.
std::string rates_csv(const ModelParams& p, Complex alpha0, double t_end,
                      double dt);

void write_text(const std::string& path, const std::string& content);
std::string read_text(const std::string& path);

}  // namespace cqed
