#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "loggas/config.hpp"

namespace loggas {

/// Parsed experiment description. One flat structure covers all commands;
/// parse_config validates the keys, fills defaults and rejects unknown keys.
struct ExperimentConfig {
  std::string command;

  // ensemble
  std::int64_t n = 16;
  double beta = 2.0;

  // run control
  std::uint64_t seed = 1;
  int workers = 1;
  std::string out = "runs";

  // sampling
  std::int64_t samples = 1000;  // per chain
  int chains = 4;
  std::int64_t burn_in_sweeps = -1;
  std::int64_t thin_sweeps = -1;

  // geometry
  double inner_lo = -1.0;
  double inner_hi = 1.0;
  double outer_radius = -1.0;

  // command-specific knobs
  std::string input;                    // resample: JSONL of configurations
  std::int64_t kernel_steps = 0;        // <=0: default 200 * count
  int k_inner = 4;                      // verify-dlr
  std::int64_t instances = 1000;        // verify-identity
  std::int64_t max_points = 5;          // verify-identity interior cap
  double identity_tol = 1e-9;           // verify-identity
  std::vector<std::vector<double>> cases;  // partition: [n, beta] pairs
  std::int64_t grid = 0;                // partition quadrature grid override
  double partition_rel_tol = 1e-3;      // partition
  std::vector<double> window_lengths;   // stats-discrepancy centered windows
  std::vector<double> scales;           // stats-rigidity
  std::vector<double> radii;            // truncation
  std::int64_t trial_count = 8;         // truncation
  double delta = 0.1;                   // truncation
  double intensity = 1.0;               // stats-campbell reference process
  double domain_radius = 10.0;          // stats-campbell / control domain
  double se_multiplier = 3.0;           // statistical gates, two-sided

  std::string canonical;  // canonical JSON (sorted keys) used for hashing
};

/// Parses and validates a JSON config. Unknown keys are rejected by name.
/// Throws ParseError for malformed JSON, ValidationError otherwise.
ExperimentConfig parse_config(const std::string& text);

/// parse_config plus "flags win": overrides applied after parsing, then
/// revalidated and re-canonicalized.
struct ConfigOverrides {
  bool has_seed = false;
  std::uint64_t seed = 0;
  bool has_workers = false;
  int workers = 0;
  bool has_out = false;
  std::string out;
  bool has_n = false;
  std::int64_t n = 0;
  bool has_beta = false;
  double beta = 0.0;
};
ExperimentConfig apply_overrides(ExperimentConfig cfg, const ConfigOverrides& ov);

/// 16-hex-digit FNV-1a hash of the canonical config with the "out" key
/// removed, so the same experiment gets the same run id anywhere.
std::string config_hash(const ExperimentConfig& cfg);

/// Runs the configured command. Writes <out>/run-<hash>/results.csv,
/// manifest.json and any JSONL artifacts; logs one line per check.
/// Returns 0 iff every check passed.
int execute(const ExperimentConfig& cfg, std::ostream& log);

}  // namespace loggas
