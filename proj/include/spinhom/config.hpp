#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "spinhom/cellproblem.hpp"

namespace spinhom {

// Bad user input (config or CLI); mapped to exit code 2.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Parses the TOML subset used by run configs (tables, key = value, strings,
// numbers, booleans, one-line arrays, # comments) into a JSON tree.
nlohmann::json parse_toml_lite(const std::string& text);

enum class ExperimentType { phi, sweep, translation, subadd, gamma, lattice_audit };

struct RunConfig {
  ExperimentType type = ExperimentType::phi;

  LatticeParams lattice;
  std::vector<uint64_t> seeds;
  Box gen_box;           // lattice-audit only
  bool has_gen_box = false;

  CouplingModel model;

  Vec nu{0.0, 1.0};            // first direction (single-direction experiments)
  std::vector<Vec> nu_list{Vec(0.0, 1.0)};  // phi runs over all of these
  std::vector<double> t_list;
  Vec center;
  double l_override = 0.0;  // 0 = schedule
  int directions = 0;       // sweep

  std::vector<Vec> offsets;  // translation
  double K = 0.0;            // subadd

  std::vector<double> eps_list;  // gamma
  double domain_side = 1.0;
  std::string phi_source = "auto";  // "auto" or a phi-table csv path

  std::string out_dir = "out";
  int jobs = 0;  // 0 = hardware concurrency
  bool quiet = false;

  std::string raw_text;  // config echo for the manifest
};

// Strict schema: unknown keys anywhere are errors; cross-field constraints
// (boundary widths, schedules) are checked here, before any computation.
RunConfig load_run_config(const std::string& path);
RunConfig run_config_from_text(const std::string& text);

}  // namespace spinhom
