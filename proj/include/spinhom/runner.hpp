#pragma once

#include <functional>
#include <string>

#include "spinhom/config.hpp"
#include "spinhom/continuum.hpp"

namespace spinhom {

inline constexpr const char* kToolVersion = "spinhom 0.1.0";

// Runs n independent jobs on `jobs` workers (0 = hardware concurrency).
// Results must be written into per-index slots by the callable.
void parallel_for(size_t n, int jobs, const std::function<void(size_t)>& fn);

// Executes the configured experiment and writes its artifacts into
// cfg.out_dir: deterministic data files (results.csv / gamma.csv /
// phi_table.csv / summary.json) plus manifest.json, the only file carrying
// wall-clock information.
void run_experiment(const RunConfig& cfg);

// Prints and returns the admissibility report of a lattice file.
AdmissibilityReport audit_lattice_file(const std::string& path, std::string* json_out = nullptr);

}  // namespace spinhom
