#include <iostream>

#include "CLI11.hpp"
#include "spinhom/io.hpp"
#include "spinhom/runner.hpp"

using namespace spinhom;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

int cmd_run(const std::string& config_path, int jobs, const std::string& out_dir, bool quiet,
            int64_t seed, bool has_seed) {
  RunConfig cfg;
  try {
    cfg = load_run_config(config_path);
    if (jobs > 0) cfg.jobs = jobs;
    if (!out_dir.empty()) cfg.out_dir = out_dir;
    if (quiet) cfg.quiet = true;
    if (has_seed) cfg.seeds = {static_cast<uint64_t>(seed)};
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  }
  try {
    run_experiment(cfg);
  } catch (const std::exception& e) {
    std::cerr << "runtime error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitOk;
}

int cmd_audit(const std::string& lattice_path) {
  try {
    std::string json;
    AdmissibilityReport rep = audit_lattice_file(lattice_path, &json);
    std::cout << json;
    std::cerr << "r_min=" << fmt_double(rep.r_min) << " R_cover=" << fmt_double(rep.R_cover)
              << " resolution=" << fmt_double(rep.probe_resolution) << " "
              << (rep.pass ? "PASS" : "FAIL") << "\n";
    return kExitOk;
  } catch (const std::exception& e) {
    std::cerr << "audit error: " << e.what() << "\n";
    return kExitConfig;
  }
}

int cmd_gen(const std::string& model, int dim, double lo, double hi, double a, double diameter,
            int defects, uint64_t seed, const std::string& out_path, bool quiet) {
  try {
    LatticeParams lat;
    lat.model = model;
    lat.dim = dim;
    lat.a = a;
    lat.diameter = diameter;
    lat.defects = defects;
    Box box;
    box.dim = dim;
    for (int k = 0; k < dim; ++k) {
      box.lo[k] = lo;
      box.hi[k] = hi;
    }
    PointSet ps = make_lattice(lat, box, seed);
    write_lattice_file(ps, out_path);
    if (!quiet)
      std::cerr << "wrote " << ps.points.size() << " points to " << out_path << "\n";
    return kExitOk;
  } catch (const std::invalid_argument& e) {
    std::cerr << "gen error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "gen error: " << e.what() << "\n";
    return kExitRuntime;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"spinhom: surface tension of spin systems on stochastic lattices"};
  app.require_subcommand(1);

  std::string config_path, out_dir, lattice_path;
  int jobs = 0;
  bool quiet = false;
  int64_t seed = 0;
  bool has_seed = false;

  auto* run = app.add_subcommand("run", "run an experiment from a config file");
  run->add_option("config", config_path, "config file")->required();
  run->add_option("--jobs", jobs, "worker threads (0 = hardware)");
  run->add_option("--out-dir", out_dir, "output directory override");
  run->add_flag("--quiet", quiet, "suppress progress output");
  auto* seed_opt = run->add_option("--seed", seed, "replace the config's seed list by one seed");

  auto* audit = app.add_subcommand("audit", "admissibility report for a lattice file");
  audit->add_option("lattice", lattice_path, "lattice JSON file")->required();

  std::string gen_model = "square", gen_out = "lattice.json";
  int gen_dim = 2, gen_defects = 0;
  double gen_lo = 0.0, gen_hi = 16.0, gen_a = 0.25, gen_diameter = 1.0;
  uint64_t gen_seed = 1;
  auto* gen = app.add_subcommand("gen", "generate a lattice file");
  gen->add_option("model", gen_model, "square | triangular | perturbed | parking")->required();
  gen->add_option("--dim", gen_dim, "dimension (2 or 3)");
  gen->add_option("--lo", gen_lo, "box lower corner (all axes)");
  gen->add_option("--hi", gen_hi, "box upper corner (all axes)");
  gen->add_option("--a", gen_a, "perturbation amplitude");
  gen->add_option("--diameter", gen_diameter, "parking diameter");
  gen->add_option("--defects", gen_defects, "points to delete");
  gen->add_option("--seed", gen_seed, "generator seed");
  gen->add_option("-o,--out", gen_out, "output path");
  gen->add_flag("--quiet", quiet, "suppress progress output");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  has_seed = seed_opt->count() > 0;
  if (run->parsed()) return cmd_run(config_path, jobs, out_dir, quiet, seed, has_seed);
  if (audit->parsed()) return cmd_audit(lattice_path);
  if (gen->parsed())
    return cmd_gen(gen_model, gen_dim, gen_lo, gen_hi, gen_a, gen_diameter, gen_defects, gen_seed,
                   gen_out, quiet);
  return kExitConfig;
}
