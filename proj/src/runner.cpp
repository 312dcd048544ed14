#include "spinhom/runner.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

#include "spinhom/io.hpp"
#include "spinhom/rng.hpp"

namespace spinhom {

void parallel_for(size_t n, int jobs, const std::function<void(size_t)>& fn) {
  unsigned workers = jobs > 0 ? static_cast<unsigned>(jobs) : std::thread::hardware_concurrency();
  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(n ? n : 1)));
  if (workers == 1) {
    for (size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<size_t> next{0};
  std::vector<std::thread> pool;
  std::exception_ptr error;
  std::mutex error_mx;
  for (unsigned w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (;;) {
        size_t i = next.fetch_add(1);
        if (i >= n) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mx);
          if (!error) error = std::current_exception();
        }
      }
    });
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

namespace {

namespace fs = std::filesystem;

struct Progress {
  bool quiet;
  void note(const std::string& msg) const {
    if (!quiet) std::cerr << msg << "\n";
  }
};

nlohmann::json model_echo(const CouplingModel& m) {
  nlohmann::json c_lr;
  switch (m.family) {
    case LrKernel::zero:
      c_lr = {{"family", "zero"}};
      break;
    case LrKernel::power:
      c_lr = {{"family", "power"}, {"beta", m.beta}, {"p", m.p}};
      break;
    case LrKernel::exponential:
      c_lr = {{"family", "exp"}, {"beta", m.beta}, {"lambda", m.lambda}};
      break;
  }
  return {{"c_nn", {{"const", m.nn_const}}}, {"c_lr", c_lr}, {"L", m.L}};
}

void write_manifest(const RunConfig& cfg, double wall_s, const nlohmann::json& timings) {
  nlohmann::json man = {
      {"tool", kToolVersion},
      {"convention", kPairConvention},
      {"rng", kRngName},
      {"wall_seconds", wall_s},
      {"timings_ms", timings},
      {"config_echo", cfg.raw_text},
  };
  write_text_file((fs::path(cfg.out_dir) / "manifest.json").string(), man.dump(1) + "\n");
}

std::string csv_direction_header(int dim) {
  return dim == 3 ? "nu_idx,nu_x,nu_y,nu_z,t,seed,mu,mu_norm,n_free,n_frozen"
                  : "nu_idx,nu_x,nu_y,t,seed,mu,mu_norm,n_free,n_frozen";
}

void append_samples_csv(std::ostringstream& csv, int nu_idx, const PhiEstimate& est, int dim) {
  for (const PhiSample& s : est.samples) {
    if (s.failed) {
      csv << nu_idx << "," << fmt_double(est.nu[0]) << "," << fmt_double(est.nu[1]);
      if (dim == 3) csv << "," << fmt_double(est.nu[2]);
      csv << "," << fmt_double(s.t) << "," << s.seed << ",failed,failed,0,0\n";
      continue;
    }
    csv << nu_idx << "," << fmt_double(est.nu[0]) << "," << fmt_double(est.nu[1]);
    if (dim == 3) csv << "," << fmt_double(est.nu[2]);
    csv << "," << fmt_double(s.t) << "," << s.seed << "," << fmt_double(s.mu) << ","
        << fmt_double(s.mu_norm) << "," << s.n_free << "," << s.n_frozen << "\n";
  }
}

nlohmann::json estimate_summary(const PhiEstimate& est, int dim) {
  nlohmann::json per_t = nlohmann::json::array();
  for (const auto& st : est.per_t)
    per_t.push_back({{"t", st.t}, {"mean", st.mean}, {"sd", st.sd}, {"n", st.n}});
  nlohmann::json nu = nlohmann::json::array({est.nu[0], est.nu[1]});
  if (dim == 3) nu.push_back(est.nu[2]);
  nlohmann::json j = {
      {"nu", nu},
      {"per_t", per_t},
      {"extrapolated", est.extrapolated},
      {"convention", est.convention},
  };
  if (est.fit_valid)
    j["fit"] = {{"phi", est.fit_phi}, {"coeff", est.fit_coeff}, {"residual", est.fit_residual}};
  int failures = 0;
  for (const auto& s : est.samples) failures += s.failed ? 1 : 0;
  j["failed_samples"] = failures;
  return j;
}

nlohmann::json sample_timings(const PhiEstimate& est) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& s : est.samples)
    arr.push_back({{"t", s.t}, {"seed", s.seed}, {"solve_ms", s.solve_ms}});
  return arr;
}

void run_phi(const RunConfig& cfg, const Progress& log) {
  // Samples run concurrently; aggregation below is in deterministic order.
  struct Key {
    size_t nu_idx;
    double t;
    uint64_t seed;
  };
  std::vector<Key> keys;
  for (size_t d = 0; d < cfg.nu_list.size(); ++d)
    for (double t : cfg.t_list)
      for (uint64_t seed : cfg.seeds) keys.push_back({d, t, seed});
  std::vector<PhiSample> slots(keys.size());
  parallel_for(keys.size(), cfg.jobs, [&](size_t i) {
    const Key& k = keys[i];
    PhiSample s;
    s.t = k.t;
    s.seed = k.seed;
    try {
      CellProblemSpec spec;
      spec.nu = cfg.nu_list[k.nu_idx];
      spec.center = cfg.center;
      spec.t = k.t;
      spec.l = cfg.l_override;
      spec.lattice = cfg.lattice;
      spec.seed = k.seed;
      spec.model = cfg.model;
      MuResult r = mu(spec);
      s.mu = r.mu;
      s.mu_norm = r.mu_norm;
      s.n_free = r.n_free;
      s.n_frozen = r.n_frozen;
      s.solve_ms = r.solve_ms;
    } catch (const std::exception& e) {
      s.failed = true;
      s.error = e.what();
      log.note(std::string("sample failed: ") + e.what());
    }
    slots[i] = std::move(s);
  });

  std::vector<PhiEstimate> ests;
  for (size_t d = 0; d < cfg.nu_list.size(); ++d) {
    std::vector<PhiSample> samples;
    for (size_t i = 0; i < keys.size(); ++i)
      if (keys[i].nu_idx == d) samples.push_back(slots[i]);
    ests.push_back(phi_estimate_from_samples(cfg.nu_list[d], std::move(samples), cfg.t_list));
  }

  std::ostringstream csv;
  csv << csv_direction_header(cfg.lattice.dim) << "\n";
  for (size_t d = 0; d < ests.size(); ++d)
    append_samples_csv(csv, static_cast<int>(d), ests[d], cfg.lattice.dim);
  write_text_file((fs::path(cfg.out_dir) / "results.csv").string(), csv.str());

  nlohmann::json dirs = nlohmann::json::array();
  nlohmann::json timings = nlohmann::json::array();
  for (const auto& e : ests) {
    dirs.push_back(estimate_summary(e, cfg.lattice.dim));
    timings.push_back(sample_timings(e));
  }
  nlohmann::json summary = {
      {"experiment", "phi"},
      {"tool", kToolVersion},
      {"model", model_echo(cfg.model)},
      {"convention", kPairConvention},
      {"directions", dirs},
  };
  write_text_file((fs::path(cfg.out_dir) / "summary.json").string(), summary.dump(1) + "\n");
  write_manifest(cfg, 0.0, timings);
}

void run_sweep(const RunConfig& cfg, const Progress& log) {
  int k = cfg.directions;
  std::vector<PhiEstimate> ests(static_cast<size_t>(k));
  std::vector<double> angles(static_cast<size_t>(k));
  parallel_for(static_cast<size_t>(k), cfg.jobs, [&](size_t i) {
    double ang = M_PI * static_cast<double>(i) / static_cast<double>(k);
    angles[i] = ang;
    ests[i] = estimate_phi(Vec(std::cos(ang), std::sin(ang)), cfg.t_list, cfg.seeds, cfg.model,
                           cfg.lattice);
    log.note("direction " + std::to_string(i + 1) + "/" + std::to_string(k) + " done");
  });

  std::ostringstream csv;
  csv << csv_direction_header(cfg.lattice.dim) << "\n";
  for (int i = 0; i < k; ++i) append_samples_csv(csv, i, ests[static_cast<size_t>(i)], cfg.lattice.dim);
  write_text_file((fs::path(cfg.out_dir) / "results.csv").string(), csv.str());

  double mx = -std::numeric_limits<double>::infinity(), mn = std::numeric_limits<double>::infinity(),
         sum = 0.0;
  std::vector<double> phis;
  for (const auto& e : ests) {
    mx = std::max(mx, e.extrapolated);
    mn = std::min(mn, e.extrapolated);
    sum += e.extrapolated;
    phis.push_back(e.extrapolated);
  }
  double mean = sum / static_cast<double>(k);

  PhiTable table(angles, phis);
  write_text_file((fs::path(cfg.out_dir) / "phi_table.csv").string(), phi_table_to_csv(table));

  nlohmann::json dirs = nlohmann::json::array();
  nlohmann::json timings = nlohmann::json::array();
  for (const auto& e : ests) {
    dirs.push_back(estimate_summary(e, cfg.lattice.dim));
    timings.push_back(sample_timings(e));
  }
  nlohmann::json summary = {
      {"experiment", "sweep"},
      {"tool", kToolVersion},
      {"model", model_echo(cfg.model)},
      {"convention", kPairConvention},
      {"directions", dirs},
      {"phi_max", mx},
      {"phi_min", mn},
      {"phi_mean", mean},
      {"rel_spread", mean != 0.0 ? (mx - mn) / mean : 0.0},
  };
  write_text_file((fs::path(cfg.out_dir) / "summary.json").string(), summary.dump(1) + "\n");
  write_manifest(cfg, 0.0, timings);
}

void run_translation(const RunConfig& cfg, const Progress& log) {
  log.note("translation study");
  TranslationReport rep = translation_check(cfg.nu, cfg.t_list.back(), cfg.seeds, cfg.offsets,
                                            cfg.model, cfg.lattice);
  std::ostringstream csv;
  csv << (cfg.lattice.dim == 3 ? "offset_x,offset_y,offset_z,seed_mean_mu_norm"
                               : "offset_x,offset_y,seed_mean_mu_norm")
      << "\n";
  for (size_t i = 0; i < rep.offsets.size(); ++i) {
    csv << fmt_double(rep.offsets[i][0]) << "," << fmt_double(rep.offsets[i][1]);
    if (cfg.lattice.dim == 3) csv << "," << fmt_double(rep.offsets[i][2]);
    csv << "," << fmt_double(rep.seed_mean_mu_norm[i]) << "\n";
  }
  write_text_file((fs::path(cfg.out_dir) / "results.csv").string(), csv.str());
  nlohmann::json summary = {
      {"experiment", "translation"},
      {"tool", kToolVersion},
      {"model", model_echo(cfg.model)},
      {"convention", kPairConvention},
      {"t", cfg.t_list.back()},
      {"max_rel_deviation", rep.max_rel_deviation},
  };
  write_text_file((fs::path(cfg.out_dir) / "summary.json").string(), summary.dump(1) + "\n");
  write_manifest(cfg, 0.0, nlohmann::json::array());
}

void run_subadd(const RunConfig& cfg, const Progress& log) {
  double t = cfg.t_list.back();
  std::vector<SubaddReport> reps(cfg.seeds.size());
  parallel_for(cfg.seeds.size(), cfg.jobs, [&](size_t i) {
    reps[i] = subadditivity_check(cfg.nu, t, cfg.seeds[i], cfg.K, cfg.model, cfg.lattice);
    log.note("seed " + std::to_string(cfg.seeds[i]) + " done");
  });

  std::ostringstream csv;
  csv << "seed,mu_big";
  for (size_t s = 0; s < reps[0].mu_subs.size(); ++s) csv << ",mu_sub_" << s;
  csv << ",K_eff,holds_with_K\n";
  double k_max = 0.0;
  bool all_hold = true;
  for (size_t i = 0; i < reps.size(); ++i) {
    csv << cfg.seeds[i] << "," << fmt_double(reps[i].mu_big);
    for (double ms : reps[i].mu_subs) csv << "," << fmt_double(ms);
    csv << "," << fmt_double(reps[i].K_eff) << "," << (reps[i].holds_with_K ? 1 : 0) << "\n";
    k_max = std::max(k_max, reps[i].K_eff);
    all_hold = all_hold && reps[i].holds_with_K;
  }
  write_text_file((fs::path(cfg.out_dir) / "results.csv").string(), csv.str());
  nlohmann::json summary = {
      {"experiment", "subadd"},  {"tool", kToolVersion},
      {"model", model_echo(cfg.model)}, {"convention", kPairConvention},
      {"t", t},                  {"K", cfg.K},
      {"K_eff_max", k_max},      {"all_hold", all_hold},
      {"interfaces", reps[0].interfaces},
  };
  write_text_file((fs::path(cfg.out_dir) / "summary.json").string(), summary.dump(1) + "\n");
  write_manifest(cfg, 0.0, nlohmann::json::array());
}

void run_gamma(const RunConfig& cfg, const Progress& log) {
  PhiTable phi = PhiTable::constant(1.0);
  nlohmann::json phi_info;
  if (cfg.phi_source == "auto") {
    log.note("estimating phi(nu) for the continuum prediction");
    PhiEstimate est = estimate_phi(cfg.nu, cfg.t_list, cfg.seeds, cfg.model, cfg.lattice);
    phi = PhiTable::constant(est.extrapolated);
    phi_info = {{"source", "auto"}, {"phi", est.extrapolated}};
  } else {
    phi = phi_table_from_csv(read_text_file(cfg.phi_source));
    phi_info = {{"source", cfg.phi_source}};
  }
  log.note("gamma sweep over eps schedule");
  GammaResult res = gamma_check(cfg.eps_list, cfg.domain_side, cfg.nu, cfg.lattice, cfg.model, phi,
                                cfg.seeds.front());

  std::ostringstream csv;
  csv << "eps,discrete_min,continuum_min,rel_gap\n";
  for (const GammaRow& row : res.rows)
    csv << fmt_double(row.eps) << "," << fmt_double(row.discrete_min) << ","
        << fmt_double(row.continuum_min) << "," << fmt_double(row.rel_gap) << "\n";
  write_text_file((fs::path(cfg.out_dir) / "gamma.csv").string(), csv.str());

  nlohmann::json summary = {
      {"experiment", "gamma"},
      {"tool", kToolVersion},
      {"model", model_echo(cfg.model)},
      {"convention", kPairConvention},
      {"phi", phi_info},
      {"gap_monotone", res.gap_monotone},
      {"final_rel_gap", res.rows.back().rel_gap},
  };
  write_text_file((fs::path(cfg.out_dir) / "summary.json").string(), summary.dump(1) + "\n");
  write_manifest(cfg, 0.0, nlohmann::json::array());
}

void run_lattice_audit(const RunConfig& cfg, const Progress& log) {
  std::ostringstream csv;
  csv << "seed,points,r_min,R_cover,probe_resolution,pass\n";
  bool all_pass = true;
  for (uint64_t seed : cfg.seeds) {
    PointSet ps = make_lattice(cfg.lattice, cfg.gen_box, seed);
    AdmissibilityReport rep = estimate_admissibility(ps);
    csv << seed << "," << ps.points.size() << "," << fmt_double(rep.r_min) << ","
        << fmt_double(rep.R_cover) << "," << fmt_double(rep.probe_resolution) << ","
        << (rep.pass ? 1 : 0) << "\n";
    all_pass = all_pass && rep.pass;
    log.note("seed " + std::to_string(seed) + (rep.pass ? " pass" : " FAIL"));
  }
  write_text_file((fs::path(cfg.out_dir) / "audit.csv").string(), csv.str());
  nlohmann::json summary = {
      {"experiment", "lattice-audit"},
      {"tool", kToolVersion},
      {"model", cfg.lattice.model},
      {"all_pass", all_pass},
  };
  write_text_file((fs::path(cfg.out_dir) / "summary.json").string(), summary.dump(1) + "\n");
  write_manifest(cfg, 0.0, nlohmann::json::array());
}

}  // namespace

void run_experiment(const RunConfig& cfg) {
  fs::create_directories(cfg.out_dir);
  Progress log{cfg.quiet};
  auto t0 = std::chrono::steady_clock::now();
  switch (cfg.type) {
    case ExperimentType::phi:
      run_phi(cfg, log);
      break;
    case ExperimentType::sweep:
      run_sweep(cfg, log);
      break;
    case ExperimentType::translation:
      run_translation(cfg, log);
      break;
    case ExperimentType::subadd:
      run_subadd(cfg, log);
      break;
    case ExperimentType::gamma:
      run_gamma(cfg, log);
      break;
    case ExperimentType::lattice_audit:
      run_lattice_audit(cfg, log);
      break;
  }
  // Rewrite the manifest with the true wall time (manifest is the one
  // non-deterministic artifact).
  double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::string man_path = (fs::path(cfg.out_dir) / "manifest.json").string();
  nlohmann::json man = nlohmann::json::parse(read_text_file(man_path));
  man["wall_seconds"] = wall;
  write_text_file(man_path, man.dump(1) + "\n");
}

AdmissibilityReport audit_lattice_file(const std::string& path, std::string* json_out) {
  PointSet ps = read_lattice_file(path);
  AdmissibilityReport rep = estimate_admissibility(ps);
  nlohmann::json j = {
      {"file", path},
      {"points", ps.points.size()},
      {"r_declared", ps.r_declared},
      {"R_declared", ps.R_declared},
      {"r_min", rep.r_min},
      {"R_cover", rep.R_cover},
      {"probe_resolution", rep.probe_resolution},
      {"pass", rep.pass},
  };
  if (json_out) *json_out = j.dump(1) + "\n";
  return rep;
}

}  // namespace spinhom
