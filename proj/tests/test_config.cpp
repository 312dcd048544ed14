#include "doctest.h"
#include "spinhom/config.hpp"

using namespace spinhom;

TEST_CASE("toml-lite parser: tables, types, comments") {
  std::string text =
      "# run configuration\n"
      "[experiment]\n"
      "type = \"phi\"   # inline comment\n"
      "\n"
      "[lattice]\n"
      "model = \"perturbed\"\n"
      "a = 0.25\n"
      "seeds = [1, 2, 3]\n"
      "\n"
      "[model]\n"
      "L = 2.0\n"
      "[model.c_nn]\n"
      "const = 1.5\n"
      "[model.c_lr]\n"
      "family = \"power\"\n"
      "beta = 1.0\n"
      "p = 4.0\n"
      "\n"
      "[cell]\n"
      "nu = [0.0, 1.0]\n"
      "t = [16, 32]\n"
      "[translationx]\n"  // harmless unknown table only if unreferenced... it is not
      "offsets = [[0, 0], [5, 3]]\n";
  nlohmann::json j = parse_toml_lite(text);
  CHECK(j["experiment"]["type"] == "phi");
  CHECK(j["lattice"]["a"] == 0.25);
  CHECK(j["lattice"]["seeds"].size() == 3);
  CHECK(j["model"]["c_nn"]["const"] == 1.5);
  CHECK(j["model"]["c_lr"]["family"] == "power");
  CHECK(j["cell"]["t"][1] == 32);
  CHECK(j["translationx"]["offsets"][1][0] == 5);

  CHECK_THROWS_AS(parse_toml_lite("key\n"), ConfigError);
  CHECK_THROWS_AS(parse_toml_lite("a = 1\na = 2\n"), ConfigError);
  CHECK_THROWS_AS(parse_toml_lite("a = [1, 2\n"), ConfigError);
  CHECK_THROWS_AS(parse_toml_lite("a = \"unterminated\n"), ConfigError);
  CHECK_THROWS_AS(parse_toml_lite("a = 1 trailing\n"), ConfigError);
}

namespace {
std::string phi_config(const std::string& extra_cell = "", const std::string& extra_top = "") {
  return "[experiment]\ntype = \"phi\"\n"
         "[lattice]\nmodel = \"square\"\nseeds = [1]\n"
         "[cell]\nnu = [0.0, 1.0]\nt = [16, 32]\n" +
         extra_cell + extra_top;
}
}  // namespace

TEST_CASE("run config: happy path and defaults") {
  RunConfig cfg = run_config_from_text(phi_config());
  CHECK(cfg.type == ExperimentType::phi);
  CHECK(cfg.lattice.model == "square");
  CHECK(cfg.seeds == std::vector<uint64_t>{1});
  CHECK(cfg.t_list == std::vector<double>{16, 32});
  CHECK(cfg.nu[1] == 1.0);
  CHECK(cfg.model.family == LrKernel::zero);
  CHECK(cfg.out_dir == "out");
}

TEST_CASE("run config: unknown keys are hard errors") {
  CHECK_THROWS_WITH_AS(run_config_from_text(phi_config("tt = 3\n")),
                       doctest::Contains("unknown key 'tt'"), ConfigError);
  CHECK_THROWS_WITH_AS(run_config_from_text(phi_config("", "[bogus]\nx = 1\n")),
                       doctest::Contains("unknown key 'bogus'"), ConfigError);
}

TEST_CASE("run config: cross-field constraint l < t/2 is caught up front") {
  // l = 8 with t = 16 leaves no free spins
  CHECK_THROWS_WITH_AS(run_config_from_text(phi_config("l = 8.0\n")),
                       doctest::Contains("l < t/2"), ConfigError);
  // schedule precondition: t must exceed max(4, 4(L+r))
  std::string small =
      "[experiment]\ntype = \"phi\"\n"
      "[lattice]\nmodel = \"square\"\n"
      "[cell]\nnu = [0.0, 1.0]\nt = [4]\n";
  CHECK_THROWS_AS(run_config_from_text(small), ConfigError);
}

TEST_CASE("run config: model validation routes through ConfigError") {
  std::string bad =
      "[experiment]\ntype = \"phi\"\n"
      "[lattice]\nmodel = \"square\"\n"
      "[model]\nL = 2.0\n"
      "[model.c_lr]\nfamily = \"power\"\nbeta = 1.0\np = 3.0\n"
      "[cell]\nnu = [0.0, 1.0]\nt = [16]\n";
  CHECK_THROWS_WITH_AS(run_config_from_text(bad), doctest::Contains("p > n+1"), ConfigError);
}

TEST_CASE("run config: per-experiment sections") {
  std::string tr =
      "[experiment]\ntype = \"translation\"\n"
      "[lattice]\nmodel = \"perturbed\"\na = 0.25\nseeds = [1, 2]\n"
      "[cell]\nnu = [0.0, 1.0]\nt = [24]\n"
      "[translation]\noffsets = [[0, 0], [5, 3], [-7, 2]]\n";
  RunConfig cfg = run_config_from_text(tr);
  CHECK(cfg.offsets.size() == 3);
  CHECK(cfg.offsets[2][0] == -7.0);

  // the translation table is rejected outside its experiment
  CHECK_THROWS_AS(run_config_from_text(phi_config("", "[translation]\noffsets = [[0,0]]\n")),
                  ConfigError);

  std::string ga =
      "[experiment]\ntype = \"gamma\"\n"
      "[lattice]\nmodel = \"square\"\n"
      "[cell]\nnu = [0.0, 1.0]\nt = [16, 32]\n"
      "[gamma]\neps = [0.0625, 0.03125]\n";
  RunConfig gcfg = run_config_from_text(ga);
  CHECK(gcfg.eps_list.size() == 2);
  CHECK(gcfg.phi_source == "auto");

  std::string ga_bad =
      "[experiment]\ntype = \"gamma\"\n"
      "[lattice]\nmodel = \"square\"\n"
      "[cell]\nnu = [0.0, 1.0]\nt = [16]\n"
      "[gamma]\neps = [0.03125, 0.0625]\n";
  CHECK_THROWS_WITH_AS(run_config_from_text(ga_bad), doctest::Contains("decreasing"), ConfigError);

  std::string sa =
      "[experiment]\ntype = \"subadd\"\n"
      "[lattice]\nmodel = \"square\"\n"
      "[cell]\nnu = [0.0, 1.0]\nt = [16]\n"
      "[subadd]\nK = 4.0\n";
  CHECK(run_config_from_text(sa).K == 4.0);

  std::string audit =
      "[experiment]\ntype = \"lattice-audit\"\n"
      "[lattice]\nmodel = \"parking\"\ndiameter = 1.0\nbox = [0, 16]\nseeds = [1, 2]\n";
  RunConfig acfg = run_config_from_text(audit);
  CHECK(acfg.has_gen_box);
  CHECK(acfg.gen_box.hi[0] == 16.0);
}
