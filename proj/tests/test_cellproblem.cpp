#include <cmath>

#include "doctest.h"
#include "spinhom/cellproblem.hpp"

using namespace spinhom;

namespace {

CouplingModel nn_only(double kappa = 1.0) {
  CouplingModel m;
  m.nn_const = kappa;
  return m;
}

LatticeParams square_lattice() {
  LatticeParams lat;
  lat.model = "square";
  return lat;
}

CellProblemSpec axis_spec(double t, const Vec& nu = Vec(0, 1)) {
  CellProblemSpec spec;
  spec.nu = nu;
  spec.t = t;
  spec.lattice = square_lattice();
  spec.model = nn_only();
  return spec;
}

}  // namespace

TEST_CASE("frame: fixed rotation rule in 2D, Householder completion in 3D") {
  Frame f = frame(Vec(0, 1), 2);
  CHECK(f.tangents[0][0] == doctest::Approx(-1.0).epsilon(1e-15));
  CHECK(f.tangents[0][1] == doctest::Approx(0.0).epsilon(1e-15));

  for (double ang : {0.3, 1.2, 2.9, 4.4}) {
    Frame fr = frame(Vec(std::cos(ang), std::sin(ang)), 2);
    CHECK(std::abs(dot(fr.nu, fr.tangents[0])) < 1e-12);
    CHECK(norm(fr.tangents[0]) == doctest::Approx(1.0).epsilon(1e-12));
    Frame fr2 = frame(Vec(std::cos(ang), std::sin(ang)), 2);
    CHECK(fr.tangents[0] == fr2.tangents[0]);  // deterministic
  }

  for (auto nu : {Vec(0, 0, 1), Vec(0.36, -0.48, 0.8), Vec(-0.6, 0.64, -0.48)}) {
    Frame fr = frame(normalized(nu), 3);
    CHECK(std::abs(dot(fr.nu, fr.tangents[0])) < 1e-12);
    CHECK(std::abs(dot(fr.nu, fr.tangents[1])) < 1e-12);
    CHECK(std::abs(dot(fr.tangents[0], fr.tangents[1])) < 1e-12);
    CHECK(norm(fr.tangents[0]) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(norm(fr.tangents[1]) == doctest::Approx(1.0).epsilon(1e-12));
  }

  CHECK_THROWS_AS(frame(Vec(0, 0), 2), std::invalid_argument);
  CHECK_THROWS_AS(frame(Vec(0.9, 0), 2), std::invalid_argument);
}

TEST_CASE("boundary width schedule") {
  CHECK(boundary_width(100.0, 1.0, 1.0) == doctest::Approx(10.0));   // sqrt(t) dominates
  CHECK(boundary_width(100.0, 11.0, 1.0) == doctest::Approx(12.0));  // L + r dominates
  CHECK(boundary_width(1e4, 1.0, 1.0) / 1e4 == doctest::Approx(0.01));
  CHECK_THROWS_AS(boundary_width(7.9, 1.0, 1.0), std::invalid_argument);
}

TEST_CASE("cell problem construction on Z^2: frozen band and datum signs") {
  LatticeParams lat = square_lattice();
  Frame fr = frame(Vec(0, 1), 2);
  Box box{2, Vec(-8, -8), Vec(8, 8)};
  PointSet ps = make_lattice(lat, box, 0);
  NeighborGraph g = neighbor_graph(ps, 0.0);
  CouplingModel m = nn_only();

  SpinProblem prob = build_cell_problem(ps, g, m, fr, Vec(0, 0), 8.0, 3.0);

  // direct count: cube points are max(|x|,|y|) <= 4, free means the
  // sup-distance to the boundary exceeds 3
  int want_cube = 0, want_free = 0;
  for (int x = -8; x <= 8; ++x)
    for (int y = -8; y <= 8; ++y) {
      int sup = std::max(std::abs(x), std::abs(y));
      if (sup > 4) continue;
      ++want_cube;
      if (4 - sup > 3) ++want_free;
    }
  CHECK(static_cast<int>(prob.vertices.size()) == want_cube);
  CHECK(static_cast<int>(prob.free_verts.size()) == want_free);
  CHECK(want_free == 1);

  // a frozen point exactly on the hyperplane gets the + side
  bool found_plane_point = false;
  for (auto& [id, s] : prob.frozen) {
    const Vec& p = ps.points[static_cast<size_t>(id)];
    if (p[1] == 0.0) {
      found_plane_point = true;
      CHECK(s == 1);
    }
  }
  CHECK(found_plane_point);

  // empty free set is rejected up front
  CHECK_THROWS_AS(build_cell_problem(ps, g, m, fr, Vec(0, 0), 8.0, 4.0), std::invalid_argument);
  // cube exceeding the lattice box is rejected
  CHECK_THROWS_AS(build_cell_problem(ps, g, m, fr, Vec(0, 0), 16.0, 3.0), std::invalid_argument);
}

TEST_CASE("flat interface on Z^2: exact column formula") {
  MuResult r = mu(axis_spec(16.0));
  CHECK(r.mu == 34.0);  // one broken bond per column, 17 columns, weight 2
  CHECK(r.mu_norm == 34.0 / 16.0);
  CHECK(r.mu <= r.flat_energy);

  MuResult rx = mu(axis_spec(16.0, Vec(1, 0)));
  CHECK(rx.mu == 34.0);  // lattice symmetry
}

TEST_CASE("flipping the boundary datum leaves the minimum unchanged") {
  LatticeParams lat;
  lat.model = "perturbed";
  lat.a = 0.25;
  for (uint64_t seed : {1ull, 2ull, 3ull}) {
    Frame fr = frame(normalized(Vec(0.6, 0.8)), 2);
    Box box{2, Vec(-12, -12), Vec(12, 12)};
    PointSet ps = make_lattice(lat, box, seed);
    NeighborGraph g = neighbor_graph(ps, 0.0);
    double l = boundary_width(12.0, 0.0, lattice_r(lat));

    SpinProblem prob = build_cell_problem(ps, g, nn_only(), fr, Vec(0, 0), 12.0, l);
    SpinProblem flipped = prob;
    for (auto& [id, s] : flipped.frozen) s = static_cast<int8_t>(-s);
    CHECK(solve(prob).energy_scaled == solve(flipped).energy_scaled);
  }
}

TEST_CASE("mu is identical for nu and -nu on generic lattices") {
  LatticeParams lat;
  lat.model = "perturbed";
  lat.a = 0.25;
  CellProblemSpec spec;
  spec.nu = normalized(Vec(0.6, 0.8));
  spec.t = 12.0;
  spec.lattice = lat;
  spec.seed = 77;
  spec.model = nn_only();
  MuResult plus = mu(spec);
  spec.nu = -spec.nu;
  MuResult minus = mu(spec);
  CHECK(plus.mu == minus.mu);
}

TEST_CASE("estimate_phi on Z^2: exact 2 + 2/t sequence") {
  PhiEstimate est = estimate_phi(Vec(0, 1), {16, 32, 64}, {0}, nn_only(), square_lattice());
  REQUIRE(est.per_t.size() == 3);
  CHECK(est.per_t[0].mean == 2.0 + 2.0 / 16.0);
  CHECK(est.per_t[1].mean == 2.0 + 2.0 / 32.0);
  CHECK(est.per_t[2].mean == 2.0 + 2.0 / 64.0);
  CHECK(est.extrapolated == 2.0 + 2.0 / 64.0);
  CHECK(est.convention == std::string("unordered-pairs-once"));

  // 1/t fit recovers phi = 2 exactly for an exactly-affine-in-1/t sequence
  REQUIRE(est.fit_valid);
  CHECK(est.fit_phi == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(est.fit_coeff == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(est.fit_residual < 1e-12);

  // repeated seeds give zero spread
  PhiEstimate rep = estimate_phi(Vec(0, 1), {16}, {5, 5, 5}, nn_only(), square_lattice());
  CHECK(rep.per_t[0].sd == 0.0);

  CHECK_THROWS_AS(estimate_phi(Vec(0, 1), {32, 16}, {0}, nn_only(), square_lattice()),
                  std::invalid_argument);
  CHECK_THROWS_AS(estimate_phi(Vec(0, 1), {16}, {}, nn_only(), square_lattice()),
                  std::invalid_argument);
}

TEST_CASE("diagonal direction: solver matches the exhaustive oracle on small cubes") {
  CellProblemSpec spec = axis_spec(6.0, normalized(Vec(1, 1)));
  spec.l = 1.6;

  Frame fr = frame(spec.nu, 2);
  Box box{2, Vec(-8, -8), Vec(8, 8)};
  PointSet ps = make_lattice(spec.lattice, box, 0);
  NeighborGraph g = neighbor_graph(ps, 0.0);
  SpinProblem prob = build_cell_problem(ps, g, spec.model, fr, Vec(0, 0), spec.t, spec.l);
  REQUIRE(prob.free_verts.size() <= 22);
  REQUIRE(prob.free_verts.size() >= 1);

  GroundState gs = solve(prob);
  auto [energy, count] = brute_force(prob);
  CHECK(gs.energy == energy);
  CHECK(count >= 1);

  // staircase upper bound: the interface spans t*sqrt(2) in Manhattan length
  double staircase = 2.0 * (2.0 * std::ceil(6.0 * std::sqrt(2.0) / 2.0) + 2.0);
  CHECK(gs.energy <= staircase);
}

TEST_CASE("sweep on Z^2: anisotropy peaks at 45 degrees") {
  SweepResult res = sweep(8, {16, 32}, {0}, nn_only(), square_lattice());
  REQUIRE(res.estimates.size() == 8);
  double at_axis = res.estimates[0].extrapolated;
  double at_diag = res.estimates[2].extrapolated;  // angle pi/4
  CHECK(res.phi_max == doctest::Approx(at_diag));
  CHECK(res.phi_min == doctest::Approx(at_axis));
  CHECK(at_diag / at_axis == doctest::Approx(std::sqrt(2.0)).epsilon(0.05));

  SweepResult single = sweep(1, {16}, {0}, nn_only(), square_lattice());
  CHECK(single.estimates.size() == 1);

  CHECK_THROWS_AS(sweep(0, {16}, {0}, nn_only(), square_lattice()), std::invalid_argument);
}

TEST_CASE("translation invariance is exact on the deterministic lattice") {
  std::vector<Vec> offsets = {Vec(0, 0), Vec(3, 2), Vec(-4, 1)};
  TranslationReport rep =
      translation_check(Vec(0, 1), 16.0, {0}, offsets, nn_only(), square_lattice());
  REQUIRE(rep.seed_mean_mu_norm.size() == 3);
  CHECK(rep.seed_mean_mu_norm[0] == rep.seed_mean_mu_norm[1]);
  CHECK(rep.seed_mean_mu_norm[0] == rep.seed_mean_mu_norm[2]);
  CHECK(rep.max_rel_deviation == 0.0);

  CHECK_THROWS_AS(
      translation_check(Vec(0, 1), 16.0, {0}, {Vec(40, 0)}, nn_only(), square_lattice()),
      std::invalid_argument);
}

TEST_CASE("translation deviations stay small on perturbed lattices") {
  LatticeParams lat;
  lat.model = "perturbed";
  lat.a = 0.25;
  std::vector<Vec> offsets = {Vec(0, 0), Vec(5, 3)};
  TranslationReport rep = translation_check(Vec(0, 1), 24.0, {1, 2, 3, 4}, offsets, nn_only(), lat);
  CHECK(rep.max_rel_deviation < 0.2);
}

TEST_CASE("subadditivity: exact tiling bound on Z^2 and the zero model") {
  SubaddReport rep = subadditivity_check(Vec(0, 1), 16.0, 0, 4.0, nn_only(), square_lattice());
  CHECK(rep.mu_big == 2.0 * (2.0 * 16.0 + 1.0));
  REQUIRE(rep.mu_subs.size() == 2);
  CHECK(rep.mu_subs[0] == 2.0 * (16.0 + 1.0));
  CHECK(rep.mu_subs[1] == 2.0 * (16.0 + 1.0));
  CHECK(rep.interfaces == 1);
  CHECK(rep.K_eff == 0.0);  // big-cube minimum undercuts the tiling sum
  CHECK(rep.holds_with_K);

  CouplingModel zero = nn_only(0.0);  // outside Hypothesis 1, still well-posed here
  SubaddReport z = subadditivity_check(Vec(0, 1), 16.0, 0, 0.0, zero, square_lattice());
  CHECK(z.mu_big == 0.0);
  CHECK(z.mu_subs[0] == 0.0);
  CHECK(z.K_eff == 0.0);
  CHECK(z.holds_with_K);
}

TEST_CASE("subadditivity holds with a stable K_eff on perturbed lattices") {
  // measured band: K_eff stays within [0, 8] over 10 seeds for t up to 48,
  // with no growth in t; 12 gives margin
  LatticeParams lat;
  lat.model = "perturbed";
  lat.a = 0.25;
  for (uint64_t seed : {1ull, 2ull, 3ull}) {
    SubaddReport rep = subadditivity_check(Vec(0, 1), 24.0, seed, 12.0, nn_only(), lat);
    CHECK(rep.K_eff >= 0.0);
    CHECK(rep.K_eff <= 12.0);
    CHECK(rep.holds_with_K);
  }
}

TEST_CASE("ground-state energy agrees with total_energy on the same config") {
  LatticeParams lat;
  lat.model = "perturbed";
  lat.a = 0.2;
  Frame fr = frame(normalized(Vec(1, 2)), 2);
  Box box{2, Vec(-12, -12), Vec(12, 12)};
  PointSet ps = make_lattice(lat, box, 3);
  CouplingModel m;
  m.nn_const = 1.0;
  m.family = LrKernel::power;
  m.beta = 0.5;
  m.p = 4.5;
  m.L = 2.5;
  NeighborGraph g = neighbor_graph(ps, m.L);
  double t = 12.0, l = boundary_width(t, m.L, lattice_r(lat));

  SpinProblem prob = build_cell_problem(ps, g, m, fr, Vec(0, 0), t, l);
  GroundState gs = solve(prob);

  auto in_cube = [&](const Vec& p) { return fr.sup_coord(p, Vec(0, 0)) <= t / 2.0; };
  double direct = total_energy(gs.config, g, m, ps, in_cube, 1.0);
  CHECK(gs.energy == doctest::Approx(direct).epsilon(1e-9));
  CHECK(std::abs(gs.energy - direct) <= gs.round_err_bound + 1e-12);
}

TEST_CASE("estimates are pure functions of their parameters") {
  LatticeParams lat;
  lat.model = "parking";
  lat.diameter = 1.0;
  PhiEstimate a = estimate_phi(Vec(0, 1), {12, 16}, {4, 9}, nn_only(), lat);
  PhiEstimate b = estimate_phi(Vec(0, 1), {12, 16}, {4, 9}, nn_only(), lat);
  REQUIRE(a.samples.size() == b.samples.size());
  for (size_t i = 0; i < a.samples.size(); ++i) {
    CHECK(a.samples[i].mu == b.samples[i].mu);
    CHECK(a.samples[i].n_free == b.samples[i].n_free);
  }
  CHECK(a.extrapolated == b.extrapolated);
}

TEST_CASE("estimate_phi records per-sample failures without aborting") {
  // t = 8 violates t > 4(L+r) for L = 2.2; the sample must fail, not abort
  CouplingModel m = nn_only();
  m.family = LrKernel::power;
  m.beta = 0.1;
  m.p = 4.0;
  m.L = 2.2;
  PhiEstimate est = estimate_phi(Vec(0, 1), {8, 16}, {0}, m, square_lattice());
  CHECK(est.samples[0].failed);
  CHECK_FALSE(est.samples[1].failed);
  CHECK(est.per_t[0].n == 0);
  CHECK(est.per_t[1].n == 1);
  CHECK(est.extrapolated == est.per_t[1].mean);
}
