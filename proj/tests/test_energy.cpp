#include <cmath>

#include "doctest.h"
#include "spinhom/energy.hpp"
#include "spinhom/lattice.hpp"

using namespace spinhom;

namespace {

CouplingModel power_model(double beta, double p, double L) {
  CouplingModel m;
  m.family = LrKernel::power;
  m.beta = beta;
  m.p = p;
  m.L = L;
  return m;
}

// Direct lattice tail sum over integer offsets: J evaluated at the shaded
// magnitude |xi| - r'*sqrt(n) = |xi| - r, weight (|xi| + 2R); cutoff 10L.
double oracle_tail_sum(const CouplingModel& m, double L, double r, double R) {
  double sum = 0.0;
  int cutoff = static_cast<int>(std::ceil(10.0 * L));
  for (int i = -cutoff; i <= cutoff; ++i)
    for (int j = -cutoff; j <= cutoff; ++j) {
      double d = std::hypot(i, j);
      if (d <= L || d > 10.0 * L) continue;
      double shaded = std::max(d - r, 1e-9);
      sum += m.c_lr(shaded) * (d + 2.0 * R);
    }
  return sum;
}

Box square_box(double lo, double hi) {
  Box b;
  b.dim = 2;
  b.lo = Vec(lo, lo);
  b.hi = Vec(hi, hi);
  return b;
}

}  // namespace

TEST_CASE("hypothesis validation: integrability clauses") {
  CHECK_NOTHROW(validate_model(power_model(1.0, 4.0, 2.0), 2));
  CHECK_THROWS_AS(validate_model(power_model(1.0, 3.0, 2.0), 2), std::invalid_argument);
  CHECK_THROWS_AS(validate_model(power_model(1.0, 4.0, 2.0), 3), std::invalid_argument);

  CouplingModel e;
  e.family = LrKernel::exponential;
  e.beta = 1.0;
  e.lambda = 0.5;
  CHECK_NOTHROW(validate_model(e, 2));
  e.lambda = 0.0;
  CHECK_THROWS_AS(validate_model(e, 2), std::invalid_argument);

  CouplingModel bad;
  bad.nn_const = 0.0;
  CHECK_THROWS_AS(validate_model(bad, 2), std::invalid_argument);
}

TEST_CASE("tail bound: zero kernel, domination, scaling, monotonicity") {
  CouplingModel zero;
  CHECK(tail_bound(zero, 2, 1.0, std::sqrt(2.0) / 2.0, 3.0) == 0.0);
  CHECK_THROWS_AS(tail_bound(zero, 2, 1.0, 0.7, 0.0), std::invalid_argument);

  double r = 1.0, R = std::sqrt(2.0) / 2.0;

  // domination of the direct lattice sum
  for (double p : {4.0, 5.0})
    for (double L : {2.0, 4.0, 8.0}) {
      CouplingModel m = power_model(1.0, p, L);
      CHECK(tail_bound(m, 2, r, R, L) >= oracle_tail_sum(m, L, r, R));
    }
  {
    CouplingModel e;
    e.family = LrKernel::exponential;
    e.beta = 1.0;
    e.lambda = 0.8;
    for (double L : {2.0, 4.0, 8.0}) CHECK(tail_bound(e, 2, r, R, L) >= oracle_tail_sum(e, L, r, R));
  }

  // doubling L shrinks the bound by at least 2^{p-n-1}
  {
    CouplingModel m = power_model(1.0, 5.0, 2.0);
    for (double L : {2.0, 4.0, 8.0}) {
      double factor = tail_bound(m, 2, r, R, L) / tail_bound(m, 2, r, R, 2.0 * L);
      CHECK(factor >= std::pow(2.0, 5.0 - 2.0 - 1.0));
    }
  }

  // monotone decreasing in L
  {
    CouplingModel m = power_model(1.0, 4.0, 2.0);
    double prev = std::numeric_limits<double>::infinity();
    for (double L = 1.2; L <= 20.0; L += 0.2) {
      double b = tail_bound(m, 2, r, R, L);
      CHECK(b <= prev + 1e-12);
      prev = b;
    }
  }

  // a power kernel cannot be controlled below the shading scale
  CHECK(tail_bound(power_model(1.0, 5.0, 1.0), 2, 1.0, R, 0.5) ==
        std::numeric_limits<double>::infinity());
}

TEST_CASE("total energy: broken-bond values and symmetries") {
  // a hand-built 2-point instance: one nn bond of unit coupling
  PointSet ps;
  ps.dim = 2;
  ps.box = square_box(0, 4);
  ps.r_declared = 1.0;
  ps.R_declared = 1.0;
  ps.points = {Vec(1, 1), Vec(2, 1)};
  NeighborGraph g;
  g.nn.push_back({0, 1, 1.0});

  CouplingModel m;  // zero lr, c_nn = 1
  auto all = [](const Vec&) { return true; };

  SpinConfig up;
  up.values = {1, 1};
  CHECK(total_energy(up, g, m, ps, all, 1.0) == 0.0);

  SpinConfig mixed;
  mixed.values = {1, -1};
  CHECK(total_energy(mixed, g, m, ps, all, 1.0) == 2.0);

  SpinConfig flipped;
  flipped.values = {-1, 1};
  CHECK(total_energy(mixed, g, m, ps, all, 1.0) == total_energy(flipped, g, m, ps, all, 1.0));

  SpinConfig missing;
  missing.values = {1, 0};
  CHECK_THROWS_AS(total_energy(missing, g, m, ps, all, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(total_energy(mixed, g, m, ps, all, 0.0), std::invalid_argument);
}

TEST_CASE("total energy on a lattice: flip symmetry, truncation, scaling") {
  PointSet ps = generate_perturbed(2, square_box(0, 12), 0.2, 5);
  NeighborGraph g2 = neighbor_graph(ps, 2.0);
  NeighborGraph g4 = neighbor_graph(ps, 4.0);
  CouplingModel m = power_model(0.7, 4.5, 4.0);
  m.nn_const = 1.3;

  SpinConfig u;
  u.values.assign(ps.points.size(), 1);
  for (size_t i = 0; i < ps.points.size(); ++i)
    if (ps.points[i][1] > 6.0) u.values[i] = -1;
  SpinConfig neg = u;
  for (auto& v : neg.values) v = -v;

  auto all = [](const Vec&) { return true; };
  double e2 = total_energy(u, g2, m, ps, all, 1.0);
  double e4 = total_energy(u, g4, m, ps, all, 1.0);
  CHECK(e2 > 0.0);
  CHECK(e2 <= e4);  // truncation monotonicity
  CHECK(total_energy(neg, g2, m, ps, all, 1.0) == e2);  // exact flip symmetry

  // surface scaling is an exact prefactor
  double eps = 0.125;
  CHECK(total_energy(u, g4, m, ps, all, eps) == eps * e4);

  // constant on every component <=> zero energy
  SpinConfig c;
  c.values.assign(ps.points.size(), -1);
  CHECK(total_energy(c, g4, m, ps, all, 1.0) == 0.0);

  // region restriction drops boundary bonds
  auto region = [&](const Vec& p) { return p[0] > 3.0 && p[0] < 9.0; };
  double er = total_energy(u, g2, m, ps, region, 1.0);
  CHECK(er <= e2);
}
