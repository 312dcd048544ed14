#include "spinhom/continuum.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "spinhom/rng.hpp"

namespace spinhom {

PhiTable::PhiTable(std::vector<double> angles, std::vector<double> values)
    : angles_(std::move(angles)), values_(std::move(values)) {
  if (angles_.empty() || angles_.size() != values_.size())
    throw std::invalid_argument("phi table: need matching non-empty angle/value lists");
  for (size_t i = 0; i < angles_.size(); ++i) {
    if (!(angles_[i] >= 0.0 && angles_[i] < M_PI))
      throw std::invalid_argument("phi table: angles must lie in [0, pi)");
    if (i > 0 && !(angles_[i] > angles_[i - 1]))
      throw std::invalid_argument("phi table: angles must be strictly increasing");
    if (!(values_[i] > 0.0)) throw std::invalid_argument("phi table: values must be positive");
  }
}

PhiTable PhiTable::constant(double value) { return PhiTable({0.0}, {value}); }

double PhiTable::eval_angle(double theta) const {
  // flip symmetry folds the circle onto [0, pi)
  theta = std::fmod(theta, M_PI);
  if (theta < 0.0) theta += M_PI;
  size_t n = angles_.size();
  if (n == 1) return values_[0];
  // find the segment [angles_[k], angles_[k+1]) containing theta, wrapping
  // the last node to the first one shifted by pi
  auto it = std::upper_bound(angles_.begin(), angles_.end(), theta);
  size_t hi = static_cast<size_t>(it - angles_.begin());
  double th = theta;
  if (hi == 0) {
    th += M_PI;
    hi = n;
  }
  size_t lo = hi - 1;
  double a0 = angles_[lo];
  double a1 = hi == n ? angles_[0] + M_PI : angles_[hi];
  double v0 = values_[lo], v1 = values_[hi % n];
  if (th == a0) return v0;
  double w = (th - a0) / (a1 - a0);
  return v0 + w * (v1 - v0);
}

double PhiTable::eval(const Vec& nu) const { return eval_angle(std::atan2(nu[1], nu[0])); }

bool PhiTable::convex(double tol, int trials, uint64_t seed) const {
  // 1-homogeneous extension psi(xi) = |xi| phi(xi/|xi|) must be subadditive.
  auto psi = [&](const Vec& v) {
    double n = norm(v);
    return n == 0.0 ? 0.0 : n * eval(v * (1.0 / n));
  };
  for (int k = 0; k < trials; ++k) {
    double t1 = seq_uniform(seed, static_cast<uint64_t>(k), 101) * 2.0 * M_PI;
    double t2 = seq_uniform(seed, static_cast<uint64_t>(k), 102) * 2.0 * M_PI;
    double s = 0.25 + seq_uniform(seed, static_cast<uint64_t>(k), 103) * 4.0;
    Vec x1(std::cos(t1), std::sin(t1));
    Vec x2(std::cos(t2) * s, std::sin(t2) * s);
    if (psi(x1 + x2) > psi(x1) + psi(x2) + tol) return false;
  }
  return true;
}

double surface_energy(const PolygonalInterface& interface, const PhiTable& phi) {
  if (interface.vertices.size() < 2) throw std::invalid_argument("surface_energy: need at least one segment");
  double acc = 0.0;
  size_t n = interface.vertices.size();
  size_t segs = interface.closed ? n : n - 1;
  for (size_t k = 0; k < segs; ++k) {
    Vec a = interface.vertices[k];
    Vec b = interface.vertices[(k + 1) % n];
    Vec d = b - a;
    double len = norm(d);
    if (!(len > 1e-15)) throw std::invalid_argument("surface_energy: degenerate segment");
    Vec normal(-d[1] / len, d[0] / len);  // left normal of the traversal
    acc += len * phi.eval(normal);
  }
  return acc;
}

BvpResult bvp_continuum_min(double side, const Vec& nu, const PhiTable& phi, const Vec& datum_point) {
  if (!(side > 0.0)) throw std::invalid_argument("bvp_continuum_min: side must be positive");
  Vec n = normalized(nu);
  Vec tang(-n[1], n[0]);

  // Chord of the line {<x - datum_point, nu> = 0} inside the open square (0,side)^2.
  double t_lo = -std::numeric_limits<double>::infinity();
  double t_hi = std::numeric_limits<double>::infinity();
  bool empty = false;
  for (int ax = 0; ax < 2; ++ax) {
    double p0 = datum_point[ax], d = tang[ax];
    if (std::abs(d) < 1e-15) {
      if (!(p0 > 0.0 && p0 < side)) empty = true;  // line parallel to this slab
    } else {
      double ta = (0.0 - p0) / d, tb = (side - p0) / d;
      t_lo = std::max(t_lo, std::min(ta, tb));
      t_hi = std::min(t_hi, std::max(ta, tb));
    }
  }
  BvpResult res;
  res.chord_length = empty ? 0.0 : std::max(0.0, t_hi - t_lo);
  res.value = res.chord_length * phi.eval(n);
  res.convex_ok = phi.convex();
  return res;
}

GammaResult gamma_check(const std::vector<double>& eps_list, double domain_side, const Vec& nu,
                        const LatticeParams& lat, const CouplingModel& m, const PhiTable& phi,
                        uint64_t seed) {
  if (eps_list.empty()) throw std::invalid_argument("gamma_check: empty eps schedule");
  for (size_t k = 1; k < eps_list.size(); ++k)
    if (!(eps_list[k] < eps_list[k - 1]))
      throw std::invalid_argument("gamma_check: eps schedule must be decreasing");
  if (lat.dim != 2) throw std::invalid_argument("gamma_check: 2D only");
  validate_model(m, lat.dim);

  Vec datum_nu = normalized(nu);
  double r = lattice_r(lat);
  double R = lattice_R(lat);
  Frame axis = frame(Vec(0.0, 1.0), 2);  // axis-aligned square domain

  // Continuum prediction: chord through the domain center.
  Vec center_macro(domain_side / 2.0, domain_side / 2.0);
  BvpResult cont = bvp_continuum_min(domain_side, datum_nu, phi, center_macro);

  GammaResult out;
  double prev_gap = std::numeric_limits<double>::infinity();
  for (double eps : eps_list) {
    double side_idx = domain_side / eps;
    double l_idx = std::sqrt(1.0 / eps);
    Vec center_idx(side_idx / 2.0, side_idx / 2.0);
    double margin = 2.0 * R + r;
    Box box{2, Vec(-margin, -margin), Vec(side_idx + margin, side_idx + margin)};
    PointSet ps = make_lattice(lat, box, seed);
    NeighborGraph g = neighbor_graph(ps, m.L);
    SpinProblem prob = build_boundary_problem(ps, g, m, axis, center_idx, side_idx, l_idx, datum_nu);
    GroundState gs = solve(prob);
    if (!gs.optimal) throw std::runtime_error("gamma_check: cut certificate failed");

    GammaRow row;
    row.eps = eps;
    row.discrete_min = std::pow(eps, lat.dim - 1) * gs.energy;
    row.continuum_min = cont.value;
    row.rel_gap = cont.value != 0.0 ? std::abs(row.discrete_min - cont.value) / cont.value
                                    : std::abs(row.discrete_min);
    if (row.rel_gap > prev_gap + 1e-12) out.gap_monotone = false;
    prev_gap = row.rel_gap;
    out.rows.push_back(row);
  }
  return out;
}

}  // namespace spinhom
