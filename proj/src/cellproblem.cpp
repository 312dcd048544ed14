#include "spinhom/cellproblem.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace spinhom {

double Frame::sup_coord(const Vec& p, const Vec& center) const {
  Vec d = p - center;
  double m = std::abs(dot(d, nu));
  for (int i = 0; i < dim - 1; ++i) m = std::max(m, std::abs(dot(d, tangents[static_cast<size_t>(i)])));
  return m;
}

Frame frame(const Vec& nu, int dim) {
  double n = norm(nu);
  if (!(std::abs(n - 1.0) <= 1e-9)) throw std::invalid_argument("frame: nu must be a unit vector");
  Frame fr;
  fr.dim = dim;
  fr.nu = normalized(nu);
  if (dim == 2) {
    // tangent = nu rotated by +90 degrees
    fr.tangents[0] = Vec(-fr.nu[1], fr.nu[0]);
  } else {
    // Householder reflection mapping e3 to -s*nu; its first two columns
    // complete the frame. Fixed pivot keeps the completion deterministic.
    double s = fr.nu[2] >= 0.0 ? 1.0 : -1.0;
    Vec w = fr.nu + Vec(0.0, 0.0, s);
    double wn2 = norm2(w);
    if (wn2 < 1e-30) {
      fr.tangents[0] = Vec(1.0, 0.0, 0.0);
      fr.tangents[1] = Vec(0.0, 1.0, 0.0);
    } else {
      auto reflect = [&](const Vec& e) { return e - w * (2.0 * dot(w, e) / wn2); };
      fr.tangents[0] = reflect(Vec(1.0, 0.0, 0.0));
      fr.tangents[1] = reflect(Vec(0.0, 1.0, 0.0));
    }
    // Gram-Schmidt polish to meet the 1e-12 orthonormality contract.
    fr.tangents[0] = normalized(fr.tangents[0] - fr.nu * dot(fr.nu, fr.tangents[0]));
    fr.tangents[1] = fr.tangents[1] - fr.nu * dot(fr.nu, fr.tangents[1]);
    fr.tangents[1] = normalized(fr.tangents[1] - fr.tangents[0] * dot(fr.tangents[0], fr.tangents[1]));
  }
  return fr;
}

double lattice_r(const LatticeParams& lat) {
  if (lat.model == "square" || lat.model == "triangular") return 1.0;
  if (lat.model == "perturbed") return 1.0 - 2.0 * lat.a;
  if (lat.model == "parking") return lat.diameter;
  throw std::invalid_argument("unknown lattice model: " + lat.model);
}

double lattice_R(const LatticeParams& lat) {
  double R;
  if (lat.model == "square")
    R = std::sqrt(static_cast<double>(lat.dim)) / 2.0;
  else if (lat.model == "triangular")
    R = 1.0 / std::sqrt(3.0);
  else if (lat.model == "perturbed")
    R = std::sqrt(static_cast<double>(lat.dim)) * (0.5 + lat.a);
  else if (lat.model == "parking")
    R = lat.diameter;
  else
    throw std::invalid_argument("unknown lattice model: " + lat.model);
  return lat.defects > 0 ? 2.0 * R : R;
}

PointSet make_lattice(const LatticeParams& lat, const Box& box, uint64_t seed) {
  PointSet ps;
  if (lat.model == "square")
    ps = generate_deterministic(DeterministicModel::square, lat.dim, box);
  else if (lat.model == "triangular")
    ps = generate_deterministic(DeterministicModel::triangular, lat.dim, box);
  else if (lat.model == "perturbed")
    ps = generate_perturbed(lat.dim, box, lat.a, seed);
  else if (lat.model == "parking")
    ps = generate_random_parking(box, lat.diameter, seed);
  else
    throw std::invalid_argument("unknown lattice model: " + lat.model);
  if (lat.defects > 0) ps = apply_defects(ps, lat.defects, seed ^ 0x9e3779b97f4a7c15ull);
  return ps;
}

double boundary_width(double t, double L, double r) {
  if (!(t > 4.0 * (L + r))) throw std::invalid_argument("boundary_width: t must exceed 4(L+r)");
  return std::max(L + r, std::sqrt(t));
}

double boundary_width(double t, const CouplingModel& m, const PointSet& ps) {
  return boundary_width(t, m.L, ps.r_declared);
}

namespace {

Box cube_lattice_box(const Frame& fr, const Vec& center, double t, double margin) {
  Box box;
  box.dim = fr.dim;
  for (int k = 0; k < fr.dim; ++k) {
    double support = std::abs(fr.nu[k]);
    for (int i = 0; i < fr.dim - 1; ++i) support += std::abs(fr.tangents[static_cast<size_t>(i)][k]);
    support *= t / 2.0;
    box.lo[k] = center[k] - support - margin;
    box.hi[k] = center[k] + support + margin;
  }
  return box;
}

void check_cell_geometry(const PointSet& ps, const Frame& fr, const Vec& center, double t, double l,
                         const CouplingModel& m) {
  if (!(t > 0.0)) throw std::invalid_argument("cell problem: t must be positive");
  if (!(l >= m.L + ps.r_declared))
    throw std::invalid_argument("cell problem: boundary width below L + r");
  if (!(l < t / 2.0)) throw std::invalid_argument("cell problem: boundary width l must satisfy l < t/2 (empty free set)");
  // cube plus Voronoi margin must fit in the lattice box
  Box need = cube_lattice_box(fr, center, t, 2.0 * ps.R_declared - 1e-9);
  for (int k = 0; k < ps.dim; ++k)
    if (need.lo[k] < ps.box.lo[k] - 1e-9 || need.hi[k] > ps.box.hi[k] + 1e-9)
      throw std::invalid_argument("cell problem: cube exceeds the lattice box");
}

}  // namespace

SpinProblem build_boundary_problem(const PointSet& ps, const NeighborGraph& g, const CouplingModel& m,
                                   const Frame& domain, const Vec& center, double side, double l,
                                   const Vec& datum_nu) {
  check_cell_geometry(ps, domain, center, side, l, m);

  SpinProblem prob;
  std::vector<char> in_cube(ps.points.size(), 0);
  for (size_t i = 0; i < ps.points.size(); ++i) {
    const Vec& p = ps.points[i];
    double sc = domain.sup_coord(p, center);
    if (sc > side / 2.0) continue;
    in_cube[i] = 1;
    prob.vertices.push_back(static_cast<int32_t>(i));
    if (side / 2.0 - sc <= l) {
      int8_t sign = dot(p - center, datum_nu) >= 0.0 ? 1 : -1;
      prob.frozen.emplace_back(static_cast<int32_t>(i), sign);
    } else {
      prob.free_verts.push_back(static_cast<int32_t>(i));
    }
  }
  auto add_edge = [&](int32_t i, int32_t j, double c) {
    if (!in_cube[static_cast<size_t>(i)] || !in_cube[static_cast<size_t>(j)]) return;
    if (c <= 0.0) return;
    prob.edges.push_back({i, j, 2.0 * c});
  };
  for (const NnPair& e : g.nn)
    add_edge(e.i, e.j, m.c_nn(dist(ps.points[static_cast<size_t>(e.i)], ps.points[static_cast<size_t>(e.j)])));
  for (const LrPair& e : g.lr)
    add_edge(e.i, e.j, m.c_lr(dist(ps.points[static_cast<size_t>(e.i)], ps.points[static_cast<size_t>(e.j)])));
  return prob;
}

SpinProblem build_cell_problem(const PointSet& ps, const NeighborGraph& g, const CouplingModel& m,
                               const Frame& fr, const Vec& center, double t, double l) {
  return build_boundary_problem(ps, g, m, fr, center, t, l, fr.nu);
}

MuResult mu_on_lattice(const PointSet& ps, const NeighborGraph& g, const CouplingModel& m,
                       const Frame& fr, const Vec& center, double t, double l) {
  auto t0 = std::chrono::steady_clock::now();
  SpinProblem prob = build_cell_problem(ps, g, m, fr, center, t, l);

  // Planar test configuration: the datum extended to every cube point.
  int64_t flat_scaled = 0;
  {
    auto datum = [&](int32_t idx) {
      return fr.normal_coord(ps.points[static_cast<size_t>(idx)], center) >= 0.0 ? 1 : -1;
    };
    for (const auto& e : prob.edges)
      if (datum(e.i) != datum(e.j)) flat_scaled += std::llround(e.w * FlowNetwork::kScale);
  }

  GroundState gs = solve(prob);
  if (!gs.optimal) throw std::runtime_error("cell problem: max-flow/cut certificate failed");
  if (gs.energy_scaled > flat_scaled)
    throw std::runtime_error("cell problem: minimum exceeds the planar test configuration");

  MuResult r;
  r.mu = gs.energy;
  r.mu_norm = gs.energy / std::pow(t, ps.dim - 1);
  r.n_free = static_cast<int>(prob.free_verts.size());
  r.n_frozen = static_cast<int>(prob.frozen.size());
  r.flat_energy = static_cast<double>(flat_scaled) / static_cast<double>(FlowNetwork::kScale);
  r.solve_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

MuResult mu(const CellProblemSpec& spec) {
  validate_model(spec.model, spec.lattice.dim);
  Frame fr = frame(spec.nu, spec.lattice.dim);
  double r = lattice_r(spec.lattice);
  double R = lattice_R(spec.lattice);
  double l = spec.l > 0.0 ? spec.l : boundary_width(spec.t, spec.model.L, r);
  Box box = cube_lattice_box(fr, spec.center, spec.t, 2.0 * R + r);
  PointSet ps = make_lattice(spec.lattice, box, spec.seed);
  NeighborGraph g = neighbor_graph(ps, spec.model.L);
  return mu_on_lattice(ps, g, spec.model, fr, spec.center, spec.t, l);
}

PhiEstimate phi_estimate_from_samples(const Vec& nu, std::vector<PhiSample> samples,
                                      const std::vector<double>& t_list) {
  PhiEstimate est;
  est.nu = nu;
  est.samples = std::move(samples);

  for (double t : t_list) {
    PhiTStats st;
    st.t = t;
    double sum = 0.0, sum2 = 0.0;
    for (const PhiSample& s : est.samples)
      if (!s.failed && s.t == t) {
        sum += s.mu_norm;
        sum2 += s.mu_norm * s.mu_norm;
        ++st.n;
      }
    if (st.n > 0) {
      st.mean = sum / st.n;
      if (st.n > 1) st.sd = std::sqrt(std::max(0.0, (sum2 - sum * sum / st.n) / (st.n - 1)));
    }
    est.per_t.push_back(st);
  }
  for (auto it = est.per_t.rbegin(); it != est.per_t.rend(); ++it)
    if (it->n > 0) {
      est.extrapolated = it->mean;
      break;
    }

  // Least-squares fit mean(t) = phi + a/t as a convergence diagnostic.
  std::vector<const PhiTStats*> pts;
  for (const auto& st : est.per_t)
    if (st.n > 0) pts.push_back(&st);
  if (pts.size() >= 2) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    double n = static_cast<double>(pts.size());
    for (auto* st : pts) {
      double x = 1.0 / st->t;
      sx += x;
      sy += st->mean;
      sxx += x * x;
      sxy += x * st->mean;
    }
    double det = n * sxx - sx * sx;
    if (std::abs(det) > 1e-30) {
      est.fit_coeff = (n * sxy - sx * sy) / det;
      est.fit_phi = (sy * sxx - sx * sxy) / det;
      est.fit_valid = true;
      for (auto* st : pts)
        est.fit_residual =
            std::max(est.fit_residual, std::abs(est.fit_phi + est.fit_coeff / st->t - st->mean));
    }
  }
  return est;
}

PhiEstimate estimate_phi(const Vec& nu, const std::vector<double>& t_list,
                         const std::vector<uint64_t>& seeds, const CouplingModel& m,
                         const LatticeParams& lat) {
  if (t_list.empty() || !std::is_sorted(t_list.begin(), t_list.end()) ||
      std::adjacent_find(t_list.begin(), t_list.end()) != t_list.end())
    throw std::invalid_argument("estimate_phi: t_list must be strictly increasing");
  if (seeds.empty()) throw std::invalid_argument("estimate_phi: at least one seed required");

  Vec unit = normalized(nu);
  std::vector<PhiSample> samples;
  for (double t : t_list)
    for (uint64_t seed : seeds) {
      PhiSample s;
      s.t = t;
      s.seed = seed;
      try {
        CellProblemSpec spec;
        spec.nu = unit;
        spec.t = t;
        spec.lattice = lat;
        spec.seed = seed;
        spec.model = m;
        MuResult r = mu(spec);
        s.mu = r.mu;
        s.mu_norm = r.mu_norm;
        s.n_free = r.n_free;
        s.n_frozen = r.n_frozen;
        s.solve_ms = r.solve_ms;
      } catch (const std::exception& e) {
        s.failed = true;
        s.error = e.what();
      }
      samples.push_back(std::move(s));
    }
  return phi_estimate_from_samples(unit, std::move(samples), t_list);
}

SweepResult sweep(int k, const std::vector<double>& t_list, const std::vector<uint64_t>& seeds,
                  const CouplingModel& m, const LatticeParams& lat) {
  if (k < 1) throw std::invalid_argument("sweep: need at least one direction");
  if (lat.dim != 2) throw std::invalid_argument("sweep: directions sweep is 2D");
  SweepResult res;
  for (int i = 0; i < k; ++i) {
    double ang = M_PI * static_cast<double>(i) / static_cast<double>(k);
    res.angles.push_back(ang);
    res.estimates.push_back(estimate_phi(Vec(std::cos(ang), std::sin(ang)), t_list, seeds, m, lat));
  }
  res.phi_max = -std::numeric_limits<double>::infinity();
  res.phi_min = std::numeric_limits<double>::infinity();
  double sum = 0.0;
  for (const auto& e : res.estimates) {
    res.phi_max = std::max(res.phi_max, e.extrapolated);
    res.phi_min = std::min(res.phi_min, e.extrapolated);
    sum += e.extrapolated;
  }
  res.phi_mean = sum / static_cast<double>(k);
  res.rel_spread = res.phi_mean != 0.0 ? (res.phi_max - res.phi_min) / res.phi_mean : 0.0;
  return res;
}

TranslationReport translation_check(const Vec& nu, double t, const std::vector<uint64_t>& seeds,
                                    const std::vector<Vec>& offsets, const CouplingModel& m,
                                    const LatticeParams& lat) {
  if (offsets.empty() || seeds.empty())
    throw std::invalid_argument("translation_check: offsets and seeds must be non-empty");
  double allowance = t;
  for (const Vec& z : offsets)
    for (int k = 0; k < lat.dim; ++k)
      if (std::abs(z[k]) > allowance)
        throw std::invalid_argument("translation_check: offset beyond the lattice box allowance");

  Frame fr = frame(nu, lat.dim);
  double r = lattice_r(lat);
  double R = lattice_R(lat);
  double l = boundary_width(t, m.L, r);

  // One realization per seed, covering every offset cube.
  Box box = cube_lattice_box(fr, Vec(), t, 2.0 * R + r + allowance);

  TranslationReport rep;
  rep.offsets = offsets;
  rep.seed_mean_mu_norm.assign(offsets.size(), 0.0);
  for (uint64_t seed : seeds) {
    PointSet ps = make_lattice(lat, box, seed);
    NeighborGraph g = neighbor_graph(ps, m.L);
    for (size_t oi = 0; oi < offsets.size(); ++oi) {
      MuResult res = mu_on_lattice(ps, g, m, fr, offsets[oi], t, l);
      rep.seed_mean_mu_norm[oi] += res.mu_norm / static_cast<double>(seeds.size());
    }
  }
  for (size_t a = 0; a < offsets.size(); ++a)
    for (size_t b = a + 1; b < offsets.size(); ++b) {
      double x = rep.seed_mean_mu_norm[a], y = rep.seed_mean_mu_norm[b];
      double base = std::max(std::abs(x), std::abs(y));
      if (base > 0.0) rep.max_rel_deviation = std::max(rep.max_rel_deviation, std::abs(x - y) / base);
    }
  return rep;
}

SubaddReport subadditivity_check(const Vec& nu, double t, uint64_t seed, double K,
                                 const CouplingModel& m, const LatticeParams& lat) {
  Frame fr = frame(nu, lat.dim);
  double r = lattice_r(lat);
  double R = lattice_R(lat);
  double l = boundary_width(2.0 * t, m.L, r);
  double l_sub = boundary_width(t, m.L, r);

  Box box = cube_lattice_box(fr, Vec(), 2.0 * t, 2.0 * R + r);
  PointSet ps = make_lattice(lat, box, seed);
  NeighborGraph g = neighbor_graph(ps, m.L);

  SubaddReport rep;
  rep.K_given = K;
  rep.mu_big = mu_on_lattice(ps, g, m, fr, Vec(), 2.0 * t, l).mu;

  // Frame-aligned side-t subcubes tiling the central slab of the 2t cube.
  int n_tangent = lat.dim - 1;
  int n_subs = 1 << n_tangent;
  for (int s = 0; s < n_subs; ++s) {
    Vec c;
    for (int i = 0; i < n_tangent; ++i) {
      double sign = (s >> i) & 1 ? 0.5 : -0.5;
      c = c + fr.tangents[static_cast<size_t>(i)] * (sign * t);
    }
    rep.mu_subs.push_back(mu_on_lattice(ps, g, m, fr, c, t, l_sub).mu);
  }
  rep.interfaces = lat.dim == 2 ? 1 : 4;

  double sum_subs = std::accumulate(rep.mu_subs.begin(), rep.mu_subs.end(), 0.0);
  double scale = std::pow(t, lat.dim - 2) * static_cast<double>(rep.interfaces);
  rep.K_eff = std::max(0.0, (rep.mu_big - sum_subs) / scale);
  rep.holds_with_K = rep.mu_big <= sum_subs + K * scale + 1e-9;
  return rep;
}

}  // namespace spinhom
