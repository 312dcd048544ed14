#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "spinhom/groundstate.hpp"

namespace spinhom {

// Orthonormal frame completing the jump normal; deterministic in nu.
struct Frame {
  int dim = 2;
  Vec nu;
  std::array<Vec, 2> tangents;  // n-1 of these are meaningful

  // sup-metric coordinate of p relative to the cube center
  double sup_coord(const Vec& p, const Vec& center) const;
  double normal_coord(const Vec& p, const Vec& center) const { return dot(p - center, nu); }
};

Frame frame(const Vec& nu, int dim);

struct LatticeParams {
  std::string model = "square";  // square | triangular | perturbed | parking
  int dim = 2;
  double a = 0.0;        // perturbed amplitude
  double diameter = 1.0; // parking
  int defects = 0;       // points removed after generation
};

double lattice_r(const LatticeParams& lat);
double lattice_R(const LatticeParams& lat);  // post-defect declared constant
PointSet make_lattice(const LatticeParams& lat, const Box& box, uint64_t seed);

// Boundary layer schedule l(t) = max(L + r, sqrt(t)): wide enough for the
// truncation radius, vanishing relative to t.
double boundary_width(double t, const CouplingModel& m, const PointSet& ps);
double boundary_width(double t, double L, double r);

struct CellProblemSpec {
  Vec nu;
  Vec center;
  double t = 0.0;
  double l = 0.0;  // 0 = use boundary_width schedule
  LatticeParams lattice;
  uint64_t seed = 0;
  CouplingModel model;
};

// Points of the closed oriented cube; spins within l of the cube boundary
// (frame sup-metric) are frozen to the planar datum sign(<p - center, nu>),
// with the hyperplane itself on the + side.
SpinProblem build_cell_problem(const PointSet& ps, const NeighborGraph& g, const CouplingModel& m,
                               const Frame& fr, const Vec& center, double t, double l);

// Same construction with the datum normal decoupled from the cube frame
// (boundary-value problems on axis-aligned domains).
SpinProblem build_boundary_problem(const PointSet& ps, const NeighborGraph& g, const CouplingModel& m,
                                   const Frame& domain, const Vec& center, double side, double l,
                                   const Vec& datum_nu);

struct MuResult {
  double mu = 0.0;
  double mu_norm = 0.0;
  int n_free = 0;
  int n_frozen = 0;
  double flat_energy = 0.0;  // energy of the planar test configuration (upper bound)
  double solve_ms = 0.0;
};

// Cell minimum on a fresh lattice; exact via max-flow.
MuResult mu(const CellProblemSpec& spec);

// Cell minimum on a provided lattice/graph (shared-realization studies).
MuResult mu_on_lattice(const PointSet& ps, const NeighborGraph& g, const CouplingModel& m,
                       const Frame& fr, const Vec& center, double t, double l);

struct PhiSample {
  double t = 0.0;
  uint64_t seed = 0;
  double mu = 0.0;
  double mu_norm = 0.0;
  int n_free = 0;
  int n_frozen = 0;
  double solve_ms = 0.0;
  bool failed = false;
  std::string error;
};

struct PhiTStats {
  double t = 0.0;
  double mean = 0.0;
  double sd = 0.0;
  int n = 0;
};

struct PhiEstimate {
  Vec nu;
  std::vector<PhiSample> samples;
  std::vector<PhiTStats> per_t;
  double extrapolated = 0.0;  // seed mean at the largest t
  bool fit_valid = false;     // 1/t fit over per-t means (needs >= 2 t values)
  double fit_phi = 0.0;
  double fit_coeff = 0.0;
  double fit_residual = 0.0;
  std::string convention = kPairConvention;
};

PhiEstimate estimate_phi(const Vec& nu, const std::vector<double>& t_list,
                         const std::vector<uint64_t>& seeds, const CouplingModel& m,
                         const LatticeParams& lat);

// Statistics, extrapolation and the 1/t fit over precomputed samples.
PhiEstimate phi_estimate_from_samples(const Vec& nu, std::vector<PhiSample> samples,
                                      const std::vector<double>& t_list);

struct SweepResult {
  std::vector<double> angles;  // equi-spaced on the half-circle
  std::vector<PhiEstimate> estimates;
  double phi_max = 0.0, phi_min = 0.0, phi_mean = 0.0, rel_spread = 0.0;
};

SweepResult sweep(int k, const std::vector<double>& t_list, const std::vector<uint64_t>& seeds,
                  const CouplingModel& m, const LatticeParams& lat);

struct TranslationReport {
  std::vector<Vec> offsets;
  std::vector<double> seed_mean_mu_norm;
  double max_rel_deviation = 0.0;
};

// Seed-mean cell minima for cubes centered at integer offsets of one
// realization per seed; offsets beyond t in sup-norm exceed the lattice box.
TranslationReport translation_check(const Vec& nu, double t, const std::vector<uint64_t>& seeds,
                                    const std::vector<Vec>& offsets, const CouplingModel& m,
                                    const LatticeParams& lat);

struct SubaddReport {
  double mu_big = 0.0;            // cell minimum at side 2t
  std::vector<double> mu_subs;    // frame-aligned side-t subcubes of the central slab
  int interfaces = 0;             // internal interfaces of the tiling
  double K_eff = 0.0;             // smallest K validating the inequality
  double K_given = 0.0;
  bool holds_with_K = false;
};

SubaddReport subadditivity_check(const Vec& nu, double t, uint64_t seed, double K,
                                 const CouplingModel& m, const LatticeParams& lat);

}  // namespace spinhom
