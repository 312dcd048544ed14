#pragma once

#include <cstdint>
#include <vector>

#include "spinhom/cellproblem.hpp"

namespace spinhom {

// Open polyline (or closed loop) carrying an interface; the normal of each
// segment is the left normal of the traversal direction.
struct PolygonalInterface {
  std::vector<Vec> vertices;
  bool closed = false;
};

// Direction-sampled surface tension with flip-symmetric periodic linear
// interpolation in the angle.
class PhiTable {
 public:
  PhiTable() = default;
  PhiTable(std::vector<double> angles, std::vector<double> values);

  static PhiTable constant(double value);
  // k equi-spaced nodes on the half-circle from a callable angle -> value.
  template <typename F>
  static PhiTable sampled(int k, F&& f) {
    std::vector<double> a, v;
    for (int i = 0; i < k; ++i) {
      double ang = M_PI * static_cast<double>(i) / static_cast<double>(k);
      a.push_back(ang);
      v.push_back(f(ang));
    }
    return PhiTable(std::move(a), std::move(v));
  }

  double eval_angle(double theta) const;
  double eval(const Vec& nu) const;

  // Midpoint subadditivity of the 1-homogeneous extension on random
  // direction pairs; false flags a non-convex table.
  bool convex(double tol = 1e-6, int trials = 4096, uint64_t seed = 12345) const;

  const std::vector<double>& angles() const { return angles_; }
  const std::vector<double>& values() const { return values_; }

 private:
  std::vector<double> angles_;  // sorted, in [0, pi)
  std::vector<double> values_;  // all positive
};

// sum over segments of length x phi(unit left normal)
double surface_energy(const PolygonalInterface& interface, const PhiTable& phi);

struct BvpResult {
  double value = 0.0;
  double chord_length = 0.0;
  bool convex_ok = true;  // false: chord optimality not certified, value still the chord's
};

// Continuum minimum for the planar two-phase datum on a square [0,side]^2:
// the straight chord where the datum interface crosses the open square.
BvpResult bvp_continuum_min(double side, const Vec& nu, const PhiTable& phi, const Vec& datum_point);

struct GammaRow {
  double eps = 0.0;
  double discrete_min = 0.0;
  double continuum_min = 0.0;
  double rel_gap = 0.0;
};

struct GammaResult {
  std::vector<GammaRow> rows;
  bool gap_monotone = true;  // trend diagnostic over the eps schedule
};

// Boundary-value convergence study: discrete minima of the scaled energies
// under the planar datum against chord x phi(nu), for each eps.
GammaResult gamma_check(const std::vector<double>& eps_list, double domain_side, const Vec& nu,
                        const LatticeParams& lat, const CouplingModel& m, const PhiTable& phi,
                        uint64_t seed);

}  // namespace spinhom
