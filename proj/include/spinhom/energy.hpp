#pragma once

#include <functional>
#include <string>

#include "spinhom/voronoi.hpp"

namespace spinhom {

enum class LrKernel { zero, power, exponential };

// Pair-interaction coefficients: bounded nearest-neighbor couplings and an
// integrable long-range kernel evaluated on the separation magnitude.
struct CouplingModel {
  double nn_const = 1.0;
  std::function<double(double)> nn_radial;  // optional; overrides nn_const

  LrKernel family = LrKernel::zero;
  double beta = 0.0;    // kernel amplitude
  double p = 0.0;       // power exponent: c_lr(s) = beta * s^-p
  double lambda = 0.0;  // exponential rate: c_lr(s) = beta * exp(-lambda s)

  double L = 0.0;  // truncation radius: pairs beyond L carry no energy

  double c_nn(double s) const { return nn_radial ? nn_radial(s) : nn_const; }
  double c_lr(double s) const;
  double J_lr(double s) const { return c_lr(s); }

  // Smallest declared coupling bound: 1/C <= c_nn <= C.
  double C_bound(double R) const;
};

// Checks the integrability and boundedness clauses; throws with the failing
// clause named. Power kernels need p > n+1.
void validate_model(const CouplingModel& m, int n);

// Closed-form upper bound for the truncated long-range tail
//   sum over offsets |xi| > L of J_lr(|xi_hat|) (|xi| + 2R),
// obtained by comparing against the radial integral with the offsets shaded
// down by r'*sqrt(n) = r. Monotone decreasing in L; +infinity when a power
// kernel cannot be controlled at this L.
double tail_bound(const CouplingModel& m, int n, double r, double R, double L);

// Spin configurations live on point indices; 0 marks "undefined".
struct SpinConfig {
  std::vector<int8_t> values;
  std::vector<uint8_t> frozen;

  int8_t at(int idx) const { return values[static_cast<size_t>(idx)]; }
};

// eps^{n-1} * sum over unordered pairs (counted once) with both endpoints in
// `region` of c * |u(x) - u(y)|. nn pairs use c_nn, lr pairs use c_lr.
double total_energy(const SpinConfig& u, const NeighborGraph& g, const CouplingModel& m,
                    const PointSet& ps, const std::function<bool(const Vec&)>& region, double eps);

inline constexpr const char* kPairConvention = "unordered-pairs-once";

}  // namespace spinhom
