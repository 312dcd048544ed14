#include "spinhom/energy.hpp"

#include <cmath>
#include <stdexcept>

namespace spinhom {

double CouplingModel::c_lr(double s) const {
  switch (family) {
    case LrKernel::zero:
      return 0.0;
    case LrKernel::power:
      return beta * std::pow(s, -p);
    case LrKernel::exponential:
      return beta * std::exp(-lambda * s);
  }
  return 0.0;
}

double CouplingModel::C_bound(double R) const {
  if (!nn_radial) return std::max(nn_const, 1.0 / nn_const);
  double c = 1.0;
  // No closed form for user radials; sample the admissible separation range.
  for (int k = 0; k <= 256; ++k) {
    double s = R * (1.0 + static_cast<double>(k)) / 128.0;  // spans (0, 2R]
    double v = nn_radial(s);
    if (v > 0.0) c = std::max({c, v, 1.0 / v});
  }
  return c;
}

void validate_model(const CouplingModel& m, int n) {
  if (n != 2 && n != 3) throw std::invalid_argument("coupling model: dimension must be 2 or 3");
  if (m.L < 0.0) throw std::invalid_argument("coupling model: truncation radius L must be >= 0");
  if (!m.nn_radial && !(m.nn_const > 0.0))
    throw std::invalid_argument("coupling model: nearest-neighbor coupling must be positive (lower bound clause)");
  switch (m.family) {
    case LrKernel::zero:
      break;
    case LrKernel::power:
      if (!(m.beta >= 0.0)) throw std::invalid_argument("coupling model: power kernel needs beta >= 0");
      if (!(m.p > static_cast<double>(n) + 1.0))
        throw std::invalid_argument(
            "coupling model: power kernel integrability fails, needs p > n+1 (first-moment clause)");
      break;
    case LrKernel::exponential:
      if (!(m.beta >= 0.0)) throw std::invalid_argument("coupling model: exponential kernel needs beta >= 0");
      if (!(m.lambda > 0.0))
        throw std::invalid_argument("coupling model: exponential kernel needs lambda > 0 (first-moment clause)");
      break;
  }
}

namespace {

// int_{lo}^{hi} u^k du summed with coefficients.
double poly_integral(const std::vector<double>& coef, double lo, double hi) {
  double s = 0.0;
  for (size_t k = 0; k < coef.size(); ++k) {
    double e = static_cast<double>(k) + 1.0;
    s += coef[k] * (std::pow(hi, e) - std::pow(lo, e)) / e;
  }
  return s;
}

// int_{lo}^{inf} u^k exp(-lambda u) du = k!/lambda^{k+1} e^{-lambda lo} sum_j (lambda lo)^j / j!
double exp_moment(int k, double lambda, double lo) {
  double fact = 1.0;
  for (int j = 2; j <= k; ++j) fact *= j;
  double s = 0.0, term = 1.0;
  for (int j = 0; j <= k; ++j) {
    if (j > 0) term *= lambda * lo / j;
    s += term;
  }
  return fact / std::pow(lambda, k + 1) * std::exp(-lambda * lo) * s;
}

}  // namespace

double tail_bound(const CouplingModel& m, int n, double r, double R, double L) {
  if (!(L > 0.0)) throw std::invalid_argument("tail_bound: L must be positive");
  validate_model(m, n);
  if (m.family == LrKernel::zero || m.beta == 0.0) return 0.0;

  // Offsets live on the r'-grid; the nearest-offset magnitude satisfies
  // |xi_hat| >= |xi| - r and each grid cell has volume r'^n.
  double rp = r / std::sqrt(static_cast<double>(n));
  double a = 3.0 * r + 2.0 * R;
  double b = 2.0 * r;
  double L1 = L - r;        // clamp point for the kernel argument
  double L0 = L - 3.0 * r;  // lower limit after shading |x| down twice

  std::vector<double> coef;  // P(u) = (u+a)(u+b)^{n-1}
  if (n == 2)
    coef = {a * b, a + b, 1.0};
  else
    coef = {a * b * b, b * b + 2.0 * a * b, a + 2.0 * b, 1.0};

  double inv_cell = 1.0 / std::pow(rp, n);
  double sphere = n == 2 ? 2.0 * M_PI : 4.0 * M_PI;

  if (m.family == LrKernel::power) {
    if (L1 <= 0.0) return std::numeric_limits<double>::infinity();
    double lo = std::max(L0, 0.0);
    double head = m.beta * std::pow(L1, -m.p) * poly_integral(coef, lo, L1);
    double tail = 0.0;
    for (size_t k = 0; k < coef.size(); ++k) {
      double e = m.p - static_cast<double>(k) - 1.0;  // > 0 since p > n+1
      tail += coef[k] * std::pow(L1, -e) / e;
    }
    tail *= m.beta;
    return inv_cell * sphere * (head + tail);
  }

  // exponential kernel
  double L1c = std::max(L1, 0.0);
  double lo = std::max(std::min(L0, L1c), 0.0);
  double head = m.beta * std::exp(-m.lambda * L1c) * poly_integral(coef, lo, L1c);
  double tail = 0.0;
  for (size_t k = 0; k < coef.size(); ++k) tail += coef[k] * exp_moment(static_cast<int>(k), m.lambda, L1c);
  tail *= m.beta;
  return inv_cell * sphere * (head + tail);
}

double total_energy(const SpinConfig& u, const NeighborGraph& g, const CouplingModel& m,
                    const PointSet& ps, const std::function<bool(const Vec&)>& region, double eps) {
  if (!(eps > 0.0)) throw std::invalid_argument("total_energy: eps must be positive");
  auto in_region = [&](int idx) { return region(ps.points[static_cast<size_t>(idx)]); };
  auto spin = [&](int idx) {
    int8_t v = u.values[static_cast<size_t>(idx)];
    if (v == 0) throw std::invalid_argument("total_energy: spin undefined on a point of the region");
    return v;
  };

  // Fixed edge order (nn then lr, both in canonical pair order) keeps the
  // accumulated value reproducible.
  double acc = 0.0;
  for (const NnPair& e : g.nn) {
    if (!in_region(e.i) || !in_region(e.j)) continue;
    if (spin(e.i) == spin(e.j)) continue;
    double s = dist(ps.points[static_cast<size_t>(e.i)], ps.points[static_cast<size_t>(e.j)]);
    acc += 2.0 * m.c_nn(s);
  }
  for (const LrPair& e : g.lr) {
    if (!in_region(e.i) || !in_region(e.j)) continue;
    if (spin(e.i) == spin(e.j)) continue;
    double s = dist(ps.points[static_cast<size_t>(e.i)], ps.points[static_cast<size_t>(e.j)]);
    acc += 2.0 * m.c_lr(s);
  }
  return std::pow(eps, ps.dim - 1) * acc;
}

}  // namespace spinhom
