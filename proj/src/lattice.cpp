#include "spinhom/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <set>
#include <stdexcept>

#include "spinhom/rng.hpp"

namespace spinhom {

namespace {

// All generated coordinates are snapped to this binary quantum. Coordinates
// stay below 2^11 in magnitude, so every snapped value and every sum with an
// integer offset is exactly representable; integer translations are then
// exactly invertible.
constexpr double kQuantum = 0x1.0p-40;

inline double snap(double x) { return std::round(x / kQuantum) * kQuantum; }

// RNG streams (see rng.hpp: draws are keyed, not stateful).
constexpr uint32_t kStreamPerturbAxis0 = 0;  // +1, +2 for further axes
constexpr uint32_t kStreamRsaVoxel = 10;
constexpr uint32_t kStreamRsaAxis0 = 11;  // +1, +2
constexpr uint32_t kStreamDefects = 20;

struct BucketGrid {
  // Uniform buckets used by admissibility estimation; independent of the
  // declared constants so it also works on invalid inputs.
  const std::vector<Vec>* pts;
  int dim;
  Vec lo;
  double side;
  std::array<int64_t, 3> n{1, 1, 1};
  std::vector<std::vector<int32_t>> cells;

  BucketGrid(const std::vector<Vec>& points, const Box& box, double target_side) : pts(&points), dim(box.dim) {
    lo = box.lo;
    side = std::max(target_side, 1e-12);
    for (int i = 0; i < dim; ++i)
      n[static_cast<size_t>(i)] =
          std::max<int64_t>(1, static_cast<int64_t>(std::floor(box.side(i) / side)) + 1);
    cells.resize(static_cast<size_t>(n[0] * n[1] * (dim == 3 ? n[2] : 1)));
    for (size_t i = 0; i < points.size(); ++i) cell_of(points[i]).push_back(static_cast<int32_t>(i));
  }

  int64_t key(int64_t ix, int64_t iy, int64_t iz) const { return (iz * n[1] + iy) * n[0] + ix; }

  void coords(const Vec& p, int64_t& ix, int64_t& iy, int64_t& iz) const {
    auto cl = [](int64_t v, int64_t m) { return std::clamp<int64_t>(v, 0, m - 1); };
    ix = cl(static_cast<int64_t>(std::floor((p[0] - lo[0]) / side)), n[0]);
    iy = cl(static_cast<int64_t>(std::floor((p[1] - lo[1]) / side)), n[1]);
    iz = dim == 3 ? cl(static_cast<int64_t>(std::floor((p[2] - lo[2]) / side)), n[2]) : 0;
  }

  std::vector<int32_t>& cell_of(const Vec& p) {
    int64_t ix, iy, iz;
    coords(p, ix, iy, iz);
    return cells[static_cast<size_t>(key(ix, iy, iz))];
  }

  // Nearest point to p, ignoring `exclude`. Expanding-ring search.
  double nearest_dist(const Vec& p, int exclude = -1) const {
    int64_t cx, cy, cz;
    coords(p, cx, cy, cz);
    double best2 = std::numeric_limits<double>::infinity();
    int64_t max_ring = std::max({n[0], n[1], n[2]});
    for (int64_t ring = 0; ring <= max_ring; ++ring) {
      if (best2 < std::numeric_limits<double>::infinity() &&
          (static_cast<double>(ring) - 1.0) * side > std::sqrt(best2))
        break;
      int64_t zl = dim == 3 ? std::max<int64_t>(0, cz - ring) : 0;
      int64_t zh = dim == 3 ? std::min<int64_t>(n[2] - 1, cz + ring) : 0;
      for (int64_t iz = zl; iz <= zh; ++iz)
        for (int64_t iy = std::max<int64_t>(0, cy - ring); iy <= std::min<int64_t>(n[1] - 1, cy + ring); ++iy)
          for (int64_t ix = std::max<int64_t>(0, cx - ring); ix <= std::min<int64_t>(n[0] - 1, cx + ring); ++ix) {
            if (std::max({std::llabs(ix - cx), std::llabs(iy - cy), std::llabs(iz - cz)}) != ring) continue;
            for (int32_t idx : cells[static_cast<size_t>(key(ix, iy, iz))]) {
              if (idx == exclude) continue;
              best2 = std::min(best2, norm2((*pts)[static_cast<size_t>(idx)] - p));
            }
          }
    }
    return std::sqrt(best2);
  }

  bool any_within(const Vec& p, double radius) const {
    int64_t cx, cy, cz;
    coords(p, cx, cy, cz);
    int64_t reach = static_cast<int64_t>(std::ceil(radius / side)) + 1;
    double r2 = radius * radius;
    int64_t zl = dim == 3 ? std::max<int64_t>(0, cz - reach) : 0;
    int64_t zh = dim == 3 ? std::min<int64_t>(n[2] - 1, cz + reach) : 0;
    for (int64_t iz = zl; iz <= zh; ++iz)
      for (int64_t iy = std::max<int64_t>(0, cy - reach); iy <= std::min<int64_t>(n[1] - 1, cy + reach); ++iy)
        for (int64_t ix = std::max<int64_t>(0, cx - reach); ix <= std::min<int64_t>(n[0] - 1, cx + reach); ++ix)
          for (int32_t idx : cells[static_cast<size_t>(key(ix, iy, iz))])
            if (norm2((*pts)[static_cast<size_t>(idx)] - p) <= r2) return true;
    return false;
  }
};

void check_dim(int dim) {
  if (dim != 2 && dim != 3) throw std::invalid_argument("dim must be 2 or 3");
}

}  // namespace

PointSet generate_deterministic(DeterministicModel model, int dim, const Box& box) {
  check_dim(dim);
  if (box.dim != dim) throw std::invalid_argument("box dimension mismatch");
  if (box.min_side() < 4.0) throw std::invalid_argument("box side must be at least 4");

  PointSet ps;
  ps.dim = dim;
  ps.box = box;
  if (model == DeterministicModel::square) {
    ps.r_declared = 1.0;
    ps.R_declared = std::sqrt(static_cast<double>(dim)) / 2.0;
    ps.provenance.model = "square";
    int64_t lo[3] = {0, 0, 0}, hi[3] = {0, 0, 0};
    for (int i = 0; i < dim; ++i) {
      lo[i] = static_cast<int64_t>(std::ceil(box.lo[i]));
      hi[i] = static_cast<int64_t>(std::floor(box.hi[i]));
    }
    for (int64_t k = lo[2]; k <= (dim == 3 ? hi[2] : lo[2]); ++k)
      for (int64_t j = lo[1]; j <= hi[1]; ++j)
        for (int64_t i = lo[0]; i <= hi[0]; ++i)
          ps.points.push_back(dim == 3 ? Vec(static_cast<double>(i), static_cast<double>(j), static_cast<double>(k))
                                       : Vec(static_cast<double>(i), static_cast<double>(j)));
  } else {
    if (dim != 2) throw std::invalid_argument("triangular lattice requires dim = 2");
    ps.r_declared = 1.0;
    ps.R_declared = 1.0 / std::sqrt(3.0);
    ps.provenance.model = "triangular";
    double row_h = std::sqrt(3.0) / 2.0;
    int64_t j_lo = static_cast<int64_t>(std::ceil(box.lo[1] / row_h));
    int64_t j_hi = static_cast<int64_t>(std::floor(box.hi[1] / row_h));
    for (int64_t j = j_lo; j <= j_hi; ++j) {
      double y = snap(static_cast<double>(j) * row_h);
      double shift = (j % 2 != 0) ? 0.5 : 0.0;
      int64_t i_lo = static_cast<int64_t>(std::ceil(box.lo[0] - shift));
      int64_t i_hi = static_cast<int64_t>(std::floor(box.hi[0] - shift));
      for (int64_t i = i_lo; i <= i_hi; ++i) ps.points.push_back(Vec(static_cast<double>(i) + shift, y));
    }
  }
  return ps;
}

PointSet generate_perturbed(int dim, const Box& box, double a, uint64_t seed) {
  check_dim(dim);
  if (box.dim != dim) throw std::invalid_argument("box dimension mismatch");
  if (!(a >= 0.0 && a < 0.5)) throw std::invalid_argument("perturbation amplitude must satisfy 0 <= a < 1/2");

  PointSet ps;
  ps.dim = dim;
  ps.box = box;
  ps.r_declared = 1.0 - 2.0 * a;
  ps.R_declared = std::sqrt(static_cast<double>(dim)) * (0.5 + a);
  ps.provenance.model = "perturbed";
  ps.provenance.seed = seed;
  ps.provenance.params = {{"a", a}, {"rng", kRngName}};

  // Only integer sites whose whole displacement cube stays in the box are
  // kept, so all points lie inside the box for any draw. Draws are keyed by
  // the site relative to the box anchor; the anchor shifts along with the
  // box, which makes generation on box+z exactly equal to translating the
  // realization generated on box (the operational form of stationarity).
  int64_t lo[3] = {0, 0, 0}, hi[3] = {0, 0, 0};
  for (int i = 0; i < dim; ++i) {
    lo[i] = static_cast<int64_t>(std::ceil(box.lo[i] + a));
    hi[i] = static_cast<int64_t>(std::floor(box.hi[i] - a));
  }
  ps.provenance.params["site_anchor"] = dim == 3 ? std::vector<int64_t>{lo[0], lo[1], lo[2]}
                                                 : std::vector<int64_t>{lo[0], lo[1]};
  for (int64_t k = lo[2]; k <= (dim == 3 ? hi[2] : lo[2]); ++k)
    for (int64_t j = lo[1]; j <= hi[1]; ++j)
      for (int64_t i = lo[0]; i <= hi[0]; ++i) {
        Vec p;
        int64_t site[3] = {i, j, k};
        for (int ax = 0; ax < dim; ++ax) {
          double u = site_uniform(seed, i - lo[0], j - lo[1], dim == 3 ? k - lo[2] : 0,
                                  kStreamPerturbAxis0 + static_cast<uint32_t>(ax));
          p[ax] = snap(static_cast<double>(site[ax]) + (2.0 * u - 1.0) * a);
        }
        ps.points.push_back(p);
      }
  return ps;
}

PointSet generate_random_parking(const Box& box, double diameter, uint64_t seed) {
  check_dim(box.dim);
  if (!(diameter > 0.0)) throw std::invalid_argument("parking diameter must be positive");
  if (box.min_side() < 8.0 * diameter) throw std::invalid_argument("box side must be at least 8 diameters");

  const int dim = box.dim;

  PointSet ps;
  ps.dim = dim;
  ps.box = box;
  ps.r_declared = diameter;
  ps.R_declared = diameter;
  ps.provenance.model = "parking";
  ps.provenance.seed = seed;
  ps.provenance.params = {{"diameter", diameter}, {"rng", kRngName}};

  // Saturation is tracked on an occupancy grid of resolution diameter/8: a
  // probe is open while a center could still be placed at it. Attempts are
  // drawn inside the cells of open probes, so the chain makes progress even
  // when little insertable area is left; the process stops when no probe can
  // host a further center.
  const double h = diameter / 8.0;
  int64_t n_cells[3] = {1, 1, 1};
  for (int i = 0; i < dim; ++i) n_cells[i] = static_cast<int64_t>(std::ceil(box.side(i) / h));
  int64_t total = n_cells[0] * n_cells[1] * (dim == 3 ? n_cells[2] : 1);

  auto probe_of = [&](int64_t idx) {
    int64_t ix = idx % n_cells[0];
    int64_t iy = (idx / n_cells[0]) % n_cells[1];
    int64_t iz = dim == 3 ? idx / (n_cells[0] * n_cells[1]) : 0;
    Vec p(std::min(box.lo[0] + (static_cast<double>(ix) + 0.5) * h, box.hi[0]),
          std::min(box.lo[1] + (static_cast<double>(iy) + 0.5) * h, box.hi[1]),
          dim == 3 ? std::min(box.lo[2] + (static_cast<double>(iz) + 0.5) * h, box.hi[2]) : 0.0);
    return p;
  };

  std::vector<int64_t> open(static_cast<size_t>(total));
  std::vector<int64_t> open_pos(static_cast<size_t>(total));  // probe -> slot in open, -1 closed
  for (int64_t i = 0; i < total; ++i) {
    open[static_cast<size_t>(i)] = i;
    open_pos[static_cast<size_t>(i)] = i;
  }
  auto close_probe = [&](int64_t idx) {
    int64_t pos = open_pos[static_cast<size_t>(idx)];
    if (pos < 0) return;
    int64_t last = open.back();
    open[static_cast<size_t>(pos)] = last;
    open_pos[static_cast<size_t>(last)] = pos;
    open.pop_back();
    open_pos[static_cast<size_t>(idx)] = -1;
  };

  BucketGrid grid(ps.points, box, diameter);
  uint64_t attempt = 0;
  const uint64_t max_attempts = 100'000'000;
  const int64_t reach = static_cast<int64_t>(std::ceil(diameter / h)) + 1;

  while (!open.empty()) {
    if (attempt >= max_attempts) throw std::runtime_error("random parking failed to saturate");
    int64_t pick = open[static_cast<size_t>(seq_below(seed, attempt, kStreamRsaVoxel, open.size()))];
    int64_t ix = pick % n_cells[0];
    int64_t iy = (pick / n_cells[0]) % n_cells[1];
    int64_t iz = dim == 3 ? pick / (n_cells[0] * n_cells[1]) : 0;
    Vec cand;
    int64_t cc[3] = {ix, iy, iz};
    for (int i = 0; i < dim; ++i) {
      double u = seq_uniform(seed, attempt, kStreamRsaAxis0 + static_cast<uint32_t>(i));
      double x = box.lo[i] + (static_cast<double>(cc[i]) + u) * h;
      cand[i] = snap(std::clamp(x, box.lo[i], box.hi[i]));
    }
    ++attempt;

    if (grid.any_within(cand, diameter - kQuantum)) {
      // failed attempt; retire the probe itself if it got covered
      if (grid.any_within(probe_of(pick), diameter - kQuantum)) close_probe(pick);
      continue;
    }
    ps.points.push_back(cand);
    grid.cell_of(cand).push_back(static_cast<int32_t>(ps.points.size() - 1));

    // close every probe the new center covers
    int64_t bx = static_cast<int64_t>(std::floor((cand[0] - box.lo[0]) / h));
    int64_t by = static_cast<int64_t>(std::floor((cand[1] - box.lo[1]) / h));
    int64_t bz = dim == 3 ? static_cast<int64_t>(std::floor((cand[2] - box.lo[2]) / h)) : 0;
    int64_t zl = dim == 3 ? std::max<int64_t>(0, bz - reach) : 0;
    int64_t zh = dim == 3 ? std::min(n_cells[2] - 1, bz + reach) : 0;
    for (int64_t kz = zl; kz <= zh; ++kz)
      for (int64_t ky = std::max<int64_t>(0, by - reach); ky <= std::min(n_cells[1] - 1, by + reach); ++ky)
        for (int64_t kx = std::max<int64_t>(0, bx - reach); kx <= std::min(n_cells[0] - 1, bx + reach); ++kx) {
          int64_t idx = (kz * n_cells[1] + ky) * n_cells[0] + kx;
          if (open_pos[static_cast<size_t>(idx)] < 0) continue;
          if (dist(probe_of(idx), cand) < diameter - kQuantum) close_probe(idx);
        }
  }
  return ps;
}

PointSet apply_defects(const PointSet& ps, int count, uint64_t seed) {
  if (count < 0) throw std::invalid_argument("defect count must be non-negative");
  if (count == 0) return ps;
  size_t n = ps.points.size();
  if (static_cast<size_t>(count) > n / 100)
    throw std::invalid_argument("defect count exceeds 1% of points");

  double min_gap = 3.0 * ps.R_declared;
  std::vector<int> chosen;
  bool ok = false;
  uint64_t draw = 0;
  for (int attempt = 0; attempt < 1000 && !ok; ++attempt) {
    chosen.clear();
    std::set<int> used;
    while (static_cast<int>(chosen.size()) < count) {
      int idx = static_cast<int>(seq_below(seed, draw++, kStreamDefects, n));
      if (used.insert(idx).second) chosen.push_back(idx);
    }
    ok = true;
    for (size_t i = 0; i < chosen.size() && ok; ++i)
      for (size_t j = i + 1; j < chosen.size() && ok; ++j)
        if (dist(ps.points[static_cast<size_t>(chosen[i])], ps.points[static_cast<size_t>(chosen[j])]) < min_gap)
          ok = false;
  }
  if (!ok) throw std::runtime_error("defect spacing condition unsatisfiable after 1000 attempts");

  std::vector<int> sorted = chosen;
  std::sort(sorted.begin(), sorted.end());
  PointSet out;
  out.dim = ps.dim;
  out.box = ps.box;
  out.r_declared = ps.r_declared;
  out.R_declared = 2.0 * ps.R_declared;  // an isolated hole at most doubles the covering radius
  out.provenance = ps.provenance;
  out.provenance.model = ps.provenance.model + "+defects";
  out.provenance.params["defects"] = count;
  out.provenance.params["defect_seed"] = seed;
  out.provenance.params["deleted"] = sorted;
  out.points.reserve(n - static_cast<size_t>(count));
  size_t next = 0;
  for (size_t i = 0; i < n; ++i) {
    if (next < sorted.size() && static_cast<size_t>(sorted[next]) == i) {
      ++next;
      continue;
    }
    out.points.push_back(ps.points[i]);
  }
  return out;
}

PointSet translate(const PointSet& ps, const Vec& z) {
  PointSet out = ps;
  out.box = ps.box.shifted(z);
  for (Vec& p : out.points) p = p + z;
  return out;
}

AdmissibilityReport estimate_admissibility(const PointSet& ps) {
  if (ps.points.size() < 2) throw std::invalid_argument("admissibility needs at least 2 points");
  const int dim = ps.dim;

  // Bucket side aimed at ~1 point per bucket.
  double vol = 1.0;
  for (int i = 0; i < dim; ++i) vol *= std::max(ps.box.side(i), 1e-12);
  double bside = std::pow(vol / static_cast<double>(ps.points.size()), 1.0 / dim);
  BucketGrid grid(ps.points, ps.box, bside);

  AdmissibilityReport rep;
  rep.r_min = std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < ps.points.size(); ++i)
    rep.r_min = std::min(rep.r_min, grid.nearest_dist(ps.points[i], static_cast<int>(i)));

  // Covering radius over a probe grid restricted to the interior.
  double h = rep.r_min / 4.0;
  double cap = ps.box.min_side() / 2048.0;
  h = std::max(h, cap);
  rep.probe_resolution = h * std::sqrt(static_cast<double>(dim)) / 2.0;
  rep.R_cover = 0.0;
  double m = ps.R_declared;
  bool has_probes = true;
  int64_t np[3] = {1, 1, 1};
  double step[3] = {0.0, 0.0, 0.0};
  for (int i = 0; i < dim; ++i) {
    double span = ps.box.side(i) - 2.0 * m;
    if (span < 0.0) {
      has_probes = false;
      break;
    }
    np[i] = static_cast<int64_t>(std::ceil(span / h)) + 1;
    step[i] = np[i] > 1 ? span / static_cast<double>(np[i] - 1) : 0.0;
  }
  if (has_probes) {
    for (int64_t k = 0; k < (dim == 3 ? np[2] : 1); ++k)
      for (int64_t j = 0; j < np[1]; ++j)
        for (int64_t i = 0; i < np[0]; ++i) {
          Vec probe(ps.box.lo[0] + m + static_cast<double>(i) * step[0],
                    ps.box.lo[1] + m + static_cast<double>(j) * step[1],
                    dim == 3 ? ps.box.lo[2] + m + static_cast<double>(k) * step[2] : 0.0);
          rep.R_cover = std::max(rep.R_cover, grid.nearest_dist(probe));
        }
  }
  rep.pass = rep.r_min >= ps.r_declared - 1e-9 && rep.R_cover <= ps.R_declared + rep.probe_resolution;
  return rep;
}

}  // namespace spinhom
