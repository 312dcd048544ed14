#include "spinhom/spatial_index.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace spinhom {

SpatialIndex::SpatialIndex(const PointSet& ps) : ps_(&ps), dim_(ps.dim) {
  if (ps.r_declared <= 0.0) throw std::invalid_argument("SpatialIndex: r_declared must be positive");
  r_prime_ = ps.r_declared / std::sqrt(static_cast<double>(dim_));
  origin_ = ps.box.lo;
  // Coarse buckets sized for 2R range queries without scanning many cells.
  coarse_side_ = std::max(2.0 * ps.R_declared, ps.r_declared);
  for (int i = 0; i < dim_; ++i) {
    coarse_n_[static_cast<size_t>(i)] =
        std::max<int64_t>(1, static_cast<int64_t>(std::floor(ps.box.side(i) / coarse_side_)) + 1);
  }
  int64_t total = coarse_n_[0] * coarse_n_[1] * (dim_ == 3 ? coarse_n_[2] : 1);
  coarse_.resize(static_cast<size_t>(total));

  for (size_t idx = 0; idx < ps.points.size(); ++idx) {
    const Vec& p = ps.points[idx];
    int64_t key = fine_key(p);
    auto [it, inserted] = fine_.emplace(key, static_cast<int32_t>(idx));
    if (!inserted) {
      throw std::runtime_error(
          "SpatialIndex: two points share one r'-cell (minimum-distance declaration violated)");
    }
    int64_t ix, iy, iz;
    coarse_coords(p, ix, iy, iz);
    coarse_[static_cast<size_t>(coarse_key(ix, iy, iz))].push_back(static_cast<int32_t>(idx));
  }
}

int64_t SpatialIndex::fine_key(const Vec& p) const {
  // 21 bits per axis, offset to keep coordinates positive.
  int64_t key = 0;
  for (int i = 0; i < dim_; ++i) {
    int64_t ci = static_cast<int64_t>(std::floor((p[i] - origin_[i]) / r_prime_)) + (1 << 20);
    key = (key << 21) | (ci & ((1 << 21) - 1));
  }
  return key;
}

int SpatialIndex::fine_cell_occupant(const Vec& p) const {
  auto it = fine_.find(fine_key(p));
  return it == fine_.end() ? -1 : it->second;
}

int64_t SpatialIndex::coarse_key(int64_t ix, int64_t iy, int64_t iz) const {
  return (iz * coarse_n_[1] + iy) * coarse_n_[0] + ix;
}

void SpatialIndex::coarse_coords(const Vec& p, int64_t& ix, int64_t& iy, int64_t& iz) const {
  auto clampi = [](int64_t v, int64_t n) { return std::clamp<int64_t>(v, 0, n - 1); };
  ix = clampi(static_cast<int64_t>(std::floor((p[0] - origin_[0]) / coarse_side_)), coarse_n_[0]);
  iy = clampi(static_cast<int64_t>(std::floor((p[1] - origin_[1]) / coarse_side_)), coarse_n_[1]);
  iz = dim_ == 3
           ? clampi(static_cast<int64_t>(std::floor((p[2] - origin_[2]) / coarse_side_)), coarse_n_[2])
           : 0;
}

std::vector<int> SpatialIndex::range_query(const Vec& center, double radius) const {
  std::vector<int> out;
  int64_t cx, cy, cz;
  coarse_coords(center, cx, cy, cz);
  int64_t reach = static_cast<int64_t>(std::ceil(radius / coarse_side_)) + 1;
  double r2 = radius * radius;
  int64_t z_lo = dim_ == 3 ? std::max<int64_t>(0, cz - reach) : 0;
  int64_t z_hi = dim_ == 3 ? std::min<int64_t>(coarse_n_[2] - 1, cz + reach) : 0;
  for (int64_t iz = z_lo; iz <= z_hi; ++iz)
    for (int64_t iy = std::max<int64_t>(0, cy - reach); iy <= std::min<int64_t>(coarse_n_[1] - 1, cy + reach); ++iy)
      for (int64_t ix = std::max<int64_t>(0, cx - reach); ix <= std::min<int64_t>(coarse_n_[0] - 1, cx + reach); ++ix)
        for (int32_t idx : coarse_[static_cast<size_t>(coarse_key(ix, iy, iz))])
          if (norm2(ps_->points[static_cast<size_t>(idx)] - center) <= r2) out.push_back(idx);
  return out;
}

int SpatialIndex::nearest(const Vec& p, int exclude, double* out_dist) const {
  int best = -1;
  double best2 = std::numeric_limits<double>::infinity();
  int64_t cx, cy, cz;
  coarse_coords(p, cx, cy, cz);
  int64_t max_reach = std::max({coarse_n_[0], coarse_n_[1], coarse_n_[2]});
  for (int64_t ring = 0; ring <= max_reach; ++ring) {
    // Once a candidate is found, rings beyond best_dist/coarse_side add nothing.
    if (best >= 0 && (static_cast<double>(ring) - 1.0) * coarse_side_ > std::sqrt(best2)) break;
    int64_t z_lo = dim_ == 3 ? std::max<int64_t>(0, cz - ring) : 0;
    int64_t z_hi = dim_ == 3 ? std::min<int64_t>(coarse_n_[2] - 1, cz + ring) : 0;
    for (int64_t iz = z_lo; iz <= z_hi; ++iz)
      for (int64_t iy = std::max<int64_t>(0, cy - ring); iy <= std::min<int64_t>(coarse_n_[1] - 1, cy + ring); ++iy)
        for (int64_t ix = std::max<int64_t>(0, cx - ring); ix <= std::min<int64_t>(coarse_n_[0] - 1, cx + ring); ++ix) {
          bool on_ring = std::max({std::llabs(ix - cx), std::llabs(iy - cy), std::llabs(iz - cz)}) == ring;
          if (!on_ring) continue;
          for (int32_t idx : coarse_[static_cast<size_t>(coarse_key(ix, iy, iz))]) {
            if (idx == exclude) continue;
            double d2 = norm2(ps_->points[static_cast<size_t>(idx)] - p);
            if (d2 < best2) {
              best2 = d2;
              best = idx;
            }
          }
        }
  }
  if (out_dist) *out_dist = best >= 0 ? std::sqrt(best2) : std::numeric_limits<double>::infinity();
  return best;
}

}  // namespace spinhom
