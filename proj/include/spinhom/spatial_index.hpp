#pragma once

#include <cstdint>
#include <unordered_map>
#include <vector>

#include "spinhom/lattice.hpp"

namespace spinhom {

// Two-level grid over a point set. The fine grid has cell side r' = r/sqrt(n)
// so that each cell holds at most one point; the coarse grid buckets points
// for range queries.
class SpatialIndex {
 public:
  explicit SpatialIndex(const PointSet& ps);

  double cell_side() const { return r_prime_; }

  // Index of the point occupying the fine cell that contains p, or -1.
  int fine_cell_occupant(const Vec& p) const;

  // Indices of all points within `radius` of center (inclusive).
  std::vector<int> range_query(const Vec& center, double radius) const;

  // Nearest point to p other than `exclude`; returns -1 if the set is empty.
  int nearest(const Vec& p, int exclude = -1, double* out_dist = nullptr) const;

  const PointSet& points() const { return *ps_; }

 private:
  int64_t fine_key(const Vec& p) const;

  const PointSet* ps_;
  int dim_;
  double r_prime_;
  double coarse_side_;
  Vec origin_;
  std::array<int64_t, 3> coarse_n_{1, 1, 1};
  std::unordered_map<int64_t, int32_t> fine_;
  std::vector<std::vector<int32_t>> coarse_;

  int64_t coarse_key(int64_t ix, int64_t iy, int64_t iz) const;
  void coarse_coords(const Vec& p, int64_t& ix, int64_t& iy, int64_t& iz) const;
};

}  // namespace spinhom
