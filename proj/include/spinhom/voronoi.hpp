#pragma once

#include <vector>

#include "spinhom/spatial_index.hpp"

namespace spinhom {

struct Facet {
  int neighbor = -1;
  double measure = 0.0;  // length (n=2) or area (n=3) of the shared boundary
};

struct VoronoiCell {
  int owner = -1;
  std::vector<Vec> vertices;               // polygon loop (n=2) or vertex pool (n=3)
  std::vector<std::vector<int>> faces;     // n=3 only: vertex loops per face
  std::vector<Facet> facets;
  double boundary_measure = 0.0;           // perimeter (n=2) / surface area (n=3)
};

struct NnPair {
  int32_t i = 0, j = 0;  // i < j
  double facet_measure = 0.0;
};

struct LrPair {
  int32_t i = 0, j = 0;  // i < j
};

struct NeighborGraph {
  double L = 0.0;
  std::vector<NnPair> nn;
  std::vector<LrPair> lr;

  size_t nn_degree(int idx) const;
  size_t max_nn_degree() const;
};

// Facets thinner than this are treated as dimension-deficient contacts
// (e.g. the cocircular diagonal pairs of Z^2 share only a point).
double facet_tolerance(const PointSet& ps);

// A point is interior when its Voronoi cell is fully determined by points
// inside the box.
bool is_interior(const PointSet& ps, int idx);

// Voronoi cell of an interior point, cut from the cube [-R,R]^n around it by
// the bisector half-spaces of nearby points.
VoronoiCell compute_cell(const PointSet& ps, const SpatialIndex& index, int idx);

// Nearest-neighbor pairs from shared Voronoi facets plus all remaining pairs
// with separation in (0, L]. Pairs need at least one interior endpoint.
NeighborGraph neighbor_graph(const PointSet& ps, const SpatialIndex& index, double L);
NeighborGraph neighbor_graph(const PointSet& ps, double L);

}  // namespace spinhom
