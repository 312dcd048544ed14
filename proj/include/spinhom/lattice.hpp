#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "spinhom/geometry.hpp"

#include "json.hpp"

namespace spinhom {

struct Provenance {
  std::string model;
  uint64_t seed = 0;
  nlohmann::json params = nlohmann::json::object();
};

// A finite realization of an admissible point set: pairwise distances are at
// least r_declared and every location of the box interior (margin
// R_declared) has a point within R_declared.
struct PointSet {
  int dim = 2;
  Box box;
  double r_declared = 0.0;
  double R_declared = 0.0;
  Provenance provenance;
  std::vector<Vec> points;

  size_t size() const { return points.size(); }
};

struct AdmissibilityReport {
  double r_min = 0.0;
  double R_cover = 0.0;
  double probe_resolution = 0.0;  // max distance from an interior location to a probe
  bool pass = false;
};

enum class DeterministicModel { square, triangular };

// Reference lattices: square = Z^n restricted to the box (r = 1, R = sqrt(n)/2),
// triangular = unit triangular lattice (dim 2 only, r = 1, R = 1/sqrt(3)).
PointSet generate_deterministic(DeterministicModel model, int dim, const Box& box);

// One point per integer site of the box, displaced uniformly on [-a,a]^n,
// 0 <= a < 1/2. Draws are keyed by the absolute integer site so that the
// construction is exactly stationary: generating on box+z reproduces
// translate(generate on box, z) for integer z.
PointSet generate_perturbed(int dim, const Box& box, double a, uint64_t seed);

// Random sequential adsorption of hard balls, run to saturation. r = R = diameter.
PointSet generate_random_parking(const Box& box, double diameter, uint64_t seed);

// Delete `count` points chosen uniformly, no two deletions closer than
// 3*R_declared; R_declared doubles (a deleted point leaves a hole of at most
// 2R). The deletion set is recorded in provenance.
PointSet apply_defects(const PointSet& ps, int count, uint64_t seed);

PointSet translate(const PointSet& ps, const Vec& z);

// Measured r_min (grid-accelerated nearest pair) and covering radius over a
// probe grid of spacing <= r_min/4, restricted to the box interior (margin
// R_declared).
AdmissibilityReport estimate_admissibility(const PointSet& ps);

}  // namespace spinhom
