#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "spinhom/energy.hpp"

namespace spinhom {

// Ferromagnetic pair problem with frozen boundary spins. Edge weights are
// w = 2c, the energy of a broken bond, so the ground energy is
// min over assignments of sum w * [u_i != u_j].
struct SpinProblem {
  struct Edge {
    int32_t i = 0, j = 0;
    double w = 0.0;
  };
  std::vector<int32_t> vertices;                    // global point ids
  std::vector<Edge> edges;                          // endpoints must be vertices
  std::vector<std::pair<int32_t, int8_t>> frozen;   // id -> fixed spin
  std::vector<int32_t> free_verts;

  size_t index_bound() const;  // one past the largest vertex id
};

// s-t network over the free vertices. Weights are scaled to integers
// (kScale) so flow arithmetic is exact; frozen-frozen costs and the forced
// part of opposing terminal pulls accumulate into `offset`.
struct FlowNetwork {
  static constexpr int64_t kScale = 1 << 20;

  struct Arc {
    int32_t to = 0;
    int32_t rev = 0;
    int64_t cap = 0;
  };
  // node 0 = source, 1 = sink, free vertex k at node k+2
  std::vector<std::vector<Arc>> adj;
  std::vector<int32_t> node_ids;  // global id of each free node
  int64_t offset = 0;
  size_t scaled_edges = 0;
};

struct GroundState {
  double energy = 0.0;
  int64_t energy_scaled = 0;
  SpinConfig config;        // sized by problem.index_bound()
  bool optimal = false;     // max-flow equals the recomputed cut of the partition
  double round_err_bound = 0.0;
};

FlowNetwork assemble(const SpinProblem& problem);

// Exact minimizer via max-flow/min-cut.
GroundState solve(const SpinProblem& problem);

// Exhaustive oracle, |free| <= 22. Returns (energy, number of minimizers).
std::pair<double, uint64_t> brute_force(const SpinProblem& problem);

}  // namespace spinhom
