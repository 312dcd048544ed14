#include "spinhom/groundstate.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <stdexcept>
#include <unordered_map>

namespace spinhom {

namespace {

int64_t scale_weight(double w) {
  if (w < 0.0) throw std::invalid_argument("spin problem: negative edge weight");
  return std::llround(w * static_cast<double>(FlowNetwork::kScale));
}

struct Classified {
  std::unordered_map<int32_t, int32_t> free_node;  // global id -> free slot
  std::unordered_map<int32_t, int8_t> frozen_sign;
};

Classified classify(const SpinProblem& p) {
  Classified c;
  for (auto& [id, s] : p.frozen) {
    if (s != 1 && s != -1) throw std::invalid_argument("spin problem: frozen spin must be +1 or -1");
    c.frozen_sign[id] = s;
  }
  for (size_t k = 0; k < p.free_verts.size(); ++k) {
    int32_t id = p.free_verts[k];
    if (c.frozen_sign.count(id)) throw std::invalid_argument("spin problem: vertex both frozen and free");
    c.free_node[id] = static_cast<int32_t>(k);
  }
  return c;
}

void add_arc(FlowNetwork& net, int32_t from, int32_t to, int64_t cap, int64_t rev_cap) {
  auto& a = net.adj[static_cast<size_t>(from)];
  auto& b = net.adj[static_cast<size_t>(to)];
  a.push_back({to, static_cast<int32_t>(b.size()), cap});
  b.push_back({from, static_cast<int32_t>(a.size() - 1), rev_cap});
}

// Dinic blocking-flow max flow; exact in int64.
int64_t max_flow(FlowNetwork& net) {
  const int32_t n = static_cast<int32_t>(net.adj.size());
  const int32_t s = 0, t = 1;
  std::vector<int32_t> level(static_cast<size_t>(n));
  std::vector<uint32_t> it(static_cast<size_t>(n));
  int64_t flow = 0;

  auto bfs = [&]() {
    std::fill(level.begin(), level.end(), -1);
    std::queue<int32_t> q;
    level[static_cast<size_t>(s)] = 0;
    q.push(s);
    while (!q.empty()) {
      int32_t v = q.front();
      q.pop();
      for (const auto& a : net.adj[static_cast<size_t>(v)])
        if (a.cap > 0 && level[static_cast<size_t>(a.to)] < 0) {
          level[static_cast<size_t>(a.to)] = level[static_cast<size_t>(v)] + 1;
          q.push(a.to);
        }
    }
    return level[static_cast<size_t>(t)] >= 0;
  };

  // Iterative DFS for a blocking flow.
  std::vector<int32_t> path_node;
  std::vector<uint32_t> path_arc;
  while (bfs()) {
    std::fill(it.begin(), it.end(), 0);
    for (;;) {
      path_node.assign(1, s);
      path_arc.clear();
      // advance/retreat until sink reached or source exhausted
      while (!path_node.empty()) {
        int32_t v = path_node.back();
        if (v == t) break;
        bool advanced = false;
        for (uint32_t& i = it[static_cast<size_t>(v)]; i < net.adj[static_cast<size_t>(v)].size(); ++i) {
          const auto& a = net.adj[static_cast<size_t>(v)][i];
          if (a.cap > 0 && level[static_cast<size_t>(a.to)] == level[static_cast<size_t>(v)] + 1) {
            path_arc.push_back(i);
            path_node.push_back(a.to);
            advanced = true;
            break;
          }
        }
        if (!advanced) {
          level[static_cast<size_t>(v)] = -1;  // dead end
          path_node.pop_back();
          if (!path_arc.empty()) path_arc.pop_back();
        }
      }
      if (path_node.empty()) break;  // no more augmenting paths at these levels

      int64_t aug = std::numeric_limits<int64_t>::max();
      for (size_t k = 0; k < path_arc.size(); ++k)
        aug = std::min(aug, net.adj[static_cast<size_t>(path_node[k])][path_arc[k]].cap);
      for (size_t k = 0; k < path_arc.size(); ++k) {
        auto& a = net.adj[static_cast<size_t>(path_node[k])][path_arc[k]];
        a.cap -= aug;
        net.adj[static_cast<size_t>(a.to)][static_cast<size_t>(a.rev)].cap += aug;
      }
      flow += aug;
    }
  }
  return flow;
}

}  // namespace

size_t SpinProblem::index_bound() const {
  int32_t m = -1;
  for (int32_t v : vertices) m = std::max(m, v);
  return static_cast<size_t>(m + 1);
}

FlowNetwork assemble(const SpinProblem& problem) {
  Classified c = classify(problem);
  FlowNetwork net;
  size_t nf = problem.free_verts.size();
  net.adj.resize(nf + 2);
  net.node_ids = problem.free_verts;

  std::vector<int64_t> src_pull(nf, 0), snk_pull(nf, 0);
  for (const auto& e : problem.edges) {
    int64_t w = scale_weight(e.w);
    net.scaled_edges++;
    auto fi = c.free_node.find(e.i);
    auto fj = c.free_node.find(e.j);
    bool i_free = fi != c.free_node.end();
    bool j_free = fj != c.free_node.end();
    if (i_free && j_free) {
      if (w > 0) add_arc(net, fi->second + 2, fj->second + 2, w, w);
      continue;
    }
    auto sign_of = [&](int32_t id) {
      auto it = c.frozen_sign.find(id);
      if (it == c.frozen_sign.end())
        throw std::invalid_argument("spin problem: edge endpoint is neither free nor frozen");
      return it->second;
    };
    if (i_free || j_free) {
      int32_t node = i_free ? fi->second : fj->second;
      int8_t s = sign_of(i_free ? e.j : e.i);
      (s > 0 ? src_pull : snk_pull)[static_cast<size_t>(node)] += w;
    } else {
      if (sign_of(e.i) != sign_of(e.j)) net.offset += w;
    }
  }
  for (size_t k = 0; k < nf; ++k) {
    int64_t forced = std::min(src_pull[k], snk_pull[k]);
    net.offset += forced;
    if (src_pull[k] > forced) add_arc(net, 0, static_cast<int32_t>(k) + 2, src_pull[k] - forced, 0);
    if (snk_pull[k] > forced) add_arc(net, static_cast<int32_t>(k) + 2, 1, snk_pull[k] - forced, 0);
  }
  return net;
}

GroundState solve(const SpinProblem& problem) {
  FlowNetwork net = assemble(problem);
  int64_t flow = max_flow(net);

  GroundState gs;
  gs.config.values.assign(problem.index_bound(), 0);
  gs.config.frozen.assign(problem.index_bound(), 0);
  for (auto& [id, s] : problem.frozen) {
    gs.config.values[static_cast<size_t>(id)] = s;
    gs.config.frozen[static_cast<size_t>(id)] = 1;
  }

  // Source side of the residual graph gets +1.
  std::vector<char> reach(net.adj.size(), 0);
  std::queue<int32_t> q;
  reach[0] = 1;
  q.push(0);
  while (!q.empty()) {
    int32_t v = q.front();
    q.pop();
    for (const auto& a : net.adj[static_cast<size_t>(v)])
      if (a.cap > 0 && !reach[static_cast<size_t>(a.to)]) {
        reach[static_cast<size_t>(a.to)] = 1;
        q.push(a.to);
      }
  }
  for (size_t k = 0; k < net.node_ids.size(); ++k)
    gs.config.values[static_cast<size_t>(net.node_ids[k])] = reach[k + 2] ? 1 : -1;

  gs.energy_scaled = flow + net.offset;
  gs.energy = static_cast<double>(gs.energy_scaled) / static_cast<double>(FlowNetwork::kScale);
  gs.round_err_bound =
      static_cast<double>(net.scaled_edges) / static_cast<double>(FlowNetwork::kScale);

  // Duality self-check: the cut carried by the returned partition must equal
  // the flow value plus the constant offset.
  int64_t cut = 0;
  for (const auto& e : problem.edges) {
    int8_t ui = gs.config.values[static_cast<size_t>(e.i)];
    int8_t uj = gs.config.values[static_cast<size_t>(e.j)];
    if (ui != uj) cut += scale_weight(e.w);
  }
  gs.optimal = cut == gs.energy_scaled;
  return gs;
}

std::pair<double, uint64_t> brute_force(const SpinProblem& problem) {
  Classified c = classify(problem);
  size_t nf = problem.free_verts.size();
  if (nf > 22) throw std::invalid_argument("brute_force: more than 22 free spins");

  int64_t offset = 0;
  struct FF {
    int32_t a, b;
    int64_t w;
  };
  std::vector<FF> ff;
  std::vector<int64_t> cost_plus(nf, 0), cost_minus(nf, 0);
  for (const auto& e : problem.edges) {
    int64_t w = scale_weight(e.w);
    auto fi = c.free_node.find(e.i);
    auto fj = c.free_node.find(e.j);
    bool i_free = fi != c.free_node.end();
    bool j_free = fj != c.free_node.end();
    if (i_free && j_free) {
      ff.push_back({fi->second, fj->second, w});
    } else if (i_free || j_free) {
      int32_t node = i_free ? fi->second : fj->second;
      int8_t s = c.frozen_sign.at(i_free ? e.j : e.i);
      // broken when the free spin disagrees with the frozen one
      (s > 0 ? cost_minus : cost_plus)[static_cast<size_t>(node)] += w;
    } else {
      if (c.frozen_sign.at(e.i) != c.frozen_sign.at(e.j)) offset += w;
    }
  }

  int64_t best = std::numeric_limits<int64_t>::max();
  uint64_t count = 0;
  for (uint64_t mask = 0; mask < (1ull << nf); ++mask) {
    int64_t en = offset;
    for (size_t k = 0; k < nf; ++k) en += (mask >> k) & 1 ? cost_plus[k] : cost_minus[k];
    for (const FF& e : ff)
      if (((mask >> e.a) & 1) != ((mask >> e.b) & 1)) en += e.w;
    if (en < best) {
      best = en;
      count = 1;
    } else if (en == best) {
      ++count;
    }
  }
  if (nf == 0) {
    best = offset;
    count = 1;
  }
  return {static_cast<double>(best) / static_cast<double>(FlowNetwork::kScale), count};
}

}  // namespace spinhom
