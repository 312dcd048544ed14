#include "spinhom/voronoi.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace spinhom {

namespace {

// Half-space {z : dot(z, n) <= off}.
struct HalfSpace {
  Vec n;
  double off;
  int source;  // candidate point index, -1 for the initial cube
};

// --- 2D: polygon clipping with edge provenance ---------------------------

struct TaggedPolygon {
  // edge k runs from v[k] to v[(k+1)%size] and lies on plane source[k]
  std::vector<Vec> v;
  std::vector<int> source;
};

TaggedPolygon clip_polygon(const TaggedPolygon& poly, const HalfSpace& h) {
  TaggedPolygon out;
  size_t n = poly.v.size();
  if (n == 0) return out;
  auto sd = [&](const Vec& p) { return dot(p, h.n) - h.off; };
  for (size_t k = 0; k < n; ++k) {
    const Vec& a = poly.v[k];
    const Vec& b = poly.v[(k + 1) % n];
    double da = sd(a), db = sd(b);
    bool ain = da <= 0.0, bin = db <= 0.0;
    if (ain) {
      out.v.push_back(a);
      out.source.push_back(poly.source[k]);
    }
    if (ain != bin) {
      double t = da / (da - db);
      Vec x = a + (b - a) * t;
      if (ain) {
        // leaving: the new edge from x runs along the clip plane until re-entry
        out.v.push_back(x);
        out.source.push_back(h.source);
      } else {
        // entering: edge from x continues the original edge
        out.v.push_back(x);
        out.source.push_back(poly.source[k]);
      }
    }
  }
  return out;
}

// Clip-cube half-width: the declared covering radius padded for the grid
// slack of saturation-verified parking lattices.
double working_radius(const PointSet& ps) { return 1.15 * ps.R_declared; }

VoronoiCell cell_2d(const PointSet& ps, int idx, const std::vector<int>& candidates) {
  const Vec& x = ps.points[static_cast<size_t>(idx)];
  double R = working_radius(ps);
  TaggedPolygon poly;
  poly.v = {Vec(x[0] - R, x[1] - R), Vec(x[0] + R, x[1] - R), Vec(x[0] + R, x[1] + R), Vec(x[0] - R, x[1] + R)};
  poly.source = {-1, -1, -1, -1};

  for (int j : candidates) {
    if (j == idx) continue;
    const Vec& y = ps.points[static_cast<size_t>(j)];
    Vec d = y - x;
    HalfSpace h{d, dot((x + y) * 0.5, d), j};
    poly = clip_polygon(poly, h);
    if (poly.v.empty()) break;
  }

  VoronoiCell cell;
  cell.owner = idx;
  cell.vertices = poly.v;
  double tol = facet_tolerance(ps);
  std::map<int, double> measure;
  size_t n = poly.v.size();
  for (size_t k = 0; k < n; ++k) {
    double len = dist(poly.v[k], poly.v[(k + 1) % n]);
    cell.boundary_measure += len;
    if (poly.source[k] >= 0) measure[poly.source[k]] += len;
  }
  for (auto& [j, m] : measure)
    if (m > tol) cell.facets.push_back({j, m});
  return cell;
}

// --- 3D: convex polytope clipping ----------------------------------------

struct Polytope {
  // Faces as vertex loops; face f lies on plane source[f].
  std::vector<std::vector<Vec>> faces;
  std::vector<int> source;
};

Polytope make_cube(const Vec& c, double R) {
  auto v = [&](int sx, int sy, int sz) { return Vec(c[0] + sx * R, c[1] + sy * R, c[2] + sz * R); };
  Polytope p;
  p.faces = {
      {v(-1, -1, -1), v(-1, 1, -1), v(1, 1, -1), v(1, -1, -1)},   // z = -R
      {v(-1, -1, 1), v(1, -1, 1), v(1, 1, 1), v(-1, 1, 1)},       // z = +R
      {v(-1, -1, -1), v(1, -1, -1), v(1, -1, 1), v(-1, -1, 1)},   // y = -R
      {v(-1, 1, -1), v(-1, 1, 1), v(1, 1, 1), v(1, 1, -1)},       // y = +R
      {v(-1, -1, -1), v(-1, -1, 1), v(-1, 1, 1), v(-1, 1, -1)},   // x = -R
      {v(1, -1, -1), v(1, 1, -1), v(1, 1, 1), v(1, -1, 1)},       // x = +R
  };
  p.source = {-1, -1, -1, -1, -1, -1};
  return p;
}

// Clip a polytope by a half-space; the section polygon is rebuilt from the
// cut segments of the surviving faces.
Polytope clip_polytope(const Polytope& poly, const HalfSpace& h, double weld_tol) {
  Polytope out;
  std::vector<std::pair<Vec, Vec>> cuts;
  auto sd = [&](const Vec& p) { return dot(p, h.n) - h.off; };

  for (size_t f = 0; f < poly.faces.size(); ++f) {
    const auto& loop = poly.faces[f];
    std::vector<Vec> kept;
    std::vector<Vec> crossings;
    size_t n = loop.size();
    for (size_t k = 0; k < n; ++k) {
      const Vec& a = loop[k];
      const Vec& b = loop[(k + 1) % n];
      double da = sd(a), db = sd(b);
      if (da <= 0.0) kept.push_back(a);
      if ((da <= 0.0) != (db <= 0.0)) {
        double t = da / (da - db);
        Vec x = a + (b - a) * t;
        kept.push_back(x);
        crossings.push_back(x);
      }
    }
    if (kept.size() >= 3) {
      out.faces.push_back(std::move(kept));
      out.source.push_back(poly.source[f]);
    }
    if (crossings.size() >= 2) cuts.emplace_back(crossings[0], crossings[1]);
  }

  // Chain the cut segments into a loop.
  if (cuts.size() >= 3) {
    std::vector<Vec> loop;
    std::vector<bool> used(cuts.size(), false);
    loop.push_back(cuts[0].first);
    loop.push_back(cuts[0].second);
    used[0] = true;
    for (size_t step = 1; step + 1 < cuts.size(); ++step) {
      const Vec& tail = loop.back();
      double best = weld_tol;
      size_t pick = cuts.size();
      bool flip = false;
      for (size_t c = 0; c < cuts.size(); ++c) {
        if (used[c]) continue;
        double d1 = dist(cuts[c].first, tail), d2 = dist(cuts[c].second, tail);
        if (d1 < best) {
          best = d1;
          pick = c;
          flip = false;
        }
        if (d2 < best) {
          best = d2;
          pick = c;
          flip = true;
        }
      }
      if (pick == cuts.size()) break;
      used[pick] = true;
      loop.push_back(flip ? cuts[pick].first : cuts[pick].second);
    }
    if (loop.size() >= 3 && dist(loop.front(), loop.back()) < weld_tol) loop.pop_back();
    if (loop.size() >= 3) {
      out.faces.push_back(std::move(loop));
      out.source.push_back(h.source);
    }
  }
  return out;
}

double polygon_area_3d(const std::vector<Vec>& loop) {
  Vec s{0, 0, 0};
  for (size_t k = 1; k + 1 < loop.size(); ++k) {
    Vec c = cross(loop[k] - loop[0], loop[k + 1] - loop[0]);
    s = s + c;
  }
  return 0.5 * norm(s);
}

VoronoiCell cell_3d(const PointSet& ps, int idx, const std::vector<int>& candidates) {
  const Vec& x = ps.points[static_cast<size_t>(idx)];
  double R = working_radius(ps);
  double weld_tol = 1e-9 * R;
  Polytope poly = make_cube(x, R);
  for (int j : candidates) {
    if (j == idx) continue;
    const Vec& y = ps.points[static_cast<size_t>(j)];
    Vec d = y - x;
    poly = clip_polytope(poly, HalfSpace{d, dot((x + y) * 0.5, d), j}, weld_tol);
    if (poly.faces.empty()) break;
  }

  VoronoiCell cell;
  cell.owner = idx;
  double tol = facet_tolerance(ps);
  std::map<int, double> measure;
  for (size_t f = 0; f < poly.faces.size(); ++f) {
    double area = polygon_area_3d(poly.faces[f]);
    cell.boundary_measure += area;
    if (poly.source[f] >= 0) measure[poly.source[f]] += area;
    std::vector<int> loop;
    for (const Vec& v : poly.faces[f]) {
      loop.push_back(static_cast<int>(cell.vertices.size()));
      cell.vertices.push_back(v);
    }
    cell.faces.push_back(std::move(loop));
  }
  for (auto& [j, m] : measure)
    if (m > tol) cell.facets.push_back({j, m});
  return cell;
}

}  // namespace

double facet_tolerance(const PointSet& ps) {
  return 1e-12 * std::pow(ps.R_declared, ps.dim - 1);
}

bool is_interior(const PointSet& ps, int idx) {
  return ps.box.boundary_distance(ps.points[static_cast<size_t>(idx)]) >= 2.0 * ps.R_declared - 1e-9;
}

VoronoiCell compute_cell(const PointSet& ps, const SpatialIndex& index, int idx) {
  if (!is_interior(ps, idx))
    throw std::invalid_argument("compute_cell: point too close to the box boundary");
  // Any point whose bisector can reach the clipping cube lies within
  // 2*sqrt(n)*R of the owner, so this candidate set cuts the exact cell.
  double reach = 2.0 * std::sqrt(static_cast<double>(ps.dim)) * working_radius(ps);
  std::vector<int> candidates = index.range_query(ps.points[static_cast<size_t>(idx)], reach);
  std::sort(candidates.begin(), candidates.end());
  VoronoiCell cell = ps.dim == 2 ? cell_2d(ps, idx, candidates) : cell_3d(ps, idx, candidates);

  // Lemma-level sanity: the cell must sit inside B_R(owner); a violation
  // signals a covering-radius defect in the input.
  const Vec& x = ps.points[static_cast<size_t>(idx)];
  for (const Vec& v : cell.vertices)
    if (dist(v, x) > working_radius(ps) * (1.0 + 1e-6))
      throw std::runtime_error("compute_cell: cell exceeds B_R (covering radius violated near this point)");
  return cell;
}

size_t NeighborGraph::nn_degree(int idx) const {
  size_t d = 0;
  for (const NnPair& p : nn)
    if (p.i == idx || p.j == idx) ++d;
  return d;
}

size_t NeighborGraph::max_nn_degree() const {
  std::map<int32_t, size_t> deg;
  for (const NnPair& p : nn) {
    ++deg[p.i];
    ++deg[p.j];
  }
  size_t m = 0;
  for (auto& [_, d] : deg) m = std::max(m, d);
  return m;
}

NeighborGraph neighbor_graph(const PointSet& ps, const SpatialIndex& index, double L) {
  if (L < 0.0) throw std::invalid_argument("truncation radius must be non-negative");
  NeighborGraph g;
  g.L = L;

  std::vector<char> interior(ps.points.size(), 0);
  for (size_t i = 0; i < ps.points.size(); ++i) interior[i] = is_interior(ps, static_cast<int>(i)) ? 1 : 0;

  std::map<std::pair<int32_t, int32_t>, double> nn_set;
  for (size_t i = 0; i < ps.points.size(); ++i) {
    if (!interior[i]) continue;
    VoronoiCell cell = compute_cell(ps, index, static_cast<int>(i));
    for (const Facet& f : cell.facets) {
      int32_t a = static_cast<int32_t>(i), b = static_cast<int32_t>(f.neighbor);
      nn_set.emplace(std::make_pair(std::min(a, b), std::max(a, b)), f.measure);
    }
  }
  g.nn.reserve(nn_set.size());
  for (auto& [key, m] : nn_set) g.nn.push_back({key.first, key.second, m});

  if (L > 0.0) {
    for (size_t i = 0; i < ps.points.size(); ++i) {
      const Vec& x = ps.points[i];
      for (int j : index.range_query(x, L)) {
        if (j <= static_cast<int>(i)) continue;
        if (!interior[i] && !interior[static_cast<size_t>(j)]) continue;
        auto key = std::make_pair(static_cast<int32_t>(i), static_cast<int32_t>(j));
        if (nn_set.count(key)) continue;
        g.lr.push_back({key.first, key.second});
      }
    }
  }
  return g;
}

NeighborGraph neighbor_graph(const PointSet& ps, double L) {
  SpatialIndex index(ps);
  return neighbor_graph(ps, index, L);
}

}  // namespace spinhom
