#ifndef GRADEDTODA_GRADED_GRAPH_HPP
#define GRADEDTODA_GRADED_GRAPH_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "gradedtoda/errors.hpp"

namespace gradedtoda {

// Input description of a weighted Z-graded graph on a finite rank window.
// Measures may be omitted; build_graph then applies the uniform per-layer rule.
struct VertexSpec {
  std::string id;
  int rank = 0;
};

struct EdgeSpec {
  std::string from;
  std::string to;
  std::optional<double> mu_e;
};

struct GraphSpec {
  std::vector<VertexSpec> vertices;
  std::vector<EdgeSpec> edges;
  std::map<std::string, double> mu_v;  // empty => uniform 1/|layer|
};

// Immutable weighted Z-graded graph on the window [n_min, n_max].
//
// Vertex ordering is (rank, lexicographic id), so every matrix built on top of
// the graph is reproducible. Directed edges increase rank by exactly one and
// are ordered by (from, to) vertex index.
class GradedGraph {
 public:
  int vertex_count() const { return static_cast<int>(ids_.size()); }
  int edge_count() const { return static_cast<int>(edge_from_.size()); }
  int n_min() const { return n_min_; }
  int n_max() const { return n_max_; }
  int window_size() const { return n_max_ - n_min_ + 1; }

  const std::string& vertex_id(int v) const { return ids_[static_cast<size_t>(v)]; }
  int rank(int v) const { return rank_[static_cast<size_t>(v)]; }
  double mu_v(int v) const { return mu_v_[static_cast<size_t>(v)]; }
  double mu_e(int e) const { return mu_e_[static_cast<size_t>(e)]; }
  int edge_from(int e) const { return edge_from_[static_cast<size_t>(e)]; }
  int edge_to(int e) const { return edge_to_[static_cast<size_t>(e)]; }

  // Vertices of rank n (indices into the global ordering).
  const std::vector<int>& layer(int n) const {
    if (n < n_min_ || n > n_max_) fail(ErrorCode::BadParams, "layer rank outside window");
    return layers_[static_cast<size_t>(n - n_min_)];
  }
  int layer_size(int n) const { return static_cast<int>(layer(n).size()); }

  const std::vector<int>& out_edges(int v) const { return out_edges_[static_cast<size_t>(v)]; }
  const std::vector<int>& in_edges(int v) const { return in_edges_[static_cast<size_t>(v)]; }

  // Sum of mu_e over out-/in-edges; equals mu_v at interior layers when the
  // Measure Balance Assumption holds.
  double out_mass(int v) const { return out_mass_[static_cast<size_t>(v)]; }
  double in_mass(int v) const { return in_mass_[static_cast<size_t>(v)]; }

  std::optional<int> find_vertex(const std::string& id) const {
    auto it = index_of_.find(id);
    if (it == index_of_.end()) return std::nullopt;
    return it->second;
  }

  int vertex_index(const std::string& id) const {
    auto v = find_vertex(id);
    if (!v) fail(ErrorCode::UnknownVertex, "no vertex with id '" + id + "'");
    return *v;
  }

  // (deg_minus, deg_plus): number of edges reaching x from the layer below /
  // leaving x toward the layer above.
  std::pair<int, int> transversal_degrees(int v) const {
    if (v < 0 || v >= vertex_count()) fail(ErrorCode::UnknownVertex, "vertex index out of range");
    return {static_cast<int>(in_edges_[static_cast<size_t>(v)].size()),
            static_cast<int>(out_edges_[static_cast<size_t>(v)].size())};
  }
  std::pair<int, int> transversal_degrees(const std::string& id) const {
    return transversal_degrees(vertex_index(id));
  }

  bool is_chain() const {
    for (const auto& l : layers_)
      if (l.size() != 1) return false;
    return true;
  }

  friend GradedGraph build_graph(const GraphSpec& spec);

 private:
  GradedGraph() = default;

  int n_min_ = 0;
  int n_max_ = 0;
  std::vector<std::string> ids_;
  std::vector<int> rank_;
  std::vector<double> mu_v_;
  std::vector<int> edge_from_;
  std::vector<int> edge_to_;
  std::vector<double> mu_e_;
  std::vector<std::vector<int>> layers_;
  std::vector<std::vector<int>> out_edges_;
  std::vector<std::vector<int>> in_edges_;
  std::vector<double> out_mass_;
  std::vector<double> in_mass_;
  std::map<std::string, int> index_of_;
};

inline GradedGraph build_graph(const GraphSpec& spec) {
  if (spec.vertices.empty()) fail(ErrorCode::BadParams, "graph spec has no vertices");

  // Stable ordering: (rank, id).
  std::vector<VertexSpec> verts = spec.vertices;
  std::sort(verts.begin(), verts.end(), [](const VertexSpec& a, const VertexSpec& b) {
    return a.rank != b.rank ? a.rank < b.rank : a.id < b.id;
  });

  GradedGraph g;
  g.n_min_ = verts.front().rank;
  g.n_max_ = verts.back().rank;
  for (const auto& v : verts) {
    if (g.index_of_.count(v.id)) fail(ErrorCode::BadParams, "duplicate vertex id '" + v.id + "'");
    g.index_of_[v.id] = static_cast<int>(g.ids_.size());
    g.ids_.push_back(v.id);
    g.rank_.push_back(v.rank);
  }

  const int nv = g.vertex_count();
  g.layers_.assign(static_cast<size_t>(g.window_size()), {});
  for (int v = 0; v < nv; ++v) g.layers_[static_cast<size_t>(g.rank_[v] - g.n_min_)].push_back(v);
  for (int n = g.n_min_; n <= g.n_max_; ++n)
    if (g.layers_[static_cast<size_t>(n - g.n_min_)].empty())
      fail(ErrorCode::NonContiguousWindow, "no vertex of rank " + std::to_string(n));

  // Edges, ordered by (from, to) index.
  struct RawEdge {
    int from, to;
    std::optional<double> mu;
  };
  std::vector<RawEdge> edges;
  edges.reserve(spec.edges.size());
  std::set<std::pair<int, int>> seen;
  for (const auto& e : spec.edges) {
    auto fi = g.find_vertex(e.from);
    auto ti = g.find_vertex(e.to);
    if (!fi || !ti)
      fail(ErrorCode::UnknownVertex, "edge endpoint '" + (fi ? e.to : e.from) + "' not declared");
    if (g.rank_[static_cast<size_t>(*ti)] != g.rank_[static_cast<size_t>(*fi)] + 1)
      fail(ErrorCode::EdgeRankViolation,
           "edge (" + e.from + ", " + e.to + ") does not increase rank by 1");
    if (!seen.insert({*fi, *ti}).second)
      fail(ErrorCode::BadParams, "duplicate edge (" + e.from + ", " + e.to + ")");
    edges.push_back({*fi, *ti, e.mu_e});
  }
  std::sort(edges.begin(), edges.end(), [](const RawEdge& a, const RawEdge& b) {
    return a.from != b.from ? a.from < b.from : a.to < b.to;
  });

  // Connectivity of the undirected skeleton.
  {
    std::vector<std::vector<int>> adj(static_cast<size_t>(nv));
    for (const auto& e : edges) {
      adj[static_cast<size_t>(e.from)].push_back(e.to);
      adj[static_cast<size_t>(e.to)].push_back(e.from);
    }
    std::vector<char> vis(static_cast<size_t>(nv), 0);
    std::vector<int> stack = {0};
    vis[0] = 1;
    int reached = 1;
    while (!stack.empty()) {
      int v = stack.back();
      stack.pop_back();
      for (int w : adj[static_cast<size_t>(v)])
        if (!vis[static_cast<size_t>(w)]) {
          vis[static_cast<size_t>(w)] = 1;
          ++reached;
          stack.push_back(w);
        }
    }
    if (reached != nv) fail(ErrorCode::Disconnected, "graph skeleton is not connected");
  }

  // Vertex measures: explicit map must cover every vertex; empty map means the
  // uniform per-layer rule mu_v = 1/|layer|.
  g.mu_v_.resize(static_cast<size_t>(nv));
  if (spec.mu_v.empty()) {
    for (int v = 0; v < nv; ++v)
      g.mu_v_[static_cast<size_t>(v)] =
          1.0 / static_cast<double>(g.layers_[static_cast<size_t>(g.rank_[v] - g.n_min_)].size());
  } else {
    for (int v = 0; v < nv; ++v) {
      auto it = spec.mu_v.find(g.ids_[static_cast<size_t>(v)]);
      if (it == spec.mu_v.end())
        fail(ErrorCode::BadParams, "mu_v missing for vertex '" + g.ids_[static_cast<size_t>(v)] + "'");
      if (!(it->second > 0.0))
        fail(ErrorCode::NonPositiveMeasure, "mu_v(" + it->first + ") must be positive");
      g.mu_v_[static_cast<size_t>(v)] = it->second;
    }
  }

  // Edge measures: per-edge default is uniform over the inter-layer edge set.
  std::map<int, int> pair_count;  // lower rank of the pair -> edge count
  for (const auto& e : edges) ++pair_count[g.rank_[static_cast<size_t>(e.from)]];
  for (const auto& e : edges) {
    double mu;
    if (e.mu.has_value()) {
      mu = *e.mu;
      if (!(mu > 0.0)) fail(ErrorCode::NonPositiveMeasure, "mu_e must be positive");
    } else {
      mu = 1.0 / static_cast<double>(pair_count[g.rank_[static_cast<size_t>(e.from)]]);
    }
    g.edge_from_.push_back(e.from);
    g.edge_to_.push_back(e.to);
    g.mu_e_.push_back(mu);
  }

  g.out_edges_.assign(static_cast<size_t>(nv), {});
  g.in_edges_.assign(static_cast<size_t>(nv), {});
  g.out_mass_.assign(static_cast<size_t>(nv), 0.0);
  g.in_mass_.assign(static_cast<size_t>(nv), 0.0);
  for (int e = 0; e < g.edge_count(); ++e) {
    g.out_edges_[static_cast<size_t>(g.edge_from_[static_cast<size_t>(e)])].push_back(e);
    g.in_edges_[static_cast<size_t>(g.edge_to_[static_cast<size_t>(e)])].push_back(e);
    g.out_mass_[static_cast<size_t>(g.edge_from_[static_cast<size_t>(e)])] += g.mu_e_[static_cast<size_t>(e)];
    g.in_mass_[static_cast<size_t>(g.edge_to_[static_cast<size_t>(e)])] += g.mu_e_[static_cast<size_t>(e)];
  }
  return g;
}

// ---------------------------------------------------------------------------
// Built-in families

enum class BuiltinFamily { path, ladder, diamond, periodic };

struct BuiltinParams {
  std::optional<int> n_min;
  std::optional<int> n_max;
  int level = 1;   // diamond
  int period = 2;  // periodic: doubled layer every `period` ranks
};

inline BuiltinFamily builtin_family_from_name(const std::string& name) {
  if (name == "path") return BuiltinFamily::path;
  if (name == "ladder") return BuiltinFamily::ladder;
  if (name == "diamond") return BuiltinFamily::diamond;
  if (name == "periodic") return BuiltinFamily::periodic;
  fail(ErrorCode::UnknownFamily, "unknown builtin graph family '" + name + "'");
}

namespace detail {

inline void complete_bipartite_layers(GraphSpec& spec,
                                      const std::vector<std::vector<std::string>>& layer_ids) {
  for (size_t n = 0; n + 1 < layer_ids.size(); ++n)
    for (const auto& a : layer_ids[n])
      for (const auto& b : layer_ids[n + 1]) spec.edges.push_back({a, b, std::nullopt});
}

inline int positive_mod(int a, int m) {
  int r = a % m;
  return r < 0 ? r + m : r;
}

}  // namespace detail

inline GradedGraph builtin_graph(BuiltinFamily family, const BuiltinParams& params) {
  GraphSpec spec;
  switch (family) {
    case BuiltinFamily::path:
    case BuiltinFamily::ladder:
    case BuiltinFamily::periodic: {
      if (!params.n_min || !params.n_max)
        fail(ErrorCode::BadParams, "this family requires an explicit window");
      const int a = *params.n_min, b = *params.n_max;
      if (b - a + 1 < 2) fail(ErrorCode::BadParams, "window must contain at least two layers");
      if (family == BuiltinFamily::ladder && (a > 0 || b < 0))
        fail(ErrorCode::BadParams, "ladder window must contain rank 0 (the doubled layer)");
      if (family == BuiltinFamily::periodic && params.period != 2 && params.period != 4)
        fail(ErrorCode::BadParams, "periodic family supports period 2 or 4");
      std::vector<std::vector<std::string>> layer_ids;
      for (int n = a; n <= b; ++n) {
        bool doubled = (family == BuiltinFamily::ladder && n == 0) ||
                       (family == BuiltinFamily::periodic &&
                        detail::positive_mod(n, params.period) == 0);
        std::vector<std::string> ids;
        if (doubled) {
          ids.push_back(std::to_string(n) + "w1");
          ids.push_back(std::to_string(n) + "w2");
        } else {
          ids.push_back(std::to_string(n));
        }
        for (const auto& id : ids) spec.vertices.push_back({id, n});
        layer_ids.push_back(std::move(ids));
      }
      detail::complete_bipartite_layers(spec, layer_ids);
      break;
    }
    case BuiltinFamily::diamond: {
      if (params.level < 1 || params.level > 12)
        fail(ErrorCode::BadParams, "diamond level must be in [1, 12]");
      // Level 1 is the 4-vertex diamond on [0, 2]; each further level replaces
      // every edge with two parallel two-edge paths, doubling the rank extent.
      struct V {
        int rank;
      };
      std::vector<V> vs = {{0}, {1}, {1}, {2}};
      std::vector<std::pair<int, int>> es = {{0, 1}, {0, 2}, {1, 3}, {2, 3}};
      for (int l = 2; l <= params.level; ++l) {
        std::vector<V> nvs;
        nvs.reserve(vs.size() + 2 * es.size());
        for (const auto& v : vs) nvs.push_back({2 * v.rank});
        std::vector<std::pair<int, int>> nes;
        nes.reserve(4 * es.size());
        for (const auto& [u, w] : es) {
          int mid_rank = 2 * vs[static_cast<size_t>(u)].rank + 1;
          int m1 = static_cast<int>(nvs.size());
          nvs.push_back({mid_rank});
          int m2 = static_cast<int>(nvs.size());
          nvs.push_back({mid_rank});
          nes.push_back({u, m1});
          nes.push_back({u, m2});
          nes.push_back({m1, w});
          nes.push_back({m2, w});
        }
        vs = std::move(nvs);
        es = std::move(nes);
      }
      const int natural_max = 1 << params.level;
      int a = params.n_min.value_or(0);
      int b = params.n_max.value_or(natural_max);
      a = std::max(a, 0);
      b = std::min(b, natural_max);
      if (b - a + 1 < 2)
        fail(ErrorCode::BadParams, "window intersected with [0, 2^level] has fewer than two layers");
      // Deterministic ids: construction order within each layer.
      std::vector<int> per_layer(static_cast<size_t>(natural_max + 1), 0);
      std::vector<std::string> id_of(vs.size());
      for (size_t i = 0; i < vs.size(); ++i) {
        int r = vs[i].rank;
        int k = ++per_layer[static_cast<size_t>(r)];
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%dw%03d", r, k);
        id_of[i] = buf;
      }
      std::vector<char> keep(vs.size(), 0);
      for (size_t i = 0; i < vs.size(); ++i)
        if (vs[i].rank >= a && vs[i].rank <= b) {
          keep[i] = 1;
          spec.vertices.push_back({id_of[i], vs[i].rank});
        }
      for (const auto& [u, w] : es)
        if (keep[static_cast<size_t>(u)] && keep[static_cast<size_t>(w)])
          spec.edges.push_back({id_of[static_cast<size_t>(u)], id_of[static_cast<size_t>(w)], std::nullopt});
      break;
    }
  }
  return build_graph(spec);
}

// ---------------------------------------------------------------------------
// Assumption checks

struct ValidationIssue {
  std::string where;
  double residual = 0.0;
};

struct ValidationReport {
  bool graded = true;
  bool layer_prob_v = true;
  bool layer_prob_e = true;
  bool measure_balance = true;
  bool combinatorics_balance = true;
  bool mass_lower_bound = true;
  double delta = 0.0;
  double tol = 0.0;
  std::vector<ValidationIssue> issues;

  bool all_ok() const {
    return graded && layer_prob_v && layer_prob_e && measure_balance && combinatorics_balance &&
           mass_lower_bound;
  }
};

// Checks every assumption the lifting machinery relies on. Boundary layers of
// the window check only the inward-facing Measure Balance identity (there are
// no edges beyond the window).
inline ValidationReport validate(const GradedGraph& g, double delta = 1e-8, double tol = 1e-12) {
  ValidationReport rep;
  rep.delta = delta;
  rep.tol = tol;

  for (int e = 0; e < g.edge_count(); ++e) {
    if (g.rank(g.edge_to(e)) != g.rank(g.edge_from(e)) + 1) {
      rep.graded = false;
      rep.issues.push_back({"edge (" + g.vertex_id(g.edge_from(e)) + ", " +
                                g.vertex_id(g.edge_to(e)) + ") violates rank+1",
                            0.0});
    }
  }

  for (int n = g.n_min(); n <= g.n_max(); ++n) {
    double s = 0.0;
    for (int v : g.layer(n)) s += g.mu_v(v);
    if (std::abs(s - 1.0) > tol) {
      rep.layer_prob_v = false;
      rep.issues.push_back({"layer " + std::to_string(n) + " vertex mass", s - 1.0});
    }
  }

  std::vector<double> pair_sum(static_cast<size_t>(std::max(0, g.window_size() - 1)), 0.0);
  std::vector<double> pair_min(pair_sum.size(), std::numeric_limits<double>::infinity());
  std::vector<double> pair_max(pair_sum.size(), -std::numeric_limits<double>::infinity());
  for (int e = 0; e < g.edge_count(); ++e) {
    size_t k = static_cast<size_t>(g.rank(g.edge_from(e)) - g.n_min());
    pair_sum[k] += g.mu_e(e);
    pair_min[k] = std::min(pair_min[k], g.mu_e(e));
    pair_max[k] = std::max(pair_max[k], g.mu_e(e));
  }
  for (size_t k = 0; k < pair_sum.size(); ++k) {
    int n = g.n_min() + static_cast<int>(k);
    if (std::abs(pair_sum[k] - 1.0) > tol) {
      rep.layer_prob_e = false;
      rep.issues.push_back({"edge layer (" + std::to_string(n) + ", " + std::to_string(n + 1) + ") mass",
                            pair_sum[k] - 1.0});
    }
    if (pair_max[k] - pair_min[k] > tol) {
      rep.combinatorics_balance = false;
      rep.issues.push_back({"edge measures between layers " + std::to_string(n) + " and " +
                                std::to_string(n + 1) + " differ",
                            pair_max[k] - pair_min[k]});
    }
  }

  for (int v = 0; v < g.vertex_count(); ++v) {
    if (g.rank(v) < g.n_max()) {
      double r = g.mu_v(v) - g.out_mass(v);
      if (std::abs(r) > tol) {
        rep.measure_balance = false;
        rep.issues.push_back({"measure balance (out) at vertex " + g.vertex_id(v), r});
      }
    }
    if (g.rank(v) > g.n_min()) {
      double r = g.mu_v(v) - g.in_mass(v);
      if (std::abs(r) > tol) {
        rep.measure_balance = false;
        rep.issues.push_back({"measure balance (in) at vertex " + g.vertex_id(v), r});
      }
    }
    if (g.mu_v(v) < delta) {
      rep.mass_lower_bound = false;
      rep.issues.push_back({"mu_v below delta at vertex " + g.vertex_id(v), delta - g.mu_v(v)});
    }
  }
  return rep;
}

}  // namespace gradedtoda

#endif  // GRADEDTODA_GRADED_GRAPH_HPP
