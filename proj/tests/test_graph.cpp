#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <random>

#include "gradedtoda/graded_graph.hpp"

using namespace gradedtoda;

namespace {

GraphSpec path_spec(int a, int b) {
  GraphSpec s;
  for (int n = a; n <= b; ++n) {
    s.vertices.push_back({std::to_string(n), n});
    if (n > a) s.edges.push_back({std::to_string(n - 1), std::to_string(n), {}});
  }
  return s;
}

GradedGraph ladder(int a, int b) {
  BuiltinParams p;
  p.n_min = a;
  p.n_max = b;
  return builtin_graph(BuiltinFamily::ladder, p);
}

// Random layered graph with complete bipartite edges and product measures
// mu_E(x,y) = mu_V(x) mu_V(y); satisfies Measure Balance by construction.
GradedGraph random_balanced_graph(std::mt19937& rng, int n_layers) {
  std::uniform_int_distribution<int> size_dist(1, 3);
  std::uniform_real_distribution<double> mass_dist(0.2, 1.0);
  GraphSpec s;
  std::vector<std::vector<std::string>> layers;
  std::vector<std::vector<double>> masses;
  for (int n = 0; n < n_layers; ++n) {
    int k = size_dist(rng);
    std::vector<std::string> ids;
    std::vector<double> w(k);
    double tot = 0.0;
    for (int i = 0; i < k; ++i) {
      w[i] = mass_dist(rng);
      tot += w[i];
    }
    for (int i = 0; i < k; ++i) {
      std::string id = std::to_string(n) + "v" + std::to_string(i);
      ids.push_back(id);
      s.vertices.push_back({id, n});
      s.mu_v[id] = w[i] / tot;
    }
    layers.push_back(ids);
    masses.push_back(w);
    for (double& x : masses.back()) x /= tot;
  }
  for (int n = 0; n + 1 < n_layers; ++n)
    for (size_t i = 0; i < layers[n].size(); ++i)
      for (size_t j = 0; j < layers[n + 1].size(); ++j)
        s.edges.push_back({layers[n][i], layers[n + 1][j], masses[n][i] * masses[n + 1][j]});
  return build_graph(s);
}

}  // namespace

TEST_CASE("path spec with no measures gets unit measures") {
  GradedGraph g = build_graph(path_spec(0, 2));
  REQUIRE(g.vertex_count() == 3);
  REQUIRE(g.edge_count() == 2);
  for (int v = 0; v < 3; ++v) REQUIRE(g.mu_v(v) == 1.0);
  for (int e = 0; e < 2; ++e) REQUIRE(g.mu_e(e) == 1.0);
}

TEST_CASE("ladder builder reproduces the doubled-layer measures") {
  GradedGraph g = ladder(-2, 2);
  REQUIRE(g.vertex_count() == 6);
  REQUIRE(g.window_size() == 5);
  REQUIRE(g.mu_v(g.vertex_index("0w1")) == 0.5);
  REQUIRE(g.mu_v(g.vertex_index("0w2")) == 0.5);
  REQUIRE(g.mu_v(g.vertex_index("-1")) == 1.0);
  // mu_E(-1,0w1) = mu_E(-1,0w2) = mu_E(0w1,1) = mu_E(0w2,1) = 1/2
  int half_edges = 0;
  for (int e = 0; e < g.edge_count(); ++e) {
    int lo = g.rank(g.edge_from(e));
    if (lo == -1 || lo == 0) {
      REQUIRE(g.mu_e(e) == 0.5);
      ++half_edges;
    } else {
      REQUIRE(g.mu_e(e) == 1.0);
    }
  }
  REQUIRE(half_edges == 4);
}

TEST_CASE("same-layer edge is rejected") {
  GraphSpec s;
  s.vertices = {{"-1", -1}, {"0w1", 0}, {"0w2", 0}, {"1", 1}};
  s.edges = {{"-1", "0w1", {}}, {"-1", "0w2", {}}, {"0w1", "0w2", {}}, {"0w1", "1", {}}, {"0w2", "1", {}}};
  try {
    build_graph(s);
    FAIL("expected EdgeRankViolation");
  } catch (const Error& e) {
    REQUIRE(e.code() == ErrorCode::EdgeRankViolation);
  }
}

TEST_CASE("rank gaps and disconnected skeletons are rejected") {
  GraphSpec gap;
  gap.vertices = {{"0", 0}, {"2", 2}};
  try {
    build_graph(gap);
    FAIL("expected NonContiguousWindow");
  } catch (const Error& e) {
    REQUIRE(e.code() == ErrorCode::NonContiguousWindow);
  }

  GraphSpec disc;
  disc.vertices = {{"a0", 0}, {"a1", 1}, {"b0", 0}, {"b1", 1}};
  disc.edges = {{"a0", "a1", {}}, {"b0", "b1", {}}};
  try {
    build_graph(disc);
    FAIL("expected Disconnected");
  } catch (const Error& e) {
    REQUIRE(e.code() == ErrorCode::Disconnected);
  }

  GraphSpec neg = path_spec(0, 1);
  neg.edges[0].mu_e = -0.5;
  try {
    build_graph(neg);
    FAIL("expected NonPositiveMeasure");
  } catch (const Error& e) {
    REQUIRE(e.code() == ErrorCode::NonPositiveMeasure);
  }
}

TEST_CASE("builtin path on [-3,3]") {
  BuiltinParams p;
  p.n_min = -3;
  p.n_max = 3;
  GradedGraph g = builtin_graph(BuiltinFamily::path, p);
  REQUIRE(g.vertex_count() == 7);
  REQUIRE(g.edge_count() == 6);
  for (int v = 0; v < g.vertex_count(); ++v) REQUIRE(g.mu_v(v) == 1.0);
  for (int e = 0; e < g.edge_count(); ++e) REQUIRE(g.mu_e(e) == 1.0);
}

TEST_CASE("diamond level 1 layer structure") {
  BuiltinParams p;
  p.level = 1;
  GradedGraph g = builtin_graph(BuiltinFamily::diamond, p);
  REQUIRE(g.vertex_count() == 4);
  REQUIRE(g.layer_size(0) == 1);
  REQUIRE(g.layer_size(1) == 2);
  REQUIRE(g.layer_size(2) == 1);
  // enumerate edges: both inter-layer sets have two edges of measure 1/2, so
  // each layer-pair mass sums to one
  double s01 = 0.0, s12 = 0.0;
  for (int e = 0; e < g.edge_count(); ++e) {
    REQUIRE(g.mu_e(e) == 0.5);
    (g.rank(g.edge_from(e)) == 0 ? s01 : s12) += g.mu_e(e);
  }
  REQUIRE(s01 == 1.0);
  REQUIRE(s12 == 1.0);
}

TEST_CASE("diamond level 2 layer sizes and window restriction") {
  BuiltinParams p;
  p.level = 2;
  GradedGraph g = builtin_graph(BuiltinFamily::diamond, p);
  REQUIRE(g.vertex_count() == 12);
  std::vector<int> sizes;
  for (int n = 0; n <= 4; ++n) sizes.push_back(g.layer_size(n));
  REQUIRE(sizes == std::vector<int>{1, 4, 2, 4, 1});
  REQUIRE(validate(g).all_ok());

  p.n_min = 0;
  p.n_max = 2;
  GradedGraph cut = builtin_graph(BuiltinFamily::diamond, p);
  REQUIRE(cut.window_size() == 3);
  REQUIRE(cut.layer_size(1) == 4);
  ValidationReport rep = validate(cut);
  REQUIRE(rep.all_ok());  // boundary layers only check the inward identity
}

TEST_CASE("periodic builders double every m-th layer") {
  BuiltinParams p;
  p.n_min = -4;
  p.n_max = 4;
  p.period = 2;
  GradedGraph g2 = builtin_graph(BuiltinFamily::periodic, p);
  for (int n = -4; n <= 4; ++n) REQUIRE(g2.layer_size(n) == (n % 2 == 0 ? 2 : 1));
  REQUIRE(validate(g2).all_ok());

  p.period = 4;
  GradedGraph g4 = builtin_graph(BuiltinFamily::periodic, p);
  for (int n = -4; n <= 4; ++n) REQUIRE(g4.layer_size(n) == (n % 4 == 0 ? 2 : 1));
  REQUIRE(validate(g4).all_ok());
}

TEST_CASE("builder parameter errors") {
  BuiltinParams p;
  p.n_min = 0;
  p.n_max = 0;
  try {
    builtin_graph(BuiltinFamily::path, p);
    FAIL("expected BadParams");
  } catch (const Error& e) {
    REQUIRE(e.code() == ErrorCode::BadParams);
  }
  p.n_max = 4;
  p.n_min = 1;  // ladder needs rank 0
  try {
    builtin_graph(BuiltinFamily::ladder, p);
    FAIL("expected BadParams");
  } catch (const Error& e) {
    REQUIRE(e.code() == ErrorCode::BadParams);
  }
  p.n_min = -1;
  p.period = 3;
  try {
    builtin_graph(BuiltinFamily::periodic, p);
    FAIL("expected BadParams");
  } catch (const Error& e) {
    REQUIRE(e.code() == ErrorCode::BadParams);
  }
  try {
    builtin_family_from_name("moebius");
    FAIL("expected UnknownFamily");
  } catch (const Error& e) {
    REQUIRE(e.code() == ErrorCode::UnknownFamily);
  }
}

TEST_CASE("validate flags the ladder as fully balanced") {
  ValidationReport rep = validate(ladder(-5, 5));
  REQUIRE(rep.graded);
  REQUIRE(rep.layer_prob_v);
  REQUIRE(rep.layer_prob_e);
  REQUIRE(rep.measure_balance);
  REQUIRE(rep.combinatorics_balance);
  REQUIRE(rep.mass_lower_bound);
}

TEST_CASE("doubled edge measure breaks measure balance with residual 1") {
  GraphSpec s = path_spec(0, 2);
  s.edges[0].mu_e = 2.0;  // (0,1)
  s.edges[1].mu_e = 1.0;
  s.mu_v = {{"0", 1.0}, {"1", 1.0}, {"2", 1.0}};
  ValidationReport rep = validate(build_graph(s));
  REQUIRE_FALSE(rep.measure_balance);
  bool found = false;
  for (const auto& issue : rep.issues)
    if (issue.where.find("vertex 0") != std::string::npos && std::abs(issue.residual + 1.0) < 1e-15)
      found = true;  // mu_V(0) - out_mass(0) = 1 - 2 = -1
  REQUIRE(found);
}

TEST_CASE("unequal same-pair edge measures break combinatorics balance only") {
  GraphSpec s;
  s.vertices = {{"-1", -1}, {"0w1", 0}, {"0w2", 0}, {"1", 1}};
  s.edges = {{"-1", "0w1", 0.3}, {"-1", "0w2", 0.7}, {"0w1", "1", 0.5}, {"0w2", "1", 0.5}};
  s.mu_v = {{"-1", 1.0}, {"0w1", 0.5}, {"0w2", 0.5}, {"1", 1.0}};
  ValidationReport rep = validate(build_graph(s));
  REQUIRE(rep.layer_prob_e);
  REQUIRE_FALSE(rep.combinatorics_balance);
}

TEST_CASE("transversal degrees on ladder and path") {
  GradedGraph g = ladder(-2, 2);
  REQUIRE(g.transversal_degrees("-1") == std::pair<int, int>{1, 2});
  REQUIRE(g.transversal_degrees("0w1") == std::pair<int, int>{1, 1});
  REQUIRE(g.transversal_degrees("1") == std::pair<int, int>{2, 1});

  GradedGraph path = build_graph(path_spec(0, 4));
  REQUIRE(path.transversal_degrees("2") == std::pair<int, int>{1, 1});
  try {
    g.transversal_degrees("nope");
    FAIL("expected UnknownVertex");
  } catch (const Error& e) {
    REQUIRE(e.code() == ErrorCode::UnknownVertex);
  }
}

TEST_CASE("every builtin family validates under the uniform rule") {
  std::vector<GradedGraph> graphs;
  BuiltinParams p;
  p.n_min = -6;
  p.n_max = 6;
  graphs.push_back(builtin_graph(BuiltinFamily::path, p));
  graphs.push_back(builtin_graph(BuiltinFamily::ladder, p));
  p.period = 2;
  graphs.push_back(builtin_graph(BuiltinFamily::periodic, p));
  p.period = 4;
  graphs.push_back(builtin_graph(BuiltinFamily::periodic, p));
  BuiltinParams d;
  for (int level : {1, 2, 3}) {
    d.level = level;
    graphs.push_back(builtin_graph(BuiltinFamily::diamond, d));
  }
  for (const auto& g : graphs) REQUIRE(validate(g).all_ok());
}

TEST_CASE("interior layers: total outgoing edge mass is one") {
  std::mt19937 rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    GradedGraph g = random_balanced_graph(rng, 5);
    ValidationReport rep = validate(g, 1e-8, 1e-10);
    REQUIRE(rep.layer_prob_v);
    REQUIRE(rep.layer_prob_e);
    REQUIRE(rep.measure_balance);
    for (int n = g.n_min(); n < g.n_max(); ++n) {
      double s = 0.0;
      for (int x : g.layer(n))
        for (int e : g.out_edges(x)) s += g.mu_e(e);
      REQUIRE(std::abs(s - 1.0) < 1e-12);
    }
  }
}

TEST_CASE("build_graph is deterministic under input shuffling") {
  GraphSpec s;
  s.vertices = {{"1", 1}, {"0w2", 0}, {"-1", -1}, {"0w1", 0}};
  s.edges = {{"0w2", "1", {}}, {"-1", "0w1", {}}, {"0w1", "1", {}}, {"-1", "0w2", {}}};
  GradedGraph a = build_graph(s);
  std::reverse(s.vertices.begin(), s.vertices.end());
  std::reverse(s.edges.begin(), s.edges.end());
  GradedGraph b = build_graph(s);
  REQUIRE(a.vertex_count() == b.vertex_count());
  for (int v = 0; v < a.vertex_count(); ++v) {
    REQUIRE(a.vertex_id(v) == b.vertex_id(v));
    REQUIRE(a.mu_v(v) == b.mu_v(v));
  }
  for (int e = 0; e < a.edge_count(); ++e) {
    REQUIRE(a.edge_from(e) == b.edge_from(e));
    REQUIRE(a.edge_to(e) == b.edge_to(e));
    REQUIRE(a.mu_e(e) == b.mu_e(e));
  }
}
