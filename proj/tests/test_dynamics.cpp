#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "gradedtoda/dynamics.hpp"
#include "gradedtoda/soliton.hpp"

using namespace gradedtoda;

namespace {

GradedGraph ladder(int a, int b) {
  BuiltinParams p;
  p.n_min = a;
  p.n_max = b;
  return builtin_graph(BuiltinFamily::ladder, p);
}

GradedGraph path(int a, int b) {
  BuiltinParams p;
  p.n_min = a;
  p.n_max = b;
  return builtin_graph(BuiltinFamily::path, p);
}

PhaseState zero_state(const GradedGraph& g) {
  return {GraphFunction::Zero(g.vertex_count()), GraphFunction::Zero(g.vertex_count()), 0.0};
}

}  // namespace

TEST_CASE("toda potential closed forms") {
  Potential u = toda_potential();
  REQUIRE(u.value(0.0) == 0.0);
  REQUIRE(u.d1(0.0) == -1.0);
  REQUIRE(u.d2(0.0) == 1.0);
  REQUIRE(u.inv_d1(-1.0) == 0.0);
  for (double r : {-2.0, 0.5, 3.0}) REQUIRE(std::abs(u.inv_d1(u.d1(r)) - r) < 1e-14);
  try {
    u.inv_d1(0.5);
    FAIL("expected InverseDomainError");
  } catch (const Error& e) {
    REQUIRE(e.code() == ErrorCode::InverseDomainError);
  }
}

TEST_CASE("potential derivatives agree with finite differences") {
  const double h = 1e-5;
  std::mt19937 rng(2);
  std::uniform_real_distribution<double> d(-2.0, 2.0);
  for (Potential u : {toda_potential(), harmonic_potential()}) {
    for (int trial = 0; trial < 20; ++trial) {
      double r = d(rng);
      double fd1 = (u.value(r + h) - u.value(r - h)) / (2 * h);
      double fd2 = (u.d1(r + h) - u.d1(r - h)) / (2 * h);
      REQUIRE(std::abs(fd1 - u.d1(r)) < 1e-8);
      REQUIRE(std::abs(fd2 - u.d2(r)) < 1e-8);
    }
  }
}

TEST_CASE("hamiltonian vanishes at the equilibrium configuration") {
  GradedGraph g = ladder(-3, 3);
  REQUIRE(hamiltonian(g, zero_state(g), toda_potential()) == 0.0);
}

TEST_CASE("on the path the hamiltonian is the 1D Toda energy") {
  GradedGraph g = path(0, 4);
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  PhaseState st = zero_state(g);
  for (int v = 0; v < 5; ++v) {
    st.q(v) = d(rng);
    st.p(v) = d(rng);
  }
  double expect = 0.0;
  for (int n = 0; n < 5; ++n) expect += st.p(n) * st.p(n) / 2.0;
  for (int n = 0; n < 4; ++n) expect += std::exp(-(st.q(n + 1) - st.q(n))) - 1.0;
  REQUIRE(std::abs(hamiltonian(g, st, toda_potential()) - expect) < 1e-14);
}

TEST_CASE("radial states reproduce the chain hamiltonian") {
  GradedGraph g = ladder(-4, 4);
  GradedGraph chain = path(-4, 4);
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  ChainFunction cq(g.window_size()), cp(g.window_size());
  for (int i = 0; i < cq.size(); ++i) {
    cq(i) = d(rng);
    cp(i) = d(rng);
  }
  PhaseState lifted = lift_radial_state(cq, cp, g);
  PhaseState chain_state{cq, cp, 0.0};
  double hg = hamiltonian(g, lifted, toda_potential());
  double hz = hamiltonian(chain, chain_state, toda_potential());
  REQUIRE(std::abs(hg - hz) < 1e-13);
}

TEST_CASE("equilibrium is a fixed point of the field at interior vertices") {
  GradedGraph g = ladder(-3, 3);
  PhaseState st = zero_state(g);
  st.q.setConstant(0.7);
  PhaseDerivative d = eom_vector_field(g, st, toda_potential());
  REQUIRE(d.dq.cwiseAbs().maxCoeff() == 0.0);
  for (int v = 0; v < g.vertex_count(); ++v)
    if (g.rank(v) > g.n_min() && g.rank(v) < g.n_max()) REQUIRE(std::abs(d.dp(v)) < 1e-15);
  // free ends feel the uncancelled neighbor force U'(0) = -1
  REQUIRE(std::abs(d.dp(g.vertex_index("-3")) - g.mu_v(g.vertex_index("-3")) * (-1.0)) < 1e-15);
}

TEST_CASE("path field matches the explicit 1D Toda equations") {
  GradedGraph g = path(0, 5);
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  PhaseState st = zero_state(g);
  for (int v = 0; v < 6; ++v) {
    st.q(v) = dist(rng);
    st.p(v) = dist(rng);
  }
  PhaseDerivative d = eom_vector_field(g, st, toda_potential());
  for (int n = 1; n < 5; ++n) {
    double expect = -std::exp(-(st.q(n + 1) - st.q(n))) + std::exp(-(st.q(n) - st.q(n - 1)));
    REQUIRE(std::abs(d.dp(n) - expect) < 1e-14);
    REQUIRE(d.dq(n) == st.p(n));
  }
}

TEST_CASE("on radial states the graph field is the lifted chain field") {
  GradedGraph g = ladder(-4, 4);
  GradedGraph chain = path(-4, 4);
  std::mt19937 rng(13);
  std::uniform_real_distribution<double> dist(-0.8, 0.8);
  ChainFunction cq(g.window_size()), cp(g.window_size());
  for (int i = 0; i < cq.size(); ++i) {
    cq(i) = dist(rng);
    cp(i) = dist(rng);
  }
  PhaseState lifted = lift_radial_state(cq, cp, g);
  PhaseState cst{cq, cp, 0.0};
  PhaseDerivative dg = eom_vector_field(g, lifted, toda_potential());
  PhaseDerivative dz = eom_vector_field(chain, cst, toda_potential());
  for (int v = 0; v < g.vertex_count(); ++v) {
    int i = g.rank(v) - g.n_min();
    REQUIRE(std::abs(dg.dq(v) - dz.dq(i)) < 1e-14);
    // momenta carry the vertex mass
    REQUIRE(std::abs(dg.dp(v) - g.mu_v(v) * dz.dp(i)) < 1e-14);
  }
}

TEST_CASE("mass below delta is rejected") {
  GraphSpec s;
  s.vertices = {{"0", 0}, {"1", 1}};
  s.edges = {{"0", "1", 1.0}};
  s.mu_v = {{"0", 1e-12}, {"1", 1.0}};
  GradedGraph g = build_graph(s);
  PhaseState st = zero_state(g);
  try {
    eom_vector_field(g, st, toda_potential());
    FAIL("expected MassBelowDelta");
  } catch (const Error& e) {
    REQUIRE(e.code() == ErrorCode::MassBelowDelta);
  }
}

TEST_CASE("flaschka transformation values") {
  GradedGraph g = ladder(-2, 2);
  Potential u = toda_potential();

  PhaseState st = zero_state(g);
  FlaschkaState f = flaschka_forward(g, st, u);
  REQUIRE((f.a.array() + 0.5).abs().maxCoeff() < 1e-15);
  REQUIRE(f.b.cwiseAbs().maxCoeff() == 0.0);

  GradedGraph pg = path(0, 5);
  PhaseState ramp = zero_state(pg);
  const double kappa = 0.8;
  for (int n = 0; n <= 5; ++n) ramp.q(n) = 2.0 * kappa * n;
  FlaschkaState fr = flaschka_forward(pg, ramp, u);
  REQUIRE((fr.a.array() + 0.5 * std::exp(-kappa)).abs().maxCoeff() < 1e-15);

  PhaseState st2 = zero_state(g);
  st2.p(g.vertex_index("0w1")) = 0.3;
  FlaschkaState f2 = flaschka_forward(g, st2, u);
  REQUIRE(std::abs(f2.b(g.vertex_index("0w1")) + 0.3) < 1e-15);  // -p/(2 * 1/2)
}

TEST_CASE("flaschka field: equilibrium, path, and ladder forms") {
  GradedGraph g = ladder(-2, 2);
  Potential u = toda_potential();
  FlaschkaState eq{Eigen::VectorXd::Constant(g.edge_count(), -0.5),
                   Eigen::VectorXd::Zero(g.vertex_count()), 0.0};
  FlaschkaDerivative d = flaschka_vector_field(g, eq, u);
  REQUIRE(d.da.cwiseAbs().maxCoeff() == 0.0);
  for (int v = 0; v < g.vertex_count(); ++v)
    if (g.rank(v) > g.n_min() && g.rank(v) < g.n_max()) REQUIRE(std::abs(d.db(v)) < 1e-15);

  std::mt19937 rng(17);
  std::uniform_real_distribution<double> dist(0.1, 1.0), bd(-1.0, 1.0);

  GradedGraph pg = path(0, 5);
  FlaschkaState fs{Eigen::VectorXd(pg.edge_count()), Eigen::VectorXd(pg.vertex_count()), 0.0};
  for (int e = 0; e < pg.edge_count(); ++e) fs.a(e) = -dist(rng);
  for (int v = 0; v < pg.vertex_count(); ++v) fs.b(v) = bd(rng);
  FlaschkaDerivative dp = flaschka_vector_field(pg, fs, u);
  for (int n = 1; n < 5; ++n)
    REQUIRE(std::abs(dp.db(n) - (2 * fs.a(n) * fs.a(n) - 2 * fs.a(n - 1) * fs.a(n - 1))) < 1e-14);
  for (int e = 0; e < pg.edge_count(); ++e)
    REQUIRE(std::abs(dp.da(e) - fs.a(e) * (fs.b(e + 1) - fs.b(e))) < 1e-14);

  // ladder vertex 0w_i: db = 2 a(0w_i,1)^2 - 2 a(-1,0w_i)^2
  FlaschkaState fl{Eigen::VectorXd(g.edge_count()), Eigen::VectorXd(g.vertex_count()), 0.0};
  for (int e = 0; e < g.edge_count(); ++e) fl.a(e) = -dist(rng);
  for (int v = 0; v < g.vertex_count(); ++v) fl.b(v) = bd(rng);
  FlaschkaDerivative dl = flaschka_vector_field(g, fl, u);
  for (const char* id : {"0w1", "0w2"}) {
    int v = g.vertex_index(id);
    REQUIRE(g.in_edges(v).size() == 1);
    REQUIRE(g.out_edges(v).size() == 1);
    double ain = fl.a(g.in_edges(v)[0]), aout = fl.a(g.out_edges(v)[0]);
    REQUIRE(std::abs(dl.db(v) - (2 * aout * aout - 2 * ain * ain)) < 1e-14);
  }
  // vertex -1: db = a^2(-1,0w1) + a^2(-1,0w2) - 2 a^2(-2,-1)
  {
    int v = g.vertex_index("-1");
    double a1 = fl.a(g.out_edges(v)[0]), a2 = fl.a(g.out_edges(v)[1]);
    double ain = fl.a(g.in_edges(v)[0]);
    REQUIRE(std::abs(dl.db(v) - (a1 * a1 + a2 * a2 - 2 * ain * ain)) < 1e-14);
  }
}

TEST_CASE("general-potential flaschka flow matches the Toda fast path") {
  GradedGraph g = ladder(-2, 2);
  Potential toda = toda_potential();
  Potential general = toda;  // same closures, but force the generic branch
  general.is_toda = false;
  std::mt19937 rng(19);
  std::uniform_real_distribution<double> dist(0.1, 1.0), bd(-1.0, 1.0);
  FlaschkaState st{Eigen::VectorXd(g.edge_count()), Eigen::VectorXd(g.vertex_count()), 0.0};
  for (int e = 0; e < g.edge_count(); ++e) st.a(e) = -dist(rng);
  for (int v = 0; v < g.vertex_count(); ++v) st.b(v) = bd(rng);
  FlaschkaDerivative fast = flaschka_vector_field(g, st, toda);
  FlaschkaDerivative gen = flaschka_vector_field(g, st, general);
  REQUIRE((fast.da - gen.da).cwiseAbs().maxCoeff() < 1e-13);
  REQUIRE((fast.db - gen.db).cwiseAbs().maxCoeff() < 1e-13);

  Potential no_inverse = toda;
  no_inverse.is_toda = false;
  no_inverse.inv_d1 = nullptr;
  try {
    flaschka_vector_field(g, st, no_inverse);
    FAIL("expected InverseDomainError");
  } catch (const Error& e) {
    REQUIRE(e.code() == ErrorCode::InverseDomainError);
  }
}

TEST_CASE("harmonic equilibrium integrates to a constant trajectory") {
  GradedGraph g = ladder(-3, 3);
  PhaseState st = zero_state(g);
  st.q.setConstant(1.3);
  auto traj = integrate_phase(g, harmonic_potential(), st, 2.0, {1e-2, 10});
  for (const auto& s : traj) {
    REQUIRE((s.q.array() - 1.3).abs().maxCoeff() < 1e-14);
    REQUIRE(s.p.cwiseAbs().maxCoeff() < 1e-14);
  }
}

TEST_CASE("rk4 is fourth order against a reference run") {
  GradedGraph g = path(-10, 10);
  auto [q0, p0] = soliton_state(centered_soliton(1.0, +1, 0.0), -10, 10, 0.0);
  PhaseState init{q0, p0, 0.0};
  Potential u = toda_potential();
  const double T = 1.0;
  auto ref = integrate_phase(g, u, init, T, {1e-4, 10000});
  auto coarse = integrate_phase(g, u, init, T, {1e-2, 100});
  auto fine = integrate_phase(g, u, init, T, {5e-3, 200});
  double err_c = (coarse.back().q - ref.back().q).cwiseAbs().maxCoeff();
  double err_f = (fine.back().q - ref.back().q).cwiseAbs().maxCoeff();
  double ratio = err_c / err_f;
  REQUIRE(ratio > 8.0);
  REQUIRE(ratio < 32.0);
}

TEST_CASE("energy is conserved along the windowed flow") {
  GradedGraph g = ladder(-8, 8);
  auto [q0, p0] = soliton_state(centered_soliton(1.0, +1, 2.0), -8, 8, 0.0);
  PhaseState init = lift_radial_state(q0, p0, g);
  Potential u = toda_potential();
  double h0 = hamiltonian(g, init, u);
  auto traj = integrate_phase(g, u, init, 2.0, {1e-3, 100});
  for (const auto& s : traj) REQUIRE(std::abs(hamiltonian(g, s, u) - h0) < 1e-9);
}

TEST_CASE("radial initial data stays radial over T = 10") {
  GradedGraph g = ladder(-8, 8);
  auto [q0, p0] = soliton_state(centered_soliton(1.0, +1, 2.0), -8, 8, 0.0);
  PhaseState init = lift_radial_state(q0, p0, g);
  auto traj = integrate_phase(g, toda_potential(), init, 10.0, {1e-3, 500});
  for (const auto& s : traj) {
    auto [sq, sv] = radial_spread(g, s);
    REQUIRE(sq < 1e-9);
    REQUIRE(sv < 1e-9);
  }
}

TEST_CASE("blow-up is detected and reports the last finite time") {
  GradedGraph g = path(0, 3);
  PhaseState st = zero_state(g);
  st.p.setConstant(2.0);
  IntegrationOptions opts{0.1, 1, 5.0};  // tiny bound: |q| passes 5 quickly
  try {
    integrate_phase(g, toda_potential(), st, 10.0, opts);
    FAIL("expected BlowUp");
  } catch (const BlowUpError& e) {
    REQUIRE(e.last_good_time() >= 0.0);
    REQUIRE(e.last_good_time() < 10.0);
  }
}

TEST_CASE("lift_radial_state examples and errors") {
  GradedGraph g = ladder(-2, 2);
  ChainFunction e0 = ChainFunction::Zero(g.window_size());
  e0(0 - g.n_min()) = 1.0;
  ChainFunction p0 = ChainFunction::Zero(g.window_size());
  p0(0 - g.n_min()) = 1.0;
  PhaseState st = lift_radial_state(e0, p0, g);
  REQUIRE(st.q(g.vertex_index("0w1")) == 1.0);
  REQUIRE(st.q(g.vertex_index("0w2")) == 1.0);
  REQUIRE(st.q(g.vertex_index("1")) == 0.0);
  REQUIRE(st.p(g.vertex_index("0w1")) == 0.5);
  REQUIRE(st.p(g.vertex_index("0w2")) == 0.5);

  GradedGraph pg = path(-2, 2);
  PhaseState identity = lift_radial_state(e0, p0, pg);
  REQUIRE((identity.q - e0).cwiseAbs().maxCoeff() == 0.0);
  REQUIRE((identity.p - p0).cwiseAbs().maxCoeff() == 0.0);

  ChainFunction wrong(3);
  try {
    lift_radial_state(wrong, wrong, g);
    FAIL("expected WindowMismatch");
  } catch (const Error& e) {
    REQUIRE(e.code() == ErrorCode::WindowMismatch);
  }

  auto [back_q, back_p] = reduce_phase_state(g, st);
  REQUIRE((back_q - e0).cwiseAbs().maxCoeff() < 1e-15);
  REQUIRE((back_p - p0).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("phase flow and flaschka flow commute with the transformation") {
  GradedGraph g = ladder(-6, 6);
  Potential u = toda_potential();
  auto [q0, p0] = soliton_state(centered_soliton(1.0, +1, 1.0), -6, 6, 0.0);
  PhaseState init = lift_radial_state(q0, p0, g);
  const double T = 1.0;
  IntegrationOptions opts{1e-3, 1000};
  auto phase_traj = integrate_phase(g, u, init, T, opts);
  FlaschkaState f0 = flaschka_forward(g, init, u);
  auto fl_traj = integrate_flaschka(g, u, f0, T, opts);
  FlaschkaState from_phase = flaschka_forward(g, phase_traj.back(), u);
  REQUIRE((from_phase.a - fl_traj.back().a).cwiseAbs().maxCoeff() < 1e-8);
  REQUIRE((from_phase.b - fl_traj.back().b).cwiseAbs().maxCoeff() < 1e-8);
}
