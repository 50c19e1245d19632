#ifndef GRADEDTODA_DYNAMICS_HPP
#define GRADEDTODA_DYNAMICS_HPP

#include <cmath>
#include <functional>
#include <utility>
#include <vector>

#include "gradedtoda/hilbert.hpp"

namespace gradedtoda {

inline constexpr double kDefaultMassDelta = 1e-8;
inline constexpr double kDefaultBlowUpBound = 1e6;

// C^2 interaction potential. inv_d1 (the inverse of U' on its range) is only
// needed by the general-potential Flaschka flow; no numerical inversion is
// attempted when it is absent.
struct Potential {
  std::function<double(double)> value;
  std::function<double(double)> d1;
  std::function<double(double)> d2;
  std::function<double(double)> inv_d1;  // may be empty
  bool is_toda = false;
};

// U(r) = e^{-r} - 1, the exponential nearest-neighbor interaction.
inline Potential toda_potential() {
  Potential p;
  p.value = [](double r) { return std::exp(-r) - 1.0; };
  p.d1 = [](double r) { return -std::exp(-r); };
  p.d2 = [](double r) { return std::exp(-r); };
  p.inv_d1 = [](double s) {
    if (!(s < 0.0))
      fail(ErrorCode::InverseDomainError, "U' of the Toda potential is negative; got s >= 0");
    return -std::log(-s);
  };
  p.is_toda = true;
  return p;
}

// U(r) = r^2/2. Unlike the Toda potential it has U'(0) = 0, so the windowed
// system has a genuine rest point; used for fixed-point tests and as a second
// CLI potential.
inline Potential harmonic_potential() {
  Potential p;
  p.value = [](double r) { return 0.5 * r * r; };
  p.d1 = [](double r) { return r; };
  p.d2 = [](double) { return 1.0; };
  p.inv_d1 = [](double s) { return s; };
  return p;
}

struct PhaseState {
  GraphFunction q;
  GraphFunction p;
  double time = 0.0;
};

struct FlaschkaState {
  Eigen::VectorXd a;  // per directed edge, graph edge order
  Eigen::VectorXd b;  // per vertex
  double time = 0.0;
};

inline double hamiltonian(const GradedGraph& g, const PhaseState& st, const Potential& pot) {
  require_graph_dim(st.q, g, "hamiltonian");
  require_graph_dim(st.p, g, "hamiltonian");
  double h = 0.0;
  for (int v = 0; v < g.vertex_count(); ++v) h += st.p(v) * st.p(v) / (2.0 * g.mu_v(v));
  for (int e = 0; e < g.edge_count(); ++e)
    h += g.mu_e(e) * pot.value(st.q(g.edge_to(e)) - st.q(g.edge_from(e)));
  return h;
}

struct PhaseDerivative {
  GraphFunction dq;
  GraphFunction dp;
};

// Time-dependent boundary driving for comparisons against exact solutions on
// the infinite graph: ghost layers at ranks n_min-1 and n_max+1 follow the
// given chain values, with edge mass mu_V(x) per Measure Balance.
struct BoundaryDriving {
  std::function<double(double)> q_below;
  std::function<double(double)> q_above;
};

// dq = p / mu_V; dp(x) = sum_out mu_E U'(dq) - sum_in mu_E U'(dq). Edges
// absent beyond the window contribute nothing unless driving is supplied.
inline PhaseDerivative eom_vector_field(const GradedGraph& g, const PhaseState& st,
                                        const Potential& pot, double delta = kDefaultMassDelta,
                                        const BoundaryDriving* drive = nullptr) {
  require_graph_dim(st.q, g, "eom_vector_field");
  require_graph_dim(st.p, g, "eom_vector_field");
  for (int v = 0; v < g.vertex_count(); ++v)
    if (g.mu_v(v) < delta)
      fail(ErrorCode::MassBelowDelta, "mu_V(" + g.vertex_id(v) + ") below delta");

  PhaseDerivative d;
  d.dq.resize(g.vertex_count());
  d.dp = GraphFunction::Zero(g.vertex_count());
  for (int v = 0; v < g.vertex_count(); ++v) d.dq(v) = st.p(v) / g.mu_v(v);
  for (int e = 0; e < g.edge_count(); ++e) {
    const int x = g.edge_from(e), y = g.edge_to(e);
    const double f = g.mu_e(e) * pot.d1(st.q(y) - st.q(x));
    d.dp(x) += f;
    d.dp(y) -= f;
  }
  if (drive) {
    const double qb = drive->q_below(st.time);
    const double qa = drive->q_above(st.time);
    for (int x : g.layer(g.n_min())) d.dp(x) -= g.mu_v(x) * pot.d1(st.q(x) - qb);
    for (int x : g.layer(g.n_max())) d.dp(x) += g.mu_v(x) * pot.d1(qa - st.q(x));
  }
  return d;
}

// a(x,y) = U'(dq(x,y)/2)/2 ; b(x) = -p(x)/(2 mu_V(x)).
inline FlaschkaState flaschka_forward(const GradedGraph& g, const PhaseState& st,
                                      const Potential& pot) {
  require_graph_dim(st.q, g, "flaschka_forward");
  require_graph_dim(st.p, g, "flaschka_forward");
  FlaschkaState f;
  f.time = st.time;
  f.a.resize(g.edge_count());
  f.b.resize(g.vertex_count());
  for (int e = 0; e < g.edge_count(); ++e)
    f.a(e) = 0.5 * pot.d1(0.5 * (st.q(g.edge_to(e)) - st.q(g.edge_from(e))));
  for (int v = 0; v < g.vertex_count(); ++v) f.b(v) = -st.p(v) / (2.0 * g.mu_v(v));
  return f;
}

struct FlaschkaDerivative {
  Eigen::VectorXd da;
  Eigen::VectorXd db;
};

// Toda: da = a (b(y) - b(x)); db(x) = sum_out (mu_E/mu_V) 2a^2 - sum_in (...).
// General potentials go through U'' and the supplied inverse of U'.
inline FlaschkaDerivative flaschka_vector_field(const GradedGraph& g, const FlaschkaState& st,
                                                const Potential& pot) {
  if (st.a.size() != g.edge_count() || st.b.size() != g.vertex_count())
    fail(ErrorCode::DimensionMismatch, "flaschka_vector_field: state does not match graph");
  FlaschkaDerivative d;
  d.da.resize(g.edge_count());
  d.db = Eigen::VectorXd::Zero(g.vertex_count());
  if (pot.is_toda) {
    for (int e = 0; e < g.edge_count(); ++e) {
      const int x = g.edge_from(e), y = g.edge_to(e);
      d.da(e) = st.a(e) * (st.b(y) - st.b(x));
      const double twoa2 = 2.0 * st.a(e) * st.a(e);
      d.db(x) += g.mu_e(e) / g.mu_v(x) * twoa2;
      d.db(y) -= g.mu_e(e) / g.mu_v(y) * twoa2;
    }
    return d;
  }
  if (!pot.inv_d1)
    fail(ErrorCode::InverseDomainError,
         "general-potential Flaschka flow requires the inverse of U'");
  for (int e = 0; e < g.edge_count(); ++e) {
    const int x = g.edge_from(e), y = g.edge_to(e);
    const double r_half = pot.inv_d1(2.0 * st.a(e));  // = dq(x,y)/2
    d.da(e) = -0.5 * pot.d2(r_half) * (st.b(y) - st.b(x));
    const double u1 = pot.d1(2.0 * r_half);
    d.db(x) -= g.mu_e(e) / (2.0 * g.mu_v(x)) * u1;
    d.db(y) += g.mu_e(e) / (2.0 * g.mu_v(y)) * u1;
  }
  return d;
}

// ---------------------------------------------------------------------------
// Fixed-step RK4

struct IntegrationOptions {
  double step = 1e-3;
  int stride = 1;
  double blow_up_bound = kDefaultBlowUpBound;
};

namespace detail {

template <class State>
double max_abs(const State& s) {
  return s.size() == 0 ? 0.0 : s.cwiseAbs().maxCoeff();
}

template <class State>
bool all_finite(const State& s) {
  return s.allFinite();
}

}  // namespace detail

// Classical 4th-order Runge-Kutta with fixed step. Samples are stored every
// `stride` steps plus the final state; the final time is within one step of
// t_end. Aborts with BlowUp diagnostics when any component leaves the bound.
template <class State, class Field>
std::vector<std::pair<double, State>> rk4_integrate(Field&& field, State y0, double t0,
                                                    double t_end, const IntegrationOptions& opts) {
  if (!(opts.step > 0.0)) fail(ErrorCode::BadParams, "integration step must be positive");
  if (!(t_end >= t0)) fail(ErrorCode::BadParams, "t_end must be >= start time");
  if (opts.stride < 1) fail(ErrorCode::BadParams, "stride must be >= 1");

  const double h = opts.step;
  const long long steps = std::max<long long>(1, std::llround((t_end - t0) / h));

  std::vector<std::pair<double, State>> samples;
  samples.reserve(static_cast<size_t>(steps / opts.stride + 2));
  if (!detail::all_finite(y0)) fail(ErrorCode::NonFiniteField, "initial state is not finite");
  samples.emplace_back(t0, y0);

  State y = std::move(y0);
  double last_good = t0;
  for (long long i = 0; i < steps; ++i) {
    const double t = t0 + static_cast<double>(i) * h;
    State k1 = field(t, y);
    State k2 = field(t + 0.5 * h, State(y + (0.5 * h) * k1));
    State k3 = field(t + 0.5 * h, State(y + (0.5 * h) * k2));
    State k4 = field(t + h, State(y + h * k3));
    if (!detail::all_finite(k1) || !detail::all_finite(k2) || !detail::all_finite(k3) ||
        !detail::all_finite(k4))
      fail(ErrorCode::NonFiniteField, "vector field returned a non-finite value at t=" +
                                          std::to_string(t));
    y += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    const double tn = t0 + static_cast<double>(i + 1) * h;
    if (!detail::all_finite(y) || detail::max_abs(y) > opts.blow_up_bound)
      throw BlowUpError("trajectory exceeded the blow-up bound at t=" + std::to_string(tn) +
                            " (last finite sample t=" + std::to_string(last_good) + ")",
                        last_good);
    last_good = tn;
    if ((i + 1) % opts.stride == 0 || i + 1 == steps) samples.emplace_back(tn, y);
  }
  return samples;
}

inline std::vector<PhaseState> integrate_phase(const GradedGraph& g, const Potential& pot,
                                               const PhaseState& init, double t_end,
                                               const IntegrationOptions& opts,
                                               const BoundaryDriving* drive = nullptr,
                                               double delta = kDefaultMassDelta) {
  require_graph_dim(init.q, g, "integrate_phase");
  require_graph_dim(init.p, g, "integrate_phase");
  const int n = g.vertex_count();
  Eigen::VectorXd y0(2 * n);
  y0 << init.q, init.p;
  auto field = [&](double t, const Eigen::VectorXd& y) {
    PhaseState st{y.head(n), y.tail(n), t};
    PhaseDerivative d = eom_vector_field(g, st, pot, delta, drive);
    Eigen::VectorXd out(2 * n);
    out << d.dq, d.dp;
    return out;
  };
  auto raw = rk4_integrate(field, y0, init.time, init.time + t_end, opts);
  std::vector<PhaseState> traj;
  traj.reserve(raw.size());
  for (auto& [t, y] : raw) traj.push_back({y.head(n), y.tail(n), t});
  return traj;
}

inline std::vector<FlaschkaState> integrate_flaschka(const GradedGraph& g, const Potential& pot,
                                                     const FlaschkaState& init, double t_end,
                                                     const IntegrationOptions& opts) {
  if (init.a.size() != g.edge_count() || init.b.size() != g.vertex_count())
    fail(ErrorCode::DimensionMismatch, "integrate_flaschka: state does not match graph");
  const int ne = g.edge_count(), nv = g.vertex_count();
  Eigen::VectorXd y0(ne + nv);
  y0 << init.a, init.b;
  auto field = [&](double t, const Eigen::VectorXd& y) {
    FlaschkaState st{y.head(ne), y.tail(nv), t};
    FlaschkaDerivative d = flaschka_vector_field(g, st, pot);
    Eigen::VectorXd out(ne + nv);
    out << d.da, d.db;
    return out;
  };
  auto raw = rk4_integrate(field, y0, init.time, init.time + t_end, opts);
  std::vector<FlaschkaState> traj;
  traj.reserve(raw.size());
  for (auto& [t, y] : raw) traj.push_back({y.head(ne), y.tail(nv), t});
  return traj;
}

// ---------------------------------------------------------------------------
// Radial lift and reduction

// q(x) = chain_q(rank x); p(x) = mu_V(x) chain_p(rank x), so that the lifted
// velocity q_dot = p/mu_V matches the chain velocity.
inline PhaseState lift_radial_state(const ChainFunction& chain_q, const ChainFunction& chain_p,
                                    const GradedGraph& g, double time = 0.0) {
  require_chain_dim(chain_q, g, "lift_radial_state");
  require_chain_dim(chain_p, g, "lift_radial_state");
  ValidationReport rep = validate(g);
  if (!rep.measure_balance)
    fail(ErrorCode::MeasureBalanceViolated, "radial lifts require the Measure Balance Assumption");
  PhaseState st;
  st.time = time;
  st.q = coaverage(chain_q, g);
  st.p.resize(g.vertex_count());
  for (int v = 0; v < g.vertex_count(); ++v)
    st.p(v) = g.mu_v(v) * chain_p(g.rank(v) - g.n_min());
  return st;
}

// Inverse of the lift on radial states: chain_q = P q, chain_p(n) = sum of
// layer momenta (each vertex carries mu_V times the chain momentum).
inline std::pair<ChainFunction, ChainFunction> reduce_phase_state(const GradedGraph& g,
                                                                  const PhaseState& st) {
  require_graph_dim(st.q, g, "reduce_phase_state");
  require_graph_dim(st.p, g, "reduce_phase_state");
  ChainFunction cq = average(st.q, g);
  ChainFunction cp = ChainFunction::Zero(g.window_size());
  for (int v = 0; v < g.vertex_count(); ++v) cp(g.rank(v) - g.n_min()) += st.p(v);
  return {cq, cp};
}

// Chain Jacobi data from graph Flaschka variables: edge-measure average of a
// per layer pair, mu_V average of b per layer. Exact on radial states.
inline JacobiOperator1D reduce_flaschka(const GradedGraph& g, const FlaschkaState& st) {
  if (st.a.size() != g.edge_count() || st.b.size() != g.vertex_count())
    fail(ErrorCode::DimensionMismatch, "reduce_flaschka: state does not match graph");
  JacobiOperator1D j;
  j.n_min = g.n_min();
  j.a = Eigen::VectorXd::Zero(g.window_size() - 1);
  j.b = Eigen::VectorXd::Zero(g.window_size());
  for (int e = 0; e < g.edge_count(); ++e)
    j.a(g.rank(g.edge_from(e)) - g.n_min()) += g.mu_e(e) * st.a(e);
  for (int v = 0; v < g.vertex_count(); ++v) j.b(g.rank(v) - g.n_min()) += g.mu_v(v) * st.b(v);
  return j;
}

// Largest same-layer spread of q and of the velocity p/mu_V; zero exactly on
// radial states.
inline std::pair<double, double> radial_spread(const GradedGraph& g, const PhaseState& st) {
  double sq = 0.0, sv = 0.0;
  for (int n = g.n_min(); n <= g.n_max(); ++n) {
    const auto& layer = g.layer(n);
    double qmin = st.q(layer[0]), qmax = qmin;
    double vmin = st.p(layer[0]) / g.mu_v(layer[0]), vmax = vmin;
    for (int x : layer) {
      qmin = std::min(qmin, st.q(x));
      qmax = std::max(qmax, st.q(x));
      const double v = st.p(x) / g.mu_v(x);
      vmin = std::min(vmin, v);
      vmax = std::max(vmax, v);
    }
    sq = std::max(sq, qmax - qmin);
    sv = std::max(sv, vmax - vmin);
  }
  return {sq, sv};
}

}  // namespace gradedtoda

#endif  // GRADEDTODA_DYNAMICS_HPP
