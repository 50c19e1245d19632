#ifndef GRADEDTODA_LIFT_COMPARE_HPP
#define GRADEDTODA_LIFT_COMPARE_HPP

#include <optional>
#include <vector>

#include "gradedtoda/dynamics.hpp"
#include "gradedtoda/soliton.hpp"

namespace gradedtoda {

struct LiftCompareRow {
  double t = 0.0;
  double q_vs_chain = 0.0;  // max_x |q_G(x) - q_Z(rank x)| between the two runs
  double p_vs_chain = 0.0;
  double spread_q = 0.0;  // largest same-layer spread in the graph run
  double spread_v = 0.0;
  double q_vs_closed = 0.0;  // against the lifted closed form (soliton runs)
  double p_vs_closed = 0.0;
};

struct LiftCompareReport {
  std::vector<LiftCompareRow> rows;
  bool has_closed_form = false;
  double max_q_vs_chain = 0.0;
  double max_p_vs_chain = 0.0;
  double max_spread_q = 0.0;
  double max_spread_v = 0.0;
  double max_q_vs_closed = 0.0;
  double max_p_vs_closed = 0.0;
};

namespace detail {

inline GradedGraph chain_of(const GradedGraph& g) {
  GraphSpec spec;
  for (int n = g.n_min(); n <= g.n_max(); ++n) {
    spec.vertices.push_back({std::to_string(n), n});
    if (n > g.n_min()) spec.edges.push_back({std::to_string(n - 1), std::to_string(n), {}});
  }
  return build_graph(spec);
}

inline void finalize(LiftCompareReport& rep) {
  for (const auto& r : rep.rows) {
    rep.max_q_vs_chain = std::max(rep.max_q_vs_chain, r.q_vs_chain);
    rep.max_p_vs_chain = std::max(rep.max_p_vs_chain, r.p_vs_chain);
    rep.max_spread_q = std::max(rep.max_spread_q, r.spread_q);
    rep.max_spread_v = std::max(rep.max_spread_v, r.spread_v);
    rep.max_q_vs_closed = std::max(rep.max_q_vs_closed, r.q_vs_closed);
    rep.max_p_vs_closed = std::max(rep.max_p_vs_closed, r.p_vs_closed);
  }
}

}  // namespace detail

// Runs the chain and the graph side by side from matched initial data and
// reports per-sample radial discrepancies. The soliton variant drives both
// windows with the closed form beyond the cut (ghost layers at n_min - 1 and
// n_max + 1), so the restriction of the infinite soliton solves the driven
// system exactly and the closed-form columns are meaningful.
inline LiftCompareReport lift_compare_soliton(const GradedGraph& g, const SolitonParams& sp,
                                              double t_end, const IntegrationOptions& opts) {
  const Potential pot = toda_potential();
  const GradedGraph chain = detail::chain_of(g);
  auto [q0, p0] = soliton_state(sp, g.n_min(), g.n_max(), 0.0);

  BoundaryDriving drive;
  drive.q_below = [sp, n = g.n_min() - 1](double t) { return soliton_q(sp, n, t); };
  drive.q_above = [sp, n = g.n_max() + 1](double t) { return soliton_q(sp, n, t); };

  PhaseState chain_init{q0, p0, 0.0};
  PhaseState graph_init = lift_radial_state(q0, p0, g);
  auto chain_traj = integrate_phase(chain, pot, chain_init, t_end, opts, &drive);
  auto graph_traj = integrate_phase(g, pot, graph_init, t_end, opts, &drive);

  LiftCompareReport rep;
  rep.has_closed_form = true;
  for (size_t i = 0; i < graph_traj.size(); ++i) {
    const PhaseState& gs = graph_traj[i];
    const PhaseState& cs = chain_traj[i];
    LiftCompareRow row;
    row.t = gs.time;
    PhaseState lifted = lift_radial_state(cs.q, cs.p, g, cs.time);
    row.q_vs_chain = (gs.q - lifted.q).cwiseAbs().maxCoeff();
    row.p_vs_chain = (gs.p - lifted.p).cwiseAbs().maxCoeff();
    auto [sq, sv] = radial_spread(g, gs);
    row.spread_q = sq;
    row.spread_v = sv;
    auto [qc, pc] = soliton_state(sp, g.n_min(), g.n_max(), gs.time);
    PhaseState closed = lift_radial_state(qc, pc, g, gs.time);
    row.q_vs_closed = (gs.q - closed.q).cwiseAbs().maxCoeff();
    row.p_vs_closed = (gs.p - closed.p).cwiseAbs().maxCoeff();
    rep.rows.push_back(row);
  }
  detail::finalize(rep);
  return rep;
}

// General initial data: both windows run with free ends; only the
// graph-vs-lifted-chain columns are meaningful.
inline LiftCompareReport lift_compare_chain_init(const GradedGraph& g, const ChainFunction& q0,
                                                 const ChainFunction& p0, const Potential& pot,
                                                 double t_end, const IntegrationOptions& opts) {
  const GradedGraph chain = detail::chain_of(g);
  require_chain_dim(q0, g, "lift_compare");
  require_chain_dim(p0, g, "lift_compare");
  PhaseState chain_init{q0, p0, 0.0};
  PhaseState graph_init = lift_radial_state(q0, p0, g);
  auto chain_traj = integrate_phase(chain, pot, chain_init, t_end, opts);
  auto graph_traj = integrate_phase(g, pot, graph_init, t_end, opts);

  LiftCompareReport rep;
  for (size_t i = 0; i < graph_traj.size(); ++i) {
    const PhaseState& gs = graph_traj[i];
    const PhaseState& cs = chain_traj[i];
    LiftCompareRow row;
    row.t = gs.time;
    PhaseState lifted = lift_radial_state(cs.q, cs.p, g, cs.time);
    row.q_vs_chain = (gs.q - lifted.q).cwiseAbs().maxCoeff();
    row.p_vs_chain = (gs.p - lifted.p).cwiseAbs().maxCoeff();
    auto [sq, sv] = radial_spread(g, gs);
    row.spread_q = sq;
    row.spread_v = sv;
    rep.rows.push_back(row);
  }
  detail::finalize(rep);
  return rep;
}

}  // namespace gradedtoda

#endif  // GRADEDTODA_LIFT_COMPARE_HPP
