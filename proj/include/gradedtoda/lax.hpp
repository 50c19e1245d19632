#ifndef GRADEDTODA_LAX_HPP
#define GRADEDTODA_LAX_HPP

#include <Eigen/Dense>
#include <utility>
#include <vector>

#include "gradedtoda/dynamics.hpp"

namespace gradedtoda {

// Lax pair of the open Toda lattice on the window: L is the symmetric
// tridiagonal Jacobi matrix, P its strict upper minus strict lower triangle.
// With off-diagonals vanishing beyond the window the finite pair is exact, so
// isospectrality is a sharp test rather than a truncation artifact.
struct LaxPair1D {
  int n_min = 0;
  Eigen::MatrixXd L;
  Eigen::MatrixXd P;
};

inline Eigen::MatrixXd lax_p_of(const Eigen::MatrixXd& l) {
  Eigen::MatrixXd p = l.triangularView<Eigen::StrictlyUpper>();
  p -= Eigen::MatrixXd(l.triangularView<Eigen::StrictlyLower>());
  return p;
}

inline LaxPair1D lax_from_jacobi(const JacobiOperator1D& j) {
  for (Eigen::Index i = 0; i < j.a.size(); ++i)
    if (j.a(i) == 0.0)
      fail(ErrorCode::ZeroOffDiagonal, "Jacobi off-diagonal vanishes at window edge " +
                                           std::to_string(j.n_min + static_cast<int>(i)));
  LaxPair1D pair;
  pair.n_min = j.n_min;
  pair.L = j.to_matrix();
  pair.P = lax_p_of(pair.L);
  return pair;
}

// Chain Flaschka data -> Lax pair. The state must live on a chain (every
// transversal layer a singleton), whose edge order matches the window.
inline LaxPair1D lax_from_flaschka(const GradedGraph& chain, const FlaschkaState& st) {
  if (!chain.is_chain())
    fail(ErrorCode::BadParams, "lax_from_flaschka expects a chain (all layers singletons)");
  if (st.a.size() != chain.edge_count() || st.b.size() != chain.vertex_count())
    fail(ErrorCode::DimensionMismatch, "Flaschka state does not match the chain");
  JacobiOperator1D j;
  j.n_min = chain.n_min();
  j.a = st.a;
  j.b = st.b;
  return lax_from_jacobi(j);
}

inline JacobiOperator1D jacobi_of_lax(const Eigen::MatrixXd& l, int n_min) {
  JacobiOperator1D j;
  j.n_min = n_min;
  const int m = static_cast<int>(l.rows());
  j.b.resize(m);
  j.a.resize(m - 1);
  for (int i = 0; i < m; ++i) j.b(i) = l(i, i);
  for (int i = 0; i + 1 < m; ++i) j.a(i) = l(i, i + 1);
  return j;
}

struct LaxSample {
  double t;
  Eigen::MatrixXd L;
};

// RK4 on dL/dt = [P(L), L] with P recomputed from L at every stage. The flow
// preserves the tridiagonal structure; each sample asserts it to 1e-9.
inline std::vector<LaxSample> lax_flow(const LaxPair1D& init, double t_end,
                                       const IntegrationOptions& opts,
                                       double structure_tol = 1e-9) {
  auto field = [](double, const Eigen::MatrixXd& l) {
    Eigen::MatrixXd p = lax_p_of(l);
    return Eigen::MatrixXd(p * l - l * p);
  };
  auto raw = rk4_integrate(field, Eigen::MatrixXd(init.L), 0.0, t_end, opts);
  std::vector<LaxSample> out;
  out.reserve(raw.size());
  for (auto& [t, l] : raw) {
    const int m = static_cast<int>(l.rows());
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j)
        if (std::abs(i - j) > 1 && std::abs(l(i, j)) > structure_tol)
          fail(ErrorCode::StructureLost, "off-tridiagonal entry " + std::to_string(l(i, j)) +
                                             " at t=" + std::to_string(t));
    out.push_back({t, std::move(l)});
  }
  return out;
}

// P_rad = P* P_Z P on the graph: skew-adjoint in the weighted inner product,
// annihilates Ker P, and in general does not respect the graph adjacency.
struct RadialLaxOperator {
  Eigen::MatrixXd mat;
  std::shared_ptr<const GradedGraph> graph;
};

inline RadialLaxOperator radial_lax(const LaxPair1D& pair, const GradedGraph& g) {
  if (pair.n_min != g.n_min() || pair.L.rows() != g.window_size())
    fail(ErrorCode::WindowMismatch, "radial_lax: Lax window does not match graph window");
  RadialLaxOperator r;
  r.mat = coaveraging_matrix(g) * pair.P * averaging_matrix(g);
  r.graph = std::make_shared<const GradedGraph>(g);
  return r;
}

// Whether the zero pattern of an operator matrix respects the adjacency of g.
inline bool respects_adjacency(const Eigen::MatrixXd& m, const GradedGraph& g, double tol = 1e-13) {
  Eigen::MatrixXd allowed = Eigen::MatrixXd::Zero(g.vertex_count(), g.vertex_count());
  for (int e = 0; e < g.edge_count(); ++e) {
    allowed(g.edge_from(e), g.edge_to(e)) = 1.0;
    allowed(g.edge_to(e), g.edge_from(e)) = 1.0;
  }
  for (int x = 0; x < g.vertex_count(); ++x)
    for (int y = 0; y < g.vertex_count(); ++y)
      if (x != y && allowed(x, y) == 0.0 && std::abs(m(x, y)) > tol) return false;
  return true;
}

// ---------------------------------------------------------------------------
// Radial Lax identity: dH/dt Proj = [P_rad, H] along any chain Lax trajectory.

struct RadialLaxReport {
  std::vector<double> times;      // interior sample times
  std::vector<double> projected;  // max-norm of dH/dt Proj - [P_rad, H]
  std::vector<double> full;       // max-norm of dH/dt - [P_rad, H]
  double max_projected = 0.0;
  double max_full = 0.0;
  bool prad_respects_adjacency = true;
};

// chain_traj must be uniformly sampled (>= 3 samples); d/dt of the lifted
// operator is taken by central differences of the samples.
inline RadialLaxReport verify_radial_lax(const GradedGraph& g,
                                         const std::vector<FlaschkaState>& chain_traj) {
  if (chain_traj.size() < 3)
    fail(ErrorCode::TooFewSamples, "need at least 3 samples for central differences");
  GraphSpec chain_spec;
  for (int n = g.n_min(); n <= g.n_max(); ++n) {
    chain_spec.vertices.push_back({std::to_string(n), n});
    if (n > g.n_min()) chain_spec.edges.push_back({std::to_string(n - 1), std::to_string(n), {}});
  }
  const GradedGraph chain = build_graph(chain_spec);
  const double dt = chain_traj[1].time - chain_traj[0].time;
  const Eigen::MatrixXd proj = radial_projector_matrix(g);

  auto lifted = [&](const FlaschkaState& st) {
    JacobiOperator1D j;
    j.n_min = g.n_min();
    j.a = st.a;
    j.b = st.b;
    return lift_jacobi(j, g).dense();
  };

  RadialLaxReport rep;
  Eigen::MatrixXd h_prev = lifted(chain_traj[0]);
  Eigen::MatrixXd h_cur = lifted(chain_traj[1]);
  for (size_t i = 1; i + 1 < chain_traj.size(); ++i) {
    Eigen::MatrixXd h_next = lifted(chain_traj[i + 1]);
    LaxPair1D pair = lax_from_flaschka(chain, chain_traj[i]);
    RadialLaxOperator prad = radial_lax(pair, g);
    if (i == 1) rep.prad_respects_adjacency = respects_adjacency(prad.mat, g);
    Eigen::MatrixXd dh = (h_next - h_prev) / (2.0 * dt);
    Eigen::MatrixXd comm = prad.mat * h_cur - h_cur * prad.mat;
    const double res_p = (dh * proj - comm).cwiseAbs().maxCoeff();
    const double res_f = (dh - comm).cwiseAbs().maxCoeff();
    rep.times.push_back(chain_traj[i].time);
    rep.projected.push_back(res_p);
    rep.full.push_back(res_f);
    rep.max_projected = std::max(rep.max_projected, res_p);
    rep.max_full = std::max(rep.max_full, res_f);
    h_prev = std::move(h_cur);
    h_cur = std::move(h_next);
  }
  return rep;
}

// ---------------------------------------------------------------------------
// The no-lift obstruction

struct NoLiftReport {
  std::vector<double> times;
  std::vector<double> b0;           // reduced b at the first multi-vertex layer
  Eigen::MatrixXd kernel_spectra;   // row per sample, sorted
  Eigen::MatrixXd radial_spectra;   // row per sample, sorted
  double kernel_variation = 0.0;    // max over eigenvalue index of (max_t - min_t)
  double radial_drift = 0.0;        // max over index and t of |lam(t) - lam(0)|
  bool obstructed = false;
};

inline NoLiftReport analyze_no_lift(const GradedGraph& g, const std::vector<PhaseState>& traj,
                                    const Potential& pot, double drift_tol = 1e-7,
                                    double variation_threshold = 1e-3) {
  int fat_layer = g.n_min() - 1;
  for (int n = g.n_min(); n <= g.n_max(); ++n)
    if (g.layer_size(n) >= 2) {
      fat_layer = n;
      break;
    }
  if (fat_layer < g.n_min())
    fail(ErrorCode::TrivialKernel, "every transversal layer is a singleton; Ker P = {0}");

  const size_t ns = traj.size();
  const int kdim = g.vertex_count() - g.window_size();
  NoLiftReport rep;
  rep.kernel_spectra.resize(static_cast<Eigen::Index>(ns), kdim);
  rep.radial_spectra.resize(static_cast<Eigen::Index>(ns), g.window_size());
  for (size_t i = 0; i < ns; ++i) {
    const FlaschkaState fl = flaschka_forward(g, traj[i], pot);
    const JacobiOperator1D j = reduce_flaschka(g, fl);
    LiftedOperator h = lift_jacobi(j, g);
    Eigen::MatrixXd kmat = restrict_to_kernel(h, 1e-8);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> kes(kmat, Eigen::EigenvaluesOnly);
    rep.kernel_spectra.row(static_cast<Eigen::Index>(i)) = kes.eigenvalues().transpose();
    rep.radial_spectra.row(static_cast<Eigen::Index>(i)) = jacobi_spectrum(j).transpose();
    rep.times.push_back(traj[i].time);
    rep.b0.push_back(j.b(fat_layer - g.n_min()));
  }
  for (int k = 0; k < kdim; ++k)
    rep.kernel_variation = std::max(
        rep.kernel_variation, rep.kernel_spectra.col(k).maxCoeff() - rep.kernel_spectra.col(k).minCoeff());
  for (int k = 0; k < g.window_size(); ++k) {
    const auto col = rep.radial_spectra.col(k);
    rep.radial_drift =
        std::max(rep.radial_drift, (col.array() - col(0)).abs().maxCoeff());
  }
  rep.obstructed = rep.kernel_variation >= variation_threshold && rep.radial_drift <= drift_tol;
  return rep;
}

// Integrates the graph Toda flow and reports the spectral obstruction: the
// radial block stays isospectral while the Ker-P block tracks b at the fat
// layer, so no lifted Lax pair can exist unless that momentum is frozen.
inline NoLiftReport no_lift_demo(const GradedGraph& g, const PhaseState& init, double t_end,
                                 const IntegrationOptions& opts, double drift_tol = 1e-7,
                                 double variation_threshold = 1e-3) {
  const Potential pot = toda_potential();
  auto traj = integrate_phase(g, pot, init, t_end, opts);
  return analyze_no_lift(g, traj, pot, drift_tol, variation_threshold);
}

}  // namespace gradedtoda

#endif  // GRADEDTODA_LAX_HPP
