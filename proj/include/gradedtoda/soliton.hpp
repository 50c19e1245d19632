#ifndef GRADEDTODA_SOLITON_HPP
#define GRADEDTODA_SOLITON_HPP

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <cmath>
#include <utility>
#include <vector>

#include "gradedtoda/errors.hpp"

namespace gradedtoda {

// Parameters of the closed-form N-soliton of the 1D Toda lattice:
// q(n,t) = q0 - ln det(1 + C(n,t)) / det(1 + C(n-1,t)),
// C_ij(n,t) = sqrt(g_i g_j) (z_i z_j)^n / (1 - z_i z_j)
//             * e^{-(s_i sinh k_i + s_j sinh k_j) t},  z_j = s_j e^{-k_j}.
// s_j = +-1 picks the spectral side of the j-th eigenvalue (and the travel
// direction); for equal signs the entry reduces to the familiar
// e^{-(k_i+k_j)n} / (1 - e^{-(k_i+k_j)}) form. N = 0 is the equilibrium
// q == q0.
struct SolitonParams {
  Eigen::VectorXd kappa;
  Eigen::VectorXd gamma;
  std::vector<int> sigma;
  double q0 = 0.0;

  int size() const { return static_cast<int>(kappa.size()); }

  static SolitonParams make(Eigen::VectorXd kappa, Eigen::VectorXd gamma, std::vector<int> sigma,
                            double q0 = 0.0) {
    if (gamma.size() != kappa.size() || static_cast<Eigen::Index>(sigma.size()) != kappa.size())
      fail(ErrorCode::BadParams, "soliton parameter arrays must have equal length");
    for (Eigen::Index i = 0; i < kappa.size(); ++i) {
      if (!(kappa(i) > 0.0)) fail(ErrorCode::BadParams, "kappa must be positive");
      if (!(gamma(i) > 0.0)) fail(ErrorCode::BadParams, "gamma must be positive");
      if (sigma[static_cast<size_t>(i)] != 1 && sigma[static_cast<size_t>(i)] != -1)
        fail(ErrorCode::BadParams, "sigma entries must be +1 or -1");
    }
    return SolitonParams{std::move(kappa), std::move(gamma), std::move(sigma), q0};
  }
};

// One-soliton whose kink sits at `center` at t = 0 (the site where the
// single C entry equals one).
inline SolitonParams centered_soliton(double kappa, int sigma, double center, double q0 = 0.0) {
  Eigen::VectorXd k(1), g(1);
  k(0) = kappa;
  g(0) = std::exp(2.0 * kappa * center) * (1.0 - std::exp(-2.0 * kappa));
  return SolitonParams::make(k, g, {sigma}, q0);
}

// Kink speed along the chain; sigma = +1 moves toward -infinity.
inline double soliton_speed(double kappa) { return std::sinh(kappa) / kappa; }

namespace detail {

// Row/column exponents of C(n,t) = E M E with E = diag(e^{l_i}):
// l_i = -k_i n - s_i sinh(k_i) t + ln(g_i)/2.
inline Eigen::VectorXd soliton_exponents(const SolitonParams& sp, double n, double t) {
  Eigen::VectorXd l(sp.size());
  for (int i = 0; i < sp.size(); ++i)
    l(i) = -sp.kappa(i) * n - sp.sigma[static_cast<size_t>(i)] * std::sinh(sp.kappa(i)) * t +
           0.5 * std::log(sp.gamma(i));
  return l;
}

struct SolitonSiteEval {
  double logdet = 0.0;       // log det(1 + C(n,t)) >= 0
  double dlogdet_dt = 0.0;   // tr((1+C)^{-1} dC/dt)
};

// Log-domain evaluation: C = D M D with D = diag(s_i^n e^{l_i}). Factoring
// diag(e^{max(l_i,0)}) out of both sides of 1 + C leaves the well-scaled
// positive-definite matrix
//   G = diag(e^{-2 max(l,0)}) + F M F,  F = diag(s_i^n e^{min(l,0)}),
// so neither determinants nor the trace ever touch overflowing entries.
inline SolitonSiteEval eval_soliton_site(const SolitonParams& sp, int n, double t) {
  const int N = sp.size();
  SolitonSiteEval out;
  if (N == 0) return out;

  const Eigen::VectorXd l = soliton_exponents(sp, static_cast<double>(n), t);
  Eigen::VectorXd d(N), f(N), e2d(N), s(N);
  for (int i = 0; i < N; ++i) {
    const double sign_n = (sp.sigma[static_cast<size_t>(i)] == -1 && (n & 1)) ? -1.0 : 1.0;
    d(i) = std::max(l(i), 0.0);
    f(i) = sign_n * std::exp(std::min(l(i), 0.0));
    e2d(i) = std::exp(-2.0 * d(i));
    s(i) = sp.sigma[static_cast<size_t>(i)] * std::sinh(sp.kappa(i));
  }
  Eigen::MatrixXd g(N, N);
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j) {
      const double zz = sp.sigma[static_cast<size_t>(i)] * sp.sigma[static_cast<size_t>(j)] *
                        std::exp(-(sp.kappa(i) + sp.kappa(j)));
      g(i, j) = f(i) * f(j) / (1.0 - zz) + (i == j ? e2d(i) : 0.0);
    }
  Eigen::LLT<Eigen::MatrixXd> llt(g);
  if (llt.info() != Eigen::Success)
    fail(ErrorCode::SingularDeterminant, "1 + C(n,t) lost positive definiteness");

  out.logdet = 2.0 * d.sum();
  const Eigen::MatrixXd& lmat = llt.matrixLLT();
  for (int i = 0; i < N; ++i) out.logdet += 2.0 * std::log(lmat(i, i));

  // dC/dt = -(S C + C S) with S = diag(s_i), hence
  // tr((1+C)^{-1} dC/dt) = -2 sum_i s_i (1 - e^{-2d_i} (G^{-1})_{ii}).
  Eigen::MatrixXd ginv = llt.solve(Eigen::MatrixXd::Identity(N, N));
  double tr = 0.0;
  for (int i = 0; i < N; ++i) tr += s(i) * (1.0 - e2d(i) * ginv(i, i));
  out.dlogdet_dt = -2.0 * tr;
  return out;
}

}  // namespace detail

// The matrix C_N(n,t); entries may overflow double range for extreme n, t
// (the determinant path below never materializes them).
inline Eigen::MatrixXd cn_matrix(const SolitonParams& sp, int n, double t) {
  const int N = sp.size();
  const Eigen::VectorXd l = detail::soliton_exponents(sp, static_cast<double>(n), t);
  Eigen::MatrixXd c(N, N);
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j) {
      const int ss = sp.sigma[static_cast<size_t>(i)] * sp.sigma[static_cast<size_t>(j)];
      const double sign_n = (ss == -1 && (n & 1)) ? -1.0 : 1.0;
      c(i, j) = sign_n * std::exp(l(i) + l(j)) / (1.0 - ss * std::exp(-(sp.kappa(i) + sp.kappa(j))));
    }
  return c;
}

inline double soliton_q(const SolitonParams& sp, int n, double t) {
  return sp.q0 -
         (detail::eval_soliton_site(sp, n, t).logdet - detail::eval_soliton_site(sp, n - 1, t).logdet);
}

// Analytic velocity: d/dt [ln det(1+C(n-1)) - ln det(1+C(n))].
inline double soliton_qdot(const SolitonParams& sp, int n, double t) {
  return detail::eval_soliton_site(sp, n - 1, t).dlogdet_dt -
         detail::eval_soliton_site(sp, n, t).dlogdet_dt;
}

// Chain snapshot (q, p) on the window at time t; chain masses are one, so the
// momentum equals the velocity.
inline std::pair<Eigen::VectorXd, Eigen::VectorXd> soliton_state(const SolitonParams& sp, int n_min,
                                                                 int n_max, double t) {
  if (n_max < n_min) fail(ErrorCode::BadParams, "empty window");
  const int m = n_max - n_min + 1;
  Eigen::VectorXd q(m), p(m);
  detail::SolitonSiteEval prev = detail::eval_soliton_site(sp, n_min - 1, t);
  for (int n = n_min; n <= n_max; ++n) {
    detail::SolitonSiteEval cur = detail::eval_soliton_site(sp, n, t);
    q(n - n_min) = sp.q0 - (cur.logdet - prev.logdet);
    p(n - n_min) = prev.dlogdet_dt - cur.dlogdet_dt;
    prev = cur;
  }
  return {q, p};
}

// Max residual of the 1D Toda equations of motion over interior sites, with
// dp/dt taken by central differences of the analytic momentum in t.
inline double soliton_residual(const SolitonParams& sp, int n_min, int n_max, double t,
                               double fd_step = 1e-6) {
  if (n_max - n_min < 2) fail(ErrorCode::BadParams, "window interior is empty");
  auto [q, p] = soliton_state(sp, n_min, n_max, t);
  auto [qp, pp] = soliton_state(sp, n_min, n_max, t + fd_step);
  auto [qm, pm] = soliton_state(sp, n_min, n_max, t - fd_step);
  double res = 0.0;
  for (int n = n_min + 1; n < n_max; ++n) {
    const int i = n - n_min;
    const double pdot = (pp(i) - pm(i)) / (2.0 * fd_step);
    const double rhs = -std::exp(-(q(i + 1) - q(i))) + std::exp(-(q(i) - q(i - 1)));
    res = std::max(res, std::abs(pdot - rhs));
  }
  return res;
}

// Measured kink speed: times at which q crosses the half-height level
// q0 + sum(kappa) at two sites `span` apart, from a sampled time profile.
// For the exact traveling profile the crossing-time difference equals
// span / speed exactly, so sampling is the only error source.
inline double estimate_soliton_speed(const SolitonParams& sp, int site_a, int span, double t_max,
                                     double dt) {
  if (sp.size() != 1) fail(ErrorCode::BadParams, "speed estimation expects a single soliton");
  if (span == 0 || !(dt > 0.0) || !(t_max > 0.0)) fail(ErrorCode::BadParams, "bad speed scan");
  const double level = sp.q0 + sp.kappa(0);
  auto crossing_time = [&](int site) {
    double prev = soliton_q(sp, site, 0.0) - level;
    const int steps = static_cast<int>(std::ceil(t_max / dt));
    for (int k = 1; k <= steps; ++k) {
      const double t = k * dt;
      const double cur = soliton_q(sp, site, t) - level;
      if ((prev <= 0.0 && cur > 0.0) || (prev >= 0.0 && cur < 0.0))
        return (k - 1) * dt + dt * prev / (prev - cur);
      prev = cur;
    }
    fail(ErrorCode::BadParams,
         "soliton does not cross site " + std::to_string(site) + " within the scan");
  };
  const double ta = crossing_time(site_a);
  const double tb = crossing_time(site_a + span);
  return std::abs(static_cast<double>(span) / (ta - tb));
}

}  // namespace gradedtoda

#endif  // GRADEDTODA_SOLITON_HPP
