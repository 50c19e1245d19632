#ifndef GRADEDTODA_HILBERT_HPP
#define GRADEDTODA_HILBERT_HPP

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <memory>
#include <vector>

#include "gradedtoda/graded_graph.hpp"

namespace gradedtoda {

// Real-valued function on V(G), indexed by the graph's vertex ordering.
using GraphFunction = Eigen::VectorXd;
// Real-valued function on the window sites n_min..n_max, indexed by n - n_min.
using ChainFunction = Eigen::VectorXd;

inline void require_graph_dim(const GraphFunction& f, const GradedGraph& g, const char* who) {
  if (f.size() != g.vertex_count())
    fail(ErrorCode::DimensionMismatch, std::string(who) + ": function length != vertex count");
}

inline void require_chain_dim(const ChainFunction& f, const GradedGraph& g, const char* who) {
  if (f.size() != g.window_size())
    fail(ErrorCode::WindowMismatch, std::string(who) + ": chain length != window size");
}

// <psi|phi>_G = sum_x psi(x) phi(x) mu_V(x)
inline double inner_product(const GraphFunction& psi, const GraphFunction& phi, const GradedGraph& g) {
  require_graph_dim(psi, g, "inner_product");
  require_graph_dim(phi, g, "inner_product");
  double s = 0.0;
  for (int v = 0; v < g.vertex_count(); ++v) s += psi(v) * phi(v) * g.mu_v(v);
  return s;
}

inline double graph_norm(const GraphFunction& psi, const GradedGraph& g) {
  return std::sqrt(inner_product(psi, psi, g));
}

// (P psi)(n) = sum_{rank(x)=n} psi(x) mu_V(x)
inline ChainFunction average(const GraphFunction& psi, const GradedGraph& g) {
  require_graph_dim(psi, g, "average");
  ChainFunction out = ChainFunction::Zero(g.window_size());
  for (int v = 0; v < g.vertex_count(); ++v) out(g.rank(v) - g.n_min()) += psi(v) * g.mu_v(v);
  return out;
}

// (P* phi)(x) = phi(rank(x)); the result is radial.
inline GraphFunction coaverage(const ChainFunction& phi, const GradedGraph& g) {
  require_chain_dim(phi, g, "coaverage");
  GraphFunction out(g.vertex_count());
  for (int v = 0; v < g.vertex_count(); ++v) out(v) = phi(g.rank(v) - g.n_min());
  return out;
}

// P* P: orthogonal projection onto the radial subspace.
inline GraphFunction radial_project(const GraphFunction& psi, const GradedGraph& g) {
  require_graph_dim(psi, g, "radial_project");
  return coaverage(average(psi, g), g);
}

inline Eigen::MatrixXd averaging_matrix(const GradedGraph& g) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(g.window_size(), g.vertex_count());
  for (int v = 0; v < g.vertex_count(); ++v) m(g.rank(v) - g.n_min(), v) = g.mu_v(v);
  return m;
}

inline Eigen::MatrixXd coaveraging_matrix(const GradedGraph& g) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(g.vertex_count(), g.window_size());
  for (int v = 0; v < g.vertex_count(); ++v) m(v, g.rank(v) - g.n_min()) = 1.0;
  return m;
}

// Direct formula for the radial projector: Proj(x, y) = mu_V(y) on equal ranks.
inline Eigen::MatrixXd radial_projector_matrix(const GradedGraph& g) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(g.vertex_count(), g.vertex_count());
  for (int n = g.n_min(); n <= g.n_max(); ++n)
    for (int x : g.layer(n))
      for (int y : g.layer(n)) m(x, y) = g.mu_v(y);
  return m;
}

// ---------------------------------------------------------------------------
// Jacobi matrices on the window and their lifts

// Symmetric tridiagonal operator: off-diagonal a(n, n+1) on window edges,
// diagonal b(n) on window sites.
struct JacobiOperator1D {
  int n_min = 0;
  Eigen::VectorXd a;  // size m-1
  Eigen::VectorXd b;  // size m

  int size() const { return static_cast<int>(b.size()); }

  Eigen::MatrixXd to_matrix() const {
    const int m = size();
    if (a.size() != m - 1) fail(ErrorCode::DimensionMismatch, "Jacobi a/b length mismatch");
    Eigen::MatrixXd j = Eigen::MatrixXd::Zero(m, m);
    for (int i = 0; i < m; ++i) j(i, i) = b(i);
    for (int i = 0; i + 1 < m; ++i) j(i, i + 1) = j(i + 1, i) = a(i);
    return j;
  }
};

inline Eigen::VectorXd jacobi_spectrum(const JacobiOperator1D& j) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(j.to_matrix(), Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

// Operator on functions over V(G), self-adjoint in the mu_V-weighted inner
// product; off-diagonal sparsity respects the graph adjacency.
struct LiftedOperator {
  Eigen::SparseMatrix<double> mat;
  std::shared_ptr<const GradedGraph> graph;

  Eigen::MatrixXd dense() const { return Eigen::MatrixXd(mat); }
};

// Lift of a Jacobi matrix: H(x,x) = b(rank x); H(x,y) = mu_E(x,y)/mu_V(x) * a
// along edges in either direction. Requires Measure Balance, which ensures
// P H P* = J and the invariance of both the radial subspace and Ker P.
inline LiftedOperator lift_jacobi(const JacobiOperator1D& j, const GradedGraph& g) {
  if (j.n_min != g.n_min() || j.size() != g.window_size())
    fail(ErrorCode::WindowMismatch, "lift_jacobi: Jacobi window does not match graph window");
  if (j.a.size() != j.size() - 1) fail(ErrorCode::DimensionMismatch, "Jacobi a/b length mismatch");
  ValidationReport rep = validate(g);
  if (!rep.measure_balance)
    fail(ErrorCode::MeasureBalanceViolated, "lift_jacobi requires the Measure Balance Assumption");

  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<size_t>(g.vertex_count() + 2 * g.edge_count()));
  for (int v = 0; v < g.vertex_count(); ++v)
    trip.emplace_back(v, v, j.b(g.rank(v) - g.n_min()));
  for (int e = 0; e < g.edge_count(); ++e) {
    const int x = g.edge_from(e), y = g.edge_to(e);
    const double an = j.a(g.rank(x) - g.n_min());
    trip.emplace_back(x, y, g.mu_e(e) / g.mu_v(x) * an);
    trip.emplace_back(y, x, g.mu_e(e) / g.mu_v(y) * an);
  }
  LiftedOperator h;
  h.mat.resize(g.vertex_count(), g.vertex_count());
  h.mat.setFromTriplets(trip.begin(), trip.end());
  h.graph = std::make_shared<const GradedGraph>(g);
  return h;
}

// Wraps an arbitrary matrix as an operator on the graph (used by tests and by
// the radial Lax machinery; no adjacency constraint is imposed here).
inline LiftedOperator wrap_operator(const Eigen::MatrixXd& m, const GradedGraph& g) {
  if (m.rows() != g.vertex_count() || m.cols() != g.vertex_count())
    fail(ErrorCode::DimensionMismatch, "operator size != vertex count");
  LiftedOperator h;
  h.mat = m.sparseView();
  h.graph = std::make_shared<const GradedGraph>(g);
  return h;
}

// ---------------------------------------------------------------------------
// Ker P and spectral separation

// Weighted-orthonormal basis of Ker P, built per layer from the difference
// vectors e_{x_1} - e_{x_i} via Gram-Schmidt in the mu_V inner product. The
// construction order is fixed by the vertex ordering, so reports reproduce.
inline std::vector<GraphFunction> kernel_basis(const GradedGraph& g) {
  std::vector<GraphFunction> basis;
  for (int n = g.n_min(); n <= g.n_max(); ++n) {
    const auto& layer = g.layer(n);
    for (size_t i = 1; i < layer.size(); ++i) {
      GraphFunction v = GraphFunction::Zero(g.vertex_count());
      v(layer[0]) = 1.0;
      v(layer[i]) = -1.0;
      for (const auto& u : basis) v -= inner_product(u, v, g) * u;
      double nrm = graph_norm(v, g);
      if (nrm < 1e-14) continue;
      basis.push_back(v / nrm);
    }
  }
  return basis;
}

// Unit-norm indicator functions of the layers (the lift basis of the radial
// subspace; each has weighted norm one since layer masses sum to 1).
inline std::vector<GraphFunction> radial_basis(const GradedGraph& g) {
  std::vector<GraphFunction> basis;
  for (int n = g.n_min(); n <= g.n_max(); ++n) {
    GraphFunction v = GraphFunction::Zero(g.vertex_count());
    for (int x : g.layer(n)) v(x) = 1.0;
    basis.push_back(v);
  }
  return basis;
}

struct SeparationReport {
  // Largest weighted norm of the Ker-P component of H applied to a radial
  // basis vector, and of the radial component of H applied to a Ker-P basis
  // vector.
  double radial_residual = 0.0;
  double kernel_residual = 0.0;
  bool radial_invariant = true;
  bool kernel_invariant = true;

  bool ok() const { return radial_invariant && kernel_invariant; }
};

inline SeparationReport check_spectral_separation(const LiftedOperator& h, double tol = 1e-10) {
  const GradedGraph& g = *h.graph;
  SeparationReport rep;
  for (const auto& v : radial_basis(g)) {
    GraphFunction y = h.mat * v;
    GraphFunction off = y - radial_project(y, g);
    rep.radial_residual = std::max(rep.radial_residual, graph_norm(off, g));
  }
  for (const auto& w : kernel_basis(g)) {
    GraphFunction y = h.mat * w;
    rep.kernel_residual = std::max(rep.kernel_residual, graph_norm(radial_project(y, g), g));
  }
  rep.radial_invariant = rep.radial_residual <= tol;
  rep.kernel_invariant = rep.kernel_residual <= tol;
  return rep;
}

// Matrix of H restricted to Ker P in the kernel_basis coordinates. The
// restriction only makes sense when Ker P is invariant under H.
inline Eigen::MatrixXd restrict_to_kernel(const LiftedOperator& h, double tol = 1e-9) {
  const GradedGraph& g = *h.graph;
  auto basis = kernel_basis(g);
  SeparationReport rep = check_spectral_separation(h, tol);
  if (rep.kernel_residual > tol)
    fail(ErrorCode::SeparationViolated,
         "Ker P is not invariant (residual " + std::to_string(rep.kernel_residual) + ")");
  const int k = static_cast<int>(basis.size());
  Eigen::MatrixXd m(k, k);
  for (int jcol = 0; jcol < k; ++jcol) {
    GraphFunction y = h.mat * basis[static_cast<size_t>(jcol)];
    for (int i = 0; i < k; ++i) m(i, jcol) = inner_product(basis[static_cast<size_t>(i)], y, g);
  }
  return m;
}

// Eigenvalues of H, computed through the diagonal similarity
// D^{1/2} H D^{-1/2} with D = diag(mu_V), which is symmetric exactly when H is
// self-adjoint in the weighted inner product.
inline Eigen::VectorXd spectrum(const LiftedOperator& h, double rel_tol = 1e-10) {
  const GradedGraph& g = *h.graph;
  Eigen::MatrixXd m = h.dense();
  const int n = g.vertex_count();
  double scale = 0.0;
  for (int x = 0; x < n; ++x)
    for (int y = 0; y < n; ++y) scale = std::max(scale, std::abs(g.mu_v(x) * m(x, y)));
  scale = std::max(scale, 1.0);
  for (int x = 0; x < n; ++x)
    for (int y = x + 1; y < n; ++y)
      if (std::abs(g.mu_v(x) * m(x, y) - g.mu_v(y) * m(y, x)) > rel_tol * scale)
        fail(ErrorCode::NotWeightedSelfAdjoint,
             "mu_V(x) H(x,y) != mu_V(y) H(y,x) at (" + g.vertex_id(x) + ", " + g.vertex_id(y) + ")");

  Eigen::VectorXd sq(n);
  for (int x = 0; x < n; ++x) sq(x) = std::sqrt(g.mu_v(x));
  Eigen::MatrixXd s(n, n);
  for (int x = 0; x < n; ++x)
    for (int y = 0; y < n; ++y) s(x, y) = sq(x) * m(x, y) / sq(y);
  s = 0.5 * (s + s.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s, Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

}  // namespace gradedtoda

#endif  // GRADEDTODA_HILBERT_HPP
