#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "dpg_beam/basis.hpp"
#include "dpg_beam/mesh.hpp"
#include "dpg_beam/quadrature.hpp"
#include "dpg_beam/trace.hpp"

namespace dpg_beam {

using Load = std::function<double(double)>;

/// Raised when a local Gram matrix or the global system fails to factorize.
class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Element matrices of the ultraweak formulation.
///
/// Local trial order: p+1 coefficients of u, p+1 of M, then the 8 nodal
/// traces (u, u', M, M') at the left node and at the right node.
/// Local test order: p+4 coefficients of z, then p+4 of W.
struct ElementSystem {
  Eigen::MatrixXd B;  ///< trial x test, b(trial_i, test_k)
  Eigen::MatrixXd G;  ///< test Gram matrix
  Eigen::VectorXd l;  ///< load functional on the test functions
};

/// Gram matrix of (z,dz) + (z'',dz'') + (W,dW) + (W'',dW'') on one element.
inline Eigen::MatrixXd element_gram(const Element& e, const PolyBasis& test, const QuadRule& rule) {
  const auto nt = static_cast<Eigen::Index>(test.size());
  Eigen::MatrixXd block = Eigen::MatrixXd::Zero(nt, nt);
  std::vector<double> v(test.size()), s(test.size());
  const double jac = 0.5 * e.size();
  for (std::size_t q = 0; q < rule.size(); ++q) {
    const double x = map_to_element(e, rule.points[q]);
    const double w = jac * rule.weights[q];
    test.eval(e, x, 0, v);
    test.eval(e, x, 2, s);
    const Eigen::Map<Eigen::VectorXd> vv(v.data(), nt), ss(s.data(), nt);
    block.noalias() += w * (vv * vv.transpose() + ss * ss.transpose());
  }
  Eigen::MatrixXd G = Eigen::MatrixXd::Zero(2 * nt, 2 * nt);
  G.topLeftCorner(nt, nt) = block;
  G.bottomRightCorner(nt, nt) = block;
  return G;
}

/// b_t restricted to one element: volume terms (u, W'') + (M, W + z'' - t^2 W'')
/// on the field rows and the trace pairing on the 8 nodal rows.
inline Eigen::MatrixXd element_bilinear(const Element& e, Thickness t, const PolyBasis& trial,
                                        const PolyBasis& test, const QuadRule& rule) {
  const auto nu = static_cast<Eigen::Index>(trial.size());
  const auto nt = static_cast<Eigen::Index>(test.size());
  const double t2 = t.squared();
  Eigen::MatrixXd B = Eigen::MatrixXd::Zero(2 * nu + 2 * fields_per_node, 2 * nt);
  std::vector<double> phi(trial.size()), v(test.size()), s(test.size());
  const double jac = 0.5 * e.size();
  for (std::size_t q = 0; q < rule.size(); ++q) {
    const double x = map_to_element(e, rule.points[q]);
    const double w = jac * rule.weights[q];
    trial.eval(e, x, 0, phi);
    test.eval(e, x, 0, v);
    test.eval(e, x, 2, s);
    for (Eigen::Index i = 0; i < nu; ++i) {
      const double pw = w * phi[static_cast<std::size_t>(i)];
      for (Eigen::Index k = 0; k < nt; ++k) {
        const auto ku = static_cast<std::size_t>(k);
        B(i, nt + k) += pw * s[ku];                       // u * W''
        B(nu + i, k) += pw * s[ku];                       // M * z''
        B(nu + i, nt + k) += pw * (v[ku] - t2 * s[ku]);   // M * (W - t^2 W'')
      }
    }
  }
  B.bottomRows(2 * fields_per_node) = element_pairing_matrix(e, t, test);
  return B;
}

/// L_f on one element: -(f, z) for z test functions, 0 for W.
inline Eigen::VectorXd element_load(const Element& e, const Load& f, const PolyBasis& test,
                                    const QuadRule& rule) {
  const auto nt = static_cast<Eigen::Index>(test.size());
  Eigen::VectorXd l = Eigen::VectorXd::Zero(2 * nt);
  if (!f) return l;
  std::vector<double> v(test.size());
  const double jac = 0.5 * e.size();
  for (std::size_t q = 0; q < rule.size(); ++q) {
    const double x = map_to_element(e, rule.points[q]);
    test.eval(e, x, 0, v);
    const double fw = jac * rule.weights[q] * f(x);
    for (Eigen::Index k = 0; k < nt; ++k) l[k] -= fw * v[static_cast<std::size_t>(k)];
  }
  return l;
}

/// Discrete problem: mesh, end conditions, thickness, trial degree p, load.
/// The test space is broken polynomials of degree p + 3 in both components.
struct DpgProblem {
  Mesh mesh;
  BoundaryCondition bc = BoundaryCondition::cf;
  Thickness t{0.0};
  int p = 0;
  Load f;
};

inline std::size_t field_dofs_per_element(int p) { return 2 * static_cast<std::size_t>(p + 1); }

/// Total unknowns 2n(p+1) + 4n.
inline std::size_t num_dofs(std::size_t n, int p) { return n * field_dofs_per_element(p) + 4 * n; }

/// Element system premultiplied by the inverse Cholesky factor of G_e:
/// W = L^{-1} B^T and g = L^{-1} l, so that r^T G^{-1} r = |g - W x|^2.
struct WhitenedElement {
  Eigen::MatrixXd W;
  Eigen::VectorXd g;
};

/// Normal-equation system sum_e Bt_e G_e^{-1} Bt_e^T with Bt_e the element
/// trial matrix after applying the trace constraint basis.
///
/// Global unknowns: element j's u then M coefficients at offset
/// j * 2(p+1), followed by the 4n free trace coefficients. The sparse
/// Cholesky solver applies a fill-reducing (AMD) permutation internally.
struct GlobalSystem {
  DpgProblem problem;
  TraceDofMap dofs;
  std::vector<ElementSystem> elements;
  std::vector<WhitenedElement> whitened;
  Eigen::SparseMatrix<double> A;
  Eigen::VectorXd rhs;

  std::size_t trace_offset() const { return problem.mesh.num_elements() * field_dofs_per_element(problem.p); }
  std::size_t size() const { return static_cast<std::size_t>(rhs.size()); }

  /// Global (index, coefficient) pairs for local trial row i of element j.
  template <class Fn>
  void for_each_global(std::size_t j, Eigen::Index i, Fn&& fn) const {
    const auto nf = static_cast<Eigen::Index>(field_dofs_per_element(problem.p));
    if (i < nf) {
      fn(static_cast<Eigen::Index>(j * field_dofs_per_element(problem.p)) + i, 1.0);
      return;
    }
    const auto local = static_cast<std::size_t>(i - nf);
    const std::size_t node = j + local / fields_per_node;
    const auto field = static_cast<NodalField>(local % fields_per_node);
    for (const auto& link : dofs.row(nodal_index(node, field))) {
      fn(static_cast<Eigen::Index>(trace_offset()) + link.free_index, link.coeff);
    }
  }

  /// Adds the local trial vector v of element j into the global vector out.
  void scatter_add(std::size_t j, const Eigen::VectorXd& v, Eigen::VectorXd& out) const {
    for (Eigen::Index i = 0; i < v.size(); ++i) {
      for_each_global(j, i, [&](Eigen::Index g, double c) { out[g] += c * v[i]; });
    }
  }

  /// Normal-equation residual sum_e Bt_e G_e^{-1} (l_e - Bt_e^T x_e), evaluated
  /// through the whitened element factors.
  Eigen::VectorXd normal_residual(const Eigen::VectorXd& x) const {
    Eigen::VectorXd r = Eigen::VectorXd::Zero(rhs.size());
    for (std::size_t j = 0; j < whitened.size(); ++j) {
      const auto& we = whitened[j];
      scatter_add(j, we.W.transpose() * (we.g - we.W * gather(j, x)), r);
    }
    return r;
  }

  /// Element trial coefficients x_e gathered from a global vector.
  Eigen::VectorXd gather(std::size_t j, const Eigen::VectorXd& x) const {
    const auto rows = elements.at(j).B.rows();
    Eigen::VectorXd xe = Eigen::VectorXd::Zero(rows);
    for (Eigen::Index i = 0; i < rows; ++i) {
      for_each_global(j, i, [&](Eigen::Index g, double c) { xe[i] += c * x[g]; });
    }
    return xe;
  }
};

inline ElementSystem build_element_system(const Element& e, Thickness t, int p, const Load& f) {
  const PolyBasis trial = PolyBasis::trial(p);
  const PolyBasis test = PolyBasis::test(p);
  const QuadRule rule = gauss_legendre(default_quadrature_points(p));
  return {element_bilinear(e, t, trial, test, rule), element_gram(e, test, rule),
          element_load(e, f, test, rule)};
}

inline GlobalSystem assemble(const DpgProblem& problem) {
  if (problem.p < 0) throw std::invalid_argument("assemble: negative polynomial degree");
  GlobalSystem sys{problem, build_dof_map(problem.mesh, problem.bc, problem.t), {}, {}, {}, {}};
  const std::size_t n = problem.mesh.num_elements();
  const auto size = static_cast<Eigen::Index>(num_dofs(n, problem.p));
  sys.elements.reserve(n);
  sys.whitened.reserve(n);
  sys.rhs = Eigen::VectorXd::Zero(size);
  std::vector<Eigen::Triplet<double>> trip;

  for (std::size_t j = 0; j < n; ++j) {
    ElementSystem es = build_element_system(problem.mesh.element(j), problem.t, problem.p, problem.f);
    Eigen::LLT<Eigen::MatrixXd> llt(es.G);
    if (llt.info() != Eigen::Success) {
      throw SolverError("local Gram matrix not positive definite on element " + std::to_string(j));
    }
    // Optimal test functions are G^{-1} B^T; the factored form W^T W keeps
    // the element matrix exactly symmetric.
    WhitenedElement we{llt.matrixL().solve(es.B.transpose()), llt.matrixL().solve(es.l)};
    const Eigen::MatrixXd Ae = we.W.transpose() * we.W;
    const Eigen::VectorXd be = we.W.transpose() * we.g;
    sys.elements.push_back(std::move(es));
    sys.whitened.push_back(std::move(we));

    const Eigen::Index rows = Ae.rows();
    for (Eigen::Index a = 0; a < rows; ++a) {
      sys.for_each_global(j, a, [&](Eigen::Index ga, double ca) {
        sys.rhs[ga] += ca * be[a];
        for (Eigen::Index b = 0; b < rows; ++b) {
          sys.for_each_global(j, b, [&](Eigen::Index gb, double cb) {
            trip.emplace_back(ga, gb, ca * cb * Ae(a, b));
          });
        }
      });
    }
  }
  sys.A.resize(size, size);
  sys.A.setFromTriplets(trip.begin(), trip.end());
  return sys;
}

/// Piecewise polynomial fields and trace of a DPG solve.
struct DpgSolution {
  Mesh mesh;
  int p = 0;
  std::vector<Eigen::VectorXd> u_coeffs;
  std::vector<Eigen::VectorXd> m_coeffs;
  TraceVector trace;
  double residual = 0.0;
  Eigen::VectorXd coefficients;  ///< global unknown vector

  double u(double x) const { return eval_field(u_coeffs, x, 0); }
  double M(double x) const { return eval_field(m_coeffs, x, 0); }

  double eval_field(const std::vector<Eigen::VectorXd>& coeffs, double x, int deriv) const {
    const std::size_t j = mesh.locate(x);
    return eval_expansion(PolyBasis::trial(p), mesh.element(j), coeffs[j], x, deriv);
  }
};

/// Elementwise residual r_e = l_e - Bt_e^T x_e measured in the dual test norm:
/// sqrt(sum_e r_e^T G_e^{-1} r_e).
inline double residual_norm(const GlobalSystem& sys, const Eigen::VectorXd& x) {
  double sum = 0.0;
  for (std::size_t j = 0; j < sys.whitened.size(); ++j) {
    const auto& we = sys.whitened[j];
    sum += (we.g - we.W * sys.gather(j, x)).squaredNorm();
  }
  return std::sqrt(sum);
}

/// Sparse Cholesky solve of the normal equations followed by iterative
/// refinement with residuals from the whitened element factors (corrected
/// semi-normal equations). The refinement removes the round-off floor that
/// the O(h^-4) conditioning otherwise puts on fine meshes.
inline Eigen::VectorXd solve_normal_equations(const GlobalSystem& sys, int max_refinements = 4) {
  Eigen::SimplicialLLT<Eigen::SparseMatrix<double>> chol(sys.A);
  if (chol.info() != Eigen::Success) {
    throw SolverError("global matrix is not numerically positive definite");
  }
  Eigen::VectorXd x = chol.solve(sys.rhs);
  if (chol.info() != Eigen::Success || !x.allFinite()) throw SolverError("global solve failed");
  for (int k = 0; k < max_refinements; ++k) {
    const Eigen::VectorXd dx = chol.solve(sys.normal_residual(x));
    if (!dx.allFinite()) throw SolverError("refinement step diverged");
    x += dx;
    if (dx.norm() <= 1e-15 * x.norm()) break;
  }
  return x;
}

inline DpgSolution solve(const GlobalSystem& sys) {
  Eigen::VectorXd x = solve_normal_equations(sys);

  const DpgProblem& pr = sys.problem;
  const std::size_t n = pr.mesh.num_elements();
  const auto np = static_cast<Eigen::Index>(pr.p + 1);
  std::vector<Eigen::VectorXd> u(n), m(n);
  for (std::size_t j = 0; j < n; ++j) {
    const auto off = static_cast<Eigen::Index>(j * field_dofs_per_element(pr.p));
    u[j] = x.segment(off, np);
    m[j] = x.segment(off + np, np);
  }
  const auto off = static_cast<Eigen::Index>(sys.trace_offset());
  TraceVector trace = TraceVector::from_free(sys.dofs, x.segment(off, x.size() - off));
  const double res = residual_norm(sys, x);
  return DpgSolution{pr.mesh, pr.p, std::move(u), std::move(m), std::move(trace), res, std::move(x)};
}

inline DpgSolution assemble_and_solve(const DpgProblem& problem) { return solve(assemble(problem)); }

inline DpgSolution assemble_and_solve(const Mesh& mesh, BoundaryCondition bc, Thickness t, int p,
                                      Load f) {
  return assemble_and_solve(DpgProblem{mesh, bc, t, p, std::move(f)});
}

}  // namespace dpg_beam
