#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "dpg_beam/basis.hpp"
#include "dpg_beam/dpg_core.hpp"
#include "dpg_beam/exact_solution.hpp"
#include "dpg_beam/quadrature.hpp"
#include "dpg_beam/trace.hpp"

namespace dpg_beam {

/// Error quantities of one refinement level.
struct ConvergenceRecord {
  int level = 0;
  std::size_t n = 0;
  std::size_t dofs = 0;
  double h = 0.0;
  double err_u = 0.0;
  double err_M = 0.0;
  double proj_u = 0.0;
  double proj_M = 0.0;
  double trace_u = 0.0;
  double trace_M = 0.0;
  double residual = 0.0;
};

enum class ErrorField { err_u, err_M, proj_u, proj_M, trace_u, trace_M, residual };

inline constexpr std::array<ErrorField, 7> all_error_fields{
    ErrorField::err_u,   ErrorField::err_M,   ErrorField::proj_u,  ErrorField::proj_M,
    ErrorField::trace_u, ErrorField::trace_M, ErrorField::residual};

inline std::string_view to_string(ErrorField f) {
  switch (f) {
    case ErrorField::err_u: return "err_u";
    case ErrorField::err_M: return "err_M";
    case ErrorField::proj_u: return "proj_u";
    case ErrorField::proj_M: return "proj_M";
    case ErrorField::trace_u: return "trace_u";
    case ErrorField::trace_M: return "trace_M";
    case ErrorField::residual: return "residual";
  }
  return "?";
}

inline double field_value(const ConvergenceRecord& r, ErrorField f) {
  switch (f) {
    case ErrorField::err_u: return r.err_u;
    case ErrorField::err_M: return r.err_M;
    case ErrorField::proj_u: return r.proj_u;
    case ErrorField::proj_M: return r.proj_M;
    case ErrorField::trace_u: return r.trace_u;
    case ErrorField::trace_M: return r.trace_M;
    case ErrorField::residual: return r.residual;
  }
  return 0.0;
}

/// L2 distance between a function and a piecewise expansion in the trial basis.
template <class G>
double l2_error(G&& g, const std::vector<Eigen::VectorXd>& coeffs, const Mesh& mesh, int p,
                int quad_points) {
  const PolyBasis basis = PolyBasis::trial(p);
  const QuadRule rule = gauss_legendre(quad_points);
  double sum = 0.0;
  for (std::size_t j = 0; j < mesh.num_elements(); ++j) {
    const Element e = mesh.element(j);
    sum += integrate(rule, e, [&](double x) {
      const double d = g(x) - eval_expansion(basis, e, coeffs[j], x);
      return d * d;
    });
  }
  return std::sqrt(sum);
}

/// Errors of a DPG solution against an exact solution. quad_points = 0
/// selects p + 8 points per element.
inline ConvergenceRecord compute_errors(const DpgSolution& sol, const ExactSolution& exact,
                                        const Mesh& mesh, int p, int quad_points = 0) {
  const int nq = quad_points > 0 ? quad_points : error_quadrature_points(p);
  ConvergenceRecord rec;
  rec.n = mesh.num_elements();
  rec.dofs = num_dofs(rec.n, p);
  rec.h = mesh.max_element_size();
  rec.err_u = l2_error(exact.u, sol.u_coeffs, mesh, p, nq);
  rec.err_M = l2_error(exact.M, sol.m_coeffs, mesh, p, nq);
  rec.proj_u = l2_error(exact.u, l2_project(exact.u, mesh, p, nq), mesh, p, nq);
  rec.proj_M = l2_error(exact.M, l2_project(exact.M, mesh, p, nq), mesh, p, nq);
  const TraceVector diff(exact.trace(mesh).nodal() - sol.trace.nodal());
  const TraceNormParts parts = trace_norm_parts(diff, mesh);
  rec.trace_u = parts.u();
  rec.trace_M = parts.m();
  rec.residual = sol.residual;
  return rec;
}

/// Result of a log-log slope fit. `exact` marks that an error was zero, so
/// no rate exists.
struct RateEstimate {
  double rate = 0.0;
  bool exact = false;
};

/// Least-squares slope of log(error) against log(h).
inline RateEstimate estimate_rate(std::span<const ConvergenceRecord> records, ErrorField field) {
  if (records.size() < 2) throw std::invalid_argument("estimate_rate: need at least two records");
  double sx = 0.0, sy = 0.0;
  std::vector<double> lx, ly;
  for (const auto& r : records) {
    const double e = field_value(r, field);
    if (!(r.h > 0.0)) throw std::invalid_argument("estimate_rate: nonpositive mesh size");
    if (e == 0.0) return {0.0, true};
    lx.push_back(std::log(r.h));
    ly.push_back(std::log(e));
    sx += lx.back();
    sy += ly.back();
  }
  const double m = static_cast<double>(lx.size());
  const double mx = sx / m, my = sy / m;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
  }
  if (sxx == 0.0) throw std::invalid_argument("estimate_rate: records need distinct h");
  return {sxy / sxx, false};
}

/// Spectral condition number of an SPD matrix from power iteration on A
/// and on A^{-1} (through a sparse Cholesky factorization).
inline double estimate_condition_number(const Eigen::SparseMatrix<double>& A, int max_iter = 20000,
                                        double tol = 1e-10) {
  const Eigen::Index n = A.rows();
  Eigen::SimplicialLLT<Eigen::SparseMatrix<double>> chol(A);
  if (chol.info() != Eigen::Success) throw SolverError("estimate_condition_number: not SPD");

  auto power = [&](auto&& apply) {
    // deterministic start vector with components in every direction
    Eigen::VectorXd v(n);
    for (Eigen::Index i = 0; i < n; ++i) v[i] = 1.0 + 0.37 * std::sin(1.7 * static_cast<double>(i) + 0.3);
    v.normalize();
    double lambda = 0.0;
    for (int it = 0; it < max_iter; ++it) {
      Eigen::VectorXd w = apply(v);
      const double next = v.dot(w);
      v = w.normalized();
      if (it > 0 && std::abs(next - lambda) <= tol * std::abs(next)) return next;
      lambda = next;
    }
    return lambda;
  };
  const double lmax = power([&](const Eigen::VectorXd& v) { return Eigen::VectorXd(A * v); });
  const double inv_lmin = power([&](const Eigen::VectorXd& v) { return Eigen::VectorXd(chol.solve(v)); });
  return lmax * inv_lmin;
}

}  // namespace dpg_beam
