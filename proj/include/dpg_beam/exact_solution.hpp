#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <functional>
#include <numbers>
#include <stdexcept>
#include <utility>
#include <vector>

#include "dpg_beam/basis.hpp"
#include "dpg_beam/mesh.hpp"
#include "dpg_beam/quadrature.hpp"
#include "dpg_beam/trace.hpp"

namespace dpg_beam {

/// Reference solution (u, M) with first derivatives, used as the error oracle.
/// Any user-supplied closed form can be wrapped here.
struct ExactSolution {
  using Fn = std::function<double(double)>;
  Fn u, du, M, dM;

  static ExactSolution zero() {
    const Fn z = [](double) { return 0.0; };
    return {z, z, z, z};
  }

  TraceVector trace(const Mesh& mesh) const { return TraceVector::sample(mesh, u, du, M, dM); }
};

/// Closed-form solution of -M'' = sin(pi x), M - t^2 M'' + u'' = 0:
///
///   M(x) = sin(pi x)/pi^2 + c1 x + c2
///   u(x) = (t^2/pi^2 + 1/pi^4) sin(pi x) - c1 x^3/6 - c2 x^2/2 + c3 x + c4
///
/// with c1..c4 fixed by the boundary conditions.
class SinLoadSolution {
 public:
  SinLoadSolution(BoundaryCondition bc, Thickness t) : t2_(t.squared()) {
    // rows: boundary conditions, columns: c1..c4, rhs: minus the particular part
    Eigen::Matrix4d A = Eigen::Matrix4d::Zero();
    Eigen::Vector4d b = Eigen::Vector4d::Zero();
    int row = 0;
    auto add = [&](const Eigen::Vector4d& coeffs, double particular) {
      A.row(row) = coeffs.transpose();
      b[row] = -particular;
      ++row;
    };
    auto impose_end = [&](double x, EndKind kind) {
      // linear parts of u, u', M, M' in c1..c4 at x, and particular values
      const Eigen::Vector4d lu(-x * x * x / 6.0, -x * x / 2.0, x, 1.0);
      const Eigen::Vector4d ldu(-x * x / 2.0, -x, 1.0, 0.0);
      const Eigen::Vector4d lm(x, 1.0, 0.0, 0.0);
      const Eigen::Vector4d ldm(1.0, 0.0, 0.0, 0.0);
      const double pu = particular_u(x), pdu = particular_du(x);
      const double pm = particular_m(x), pdm = particular_dm(x);
      switch (kind) {
        case EndKind::clamped:
          add(lu, pu);
          add(ldu - t2_ * ldm, pdu - t2_ * pdm);
          break;
        case EndKind::supported:
          add(lu, pu);
          add(lm, pm);
          break;
        case EndKind::free:
          add(lm, pm);
          add(ldm, pdm);
          break;
      }
    };
    const auto [left, right] = end_kinds(bc);
    impose_end(0.0, left);
    impose_end(1.0, right);

    Eigen::FullPivLU<Eigen::Matrix4d> lu(A);
    if (!lu.isInvertible()) throw std::runtime_error("SinLoadSolution: singular constant system");
    c_ = lu.solve(b);
  }

  const Eigen::Vector4d& constants() const noexcept { return c_; }

  double u(double x) const {
    return particular_u(x) - c_[0] * x * x * x / 6.0 - c_[1] * x * x / 2.0 + c_[2] * x + c_[3];
  }
  double du(double x) const { return particular_du(x) - c_[0] * x * x / 2.0 - c_[1] * x + c_[2]; }
  double ddu(double x) const { return particular_ddu(x) - c_[0] * x - c_[1]; }
  double M(double x) const { return particular_m(x) + c_[0] * x + c_[1]; }
  double dM(double x) const { return particular_dm(x) + c_[0]; }
  double ddM(double x) const { return -std::sin(pi * x); }

  ExactSolution as_exact() const {
    const SinLoadSolution s = *this;
    return {[s](double x) { return s.u(x); }, [s](double x) { return s.du(x); },
            [s](double x) { return s.M(x); }, [s](double x) { return s.dM(x); }};
  }

 private:
  static constexpr double pi = std::numbers::pi;

  double amp_u() const { return t2_ / (pi * pi) + 1.0 / (pi * pi * pi * pi); }
  double particular_u(double x) const { return amp_u() * std::sin(pi * x); }
  double particular_du(double x) const { return amp_u() * pi * std::cos(pi * x); }
  double particular_ddu(double x) const { return -amp_u() * pi * pi * std::sin(pi * x); }
  static double particular_m(double x) { return std::sin(pi * x) / (pi * pi); }
  static double particular_dm(double x) { return std::cos(pi * x) / pi; }

  double t2_;
  Eigen::Vector4d c_;
};

inline ExactSolution solve_exact(BoundaryCondition bc, Thickness t) {
  return SinLoadSolution(bc, t).as_exact();
}

inline double sin_load(double x) { return std::sin(std::numbers::pi * x); }

/// Elementwise L2 projection onto polynomials of degree p, as coefficients in
/// the (L2-orthonormal) trial basis.
template <class G>
std::vector<Eigen::VectorXd> l2_project(G&& g, const Mesh& mesh, int p,
                                        int quad_points = 0) {
  const PolyBasis basis = PolyBasis::trial(p);
  const QuadRule rule = gauss_legendre(std::max(quad_points, error_quadrature_points(p)));
  std::vector<Eigen::VectorXd> out;
  out.reserve(mesh.num_elements());
  std::vector<double> phi(basis.size());
  for (std::size_t j = 0; j < mesh.num_elements(); ++j) {
    const Element e = mesh.element(j);
    Eigen::VectorXd c = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(basis.size()));
    const double jac = 0.5 * e.size();
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const double x = map_to_element(e, rule.points[q]);
      basis.eval(e, x, 0, phi);
      const double gw = jac * rule.weights[q] * g(x);
      for (std::size_t i = 0; i < phi.size(); ++i) c[static_cast<Eigen::Index>(i)] += gw * phi[i];
    }
    out.push_back(std::move(c));
  }
  return out;
}

}  // namespace dpg_beam
