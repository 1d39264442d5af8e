#pragma once

#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

#include "dpg_beam/mesh.hpp"

namespace dpg_beam {

enum class BasisKind { trial, test, hermite };

/// Polynomial basis on a single element.
///
/// Trial and test kinds are Legendre polynomials mapped affinely to the
/// element and scaled by sqrt((2i+1)/h), so their L2 Gram matrix on every
/// element is the identity. The Hermite kind is the cubic Hermite basis in
/// the order (value-left, derivative-left, value-right, derivative-right),
/// mapped so that derivative shape functions have unit slope at their node.
class PolyBasis {
 public:
  PolyBasis(BasisKind kind, int degree) : kind_(kind), degree_(degree) {
    if (degree < 0) throw std::invalid_argument("PolyBasis: negative degree");
    if (kind == BasisKind::hermite && degree != 3) {
      throw std::invalid_argument("PolyBasis: Hermite basis is cubic");
    }
  }

  static PolyBasis trial(int p) { return {BasisKind::trial, p}; }
  /// Enriched test basis of degree p + 3.
  static PolyBasis test(int p) { return {BasisKind::test, p + 3}; }
  static PolyBasis hermite() { return {BasisKind::hermite, 3}; }

  BasisKind kind() const noexcept { return kind_; }
  int degree() const noexcept { return degree_; }
  std::size_t size() const noexcept {
    return kind_ == BasisKind::hermite ? 4 : static_cast<std::size_t>(degree_ + 1);
  }

  /// Writes derivative `deriv` (0, 1 or 2) of every basis function at x into out.
  void eval(const Element& e, double x, int deriv, std::span<double> out) const {
    if (deriv < 0 || deriv > 2) throw std::invalid_argument("PolyBasis::eval: deriv must be 0, 1 or 2");
    const double h = e.size();
    const double tol = 1e-12 * h;
    if (x < e.left - tol || x > e.right + tol) {
      throw std::out_of_range("PolyBasis::eval: point outside element");
    }
    if (out.size() < size()) throw std::invalid_argument("PolyBasis::eval: output too small");
    if (kind_ == BasisKind::hermite) {
      eval_hermite(h, (x - e.left) / h, deriv, out);
    } else {
      eval_legendre(h, 2.0 * (x - e.left) / h - 1.0, deriv, out);
    }
  }

  std::vector<double> eval(const Element& e, double x, int deriv) const {
    std::vector<double> out(size());
    eval(e, x, deriv, out);
    return out;
  }

 private:
  void eval_legendre(double h, double xi, int deriv, std::span<double> out) const {
    const int n = degree_;
    // P, P', P'' in the reference variable via the three-term recurrence
    double p0 = 1.0, d0 = 0.0, s0 = 0.0;
    double p1 = xi, d1 = 1.0, s1 = 0.0;
    const double dxi = 2.0 / h;
    const double scale_d = deriv == 0 ? 1.0 : (deriv == 1 ? dxi : dxi * dxi);
    auto store = [&](int i, double p, double d, double s) {
      const double c = std::sqrt((2.0 * i + 1.0) / h) * scale_d;
      out[i] = c * (deriv == 0 ? p : (deriv == 1 ? d : s));
    };
    store(0, p0, d0, s0);
    if (n >= 1) store(1, p1, d1, s1);
    for (int i = 1; i < n; ++i) {
      const double a = (2.0 * i + 1.0) / (i + 1.0);
      const double b = static_cast<double>(i) / (i + 1.0);
      const double p2 = a * xi * p1 - b * p0;
      const double d2 = a * (p1 + xi * d1) - b * d0;
      const double s2 = a * (2.0 * d1 + xi * s1) - b * s0;
      p0 = p1; d0 = d1; s0 = s1;
      p1 = p2; d1 = d2; s1 = s2;
      store(i + 1, p1, d1, s1);
    }
  }

  static void eval_hermite(double h, double s, int deriv, std::span<double> out) {
    switch (deriv) {
      case 0:
        out[0] = 1.0 - 3.0 * s * s + 2.0 * s * s * s;
        out[1] = h * (s - 2.0 * s * s + s * s * s);
        out[2] = 3.0 * s * s - 2.0 * s * s * s;
        out[3] = h * (-s * s + s * s * s);
        break;
      case 1:
        out[0] = (-6.0 * s + 6.0 * s * s) / h;
        out[1] = 1.0 - 4.0 * s + 3.0 * s * s;
        out[2] = (6.0 * s - 6.0 * s * s) / h;
        out[3] = -2.0 * s + 3.0 * s * s;
        break;
      default:
        out[0] = (-6.0 + 12.0 * s) / (h * h);
        out[1] = (-4.0 + 6.0 * s) / h;
        out[2] = (6.0 - 12.0 * s) / (h * h);
        out[3] = (-2.0 + 6.0 * s) / h;
        break;
    }
  }

  BasisKind kind_;
  int degree_;
};

inline std::vector<double> eval_basis(const PolyBasis& b, const Element& e, double x, int deriv) {
  return b.eval(e, x, deriv);
}

/// Value of sum_i coeffs[i] * phi_i^(deriv)(x).
template <class Coeffs>
double eval_expansion(const PolyBasis& b, const Element& e, const Coeffs& coeffs, double x,
                      int deriv = 0) {
  std::vector<double> vals(b.size());
  b.eval(e, x, deriv, vals);
  double sum = 0.0;
  for (std::size_t i = 0; i < vals.size(); ++i) sum += coeffs[i] * vals[i];
  return sum;
}

}  // namespace dpg_beam
