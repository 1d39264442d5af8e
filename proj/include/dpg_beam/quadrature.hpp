#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "dpg_beam/mesh.hpp"

namespace dpg_beam {

/// Gauss-Legendre rule on the reference interval [-1, 1].
struct QuadRule {
  std::vector<double> points;
  std::vector<double> weights;

  std::size_t size() const noexcept { return points.size(); }
  /// Highest polynomial degree integrated exactly.
  int exactness() const noexcept { return 2 * static_cast<int>(points.size()) - 1; }
};

/// k-point Gauss-Legendre rule. Nodes are the roots of P_k found by Newton
/// iteration from Chebyshev initial guesses.
inline QuadRule gauss_legendre(int k) {
  if (k < 1) throw std::invalid_argument("gauss_legendre: need at least one point");
  QuadRule rule;
  rule.points.resize(k);
  rule.weights.resize(k);
  const int half = (k + 1) / 2;
  for (int i = 0; i < half; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (k + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = x;
      for (int m = 2; m <= k; ++m) {
        const double p2 = ((2.0 * m - 1.0) * x * p1 - (m - 1.0) * p0) / m;
        p0 = p1;
        p1 = p2;
      }
      if (k == 1) p0 = 1.0;
      // P_k = p1, P_{k-1} = p0
      dp = k * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    if (k == 1) {
      x = 0.0;
      dp = 1.0;
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.points[i] = -x;
    rule.points[k - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[k - 1 - i] = w;
  }
  if (k % 2 == 1) rule.points[k / 2] = 0.0;
  return rule;
}

/// Physical quadrature point for reference point xi on an element.
inline double map_to_element(const Element& e, double xi) noexcept {
  return e.left + 0.5 * (xi + 1.0) * e.size();
}

template <class F>
double integrate(const QuadRule& rule, const Element& e, F&& f) {
  const double jac = 0.5 * e.size();
  double sum = 0.0;
  for (std::size_t q = 0; q < rule.size(); ++q) {
    sum += rule.weights[q] * f(map_to_element(e, rule.points[q]));
  }
  return jac * sum;
}

/// Assembly rule order: p + 5 points.
inline int default_quadrature_points(int p) { return p + 5; }

/// Error-measurement rule order: p + 8 points.
inline int error_quadrature_points(int p) { return p + 8; }

}  // namespace dpg_beam
