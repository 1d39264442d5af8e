#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "dpg_beam/basis.hpp"
#include "dpg_beam/mesh.hpp"

namespace dpg_beam {

/// Homogeneous end conditions: clamped-clamped, clamped-supported,
/// clamped-free, supported-supported (left end first).
enum class BoundaryCondition { cc, cs, cf, ss };

inline std::string_view to_string(BoundaryCondition bc) {
  switch (bc) {
    case BoundaryCondition::cc: return "cc";
    case BoundaryCondition::cs: return "cs";
    case BoundaryCondition::cf: return "cf";
    case BoundaryCondition::ss: return "ss";
  }
  return "?";
}

inline BoundaryCondition parse_boundary_condition(std::string_view s) {
  if (s == "cc") return BoundaryCondition::cc;
  if (s == "cs") return BoundaryCondition::cs;
  if (s == "cf") return BoundaryCondition::cf;
  if (s == "ss") return BoundaryCondition::ss;
  throw std::invalid_argument("unknown boundary condition '" + std::string(s) + "'");
}

inline constexpr std::array<BoundaryCondition, 4> all_boundary_conditions{
    BoundaryCondition::cc, BoundaryCondition::cs, BoundaryCondition::cf, BoundaryCondition::ss};

/// Scaled beam thickness t in [0, 1].
class Thickness {
 public:
  explicit Thickness(double t) : t_(t) {
    if (!(t >= 0.0 && t <= 1.0)) throw std::invalid_argument("Thickness must lie in [0, 1]");
  }
  double value() const noexcept { return t_; }
  double squared() const noexcept { return t_ * t_; }

 private:
  double t_;
};

enum class EndKind { clamped, supported, free };

inline std::pair<EndKind, EndKind> end_kinds(BoundaryCondition bc) {
  switch (bc) {
    case BoundaryCondition::cc: return {EndKind::clamped, EndKind::clamped};
    case BoundaryCondition::cs: return {EndKind::clamped, EndKind::supported};
    case BoundaryCondition::cf: return {EndKind::clamped, EndKind::free};
    case BoundaryCondition::ss: return {EndKind::supported, EndKind::supported};
  }
  throw std::logic_error("end_kinds: bad boundary condition");
}

/// Per-node trace quantities, in storage order.
enum class NodalField : int { u = 0, du = 1, M = 2, dM = 3 };
inline constexpr int fields_per_node = 4;

inline std::size_t nodal_index(std::size_t node, NodalField f) {
  return fields_per_node * node + static_cast<std::size_t>(f);
}

/// Trace unknowns: the 4(n+1) nodal values (u, u', M, M') at x_0..x_n,
/// parametrized by 4n free coefficients through a constraint basis R that
/// builds in the homogeneous boundary conditions.
class TraceDofMap {
 public:
  struct Link {
    int free_index;
    double coeff;
  };

  TraceDofMap(Mesh mesh, BoundaryCondition bc, Thickness t)
      : mesh_(std::move(mesh)), bc_(bc), t_(t) {
    const std::size_t nodes = mesh_.num_nodes();
    const std::size_t last = nodes - 1;
    std::vector<bool> removed(fields_per_node * nodes, false);
    // nodal index of u' that is tied to M' by u' = t^2 M' at a clamped end
    std::vector<std::pair<std::size_t, std::size_t>> coupled;

    auto constrain = [&](std::size_t node, EndKind kind) {
      switch (kind) {
        case EndKind::clamped:
          removed[nodal_index(node, NodalField::u)] = true;
          removed[nodal_index(node, NodalField::du)] = true;
          coupled.emplace_back(nodal_index(node, NodalField::du), nodal_index(node, NodalField::dM));
          break;
        case EndKind::supported:
          removed[nodal_index(node, NodalField::u)] = true;
          removed[nodal_index(node, NodalField::M)] = true;
          break;
        case EndKind::free:
          removed[nodal_index(node, NodalField::M)] = true;
          removed[nodal_index(node, NodalField::dM)] = true;
          break;
      }
    };
    const auto [left, right] = end_kinds(bc);
    constrain(0, left);
    constrain(last, right);

    rows_.assign(fields_per_node * nodes, {});
    std::vector<int> free_of(fields_per_node * nodes, -1);
    int next = 0;
    for (std::size_t i = 0; i < removed.size(); ++i) {
      if (removed[i]) {
        removed_.push_back(i);
        continue;
      }
      free_of[i] = next;
      rows_[i].push_back({next, 1.0});
      ++next;
    }
    num_free_ = static_cast<std::size_t>(next);
    if (t_.squared() != 0.0) {
      for (const auto& [du, dm] : coupled) rows_[du].push_back({free_of[dm], t_.squared()});
    }
  }

  const Mesh& mesh() const noexcept { return mesh_; }
  BoundaryCondition boundary_condition() const noexcept { return bc_; }
  Thickness thickness() const noexcept { return t_; }

  std::size_t num_free() const noexcept { return num_free_; }
  std::size_t num_nodal() const noexcept { return rows_.size(); }

  /// Nodal indices eliminated by the boundary conditions, ascending.
  const std::vector<std::size_t>& removed() const noexcept { return removed_; }

  /// Nonzeros of row `nodal` of R.
  const std::vector<Link>& row(std::size_t nodal) const { return rows_.at(nodal); }

  Eigen::SparseMatrix<double> constraint_matrix() const {
    std::vector<Eigen::Triplet<double>> trip;
    for (std::size_t i = 0; i < rows_.size(); ++i) {
      for (const auto& l : rows_[i]) trip.emplace_back(static_cast<int>(i), l.free_index, l.coeff);
    }
    Eigen::SparseMatrix<double> r(static_cast<Eigen::Index>(num_nodal()),
                                  static_cast<Eigen::Index>(num_free()));
    r.setFromTriplets(trip.begin(), trip.end());
    return r;
  }

  Eigen::VectorXd expand(const Eigen::VectorXd& free) const {
    if (static_cast<std::size_t>(free.size()) != num_free_) {
      throw std::invalid_argument("TraceDofMap::expand: wrong number of coefficients");
    }
    Eigen::VectorXd nodal = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(num_nodal()));
    for (std::size_t i = 0; i < rows_.size(); ++i) {
      for (const auto& l : rows_[i]) nodal[static_cast<Eigen::Index>(i)] += l.coeff * free[l.free_index];
    }
    return nodal;
  }

 private:
  Mesh mesh_;
  BoundaryCondition bc_;
  Thickness t_;
  std::vector<std::vector<Link>> rows_;
  std::vector<std::size_t> removed_;
  std::size_t num_free_ = 0;
};

inline TraceDofMap build_dof_map(const Mesh& mesh, BoundaryCondition bc, Thickness t) {
  return TraceDofMap(mesh, bc, t);
}

/// Single-valued nodal trace data (u, u', M, M') per node.
class TraceVector {
 public:
  explicit TraceVector(Eigen::VectorXd nodal) : nodal_(std::move(nodal)) {
    if (nodal_.size() % fields_per_node != 0 || nodal_.size() < 2 * fields_per_node) {
      throw std::invalid_argument("TraceVector: bad nodal vector length");
    }
  }

  static TraceVector from_free(const TraceDofMap& map, const Eigen::VectorXd& free) {
    return TraceVector(map.expand(free));
  }

  /// Samples the traces of functions u, u', M, M' at the mesh nodes.
  template <class U, class DU, class M, class DM>
  static TraceVector sample(const Mesh& mesh, U&& u, DU&& du, M&& m, DM&& dm) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(fields_per_node * mesh.num_nodes()));
    for (std::size_t k = 0; k < mesh.num_nodes(); ++k) {
      const double x = mesh.nodes()[k];
      v[static_cast<Eigen::Index>(nodal_index(k, NodalField::u))] = u(x);
      v[static_cast<Eigen::Index>(nodal_index(k, NodalField::du))] = du(x);
      v[static_cast<Eigen::Index>(nodal_index(k, NodalField::M))] = m(x);
      v[static_cast<Eigen::Index>(nodal_index(k, NodalField::dM))] = dm(x);
    }
    return TraceVector(std::move(v));
  }

  std::size_t num_nodes() const noexcept { return static_cast<std::size_t>(nodal_.size()) / fields_per_node; }
  double operator()(std::size_t node, NodalField f) const {
    return nodal_[static_cast<Eigen::Index>(nodal_index(node, f))];
  }
  const Eigen::VectorXd& nodal() const noexcept { return nodal_; }

 private:
  Eigen::VectorXd nodal_;
};

/// Broken test pair (z, W): per element coefficients in a test basis, z and
/// W stored side by side.
struct BrokenPair {
  PolyBasis basis;
  std::vector<Eigen::VectorXd> z;
  std::vector<Eigen::VectorXd> w;
};

/// Element contribution of the trace pairing, as an 8 x (2 * ntest) matrix.
///
/// Row order is (u, u', M, M') at the left node, then at the right node;
/// columns are the z test functions followed by the W test functions. Row
/// i, column k holds the pairing of the i-th nodal unit trace with test
/// function k restricted to this element.
inline Eigen::MatrixXd element_pairing_matrix(const Element& e, Thickness t, const PolyBasis& test) {
  const auto nt = static_cast<Eigen::Index>(test.size());
  const double t2 = t.squared();
  Eigen::MatrixXd P = Eigen::MatrixXd::Zero(2 * fields_per_node, 2 * nt);
  std::vector<double> v(test.size()), d(test.size());
  // [a b]_j = a(x_j) b(x_j) - a(x_{j-1}) b(x_{j-1}); sign is -1 at the left node
  const std::array<std::pair<double, double>, 2> ends{{{e.left, -1.0}, {e.right, 1.0}}};
  for (int side = 0; side < 2; ++side) {
    const auto [x, sign] = ends[side];
    test.eval(e, x, 0, v);
    test.eval(e, x, 1, d);
    const Eigen::Index r = fields_per_node * side;
    for (Eigen::Index k = 0; k < nt; ++k) {
      const auto ku = static_cast<std::size_t>(k);
      // -[u W']
      P(r + 0, nt + k) += -sign * d[ku];
      // [(u' - t^2 M') W]
      P(r + 1, nt + k) += sign * v[ku];
      P(r + 3, nt + k) += -sign * t2 * v[ku];
      // -[M (z' - t^2 W')]
      P(r + 2, k) += -sign * d[ku];
      P(r + 2, nt + k) += sign * t2 * d[ku];
      // [M' z]
      P(r + 3, k) += sign * v[ku];
    }
  }
  return P;
}

/// Nodal trace data of element j in the order of element_pairing_matrix.
inline Eigen::Matrix<double, 8, 1> element_trace(const TraceVector& q, std::size_t j) {
  Eigen::Matrix<double, 8, 1> v;
  for (int f = 0; f < fields_per_node; ++f) {
    v[f] = q(j, static_cast<NodalField>(f));
    v[fields_per_node + f] = q(j + 1, static_cast<NodalField>(f));
  }
  return v;
}

/// Duality pairing <q, (z, W)>_t summed over all elements.
inline double pairing(const TraceVector& q, const BrokenPair& test, const Mesh& mesh, Thickness t) {
  if (q.num_nodes() != mesh.num_nodes() || test.z.size() != mesh.num_elements() ||
      test.w.size() != mesh.num_elements()) {
    throw std::invalid_argument("pairing: size mismatch with mesh");
  }
  const auto nt = static_cast<Eigen::Index>(test.basis.size());
  double sum = 0.0;
  for (std::size_t j = 0; j < mesh.num_elements(); ++j) {
    const Eigen::MatrixXd P = element_pairing_matrix(mesh.element(j), t, test.basis);
    Eigen::VectorXd c(2 * nt);
    c << test.z[j], test.w[j];
    sum += element_trace(q, j).dot(P * c);
  }
  return sum;
}

/// Mass + stiffness matrix of the cubic Hermite basis on an element of size
/// h, in the order (v(left), v(right), v'(left), v'(right)). The quadratic
/// form gives ||v_H||^2 + ||v_H''||^2 of the Hermite interpolant v_H.
inline Eigen::Matrix4d hermite_mass_matrix(double h) {
  Eigen::Matrix4d m;
  m << 156, 54, 22 * h, -13 * h,
       54, 156, 13 * h, -22 * h,
       22 * h, 13 * h, 4 * h * h, -3 * h * h,
       -13 * h, -22 * h, -3 * h * h, 4 * h * h;
  return m * (h / 420.0);
}

inline Eigen::Matrix4d hermite_stiffness_matrix(double h) {
  Eigen::Matrix4d k;
  k << 6, -6, 3 * h, 3 * h,
       -6, 6, -3 * h, -3 * h,
       3 * h, -3 * h, 2 * h * h, h * h,
       3 * h, -3 * h, h * h, 2 * h * h;
  return k * (2.0 / (h * h * h));
}

inline Eigen::Matrix4d trace_norm_matrix(double h) {
  return hermite_mass_matrix(h) + hermite_stiffness_matrix(h);
}

/// ||gamma_j(v)||_j^2 for nodal data given as (v(left), v'(left), v(right), v'(right)).
inline double element_trace_norm_squared(double h, double v_left, double dv_left, double v_right,
                                         double dv_right) {
  // The stiffness part is written in slope deviations so that affine data gives an exact zero
  // instead of a difference of O(1/h^3) terms.
  const Eigen::Vector4d v(v_left, v_right, dv_left, dv_right);
  const double slope = (v_right - v_left) / h;
  const double a = dv_left - slope;
  const double b = dv_right - slope;
  return v.dot(hermite_mass_matrix(h) * v) + 4.0 / h * (a * a + a * b + b * b);
}

struct TraceNormParts {
  double u_squared = 0.0;
  double m_squared = 0.0;

  double total() const { return std::sqrt(u_squared + m_squared); }
  double u() const { return std::sqrt(u_squared); }
  double m() const { return std::sqrt(m_squared); }
};

inline TraceNormParts trace_norm_parts(const TraceVector& q, const Mesh& mesh) {
  if (q.num_nodes() != mesh.num_nodes()) throw std::invalid_argument("trace_norm: size mismatch");
  TraceNormParts parts;
  for (std::size_t j = 0; j < mesh.num_elements(); ++j) {
    const double h = mesh.element_size(j);
    parts.u_squared += element_trace_norm_squared(h, q(j, NodalField::u), q(j, NodalField::du),
                                                  q(j + 1, NodalField::u), q(j + 1, NodalField::du));
    parts.m_squared += element_trace_norm_squared(h, q(j, NodalField::M), q(j, NodalField::dM),
                                                  q(j + 1, NodalField::M), q(j + 1, NodalField::dM));
  }
  return parts;
}

/// Discrete trace norm ||q||_h.
inline double trace_norm(const TraceVector& q, const Mesh& mesh) {
  return trace_norm_parts(q, mesh).total();
}

}  // namespace dpg_beam
