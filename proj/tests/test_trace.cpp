#include <gtest/gtest.h>

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>

#include "dpg_beam/trace.hpp"
#include "test_helpers.hpp"

using namespace dpg_beam;
using namespace dpg_beam::testing;

namespace {

std::vector<std::size_t> idx(std::initializer_list<std::pair<std::size_t, NodalField>> list) {
  std::vector<std::size_t> out;
  for (auto [node, f] : list) out.push_back(nodal_index(node, f));
  std::sort(out.begin(), out.end());
  return out;
}

/// Values (value, derivative) of a conforming piecewise cubic at nodes.
struct NodalData {
  std::vector<double> v, d;
};

NodalData random_nodal(std::size_t nodes) {
  NodalData nd;
  for (std::size_t k = 0; k < nodes; ++k) {
    nd.v.push_back(uniform());
    nd.d.push_back(uniform());
  }
  return nd;
}

/// Broken-basis coefficients of a conforming piecewise Hermite cubic.
std::vector<Eigen::VectorXd> broken_coefficients(const Mesh& mesh, const NodalData& nd, const PolyBasis& basis) {
  std::vector<Eigen::VectorXd> out;
  for (std::size_t j = 0; j < mesh.num_elements(); ++j) {
    const Element e = mesh.element(j);
    const HermiteCubic hc(e.left, e.size(), nd.v[j], nd.d[j], nd.v[j + 1], nd.d[j + 1]);
    out.push_back(coefficients_in(basis, e, [&](double x) { return hc.value(x); }));
  }
  return out;
}

TraceVector trace_of(const NodalData& a, const NodalData& b) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(4 * a.v.size()));
  for (std::size_t k = 0; k < a.v.size(); ++k) {
    v[static_cast<Eigen::Index>(nodal_index(k, NodalField::u))] = a.v[k];
    v[static_cast<Eigen::Index>(nodal_index(k, NodalField::du))] = a.d[k];
    v[static_cast<Eigen::Index>(nodal_index(k, NodalField::M))] = b.v[k];
    v[static_cast<Eigen::Index>(nodal_index(k, NodalField::dM))] = b.d[k];
  }
  return TraceVector(v);
}

/// Homogeneous conditions of (bc, t) evaluated on nodal (u, u', M, M') data.
std::vector<double> bc_values(BoundaryCondition bc, double t, const TraceVector& q) {
  const std::size_t last = q.num_nodes() - 1;
  std::vector<double> out;
  auto end = [&](std::size_t node, EndKind k) {
    switch (k) {
      case EndKind::clamped:
        out.push_back(q(node, NodalField::u));
        out.push_back(q(node, NodalField::du) - t * t * q(node, NodalField::dM));
        break;
      case EndKind::supported:
        out.push_back(q(node, NodalField::u));
        out.push_back(q(node, NodalField::M));
        break;
      case EndKind::free:
        out.push_back(q(node, NodalField::M));
        out.push_back(q(node, NodalField::dM));
        break;
    }
  };
  const auto [l, r] = end_kinds(bc);
  end(0, l);
  end(last, r);
  return out;
}

}  // namespace

TEST(Trace, RejectsThicknessOutOfRange) {
  EXPECT_THROW(Thickness(-0.1), std::invalid_argument);
  EXPECT_THROW(Thickness(1.5), std::invalid_argument);
  EXPECT_NO_THROW(Thickness(0.0));
  EXPECT_NO_THROW(Thickness(1.0));
  EXPECT_EQ(parse_boundary_condition("cs"), BoundaryCondition::cs);
  EXPECT_THROW(parse_boundary_condition("xx"), std::invalid_argument);
}

TEST(TraceDofMap, SupportedSupportedIsSelection) {
  const Mesh m = uniform_mesh(3);
  for (double t : {0.0, 0.5, 1.0}) {
    const TraceDofMap map = build_dof_map(m, BoundaryCondition::ss, Thickness(t));
    EXPECT_EQ(map.removed(), idx({{0, NodalField::u}, {0, NodalField::M}, {3, NodalField::u}, {3, NodalField::M}}));
    const Eigen::MatrixXd R = map.constraint_matrix();
    EXPECT_TRUE(((R.array() == 0.0) || (R.array() == 1.0)).all());
    EXPECT_EQ(R.sum(), static_cast<double>(map.num_free()));
  }
}

TEST(TraceDofMap, ClampedFreeAtZeroThickness) {
  const TraceDofMap map = build_dof_map(uniform_mesh(2), BoundaryCondition::cf, Thickness(0.0));
  EXPECT_EQ(map.removed(), idx({{0, NodalField::u}, {0, NodalField::du}, {2, NodalField::M}, {2, NodalField::dM}}));
  EXPECT_TRUE(map.row(nodal_index(0, NodalField::du)).empty());
}

TEST(TraceDofMap, ClampedCouplingAtUnitThickness) {
  const TraceDofMap map = build_dof_map(uniform_mesh(2), BoundaryCondition::cc, Thickness(1.0));
  const auto& row = map.row(nodal_index(0, NodalField::dM));
  ASSERT_EQ(row.size(), 1u);
  Eigen::VectorXd free = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(map.num_free()));
  free[row[0].free_index] = 1.0;
  const TraceVector q = TraceVector::from_free(map, free);
  EXPECT_EQ(q(0, NodalField::dM), 1.0);
  EXPECT_EQ(q(0, NodalField::du), 1.0);
  EXPECT_EQ(q.nodal().sum(), 2.0);
}

TEST(TraceDofMap, DimensionRankAndConstraints) {
  for (BoundaryCondition bc : all_boundary_conditions) {
    for (double t : {0.0, 1e-3, 0.7, 1.0}) {
      for (std::size_t n : {1u, 2u, 5u}) {
        const TraceDofMap map = build_dof_map(uniform_mesh(n), bc, Thickness(t));
        ASSERT_EQ(map.num_free(), 4 * n);
        const Eigen::MatrixXd R = map.constraint_matrix();
        EXPECT_EQ(Eigen::FullPivLU<Eigen::MatrixXd>(R).rank(), static_cast<Eigen::Index>(4 * n));
        for (Eigen::Index c = 0; c < R.cols(); ++c) {
          const TraceVector q(R.col(c));
          for (double v : bc_values(bc, t, q)) EXPECT_NEAR(v, 0.0, 1e-15);
        }
      }
    }
  }
}

TEST(Pairing, HandEvaluatedExamples) {
  const double h = 0.4;
  const Mesh m({0.0, h, 1.0});
  // u has nodal data (0,0) at x=0 and (1,0) at x=h, M = 0; second element unused
  Eigen::VectorXd nodal = Eigen::VectorXd::Zero(12);
  nodal[static_cast<Eigen::Index>(nodal_index(1, NodalField::u))] = 1.0;
  const TraceVector q(nodal);
  const PolyBasis basis = PolyBasis::test(0);
  auto pair_with = [&](const std::function<double(double)>& w) {
    BrokenPair test{basis, {}, {}};
    for (std::size_t j = 0; j < 2; ++j) {
      const Element e = m.element(j);
      test.z.push_back(Eigen::VectorXd::Zero(4));
      test.w.push_back(j == 0 ? coefficients_in(basis, e, w) : Eigen::VectorXd::Zero(4));
    }
    return pairing(q, test, m, Thickness(0.3));
  };
  EXPECT_NEAR(pair_with([](double x) { return x; }), -1.0, 1e-12);
  EXPECT_NEAR(pair_with([](double) { return 1.0; }), 0.0, 1e-12);

  const TraceVector zero(Eigen::VectorXd::Zero(12));
  BrokenPair any{basis, {}, {}};
  for (int j = 0; j < 2; ++j) {
    any.z.push_back(Eigen::VectorXd::Random(4));
    any.w.push_back(Eigen::VectorXd::Random(4));
  }
  EXPECT_EQ(pairing(zero, any, m, Thickness(1.0)), 0.0);
}

TEST(Pairing, AntisymmetricOnConformingFunctions) {
  const Mesh m({0.0, 0.15, 0.5, 0.55, 1.0});
  const PolyBasis basis = PolyBasis::test(0);
  for (double t : {0.0, 0.4, 1.0}) {
    for (int trial = 0; trial < 5; ++trial) {
      const NodalData u = random_nodal(m.num_nodes()), M = random_nodal(m.num_nodes());
      const NodalData z = random_nodal(m.num_nodes()), W = random_nodal(m.num_nodes());
      const BrokenPair zw{basis, broken_coefficients(m, z, basis), broken_coefficients(m, W, basis)};
      const BrokenPair um{basis, broken_coefficients(m, u, basis), broken_coefficients(m, M, basis)};
      const double lhs = pairing(trace_of(u, M), zw, m, Thickness(t));
      const double rhs = pairing(trace_of(z, W), um, m, Thickness(t));
      EXPECT_NEAR(lhs, -rhs, 1e-10 * (1.0 + std::abs(lhs)));
    }
  }
}

// Test pairs annihilated by every admissible trace are exactly the conforming
// pairs that satisfy the boundary conditions.
TEST(Pairing, AnnihilatorIsConformingSpace) {
  const Mesh m({0.0, 0.3, 0.45, 1.0});
  const std::size_t n = m.num_elements();
  const PolyBasis basis = PolyBasis::test(0);  // cubic
  const auto nt = static_cast<Eigen::Index>(basis.size());
  for (BoundaryCondition bc : all_boundary_conditions) {
    for (double t : {0.0, 0.6, 1.0}) {
      const TraceDofMap map = build_dof_map(m, bc, Thickness(t));
      const Eigen::MatrixXd R = map.constraint_matrix();
      // P: 4(n+1) nodal traces x broken test coefficients
      Eigen::MatrixXd P = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(map.num_nodal()),
                                                static_cast<Eigen::Index>(2 * nt * n));
      for (std::size_t j = 0; j < n; ++j) {
        const Eigen::MatrixXd Pe = element_pairing_matrix(m.element(j), Thickness(t), basis);
        for (Eigen::Index r = 0; r < 8; ++r) {
          const auto node = static_cast<Eigen::Index>(4 * j) + r;
          P.block(node, static_cast<Eigen::Index>(j) * nt, 1, nt) += Pe.block(r, 0, 1, nt);
          P.block(node, static_cast<Eigen::Index>(n) * nt + static_cast<Eigen::Index>(j) * nt, 1, nt) +=
              Pe.block(r, nt, 1, nt);
        }
      }
      const Eigen::MatrixXd C = R.transpose() * P;
      const Eigen::MatrixXd K = Eigen::FullPivLU<Eigen::MatrixXd>(C).kernel();
      // conforming cubic pairs with two conditions per end: 2 * 2(n+1) - 4
      ASSERT_EQ(K.cols(), static_cast<Eigen::Index>(4 * n));
      for (Eigen::Index c = 0; c < K.cols(); ++c) {
        auto eval = [&](int comp, std::size_t j, double x, int d) {
          const Eigen::VectorXd coeff = K.col(c).segment(static_cast<Eigen::Index>(comp * n * nt + j * nt), nt);
          return eval_expansion(basis, m.element(j), coeff, x, d);
        };
        const double scale = K.col(c).cwiseAbs().maxCoeff();
        for (std::size_t k = 1; k < n; ++k) {
          const double x = m.nodes()[k];
          for (int comp = 0; comp < 2; ++comp) {
            for (int d = 0; d < 2; ++d) {
              EXPECT_NEAR(eval(comp, k - 1, x, d), eval(comp, k, x, d), 1e-9 * scale);
            }
          }
        }
        Eigen::VectorXd nodal(static_cast<Eigen::Index>(map.num_nodal()));
        for (std::size_t k = 0; k <= n; ++k) {
          const std::size_t j = k == n ? n - 1 : k;
          const double x = m.nodes()[k];
          nodal[static_cast<Eigen::Index>(nodal_index(k, NodalField::u))] = eval(0, j, x, 0);
          nodal[static_cast<Eigen::Index>(nodal_index(k, NodalField::du))] = eval(0, j, x, 1);
          nodal[static_cast<Eigen::Index>(nodal_index(k, NodalField::M))] = eval(1, j, x, 0);
          nodal[static_cast<Eigen::Index>(nodal_index(k, NodalField::dM))] = eval(1, j, x, 1);
        }
        for (double v : bc_values(bc, t, TraceVector(nodal))) EXPECT_NEAR(v, 0.0, 1e-9 * scale);
      }
    }
  }
}

TEST(TraceNorm, Examples) {
  const double h = 0.3;
  const Mesh single({0.0, 1.0});
  EXPECT_NEAR(element_trace_norm_squared(h, 1, 0, 1, 0), h, 1e-15);
  EXPECT_NEAR(element_trace_norm_squared(h, 0, 1, h, 1), h * h * h / 3, 1e-15);
  EXPECT_DOUBLE_EQ(hermite_mass_matrix(h)(0, 0), 156 * h / 420);
  EXPECT_DOUBLE_EQ(hermite_stiffness_matrix(h)(0, 0), 12 / (h * h * h));
  // whole-mesh form on one element: u = 1, M = 0
  Eigen::VectorXd nodal = Eigen::VectorXd::Zero(8);
  nodal[0] = 1.0;
  nodal[4] = 1.0;
  EXPECT_NEAR(trace_norm(TraceVector(nodal), single), 1.0, 1e-15);
}

TEST(TraceNorm, MatchesHermiteInterpolantQuadrature) {
  for (double h : {1.0, 0.1, 0.01}) {
    for (int trial = 0; trial < 20; ++trial) {
      const double v0 = uniform(), d0 = uniform(), v1 = uniform(), d1 = uniform();
      const HermiteCubic hc(0.2, h, v0, d0, v1, d1);
      const double oracle = integrate_poly(
          [&](double x) { return hc.value(x) * hc.value(x) + hc.d2(x) * hc.d2(x); }, 0.2, 0.2 + h);
      const double formula = element_trace_norm_squared(h, v0, d0, v1, d1);
      EXPECT_NEAR(formula, oracle, 1e-12 * oracle);
    }
  }
}

TEST(TraceNorm, MatrixIsSpd) {
  for (double h : {1.0, 0.1, 1e-3, 1e-5}) {
    const Eigen::Matrix4d A = trace_norm_matrix(h);
    EXPECT_LT((A - A.transpose()).norm(), 1e-14 * A.norm());
    // condition number grows like h^-4; past h = 1e-3 it leaves double precision
    if (h >= 1e-3) EXPECT_EQ(Eigen::LLT<Eigen::Matrix4d>(A).info(), Eigen::Success) << h;
    // mass part in h-scaled derivative coordinates is h-independent and definite
    const Eigen::Vector4d d(1.0, 1.0, 1.0 / h, 1.0 / h);
    const Eigen::Matrix4d scaled = d.asDiagonal() * hermite_mass_matrix(h) * d.asDiagonal() / h;
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> es(scaled);
    EXPECT_GT(es.eigenvalues().minCoeff(), 1e-4) << h;
    // stiffness part is semidefinite, so the form dominates the mass part
    for (int trial = 0; trial < 20; ++trial) {
      const Eigen::Vector4d v = Eigen::Vector4d::NullaryExpr([](Eigen::Index) { return uniform(); });
      const double mass = v.dot(hermite_mass_matrix(h) * v);
      EXPECT_GE(element_trace_norm_squared(h, v[0], v[2], v[1], v[3]), mass) << h;
    }
  }
}

TEST(TraceNorm, SplitsIntoUAndMParts) {
  const Mesh m = uniform_mesh(3);
  Eigen::VectorXd nodal = Eigen::VectorXd::Random(16);
  const TraceVector q(nodal);
  const TraceNormParts parts = trace_norm_parts(q, m);
  Eigen::VectorXd only_u = nodal, only_m = nodal;
  for (std::size_t k = 0; k < 4; ++k) {
    only_u[static_cast<Eigen::Index>(nodal_index(k, NodalField::M))] = 0;
    only_u[static_cast<Eigen::Index>(nodal_index(k, NodalField::dM))] = 0;
    only_m[static_cast<Eigen::Index>(nodal_index(k, NodalField::u))] = 0;
    only_m[static_cast<Eigen::Index>(nodal_index(k, NodalField::du))] = 0;
  }
  EXPECT_NEAR(parts.u(), trace_norm(TraceVector(only_u), m), 1e-14);
  EXPECT_NEAR(parts.m(), trace_norm(TraceVector(only_m), m), 1e-14);
}
