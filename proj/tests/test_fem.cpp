#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <utility>

#include "abguide/fem.hpp"

using namespace abguide;
using namespace abguide::fem;

namespace {

constexpr double kPi = std::numbers::pi;

mesh::Mesh sample_mesh() {
  return mesh::build_mesh(Geometry{1.0, 0.5, 2.0}, mesh::MeshOptions{0.25, 2.0, 0.5, 0});
}

Eigen::VectorXd nodal(const mesh::Mesh& m, double cr, double cz) {
  Eigen::VectorXd u(static_cast<Eigen::Index>(m.nodes.size()));
  for (std::size_t i = 0; i < m.nodes.size(); ++i) {
    u(static_cast<Eigen::Index>(i)) = cr * m.nodes[i].r + cz * m.nodes[i].z;
  }
  return u;
}

Eigen::MatrixXd dense(const SparseSym& s) { return Eigen::MatrixXd(s); }

}  // namespace

TEST(Fem, ElementGradientIsCentroidWeighted) {
  const mesh::Node p{0.5, 0.0}, q{1.5, 0.2}, s{0.7, 1.1};
  const auto e = element_matrices(p, q, s);
  // Hand-built reference: grad phi from the inverse Jacobian.
  Eigen::Matrix3d coords;
  coords << 1, p.r, p.z, 1, q.r, q.z, 1, s.r, s.z;
  const Eigen::Matrix3d coef = coords.inverse();  // columns: phi_i = a + b r + c z
  const double area = 0.5 * std::fabs(coords.determinant());
  const double rbar = (p.r + q.r + s.r) / 3.0;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      const double ref = area * rbar * (coef(1, i) * coef(1, j) + coef(2, i) * coef(2, j));
      EXPECT_NEAR(e.gradient(i, j), ref, 1e-13);
    }
  }
  // Row sums of the mass matrix: int phi_i r = area (2 r_i + sum r_others) / 12.
  const double rs[] = {p.r, q.r, s.r};
  for (int i = 0; i < 3; ++i) {
    const double ref = area * (rs[i] + rbar * 3.0) / 12.0;
    EXPECT_NEAR(e.mass.row(i).sum(), ref, 1e-14);
  }
  EXPECT_THROW(element_matrices(p, s, q), std::logic_error);
}

TEST(Fem, NuOverloadCombines) {
  const mesh::Node p{0.2, 0.0}, q{0.6, 0.0}, s{0.2, 0.5};
  const auto e = element_matrices(p, q, s);
  const auto [a, m] = element_matrices(p, q, s, 1.5);
  EXPECT_NEAR((a - e.gradient - 2.25 * e.potential).norm(), 0.0, 1e-14);
  EXPECT_NEAR((m - e.mass).norm(), 0.0, 0.0);
}

TEST(Fem, UnconstrainedIntegrals) {
  const auto m = sample_mesh();
  const auto sys = assemble_unconstrained(m, 0.5);
  const auto g = m.geometry;
  const double volume = 0.5 * g.r_max * g.r_max * g.d;  // int r dr dz
  EXPECT_NEAR(Eigen::VectorXd::Ones(sys.M.rows()).dot(sys.M * Eigen::VectorXd::Ones(sys.M.rows())),
              volume, 1e-12);
  // Linear functions are reproduced exactly: |grad u|^2 = 1.
  for (const auto& [cr, cz] : {std::pair{1.0, 0.0}, std::pair{0.0, 1.0}, std::pair{0.6, 0.8}}) {
    const Eigen::VectorXd u = nodal(m, cr, cz);
    EXPECT_NEAR(u.dot(sys.gradient * u), volume, 1e-11);
  }
  // Constants are in the kernel of the gradient part.
  const Eigen::VectorXd one = Eigen::VectorXd::Ones(sys.gradient.rows());
  EXPECT_NEAR((sys.gradient * one).norm(), 0.0, 1e-12);
}

TEST(Fem, SymmetricAndDefinite) {
  const auto sys = assemble(sample_mesh(), 0.5);
  const auto K = dense(sys.gradient), P = dense(sys.potential), M = dense(sys.M), A = dense(sys.A);
  EXPECT_NEAR((K - K.transpose()).norm(), 0.0, 1e-14);
  EXPECT_NEAR((M - M.transpose()).norm(), 0.0, 1e-14);
  EXPECT_NEAR((A - K - P).norm(), 0.0, 1e-12);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ek(K), ep(P), em(M);
  EXPECT_GT(ek.eigenvalues().minCoeff(), 0.0);  // essential nodes pin it
  EXPECT_GE(ep.eigenvalues().minCoeff(), 0.0);
  EXPECT_GT(em.eigenvalues().minCoeff(), 0.0);
}

TEST(Fem, PotentialScalesWithOrderSquared) {
  const auto m = sample_mesh();
  const auto a = assemble(m, 0.5);
  const auto b = assemble(m, 1.0);
  EXPECT_NEAR((dense(b.potential) - 4.0 * dense(a.potential)).norm(), 0.0, 1e-12);
  EXPECT_NEAR((dense(b.gradient) - dense(a.gradient)).norm(), 0.0, 0.0);
}

TEST(Fem, FluxModeOverload) {
  const auto m = sample_mesh();
  const auto a = assemble(m, FluxMode(0.5, -1));
  EXPECT_DOUBLE_EQ(a.nu, 1.5);
  EXPECT_NEAR((dense(a.A) - dense(assemble(m, 1.5).A)).norm(), 0.0, 0.0);
}

TEST(Fem, DofMapFollowsTags) {
  const auto m = sample_mesh();
  const DofMap dofs(m);
  int free = 0;
  for (std::size_t i = 0; i < m.nodes.size(); ++i) {
    const auto& n = m.nodes[i];
    const bool window_interior = n.z == 0.0 && n.r > 0.0 && n.r < m.geometry.a;
    const bool interior = n.r > 0.0 && n.r < m.geometry.r_max && n.z > 0.0 && n.z < m.geometry.d;
    EXPECT_EQ(!dofs.constrained(static_cast<int>(i)), window_interior || interior) << n.r << " " << n.z;
    free += !dofs.constrained(static_cast<int>(i));
  }
  EXPECT_EQ(free, dofs.free_count());
  EXPECT_TRUE(dofs.constrained(m.junction));
}

TEST(Fem, ExpandScatters) {
  const auto m = sample_mesh();
  const DofMap dofs(m);
  const Eigen::VectorXd v = Eigen::VectorXd::LinSpaced(dofs.free_count(), 1.0, 2.0);
  const auto full = expand(dofs, v);
  for (int i = 0; i < dofs.node_count(); ++i) {
    if (dofs.constrained(i)) {
      EXPECT_EQ(full(i), 0.0);
    } else {
      EXPECT_EQ(full(i), v(dofs.dof(i)));
    }
  }
  EXPECT_THROW(expand(dofs, Eigen::VectorXd::Zero(3)), std::invalid_argument);
}

TEST(Fem, GroundStateErrorShrinksUnderRefinement) {
  const auto m0 = mesh::build_cylinder_mesh(1.0, kPi, mesh::MeshOptions{0.25, 3.0, 0.5, 0});
  const auto m1 = mesh::refine(m0);
  auto smallest = [](const mesh::Mesh& m) {
    const auto s = assemble(m, 0.5);
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(dense(s.A), dense(s.M));
    return es.eigenvalues()(0);
  };
  const double l0 = smallest(m0), l1 = smallest(m1);
  const double exact = kPi * kPi + 0.25;
  EXPECT_LT(std::fabs(l1 - exact), 0.35 * std::fabs(l0 - exact));
  EXPECT_LT(std::fabs(l1 - exact) / exact, 1e-2);
}

TEST(Fem, RejectsBadInput) {
  const auto m = sample_mesh();
  EXPECT_THROW(assemble(m, 0.0), std::invalid_argument);
  EXPECT_THROW(assemble(m, -1.0), std::invalid_argument);
}

TEST(Fem, CoordinateExport) {
  const auto sys = assemble(sample_mesh(), 0.5);
  std::stringstream s;
  write_coordinate(s, sys.M);
  int r = 0, c = 0;
  double v = 0.0;
  long count = 0;
  double sum = 0.0;
  while (s >> r >> c >> v) {
    ++count;
    sum += v;
  }
  EXPECT_EQ(count, sys.M.nonZeros());
  EXPECT_NEAR(sum, sys.M.sum(), 1e-12);
}
