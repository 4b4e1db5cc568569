#include "abguide/fem.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>
#include <string>
#include <utility>

namespace abguide::fem {

namespace {

constexpr double kHeavy = 2.0 / 3.0;
constexpr double kLight = 1.0 / 6.0;

using Triplets = std::vector<Eigen::Triplet<double>>;

SparseSym from_triplets(int n, const Triplets& t) {
  SparseSym m(n, n);
  m.setFromTriplets(t.begin(), t.end());
  m.makeCompressed();
  return m;
}

// `index(node)` returns the matrix row of a node or -1 to drop it.
template <class Index>
System assemble_with(const mesh::Mesh& mesh, double nu, DofMap dofs, int n, Index index) {
  if (!(nu > 0.0) || !std::isfinite(nu)) {
    throw std::invalid_argument("assemble: order nu must be > 0, got " + std::to_string(nu));
  }
  if (n == 0) throw std::invalid_argument("assemble: no free degrees of freedom");
  const double nu2 = nu * nu;
  Triplets tk, tp, tm;
  const std::size_t cap = mesh.triangles.size() * 9;
  tk.reserve(cap);
  tp.reserve(cap);
  tm.reserve(cap);
  for (const auto& t : mesh.triangles) {
    const auto e = element_matrices(mesh.nodes[static_cast<std::size_t>(t.v[0])],
                                    mesh.nodes[static_cast<std::size_t>(t.v[1])],
                                    mesh.nodes[static_cast<std::size_t>(t.v[2])]);
    for (int i = 0; i < 3; ++i) {
      const int gi = index(t.v[i]);
      if (gi < 0) continue;
      for (int j = 0; j < 3; ++j) {
        const int gj = index(t.v[j]);
        if (gj < 0) continue;
        tk.emplace_back(gi, gj, e.gradient(i, j));
        tp.emplace_back(gi, gj, nu2 * e.potential(i, j));
        tm.emplace_back(gi, gj, e.mass(i, j));
      }
    }
  }
  System sys{from_triplets(n, tk), from_triplets(n, tp), {}, from_triplets(n, tm), std::move(dofs), nu};
  sys.A = sys.gradient + sys.potential;
  sys.A.makeCompressed();
  return sys;
}

}  // namespace

ElementMatrices element_matrices(const mesh::Node& p, const mesh::Node& q, const mesh::Node& s) {
  const double area2 = (q.r - p.r) * (s.z - p.z) - (s.r - p.r) * (q.z - p.z);
  if (!(area2 > 0.0)) throw std::logic_error("element_matrices: degenerate or clockwise triangle");
  const double area = 0.5 * area2;

  // Gradients of the barycentric coordinates.
  const std::array<double, 3> gr{(q.z - s.z) / area2, (s.z - p.z) / area2, (p.z - q.z) / area2};
  const std::array<double, 3> gz{(s.r - q.r) / area2, (p.r - s.r) / area2, (q.r - p.r) / area2};
  const std::array<double, 3> rv{p.r, q.r, s.r};

  ElementMatrices out;
  out.gradient.setZero();
  out.potential.setZero();
  out.mass.setZero();
  const double w = area / 3.0;
  for (int k = 0; k < 3; ++k) {
    std::array<double, 3> phi{kLight, kLight, kLight};
    phi[static_cast<std::size_t>(k)] = kHeavy;
    const double r = phi[0] * rv[0] + phi[1] * rv[1] + phi[2] * rv[2];
    if (!(r > 0.0)) throw std::logic_error("element_matrices: quadrature point on the axis");
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        const double pp = phi[static_cast<std::size_t>(i)] * phi[static_cast<std::size_t>(j)];
        out.gradient(i, j) += w * r * (gr[i] * gr[j] + gz[i] * gz[j]);
        out.potential(i, j) += w * pp / r;
        out.mass(i, j) += w * pp * r;
      }
    }
  }
  return out;
}

std::pair<Local, Local> element_matrices(const mesh::Node& p, const mesh::Node& q,
                                         const mesh::Node& s, double nu) {
  const auto e = element_matrices(p, q, s);
  return {e.gradient + nu * nu * e.potential, e.mass};
}

DofMap::DofMap(const mesh::Mesh& mesh) : map_(mesh.nodes.size(), 0) {
  for (const auto& e : mesh.boundary) {
    if (!mesh::is_essential(e.tag)) continue;
    map_[static_cast<std::size_t>(e.a)] = kConstrained;
    map_[static_cast<std::size_t>(e.b)] = kConstrained;
  }
  for (std::size_t i = 0; i < map_.size(); ++i) {
    if (map_[i] == kConstrained) continue;
    map_[i] = free_++;
    nodes_.push_back(static_cast<int>(i));
  }
}

System assemble(const mesh::Mesh& mesh, double nu) {
  DofMap dofs(mesh);
  const int n = dofs.free_count();
  // `dofs` moves into the result, so index through a copy.
  std::vector<int> rows(static_cast<std::size_t>(dofs.node_count()));
  for (int i = 0; i < dofs.node_count(); ++i) rows[static_cast<std::size_t>(i)] = dofs.dof(i);
  return assemble_with(mesh, nu, std::move(dofs), n,
                       [&rows](int node) { return rows[static_cast<std::size_t>(node)]; });
}

System assemble(const mesh::Mesh& mesh, const FluxMode& mode) { return assemble(mesh, mode.nu()); }

System assemble_unconstrained(const mesh::Mesh& mesh, double nu) {
  mesh::Mesh open = mesh;
  open.boundary.clear();
  DofMap dofs(open);
  const int n = dofs.free_count();
  return assemble_with(mesh, nu, std::move(dofs), n, [](int node) { return node; });
}

Eigen::VectorXd expand(const DofMap& dofs, const Eigen::VectorXd& free_values) {
  if (free_values.size() != dofs.free_count()) {
    throw std::invalid_argument("expand: vector length does not match the free dof count");
  }
  Eigen::VectorXd out = Eigen::VectorXd::Zero(dofs.node_count());
  for (int i = 0; i < dofs.free_count(); ++i) {
    out(dofs.free_nodes()[static_cast<std::size_t>(i)]) = free_values(i);
  }
  return out;
}

void write_coordinate(std::ostream& out, const SparseSym& matrix) {
  char buf[96];
  for (int r = 0; r < matrix.outerSize(); ++r) {
    for (SparseSym::InnerIterator it(matrix, r); it; ++it) {
      std::snprintf(buf, sizeof buf, "%d %d %.17g\n", static_cast<int>(it.row()),
                    static_cast<int>(it.col()), it.value());
      out << buf;
    }
  }
}

}  // namespace abguide::fem
