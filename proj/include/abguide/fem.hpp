#pragma once

// P1 assembly of the per-mode axisymmetric form
//   a(u, v) = int (u_r v_r + u_z v_z + nu^2 u v / r^2) r dr dz
//   m(u, v) = int u v r dr dz
// on the free (non-essential) nodes of a tagged mesh.

#include <Eigen/Core>
#include <Eigen/SparseCore>
#include <array>
#include <iosfwd>
#include <vector>

#include "abguide/analytic.hpp"
#include "abguide/mesh.hpp"

namespace abguide::fem {

using SparseSym = Eigen::SparseMatrix<double, Eigen::RowMajor>;
using Local = Eigen::Matrix3d;

struct ElementMatrices {
  Local gradient;   // int grad(phi_i).grad(phi_j) r
  Local potential;  // int phi_i phi_j / r, without the nu^2 factor
  Local mass;       // int phi_i phi_j r
};

/// Three-point interior rule at barycentric (2/3, 1/6, 1/6) and its
/// permutations; never samples r = 0. Exact for the gradient part and for
/// the row sums of the mass part.
ElementMatrices element_matrices(const mesh::Node& p, const mesh::Node& q, const mesh::Node& s);

/// Local stiffness gradient + nu^2 potential and local mass.
std::pair<Local, Local> element_matrices(const mesh::Node& p, const mesh::Node& q,
                                         const mesh::Node& s, double nu);

class DofMap {
 public:
  static constexpr int kConstrained = -1;

  explicit DofMap(const mesh::Mesh& mesh);

  int dof(int node) const { return map_[static_cast<std::size_t>(node)]; }
  bool constrained(int node) const { return dof(node) == kConstrained; }
  int free_count() const noexcept { return free_; }
  int node_count() const noexcept { return static_cast<int>(map_.size()); }
  /// Node id of each free dof.
  const std::vector<int>& free_nodes() const noexcept { return nodes_; }

 private:
  std::vector<int> map_;
  std::vector<int> nodes_;
  int free_ = 0;
};

struct System {
  SparseSym gradient;   // K
  SparseSym potential;  // P, already scaled by nu^2
  SparseSym A;          // K + P
  SparseSym M;
  DofMap dofs;
  double nu = 0.0;
};

/// Throws std::invalid_argument when nu <= 0 or no dof is free.
System assemble(const mesh::Mesh& mesh, double nu);
System assemble(const mesh::Mesh& mesh, const FluxMode& mode);

/// Same matrices over every node, no condition applied. Used for
/// consistency checks of the mass and potential integrals.
System assemble_unconstrained(const mesh::Mesh& mesh, double nu);

/// Scatter free-dof values back to all nodes (constrained nodes get zero).
Eigen::VectorXd expand(const DofMap& dofs, const Eigen::VectorXd& free_values);

/// One "row col value" line per stored entry, 0-based, 17 significant digits.
void write_coordinate(std::ostream& out, const SparseSym& matrix);

}  // namespace abguide::fem
