#pragma once

// All eigenpairs of A x = lambda M x below a threshold, for A symmetric
// positive semidefinite and M symmetric positive definite. The count is
// fixed in advance by the inertia of A - threshold M (Sylvester), so the
// iteration stops only when that many pairs have converged.

#include <Eigen/Core>
#include <Eigen/SparseCore>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace abguide::eigs {

using SparseSym = Eigen::SparseMatrix<double, Eigen::RowMajor>;

class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct EigenPair {
  double value = 0.0;
  Eigen::VectorXd vector;  // v' M v = 1, first significant entry positive
  /// ||A v - value M v|| / || (|A| + |value| |M|) |v| ||, Euclidean norms
  /// with entrywise absolute values. Plain ||A v|| cancels to many digits on
  /// strongly graded meshes and would put a floor near 1e-7 under the
  /// residual.
  double residual = 0.0;
};

struct EigsOptions {
  double tol = 1e-9;
  std::uint64_t seed = 20240917;
  int block = 4;
  int max_iterations = 2000;
  /// Shift of the inverted operator; -0.01 * threshold when unset.
  std::optional<double> shift;
};

struct Inertia {
  int negative = 0;
  int positive = 0;
  /// Threshold actually factored; differs from the request after a retry.
  double threshold = 0.0;
  int retries = 0;
};

/// Inertia of A - threshold M from a sparse LDL' factorization. A singular
/// factorization is retried with the threshold lowered by 1e-12 relative
/// (doubling each time, at most 8 attempts). Throws NumericalError after that.
Inertia inertia(const SparseSym& A, const SparseSym& M, double threshold);

/// Number of generalized eigenvalues strictly below `threshold`.
int inertia_count(const SparseSym& A, const SparseSym& M, double threshold);

/// Shift-invert block Krylov with Rayleigh-Ritz and thick restarts.
/// Throws std::invalid_argument on bad input and NumericalError when the
/// factorization fails or the iteration does not converge.
std::vector<EigenPair> eigs_below(const SparseSym& A, const SparseSym& M, double threshold,
                                  const EigsOptions& options = {});

/// Dense generalized solver, n <= 2000. Reference path for tests.
std::vector<EigenPair> eigs_below_dense(const SparseSym& A, const SparseSym& M, double threshold);

inline constexpr int kDenseLimit = 2000;

}  // namespace abguide::eigs
