#include "abguide/eigensolver.hpp"

#include <Eigen/Dense>
#include <Eigen/OrderingMethods>
#include <Eigen/SparseCholesky>
#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

namespace abguide::eigs {

namespace {

using ColMat = Eigen::SparseMatrix<double>;
using Ldlt = Eigen::SimplicialLDLT<ColMat, Eigen::Lower, Eigen::AMDOrdering<int>>;
using Eigen::MatrixXd;
using Eigen::VectorXd;

void check_pencil(const SparseSym& A, const SparseSym& M, double threshold) {
  if (A.rows() != A.cols() || M.rows() != M.cols() || A.rows() != M.rows()) {
    throw std::invalid_argument("eigs: A and M must be square and of equal size");
  }
  if (A.rows() == 0) throw std::invalid_argument("eigs: empty pencil");
  if (!std::isfinite(threshold)) throw std::invalid_argument("eigs: threshold must be finite");
}

// Factor S = A - shift M. Returns false when a pivot is exactly or nearly
// zero, which is how a singular shifted matrix shows up without pivoting.
bool factor(Ldlt& ldlt, const ColMat& A, const ColMat& M, double shift) {
  const ColMat S = A - shift * M;
  ldlt.compute(S);
  if (ldlt.info() != Eigen::Success) return false;
  const VectorXd d = ldlt.vectorD();
  if (!d.allFinite()) return false;
  const double scale = d.cwiseAbs().maxCoeff();
  const double floor = 64.0 * std::numeric_limits<double>::epsilon() * scale;
  return (d.cwiseAbs().array() > floor).all();
}

void fix_sign(VectorXd& v) {
  const double big = v.cwiseAbs().maxCoeff();
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (std::fabs(v(i)) > 1e-8 * big) {
      if (v(i) < 0.0) v = -v;
      return;
    }
  }
}

double relative_residual(const SparseSym& A, const SparseSym& M, const VectorXd& v, double lambda) {
  const VectorXd r = A * v - lambda * (M * v);
  const VectorXd av = v.cwiseAbs();
  const double denom = (A.cwiseAbs() * av + std::fabs(lambda) * (M.cwiseAbs() * av)).norm();
  return denom > 0.0 ? r.norm() / denom : 0.0;
}

// M-orthonormal basis V with companions MV = M V and Z = Op V, and the
// projected operator H = V' M Op V, all grown column by column.
class KrylovBasis {
 public:
  KrylovBasis(const SparseSym& M, const Ldlt& op, Eigen::Index n, Eigen::Index capacity)
      : M_(M), op_(op), V_(n, capacity), MV_(n, capacity), Z_(n, capacity), H_(capacity, capacity) {}

  Eigen::Index size() const { return p_; }
  Eigen::Index capacity() const { return V_.cols(); }
  auto V() const { return V_.leftCols(p_); }
  auto Z() const { return Z_.leftCols(p_); }
  MatrixXd H() const {
    MatrixXd h = H_.topLeftCorner(p_, p_);
    return 0.5 * (h + h.transpose());
  }

  // Orthogonalizes the columns of W (two Gram-Schmidt passes) and appends
  // those that keep a meaningful norm. Returns how many were added.
  Eigen::Index append(MatrixXd W) {
    const Eigen::Index p0 = p_;
    for (Eigen::Index c = 0; c < W.cols() && p_ < capacity(); ++c) {
      VectorXd w = W.col(c);
      const double before = std::sqrt(std::max(0.0, w.dot(M_ * w)));
      if (!(before > 0.0)) continue;
      for (int pass = 0; pass < 2; ++pass) {
        if (p_ > 0) w -= V_.leftCols(p_) * (MV_.leftCols(p_).transpose() * w);
      }
      const VectorXd Mw = M_ * w;
      const double after = std::sqrt(std::max(0.0, w.dot(Mw)));
      if (!(after > 1e-10 * before)) continue;
      V_.col(p_) = w / after;
      MV_.col(p_) = Mw / after;
      ++p_;
    }
    const Eigen::Index q = p_ - p0;
    if (q == 0) return 0;
    Z_.middleCols(p0, q) = op_.solve(MV_.middleCols(p0, q));
    const MatrixXd cross = MV_.leftCols(p_).transpose() * Z_.middleCols(p0, q);
    H_.block(0, p0, p_, q) = cross;
    H_.block(p0, 0, q, p0) = cross.topRows(p0).transpose();
    return q;
  }

  // Keeps span(V S) for the orthonormal columns of S; Op commutes with the
  // change of basis, so no new solves are needed.
  void compress(const MatrixXd& S, const VectorXd& mu) {
    const Eigen::Index q = S.cols();
    const MatrixXd v = V_.leftCols(p_) * S;
    const MatrixXd mv = MV_.leftCols(p_) * S;
    const MatrixXd z = Z_.leftCols(p_) * S;
    V_.leftCols(q) = v;
    MV_.leftCols(q) = mv;
    Z_.leftCols(q) = z;
    H_.topLeftCorner(q, q) = mu.asDiagonal();
    p_ = q;
  }

 private:
  const SparseSym& M_;
  const Ldlt& op_;
  MatrixXd V_, MV_, Z_, H_;
  Eigen::Index p_ = 0;
};

}  // namespace

Inertia inertia(const SparseSym& A, const SparseSym& M, double threshold) {
  check_pencil(A, M, threshold);
  const ColMat a = A;
  const ColMat m = M;
  Ldlt ldlt;
  double t = threshold;
  double step = 1e-12;
  for (int attempt = 0; attempt < 8; ++attempt) {
    if (factor(ldlt, a, m, t)) {
      const VectorXd d = ldlt.vectorD();
      Inertia out;
      out.negative = static_cast<int>((d.array() < 0.0).count());
      out.positive = static_cast<int>(d.size()) - out.negative;
      out.threshold = t;
      out.retries = attempt;
      return out;
    }
    t = threshold == 0.0 ? -step : threshold * (1.0 - step);
    step *= 2.0;
  }
  throw NumericalError("inertia: A - t M stays singular near t = " + std::to_string(threshold));
}

int inertia_count(const SparseSym& A, const SparseSym& M, double threshold) {
  return inertia(A, M, threshold).negative;
}

std::vector<EigenPair> eigs_below(const SparseSym& A, const SparseSym& M, double threshold,
                                  const EigsOptions& opt) {
  check_pencil(A, M, threshold);
  if (!(threshold > 0.0)) throw std::invalid_argument("eigs_below: threshold must be > 0");
  if (!(opt.tol > 0.0)) throw std::invalid_argument("eigs_below: tol must be > 0");
  const Eigen::Index n = A.rows();
  const int k = inertia_count(A, M, threshold);
  if (k == 0) return {};

  const double sigma = opt.shift.value_or(-0.01 * threshold);
  if (!(sigma < threshold)) throw std::invalid_argument("eigs_below: shift must lie below threshold");
  Ldlt op;
  if (!factor(op, ColMat(A), ColMat(M), sigma)) {
    throw NumericalError("eigs_below: factorization of A - sigma M failed at sigma = " +
                         std::to_string(sigma));
  }

  const Eigen::Index b = std::max(1, opt.block);
  const Eigen::Index want = std::min<Eigen::Index>(n, k + b);
  const Eigen::Index capacity = std::min<Eigen::Index>(n, std::max<Eigen::Index>(2 * k + 4 * b, 40));
  KrylovBasis basis(M, op, n, capacity);

  std::mt19937_64 rng(opt.seed);
  std::normal_distribution<double> normal;
  auto random_block = [&](Eigen::Index cols) {
    MatrixXd X(n, cols);
    for (Eigen::Index j = 0; j < cols; ++j) {
      for (Eigen::Index i = 0; i < n; ++i) X(i, j) = normal(rng);
    }
    return X;
  };
  basis.append(random_block(std::min<Eigen::Index>(n, std::max<Eigen::Index>(b, k + 1))));

  std::vector<EigenPair> pairs(static_cast<std::size_t>(k));
  for (int iter = 0; iter < opt.max_iterations; ++iter) {
    const Eigen::Index p = basis.size();
    Eigen::SelfAdjointEigenSolver<MatrixXd> ritz(basis.H());
    if (ritz.info() != Eigen::Success) throw NumericalError("eigs_below: Ritz problem failed");
    // Largest mu = 1/(lambda - sigma) first.
    const MatrixXd S = ritz.eigenvectors().rowwise().reverse();
    const VectorXd mu = ritz.eigenvalues().reverse();

    std::vector<Eigen::Index> open;
    const Eigen::Index usable = std::min<Eigen::Index>(p, k);
    for (Eigen::Index i = 0; i < usable; ++i) {
      VectorXd y = basis.V() * S.col(i);
      const double my = y.dot(M * y);
      y /= std::sqrt(my);
      const double lambda = y.dot(A * y);
      auto& pair = pairs[static_cast<std::size_t>(i)];
      pair.value = lambda;
      pair.residual = relative_residual(A, M, y, lambda);
      pair.vector = std::move(y);
      if (pair.residual > opt.tol) open.push_back(i);
    }
    const bool enough = usable == k && pairs.back().value < threshold;
    if (enough && open.empty()) {
      for (auto& pr : pairs) fix_sign(pr.vector);
      std::stable_sort(pairs.begin(), pairs.end(),
                       [](const EigenPair& x, const EigenPair& y) { return x.value < y.value; });
      return pairs;
    }

    // Expand with Op applied to the unconverged Ritz vectors, topped up with
    // the next ones so clusters of up to `block` values stay resolved.
    for (Eigen::Index i = k; i < p && static_cast<Eigen::Index>(open.size()) < b; ++i) open.push_back(i);
    if (open.size() > static_cast<std::size_t>(b)) open.resize(static_cast<std::size_t>(b));
    MatrixXd W(n, static_cast<Eigen::Index>(open.size()));
    for (std::size_t c = 0; c < open.size(); ++c) {
      W.col(static_cast<Eigen::Index>(c)) = basis.Z() * S.col(open[c]);
    }

    if (basis.size() + W.cols() > basis.capacity() && basis.capacity() < n) {
      const Eigen::Index keep = std::min(want, p);
      basis.compress(S.leftCols(keep), mu.head(keep));
    }
    if (basis.append(W) == 0 && basis.size() < n) basis.append(random_block(b));
  }
  throw NumericalError("eigs_below: no convergence after " + std::to_string(opt.max_iterations) +
                       " iterations (" + std::to_string(k) + " eigenvalues requested)");
}

std::vector<EigenPair> eigs_below_dense(const SparseSym& A, const SparseSym& M, double threshold) {
  check_pencil(A, M, threshold);
  if (A.rows() > kDenseLimit) {
    throw std::invalid_argument("eigs_below_dense: n exceeds " + std::to_string(kDenseLimit));
  }
  const MatrixXd a = MatrixXd(A);
  const MatrixXd m = MatrixXd(M);
  Eigen::GeneralizedSelfAdjointEigenSolver<MatrixXd> es(a, m);
  if (es.info() != Eigen::Success) throw NumericalError("eigs_below_dense: solver failed");
  std::vector<EigenPair> out;
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    const double lambda = es.eigenvalues()(i);
    if (!(lambda < threshold)) break;
    VectorXd v = es.eigenvectors().col(i);
    v /= std::sqrt(v.dot(m * v));
    fix_sign(v);
    out.push_back({lambda, v, relative_residual(A, M, v, lambda)});
  }
  return out;
}

}  // namespace abguide::eigs
