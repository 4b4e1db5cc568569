#pragma once

// Bessel functions of the first kind of real order, their positive zeros and
// the zeros of their derivatives, and closed-form lower bounds on both zero
// families.

#include <vector>

namespace abguide::bessel {

/// Order nu of J_nu. Finite and non-negative.
class Order {
 public:
  explicit Order(double nu);
  double value() const noexcept { return nu_; }

 private:
  double nu_;
};

/// 1-based index of a positive zero, counted in ascending order.
class ZeroIndex {
 public:
  explicit ZeroIndex(int n);
  int value() const noexcept { return n_; }

 private:
  int n_;
};

/// J_nu(x) for x > 0. Throws std::domain_error for x <= 0 and
/// std::range_error if the result is not representable.
double j(Order order, double x);

/// J'_nu(x) = (nu/x) J_nu(x) - J_{nu+1}(x).
double j_prime(Order order, double x);

/// n-th positive zero x_{nu,n} of J_nu.
double zero_j(Order order, ZeroIndex index);

/// n-th positive zero x'_{nu,n} of J'_nu. Requires nu > 0; for nu = 0 the
/// indexing of the zero at the origin is ambiguous and std::domain_error is
/// thrown.
double zero_j_prime(Order order, ZeroIndex index);

/// The first `count` positive zeros of J_nu, ascending.
std::vector<double> zeros_j(Order order, int count);

/// The first `count` positive zeros of J'_nu, ascending. Requires nu > 0.
std::vector<double> zeros_j_prime(Order order, int count);

/// beta_n: n-th positive root of J_{2/3}(2/3 x^{3/2}) - J_{-2/3}(2/3 x^{3/2}).
double airy_root(ZeroIndex index);

/// alpha_n = 2^{-1/3} beta_n.
double airy_constant(ZeroIndex index);

/// sqrt((n - 1/4)^2 pi^2 + nu^2), a lower bound for x_{nu,n}.
double lower_bound_zero(Order order, ZeroIndex index);

/// nu + alpha_n nu^{1/3}, the Airy-type estimate of x'_{nu,n}. It is a
/// lower bound only away from nu = 0: at nu = 0.1 it exceeds x'_{nu,1}
/// (0.4753 against 0.4635), and it holds from about nu = 0.17 upward.
double lower_bound_zero_prime(Order order, ZeroIndex index);

/// McMahon's large-n expansion of x_{nu,n} (three correction terms).
double mcmahon_zero(Order order, ZeroIndex index);

/// McMahon's large-n expansion of x'_{nu,n}.
double mcmahon_zero_prime(Order order, ZeroIndex index);

namespace detail {

/// J_nu(x) for any real nu that is not a negative integer. Used for the
/// negative orders that appear in the Airy root equation.
double j_real_order(double nu, double x);

}  // namespace detail

}  // namespace abguide::bessel

#include "abguide/bits/brent.hpp"
