#pragma once

// Reference values computed independently of the library: Boost.Math for
// Bessel and Airy functions, plain bisection for roots, long-double power
// series, and closed forms.

#include <boost/math/special_functions/airy.hpp>
#include <boost/math/special_functions/bessel.hpp>
#include <boost/math/special_functions/bessel_prime.hpp>
#include <cmath>
#include <functional>
#include <numbers>
#include <vector>

namespace oracle {

inline double bisect(const std::function<double(double)>& f, double lo, double hi, int iters = 200) {
  double flo = f(lo);
  for (int i = 0; i < iters && hi - lo > 0.0; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    const double fm = f(mid);
    if ((fm < 0.0) == (flo < 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

// Roots of f on (0, x_end], found by a fine scan plus bisection.
inline std::vector<double> roots(const std::function<double(double)>& f, double x0, double x_end,
                                 double step, int count) {
  std::vector<double> out;
  double a = x0;
  double fa = f(a);
  while (a < x_end && static_cast<int>(out.size()) < count) {
    const double b = a + step;
    const double fb = f(b);
    if ((fa < 0.0) != (fb < 0.0)) out.push_back(bisect(f, a, b));
    a = b;
    fa = fb;
  }
  return out;
}

inline double j(double nu, double x) { return boost::math::cyl_bessel_j(nu, x); }
inline double jp(double nu, double x) { return boost::math::cyl_bessel_j_prime(nu, x); }

// J_nu(x) by its ascending series in long double.
inline double j_series(double nu, double x) {
  const long double h = 0.5L * x;
  long double term = std::pow(h, static_cast<long double>(nu)) / std::tgamma(static_cast<long double>(nu) + 1.0L);
  long double sum = term;
  for (int k = 1; k < 400; ++k) {
    term *= -(h * h) / (static_cast<long double>(k) * (k + nu));
    sum += term;
    if (std::fabs(term) < 1e-22L * std::fabs(sum)) break;
  }
  return static_cast<double>(sum);
}

// J'_{1/2}(x) = 0  <=>  tan x = 2x.
inline std::vector<double> half_order_prime_zeros(int count) {
  std::vector<double> out;
  for (int n = 0; static_cast<int>(out.size()) < count; ++n) {
    // One root of sin x - 2x cos x in (n pi, n pi + pi/2) for every n.
    const double lo = n * std::numbers::pi + 1e-9;
    const double hi = n * std::numbers::pi + std::numbers::pi / 2 - 1e-12;
    out.push_back(bisect([](double x) { return std::sin(x) - 2.0 * x * std::cos(x); }, lo, hi));
  }
  return out;
}

inline double zero_j(double nu, int n) { return boost::math::cyl_bessel_j_zero(nu, n); }

inline double zero_jp(double nu, int n) {
  const auto r = roots([nu](double x) { return jp(nu, x); }, 1e-6, 400.0, 1e-3, n);
  return r.at(static_cast<std::size_t>(n - 1));
}

// n-th zero of Ai'(-x).
inline double airy_prime_zero(int n) {
  const auto r = roots([](double x) { return boost::math::airy_ai_prime(-x); }, 0.0, 100.0, 1e-3, n);
  return r.at(static_cast<std::size_t>(n - 1));
}

// Eigenvalues 4/h^2 sin^2(k pi h / 2L) of the 1D Dirichlet Laplacian
// stencil with n interior points on (0, L).
inline double laplace_1d(int k, int n, double L) {
  const double h = L / (n + 1);
  const double s = std::sin(k * std::numbers::pi * h / (2.0 * L));
  return 4.0 / (h * h) * s * s;
}

}  // namespace oracle
