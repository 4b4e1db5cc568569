#include "abguide/bessel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace abguide::bessel {

namespace {

constexpr double kPi = std::numbers::pi;

// Scan step used to bracket zeros. Consecutive zeros of J_nu and J'_nu are
// more than 2.5 apart for every nu >= 0, so a step of 0.3 never jumps over a
// pair of zeros.
constexpr double kScanStep = 0.3;

struct JY {
  double j;
  double y;
};

// Ascending series in extended precision. Valid for any real order that is
// not a negative integer; used where the terms do not cancel badly.
double series_j(double nu, double x) {
  using ld = long double;
  const ld half = static_cast<ld>(x) / 2.0L;
  ld lead;
  if (nu >= 0.0) {
    lead = std::exp(static_cast<ld>(nu) * std::log(half) - std::lgamma(static_cast<ld>(nu) + 1.0L));
  } else {
    lead = std::pow(half, static_cast<ld>(nu)) / std::tgamma(static_cast<ld>(nu) + 1.0L);
  }
  if (lead == 0.0L) return 0.0;
  const ld q = -half * half;
  ld term = 1.0L;
  ld sum = 1.0L;
  for (int k = 1; k < 2000; ++k) {
    term *= q / (static_cast<ld>(k) * (static_cast<ld>(k) + static_cast<ld>(nu)));
    sum += term;
    if (k > half && std::fabs(term) < 1e-21L * std::fabs(sum)) break;
  }
  return static_cast<double>(lead * sum);
}

// Steed's method for x >= 2: continued fraction CF1 for J'_nu/J_nu, downward
// recurrence to a reduced order mu, complex continued fraction CF2 for
// (J'_mu + iY'_mu)/(J_mu + iY_mu), Wronskian normalisation, then upward
// recurrence for Y.
JY steed_jy(double nu_in, double x_in) {
  using ld = long double;
  const ld nu = nu_in;
  const ld x = x_in;
  constexpr ld eps = 1e-19L;
  constexpr ld fpmin = 1e-300L;
  constexpr int maxit = 200000;

  const int nl = std::max(0, static_cast<int>(nu_in - x_in + 1.5));
  const ld mu = nu - nl;
  const ld mu2 = mu * mu;
  const ld xi = 1.0 / x;
  const ld xi2 = 2.0 * xi;
  const ld w = xi2 / kPi;

  int isign = 1;
  ld h = nu * xi;
  if (h < fpmin) h = fpmin;
  ld b = xi2 * nu;
  ld d = 0.0;
  ld c = h;
  int i = 1;
  for (; i <= maxit; ++i) {
    b += xi2;
    d = b - d;
    if (std::fabs(d) < fpmin) d = fpmin;
    c = b - 1.0 / c;
    if (std::fabs(c) < fpmin) c = fpmin;
    d = 1.0 / d;
    const ld del = c * d;
    h *= del;
    if (d < 0.0) isign = -isign;
    if (std::fabs(del - 1.0) < eps) break;
  }
  if (i > maxit) throw std::range_error("bessel: continued fraction CF1 did not converge");

  // Downward recurrence from nu to mu on an arbitrary normalisation. The
  // starting magnitude is rescaled if the recurrence grows too fast.
  ld jl = isign * 1e-30L;
  ld jpl = h * jl;
  const ld jl_top = jl;
  ld scale = 1.0;
  ld fact = nu * xi;
  for (int l = nl; l >= 1; --l) {
    const ld jtemp = fact * jl + jpl;
    fact -= xi;
    jpl = fact * jtemp - jl;
    jl = jtemp;
    if (std::fabs(jl) > 1e250L) {
      jl *= 1e-250L;
      jpl *= 1e-250L;
      scale *= 1e-250L;
    }
  }
  if (jl == 0.0) jl = eps;
  const ld f = jpl / jl;

  ld a = 0.25 - mu2;
  ld p = -0.5 * xi;
  ld q = 1.0;
  const ld br = 2.0 * x;
  ld bi = 2.0;
  ld fct = a * xi / (p * p + q * q);
  ld cr = br + q * fct;
  ld ci = bi + p * fct;
  ld den = br * br + bi * bi;
  ld dr = br / den;
  ld di = -bi / den;
  ld dlr = cr * dr - ci * di;
  ld dli = cr * di + ci * dr;
  ld temp = p * dlr - q * dli;
  q = p * dli + q * dlr;
  p = temp;
  for (i = 2; i <= maxit; ++i) {
    a += 2.0L * (i - 1);
    bi += 2.0;
    dr = a * dr + br;
    di = a * di + bi;
    if (std::fabs(dr) + std::fabs(di) < fpmin) dr = fpmin;
    fct = a / (cr * cr + ci * ci);
    cr = br + cr * fct;
    ci = bi - ci * fct;
    if (std::fabs(cr) + std::fabs(ci) < fpmin) cr = fpmin;
    den = dr * dr + di * di;
    dr /= den;
    di /= -den;
    dlr = cr * dr - ci * di;
    dli = cr * di + ci * dr;
    temp = p * dlr - q * dli;
    q = p * dli + q * dlr;
    p = temp;
    if (std::fabs(dlr - 1.0) + std::fabs(dli) < eps) break;
  }
  if (i > maxit) throw std::range_error("bessel: continued fraction CF2 did not converge");

  const ld gam = (p - f) / q;
  ld jmu = std::sqrt(w / ((p - f) * gam + q));
  jmu = std::copysign(jmu, jl);
  ld ymu = jmu * gam;
  const ld ymup = ymu * (p + q / gam);
  ld y1 = mu * xi * ymu - ymup;

  // jl holds J_mu up to the factor scale * (seed normalisation).
  const ld ratio = jmu / jl;
  const ld j_nu = jl_top * scale * ratio;
  
  for (int k = 1; k <= nl; ++k) {
    const ld ytemp = (mu + k) * xi2 * y1 - ymu;
    ymu = y1;
    y1 = ytemp;
  }
  return {static_cast<double>(j_nu), static_cast<double>(ymu)};
}

// Hankel's asymptotic expansion for x large compared with nu^2. The phase is
// split so that cos and sin see the exact argument x.
double hankel_j(double nu, double x) {
  const double mu = 4.0 * nu * nu;
  double p = 1.0;
  double q = 0.0;
  double term = 1.0;
  double prev = std::numeric_limits<double>::infinity();
  for (int k = 1; k < 200; ++k) {
    const double odd = 2.0 * k - 1.0;
    term *= (mu - odd * odd) / (8.0 * k * x);
    const double mag = std::fabs(term);
    if (k > nu && mag > prev) break;
    const double signed_term = ((k / 2) % 2 == 0) ? term : -term;
    if (k % 2 == 0) {
      p += signed_term;
    } else {
      q += signed_term;
    }
    if (mag < 1e-18 * std::fabs(p)) break;
    prev = mag;
  }
  const double phase = (0.5 * nu + 0.25) * kPi;
  const double c = std::cos(x) * std::cos(phase) + std::sin(x) * std::sin(phase);
  const double s = std::sin(x) * std::cos(phase) - std::cos(x) * std::sin(phase);
  return std::sqrt(2.0 / (kPi * x)) * (p * c - q * s);
}

bool use_series(double nu, double x) { return x < 2.0 || 0.25 * x * x <= nu + 1.0; }

bool use_hankel(double nu, double x) { return x >= 25.0 && x >= nu * nu; }

double checked(double value) {
  if (!std::isfinite(value)) throw std::range_error("bessel: result not representable");
  return value;
}

void require_positive_argument(double x) {
  if (!(x > 0.0) || !std::isfinite(x)) {
    throw std::domain_error("bessel: argument must be finite and > 0, got " + std::to_string(x));
  }
}

int parity_sign(int zeros_passed) { return (zeros_passed % 2 == 0) ? 1 : -1; }

int sign_of(double v) { return v > 0.0 ? 1 : (v < 0.0 ? -1 : 0); }

// Walks forward from `floor` until f changes sign, then polishes with Brent.
// `expected_sign` is the sign f must have just past the previous zero.
template <typename F>
double next_root(F&& f, double floor, int expected_sign) {
  double lo = floor;
  double flo = f(lo);
  if (flo == 0.0) return lo;
  if (sign_of(flo) != expected_sign) {
    throw std::logic_error("bessel: bracket floor lies beyond the requested zero");
  }
  for (int step = 0; step < 1000000; ++step) {
    const double hi = lo + kScanStep;
    const double fhi = f(hi);
    if (fhi == 0.0) return hi;
    if (sign_of(fhi) != sign_of(flo)) {
      const double xtol = 1e-15 * std::max(1.0, hi);
      return detail::brent_root(f, lo, hi, flo, fhi, xtol);
    }
    lo = hi;
    flo = fhi;
  }
  throw std::range_error("bessel: zero search did not terminate");
}

// Picks the highest admissible floor. Candidate floors that overshoot the
// wanted zero are detected by the sign pattern of f and discarded.
template <typename F>
double choose_floor(F&& f, double safe_floor, double candidate, int expected_sign) {
  if (candidate > safe_floor) {
    const double fc = f(candidate);
    if (sign_of(fc) == expected_sign) return candidate;
  }
  return safe_floor;
}

template <typename F>
std::vector<double> zeros_sequential(F&& f, double start, int count,
                                     double (*paper_floor)(double, int), double nu) {
  std::vector<double> roots;
  roots.reserve(static_cast<std::size_t>(count));
  double prev = start;
  for (int n = 1; n <= count; ++n) {
    const int expected = parity_sign(n - 1);
    const double safe = (n == 1) ? start : prev + 1e-9 * std::max(1.0, prev);
    const double floor = choose_floor(f, safe, paper_floor(nu, n), expected);
    const double root = next_root(f, floor, expected);
    roots.push_back(root);
    prev = root;
  }
  return roots;
}

double bound_zero(double nu, int n) {
  const double t = (n - 0.25) * kPi;
  return std::sqrt(t * t + nu * nu);
}

double bound_zero_prime(double nu, int n) {
  return nu + airy_constant(ZeroIndex{n}) * std::cbrt(nu);
}

// Verifies a McMahon bracket for large n. Returns NaN if the bracket is not
// trustworthy so the caller can fall back to sequential enumeration.
template <typename F>
double mcmahon_polish(F&& f, double estimate, int n) {
  const double lo = estimate - 0.5;
  const double hi = estimate + 0.5;
  const double flo = f(lo);
  const double fhi = f(hi);
  if (sign_of(flo) != parity_sign(n - 1) || sign_of(fhi) != parity_sign(n)) {
    return std::numeric_limits<double>::quiet_NaN();
  }
  return detail::brent_root(f, lo, hi, flo, fhi, 1e-15 * hi);
}

bool mcmahon_regime(double nu, int n) { return n > 2.0 * nu + 40.0; }

}  // namespace

Order::Order(double nu) : nu_(nu) {
  if (!std::isfinite(nu) || nu < 0.0) {
    throw std::domain_error("bessel: order must be finite and >= 0, got " + std::to_string(nu));
  }
}

ZeroIndex::ZeroIndex(int n) : n_(n) {
  if (n < 1) throw std::domain_error("bessel: zero index must be >= 1, got " + std::to_string(n));
}

double j(Order order, double x) {
  require_positive_argument(x);
  const double nu = order.value();
  if (use_series(nu, x)) return checked(series_j(nu, x));
  if (use_hankel(nu, x)) return checked(hankel_j(nu, x));
  return checked(steed_jy(nu, x).j);
}

double j_prime(Order order, double x) {
  require_positive_argument(x);
  const double nu = order.value();
  return checked(nu / x * j(order, x) - j(Order{nu + 1.0}, x));
}

namespace detail {

double j_real_order(double nu, double x) {
  require_positive_argument(x);
  if (nu >= 0.0) return j(Order{nu}, x);
  if (nu == std::floor(nu)) {
    throw std::domain_error("bessel: negative integer orders are not supported");
  }
  if (x < 2.0) return checked(series_j(nu, x));
  const double mu = -nu;
  const JY jy = steed_jy(mu, x);
  return checked(std::cos(mu * kPi) * jy.j - std::sin(mu * kPi) * jy.y);
}

}  // namespace detail

std::vector<double> zeros_j(Order order, int count) {
  if (count < 0) throw std::domain_error("bessel: negative zero count");
  const double nu = order.value();
  auto f = [nu](double x) { return j(Order{nu}, x); };
  // J_nu has no zeros in (0, nu].
  const double start = std::max(nu, 1e-3);
  return zeros_sequential(f, start, count, &bound_zero, nu);
}

std::vector<double> zeros_j_prime(Order order, int count) {
  if (count < 0) throw std::domain_error("bessel: negative zero count");
  const double nu = order.value();
  if (nu == 0.0) {
    throw std::domain_error("bessel: zeros of J'_0 are not indexed (ambiguous zero at the origin)");
  }
  auto f = [nu](double x) { return j_prime(Order{nu}, x); };
  // J'_nu has no zeros in (0, nu] for nu > 0; start strictly inside.
  const double start = 0.999 * nu;
  return zeros_sequential(f, start, count, &bound_zero_prime, nu);
}

double zero_j(Order order, ZeroIndex index) {
  const int n = index.value();
  if (mcmahon_regime(order.value(), n)) {
    const double nu = order.value();
    const double root = mcmahon_polish([nu](double x) { return j(Order{nu}, x); },
                                       mcmahon_zero(order, index), n);
    if (std::isfinite(root)) return root;
  }
  return zeros_j(order, n).back();
}

double zero_j_prime(Order order, ZeroIndex index) {
  const int n = index.value();
  if (order.value() == 0.0) {
    throw std::domain_error("bessel: zeros of J'_0 are not indexed (ambiguous zero at the origin)");
  }
  if (mcmahon_regime(order.value(), n)) {
    const double nu = order.value();
    const double root = mcmahon_polish([nu](double x) { return j_prime(Order{nu}, x); },
                                       mcmahon_zero_prime(order, index), n);
    if (std::isfinite(root)) return root;
  }
  return zeros_j_prime(order, n).back();
}

double airy_root(ZeroIndex index) {
  auto f = [](double x) {
    const double zeta = (2.0 / 3.0) * x * std::sqrt(x);
    return detail::j_real_order(2.0 / 3.0, zeta) - detail::j_real_order(-2.0 / 3.0, zeta);
  };
  // f -> -inf as x -> 0+; roots are separated by more than 1.
  constexpr double step = 0.05;
  int found = 0;
  double lo = 0.05;
  double flo = f(lo);
  for (int k = 0; k < 1000000; ++k) {
    const double hi = lo + step;
    const double fhi = f(hi);
    if (sign_of(fhi) != sign_of(flo)) {
      if (++found == index.value()) {
        return detail::brent_root(f, lo, hi, flo, fhi, 1e-15 * hi);
      }
    }
    lo = hi;
    flo = fhi;
  }
  throw std::range_error("bessel: Airy root search did not terminate");
}

double airy_constant(ZeroIndex index) { return std::cbrt(0.5) * airy_root(index); }

double lower_bound_zero(Order order, ZeroIndex index) {
  return bound_zero(order.value(), index.value());
}

double lower_bound_zero_prime(Order order, ZeroIndex index) {
  return bound_zero_prime(order.value(), index.value());
}

double mcmahon_zero(Order order, ZeroIndex index) {
  const double mu = 4.0 * order.value() * order.value();
  const double beta = (index.value() + 0.5 * order.value() - 0.25) * kPi;
  const double e = 8.0 * beta;
  const double e3 = e * e * e;
  return beta - (mu - 1.0) / e - 4.0 * (mu - 1.0) * (7.0 * mu - 31.0) / (3.0 * e3) -
         32.0 * (mu - 1.0) * (83.0 * mu * mu - 982.0 * mu + 3779.0) / (15.0 * e3 * e * e);
}

double mcmahon_zero_prime(Order order, ZeroIndex index) {
  const double mu = 4.0 * order.value() * order.value();
  const double beta = (index.value() + 0.5 * order.value() - 0.75) * kPi;
  const double e = 8.0 * beta;
  const double e3 = e * e * e;
  return beta - (mu + 3.0) / e - 4.0 * (7.0 * mu * mu + 82.0 * mu - 9.0) / (3.0 * e3) -
         32.0 * (83.0 * mu * mu * mu + 2075.0 * mu * mu - 3039.0 * mu + 3537.0) /
             (15.0 * e3 * e * e);
}

}  // namespace abguide::bessel
