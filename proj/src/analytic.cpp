#include "abguide/analytic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <queue>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>

#include "abguide/bessel.hpp"

namespace abguide {

namespace {

constexpr double kPi = std::numbers::pi;
const double kSqrt3 = std::sqrt(3.0);

}  // namespace

Geometry Geometry::with_default_truncation(double d, double a) { return {d, a, a + 6.0 * d}; }

void validate(const Geometry& g) {
  if (!(g.d > 0.0) || !std::isfinite(g.d)) {
    throw std::invalid_argument("geometry: slab width d must be > 0");
  }
  if (!(g.a >= 0.0) || !std::isfinite(g.a)) {
    throw std::invalid_argument("geometry: window radius a must be >= 0");
  }
  if (!(g.r_max > g.a) || !std::isfinite(g.r_max)) {
    throw std::invalid_argument("geometry: truncation radius must exceed the window radius");
  }
}

void require_nonintegral_flux(double alpha) {
  if (!std::isfinite(alpha) || alpha == std::round(alpha)) {
    throw std::domain_error("flux: alpha must be finite and not an integer, got " +
                            std::to_string(alpha));
  }
}

double nearest_order(double alpha) { return std::fabs(alpha - std::round(alpha)); }

FluxMode::FluxMode(double alpha, int m) : alpha_(alpha), m_(m), nu_(std::fabs(m - alpha)) {
  require_nonintegral_flux(alpha);
}

namespace analytic {

namespace {

double axial_term(const Geometry& g, int j) {
  const double kz = (2.0 * j + 1.0) * kPi / (2.0 * g.d);
  return kz * kz;
}

double order_for(double alpha, OrderRule rule) {
  require_nonintegral_flux(alpha);
  return rule == OrderRule::Literal ? std::fabs(alpha) : nearest_order(alpha);
}

// Zeros are needed lazily while walking the (j, n) lattice; fetch in chunks.
class ZeroTable {
 public:
  ZeroTable(double nu, Wall side) : nu_(nu), side_(side) {}

  double at(int n) {
    if (n > static_cast<int>(zeros_.size())) {
      const int want = std::max(n, 2 * static_cast<int>(zeros_.size()) + 4);
      const bessel::Order order{nu_};
      zeros_ = side_ == Wall::Neumann ? bessel::zeros_j_prime(order, want)
                                      : bessel::zeros_j(order, want);
    }
    return zeros_[static_cast<std::size_t>(n - 1)];
  }

 private:
  double nu_;
  Wall side_;
  std::vector<double> zeros_;
};

}  // namespace

double essential_threshold(const Geometry& g) {
  if (!(g.d > 0.0)) throw std::invalid_argument("geometry: slab width d must be > 0");
  return (kPi / g.d) * (kPi / g.d);
}

double lower_threshold(const Geometry& g) {
  if (!(g.d > 0.0)) throw std::invalid_argument("geometry: slab width d must be > 0");
  const double k = kPi / (2.0 * g.d);
  return k * k;
}

std::vector<InteriorEigenvalue> interior_spectrum(const Geometry& g, const FluxMode& mode,
                                                  Wall side, int count) {
  return interior_spectrum(g, mode.nu(), mode.m(), side, count);
}

std::vector<InteriorEigenvalue> interior_spectrum(const Geometry& g, double nu, int m, Wall side,
                                                  int count) {
  if (!(g.d > 0.0)) throw std::invalid_argument("geometry: slab width d must be > 0");
  if (!(g.a > 0.0)) throw std::domain_error("interior_spectrum: window radius must be > 0");
  if (!(nu > 0.0) || !std::isfinite(nu)) throw std::domain_error("interior_spectrum: nu must be > 0");
  if (count < 1) throw std::invalid_argument("interior_spectrum: count must be >= 1");

  ZeroTable zeros(nu, side);
  auto value = [&](int j, int n) {
    const double x = zeros.at(n) / g.a;
    return x * x + axial_term(g, j);
  };

  // Best-first walk of the lattice. Values increase in both j and n, so each
  // popped entry is the smallest one not yet emitted.
  using Entry = std::pair<double, std::pair<int, int>>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> frontier;
  std::set<std::pair<int, int>> seen;
  frontier.push({value(0, 1), {0, 1}});
  seen.insert({0, 1});

  std::vector<InteriorEigenvalue> out;
  out.reserve(static_cast<std::size_t>(count));
  while (static_cast<int>(out.size()) < count) {
    const auto [val, jn] = frontier.top();
    frontier.pop();
    const auto [j, n] = jn;
    out.push_back({j, n, m, nu, val, side});
    for (const auto& next : {std::pair{j + 1, n}, std::pair{j, n + 1}}) {
      if (seen.insert(next).second) frontier.push({value(next.first, next.second), next});
    }
  }
  return out;
}

double critical_radius_a0(double alpha, RadiusVariant variant, OrderRule rule) {
  const double nu = order_for(alpha, rule);
  const double x = variant == RadiusVariant::Sharp
                       ? bessel::zero_j_prime(bessel::Order{nu}, bessel::ZeroIndex{1})
                       : kConservativeZeroFloor + nu;
  return 2.0 * x / (kSqrt3 * kPi);
}

double critical_radius_a1(double alpha, RadiusVariant variant, OrderRule rule) {
  const double nu = order_for(alpha, rule);
  const double x = variant == RadiusVariant::Sharp
                       ? bessel::zero_j(bessel::Order{nu}, bessel::ZeroIndex{1})
                       : std::sqrt(0.5625 * kPi * kPi + nu * nu);
  return 2.0 * x / (kSqrt3 * kPi);
}

std::string_view to_string(Regime regime) {
  switch (regime) {
    case Regime::NoDiscreteSpectrum:
      return "NoDiscreteSpectrum";
    case Regime::DiscreteSpectrumExists:
      return "DiscreteSpectrumExists";
    case Regime::Indeterminate:
      return "Indeterminate";
  }
  return "Indeterminate";
}

Regime classify(const Geometry& g, double alpha, RadiusVariant variant) {
  if (!(g.d > 0.0) || !(g.a > 0.0)) {
    throw std::invalid_argument("classify: requires a > 0 and d > 0");
  }
  const double ratio = g.a / g.d;
  if (ratio < critical_radius_a0(alpha, variant)) return Regime::NoDiscreteSpectrum;
  if (ratio > critical_radius_a1(alpha, variant)) return Regime::DiscreteSpectrumExists;
  return Regime::Indeterminate;
}

std::vector<int> default_bracket_modes(double alpha) {
  require_nonintegral_flux(alpha);
  std::vector<int> modes;
  const int lo = static_cast<int>(std::floor(alpha)) - 2;
  const int hi = static_cast<int>(std::ceil(alpha)) + 2;
  for (int m = lo; m <= hi; ++m) modes.push_back(m);
  return modes;
}

Interval bracket(int k, const Geometry& g, double alpha, std::span<const int> modes) {
  if (k < 1) throw std::out_of_range("bracket: k must be >= 1");
  if (modes.empty()) throw std::out_of_range("bracket: empty mode range");
  auto kth = [&](Wall side) {
    std::vector<double> values;
    for (const int m : modes) {
      for (const auto& e : interior_spectrum(g, FluxMode{alpha, m}, side, k)) {
        values.push_back(e.value);
      }
    }
    std::nth_element(values.begin(), values.begin() + (k - 1), values.end());
    return values[static_cast<std::size_t>(k - 1)];
  };
  return {kth(Wall::Neumann), kth(Wall::Dirichlet)};
}

}  // namespace analytic
}  // namespace abguide
