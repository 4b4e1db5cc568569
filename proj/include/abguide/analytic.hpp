#pragma once

// Closed-form spectral data of the slab waveguide with a circular Neumann
// window: essential-spectrum thresholds, spectra of the interior cylinder
// r < a under Neumann or Dirichlet conditions on r = a, the critical window
// radii a0(alpha) and a1(alpha), and two-sided eigenvalue brackets.

#include <span>
#include <string_view>
#include <vector>

namespace abguide {

/// Slab width d, window radius a and radial truncation r_max (FEM only).
/// All lengths share one arbitrary unit.
struct Geometry {
  double d = 0.0;
  double a = 0.0;
  double r_max = 0.0;

  /// Default truncation radius a + 6d.
  static Geometry with_default_truncation(double d, double a);
};

/// Throws std::invalid_argument unless d > 0 and 0 <= a < r_max.
void validate(const Geometry& geometry);

/// Flux alpha (flux 2 pi alpha, alpha not an integer) and angular mode m.
class FluxMode {
 public:
  FluxMode(double alpha, int m);

  double alpha() const noexcept { return alpha_; }
  int m() const noexcept { return m_; }
  /// Effective Bessel order |m - alpha| > 0.
  double nu() const noexcept { return nu_; }

 private:
  double alpha_;
  int m_;
  double nu_;
};

/// Throws std::domain_error if alpha is an integer or not finite.
void require_nonintegral_flux(double alpha);

/// dist(alpha, Z) = min over m of |m - alpha|.
double nearest_order(double alpha);

namespace analytic {

enum class Wall { Neumann, Dirichlet };

struct InteriorEigenvalue {
  int j = 0;  // axial index, k_z = (2j+1) pi / (2d)
  int n = 1;  // radial index
  int m = 0;
  double nu = 0.0;
  double value = 0.0;
  Wall side = Wall::Neumann;
};

/// (pi/d)^2, bottom of the essential spectrum.
double essential_threshold(const Geometry& geometry);

/// (pi/(2d))^2, bottom of the spectrum of the fully Neumann-floored slab.
double lower_threshold(const Geometry& geometry);

/// The `count` smallest eigenvalues (x/a)^2 + ((2j+1) pi/(2d))^2 of the
/// interior cylinder for one angular mode, sorted ascending. x runs over the
/// zeros of J'_nu (Neumann wall) or J_nu (Dirichlet wall).
std::vector<InteriorEigenvalue> interior_spectrum(const Geometry& geometry, const FluxMode& mode,
                                                  Wall side, int count);

/// Same for an explicit order nu > 0 (m is copied into the records).
std::vector<InteriorEigenvalue> interior_spectrum(const Geometry& geometry, double nu, int m,
                                                  Wall side, int count);

enum class RadiusVariant {
  Sharp,         // 2 x_{nu,1} / (sqrt(3) pi) from the computed zero
  Conservative,  // 2 c / (sqrt(3) pi) from the closed-form zero floor
};

enum class OrderRule {
  NearestInteger,  // nu = dist(alpha, Z)
  Literal,         // nu = |alpha|, as in the published curves
};

/// Below this value of a/d the operator has no discrete spectrum.
double critical_radius_a0(double alpha, RadiusVariant variant = RadiusVariant::Sharp,
                          OrderRule rule = OrderRule::NearestInteger);

/// Above this value of a/d the operator has discrete spectrum.
double critical_radius_a1(double alpha, RadiusVariant variant = RadiusVariant::Sharp,
                          OrderRule rule = OrderRule::NearestInteger);

/// Floor 0.6538 + nu used by the conservative a0. Since x'_{nu,1} behaves
/// like sqrt(2 nu) as nu -> 0, the floor is above x'_{nu,1} for nu below
/// about 0.47, and there the conservative a0 exceeds the sharp one.
inline constexpr double kConservativeZeroFloor = 0.6538;

enum class Regime { NoDiscreteSpectrum, DiscreteSpectrumExists, Indeterminate };

std::string_view to_string(Regime regime);

Regime classify(const Geometry& geometry, double alpha,
                RadiusVariant variant = RadiusVariant::Sharp);

struct Interval {
  double lower = 0.0;
  double upper = 0.0;
};

/// Modes floor(alpha)-2 ... ceil(alpha)+2.
std::vector<int> default_bracket_modes(double alpha);

/// [lambda_k(interior Neumann), lambda_k(interior Dirichlet)], each the k-th
/// smallest value over the merged interior spectra of `modes`.
Interval bracket(int k, const Geometry& geometry, double alpha, std::span<const int> modes);

}  // namespace analytic
}  // namespace abguide
