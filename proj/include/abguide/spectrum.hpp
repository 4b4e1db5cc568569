#pragma once

// Per-mode finite-element solves, mode merging, truncation and mesh
// convergence control, bracket validation and parameter sweeps.

#include <Eigen/Core>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "abguide/analytic.hpp"
#include "abguide/eigensolver.hpp"
#include "abguide/mesh.hpp"

namespace abguide::spectrum {

struct Settings {
  /// Base mesh; `axis_order` is filled in per mode, `level` is ignored.
  mesh::MeshOptions mesh;
  /// Mesh levels solved, coarsest included. Level l doubles the base cell
  /// counts l times.
  int levels = 3;
  /// Eigenvalues are reported below (1 - delta) (pi/d)^2.
  double delta = 0.02;
  /// Relative change allowed under r_max -> truncation_factor * r_max.
  double stability_tol = 1e-4;
  double truncation_factor = 1.5;
  bool check_truncation = true;
  /// Absolute slack of the bracket test.
  double bracket_tol = 0.01;
  eigs::EigsOptions eigs;
  /// Worker threads for independent solves; 0 picks the hardware count.
  int jobs = 1;
};

/// Throws std::invalid_argument for out-of-range settings.
void validate(const Settings& settings);

struct LevelValues {
  int level = 0;
  double h = 0.0;
  int dofs = 0;
  std::vector<double> values;
};

struct ModeSolution {
  int m = 0;
  double nu = 0.0;
  double cutoff = 0.0;
  std::vector<LevelValues> levels;
  /// Finest level, ascending.
  std::vector<double> values;
  std::vector<double> residuals;
  /// Richardson limit and observed order per eigenvalue; the order is NaN
  /// (and 2 is assumed) when fewer than three levels carry the value.
  std::vector<double> extrapolated;
  std::vector<double> order;
  /// Relative change under the enlarged truncation; NaN when unchecked.
  std::vector<double> truncation_change;
  std::vector<bool> stable;
  /// Inertia count at the cutoff on the finest level.
  int inertia = 0;
  /// Finest mesh and the eigenfunctions as nodal values on it.
  std::shared_ptr<const mesh::Mesh> mesh;
  std::vector<Eigen::VectorXd> fields;
};

/// One mode of the window problem, cutoff (1 - delta) (pi/d)^2.
ModeSolution solve_mode(const Geometry& geometry, double alpha, int m, const Settings& settings);

/// Closed cylinder r < radius with Neumann floor and Dirichlet wall, cutoff
/// given. No truncation check (the domain is bounded).
ModeSolution solve_cylinder(double radius, double d, double nu, double cutoff,
                            const Settings& settings);

struct Eigenvalue {
  double value = 0.0;
  double extrapolated = 0.0;
  int m = 0;
  double nu = 0.0;
  int index = 0;  // position within its mode
};

struct Diagnostic {
  std::string code;
  std::string message;
};

struct SpectrumResult {
  Geometry geometry;
  double alpha = 0.0;
  std::vector<int> modes;
  double essential = 0.0;
  double lower = 0.0;
  double cutoff = 0.0;
  std::vector<ModeSolution> solutions;  // in the order of `modes`
  /// Stable eigenvalues below the cutoff, by value then mode.
  std::vector<Eigenvalue> discrete;
  /// brackets[k-1] encloses the k-th merged eigenvalue.
  std::vector<analytic::Interval> brackets;
  analytic::Regime regime = analytic::Regime::Indeterminate;
  std::vector<Diagnostic> diagnostics;

  bool has_violation() const { return !diagnostics.empty(); }
};

/// Modes -2 ... 3.
std::vector<int> default_modes();

SpectrumResult solve_full(const Geometry& geometry, double alpha, std::span<const int> modes,
                          const Settings& settings);

enum class SweepKind { Radius, Flux };

std::string_view to_string(SweepKind kind);

struct SweepSample {
  double parameter = 0.0;
  /// Merged discrete eigenvalues; empty for flux samples without a solve.
  std::vector<double> values;
  bool solved = false;
  analytic::Regime regime = analytic::Regime::Indeterminate;
  double a0_sharp = 0.0;
  double a1_sharp = 0.0;
  double a0_conservative = 0.0;
  double a1_conservative = 0.0;
};

struct SweepCurve {
  SweepKind kind = SweepKind::Radius;
  std::string parameter;  // "a" or "alpha"
  std::vector<SweepSample> samples;
  /// Radius sweeps: first a where the discrete spectrum becomes nonempty,
  /// refined by bisection.
  std::optional<double> emergence;
};

struct SweepRequest {
  SweepKind kind = SweepKind::Radius;
  double min = 0.0;
  double max = 1.0;
  int steps = 2;
  /// Slab width, window radius (flux sweeps) and truncation margin
  /// r_max - a, kept fixed as a varies.
  Geometry geometry;
  double alpha = 0.5;  // radius sweeps
  std::vector<int> modes = default_modes();
  Settings settings;
  analytic::OrderRule rule = analytic::OrderRule::NearestInteger;
  /// Flux sweeps: run the solver at every `spot_every`-th sample (0 = never).
  int spot_every = 0;
  /// Radius sweeps: bisection tolerance as a fraction of d.
  double emergence_tol = 1e-3;
};

/// `steps` equally spaced points over [min, max]; integer flux values are
/// skipped. Throws std::invalid_argument if steps < 2 or max <= min.
SweepCurve sweep(const SweepRequest& request);

struct ConvergenceReport {
  Geometry geometry;
  double alpha = 0.0;
  int m = 0;
  double nu = 0.0;
  /// Eigenvalues vs mesh level.
  std::vector<LevelValues> by_level;
  /// orders[t][k]: observed order of eigenvalue k from levels t, t+1, t+2.
  std::vector<std::vector<double>> orders;
  std::vector<double> extrapolated;
  /// Eigenvalues vs truncation radius, finest level.
  std::vector<double> r_max;
  std::vector<std::vector<double>> by_r_max;
  bool r_max_monotone = true;
};

/// Requires settings.levels >= 3. `r_max_list` may be empty.
ConvergenceReport convergence_study(const Geometry& geometry, double alpha, int m,
                                    std::span<const double> r_max_list, const Settings& settings);

/// Same tables for the closed cylinder; `by_r_max` stays empty.
ConvergenceReport cylinder_convergence(double radius, double d, double nu, double cutoff,
                                       const Settings& settings);

/// log2((l0 - l1) / (l1 - l2)); NaN when the differences do not shrink
/// monotonically.
double observed_order(double l0, double l1, double l2);

/// l_fine - (l_coarse - l_fine) / (2^p - 1).
double richardson(double coarse, double fine, double p);

}  // namespace abguide::spectrum
