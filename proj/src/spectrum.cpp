#include "abguide/spectrum.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <functional>
#include <limits>
#include <stdexcept>
#include <thread>
#include <utility>

#include "abguide/fem.hpp"

namespace abguide::spectrum {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
// Solves on different truncations use different far-field meshes, so the
// discrete Dirichlet monotonicity only holds up to solver noise.
constexpr double kMonotoneSlack = 1e-9;

eigs::EigsOptions eigs_options(const Settings& s, double lower) {
  eigs::EigsOptions o = s.eigs;
  // Every eigenvalue of the truncated problem lies above (pi/2d)^2, so this
  // shift keeps A - shift M positive definite.
  if (!o.shift) o.shift = 0.9 * lower;
  return o;
}

mesh::MeshOptions mesh_options(const Settings& s, double nu, int level) {
  mesh::MeshOptions o = s.mesh;
  o.axis_order = nu;
  o.level = level;
  return o;
}

struct LevelSolve {
  mesh::Mesh mesh;
  fem::System system;
  std::vector<eigs::EigenPair> pairs;
};

LevelSolve solve_on(mesh::Mesh mesh, double nu, double cutoff, const eigs::EigsOptions& o) {
  fem::System sys = fem::assemble(mesh, nu);
  auto pairs = eigs::eigs_below(sys.A, sys.M, cutoff, o);
  return {std::move(mesh), std::move(sys), std::move(pairs)};
}

std::vector<double> values_of(const std::vector<eigs::EigenPair>& pairs) {
  std::vector<double> v;
  v.reserve(pairs.size());
  for (const auto& p : pairs) v.push_back(p.value);
  return v;
}

// Runs fn(i) for i in [0, n) on up to `jobs` threads. Exceptions are
// rethrown after all workers finish, lowest index first.
void parallel_for(int n, int jobs, const std::function<void(int)>& fn) {
  if (jobs <= 0) jobs = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  jobs = std::min(jobs, n);
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(n));
  auto guarded = [&](int i) {
    try {
      fn(i);
    } catch (...) {
      errors[static_cast<std::size_t>(i)] = std::current_exception();
    }
  };
  if (jobs <= 1) {
    for (int i = 0; i < n; ++i) guarded(i);
  } else {
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    for (int t = 0; t < jobs; ++t) {
      pool.emplace_back([&] {
        for (int i = next++; i < n; i = next++) guarded(i);
      });
    }
    for (auto& th : pool) th.join();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

template <class MeshAt>
ModeSolution solve_levels(MeshAt mesh_at, int m, double nu, double cutoff, double lower,
                          const Settings& s) {
  const auto opts = eigs_options(s, lower);
  ModeSolution out;
  out.m = m;
  out.nu = nu;
  out.cutoff = cutoff;
  for (int l = 0; l < s.levels; ++l) {
    LevelSolve ls = solve_on(mesh_at(l), nu, cutoff, opts);
    out.levels.push_back({l, ls.mesh.h, ls.system.dofs.free_count(), values_of(ls.pairs)});
    if (l + 1 < s.levels) continue;

    out.inertia = eigs::inertia_count(ls.system.A, ls.system.M, cutoff);
    out.values = out.levels.back().values;
    for (const auto& p : ls.pairs) {
      out.residuals.push_back(p.residual);
      out.fields.push_back(fem::expand(ls.system.dofs, p.vector));
    }
    out.mesh = std::make_shared<const mesh::Mesh>(std::move(ls.mesh));
  }

  const std::size_t count = out.values.size();
  const std::size_t L = out.levels.size();
  out.extrapolated.assign(count, kNaN);
  out.order.assign(count, kNaN);
  for (std::size_t k = 0; k < count; ++k) {
    auto at = [&](std::size_t level) { return out.levels[level].values[k]; };
    auto has = [&](std::size_t level) { return out.levels[level].values.size() > k; };
    double p = 2.0;
    if (L >= 3 && has(L - 3) && has(L - 2)) {
      out.order[k] = observed_order(at(L - 3), at(L - 2), at(L - 1));
      if (std::isfinite(out.order[k])) p = out.order[k];
    }
    out.extrapolated[k] = (L >= 2 && has(L - 2)) ? richardson(at(L - 2), at(L - 1), p) : at(L - 1);
  }
  out.truncation_change.assign(count, kNaN);
  out.stable.assign(count, true);
  return out;
}

std::vector<double> linspace(double lo, double hi, int steps) {
  std::vector<double> x(static_cast<std::size_t>(steps));
  for (int i = 0; i < steps; ++i) {
    x[static_cast<std::size_t>(i)] = i + 1 == steps ? hi : lo + (hi - lo) * i / (steps - 1);
  }
  return x;
}

void check_alpha_modes(double alpha, std::span<const int> modes) {
  require_nonintegral_flux(alpha);
  if (modes.empty()) throw std::invalid_argument("spectrum: mode range is empty");
}

}  // namespace

void validate(const Settings& s) {
  if (!(s.mesh.h > 0.0)) throw std::invalid_argument("settings: h must be > 0");
  if (!(s.mesh.grading >= 1.0)) throw std::invalid_argument("settings: grading must be >= 1");
  if (s.levels < 1 || s.levels > 8) throw std::invalid_argument("settings: levels must be in [1, 8]");
  if (!(s.delta > 0.0 && s.delta < 1.0)) throw std::invalid_argument("settings: delta must be in (0, 1)");
  if (!(s.stability_tol > 0.0)) throw std::invalid_argument("settings: stability tolerance must be > 0");
  if (!(s.truncation_factor > 1.0)) throw std::invalid_argument("settings: truncation factor must be > 1");
  if (!(s.bracket_tol >= 0.0)) throw std::invalid_argument("settings: bracket tolerance must be >= 0");
  if (!(s.eigs.tol > 0.0 && s.eigs.tol < 1e-2)) throw std::invalid_argument("settings: tol must be in (0, 1e-2)");
  if (s.eigs.block < 1) throw std::invalid_argument("settings: block size must be >= 1");
  if (s.jobs < 0) throw std::invalid_argument("settings: jobs must be >= 0");
}

double observed_order(double l0, double l1, double l2) {
  const double e1 = l0 - l1;
  const double e2 = l1 - l2;
  if (!(e1 * e2 > 0.0) || std::fabs(e2) >= std::fabs(e1)) return kNaN;
  return std::log2(e1 / e2);
}

double richardson(double coarse, double fine, double p) {
  return fine - (coarse - fine) / (std::exp2(p) - 1.0);
}

ModeSolution solve_mode(const Geometry& g, double alpha, int m, const Settings& s) {
  validate(g);
  validate(s);
  const FluxMode mode(alpha, m);
  const double cutoff = (1.0 - s.delta) * analytic::essential_threshold(g);
  const double lower = analytic::lower_threshold(g);
  auto mesh_at = [&](const Geometry& geo) {
    return [&s, &mode, geo](int level) {
      return mesh::build_mesh(geo, mesh_options(s, mode.nu(), level));
    };
  };
  ModeSolution out = solve_levels(mesh_at(g), m, mode.nu(), cutoff, lower, s);
  if (!s.check_truncation || out.values.empty()) return out;

  Geometry wide = g;
  wide.r_max = g.r_max * s.truncation_factor;
  const auto wider = solve_on(mesh_at(wide)(s.levels - 1), mode.nu(), cutoff, eigs_options(s, lower));
  for (std::size_t k = 0; k < out.values.size(); ++k) {
    if (k < wider.pairs.size()) {
      out.truncation_change[k] = std::fabs(out.values[k] - wider.pairs[k].value) / out.values[k];
    }
    out.stable[k] = out.truncation_change[k] <= s.stability_tol;
  }
  return out;
}

ModeSolution solve_cylinder(double radius, double d, double nu, double cutoff, const Settings& s) {
  validate(s);
  if (!(nu > 0.0)) throw std::invalid_argument("solve_cylinder: nu must be > 0");
  if (!(cutoff > 0.0)) throw std::invalid_argument("solve_cylinder: cutoff must be > 0");
  const double lower = analytic::lower_threshold(Geometry{d, radius, 2.0 * radius});
  auto mesh_at = [&](int level) { return mesh::build_cylinder_mesh(radius, d, mesh_options(s, nu, level)); };
  return solve_levels(mesh_at, 0, nu, cutoff, lower, s);
}

std::vector<int> default_modes() { return {-2, -1, 0, 1, 2, 3}; }

SpectrumResult solve_full(const Geometry& g, double alpha, std::span<const int> modes,
                          const Settings& s) {
  validate(g);
  validate(s);
  check_alpha_modes(alpha, modes);

  SpectrumResult r;
  r.geometry = g;
  r.alpha = alpha;
  r.modes.assign(modes.begin(), modes.end());
  r.essential = analytic::essential_threshold(g);
  r.lower = analytic::lower_threshold(g);
  r.cutoff = (1.0 - s.delta) * r.essential;
  r.solutions.resize(modes.size());

  // Each worker owns its slot; the merge below fixes the order.
  Settings inner = s;
  inner.jobs = 1;
  parallel_for(static_cast<int>(modes.size()), s.jobs, [&](int i) {
    r.solutions[static_cast<std::size_t>(i)] = solve_mode(g, alpha, modes[static_cast<std::size_t>(i)], inner);
  });

  for (const auto& sol : r.solutions) {
    if (sol.inertia != static_cast<int>(sol.values.size())) {
      r.diagnostics.push_back({"inertia-mismatch", "mode " + std::to_string(sol.m) + ": inertia " +
                                                       std::to_string(sol.inertia) + " vs " +
                                                       std::to_string(sol.values.size()) + " eigenpairs"});
    }
    for (std::size_t k = 0; k < sol.values.size(); ++k) {
      if (!sol.stable[k]) continue;
      r.discrete.push_back({sol.values[k], sol.extrapolated[k], sol.m, sol.nu, static_cast<int>(k)});
    }
  }
  std::stable_sort(r.discrete.begin(), r.discrete.end(), [](const Eigenvalue& x, const Eigenvalue& y) {
    return x.value != y.value ? x.value < y.value : x.m < y.m;
  });

  if (g.a == 0.0) {
    r.regime = analytic::Regime::NoDiscreteSpectrum;
    return r;
  }
  r.regime = analytic::classify(g, alpha);

  const double tol = s.bracket_tol;
  for (std::size_t k = 0; k < r.discrete.size(); ++k) {
    const auto b = analytic::bracket(static_cast<int>(k) + 1, g, alpha, modes);
    r.brackets.push_back(b);
    const double v = r.discrete[k].value;
    if (v < b.lower - tol) {
      r.diagnostics.push_back({"bracket-lower", "lambda_" + std::to_string(k + 1) + " = " +
                                                    std::to_string(v) + " below " +
                                                    std::to_string(b.lower)});
    }
    if (b.upper < r.essential && v > b.upper + tol) {
      r.diagnostics.push_back({"bracket-upper", "lambda_" + std::to_string(k + 1) + " = " +
                                                    std::to_string(v) + " above " +
                                                    std::to_string(b.upper)});
    }
  }
  // An interior Dirichlet value below the cutoff forces one more eigenvalue.
  const auto next = analytic::bracket(static_cast<int>(r.discrete.size()) + 1, g, alpha, modes);
  if (next.upper < r.cutoff - tol) {
    r.diagnostics.push_back({"bracket-count", "expected an eigenvalue below " + std::to_string(next.upper) +
                                                  ", found " + std::to_string(r.discrete.size())});
  }
  return r;
}

std::string_view to_string(SweepKind kind) { return kind == SweepKind::Radius ? "radius" : "flux"; }

SweepCurve sweep(const SweepRequest& q) {
  if (q.steps < 2) throw std::invalid_argument("sweep: steps must be >= 2");
  if (!(q.max > q.min)) throw std::invalid_argument("sweep: range must satisfy max > min");
  validate(q.settings);
  SweepCurve curve;
  curve.kind = q.kind;

  if (q.kind == SweepKind::Flux) {
    curve.parameter = "alpha";
    int index = 0;
    for (const double alpha : linspace(q.min, q.max, q.steps)) {
      if (alpha == std::round(alpha)) continue;
      SweepSample s;
      s.parameter = alpha;
      using analytic::RadiusVariant;
      s.a0_sharp = analytic::critical_radius_a0(alpha, RadiusVariant::Sharp, q.rule);
      s.a1_sharp = analytic::critical_radius_a1(alpha, RadiusVariant::Sharp, q.rule);
      s.a0_conservative = analytic::critical_radius_a0(alpha, RadiusVariant::Conservative, q.rule);
      s.a1_conservative = analytic::critical_radius_a1(alpha, RadiusVariant::Conservative, q.rule);
      if (q.geometry.a > 0.0) s.regime = analytic::classify(q.geometry, alpha);
      if (q.spot_every > 0 && index % q.spot_every == 0) {
        for (const auto& e : solve_full(q.geometry, alpha, q.modes, q.settings).discrete) {
          s.values.push_back(e.value);
        }
        s.solved = true;
      }
      ++index;
      curve.samples.push_back(std::move(s));
    }
    return curve;
  }

  curve.parameter = "a";
  require_nonintegral_flux(q.alpha);
  if (!(q.min >= 0.0)) throw std::invalid_argument("sweep: radius range must be >= 0");
  const double d = q.geometry.d;
  const double margin = q.geometry.r_max - q.geometry.a;
  if (!(d > 0.0) || !(margin > 0.0)) throw std::invalid_argument("sweep: need d > 0 and r_max > a");
  auto geometry_at = [&](double a) { return Geometry{d, a, a + margin}; };
  auto count_at = [&](double a) {
    return solve_full(geometry_at(a), q.alpha, q.modes, q.settings).discrete.size();
  };

  using analytic::RadiusVariant;
  const double a0 = analytic::critical_radius_a0(q.alpha, RadiusVariant::Sharp, q.rule);
  const double a1 = analytic::critical_radius_a1(q.alpha, RadiusVariant::Sharp, q.rule);
  const double a0c = analytic::critical_radius_a0(q.alpha, RadiusVariant::Conservative, q.rule);
  const double a1c = analytic::critical_radius_a1(q.alpha, RadiusVariant::Conservative, q.rule);
  for (const double a : linspace(q.min, q.max, q.steps)) {
    SweepSample s;
    s.parameter = a;
    const auto res = solve_full(geometry_at(a), q.alpha, q.modes, q.settings);
    for (const auto& e : res.discrete) s.values.push_back(e.value);
    s.solved = true;
    s.regime = res.regime;
    s.a0_sharp = a0;
    s.a1_sharp = a1;
    s.a0_conservative = a0c;
    s.a1_conservative = a1c;
    curve.samples.push_back(std::move(s));
  }

  for (std::size_t i = 1; i < curve.samples.size(); ++i) {
    if (!curve.samples[i - 1].values.empty() || curve.samples[i].values.empty()) continue;
    double lo = curve.samples[i - 1].parameter;
    double hi = curve.samples[i].parameter;
    while (hi - lo > q.emergence_tol * d) {
      const double mid = 0.5 * (lo + hi);
      (count_at(mid) > 0 ? hi : lo) = mid;
    }
    curve.emergence = 0.5 * (lo + hi);
    break;
  }
  return curve;
}

namespace {

ConvergenceReport report_from(const ModeSolution& sol) {
  ConvergenceReport rep;
  rep.m = sol.m;
  rep.nu = sol.nu;
  rep.by_level = sol.levels;
  rep.extrapolated = sol.extrapolated;
  for (std::size_t t = 0; t + 2 < sol.levels.size(); ++t) {
    const auto& a = sol.levels[t].values;
    const auto& b = sol.levels[t + 1].values;
    const auto& c = sol.levels[t + 2].values;
    std::vector<double> row;
    for (std::size_t k = 0; k < std::min({a.size(), b.size(), c.size()}); ++k) {
      row.push_back(observed_order(a[k], b[k], c[k]));
    }
    rep.orders.push_back(std::move(row));
  }
  return rep;
}

}  // namespace

ConvergenceReport convergence_study(const Geometry& g, double alpha, int m,
                                    std::span<const double> r_max_list, const Settings& s) {
  if (s.levels < 3) throw std::invalid_argument("convergence_study: levels must be >= 3");
  Settings base = s;
  base.check_truncation = false;
  ConvergenceReport rep = report_from(solve_mode(g, alpha, m, base));
  rep.geometry = g;
  rep.alpha = alpha;

  std::vector<double> radii(r_max_list.begin(), r_max_list.end());
  std::sort(radii.begin(), radii.end());
  rep.r_max = radii;
  rep.by_r_max.resize(radii.size());
  parallel_for(static_cast<int>(radii.size()), s.jobs, [&](int i) {
    Geometry gi = g;
    gi.r_max = radii[static_cast<std::size_t>(i)];
    const FluxMode mode(alpha, m);
    const double cutoff = (1.0 - s.delta) * analytic::essential_threshold(gi);
    const auto ls = solve_on(mesh::build_mesh(gi, mesh_options(s, mode.nu(), s.levels - 1)), mode.nu(),
                             cutoff, eigs_options(s, analytic::lower_threshold(gi)));
    rep.by_r_max[static_cast<std::size_t>(i)] = values_of(ls.pairs);
  });
  for (std::size_t i = 1; i < radii.size(); ++i) {
    const auto& prev = rep.by_r_max[i - 1];
    const auto& cur = rep.by_r_max[i];
    if (cur.size() < prev.size()) rep.r_max_monotone = false;
    for (std::size_t k = 0; k < std::min(prev.size(), cur.size()); ++k) {
      if (cur[k] > prev[k] * (1.0 + kMonotoneSlack)) rep.r_max_monotone = false;
    }
  }
  return rep;
}

ConvergenceReport cylinder_convergence(double radius, double d, double nu, double cutoff,
                                       const Settings& s) {
  if (s.levels < 3) throw std::invalid_argument("cylinder_convergence: levels must be >= 3");
  ConvergenceReport rep = report_from(solve_cylinder(radius, d, nu, cutoff, s));
  rep.geometry = Geometry{d, radius, radius};
  rep.m = 0;
  return rep;
}

}  // namespace abguide::spectrum
