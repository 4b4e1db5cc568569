#include "app.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "abguide/analytic.hpp"
#include "abguide/bessel.hpp"
#include "abguide/eigensolver.hpp"
#include "abguide/spectrum.hpp"
#include "output.hpp"

namespace abguide::app {

namespace {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

struct ConfigError : std::invalid_argument {
  ConfigError(std::string field, const std::string& message)
      : std::invalid_argument(message), field(std::move(field)) {}
  std::string field;
};

void fail_line(std::ostream& err, std::string_view kind, std::string_view field, std::string_view message) {
  ordered_json j{{"error", kind}};
  if (!field.empty()) j["field"] = field;
  j["message"] = message;
  err << j.dump() << '\n';
}

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t");
  const auto e = s.find_last_not_of(" \t");
  return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
}

int to_int(const std::string& s) {
  std::size_t used = 0;
  const int v = std::stoi(s, &used);
  if (used != s.size()) throw std::invalid_argument("not an integer: " + s);
  return v;
}

struct Run {
  RunConfig cfg;
  Provenance prov;
  fs::path dir;
  std::set<std::string> formats;
  std::ostream& out;

  bool wants(const std::string& f) const { return formats.count(f) > 0; }

  Geometry geometry() const { return {cfg.d, cfg.a, cfg.rmax.value_or(cfg.a + 6.0 * cfg.d)}; }

  spectrum::Settings settings() const {
    spectrum::Settings s;
    s.mesh.h = cfg.h;
    s.mesh.grading = cfg.grading;
    s.levels = cfg.levels;
    s.delta = cfg.delta;
    s.eigs.tol = cfg.tol;
    s.eigs.seed = cfg.seed;
    s.jobs = cfg.jobs;
    return s;
  }

  analytic::OrderRule rule() const {
    return cfg.rule == "literal" ? analytic::OrderRule::Literal : analytic::OrderRule::NearestInteger;
  }

  ordered_json doc() const {
    ordered_json j;
    j["meta"] = meta_json(prov);
    return j;
  }
};

ordered_json numbers(const std::vector<double>& v) {
  ordered_json j = ordered_json::array();
  for (const double x : v) j.push_back(x);
  return j;
}

std::string joined(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ";" : "") + num(v[i]);
  return s;
}

// ---------------------------------------------------------------- validation

void validate(const RunConfig& c) {
  auto positive = [](const char* field, double v) {
    if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError(field, std::string(field) + " must be > 0");
  };
  const auto& cmd = c.command;
  if (cmd == "zeros") {
    positive("nu", c.nu);
    if (c.n < 1 || c.n > 10000) throw ConfigError("n", "n must be in [1, 10000]");
  }
  if (cmd == "critical" || (cmd == "sweep" && c.kind == "flux")) {
    if (!(c.alpha_max > c.alpha_min)) throw ConfigError("alpha-max", "alpha-max must exceed alpha-min");
    if (c.rule != "nearest" && c.rule != "literal") throw ConfigError("rule", "rule must be nearest or literal");
  }
  if (c.steps && *c.steps < 2) throw ConfigError("steps", "steps must be >= 2");
  if (cmd == "solve" || cmd == "sweep" || cmd == "converge") {
    positive("d", c.d);
    if (!(c.a >= 0.0) || !std::isfinite(c.a)) throw ConfigError("a", "a must be >= 0");
    if (c.rmax && !(*c.rmax > c.a)) throw ConfigError("rmax", "rmax must exceed a");
    if (!(c.h > 0.0) || !(c.h <= std::min(c.d, c.rmax.value_or(c.a + 6.0 * c.d)) / 4.0)) {
      throw ConfigError("h", "h must be in (0, min(d, rmax)/4]");
    }
    if (!(c.grading >= 1.0)) throw ConfigError("grading", "grading must be >= 1");
    if (c.levels < 1 || c.levels > 8) throw ConfigError("levels", "levels must be in [1, 8]");
    if (!(c.tol > 0.0 && c.tol < 1e-2)) throw ConfigError("tol", "tol must be in (0, 1e-2)");
    if (!(c.delta > 0.0 && c.delta < 1.0)) throw ConfigError("delta", "delta must be in (0, 1)");
    if (c.jobs < 0) throw ConfigError("jobs", "jobs must be >= 0");
    try {
      parse_modes(c.modes);
    } catch (const std::exception& e) {
      throw ConfigError("modes", e.what());
    }
    const bool needs_alpha = !(cmd == "sweep" && c.kind == "flux") && !(cmd == "converge" && c.benchmark);
    if (needs_alpha && (!std::isfinite(c.alpha) || c.alpha == std::round(c.alpha))) {
      throw ConfigError("alpha", "alpha must be finite and not an integer");
    }
  }
  if (cmd == "solve") {
    if (c.fields < 0) throw ConfigError("fields", "fields must be >= 0");
  }
  if (cmd == "sweep") {
    if (c.kind != "radius" && c.kind != "flux") throw ConfigError("kind", "kind must be radius or flux");
    if (c.kind == "radius") {
      if (!(c.min >= 0.0) || !(c.max > c.min)) throw ConfigError("max", "radius range needs 0 <= min < max");
      if (c.rmax) throw ConfigError("rmax", "radius sweeps keep rmax - a = 6d; rmax cannot be set");
    }
    if (c.spot_every < 0) throw ConfigError("spot-every", "spot-every must be >= 0");
  }
  if (cmd == "converge") {
    if (c.levels < 3) throw ConfigError("levels", "converge needs levels >= 3");
    if (c.benchmark) {
      positive("nu", c.nu);
      if (!(c.a > 0.0)) throw ConfigError("a", "the cylinder benchmark needs a > 0");
    }
    try {
      for (const double r : parse_list(c.rmax_list)) {
        if (!(r > c.a)) throw std::invalid_argument("each rmax must exceed a");
      }
    } catch (const std::exception& e) {
      throw ConfigError("rmax-list", e.what());
    }
  }
  std::stringstream ss(c.format);
  std::string f;
  while (std::getline(ss, f, ',')) {
    f = trim(f);
    if (f != "csv" && f != "json" && f != "vtk") throw ConfigError("format", "unknown format '" + f + "'");
  }
}

// ------------------------------------------------------------------ commands

int cmd_zeros(Run& r) {
  const bessel::Order order{r.cfg.nu};
  const auto x = bessel::zeros_j(order, r.cfg.n);
  const auto xp = bessel::zeros_j_prime(order, r.cfg.n);
  CsvTable t({"n", "x", "x_lower", "xp", "xp_lower"});
  ordered_json rows = ordered_json::array();
  char line[160];
  r.out << "n  x_{nu,n}  lower  x'_{nu,n}  lower'\n";
  for (int n = 1; n <= r.cfg.n; ++n) {
    const bessel::ZeroIndex idx{n};
    const double lo = bessel::lower_bound_zero(order, idx);
    const double lop = bessel::lower_bound_zero_prime(order, idx);
    const auto i = static_cast<std::size_t>(n - 1);
    t.add({std::to_string(n), num(x[i]), num(lo), num(xp[i]), num(lop)});
    rows.push_back({{"n", n}, {"x", x[i]}, {"x_lower", lo}, {"xp", xp[i]}, {"xp_lower", lop}});
    std::snprintf(line, sizeof line, "%d  %.12f  %.12f  %.12f  %.12f\n", n, x[i], lo, xp[i], lop);
    r.out << line;
  }
  if (r.wants("csv")) t.write(r.dir / "zeros.csv", r.prov);
  if (r.wants("json")) {
    auto j = r.doc();
    j["nu"] = r.cfg.nu;
    j["zeros"] = rows;
    write_json(r.dir / "zeros.json", j);
  }
  return kExitOk;
}

int cmd_critical(Run& r) {
  spectrum::SweepRequest q;
  q.kind = spectrum::SweepKind::Flux;
  q.min = r.cfg.alpha_min;
  q.max = r.cfg.alpha_max;
  q.steps = r.cfg.steps.value_or(201);
  q.rule = r.rule();
  q.geometry = Geometry{r.cfg.d, 0.0, 1.0};
  const auto curve = spectrum::sweep(q);
  CsvTable t({"alpha", "a0_sharp", "a1_sharp", "a0_conservative", "a1_conservative"});
  ordered_json rows = ordered_json::array();
  for (const auto& s : curve.samples) {
    t.add({num(s.parameter), num(s.a0_sharp), num(s.a1_sharp), num(s.a0_conservative), num(s.a1_conservative)});
    rows.push_back({{"alpha", s.parameter},
                    {"a0_sharp", s.a0_sharp},
                    {"a1_sharp", s.a1_sharp},
                    {"a0_conservative", s.a0_conservative},
                    {"a1_conservative", s.a1_conservative}});
  }
  if (r.wants("csv")) t.write(r.dir / "critical.csv", r.prov);
  if (r.wants("json")) {
    auto j = r.doc();
    j["rule"] = r.cfg.rule;
    j["curve"] = rows;
    write_json(r.dir / "critical.json", j);
  }
  r.out << "critical: " << curve.samples.size() << " samples written\n";
  return kExitOk;
}

ordered_json mode_json(const spectrum::ModeSolution& s) {
  ordered_json levels = ordered_json::array();
  for (const auto& l : s.levels) {
    levels.push_back({{"level", l.level}, {"h", l.h}, {"dofs", l.dofs}, {"values", numbers(l.values)}});
  }
  ordered_json stable = ordered_json::array();
  for (const bool b : s.stable) stable.push_back(b);
  return {{"m", s.m},
          {"nu", s.nu},
          {"inertia", s.inertia},
          {"values", numbers(s.values)},
          {"residuals", numbers(s.residuals)},
          {"extrapolated", numbers(s.extrapolated)},
          {"order", numbers(s.order)},
          {"truncation_change", numbers(s.truncation_change)},
          {"stable", stable},
          {"levels", levels}};
}

int cmd_solve(Run& r) {
  const Geometry g = r.geometry();
  const auto modes = parse_modes(r.cfg.modes);
  const auto res = spectrum::solve_full(g, r.cfg.alpha, modes, r.settings());

  CsvTable t({"k", "value", "extrapolated", "m", "nu", "bracket_lower", "bracket_upper"});
  ordered_json disc = ordered_json::array();
  for (std::size_t k = 0; k < res.discrete.size(); ++k) {
    const auto& e = res.discrete[k];
    const auto& b = res.brackets[k];
    t.add({std::to_string(k + 1), num(e.value), num(e.extrapolated), std::to_string(e.m), num(e.nu),
           num(b.lower), num(b.upper)});
    disc.push_back({{"k", k + 1},
                    {"value", e.value},
                    {"extrapolated", e.extrapolated},
                    {"m", e.m},
                    {"nu", e.nu},
                    {"bracket", {b.lower, b.upper}}});
  }
  CsvTable levels({"m", "nu", "level", "h", "dofs", "index", "value"});
  ordered_json mj = ordered_json::array();
  for (const auto& s : res.solutions) {
    for (const auto& l : s.levels) {
      for (std::size_t i = 0; i < l.values.size(); ++i) {
        levels.add({std::to_string(s.m), num(s.nu), std::to_string(l.level), num(l.h), std::to_string(l.dofs),
                    std::to_string(i + 1), num(l.values[i])});
      }
    }
    mj.push_back(mode_json(s));
  }
  ordered_json diags = ordered_json::array();
  for (const auto& d : res.diagnostics) diags.push_back({{"code", d.code}, {"message", d.message}});

  if (r.wants("csv")) {
    t.write(r.dir / "spectrum.csv", r.prov);
    levels.write(r.dir / "levels.csv", r.prov);
  }
  if (r.wants("json")) {
    auto j = r.doc();
    j["geometry"] = {{"d", g.d}, {"a", g.a}, {"r_max", g.r_max}};
    j["alpha"] = r.cfg.alpha;
    j["thresholds"] = {{"essential", res.essential}, {"lower", res.lower}, {"cutoff", res.cutoff}};
    j["regime"] = analytic::to_string(res.regime);
    j["discrete"] = disc;
    j["modes"] = mj;
    j["diagnostics"] = diags;
    write_json(r.dir / "spectrum.json", j);
  }
  if (r.wants("vtk")) {
    const std::size_t count = std::min(res.discrete.size(), static_cast<std::size_t>(r.cfg.fields));
    for (std::size_t k = 0; k < count; ++k) {
      const auto& e = res.discrete[k];
      const auto it = std::find(modes.begin(), modes.end(), e.m);
      const auto& sol = res.solutions[static_cast<std::size_t>(it - modes.begin())];
      const auto& field = sol.fields[static_cast<std::size_t>(e.index)];
      const std::string label = "eigenfield k=" + std::to_string(k + 1) + " m=" + std::to_string(e.m) +
                                " lambda=" + num(e.value);
      const std::string stem = "field_" + std::to_string(k + 1);
      write_vtk_field(r.dir / (stem + ".vtk"), r.prov, *sol.mesh, field, label);
      if (r.cfg.revolve) write_vtk_revolved(r.dir / (stem + "_revolved.vtk"), r.prov, *sol.mesh, field, e.m, label);
    }
  }

  r.out << "regime " << analytic::to_string(res.regime) << '\n';
  r.out << "cutoff " << num(res.cutoff) << "  discrete " << res.discrete.size() << '\n';
  for (std::size_t k = 0; k < res.discrete.size(); ++k) {
    r.out << "  lambda_" << k + 1 << " = " << num(res.discrete[k].value) << "  (m=" << res.discrete[k].m
          << ", extrapolated " << num(res.discrete[k].extrapolated) << ")\n";
  }
  for (const auto& d : res.diagnostics) r.out << "  diagnostic " << d.code << ": " << d.message << '\n';
  // A bracket violation means the numerics contradict a theorem.
  return res.has_violation() ? kExitNumerical : kExitOk;
}

int cmd_sweep(Run& r) {
  spectrum::SweepRequest q;
  q.settings = r.settings();
  q.modes = parse_modes(r.cfg.modes);
  q.rule = r.rule();
  q.alpha = r.cfg.alpha;
  q.spot_every = r.cfg.spot_every;
  if (r.cfg.kind == "flux") {
    q.kind = spectrum::SweepKind::Flux;
    q.min = r.cfg.alpha_min;
    q.max = r.cfg.alpha_max;
    q.steps = r.cfg.steps.value_or(201);
    q.geometry = r.geometry();
  } else {
    q.kind = spectrum::SweepKind::Radius;
    q.min = r.cfg.min;
    q.max = r.cfg.max;
    q.steps = r.cfg.steps.value_or(8);
    q.geometry = Geometry{r.cfg.d, 0.0, 6.0 * r.cfg.d};
  }
  const auto curve = spectrum::sweep(q);

  CsvTable t({curve.parameter, "count", "values", "regime", "a0_sharp", "a1_sharp", "a0_conservative",
              "a1_conservative"});
  ordered_json rows = ordered_json::array();
  for (const auto& s : curve.samples) {
    const std::string count = s.solved ? std::to_string(s.values.size()) : "";
    t.add({num(s.parameter), count, joined(s.values), std::string(analytic::to_string(s.regime)),
           num(s.a0_sharp), num(s.a1_sharp), num(s.a0_conservative), num(s.a1_conservative)});
    ordered_json row{{curve.parameter, s.parameter}, {"solved", s.solved}};
    if (s.solved) row["values"] = numbers(s.values);
    row["regime"] = analytic::to_string(s.regime);
    row["a0_sharp"] = s.a0_sharp;
    row["a1_sharp"] = s.a1_sharp;
    row["a0_conservative"] = s.a0_conservative;
    row["a1_conservative"] = s.a1_conservative;
    rows.push_back(row);
  }
  if (r.wants("csv")) t.write(r.dir / "sweep.csv", r.prov);
  if (r.wants("json")) {
    auto j = r.doc();
    j["kind"] = spectrum::to_string(curve.kind);
    j["samples"] = rows;
    if (curve.kind == spectrum::SweepKind::Radius) {
      j["alpha"] = r.cfg.alpha;
      j["d"] = r.cfg.d;
      j["emergence"] = curve.emergence ? ordered_json(*curve.emergence) : ordered_json(nullptr);
      if (!curve.samples.empty()) {
        const auto& s = curve.samples.front();
        j["theorem_bounds"] = {s.a0_sharp * r.cfg.d, s.a1_sharp * r.cfg.d};
      }
    }
    write_json(r.dir / "sweep.json", j);
  }
  r.out << "sweep " << spectrum::to_string(curve.kind) << ": " << curve.samples.size() << " samples\n";
  if (curve.emergence) r.out << "emergence a = " << num(*curve.emergence) << '\n';
  return kExitOk;
}

int cmd_converge(Run& r) {
  const auto s = r.settings();
  spectrum::ConvergenceReport rep;
  std::vector<double> exact;
  if (r.cfg.benchmark) {
    const Geometry g{r.cfg.d, r.cfg.a, 2.0 * r.cfg.a};
    const auto ana = analytic::interior_spectrum(g, r.cfg.nu, 0, analytic::Wall::Dirichlet, 2);
    const double cutoff = 0.5 * (ana[0].value + ana[1].value);
    rep = spectrum::cylinder_convergence(r.cfg.a, r.cfg.d, r.cfg.nu, cutoff, s);
    exact.push_back(ana[0].value);
  } else {
    const auto radii = parse_list(r.cfg.rmax_list);
    rep = spectrum::convergence_study(r.geometry(), r.cfg.alpha, r.cfg.m, radii, s);
  }

  CsvTable levels({"level", "h", "dofs", "index", "value"});
  for (const auto& l : rep.by_level) {
    for (std::size_t i = 0; i < l.values.size(); ++i) {
      levels.add({std::to_string(l.level), num(l.h), std::to_string(l.dofs), std::to_string(i + 1), num(l.values[i])});
    }
  }
  CsvTable orders({"first_level", "index", "order"});
  for (std::size_t t = 0; t < rep.orders.size(); ++t) {
    for (std::size_t k = 0; k < rep.orders[t].size(); ++k) {
      orders.add({std::to_string(t), std::to_string(k + 1), num(rep.orders[t][k])});
    }
  }
  CsvTable trunc({"r_max", "index", "value"});
  for (std::size_t i = 0; i < rep.r_max.size(); ++i) {
    for (std::size_t k = 0; k < rep.by_r_max[i].size(); ++k) {
      trunc.add({num(rep.r_max[i]), std::to_string(k + 1), num(rep.by_r_max[i][k])});
    }
  }
  if (r.wants("csv")) {
    levels.write(r.dir / "convergence.csv", r.prov);
    orders.write(r.dir / "orders.csv", r.prov);
    if (!rep.r_max.empty()) trunc.write(r.dir / "truncation.csv", r.prov);
  }
  if (r.wants("json")) {
    auto j = r.doc();
    j["benchmark"] = r.cfg.benchmark;
    j["m"] = rep.m;
    j["nu"] = rep.nu;
    ordered_json lv = ordered_json::array();
    for (const auto& l : rep.by_level) {
      lv.push_back({{"level", l.level}, {"h", l.h}, {"dofs", l.dofs}, {"values", numbers(l.values)}});
    }
    j["levels"] = lv;
    ordered_json ord = ordered_json::array();
    for (const auto& row : rep.orders) ord.push_back(numbers(row));
    j["orders"] = ord;
    j["extrapolated"] = numbers(rep.extrapolated);
    if (!exact.empty()) j["exact"] = numbers(exact);
    if (!rep.r_max.empty()) {
      ordered_json tr = ordered_json::array();
      for (std::size_t i = 0; i < rep.r_max.size(); ++i) {
        tr.push_back({{"r_max", rep.r_max[i]}, {"values", numbers(rep.by_r_max[i])}});
      }
      j["truncation"] = tr;
      j["r_max_monotone"] = rep.r_max_monotone;
    }
    write_json(r.dir / "convergence.json", j);
  }

  for (const auto& l : rep.by_level) {
    r.out << "level " << l.level << "  h " << num(l.h) << "  dofs " << l.dofs;
    if (!l.values.empty()) r.out << "  lambda_1 " << num(l.values.front());
    r.out << '\n';
  }
  if (!rep.orders.empty() && !rep.orders.back().empty()) r.out << "order " << num(rep.orders.back().front()) << '\n';
  if (!exact.empty()) r.out << "exact " << num(exact.front()) << '\n';
  if (!rep.r_max.empty()) r.out << "r_max monotone " << (rep.r_max_monotone ? "yes" : "no") << '\n';
  return kExitOk;
}

}  // namespace

std::vector<int> parse_modes(const std::string& text) {
  const std::string s = trim(text);
  std::vector<int> modes;
  const auto dots = s.find("..");
  try {
    if (dots != std::string::npos) {
      const int lo = to_int(trim(s.substr(0, dots)));
      const int hi = to_int(trim(s.substr(dots + 2)));
      if (hi < lo) throw std::invalid_argument("empty mode range " + s);
      if (hi - lo > 200) throw std::invalid_argument("mode range too wide: " + s);
      for (int m = lo; m <= hi; ++m) modes.push_back(m);
    } else {
      std::stringstream ss(s);
      std::string item;
      while (std::getline(ss, item, ',')) modes.push_back(to_int(trim(item)));
    }
  } catch (const std::out_of_range&) {
    throw std::invalid_argument("mode out of range in '" + s + "'");
  }
  if (modes.empty()) throw std::invalid_argument("no modes in '" + s + "'");
  std::vector<int> sorted = modes;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw std::invalid_argument("repeated mode in '" + s + "'");
  }
  return modes;
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    std::size_t used = 0;
    const double v = std::stod(item, &used);
    if (used != item.size() || !std::isfinite(v)) throw std::invalid_argument("not a number: " + item);
    out.push_back(v);
  }
  return out;
}

std::string canonical(const RunConfig& c) {
  std::ostringstream o;
  auto kv = [&o](const char* k, const std::string& v) { o << k << '=' << v << '\n'; };
  kv("command", c.command);
  kv("d", num(c.d));
  kv("a", num(c.a));
  kv("alpha", num(c.alpha));
  kv("rmax", c.rmax ? num(*c.rmax) : "default");
  kv("h", num(c.h));
  kv("grading", num(c.grading));
  kv("levels", std::to_string(c.levels));
  kv("tol", num(c.tol));
  kv("delta", num(c.delta));
  kv("modes", c.modes);
  kv("seed", std::to_string(c.seed));
  kv("format", c.format);
  kv("nu", num(c.nu));
  kv("n", std::to_string(c.n));
  kv("alpha-min", num(c.alpha_min));
  kv("alpha-max", num(c.alpha_max));
  kv("steps", c.steps ? std::to_string(*c.steps) : "default");
  kv("kind", c.kind);
  kv("min", num(c.min));
  kv("max", num(c.max));
  kv("rule", c.rule);
  kv("spot-every", std::to_string(c.spot_every));
  kv("fields", std::to_string(c.fields));
  kv("revolve", c.revolve ? "1" : "0");
  kv("m", std::to_string(c.m));
  kv("rmax-list", c.rmax_list);
  kv("benchmark", c.benchmark ? "1" : "0");
  return o.str();
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  RunConfig c;
  CLI::App app{"Aharonov-Bohm slab waveguide with a Neumann window: Bessel zeros, critical radii "
               "and finite-element spectra."};
  app.name("abguide");
  // "--h" is the mesh size, so help keeps only its long form.
  app.set_help_flag("--help", "Print this help and exit");
  app.set_config("--config", "", "Flat key = value file; command-line flags override it");
  app.require_subcommand(1, 1);
  app.fallthrough();

  app.add_option("--d", c.d, "Slab width")->capture_default_str();
  app.add_option("--a", c.a, "Window radius")->capture_default_str();
  app.add_option("--alpha", c.alpha, "Flux parameter (not an integer)")->capture_default_str();
  app.add_option("--rmax", c.rmax, "Truncation radius (default a + 6d)");
  app.add_option("--h", c.h, "Base mesh size")->capture_default_str();
  app.add_option("--grading", c.grading, "Power-law grading exponent toward (a, 0); 1 = uniform")->capture_default_str();
  app.add_option("--levels", c.levels, "Mesh levels solved, coarsest included")->capture_default_str();
  app.add_option("--tol", c.tol, "Eigenpair residual tolerance")->capture_default_str();
  app.add_option("--delta", c.delta, "Report eigenvalues below (1 - delta)(pi/d)^2")->capture_default_str();
  app.add_option("--modes", c.modes, "Angular modes, lo..hi or a comma list (use --modes=-2..3)")->capture_default_str();
  app.add_option("--jobs", c.jobs, "Worker threads, 0 = all cores")->capture_default_str();
  app.add_option("--seed", c.seed, "Seed of the eigensolver start vectors")->capture_default_str();
  app.add_option("--out", c.out, "Output directory")->capture_default_str();
  app.add_option("--format", c.format, "Comma list of csv, json, vtk")->capture_default_str();
  app.add_option("--nu", c.nu, "Bessel order (zeros, converge --benchmark)")->capture_default_str();
  app.add_option("--n", c.n, "Number of zeros")->capture_default_str();
  app.add_option("--alpha-min", c.alpha_min, "Flux range start")->capture_default_str();
  app.add_option("--alpha-max", c.alpha_max, "Flux range end")->capture_default_str();
  app.add_option("--steps", c.steps, "Samples over the range (critical 201, radius sweep 8)");
  app.add_option("--kind", c.kind, "Sweep kind: radius or flux")->capture_default_str();
  app.add_option("--min", c.min, "Radius sweep start")->capture_default_str();
  app.add_option("--max", c.max, "Radius sweep end")->capture_default_str();
  app.add_option("--rule", c.rule, "Order rule for critical radii: nearest (dist(alpha, Z)) or literal (|alpha|)")
      ->capture_default_str();
  app.add_option("--spot-every", c.spot_every, "Flux sweep: solve at every k-th sample, 0 = never")
      ->capture_default_str();
  app.add_option("--fields", c.fields, "Eigenfields exported by solve")->capture_default_str();
  app.add_flag("--revolve", c.revolve, "Also export fields on a revolved 3D grid");
  app.add_option("--m", c.m, "Angular mode for converge")->capture_default_str();
  app.add_option("--rmax-list", c.rmax_list, "Truncation radii for converge, comma separated");
  app.add_flag("--benchmark", c.benchmark, "converge: closed cylinder r < a with a Dirichlet wall");

  for (const auto& [name, help] : {std::pair{"zeros", "Zeros of J_nu and J'_nu with their lower bounds"},
                                   std::pair{"critical", "Critical radii a0, a1 over a flux range"},
                                   std::pair{"solve", "Discrete spectrum for one geometry and flux"},
                                   std::pair{"sweep", "Radius or flux sweep"},
                                   std::pair{"converge", "Mesh and truncation convergence study"}}) {
    app.add_subcommand(name, help)->fallthrough()->callback([&c, n = std::string(name)] { c.command = n; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    fail_line(err, "config", "", e.what());
    return kExitConfig;
  }

  Provenance prov;
  try {
    validate(c);
    char hash[40];
    std::snprintf(hash, sizeof hash, "fnv1a64:%016" PRIx64, fnv1a(canonical(c)));
    prov = {c.command, hash};
    fs::create_directories(c.out);
  } catch (const ConfigError& e) {
    fail_line(err, "config", e.field, e.what());
    return kExitConfig;
  } catch (const std::exception& e) {
    fail_line(err, "config", "out", e.what());
    return kExitConfig;
  }

  std::set<std::string> formats;
  std::stringstream ss(c.format);
  for (std::string f; std::getline(ss, f, ',');) formats.insert(trim(f));
  Run r{c, prov, fs::path(c.out), formats, out};
  try {
    if (c.command == "zeros") return cmd_zeros(r);
    if (c.command == "critical") return cmd_critical(r);
    if (c.command == "solve") return cmd_solve(r);
    if (c.command == "sweep") return cmd_sweep(r);
    return cmd_converge(r);
  } catch (const std::exception& e) {
    fail_line(err, "numerical", "", e.what());
    return kExitNumerical;
  }
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv{"abguide"};
  for (const auto& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace abguide::app
