// Acceptance checks, one line per criterion:
//   acceptance            run all nine
//   acceptance --only N   run criterion N
// Exit status is nonzero when any selected criterion fails.

#include <Eigen/Dense>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "abguide/analytic.hpp"
#include "abguide/bessel.hpp"
#include "abguide/eigensolver.hpp"
#include "abguide/fem.hpp"
#include "abguide/mesh.hpp"
#include "abguide/spectrum.hpp"
#include "app.hpp"
#include "oracles.hpp"

using namespace abguide;
namespace fs = std::filesystem;

namespace {

constexpr double kPi = std::numbers::pi;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

// Inertia against returned count, recorded on every solve made here.
struct InertiaLog {
  int solves = 0;
  int mismatches = 0;
  void add(const spectrum::SpectrumResult& r) {
    for (const auto& s : r.solutions) add(s);
  }
  void add(const spectrum::ModeSolution& s) {
    ++solves;
    if (s.inertia != static_cast<int>(s.values.size())) ++mismatches;
  }
};

spectrum::Settings reference_settings() {
  spectrum::Settings s;
  s.mesh.h = 0.25;
  s.levels = 3;
  return s;
}

std::vector<double> merged(const spectrum::SpectrumResult& r) {
  std::vector<double> v;
  for (const auto& e : r.discrete) v.push_back(e.value);
  return v;
}

std::string list(const std::vector<double>& v) {
  std::string s = "[";
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + fmt("%.7f", v[i]);
  return s + "]";
}

// ------------------------------------------------------------------ 1

Outcome bessel_oracles() {
  double worst_pi = 0.0;
  const auto half = bessel::zeros_j(bessel::Order(0.5), 5);
  for (int n = 1; n <= 5; ++n) worst_pi = std::max(worst_pi, std::fabs(half[static_cast<std::size_t>(n - 1)] - n * kPi));

  const double tan_root = oracle::half_order_prime_zeros(1)[0];
  const double prime_err = std::fabs(bessel::zero_j_prime(bessel::Order(0.5), bessel::ZeroIndex(1)) - tan_root);

  double worst_j = 0.0;
  for (const double nu : {0.1, 0.5, 1.0, 2.5, 5.0}) {
    for (const double x : bessel::zeros_j(bessel::Order(nu), 5)) worst_j = std::max(worst_j, std::fabs(oracle::j(nu, x)));
  }
  return {worst_pi <= 1e-10 && prime_err <= 1e-8 && worst_j <= 1e-9,
          fmt("max|x_{1/2,n} - n pi| = %.2e (<= 1e-10), |x'_{1/2,1} - tan root| = %.2e (<= 1e-8), "
              "max|J_nu(x_{nu,n})| = %.2e (<= 1e-9)",
              worst_pi, prime_err, worst_j)};
}

// ------------------------------------------------------------------ 2

Outcome zero_inequalities() {
  int airy_fail = 0, dir_fail = 0, floor_fail = 0;
  std::string airy_cases;
  for (const double nu : {0.1, 0.5, 1.0, 2.5, 5.0}) {
    const bessel::Order o(nu);
    for (int n = 1; n <= 5; ++n) {
      const bessel::ZeroIndex i(n);
      const double xp = bessel::zero_j_prime(o, i);
      const double est = bessel::lower_bound_zero_prime(o, i);
      if (!(est < xp)) {
        ++airy_fail;
        airy_cases += fmt(" (nu=%g,n=%d: %.4f vs %.4f)", nu, n, est, xp);
      }
      if (!(bessel::lower_bound_zero(o, i) < bessel::zero_j(o, i))) ++dir_fail;
    }
  }
  double first_ok = -1.0;
  for (int i = 1; i <= 100; ++i) {
    const double nu = i / 101.0;
    const double xp = bessel::zero_j_prime(bessel::Order(nu), bessel::ZeroIndex(1));
    if (!(analytic::kConservativeZeroFloor + nu < xp)) {
      ++floor_fail;
    } else if (first_ok < 0.0) {
      first_ok = nu;
    }
  }
  return {airy_fail == 0 && dir_fail == 0 && floor_fail == 0,
          fmt("airy-type bound fails %d/25%s; dirichlet bound fails %d/25; "
              "0.6538+nu < x'_{nu,1} fails %d/100 (holds from nu = %.3f)",
              airy_fail, airy_cases.c_str(), dir_fail, floor_fail, first_ok)};
}

// ------------------------------------------------------------------ 3

Outcome critical_curves() {
  using analytic::RadiusVariant;
  const double a1 = analytic::critical_radius_a1(0.5);
  const double a0 = analytic::critical_radius_a0(0.5);
  const double a1_err = std::fabs(a1 - 2.0 / std::sqrt(3.0));
  // Independent value: 2 x / (sqrt 3 pi) with x the root of tan x = 2x.
  const double a0_ref = 2.0 * oracle::half_order_prime_zeros(1)[0] / (std::sqrt(3.0) * kPi);
  const double a0_err = std::fabs(a0 - 0.428405);
  int order_fail = 0, cons0_fail = 0, cons1_fail = 0;
  double cons0_last = -1.0;
  for (int i = 1; i <= 200; ++i) {
    const double alpha = i / 201.0;
    const double s0 = analytic::critical_radius_a0(alpha), s1 = analytic::critical_radius_a1(alpha);
    if (!(s0 < s1)) ++order_fail;
    if (!(analytic::critical_radius_a0(alpha, RadiusVariant::Conservative) <= s0)) {
      ++cons0_fail;
      if (alpha < 0.5) cons0_last = alpha;
    }
    if (!(analytic::critical_radius_a1(alpha, RadiusVariant::Conservative) <= s1)) ++cons1_fail;
  }
  return {a1_err <= 1e-9 && a0_err <= 1e-5 && std::fabs(a0 - a0_ref) <= 1e-12 && order_fail == 0 &&
              cons0_fail == 0 && cons1_fail == 0,
          fmt("|a1(0.5) - 2/sqrt3| = %.2e (<= 1e-9), a0(0.5) = %.9f (|. - 0.428405| = %.2e <= 1e-5, "
              "tan-root oracle %.9f); a0 < a1 fails %d/200; conservative <= sharp fails a0 %d/200 "
              "(alpha up to %.3f and symmetric), a1 %d/200",
              a1_err, a0, a0_err, a0_ref, order_fail, cons0_fail, cons0_last, cons1_fail)};
}

// ------------------------------------------------------------------ 4

Outcome cylinder_benchmark() {
  const double exact = kPi * kPi + 0.25;
  spectrum::Settings s;
  s.mesh.h = 0.2;
  s.levels = 4;
  // Midway between the ground state and the next interior Dirichlet value.
  const double cutoff = kPi * kPi + 1.25;
  const auto rep = spectrum::cylinder_convergence(1.0, kPi, 0.5, cutoff, s);
  std::vector<double> errs;
  for (const auto& l : rep.by_level) errs.push_back(l.values.empty() ? NAN : std::fabs(l.values[0] - exact) / exact);
  const double err = errs.back();
  const double p = rep.orders.back().empty() ? NAN : rep.orders.back()[0];
  std::string e;
  for (const double x : errs) e += fmt(" %.2e", x);
  return {err <= 1e-3 && p >= 1.6 && p <= 2.2,
          fmt("relative errors by level:%s; finest %.2e (<= 1e-3); observed order %.3f (in [1.6, 2.2])", e.c_str(),
              err, p)};
}

// ------------------------------------------------------------------ 5

Outcome bracket_containment(InertiaLog& log) {
  const Geometry g = Geometry::with_default_truncation(kPi, 3.0);
  const auto r = spectrum::solve_full(g, 0.5, spectrum::default_modes(), reference_settings());
  log.add(r);
  const double floor = 0.40097 - 0.01;
  const double threshold = analytic::essential_threshold(g);
  bool inside = true;
  for (const auto& e : r.discrete) inside = inside && e.value > floor && e.value < threshold;
  const double neumann_end = analytic::bracket(1, g, 0.5, spectrum::default_modes()).lower;
  return {inside && !r.discrete.empty() && std::fabs(neumann_end - 0.40097) <= 0.01,
          fmt("%zu eigenvalue(s) %s in (%.5f, %.1f); computed Neumann end %.6f vs 0.40097; regime %s",
              r.discrete.size(), list(merged(r)).c_str(), floor, threshold, neumann_end,
              std::string(analytic::to_string(r.regime)).c_str())};
}

// ------------------------------------------------------------------ 6

Outcome regimes(InertiaLog& log) {
  const auto modes = spectrum::default_modes();
  const auto s = reference_settings();
  const Geometry narrow = Geometry::with_default_truncation(kPi, 0.9);
  Geometry narrow_wide = narrow;
  narrow_wide.r_max = narrow.a + 9.0 * kPi;
  const auto r0 = spectrum::solve_full(narrow, 0.5, modes, s);
  const auto r0w = spectrum::solve_full(narrow_wide, 0.5, modes, s);
  const auto r1 = spectrum::solve_full(Geometry::with_default_truncation(kPi, 4.0), 0.5, modes, s);
  log.add(r0);
  log.add(r0w);
  log.add(r1);
  const double ratio0 = 0.9 / kPi, ratio1 = 4.0 / kPi;
  const bool premise = ratio0 < analytic::critical_radius_a0(0.5) && ratio1 > analytic::critical_radius_a1(0.5);
  return {premise && r0.discrete.empty() && r0w.discrete.empty() && !r1.discrete.empty(),
          fmt("a=0.9 (a/d=%.4f < a0=%.4f): %zu below cutoff at r_max=a+6d, %zu at a+9d; "
              "a=4 (a/d=%.4f > a1=%.4f): %zu %s",
              ratio0, analytic::critical_radius_a0(0.5), r0.discrete.size(), r0w.discrete.size(), ratio1,
              analytic::critical_radius_a1(0.5), r1.discrete.size(), list(merged(r1)).c_str())};
}

// ------------------------------------------------------------------ 7

std::pair<eigs::SparseSym, eigs::SparseSym> random_pencil(int n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n), M = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    for (int off = 1; off <= 4 && i + off < n; ++off) {
      A(i, i + off) = A(i + off, i) = u(rng);
      M(i, i + off) = M(i + off, i) = 0.2 * u(rng);
    }
  }
  for (int i = 0; i < n; ++i) {
    A(i, i) = A.row(i).cwiseAbs().sum() + 0.05 + std::fabs(u(rng));
    M(i, i) = M.row(i).cwiseAbs().sum() + 0.5;
  }
  return {A.sparseView(), M.sparseView()};
}

Outcome monotonicity(InertiaLog& log) {
  const auto modes = spectrum::default_modes();
  const auto s = reference_settings();

  // Radius sweep at fixed truncation margin.
  std::vector<std::vector<double>> by_a;
  const std::vector<double> radii{2.5, 3.0, 3.5, 4.0, 4.5};
  for (const double a : radii) {
    const auto r = spectrum::solve_full(Geometry::with_default_truncation(kPi, a), 0.5, modes, s);
    log.add(r);
    by_a.push_back(merged(r));
  }
  bool radius_ok = true;
  for (std::size_t i = 1; i < by_a.size(); ++i) {
    if (by_a[i].size() < by_a[i - 1].size()) radius_ok = false;
    for (std::size_t k = 0; k < std::min(by_a[i].size(), by_a[i - 1].size()); ++k) {
      if (by_a[i][k] > by_a[i - 1][k]) radius_ok = false;
    }
  }
  std::string sweep;
  for (std::size_t i = 0; i < radii.size(); ++i) {
    sweep += fmt(" a=%.1f:%s", radii[i], by_a[i].empty() ? "none" : fmt("%.6f", by_a[i][0]).c_str());
  }

  // Truncation radius, mode m = 0 at a = 3.
  const Geometry g = Geometry::with_default_truncation(kPi, 3.0);
  const std::vector<double> rmax{3.0 + 4.0 * kPi, 3.0 + 6.0 * kPi, 3.0 + 8.0 * kPi};
  const auto rep = spectrum::convergence_study(g, 0.5, 0, rmax, s);
  std::string trunc;
  for (const auto& v : rep.by_r_max) trunc += " " + (v.empty() ? std::string("none") : fmt("%.9f", v[0]));

  // Dense against sparse on FEM and random pencils of size <= 2000.
  int pencils = 0;
  double worst = 0.0;
  auto compare = [&](const eigs::SparseSym& A, const eigs::SparseSym& M, double t) {
    const auto sp = eigs::eigs_below(A, M, t);
    const auto de = eigs::eigs_below_dense(A, M, t);
    ++pencils;
    if (sp.size() != de.size()) {
      worst = INFINITY;
      return;
    }
    for (std::size_t i = 0; i < sp.size(); ++i) worst = std::max(worst, std::fabs(sp[i].value - de[i].value) / de[i].value);
  };
  for (const double nu : {0.5, 1.5, 2.5}) {
    for (const double a : {1.0, 3.0, 4.0}) {
      const auto mesh = mesh::build_mesh(Geometry{kPi, a, a + 2.0 * kPi}, mesh::MeshOptions{0.5, 3.0, nu, 0});
      const auto sys = fem::assemble(mesh, nu);
      if (sys.A.rows() > eigs::kDenseLimit) continue;
      compare(sys.A, sys.M, 0.98);
      compare(sys.A, sys.M, 3.0);
    }
  }
  std::mt19937_64 rng(11);
  for (const int n : {30, 200, 700, 1500, 2000}) {
    const auto [A, M] = random_pencil(n, rng);
    const Eigen::MatrixXd Ad(A), Md(M);
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(Ad, Md);
    compare(A, M, 0.5 * (es.eigenvalues()(5) + es.eigenvalues()(6)));
  }

  const bool inertia_ok = log.mismatches == 0;
  return {radius_ok && rep.r_max_monotone && inertia_ok && worst <= 1e-8,
          fmt("lambda_1 vs a:%s (non-increasing: %s); lambda_1(m=0) vs r_max:%s (non-increasing: %s); "
              "inertia == count on %d/%d mode solves; dense vs sparse max rel diff %.2e on %d pencils (<= 1e-8)",
              sweep.c_str(), radius_ok ? "yes" : "no", trunc.c_str(), rep.r_max_monotone ? "yes" : "no",
              log.solves - log.mismatches, log.solves, worst, pencils)};
}

// ------------------------------------------------------------------ 8

Outcome flux_symmetry() {
  // alpha -> 1 - alpha with m -> 1 - m keeps every order |m - alpha|.
  auto s = reference_settings();
  s.levels = 1;
  const auto modes = spectrum::default_modes();
  const Geometry g = Geometry::with_default_truncation(kPi, 4.0);
  const auto a = spectrum::solve_full(g, 0.3, modes, s);
  const auto b = spectrum::solve_full(g, 0.7, modes, s);
  double worst = 0.0;
  bool same = a.discrete.size() == b.discrete.size() && !a.discrete.empty();
  for (std::size_t k = 0; same && k < a.discrete.size(); ++k) {
    worst = std::max(worst, std::fabs(a.discrete[k].value - b.discrete[k].value) / a.discrete[k].value);
  }
  for (const auto& sa : a.solutions) {
    for (const auto& sb : b.solutions) {
      if (sb.m != 1 - sa.m) continue;
      if (sa.values.size() != sb.values.size()) same = false;
      for (std::size_t k = 0; same && k < sa.values.size(); ++k) {
        worst = std::max(worst, std::fabs(sa.values[k] - sb.values[k]) / sa.values[k]);
      }
    }
  }
  return {same && worst <= 1e-6,
          fmt("alpha=0.3 %s, alpha=0.7 %s; max rel diff %.2e (<= 1e-6) merged and per mode m <-> 1-m",
              list(merged(a)).c_str(), list(merged(b)).c_str(), worst)};
}

// ------------------------------------------------------------------ 9

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

Outcome reproducibility() {
  const fs::path root = fs::temp_directory_path() / "abguide_acceptance_repro";
  fs::remove_all(root);
  std::vector<std::string> args{"solve", "--a", "3", "--seed", "12345", "--fields", "2", "--revolve"};
  std::ostringstream sink, err;
  int codes[2];
  for (int i = 0; i < 2; ++i) {
    auto run_args = args;
    run_args.push_back("--out=" + (root / std::to_string(i)).string());
    codes[i] = app::run(run_args, sink, err);
  }
  int files = 0, differ = 0;
  for (const auto& e : fs::directory_iterator(root / "0")) {
    ++files;
    const auto other = root / "1" / e.path().filename();
    if (!fs::exists(other) || slurp(e.path()) != slurp(other)) ++differ;
  }
  for (const auto& e : fs::directory_iterator(root / "1")) {
    if (!fs::exists(root / "0" / e.path().filename())) ++differ;
  }
  return {codes[0] == 0 && codes[1] == 0 && files > 0 && differ == 0,
          fmt("exit codes %d/%d; %d files compared, %d differ", codes[0], codes[1], files, differ)};
}

struct Criterion {
  int id;
  const char* name;
  double budget_s;  // 0 = no runtime limit
  std::function<Outcome()> check;
};

}  // namespace

int main(int argc, char** argv) {
  int only = 0;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--only") == 0 && i + 1 < argc) only = std::atoi(argv[++i]);
  }
  InertiaLog log;
  const std::vector<Criterion> all{
      {1, "bessel oracle suite", 1.0, bessel_oracles},
      {2, "zero inequalities", 1.0, zero_inequalities},
      {3, "critical curves", 2.0, critical_curves},
      {4, "cylinder benchmark", 120.0, cylinder_benchmark},
      {5, "bracket containment a=3", 300.0, [&] { return bracket_containment(log); }},
      {6, "regimes a=0.9 and a=4", 600.0, [&] { return regimes(log); }},
      {7, "monotonicity, inertia, dense vs sparse", 0.0, [&] { return monotonicity(log); }},
      {8, "flux symmetry 0.3 vs 0.7", 0.0, flux_symmetry},
      {9, "reproducibility", 0.0, reproducibility},
  };
  int failed = 0;
  for (const auto& c : all) {
    if (only != 0 && c.id != only) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = c.budget_s <= 0.0 || secs <= c.budget_s;
    const bool pass = o.pass && in_time;
    failed += !pass;
    const std::string budget = c.budget_s > 0.0 ? fmt(" (budget %.0f s)", c.budget_s) : std::string();
    std::printf("criterion %d %s: %s | %s | %.2f s%s\n", c.id, pass ? "PASS" : "FAIL", c.name, o.detail.c_str(),
                secs, budget.c_str());
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
