#pragma once

// Command-line front end. `run` never throws: configuration problems exit
// with 2 and numerical failures with 3, each after one JSON line on the
// error stream.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace abguide::app {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumerical = 3;

struct RunConfig {
  std::string command;

  // geometry and flux
  double d = 3.14159265358979323846;
  double a = 3.0;
  double alpha = 0.5;
  std::optional<double> rmax;  // a + 6d when unset

  // mesh and solver
  double h = 0.25;
  double grading = 3.0;
  int levels = 3;
  double tol = 1e-9;
  double delta = 0.02;
  std::string modes = "-2..3";
  int jobs = 1;
  std::uint64_t seed = 20240917;

  // output
  std::string out = ".";
  std::string format = "csv,json,vtk";

  // zeros
  double nu = 0.5;
  int n = 5;

  // critical and sweep
  double alpha_min = 0.0;
  double alpha_max = 1.0;
  std::optional<int> steps;
  std::string kind = "radius";
  double min = 0.5;
  double max = 4.0;
  std::string rule = "nearest";
  int spot_every = 0;

  // solve
  int fields = 1;
  bool revolve = false;

  // converge
  int m = 0;
  std::string rmax_list;
  bool benchmark = false;
};

/// Parses "-2..3" or "-2,-1,0". Throws std::invalid_argument.
std::vector<int> parse_modes(const std::string& text);

/// Parses "21.8,30,40". Throws std::invalid_argument.
std::vector<double> parse_list(const std::string& text);

/// Every field that changes results, in a fixed order. The output
/// directory and the worker count are left out.
std::string canonical(const RunConfig& config);

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace abguide::app
