#pragma once

// File writers shared by the CLI commands. Every file starts with the same
// provenance block: tool version, config hash, units and the origin of the
// analytic constants. Nothing time- or host-dependent is written, so equal
// configs give byte-identical files.

#include <Eigen/Core>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "abguide/mesh.hpp"

namespace abguide::app {

std::uint64_t fnv1a(std::string_view text);

struct Provenance {
  std::string command;
  std::string config_hash;  // "fnv1a64:<16 hex digits>"
};

/// Shortest text that reads back to the same double; "nan" for NaN.
std::string num(double x);

class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> columns) : columns_(std::move(columns)) {}
  void add(std::vector<std::string> row) { rows_.push_back(std::move(row)); }
  void write(const std::filesystem::path& path, const Provenance& p) const;

 private:
  std::vector<std::string> columns_;
  std::vector<std::vector<std::string>> rows_;
};

nlohmann::ordered_json meta_json(const Provenance& p);
void write_json(const std::filesystem::path& path, const nlohmann::ordered_json& doc);

/// Legacy ASCII unstructured grid in the (r, z) plane (z coordinate 0),
/// one scalar per node.
void write_vtk_field(const std::filesystem::path& path, const Provenance& p, const mesh::Mesh& mesh,
                     const Eigen::VectorXd& values, std::string_view label);

/// The field u(r, z) cos(m theta) and |u| sampled on a revolved structured
/// grid: `angular` steps around the axis, nr x nz points in the half-plane.
void write_vtk_revolved(const std::filesystem::path& path, const Provenance& p,
                        const mesh::Mesh& mesh, const Eigen::VectorXd& values, int m,
                        std::string_view label, int angular = 64, int nr = 96, int nz = 32);

}  // namespace abguide::app
