#include "output.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <stdexcept>

namespace abguide::app {

namespace {

constexpr std::string_view kUnits = "lengths in the input unit; energies in 1/length^2";
constexpr std::string_view kConstants =
    "thresholds (pi/d)^2 and (pi/2d)^2; Bessel zeros computed in double precision "
    "(series, Steed and Hankel evaluation, Brent roots); a0 = 2 x'_{nu,1}/(sqrt(3) pi), "
    "a1 = 2 x_{nu,1}/(sqrt(3) pi); conservative floors 0.6538 + nu and sqrt((3 pi/4)^2 + nu^2)";

std::ofstream open(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  return out;
}

void header_lines(std::ostream& out, const Provenance& p, std::string_view prefix) {
  out << prefix << "abguide " << ABGUIDE_VERSION << " " << p.command << '\n';
  out << prefix << "config " << p.config_hash << '\n';
  out << prefix << "units " << kUnits << '\n';
  out << prefix << "constants " << kConstants << '\n';
}

// Uniform bucket grid over the mesh bounding box for point location.
class Locator {
 public:
  explicit Locator(const mesh::Mesh& mesh) : mesh_(mesh) {
    for (const auto& n : mesh.nodes) {
      r1_ = std::max(r1_, n.r);
      z1_ = std::max(z1_, n.z);
    }
    buckets_.resize(static_cast<std::size_t>(kCells * kCells));
    for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
      double rlo = r1_, rhi = 0.0, zlo = z1_, zhi = 0.0;
      for (const int v : mesh.triangles[t].v) {
        const auto& n = mesh.nodes[static_cast<std::size_t>(v)];
        rlo = std::min(rlo, n.r);
        rhi = std::max(rhi, n.r);
        zlo = std::min(zlo, n.z);
        zhi = std::max(zhi, n.z);
      }
      for (int i = cell(rlo, r1_); i <= cell(rhi, r1_); ++i) {
        for (int k = cell(zlo, z1_); k <= cell(zhi, z1_); ++k) {
          buckets_[static_cast<std::size_t>(k * kCells + i)].push_back(static_cast<int>(t));
        }
      }
    }
  }

  double r_max() const { return r1_; }
  double z_max() const { return z1_; }

  double interpolate(const Eigen::VectorXd& u, double r, double z) const {
    const auto& bucket = buckets_[static_cast<std::size_t>(cell(z, z1_) * kCells + cell(r, r1_))];
    for (const int t : bucket) {
      const auto& v = mesh_.triangles[static_cast<std::size_t>(t)].v;
      const auto& a = mesh_.nodes[static_cast<std::size_t>(v[0])];
      const auto& b = mesh_.nodes[static_cast<std::size_t>(v[1])];
      const auto& c = mesh_.nodes[static_cast<std::size_t>(v[2])];
      const double det = (b.r - a.r) * (c.z - a.z) - (c.r - a.r) * (b.z - a.z);
      const double l1 = ((r - a.r) * (c.z - a.z) - (c.r - a.r) * (z - a.z)) / det;
      const double l2 = ((b.r - a.r) * (z - a.z) - (r - a.r) * (b.z - a.z)) / det;
      const double l0 = 1.0 - l1 - l2;
      constexpr double eps = -1e-12;
      if (l0 >= eps && l1 >= eps && l2 >= eps) return l0 * u(v[0]) + l1 * u(v[1]) + l2 * u(v[2]);
    }
    return 0.0;
  }

 private:
  static constexpr int kCells = 128;
  static int cell(double x, double extent) {
    return std::clamp(static_cast<int>(x / extent * kCells), 0, kCells - 1);
  }

  const mesh::Mesh& mesh_;
  double r1_ = 0.0;
  double z1_ = 0.0;
  std::vector<std::vector<int>> buckets_;
};

}  // namespace

std::uint64_t fnv1a(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string num(double x) {
  if (std::isnan(x)) return "nan";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

void CsvTable::write(const std::filesystem::path& path, const Provenance& p) const {
  auto out = open(path);
  header_lines(out, p, "# ");
  for (std::size_t i = 0; i < columns_.size(); ++i) out << (i ? "," : "") << columns_[i];
  out << '\n';
  for (const auto& row : rows_) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i];
    out << '\n';
  }
}

nlohmann::ordered_json meta_json(const Provenance& p) {
  return {{"tool", "abguide"},   {"version", ABGUIDE_VERSION},   {"command", p.command},
          {"config_hash", p.config_hash}, {"units", kUnits}, {"constants", kConstants}};
}

void write_json(const std::filesystem::path& path, const nlohmann::ordered_json& doc) {
  auto out = open(path);
  out << doc.dump(2) << '\n';
}

void write_vtk_field(const std::filesystem::path& path, const Provenance& p, const mesh::Mesh& mesh,
                     const Eigen::VectorXd& values, std::string_view label) {
  if (values.size() != static_cast<Eigen::Index>(mesh.nodes.size())) {
    throw std::invalid_argument("write_vtk_field: one value per node expected");
  }
  auto out = open(path);
  out << "# vtk DataFile Version 3.0\n";
  out << "abguide " << ABGUIDE_VERSION << " " << p.config_hash << " " << label << '\n';
  out << "ASCII\nDATASET UNSTRUCTURED_GRID\n";
  out << "POINTS " << mesh.nodes.size() << " double\n";
  for (const auto& n : mesh.nodes) out << num(n.r) << ' ' << num(n.z) << " 0\n";
  const auto t = mesh.triangles.size();
  out << "CELLS " << t << ' ' << 4 * t << '\n';
  for (const auto& tri : mesh.triangles) out << "3 " << tri.v[0] << ' ' << tri.v[1] << ' ' << tri.v[2] << '\n';
  out << "CELL_TYPES " << t << '\n';
  for (std::size_t i = 0; i < t; ++i) out << "5\n";
  out << "POINT_DATA " << mesh.nodes.size() << "\nSCALARS u double 1\nLOOKUP_TABLE default\n";
  for (Eigen::Index i = 0; i < values.size(); ++i) out << num(values(i)) << '\n';
}

void write_vtk_revolved(const std::filesystem::path& path, const Provenance& p,
                        const mesh::Mesh& mesh, const Eigen::VectorXd& values, int m,
                        std::string_view label, int angular, int nr, int nz) {
  const Locator loc(mesh);
  std::vector<double> sample(static_cast<std::size_t>(nr * nz));
  for (int k = 0; k < nz; ++k) {
    for (int i = 0; i < nr; ++i) {
      const double r = loc.r_max() * i / (nr - 1);
      const double z = loc.z_max() * k / (nz - 1);
      sample[static_cast<std::size_t>(k * nr + i)] = loc.interpolate(values, r, z);
    }
  }
  // theta runs over angular + 1 samples so the grid closes on itself.
  const int nt = angular + 1;
  auto out = open(path);
  out << "# vtk DataFile Version 3.0\n";
  out << "abguide " << ABGUIDE_VERSION << " " << p.config_hash << " " << label << " revolved m=" << m << '\n';
  out << "ASCII\nDATASET STRUCTURED_GRID\n";
  out << "DIMENSIONS " << nt << ' ' << nr << ' ' << nz << '\n';
  const std::size_t count = static_cast<std::size_t>(nt) * nr * nz;
  out << "POINTS " << count << " double\n";
  for (int k = 0; k < nz; ++k) {
    for (int i = 0; i < nr; ++i) {
      for (int j = 0; j < nt; ++j) {
        const double th = 2.0 * std::numbers::pi * j / angular;
        const double r = loc.r_max() * i / (nr - 1);
        out << num(r * std::cos(th)) << ' ' << num(r * std::sin(th)) << ' '
            << num(loc.z_max() * k / (nz - 1)) << '\n';
      }
    }
  }
  out << "POINT_DATA " << count << "\nSCALARS re_psi double 1\nLOOKUP_TABLE default\n";
  for (int k = 0; k < nz; ++k) {
    for (int i = 0; i < nr; ++i) {
      for (int j = 0; j < nt; ++j) {
        const double th = 2.0 * std::numbers::pi * j / angular;
        out << num(sample[static_cast<std::size_t>(k * nr + i)] * std::cos(m * th)) << '\n';
      }
    }
  }
  out << "SCALARS abs_psi double 1\nLOOKUP_TABLE default\n";
  for (int k = 0; k < nz; ++k) {
    for (int i = 0; i < nr; ++i) {
      for (int j = 0; j < nt; ++j) out << num(std::fabs(sample[static_cast<std::size_t>(k * nr + i)])) << '\n';
    }
  }
}

}  // namespace abguide::app
