#include "abguide/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <map>
#include <numbers>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>

namespace abguide::mesh {

namespace {

int cells_for(double length, double spacing) {
  return std::max(1, static_cast<int>(std::ceil(length / spacing - 1e-9)));
}

// Exponent for the axis zone. A mode of order nu behaves like r^nu near the
// axis; a power-law map with exponent above 1/nu keeps P1 eigenvalue errors
// at O(h^2). Capped to avoid absurdly thin first cells.
double axis_exponent(const MeshOptions& opt) {
  if (opt.grading <= 1.0) return 1.0;
  if (!opt.axis_order) return opt.grading;
  const double nu = *opt.axis_order;
  if (!(nu > 0.0)) throw std::invalid_argument("mesh: axis order must be > 0");
  return std::clamp(1.5 / nu, 1.0, 4.0);
}

void check_options(const MeshOptions& opt) {
  if (!(opt.h > 0.0) || !std::isfinite(opt.h)) throw std::invalid_argument("mesh: h must be > 0");
  if (!(opt.grading >= 1.0)) throw std::invalid_argument("mesh: grading must be >= 1");
  if (opt.level < 0 || opt.level > 12) throw std::invalid_argument("mesh: level out of range");
}

// Tensor-product grid split into right triangles along the (i,k)-(i+1,k+1)
// diagonals, with the boundary walked counterclockwise.
Mesh tensor_mesh(const Geometry& geometry, const std::vector<double>& rs,
                 const std::vector<double>& zs, double window) {
  Mesh mesh;
  mesh.geometry = geometry;
  const int nr = static_cast<int>(rs.size()) - 1;
  const int nz = static_cast<int>(zs.size()) - 1;
  auto id = [nr](int i, int k) { return k * (nr + 1) + i; };

  mesh.nodes.reserve(rs.size() * zs.size());
  for (int k = 0; k <= nz; ++k) {
    for (int i = 0; i <= nr; ++i) mesh.nodes.push_back({rs[i], zs[k]});
  }
  mesh.triangles.reserve(static_cast<std::size_t>(2 * nr * nz));
  for (int k = 0; k < nz; ++k) {
    for (int i = 0; i < nr; ++i) {
      const int v00 = id(i, k), v10 = id(i + 1, k), v11 = id(i + 1, k + 1), v01 = id(i, k + 1);
      mesh.triangles.push_back({{v00, v10, v11}});
      mesh.triangles.push_back({{v00, v11, v01}});
    }
  }

  const double tol = 1e-12 * std::max(1.0, geometry.r_max);
  for (int i = 0; i < nr; ++i) {
    const bool in_window = rs[i + 1] <= window + tol;
    mesh.boundary.push_back(
        {id(i, 0), id(i + 1, 0), in_window ? BoundaryTag::WindowNeumann : BoundaryTag::BottomDirichlet});
  }
  for (int k = 0; k < nz; ++k) {
    mesh.boundary.push_back({id(nr, k), id(nr, k + 1), BoundaryTag::TruncationDirichlet});
  }
  for (int i = nr; i > 0; --i) {
    mesh.boundary.push_back({id(i, nz), id(i - 1, nz), BoundaryTag::TopDirichlet});
  }
  for (int k = nz; k > 0; --k) {
    mesh.boundary.push_back({id(0, k), id(0, k - 1), BoundaryTag::Axis});
  }

  if (window > 0.0) {
    for (int i = 0; i <= nr; ++i) {
      if (std::fabs(rs[i] - window) <= tol) mesh.junction = id(i, 0);
    }
  }
  mesh.h = max_edge_length(mesh);
  return mesh;
}

double angle_at(const Node& p, const Node& q, const Node& s) {
  const double ux = q.r - p.r, uz = q.z - p.z;
  const double vx = s.r - p.r, vz = s.z - p.z;
  const double c = (ux * vx + uz * vz) / (std::hypot(ux, uz) * std::hypot(vx, vz));
  return std::acos(std::clamp(c, -1.0, 1.0));
}

}  // namespace

std::string_view to_string(BoundaryTag tag) {
  switch (tag) {
    case BoundaryTag::Axis:
      return "Axis";
    case BoundaryTag::WindowNeumann:
      return "WindowNeumann";
    case BoundaryTag::BottomDirichlet:
      return "BottomDirichlet";
    case BoundaryTag::TopDirichlet:
      return "TopDirichlet";
    case BoundaryTag::TruncationDirichlet:
      return "TruncationDirichlet";
  }
  return "Axis";
}

BoundaryTag parse_tag(std::string_view name) {
  for (const auto tag : {BoundaryTag::Axis, BoundaryTag::WindowNeumann, BoundaryTag::BottomDirichlet,
                         BoundaryTag::TopDirichlet, BoundaryTag::TruncationDirichlet}) {
    if (to_string(tag) == name) return tag;
  }
  throw std::invalid_argument("mesh: unknown boundary tag '" + std::string(name) + "'");
}

bool is_essential(BoundaryTag tag) { return tag != BoundaryTag::WindowNeumann; }

namespace detail {

std::vector<double> graded_line(double x0, double x1, std::span<const SingularPoint> singular,
                                double spacing, double zone, int level) {
  if (!(x1 > x0)) throw std::invalid_argument("graded_line: empty interval");
  std::vector<SingularPoint> marks{{x0, 1.0}, {x1, 1.0}};
  for (const auto& s : singular) {
    if (s.position < x0 || s.position > x1) continue;
    auto same = std::find_if(marks.begin(), marks.end(),
                             [&](const SingularPoint& m) { return m.position == s.position; });
    if (same != marks.end()) {
      same->exponent = std::max(same->exponent, s.exponent);
    } else {
      marks.push_back(s);
    }
  }
  std::sort(marks.begin(), marks.end(),
            [](const SingularPoint& a, const SingularPoint& b) { return a.position < b.position; });

  const int mult = 1 << level;
  std::vector<double> nodes{x0};
  auto push = [&](double x) {
    if (x > nodes.back()) nodes.push_back(x);
  };

  for (std::size_t s = 0; s + 1 < marks.size(); ++s) {
    const double p = marks[s].position;
    const double q = marks[s + 1].position;
    const double len = q - p;
    const double bl = marks[s].exponent;
    const double br = marks[s + 1].exponent;
    const bool graded_l = bl > 1.0;
    const bool graded_r = br > 1.0;
    const double cap = (graded_l && graded_r) ? 0.5 * len : len;
    const double zl = graded_l ? std::min(zone, cap) : 0.0;
    const double zr = graded_r ? std::min(zone, cap) : 0.0;

    if (graded_l) {
      const int n = cells_for(bl * zl, spacing) * mult;
      for (int i = 1; i <= n; ++i) push(p + zl * std::pow(static_cast<double>(i) / n, bl));
    }
    const double mid = len - zl - zr;
    if (mid > 1e-12 * len) {
      const double start = p + zl;
      const int n = cells_for(mid, spacing) * mult;
      for (int i = 1; i <= n; ++i) push(start + mid * static_cast<double>(i) / n);
    }
    if (graded_r) {
      const int n = cells_for(br * zr, spacing) * mult;
      for (int i = n - 1; i >= 0; --i) {
        push(q - zr * std::pow(static_cast<double>(i) / n, br));
      }
    }
    nodes.back() = q;
  }
  return nodes;
}

}  // namespace detail

Mesh build_mesh(const Geometry& geometry, const MeshOptions& opt) {
  validate(geometry);
  check_options(opt);
  if (!(opt.h <= std::min(geometry.d, geometry.r_max) / 4.0)) {
    throw std::invalid_argument("mesh: h must not exceed min(d, r_max)/4");
  }
  const double spacing = opt.h / std::numbers::sqrt2;
  const double zone = 0.5 * geometry.d;
  const double junction_exp = opt.grading;

  std::vector<detail::SingularPoint> radial{{0.0, axis_exponent(opt)}};
  if (geometry.a > 0.0) radial.push_back({geometry.a, junction_exp});
  const auto rs = detail::graded_line(0.0, geometry.r_max, radial, spacing, zone, opt.level);

  std::vector<detail::SingularPoint> axial;
  if (geometry.a > 0.0) axial.push_back({0.0, junction_exp});
  const auto zs = detail::graded_line(0.0, geometry.d, axial, spacing, zone, opt.level);

  return tensor_mesh(geometry, rs, zs, geometry.a);
}

Mesh build_cylinder_mesh(double radius, double d, const MeshOptions& opt) {
  check_options(opt);
  if (!(radius > 0.0) || !(d > 0.0)) throw std::invalid_argument("mesh: cylinder needs radius, d > 0");
  if (!(opt.h <= std::min(d, radius) / 4.0)) {
    throw std::invalid_argument("mesh: h must not exceed min(d, radius)/4");
  }
  const double spacing = opt.h / std::numbers::sqrt2;
  const std::vector<detail::SingularPoint> radial{{0.0, axis_exponent(opt)}};
  const auto rs = detail::graded_line(0.0, radius, radial, spacing, 0.5 * d, opt.level);
  const auto zs = detail::graded_line(0.0, d, {}, spacing, 0.5 * d, opt.level);
  // r_max equals a here; the geometry record is informational only.
  return tensor_mesh(Geometry{d, radius, radius}, rs, zs, radius);
}

Mesh refine(const Mesh& mesh) {
  Mesh out;
  out.geometry = mesh.geometry;
  out.junction = mesh.junction;
  out.nodes = mesh.nodes;
  std::map<std::pair<int, int>, int> midpoint;
  auto mid = [&](int a, int b) {
    const auto key = std::minmax(a, b);
    auto it = midpoint.find(key);
    if (it != midpoint.end()) return it->second;
    const Node& p = mesh.nodes[static_cast<std::size_t>(a)];
    const Node& q = mesh.nodes[static_cast<std::size_t>(b)];
    out.nodes.push_back({0.5 * (p.r + q.r), 0.5 * (p.z + q.z)});
    const int id = static_cast<int>(out.nodes.size()) - 1;
    midpoint.emplace(key, id);
    return id;
  };
  out.triangles.reserve(4 * mesh.triangles.size());
  for (const auto& t : mesh.triangles) {
    const int a = t.v[0], b = t.v[1], c = t.v[2];
    const int ab = mid(a, b), bc = mid(b, c), ca = mid(c, a);
    out.triangles.push_back({{a, ab, ca}});
    out.triangles.push_back({{ab, b, bc}});
    out.triangles.push_back({{ca, bc, c}});
    out.triangles.push_back({{ab, bc, ca}});
  }
  out.boundary.reserve(2 * mesh.boundary.size());
  for (const auto& e : mesh.boundary) {
    const int m = mid(e.a, e.b);
    out.boundary.push_back({e.a, m, e.tag});
    out.boundary.push_back({m, e.b, e.tag});
  }
  out.h = max_edge_length(out);
  return out;
}

double signed_area(const Mesh& mesh, const Triangle& t) {
  const Node& p = mesh.nodes[static_cast<std::size_t>(t.v[0])];
  const Node& q = mesh.nodes[static_cast<std::size_t>(t.v[1])];
  const Node& s = mesh.nodes[static_cast<std::size_t>(t.v[2])];
  return 0.5 * ((q.r - p.r) * (s.z - p.z) - (s.r - p.r) * (q.z - p.z));
}

double max_edge_length(const Mesh& mesh) {
  double h = 0.0;
  for (const auto& t : mesh.triangles) {
    for (int e = 0; e < 3; ++e) {
      const Node& p = mesh.nodes[static_cast<std::size_t>(t.v[e])];
      const Node& q = mesh.nodes[static_cast<std::size_t>(t.v[(e + 1) % 3])];
      h = std::max(h, std::hypot(q.r - p.r, q.z - p.z));
    }
  }
  return h;
}

double min_angle(const Mesh& mesh) {
  double best = std::numbers::pi;
  for (const auto& t : mesh.triangles) {
    for (int e = 0; e < 3; ++e) {
      best = std::min(best, angle_at(mesh.nodes[static_cast<std::size_t>(t.v[e])],
                                     mesh.nodes[static_cast<std::size_t>(t.v[(e + 1) % 3])],
                                     mesh.nodes[static_cast<std::size_t>(t.v[(e + 2) % 3])]));
    }
  }
  return best;
}

bool is_conforming(const Mesh& mesh) {
  std::map<std::pair<int, int>, int> uses;
  for (const auto& t : mesh.triangles) {
    for (int e = 0; e < 3; ++e) ++uses[std::minmax(t.v[e], t.v[(e + 1) % 3])];
  }
  std::map<std::pair<int, int>, int> tagged;
  for (const auto& b : mesh.boundary) ++tagged[std::minmax(b.a, b.b)];
  for (const auto& [edge, count] : uses) {
    if (count > 2) return false;
    const auto it = tagged.find(edge);
    const int tags = it == tagged.end() ? 0 : it->second;
    if (count == 1 && tags != 1) return false;
    if (count == 2 && tags != 0) return false;
  }
  return tagged.size() == mesh.boundary.size() &&
         std::all_of(tagged.begin(), tagged.end(), [&](const auto& kv) { return uses.count(kv.first) == 1; });
}

void write_text(std::ostream& out, const Mesh& mesh) {
  out << "nodes " << mesh.nodes.size() << " triangles " << mesh.triangles.size() << '\n';
  char buf[96];
  for (std::size_t i = 0; i < mesh.nodes.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%zu %.17g %.17g\n", i, mesh.nodes[i].r, mesh.nodes[i].z);
    out << buf;
  }
  for (std::size_t i = 0; i < mesh.triangles.size(); ++i) {
    const auto& v = mesh.triangles[i].v;
    out << i << ' ' << v[0] << ' ' << v[1] << ' ' << v[2] << '\n';
  }
  for (const auto& b : mesh.boundary) out << b.a << ' ' << b.b << ' ' << to_string(b.tag) << '\n';
}

Mesh read_text(std::istream& in) {
  std::string word1, word2;
  std::size_t n_nodes = 0, n_tris = 0;
  if (!(in >> word1 >> n_nodes >> word2 >> n_tris) || word1 != "nodes" || word2 != "triangles") {
    throw std::runtime_error("mesh: malformed header");
  }
  Mesh mesh;
  mesh.nodes.resize(n_nodes);
  for (std::size_t i = 0; i < n_nodes; ++i) {
    std::size_t id;
    if (!(in >> id >> mesh.nodes[i].r >> mesh.nodes[i].z) || id != i) {
      throw std::runtime_error("mesh: malformed node line");
    }
  }
  mesh.triangles.resize(n_tris);
  for (std::size_t i = 0; i < n_tris; ++i) {
    std::size_t id;
    auto& v = mesh.triangles[i].v;
    if (!(in >> id >> v[0] >> v[1] >> v[2]) || id != i) {
      throw std::runtime_error("mesh: malformed triangle line");
    }
  }
  int a, b;
  std::string tag;
  while (in >> a >> b >> tag) mesh.boundary.push_back({a, b, parse_tag(tag)});

  for (const auto& n : mesh.nodes) {
    mesh.geometry.r_max = std::max(mesh.geometry.r_max, n.r);
    mesh.geometry.d = std::max(mesh.geometry.d, n.z);
  }
  for (const auto& e : mesh.boundary) {
    if (e.tag != BoundaryTag::WindowNeumann) continue;
    for (const int v : {e.a, e.b}) {
      mesh.geometry.a = std::max(mesh.geometry.a, mesh.nodes[static_cast<std::size_t>(v)].r);
    }
  }
  for (std::size_t i = 0; i < mesh.nodes.size(); ++i) {
    if (mesh.geometry.a > 0.0 && mesh.nodes[i].z == 0.0 && mesh.nodes[i].r == mesh.geometry.a) {
      mesh.junction = static_cast<int>(i);
    }
  }
  mesh.h = max_edge_length(mesh);
  return mesh;
}

}  // namespace abguide::mesh
