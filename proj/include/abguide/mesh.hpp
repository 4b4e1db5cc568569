#pragma once

// Structured triangulations of the axisymmetric half-strip
// [0, r_max] x [0, d] in the (r, z) plane, with power-law grading toward
// the singular lines of the mode problem: the axis r = 0 and the point
// (a, 0) where the floor switches from Neumann to Dirichlet.

#include <array>
#include <iosfwd>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "abguide/analytic.hpp"

namespace abguide::mesh {

enum class BoundaryTag {
  Axis,                 // r = 0
  WindowNeumann,        // z = 0, r < a
  BottomDirichlet,      // z = 0, r > a
  TopDirichlet,         // z = d
  TruncationDirichlet,  // r = r_max
};

std::string_view to_string(BoundaryTag tag);
BoundaryTag parse_tag(std::string_view name);

/// Tags whose nodes carry an essential (zero) condition.
bool is_essential(BoundaryTag tag);

struct Node {
  double r = 0.0;
  double z = 0.0;
};

/// Vertex ids in counterclockwise order.
struct Triangle {
  std::array<int, 3> v{};
};

struct BoundaryEdge {
  int a = 0;
  int b = 0;
  BoundaryTag tag = BoundaryTag::Axis;
};

struct Mesh {
  Geometry geometry;
  std::vector<Node> nodes;
  std::vector<Triangle> triangles;
  std::vector<BoundaryEdge> boundary;
  double h = 0.0;      // longest edge
  int junction = -1;   // node at (a, 0), -1 when a = 0
};

struct MeshOptions {
  /// Target longest edge.
  double h = 0.25;
  /// Power-law exponent of the grading toward (a, 0); 1 means uniform.
  double grading = 3.0;
  /// Bessel order of the mode; sets the axis grading. Without it the axis
  /// uses `grading`.
  std::optional<double> axis_order;
  /// Each level doubles every cell count of the base layout.
  int level = 0;
};

/// Throws std::invalid_argument if h > min(d, r_max)/4 or the geometry is
/// invalid.
Mesh build_mesh(const Geometry& geometry, const MeshOptions& options);

/// Closed cylinder r <= radius: the whole floor is Neumann and r = radius is
/// Dirichlet (tagged TruncationDirichlet). Used as an analytic benchmark.
Mesh build_cylinder_mesh(double radius, double d, const MeshOptions& options);

/// Red refinement: every triangle splits into four similar children.
Mesh refine(const Mesh& mesh);

double signed_area(const Mesh& mesh, const Triangle& t);
double max_edge_length(const Mesh& mesh);
/// Smallest interior angle over all triangles, in radians.
double min_angle(const Mesh& mesh);

/// Each interior edge has two triangles, each boundary edge one, and the
/// tagged boundary edges are exactly the edges with one triangle.
bool is_conforming(const Mesh& mesh);

/// Plain-text export: "nodes N triangles T", node lines "id r z", triangle
/// lines "id i j k", then boundary lines "i j tag".
void write_text(std::ostream& out, const Mesh& mesh);
Mesh read_text(std::istream& in);

namespace detail {

struct SingularPoint {
  double position = 0.0;
  double exponent = 1.0;  // power-law grading exponent, 1 = none
};

/// Node coordinates on [x0, x1] with spacing <= `spacing` away from the
/// singular points and power-law clustering within `zone` of each of them.
/// Singular points are always nodes.
std::vector<double> graded_line(double x0, double x1, std::span<const SingularPoint> singular,
                                double spacing, double zone, int level);

}  // namespace detail

}  // namespace abguide::mesh
