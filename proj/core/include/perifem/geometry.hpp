#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <vector>

namespace perifem {

/// Spatial point / vector. The second component is ignored in 1D.
using Point = std::array<double, 2>;

inline Point operator+(Point a, Point b) { return {a[0] + b[0], a[1] + b[1]}; }
inline Point operator-(Point a, Point b) { return {a[0] - b[0], a[1] - b[1]}; }
inline Point operator*(double s, Point a) { return {s * a[0], s * a[1]}; }
inline double dot(Point a, Point b) { return a[0] * b[0] + a[1] * b[1]; }

/// Axis-aligned domain box.
struct Box {
  int d = 1;
  std::array<double, 2> lo{0.0, 0.0};
  std::array<double, 2> hi{1.0, 1.0};

  double extent(int axis) const { return hi[axis] - lo[axis]; }
  double min_extent() const;
  bool contains(Point x, double tol = 0.0) const;
  /// Distance to the boundary; negative outside the closure.
  double boundary_distance(Point x) const;
};

/// Cubic smoothstep 3t^2 - 2t^3 clamped to [0,1].
double smoothstep(double t);

/// Boundary taper omega(x): 0 on and outside the boundary, 1 at depth >= eps,
/// smoothstep(dist/eps) in between. C^1 across the inner match.
double taper_omega(const Box& box, Point x, double eps);

/// Conforming simplex mesh with linear elements. 1D segments or a structured
/// 2D triangulation (each grid cell split along the same diagonal).
struct Mesh {
  int d = 1;
  Box box;
  std::vector<Point> nodes;
  std::vector<std::array<int, 3>> elems; // 1D uses the first two entries
  std::vector<std::uint8_t> on_boundary;
  double h = 0.0; // max element diameter

  // Structured-grid acceleration for point location; nx == 0 means absent
  // (mesh loaded from file) and lookups fall back to a linear scan.
  int nx = 0, ny = 0;
  double dx = 0.0, dy = 0.0;

  int n_nodes() const { return static_cast<int>(nodes.size()); }
  int n_elems() const { return static_cast<int>(elems.size()); }
  int nodes_per_elem() const { return d + 1; }
  std::vector<int> boundary_nodes() const;
  int n_interior() const;
};

/// Uniform mesh over the box with realized diameter h <= h_request.
Mesh build_uniform_mesh(const Box& box, double h_request);

double element_volume(const Mesh& mesh, int e);
double element_diameter(const Mesh& mesh, int e);

/// Element containing x with barycentric coordinates (d+1 entries written).
/// Returns -1 if x lies outside the mesh.
int locate(const Mesh& mesh, Point x, double* bary);

/// Plain-text mesh exchange format:
///   pdm <d> <n_nodes> <n_elems>
///   <n_nodes> coordinate lines (d values each)
///   <n_elems> connectivity lines (d+1 zero-based node ids)
///   one line of boundary node ids (possibly empty)
Mesh read_mesh_text(std::istream& in);
void write_mesh_text(const Mesh& mesh, std::ostream& out);

} // namespace perifem
