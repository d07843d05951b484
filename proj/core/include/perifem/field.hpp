#pragma once

#include <functional>
#include <vector>

#include "perifem/geometry.hpp"

namespace perifem {

/// Closed-form vector field x -> value (second component ignored in 1D).
using PointFn = std::function<Point(Point)>;

/// Piecewise-linear finite element field on a mesh, extended by zero
/// outside the domain closure.
struct FeField {
  const Mesh* mesh = nullptr;
  std::vector<double> values; // n_nodes * d, node-major

  int dim() const { return mesh->d; }
  Point at_node(int i) const;
  void set_node(int i, Point v);
  /// Interpolated value; zero outside the mesh.
  Point eval(Point x) const;
};

FeField make_zero_field(const Mesh& mesh);
FeField make_field(const Mesh& mesh, const std::vector<double>& values);

/// Nodal interpolant I_h u (boundary nodes keep their sampled values).
FeField interpolate_function(const Mesh& mesh, const PointFn& u);

/// Nonlocal strain of the bond from x to y = x + eps*xi:
///   S = (u(y) - u(x)) . e / (eps |xi|),  e = xi/|xi|.
/// Symmetric under evaluating the reversed bond at the other endpoint.
/// Throws DomainError when xi = 0.
double strain(const FeField& u, Point x, Point xi, double eps);

/// Strain of a closed-form field, same convention.
double strain_fn(const PointFn& u, int d, Point x, Point xi, double eps);

} // namespace perifem
