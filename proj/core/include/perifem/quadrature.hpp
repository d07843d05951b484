#pragma once

#include "perifem/geometry.hpp"

namespace perifem {

/// Quadrature rule on the reference simplex in barycentric coordinates.
/// Weights sum to one; multiply by the element volume.
struct SimplexRule {
  int npts = 0;
  const double (*bary)[3] = nullptr;
  const double* w = nullptr;
};

/// Rule of the given polynomial degree: degree 2 is the assembly rule
/// (2-point Gauss in 1D, 3-point in 2D), degree 4 serves error norms.
const SimplexRule& simplex_rule(int d, int degree);

/// Physical location of quadrature point q of rule on element e.
Point map_to_element(const Mesh& mesh, int e, const SimplexRule& rule, int q);

} // namespace perifem
