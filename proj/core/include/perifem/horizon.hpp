#pragma once

#include <vector>

#include "perifem/geometry.hpp"
#include "perifem/potential.hpp"

namespace perifem {

/// Midpoint-lattice quadrature of the unit ball used for all horizon
/// integrals. Cells of spacing 1/m are kept with their full volume when all
/// subsamples fall inside the ball and with a partial-volume weight
/// (4^d-point subsample count) when the sphere cuts them; a cut cell's
/// offset is the centroid of its inside subsamples so every |xi_q| < 1.
/// Weights sum to the unit ball volume as m grows. The table is symmetric:
/// each offset has an exact mirror with identical weight.
struct HorizonTable {
  int d = 1;
  int m = 0;
  double epsilon = 0.0;
  JKind j = JKind::linear_decay;
  std::vector<Point> xi;       // dimensionless offsets, |xi| < 1
  std::vector<double> w;       // cell weights
  std::vector<double> r;       // |xi|
  std::vector<double> jval;    // J(|xi|)
  std::vector<int> mirror;     // index of the offset -xi

  int size() const { return static_cast<int>(xi.size()); }
  double weight_sum() const;
};

/// Lattice refinement giving spacing eps/m close to h/2.
int default_m(double eps, double h);

HorizonTable build_horizon_quadrature(double eps, int m, JKind j, int d);

} // namespace perifem
