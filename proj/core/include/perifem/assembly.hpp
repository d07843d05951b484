#pragma once

#include <functional>
#include <vector>

#include "perifem/field.hpp"
#include "perifem/geometry.hpp"
#include "perifem/horizon.hpp"
#include "perifem/linalg.hpp"
#include "perifem/potential.hpp"

namespace perifem {

/// Time-dependent body force density b(t, x).
using BodyFn = std::function<Point(double t, Point x)>;

/// Everything a bond-force evaluation needs.
struct ForceContext {
  PotentialSpec pot;
  double epsilon = 0.0;
  const HorizonTable* table = nullptr;
  const Mesh* mesh = nullptr;
};

/// Peridynamic force density (the negative potential gradient) at a point,
/// evaluated against a finite element displacement field. With linearized
/// set, the bond stiffness is frozen at f'(0).
Point pd_force_at_point(const ForceContext& ctx, const FeField& u, Point x,
                        bool linearized = false);

/// Same force density for a closed-form displacement (used by manufactured
/// solutions; the callable must already vanish outside the body).
Point pd_force_at_point_fn(const ForceContext& ctx, const PointFn& u, Point x,
                           bool linearized = false);

/// Strong form right-hand side: nodal force density plus body force at each
/// node, boundary rows zeroed. Output is n_nodes * d, overwritten.
void nodal_force_strong(const ForceContext& ctx, const FeField& u, const BodyFn* b,
                        double t, std::vector<double>& out, bool linearized = false);

/// Weak form peridynamic load vector F_i = -a(u, phi_i), assembled bond-wise
/// so that F matches the gradient of the discrete potential energy exactly.
/// Boundary rows zeroed. Output overwritten.
void assemble_weak_pd_force(const ForceContext& ctx, const FeField& u,
                            std::vector<double>& out, bool linearized = false);

/// Adds the weak body force (phi_i, b(t)) to out; boundary rows untouched
/// here (callers zero them after). Optionally reports ||b(t)||_{L2}.
void add_weak_body_force(const Mesh& mesh, const BodyFn& b, double t,
                         std::vector<double>& out, double* l2_b = nullptr);

/// Nonlocal bilinear form a(u, v) with bond stiffness from u; the linear
/// variant freezes f'(0).
double bilinear_a(const ForceContext& ctx, const FeField& u, const FeField& v);
double bilinear_a_linear(const ForceContext& ctx, const FeField& u, const FeField& v);

/// Discrete nonlocal potential energy of u (nonnegative, zero for rigid u).
double pd_energy(const ForceContext& ctx, const FeField& u);

/// L2 projection of a closed-form field onto the P1 space. With
/// constrain_boundary the boundary nodes are pinned to zero.
FeField l2_project(const Mesh& mesh, const MassMatrix& mass, const PointFn& fn,
                   bool constrain_boundary);

/// Element-quadrature L2 norms (degree-4 rule by default).
double l2_norm_fn(const Mesh& mesh, const PointFn& fn, int degree = 4);
double l2_error_field_fn(const Mesh& mesh, const FeField& uh, const PointFn& fn,
                         int degree = 4);
/// Distance in L2 between two pointwise-evaluable vector functions.
double l2_distance_fn(const Mesh& mesh, const PointFn& f, const PointFn& g,
                      int degree = 4);

} // namespace perifem
