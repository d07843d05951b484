#pragma once

#include <string>
#include <vector>

#include "perifem/assembly.hpp"
#include "perifem/dynamics.hpp"
#include "perifem/field.hpp"
#include "perifem/geometry.hpp"

namespace perifem {

/// Closed-form reference solution u(t,x) = cos(omega t) * U(x) with U a
/// product-sine profile vanishing on the box boundary. Evaluations outside
/// the box return zero.
struct ManufacturedCase {
  std::string id;
  int d = 1;
  double omega = 0.0;
  double amplitude = 0.0;
  Box box;

  Point u(double t, Point x) const;
  Point ut(double t, Point x) const;
  Point utt(double t, Point x) const;
  Point uttt(double t, Point x) const;
  PointFn u_at(double t) const;
  PointFn ut_at(double t) const;

  double sup_utt_l2() const;  // sup over t of ||d2u/dt2||_L2
  double sup_vtt_l2() const;  // sup over t of ||d3u/dt3||_L2
  double sup_u_h2() const;    // sup over t of the full H2 norm of u
};

/// ids: "sine1d" on [0,1], "sine2d" on [0,1]^2.
ManufacturedCase make_manufactured(const std::string& id, double omega, double amplitude);

/// Body force making the case an exact solution: b = u_tt + grad of the
/// nonlocal potential, the force term evaluated with the supplied context
/// (callers pass a horizon table refined beyond the solver's).
Point manufactured_rhs_at(const ManufacturedCase& cs, const ForceContext& oracle,
                          double t, Point x);
/// Wraps manufactured_rhs_at; the context must outlive the returned callable.
BodyFn make_manufactured_rhs(const ManufacturedCase& cs, const ForceContext* oracle);

/// Nodal body force with the force term sampled at Chebyshev values of
/// cos(omega t) and interpolated barycentrically; cuts per-step cost for
/// strong-form sweeps. Error against the direct evaluation is far below
/// discretization error (covered by a test).
NodalBodyFn make_cached_rhs_nodal(const ManufacturedCase& cs, const ForceContext* oracle,
                                  double T, int cheb_points = 12);

/// E^k = ||u_h - u(t)|| + ||v_h - v(t)|| in L2 by element quadrature.
double error_ek(const Mesh& mesh, const std::vector<double>& u_h,
                const std::vector<double>& v_h, const ManufacturedCase& cs, double t);

struct TruncationNorms {
  double tau_u = 0.0; // || du/dt(t_{k+1}) - (u^{k+1}-u^k)/dt ||
  double tau_v = 0.0; // || d2u/dt2(t_k) - (v^{k+1}-v^k)/dt ||
};
TruncationNorms truncation_norms(const ManufacturedCase& cs, const Mesh& mesh, double t_k,
                                 double dt);

/// || grad PD(u(t)) - grad PD(r_h u(t)) || with r_h the plain L2 projection;
/// both force fields use the oracle context.
double sigma_per_norm(const ManufacturedCase& cs, const ForceContext& oracle,
                      const MassMatrix& mass, double t);

struct TruncationErrors {
  double tau_u = 0.0;
  double tau_v = 0.0;
  double sigma_per = 0.0;
};
TruncationErrors truncation_errors(const ManufacturedCase& cs, const ForceContext& oracle,
                                   const MassMatrix& mass, double t_k, double dt);

struct SweepPoint {
  double resolution = 0.0;
  double sup_ek = 0.0;
};

struct RateReport {
  std::vector<SweepPoint> points;
  double slope = 0.0;     // log-log least squares
  double intercept = 0.0; // in ln space
  double r2 = 0.0;
  bool pre_asymptotic = false; // r2 below 0.99
};

RateReport fit_rates(const std::vector<SweepPoint>& points);

enum class SweepKind { spatial, temporal };

struct SweepRunSpec {
  ManufacturedCase cs;
  PotentialSpec pot;
  double epsilon = 0.0;
  Form form = Form::weak;
  Model model = Model::nonlinear;
  MassMode mass_mode = MassMode::consistent;
  double T = 0.0;
  double dt = 0.0; // used by spatial sweeps
  double h = 0.0;  // used by temporal sweeps
  int m = 0;       // horizon refinement; 0 picks the default for each mesh
  int oracle_refine = 4;
  int sample_stride = 1;
  int cheb_points = 12; // 0 disables the cached forcing path
};

/// Runs the case at each resolution (h values for spatial, dt values for
/// temporal), records sup_k E^k over sampled steps, and fits the rate.
RateReport converge_sweep(const SweepRunSpec& spec, SweepKind kind,
                          const std::vector<double>& resolutions);

struct AprioriBound {
  double exponent = 0.0;   // (1+L1) T / eps^2
  double exp_factor = 0.0; // exp(exponent)
  double term_t = 0.0;     // exp_factor * C_t T dt / (1-dt)^2
  double term_s = 0.0;     // exp_factor * exponent * h^2 * sup_u_H2 / (1-dt)^2
  double total = 0.0;
};

AprioriBound apriori_bound(double T, double eps, double h, double dt, double c_t,
                           double sup_u_h2, double l1 = 4.0);

/// Solves (1+l1) T / eps^2 = target for T.
double time_for_exponent(double target, double eps, double l1 = 4.0);

} // namespace perifem
