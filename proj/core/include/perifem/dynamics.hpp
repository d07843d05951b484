#pragma once

#include <functional>
#include <vector>

#include "perifem/assembly.hpp"
#include "perifem/field.hpp"
#include "perifem/horizon.hpp"
#include "perifem/linalg.hpp"

namespace perifem {

enum class Form { strong, weak };
enum class Model { nonlinear, linear };
enum class MassMode { consistent, lumped };

/// Body force sampled directly at mesh nodes (fast path for strong-form runs
/// whose forcing is expensive to evaluate pointwise).
using NodalBodyFn = std::function<Point(double t, int node)>;

struct RunSetup {
  const Mesh* mesh = nullptr;
  const HorizonTable* table = nullptr;
  const MassMatrix* mass = nullptr; // assembled on demand when null
  PotentialSpec pot;
  double epsilon = 0.0;
  Form form = Form::weak;
  Model model = Model::nonlinear;
  MassMode mass_mode = MassMode::consistent;
  double dt = 0.0; // dt <= 0 with the linear model triggers the CFL choice 0.9 dt_max
  double T = 0.0;
  PointFn u0; // null means zero
  PointFn v0;
  std::vector<double> u0_nodal; // non-empty: use these nodal values directly
  std::vector<double> v0_nodal;
  BodyFn b;             // null means zero
  NodalBodyFn b_nodal;  // strong form only; overrides b when set
  int snapshot_stride = 1;
  bool record_states = false;
  bool record_energy = true;
  double growth_limit = 1e6;
  // Called at each emitted snapshot step with v^k = (u^{k+1}-u^k)/dt.
  std::function<void(int k, double t, const std::vector<double>& u,
                     const std::vector<double>& v)>
      snapshot_cb;
  std::function<void(int k, double t, double kinetic, double potential, double work_bound)>
      energy_cb;
};

struct EnergyRow {
  int step = 0;
  double time = 0.0;
  double kinetic = 0.0;
  double potential = 0.0;
  double total = 0.0;
  double work_bound = 0.0; // sum_{j<=k} ||b^j|| dt
};

struct RunResult {
  int steps = 0;
  double dt = 0.0;
  double T = 0.0;
  bool auto_dt = false;
  double dt_max = 0.0; // set when the CFL estimate was invoked
  std::vector<double> u_final;
  std::vector<double> v_final; // forward difference at the final step
  std::vector<EnergyRow> energy;
  std::vector<std::vector<double>> states; // u^0..u^K when record_states
  double max_abs_u = 0.0;
};

/// Central difference update u_next = dt^2 a + 2 u - u_prev.
std::vector<double> central_step(const std::vector<double>& u,
                                 const std::vector<double>& u_prev,
                                 const std::vector<double>& accel, double dt);

/// Startup step u^1 = u^0 + dt v^0 + (dt^2/2) a^0.
std::vector<double> first_step_vec(const std::vector<double>& u0,
                                   const std::vector<double>& v0,
                                   const std::vector<double>& accel0, double dt);

/// Acceleration, i.e. the right side of u_tt = force + b with density one:
/// strong form evaluates nodal force densities, weak form solves the mass
/// system against the assembled load. Boundary rows come out exactly zero.
/// When bnorm is non-null it receives ||b(t)||_{L2} (zero without forcing).
void compute_accel(const RunSetup& setup, const MassMatrix& mass,
                   const std::vector<double>& u, double t, std::vector<double>& out,
                   double* bnorm = nullptr);

/// Runs the scheme to time T. Throws InstabilityError when the displacement
/// grows past growth_limit times the initial data scale or turns non-finite.
RunResult run(const RunSetup& setup);

struct StabilityCheckResult {
  bool pass = true;
  double worst_margin = 0.0; // min over k of bound_k - E^k
  int worst_step = 0;
};

/// Checks E^k <= (sqrt(E^0) + sum_{j<=k} ||b^j|| dt)^2 (1+rel_slack)
/// + slack_c * t_k * dt * scale_k against the recorded energy rows.
StabilityCheckResult energy_stability_check(const std::vector<EnergyRow>& rows, double dt,
                                            double rel_slack = 1e-3, double slack_c = 0.0);

} // namespace perifem
