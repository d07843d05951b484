#include "perifem/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

#include "perifem/errors.hpp"
#include "perifem/stability.hpp"

namespace perifem {

std::vector<double> central_step(const std::vector<double>& u,
                                 const std::vector<double>& u_prev,
                                 const std::vector<double>& accel, double dt) {
  std::vector<double> out(u.size());
  for (std::size_t i = 0; i < u.size(); ++i)
    out[i] = dt * dt * accel[i] + 2.0 * u[i] - u_prev[i];
  return out;
}

std::vector<double> first_step_vec(const std::vector<double>& u0,
                                   const std::vector<double>& v0,
                                   const std::vector<double>& accel0, double dt) {
  std::vector<double> out(u0.size());
  for (std::size_t i = 0; i < u0.size(); ++i)
    out[i] = u0[i] + dt * v0[i] + 0.5 * dt * dt * accel0[i];
  return out;
}

namespace {

double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

bool all_finite(const std::vector<double>& v) {
  for (double x : v) {
    if (!std::isfinite(x)) return false;
  }
  return true;
}

std::vector<double> nodal_body_vector(const RunSetup& setup, double t) {
  const Mesh& mesh = *setup.mesh;
  const int n = mesh.n_nodes();
  const int d = mesh.d;
  std::vector<double> bvec(static_cast<std::size_t>(n) * d, 0.0);
  for (int i = 0; i < n; ++i) {
    if (mesh.on_boundary[i]) continue;
    const Point bv = setup.b_nodal ? setup.b_nodal(t, i) : setup.b(t, mesh.nodes[i]);
    for (int c = 0; c < d; ++c) bvec[static_cast<std::size_t>(i) * d + c] = bv[c];
  }
  return bvec;
}

} // namespace

void compute_accel(const RunSetup& setup, const MassMatrix& mass,
                   const std::vector<double>& u, double t, std::vector<double>& out,
                   double* bnorm) {
  const Mesh& mesh = *setup.mesh;
  const int n = mesh.n_nodes();
  const int d = mesh.d;
  ForceContext ctx{setup.pot, setup.epsilon, setup.table, setup.mesh};
  const bool linearized = setup.model == Model::linear;
  if (bnorm) *bnorm = 0.0;

  if (setup.form == Form::strong) {
    FeField uf = make_field(mesh, u);
    nodal_force_strong(ctx, uf, nullptr, t, out, linearized);
    if (setup.b || setup.b_nodal) {
      const std::vector<double> bvec = nodal_body_vector(setup, t);
      for (std::size_t i = 0; i < out.size(); ++i) out[i] += bvec[i];
      if (bnorm) *bnorm = std::sqrt(std::max(0.0, mass.inner(bvec, bvec)));
    }
    return;
  }

  FeField uf = make_field(mesh, u);
  std::vector<double> rhs;
  assemble_weak_pd_force(ctx, uf, rhs, linearized);
  if (setup.b) {
    double bn = 0.0;
    add_weak_body_force(mesh, setup.b, t, rhs, &bn);
    if (bnorm) *bnorm = bn;
    for (int i = 0; i < n; ++i) {
      if (!mesh.on_boundary[i]) continue;
      for (int c = 0; c < d; ++c) rhs[static_cast<std::size_t>(i) * d + c] = 0.0;
    }
  }
  if (setup.mass_mode == MassMode::lumped)
    out = mass.solve_lumped(rhs, true);
  else
    out = mass.solve(rhs, true);
}

namespace {

struct EnergyEval {
  const RunSetup* setup;
  const MassMatrix* mass;
  ForceContext ctx;

  double potential(const std::vector<double>& u) const {
    FeField uf = make_field(*setup->mesh, u);
    if (setup->model == Model::linear) return 0.5 * bilinear_a_linear(ctx, uf, uf);
    return pd_energy(ctx, uf);
  }
  double kinetic(const std::vector<double>& v) const {
    return 0.5 * mass->inner(v, v);
  }
};

} // namespace

RunResult run(const RunSetup& setup) {
  if (!setup.mesh || !setup.table) throw DomainError("run: mesh and horizon table required");
  const Mesh& mesh = *setup.mesh;
  const int n = mesh.n_nodes();
  const int d = mesh.d;
  const std::size_t len = static_cast<std::size_t>(n) * d;
  if (setup.T <= 0.0) throw DomainError("run: T must be positive");
  if (setup.form == Form::weak && setup.b_nodal && !setup.b)
    throw DomainError("run: nodal body force requires the strong form");

  MassMatrix local_mass;
  const MassMatrix* mass = setup.mass;
  if (!mass) {
    local_mass = assemble_mass(mesh);
    mass = &local_mass;
  }

  RunResult res;
  res.T = setup.T;
  double dt = setup.dt;
  int steps = 0;
  if (dt <= 0.0) {
    if (setup.model != Model::linear)
      throw DomainError("run: dt required for the nonlinear model");
    const SpectralEstimate est =
        rayleigh_sup(mesh, *setup.table, setup.pot, setup.epsilon, setup.mass_mode);
    res.dt_max = est.dt_max;
    res.auto_dt = true;
    const double dt_target = 0.9 * est.dt_max;
    steps = static_cast<int>(std::ceil(setup.T / dt_target * (1.0 - 1e-12)));
    steps = std::max(steps, 1);
    dt = setup.T / steps;
  } else {
    if (dt >= 1.0) throw DomainError("run: dt must lie in (0,1)");
    steps = static_cast<int>(std::llround(setup.T / dt));
    if (steps < 1 || std::abs(steps * dt - setup.T) > 1e-8 * std::max(1.0, setup.T))
      throw DomainError("run: T must be an integer multiple of dt");
  }
  res.dt = dt;
  res.steps = steps;

  // Initial data: the weak form projects, the strong form interpolates;
  // ready-made nodal vectors bypass both.
  std::vector<double> u_prev(len, 0.0), v0vec(len, 0.0);
  const PointFn zero_fn = [](Point) { return Point{0.0, 0.0}; };
  auto initial = [&](const std::vector<double>& nodal, const PointFn& fn) {
    if (!nodal.empty()) {
      if (nodal.size() != len) throw DomainError("run: nodal initial data has wrong length");
      return nodal;
    }
    if (setup.form == Form::weak) return l2_project(mesh, *mass, fn, true).values;
    return interpolate_function(mesh, fn).values;
  };
  u_prev = initial(setup.u0_nodal, setup.u0 ? setup.u0 : zero_fn);
  v0vec = initial(setup.v0_nodal, setup.v0 ? setup.v0 : zero_fn);
  for (int i = 0; i < n; ++i) {
    if (!mesh.on_boundary[i]) continue;
    for (int c = 0; c < d; ++c) {
      u_prev[static_cast<std::size_t>(i) * d + c] = 0.0;
      v0vec[static_cast<std::size_t>(i) * d + c] = 0.0;
    }
  }

  EnergyEval energy{&setup, mass,
                    ForceContext{setup.pot, setup.epsilon, setup.table, setup.mesh}};

  std::vector<double> accel;
  double bnorm = 0.0;
  compute_accel(setup, *mass, u_prev, 0.0, accel, &bnorm);
  double work = bnorm * dt;

  const double scale = [&] {
    const double s = std::max({max_abs(u_prev), dt * max_abs(v0vec),
                               setup.T * setup.T * max_abs(accel)});
    return s > 0.0 ? s : 1.0;
  }();

  std::vector<double> u_curr = first_step_vec(u_prev, v0vec, accel, dt);

  auto push_energy = [&](int k, const std::vector<double>& v_for_kinetic,
                         const std::vector<double>& u_for_potential, double w) {
    if (!setup.record_energy) return;
    EnergyRow row;
    row.step = k;
    row.time = k * dt;
    row.kinetic = energy.kinetic(v_for_kinetic);
    row.potential = energy.potential(u_for_potential);
    row.total = row.kinetic + row.potential;
    row.work_bound = w;
    res.energy.push_back(row);
    if (setup.energy_cb) setup.energy_cb(k, row.time, row.kinetic, row.potential, w);
  };

  std::vector<double> v_snapshot(len, 0.0);
  auto push_snapshot = [&](int k, const std::vector<double>& u,
                           const std::vector<double>& u_next) {
    if (!setup.snapshot_cb) return;
    if (k % setup.snapshot_stride != 0 && k != steps) return;
    for (std::size_t i = 0; i < len; ++i) v_snapshot[i] = (u_next[i] - u[i]) / dt;
    setup.snapshot_cb(k, k * dt, u, v_snapshot);
  };

  auto check_state = [&](int k, const std::vector<double>& u) {
    const double m = max_abs(u);
    res.max_abs_u = std::max(res.max_abs_u, m);
    if (!all_finite(u))
      throw InstabilityError("non-finite displacement at step " + std::to_string(k), k, m);
    if (m > setup.growth_limit * scale)
      throw InstabilityError("displacement grew by more than " +
                                 std::to_string(setup.growth_limit) + "x the initial scale",
                             k, m);
  };

  res.max_abs_u = max_abs(u_prev);
  if (setup.record_states) {
    res.states.push_back(u_prev);
    res.states.push_back(u_curr);
  }
  push_energy(0, v0vec, u_prev, work);
  push_snapshot(0, u_prev, u_curr);
  check_state(1, u_curr);

  std::vector<double> v_sym(len, 0.0);
  for (int k = 1; k < steps; ++k) {
    compute_accel(setup, *mass, u_curr, k * dt, accel, &bnorm);
    work += bnorm * dt;
    std::vector<double> u_next = central_step(u_curr, u_prev, accel, dt);
    if (setup.record_energy) {
      for (std::size_t i = 0; i < len; ++i) v_sym[i] = (u_next[i] - u_prev[i]) / (2.0 * dt);
      push_energy(k, v_sym, u_curr, work);
    }
    push_snapshot(k, u_curr, u_next);
    check_state(k + 1, u_next);
    u_prev = std::move(u_curr);
    u_curr = std::move(u_next);
    if (setup.record_states) res.states.push_back(u_curr);
  }

  // One virtual step past T supplies the forward velocity and the symmetric
  // kinetic term for the final row without altering the trajectory.
  compute_accel(setup, *mass, u_curr, steps * dt, accel, &bnorm);
  work += bnorm * dt;
  const std::vector<double> u_virtual = central_step(u_curr, u_prev, accel, dt);
  if (steps >= 1 && setup.record_energy) {
    for (std::size_t i = 0; i < len; ++i) v_sym[i] = (u_virtual[i] - u_prev[i]) / (2.0 * dt);
    push_energy(steps, v_sym, u_curr, work);
  }
  push_snapshot(steps, u_curr, u_virtual);

  res.u_final = u_curr;
  res.v_final.resize(len);
  for (std::size_t i = 0; i < len; ++i) res.v_final[i] = (u_virtual[i] - u_curr[i]) / dt;
  return res;
}

StabilityCheckResult energy_stability_check(const std::vector<EnergyRow>& rows, double dt,
                                            double rel_slack, double slack_c) {
  StabilityCheckResult out;
  if (rows.empty()) return out;
  const double e0 = std::max(0.0, rows.front().total);
  const double sqrt_e0 = std::sqrt(e0);
  bool first = true;
  for (const EnergyRow& row : rows) {
    const double base = sqrt_e0 + row.work_bound;
    const double scale = std::max(e0, base * base);
    const double bound = base * base * (1.0 + rel_slack) + slack_c * row.time * dt * scale;
    const double margin = bound - row.total;
    if (first || margin < out.worst_margin) {
      out.worst_margin = margin;
      out.worst_step = row.step;
      first = false;
    }
  }
  out.pass = out.worst_margin >= 0.0;
  return out;
}

} // namespace perifem
