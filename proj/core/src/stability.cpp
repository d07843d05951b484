#include "perifem/stability.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "perifem/errors.hpp"

namespace perifem {

namespace {

double dot_plain(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

PowerResult power_once(int n, const std::function<void(const double*, double*)>& apply_a,
                       const std::function<void(double*)>& solve_m,
                       const std::function<double(const double*, const double*)>& dot_m,
                       const PowerOpts& opts, std::uint64_t seed,
                       const std::function<void(double*)>& project) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  std::vector<double> x(n), ax(n);
  for (double& v : x) v = dist(rng);
  if (project) project(x.data());
  const double nx = std::sqrt(dot_m(x.data(), x.data()));
  if (!(nx > 0.0)) throw SolverError("power iteration: degenerate start vector");
  for (double& v : x) v /= nx;

  PowerResult res;
  double rq_prev = 0.0, rq_prev2 = 0.0;
  int have = 0;
  for (int it = 1; it <= opts.max_iter; ++it) {
    apply_a(x.data(), ax.data());
    const double rq = dot_plain(x, ax); // x is M-normalized
    res.iterations = it;
    if (have >= 1) {
      res.rel_change = std::abs(rq - rq_prev) / std::max(std::abs(rq), 1e-300);
      if (res.rel_change < opts.tol) {
        // Aitken extrapolation of the quotient sequence guards against a
        // slowly contracting tail that merely looks settled.
        bool accept = true;
        if (have >= 2) {
          const double d1 = rq_prev - rq_prev2;
          const double d2 = rq - rq_prev;
          if (d1 != 0.0) {
            const double rho = d2 / d1;
            if (rho > 0.0 && rho < 0.999) {
              const double est = std::abs(d2) * rho / (1.0 - rho);
              accept = est <= 10.0 * opts.tol * std::max(std::abs(rq), 1e-300);
            }
          }
        }
        if (accept) {
          res.mu_raw = rq;
          res.converged = true;
          res.eigvec = x;
          return res;
        }
      }
    }
    rq_prev2 = rq_prev;
    rq_prev = rq;
    have = std::min(have + 1, 2);
    res.mu_raw = rq;

    solve_m(ax.data());
    const double nz = std::sqrt(dot_m(ax.data(), ax.data()));
    if (!(nz > 0.0)) throw SolverError("power iteration: operator maps start vector to zero");
    for (int i = 0; i < n; ++i) x[i] = ax[i] / nz;
  }
  res.eigvec = x;
  return res;
}

} // namespace

PowerResult power_iteration(int n, const std::function<void(const double*, double*)>& apply_a,
                            const std::function<void(double*)>& solve_m,
                            const std::function<double(const double*, const double*)>& dot_m,
                            const PowerOpts& opts) {
  return power_once(n, apply_a, solve_m, dot_m, opts, opts.seed, nullptr);
}

SpectralEstimate rayleigh_sup(const Mesh& mesh, const HorizonTable& table,
                              const PotentialSpec& pot, double epsilon, MassMode mass_mode,
                              const PowerOpts& opts) {
  const int n = mesh.n_nodes();
  const int d = mesh.d;
  const int len = n * d;
  const MassMatrix mass = assemble_mass(mesh);
  ForceContext ctx{pot, epsilon, &table, &mesh};

  auto zero_boundary = [&](double* x) {
    for (int i = 0; i < n; ++i) {
      if (!mesh.on_boundary[i]) continue;
      for (int c = 0; c < d; ++c) x[i * d + c] = 0.0;
    }
  };

  std::vector<double> force;
  auto apply_a = [&](const double* x, double* y) {
    FeField uf = make_field(mesh, std::vector<double>(x, x + len));
    assemble_weak_pd_force(ctx, uf, force, true);
    for (int i = 0; i < len; ++i) y[i] = -force[i];
  };
  auto solve_m = [&](double* z) {
    std::vector<double> rhs(z, z + len);
    const std::vector<double> sol = (mass_mode == MassMode::lumped)
                                        ? mass.solve_lumped(rhs, true)
                                        : mass.solve(rhs, true);
    std::copy(sol.begin(), sol.end(), z);
  };
  auto dot_m = [&](const double* a, const double* b) {
    std::vector<double> av(a, a + len), bv(b, b + len);
    return (mass_mode == MassMode::lumped) ? mass.inner_lumped(av, bv) : mass.inner(av, bv);
  };

  SpectralEstimate est;
  est.mass_mode = mass_mode;
  PowerResult best;
  bool any = false;
  for (int trial = 0; trial < std::max(1, opts.restarts); ++trial) {
    const PowerResult r = power_once(len, apply_a, solve_m, dot_m, opts,
                                     opts.seed + 0x9e37ull * trial, zero_boundary);
    est.iterations += r.iterations;
    if (!any || r.mu_raw > best.mu_raw) {
      best = r;
      any = true;
    }
  }
  if (!best.converged)
    throw SolverError("rayleigh estimate did not converge; last quotient " +
                      std::to_string(best.mu_raw));
  if (!(best.mu_raw > 0.0))
    throw SolverError("rayleigh estimate non-positive: " + std::to_string(best.mu_raw));

  est.mu_raw = best.mu_raw;
  est.mu_max = best.mu_raw * (1.0 + 1e-6);
  est.dt_max = 2.0 / std::sqrt(est.mu_max);
  est.residual = best.rel_change;
  est.converged = best.converged;
  est.eigvec = std::move(best.eigvec);
  return est;
}

DiscreteEnergy discrete_energy(const ForceContext& ctx, const MassMatrix& mass,
                               MassMode mass_mode, const std::vector<double>& u_k,
                               const std::vector<double>& u_k1, double dt) {
  const std::size_t len = u_k.size();
  std::vector<double> du(len), um(len);
  for (std::size_t i = 0; i < len; ++i) {
    du[i] = (u_k1[i] - u_k[i]) / dt;
    um[i] = 0.5 * (u_k1[i] + u_k[i]);
  }
  const FeField duf = make_field(*ctx.mesh, du);
  const FeField umf = make_field(*ctx.mesh, um);

  DiscreteEnergy e;
  const double mdu =
      (mass_mode == MassMode::lumped) ? mass.inner_lumped(du, du) : mass.inner(du, du);
  e.kinetic_term = 0.5 * mdu;
  e.correction_term = -(dt * dt / 8.0) * bilinear_a_linear(ctx, duf, duf);
  e.stiffness_term = 0.5 * bilinear_a_linear(ctx, umf, umf);
  e.value = e.kinetic_term + e.correction_term + e.stiffness_term;
  return e;
}

ConservationReport conservation_check(const ForceContext& ctx, const MassMatrix& mass,
                                      MassMode mass_mode,
                                      const std::vector<std::vector<double>>& states,
                                      double dt) {
  ConservationReport rep;
  if (states.size() < 2) return rep;
  rep.energies.reserve(states.size() - 1);
  for (std::size_t k = 0; k + 1 < states.size(); ++k) {
    const DiscreteEnergy e = discrete_energy(ctx, mass, mass_mode, states[k], states[k + 1], dt);
    rep.energies.push_back(e.value);
  }
  rep.e0 = rep.energies.front();
  const double denom = std::abs(rep.e0) > 0.0 ? std::abs(rep.e0) : 1.0;
  for (double e : rep.energies)
    rep.max_rel_drift = std::max(rep.max_rel_drift, std::abs(e - rep.e0) / denom);
  return rep;
}

} // namespace perifem
