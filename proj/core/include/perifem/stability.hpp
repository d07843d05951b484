#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "perifem/assembly.hpp"
#include "perifem/dynamics.hpp"
#include "perifem/linalg.hpp"

namespace perifem {

struct PowerOpts {
  double tol = 1e-8;      // relative change of successive Rayleigh quotients
  int max_iter = 10000;
  int restarts = 3;
  std::uint64_t seed = 0x9e3779b97f4a7c15ull;
};

struct PowerResult {
  double mu_raw = 0.0;    // final Rayleigh quotient (approaches mu from below)
  int iterations = 0;
  double rel_change = 0.0;
  bool converged = false;
  std::vector<double> eigvec;
};

/// Generic power iteration for the generalized problem A x = mu M x:
/// x <- M^{-1} A x, normalized in the M norm. apply_a writes A x into its
/// second argument; solve_m applies M^{-1} in place; dot_m is the M inner
/// product. Throws SolverError when no restart converges.
PowerResult power_iteration(int n,
                            const std::function<void(const double*, double*)>& apply_a,
                            const std::function<void(double*)>& solve_m,
                            const std::function<double(const double*, const double*)>& dot_m,
                            const PowerOpts& opts = {});

struct SpectralEstimate {
  double mu_raw = 0.0;
  double mu_max = 0.0; // mu_raw inflated by 1e-6 for a conservative dt_max
  double dt_max = 0.0; // 2 / sqrt(mu_max)
  int iterations = 0;
  double residual = 0.0;
  bool converged = false;
  MassMode mass_mode = MassMode::consistent;
  std::vector<double> eigvec; // full-length vector, boundary entries zero
};

/// Supremum of a_l(u,u)/(u,u)_M over the interior finite element space,
/// computed matrix-free.
SpectralEstimate rayleigh_sup(const Mesh& mesh, const HorizonTable& table,
                              const PotentialSpec& pot, double epsilon,
                              MassMode mass_mode, const PowerOpts& opts = {});

struct DiscreteEnergy {
  double value = 0.0;
  double kinetic_term = 0.0;
  double correction_term = 0.0; // the -(dt^2/4) a_l(du, du) part
  double stiffness_term = 0.0;
};

/// Energy of the linearized scheme for the pair (u^k, u^{k+1}):
/// 1/2 [ ||du||^2 - (dt^2/4) a_l(du,du) + a_l(um,um) ] with
/// du = (u^{k+1}-u^k)/dt and um = (u^{k+1}+u^k)/2.
DiscreteEnergy discrete_energy(const ForceContext& ctx, const MassMatrix& mass,
                               MassMode mass_mode, const std::vector<double>& u_k,
                               const std::vector<double>& u_k1, double dt);

struct ConservationReport {
  double e0 = 0.0;
  double max_rel_drift = 0.0;
  std::vector<double> energies;
};

/// Discrete energy over consecutive recorded states of a zero-forcing linear
/// run; drift is max |E^k - E^0| / |E^0| (zero when E^0 = 0).
ConservationReport conservation_check(const ForceContext& ctx, const MassMatrix& mass,
                                      MassMode mass_mode,
                                      const std::vector<std::vector<double>>& states,
                                      double dt);

} // namespace perifem
