#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include <Eigen/Dense>

#include "perifem/dynamics.hpp"
#include "perifem/errors.hpp"
#include "perifem/stability.hpp"

using namespace perifem;

// ============================================================================
// Power iteration on synthetic operators
// ============================================================================

TEST(Stability, PowerIterationDiagonal) {
  const auto apply_a = [](const double* x, double* y) {
    y[0] = 1.0 * x[0];
    y[1] = 3.0 * x[1];
    y[2] = 7.0 * x[2];
  };
  const auto solve_m = [](double*) {};
  const auto dot_m = [](const double* a, const double* b) {
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
  };
  PowerOpts opts;
  opts.tol = 1e-12;
  const PowerResult r = power_iteration(3, apply_a, solve_m, dot_m, opts);
  EXPECT_TRUE(r.converged);
  EXPECT_NEAR(r.mu_raw, 7.0, 1e-9);
  ASSERT_EQ(r.eigvec.size(), 3u);
  const double mag = std::abs(r.eigvec[2]);
  EXPECT_GT(mag, 0.99);
  EXPECT_LT(std::abs(r.eigvec[0]), 1e-4);
}

TEST(Stability, PowerIterationScalarStiffness) {
  // a(u, u) = 400 u^2 against unit mass: mu = 400, stable step 2/sqrt(mu) = 0.1.
  const auto apply_a = [](const double* x, double* y) { y[0] = 400.0 * x[0]; };
  const auto solve_m = [](double*) {};
  const auto dot_m = [](const double* a, const double* b) { return a[0] * b[0]; };
  const PowerResult r = power_iteration(1, apply_a, solve_m, dot_m, PowerOpts{});
  EXPECT_TRUE(r.converged);
  EXPECT_NEAR(r.mu_raw, 400.0, 1e-10);
  EXPECT_NEAR(2.0 / std::sqrt(r.mu_raw), 0.1, 1e-12);
}

TEST(Stability, PowerIterationGeneralizedMass) {
  // A = diag(1, 3, 7), M = diag(2, 1, 4): eigenvalues 0.5, 3, 1.75.
  const auto apply_a = [](const double* x, double* y) {
    y[0] = 1.0 * x[0];
    y[1] = 3.0 * x[1];
    y[2] = 7.0 * x[2];
  };
  const auto solve_m = [](double* y) {
    y[0] /= 2.0;
    y[1] /= 1.0;
    y[2] /= 4.0;
  };
  const auto dot_m = [](const double* a, const double* b) {
    return 2.0 * a[0] * b[0] + a[1] * b[1] + 4.0 * a[2] * b[2];
  };
  const PowerResult r = power_iteration(3, apply_a, solve_m, dot_m, PowerOpts{});
  EXPECT_TRUE(r.converged);
  EXPECT_NEAR(r.mu_raw, 3.0, 1e-7);
}

// ============================================================================
// Spectral bound on meshes
// ============================================================================

TEST(Stability, RayleighSupMatchesDenseSolveSmall1d) {
  Box box{1, {0.0, 0.0}, {1.0, 0.0}};
  Mesh mesh = build_uniform_mesh(box, 1.0 / 30);
  PotentialSpec pot;
  const double eps = 0.15;
  HorizonTable table = build_horizon_quadrature(eps, 3, pot.j, 1);
  MassMatrix mass = assemble_mass(mesh);
  const SpectralEstimate est = rayleigh_sup(mesh, table, pot, eps, MassMode::consistent);
  EXPECT_TRUE(est.converged);
  EXPECT_GT(est.mu_raw, 0.0);
  EXPECT_NEAR(est.dt_max, 2.0 / std::sqrt(est.mu_max), 1e-15);
  EXPECT_GT(est.mu_max, est.mu_raw);

  // Dense generalized eigensolve restricted to interior nodes.
  ForceContext ctx{pot, eps, &table, &mesh};
  std::vector<int> keep;
  for (int i = 0; i < mesh.n_nodes(); ++i)
    if (!mesh.on_boundary[i]) keep.push_back(i);
  const int ni = static_cast<int>(keep.size());
  Eigen::MatrixXd A(ni, ni), M(ni, ni);
  M.setZero();
  FeField e = make_zero_field(mesh);
  std::vector<double> f(mesh.n_nodes(), 0.0);
  for (int j = 0; j < ni; ++j) {
    std::fill(e.values.begin(), e.values.end(), 0.0);
    e.values[keep[j]] = 1.0;
    std::fill(f.begin(), f.end(), 0.0);
    assemble_weak_pd_force(ctx, e, f, true);
    for (int i = 0; i < ni; ++i) A(i, j) = -f[keep[i]];
  }
  for (int i = 0; i < ni; ++i)
    for (int k = mass.scalar.rowptr[keep[i]]; k < mass.scalar.rowptr[keep[i] + 1]; ++k)
      for (int j = 0; j < ni; ++j)
        if (mass.scalar.col[k] == keep[j]) M(i, j) = mass.scalar.val[k];
  EXPECT_NEAR((A - A.transpose()).norm(), 0.0, 1e-12 * A.norm());
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(A, M);
  const double mu_ref = es.eigenvalues().maxCoeff();
  EXPECT_NEAR(est.mu_raw, mu_ref, 1e-6 * mu_ref);
}

TEST(Stability, RayleighEigvecSolvesTheEigenproblem) {
  Box box{1, {0.0, 0.0}, {1.0, 0.0}};
  Mesh mesh = build_uniform_mesh(box, 1.0 / 25);
  PotentialSpec pot;
  const double eps = 0.2;
  HorizonTable table = build_horizon_quadrature(eps, 4, pot.j, 1);
  MassMatrix mass = assemble_mass(mesh);
  const SpectralEstimate est = rayleigh_sup(mesh, table, pot, eps, MassMode::consistent);
  ASSERT_EQ(static_cast<int>(est.eigvec.size()), mesh.n_nodes());
  EXPECT_DOUBLE_EQ(est.eigvec.front(), 0.0);
  EXPECT_DOUBLE_EQ(est.eigvec.back(), 0.0);
  // || A v - mu M v || small relative to || mu M v ||.
  FeField v = make_field(mesh, est.eigvec);
  std::vector<double> av(mesh.n_nodes(), 0.0);
  ForceContext ctx{pot, eps, &table, &mesh};
  assemble_weak_pd_force(ctx, v, av, true);
  std::vector<double> mv(mesh.n_nodes(), 0.0);
  mass.apply(est.eigvec, mv, false);
  double num = 0.0, den = 0.0;
  for (int i = 0; i < mesh.n_nodes(); ++i) {
    if (mesh.on_boundary[i]) continue;
    const double r = -av[i] - est.mu_raw * mv[i];
    num += r * r;
    den += (est.mu_raw * mv[i]) * (est.mu_raw * mv[i]);
  }
  EXPECT_LT(std::sqrt(num / den), 1e-3);
}

TEST(Stability, LumpedAndConsistentBoundsDiffer) {
  Box box{1, {0.0, 0.0}, {1.0, 0.0}};
  Mesh mesh = build_uniform_mesh(box, 1.0 / 40);
  PotentialSpec pot;
  const double eps = 0.15;
  HorizonTable table = build_horizon_quadrature(eps, 4, pot.j, 1);
  const SpectralEstimate c = rayleigh_sup(mesh, table, pot, eps, MassMode::consistent);
  const SpectralEstimate l = rayleigh_sup(mesh, table, pot, eps, MassMode::lumped);
  EXPECT_TRUE(c.converged);
  EXPECT_TRUE(l.converged);
  EXPECT_NE(c.mu_raw, l.mu_raw);
  EXPECT_EQ(c.mass_mode, MassMode::consistent);
  EXPECT_EQ(l.mass_mode, MassMode::lumped);
}

// ============================================================================
// Discrete energy of consecutive states
// ============================================================================

namespace {

// mass keeps a pointer to the owning mesh, so the world is built in place
// and never copied or moved.
struct StabilityWorld {
  Mesh mesh;
  PotentialSpec pot;
  HorizonTable table;
  MassMatrix mass;
  double eps = 0.1;

  StabilityWorld() {
    Box box{1, {0.0, 0.0}, {1.0, 0.0}};
    mesh = build_uniform_mesh(box, 1.0 / 35);
    table = build_horizon_quadrature(eps, 4, pot.j, 1);
    mass = assemble_mass(mesh);
  }
  StabilityWorld(const StabilityWorld&) = delete;
  StabilityWorld& operator=(const StabilityWorld&) = delete;
};

} // namespace

TEST(Stability, DiscreteEnergyDecomposition) {
  StabilityWorld w;
  ForceContext ctx{w.pot, w.eps, &w.table, &w.mesh};
  const int n = w.mesh.n_nodes();
  std::vector<double> u0(n, 0.0), u1(n, 0.0);
  for (int i = 1; i < n - 1; ++i) {
    u0[i] = 1e-3 * std::sin(2.0 * std::numbers::pi * w.mesh.nodes[i][0]);
    u1[i] = u0[i] + 1e-5 * std::cos(3.0 * w.mesh.nodes[i][0]);
  }
  const double dt = 0.01;
  const DiscreteEnergy de =
      discrete_energy(ctx, w.mass, MassMode::consistent, u0, u1, dt);

  std::vector<double> du(n), ubar(n);
  for (int i = 0; i < n; ++i) {
    du[i] = (u1[i] - u0[i]) / dt;
    ubar[i] = 0.5 * (u1[i] + u0[i]);
  }
  FeField duf = make_field(w.mesh, du);
  FeField ubarf = make_field(w.mesh, ubar);
  EXPECT_NEAR(de.kinetic_term, 0.5 * w.mass.inner(du, du), 1e-15);
  EXPECT_NEAR(de.correction_term, -dt * dt / 8.0 * bilinear_a_linear(ctx, duf, duf),
              1e-18);
  EXPECT_NEAR(de.stiffness_term, 0.5 * bilinear_a_linear(ctx, ubarf, ubarf), 1e-18);
  EXPECT_NEAR(de.value, de.kinetic_term + de.correction_term + de.stiffness_term, 1e-18);
}

TEST(Stability, DiscreteEnergySignTracksTheStepBound) {
  StabilityWorld w;
  ForceContext ctx{w.pot, w.eps, &w.table, &w.mesh};
  const SpectralEstimate est =
      rayleigh_sup(w.mesh, w.table, w.pot, w.eps, MassMode::consistent);
  // Alternating top-mode pair: energy is positive under the bound and turns
  // negative once dt exceeds it.
  const int n = w.mesh.n_nodes();
  std::vector<double> u0(n), u1(n);
  for (int i = 0; i < n; ++i) {
    u0[i] = 1e-3 * est.eigvec[i];
    u1[i] = -u0[i];
  }
  const DiscreteEnergy stable =
      discrete_energy(ctx, w.mass, MassMode::consistent, u0, u1, 0.9 * est.dt_max);
  const DiscreteEnergy unstable =
      discrete_energy(ctx, w.mass, MassMode::consistent, u0, u1, 2.5 * est.dt_max);
  EXPECT_GT(stable.value, 0.0);
  EXPECT_LT(unstable.value, 0.0);
}

TEST(Stability, ConservationOnLinearRun) {
  StabilityWorld w;
  const SpectralEstimate est =
      rayleigh_sup(w.mesh, w.table, w.pot, w.eps, MassMode::lumped);
  RunSetup s;
  s.mesh = &w.mesh;
  s.table = &w.table;
  s.mass = &w.mass;
  s.pot = w.pot;
  s.epsilon = w.eps;
  s.model = Model::linear;
  s.mass_mode = MassMode::lumped;
  s.dt = 0.9 * est.dt_max;
  s.T = 200 * s.dt;
  s.u0 = [](Point x) {
    return Point{1e-3 * std::sin(std::numbers::pi * x[0]), 0.0};
  };
  s.record_states = true;
  s.record_energy = false;
  const RunResult r = run(s);
  ForceContext ctx{w.pot, w.eps, &w.table, &w.mesh};
  const ConservationReport rep =
      conservation_check(ctx, w.mass, MassMode::lumped, r.states, r.dt);
  EXPECT_GT(rep.e0, 0.0);
  EXPECT_LT(rep.max_rel_drift, 1e-11);
  EXPECT_EQ(rep.energies.size(), r.states.size() - 1);
}

TEST(Stability, RayleighRejectsBrokenInputs) {
  StabilityWorld w;
  PowerOpts opts;
  opts.max_iter = 1;
  opts.restarts = 1;
  EXPECT_THROW(rayleigh_sup(w.mesh, w.table, w.pot, w.eps, MassMode::consistent, opts),
               SolverError);
}
