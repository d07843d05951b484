#include <benchmark/benchmark.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "perifem/assembly.hpp"
#include "perifem/dynamics.hpp"
#include "perifem/field.hpp"
#include "perifem/geometry.hpp"
#include "perifem/horizon.hpp"
#include "perifem/linalg.hpp"
#include "perifem/potential.hpp"

namespace {

using namespace perifem;

FeField smooth_field(const Mesh& mesh) {
  return interpolate_function(mesh, [d = mesh.d](Point x) {
    const double s = std::sin(std::numbers::pi * x[0]);
    if (d == 1) return Point{0.01 * s, 0.0};
    return Point{0.01 * s * std::sin(std::numbers::pi * x[1]), 0.005 * s};
  });
}

void BM_HorizonTable2d(benchmark::State& state) {
  const int m = static_cast<int>(state.range(0));
  for (auto _ : state) {
    HorizonTable table = build_horizon_quadrature(0.25, m, JKind::linear_decay, 2);
    benchmark::DoNotOptimize(table.xi.data());
  }
}
BENCHMARK(BM_HorizonTable2d)->Arg(2)->Arg(4)->Arg(8)->Arg(16);

void BM_WeakForce2d(benchmark::State& state) {
  Box box{2, {0.0, 0.0}, {1.0, 1.0}};
  Mesh mesh = build_uniform_mesh(box, 1.0 / static_cast<double>(state.range(0)));
  PotentialSpec pot;
  const double eps = 0.25;
  HorizonTable table = build_horizon_quadrature(eps, default_m(eps, mesh.h), pot.j, 2);
  ForceContext ctx{pot, eps, &table, &mesh};
  FeField u = smooth_field(mesh);
  std::vector<double> f(static_cast<std::size_t>(mesh.n_nodes()) * 2, 0.0);
  for (auto _ : state) {
    assemble_weak_pd_force(ctx, u, f, false);
    benchmark::DoNotOptimize(f.data());
  }
  state.SetItemsProcessed(state.iterations() * mesh.n_nodes());
}
BENCHMARK(BM_WeakForce2d)->Arg(8)->Arg(16)->Arg(32);

void BM_StrongForce2d(benchmark::State& state) {
  Box box{2, {0.0, 0.0}, {1.0, 1.0}};
  Mesh mesh = build_uniform_mesh(box, 1.0 / static_cast<double>(state.range(0)));
  PotentialSpec pot;
  const double eps = 0.25;
  HorizonTable table = build_horizon_quadrature(eps, default_m(eps, mesh.h), pot.j, 2);
  ForceContext ctx{pot, eps, &table, &mesh};
  FeField u = smooth_field(mesh);
  std::vector<double> f(static_cast<std::size_t>(mesh.n_nodes()) * 2, 0.0);
  for (auto _ : state) {
    nodal_force_strong(ctx, u, nullptr, 0.0, f, false);
    benchmark::DoNotOptimize(f.data());
  }
  state.SetItemsProcessed(state.iterations() * mesh.n_nodes());
}
BENCHMARK(BM_StrongForce2d)->Arg(8)->Arg(16)->Arg(32);

void BM_CentralStepWeak2d(benchmark::State& state) {
  Box box{2, {0.0, 0.0}, {1.0, 1.0}};
  Mesh mesh = build_uniform_mesh(box, 1.0 / static_cast<double>(state.range(0)));
  PotentialSpec pot;
  const double eps = 0.25;
  HorizonTable table = build_horizon_quadrature(eps, default_m(eps, mesh.h), pot.j, 2);
  MassMatrix mass = assemble_mass(mesh);

  RunSetup s;
  s.mesh = &mesh;
  s.table = &table;
  s.mass = &mass;
  s.pot = pot;
  s.epsilon = eps;
  s.form = Form::weak;
  s.model = Model::nonlinear;
  s.mass_mode = MassMode::consistent;

  FeField u0 = smooth_field(mesh);
  std::vector<double> u = u0.values;
  std::vector<double> u_prev = u0.values;
  std::vector<double> accel(u.size(), 0.0);
  const double dt = 1e-3;
  for (auto _ : state) {
    compute_accel(s, mass, u, 0.0, accel);
    std::vector<double> next = central_step(u, u_prev, accel, dt);
    benchmark::DoNotOptimize(next.data());
  }
  state.SetItemsProcessed(state.iterations() * mesh.n_nodes());
}
BENCHMARK(BM_CentralStepWeak2d)->Arg(8)->Arg(16)->Arg(32);

void BM_MassSolve2d(benchmark::State& state) {
  Box box{2, {0.0, 0.0}, {1.0, 1.0}};
  Mesh mesh = build_uniform_mesh(box, 1.0 / static_cast<double>(state.range(0)));
  MassMatrix mass = assemble_mass(mesh);
  FeField u = smooth_field(mesh);
  std::vector<double> rhs = u.values;
  for (auto _ : state) {
    std::vector<double> x = mass.solve(rhs, true);
    benchmark::DoNotOptimize(x.data());
  }
  state.SetItemsProcessed(state.iterations() * mesh.n_nodes());
}
BENCHMARK(BM_MassSolve2d)->Arg(16)->Arg(32)->Arg(64);

} // namespace

BENCHMARK_MAIN();
