#include "perifem/verification.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

#include "perifem/errors.hpp"
#include "perifem/horizon.hpp"
#include "perifem/output.hpp"
#include "perifem/parallel.hpp"

namespace perifem {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

// Spatial profile U with u(t,x) = cos(omega t) U(x).
Point profile(const ManufacturedCase& cs, Point x) {
  if (!cs.box.contains(x, 0.0)) return {0.0, 0.0};
  if (cs.d == 1) return {cs.amplitude * std::sin(kPi * x[0]), 0.0};
  const double s = cs.amplitude * std::sin(kPi * x[0]) * std::sin(kPi * x[1]);
  const double inv_sqrt2 = 0.7071067811865475244;
  return {s * inv_sqrt2, s * inv_sqrt2};
}

} // namespace

Point ManufacturedCase::u(double t, Point x) const {
  const Point p = profile(*this, x);
  const double c = std::cos(omega * t);
  return {c * p[0], c * p[1]};
}

Point ManufacturedCase::ut(double t, Point x) const {
  const Point p = profile(*this, x);
  const double c = -omega * std::sin(omega * t);
  return {c * p[0], c * p[1]};
}

Point ManufacturedCase::utt(double t, Point x) const {
  const Point p = profile(*this, x);
  const double c = -omega * omega * std::cos(omega * t);
  return {c * p[0], c * p[1]};
}

Point ManufacturedCase::uttt(double t, Point x) const {
  const Point p = profile(*this, x);
  const double c = omega * omega * omega * std::sin(omega * t);
  return {c * p[0], c * p[1]};
}

PointFn ManufacturedCase::u_at(double t) const {
  const ManufacturedCase cs = *this;
  return [cs, t](Point x) { return cs.u(t, x); };
}

PointFn ManufacturedCase::ut_at(double t) const {
  const ManufacturedCase cs = *this;
  return [cs, t](Point x) { return cs.ut(t, x); };
}

double ManufacturedCase::sup_utt_l2() const {
  const double profile_norm = (d == 1) ? amplitude / std::sqrt(2.0) : amplitude / 2.0;
  return omega * omega * profile_norm;
}

double ManufacturedCase::sup_vtt_l2() const {
  const double profile_norm = (d == 1) ? amplitude / std::sqrt(2.0) : amplitude / 2.0;
  return omega * omega * omega * profile_norm;
}

double ManufacturedCase::sup_u_h2() const {
  const double p2 = kPi * kPi;
  if (d == 1) return amplitude * std::sqrt((1.0 + p2 + p2 * p2) / 2.0);
  return 0.5 * amplitude * std::sqrt(1.0 + 2.0 * p2 + 3.0 * p2 * p2);
}

ManufacturedCase make_manufactured(const std::string& id, double omega, double amplitude) {
  ManufacturedCase cs;
  cs.id = id;
  cs.omega = omega;
  cs.amplitude = amplitude;
  if (!(omega > 0.0) || !(amplitude > 0.0))
    throw DomainError("manufactured case needs positive omega and amplitude");
  if (id == "sine1d") {
    cs.d = 1;
    cs.box = Box{1, {0.0, 0.0}, {1.0, 0.0}};
  } else if (id == "sine2d") {
    cs.d = 2;
    cs.box = Box{2, {0.0, 0.0}, {1.0, 1.0}};
  } else {
    throw DomainError("unknown manufactured case: " + id);
  }
  return cs;
}

Point manufactured_rhs_at(const ManufacturedCase& cs, const ForceContext& oracle, double t,
                          Point x) {
  const Point acc = cs.utt(t, x);
  const Point force = pd_force_at_point_fn(oracle, cs.u_at(t), x);
  return {acc[0] - force[0], acc[1] - force[1]};
}

BodyFn make_manufactured_rhs(const ManufacturedCase& cs, const ForceContext* oracle) {
  const ManufacturedCase copy = cs;
  return [copy, oracle](double t, Point x) { return manufactured_rhs_at(copy, *oracle, t, x); };
}

namespace {

struct ChebCache {
  ManufacturedCase cs;
  const Mesh* mesh = nullptr;
  std::vector<double> cvals;              // interpolation nodes in c = cos(omega t)
  std::vector<double> bary_w;             // barycentric weights
  std::vector<std::vector<double>> force; // per node point, length n*d
};

} // namespace

NodalBodyFn make_cached_rhs_nodal(const ManufacturedCase& cs, const ForceContext* oracle,
                                  double T, int cheb_points) {
  if (cheb_points < 4) throw DomainError("rhs cache needs at least 4 interpolation points");
  auto cache = std::make_shared<ChebCache>();
  cache->cs = cs;
  cache->mesh = oracle->mesh;
  const double omega_t = cs.omega * T;
  const double cmin = (omega_t >= kPi) ? -1.0 : std::cos(omega_t);
  const double cmax = 1.0;
  const int nc = cheb_points;
  cache->cvals.resize(nc);
  cache->bary_w.resize(nc);
  for (int j = 0; j < nc; ++j) {
    const double xi = std::cos(j * kPi / (nc - 1));
    cache->cvals[j] = cmin + 0.5 * (xi + 1.0) * (cmax - cmin);
    double w = (j % 2 == 0) ? 1.0 : -1.0;
    if (j == 0 || j == nc - 1) w *= 0.5;
    cache->bary_w[j] = w;
  }

  const Mesh& mesh = *oracle->mesh;
  const int n = mesh.n_nodes();
  const int d = mesh.d;
  cache->force.assign(nc, std::vector<double>(static_cast<std::size_t>(n) * d, 0.0));
  for (int j = 0; j < nc; ++j) {
    // cos(omega t_j) = c_j reproduces the field c_j * U without a separate
    // scaled-profile code path.
    const double t_j = std::acos(std::clamp(cache->cvals[j], -1.0, 1.0)) / cs.omega;
    const PointFn uj = cs.u_at(t_j);
    std::vector<double>& dest = cache->force[j];
    parallel_for(n, [&](int, int begin, int end) {
      for (int i = begin; i < end; ++i) {
        if (mesh.on_boundary[i]) continue;
        const Point f = pd_force_at_point_fn(*oracle, uj, mesh.nodes[i]);
        for (int c = 0; c < d; ++c) dest[static_cast<std::size_t>(i) * d + c] = f[c];
      }
    });
  }

  return [cache](double t, int node) {
    const ManufacturedCase& mc = cache->cs;
    const double c = std::cos(mc.omega * t);
    const int nc2 = static_cast<int>(cache->cvals.size());
    const int d = cache->mesh->d;
    const std::size_t base = static_cast<std::size_t>(node) * d;
    Point pd{0.0, 0.0};
    int exact = -1;
    for (int j = 0; j < nc2; ++j) {
      if (std::abs(c - cache->cvals[j]) < 1e-14) {
        exact = j;
        break;
      }
    }
    if (exact >= 0) {
      for (int k = 0; k < d; ++k) pd[k] = cache->force[exact][base + k];
    } else {
      double den = 0.0;
      double num[2] = {0.0, 0.0};
      for (int j = 0; j < nc2; ++j) {
        const double wj = cache->bary_w[j] / (c - cache->cvals[j]);
        den += wj;
        for (int k = 0; k < d; ++k) num[k] += wj * cache->force[j][base + k];
      }
      for (int k = 0; k < d; ++k) pd[k] = num[k] / den;
    }
    const Point acc = mc.utt(t, cache->mesh->nodes[node]);
    return Point{acc[0] - pd[0], acc[1] - pd[1]};
  };
}

double error_ek(const Mesh& mesh, const std::vector<double>& u_h,
                const std::vector<double>& v_h, const ManufacturedCase& cs, double t) {
  const FeField uf = make_field(mesh, u_h);
  const FeField vf = make_field(mesh, v_h);
  return l2_error_field_fn(mesh, uf, cs.u_at(t)) + l2_error_field_fn(mesh, vf, cs.ut_at(t));
}

TruncationNorms truncation_norms(const ManufacturedCase& cs, const Mesh& mesh, double t_k,
                                 double dt) {
  const double t_k1 = t_k + dt;
  const PointFn tau_u_fn = [&cs, t_k, t_k1, dt](Point x) {
    const Point a = cs.ut(t_k1, x);
    const Point u1 = cs.u(t_k1, x);
    const Point u0 = cs.u(t_k, x);
    return Point{a[0] - (u1[0] - u0[0]) / dt, a[1] - (u1[1] - u0[1]) / dt};
  };
  const PointFn tau_v_fn = [&cs, t_k, t_k1, dt](Point x) {
    const Point a = cs.utt(t_k, x);
    const Point v1 = cs.ut(t_k1, x);
    const Point v0 = cs.ut(t_k, x);
    return Point{a[0] - (v1[0] - v0[0]) / dt, a[1] - (v1[1] - v0[1]) / dt};
  };
  TruncationNorms out;
  out.tau_u = l2_norm_fn(mesh, tau_u_fn, 4);
  out.tau_v = l2_norm_fn(mesh, tau_v_fn, 4);
  return out;
}

double sigma_per_norm(const ManufacturedCase& cs, const ForceContext& oracle,
                      const MassMatrix& mass, double t) {
  const Mesh& mesh = *oracle.mesh;
  const PointFn uex = cs.u_at(t);
  const FeField rh = l2_project(mesh, mass, uex, false);
  const PointFn f_exact = [&oracle, &uex](Point x) {
    return pd_force_at_point_fn(oracle, uex, x);
  };
  const PointFn f_proj = [&oracle, &rh](Point x) { return pd_force_at_point(oracle, rh, x); };
  return l2_distance_fn(mesh, f_exact, f_proj, 4);
}

TruncationErrors truncation_errors(const ManufacturedCase& cs, const ForceContext& oracle,
                                   const MassMatrix& mass, double t_k, double dt) {
  TruncationErrors out;
  const TruncationNorms tn = truncation_norms(cs, *oracle.mesh, t_k, dt);
  out.tau_u = tn.tau_u;
  out.tau_v = tn.tau_v;
  out.sigma_per = sigma_per_norm(cs, oracle, mass, t_k);
  return out;
}

RateReport fit_rates(const std::vector<SweepPoint>& points) {
  if (points.size() < 2) throw DomainError("rate fit needs at least two points");
  RateReport rep;
  rep.points = points;
  const int n = static_cast<int>(points.size());
  double sx = 0.0, sy = 0.0;
  std::vector<double> xs(n), ys(n);
  for (int i = 0; i < n; ++i) {
    if (!(points[i].resolution > 0.0) || !(points[i].sup_ek > 0.0))
      throw DomainError("rate fit needs positive resolutions and errors");
    xs[i] = std::log(points[i].resolution);
    ys[i] = std::log(points[i].sup_ek);
    sx += xs[i];
    sy += ys[i];
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (int i = 0; i < n; ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  if (!(sxx > 0.0)) throw DomainError("rate fit needs distinct resolutions");
  rep.slope = sxy / sxx;
  rep.intercept = my - rep.slope * mx;
  double ss_res = 0.0;
  for (int i = 0; i < n; ++i) {
    const double pred = rep.intercept + rep.slope * xs[i];
    ss_res += (ys[i] - pred) * (ys[i] - pred);
  }
  rep.r2 = (syy > 0.0) ? 1.0 - ss_res / syy : 1.0;
  rep.pre_asymptotic = rep.r2 < 0.99;
  return rep;
}

RateReport converge_sweep(const SweepRunSpec& spec, SweepKind kind,
                          const std::vector<double>& resolutions) {
  if (resolutions.size() < 3) throw DomainError("sweep needs at least three resolutions");
  for (std::size_t i = 1; i < resolutions.size(); ++i) {
    if (!(resolutions[i] < resolutions[i - 1]))
      throw DomainError("sweep resolutions must decrease strictly");
  }
  std::vector<SweepPoint> points;
  for (const double res : resolutions) {
    const double h = (kind == SweepKind::spatial) ? res : spec.h;
    const double dt = (kind == SweepKind::spatial) ? spec.dt : res;
    const Mesh mesh = build_uniform_mesh(spec.cs.box, h);
    const int m = (spec.m > 0) ? spec.m : default_m(spec.epsilon, mesh.h);
    const HorizonTable table =
        build_horizon_quadrature(spec.epsilon, m, spec.pot.j, spec.cs.d);
    const HorizonTable oracle_table = build_horizon_quadrature(
        spec.epsilon, spec.oracle_refine * m, spec.pot.j, spec.cs.d);
    const MassMatrix mass = assemble_mass(mesh);
    const ForceContext oracle{spec.pot, spec.epsilon, &oracle_table, &mesh};

    RunSetup setup;
    setup.mesh = &mesh;
    setup.table = &table;
    setup.mass = &mass;
    setup.pot = spec.pot;
    setup.epsilon = spec.epsilon;
    setup.form = spec.form;
    setup.model = spec.model;
    setup.mass_mode = spec.mass_mode;
    setup.dt = dt;
    setup.T = spec.T;
    setup.u0 = spec.cs.u_at(0.0);
    setup.v0 = spec.cs.ut_at(0.0);
    if (spec.form == Form::strong && spec.cheb_points > 0)
      setup.b_nodal = make_cached_rhs_nodal(spec.cs, &oracle, spec.T, spec.cheb_points);
    else
      setup.b = make_manufactured_rhs(spec.cs, &oracle);
    setup.record_energy = false;
    setup.snapshot_stride = spec.sample_stride;

    double sup_ek = 0.0;
    setup.snapshot_cb = [&](int, double t, const std::vector<double>& u,
                            const std::vector<double>& v) {
      sup_ek = std::max(sup_ek, error_ek(mesh, u, v, spec.cs, t));
    };
    try {
      run(setup);
    } catch (const InstabilityError& e) {
      throw SolverError("sweep run unstable at resolution " + format_double(res) + ": " +
                        e.what());
    }
    points.push_back({res, sup_ek});
  }
  return fit_rates(points);
}

AprioriBound apriori_bound(double T, double eps, double h, double dt, double c_t,
                           double sup_u_h2, double l1) {
  if (!(dt < 1.0) || dt < 0.0) throw DomainError("apriori bound requires 0 <= dt < 1");
  if (!(T > 0.0) || !(eps > 0.0)) throw DomainError("apriori bound requires positive T, eps");
  AprioriBound out;
  out.exponent = (1.0 + l1) * T / (eps * eps);
  out.exp_factor = std::exp(out.exponent);
  const double denom = (1.0 - dt) * (1.0 - dt);
  out.term_t = out.exp_factor * c_t * T * dt / denom;
  out.term_s = out.exp_factor * out.exponent * h * h * sup_u_h2 / denom;
  out.total = out.term_t + out.term_s;
  return out;
}

double time_for_exponent(double target, double eps, double l1) {
  if (!(target > 0.0) || !(eps > 0.0)) throw DomainError("exponent and eps must be positive");
  return target * eps * eps / (1.0 + l1);
}

} // namespace perifem
