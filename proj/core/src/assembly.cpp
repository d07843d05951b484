#include "perifem/assembly.hpp"

#include <cmath>

#include "perifem/errors.hpp"
#include "perifem/parallel.hpp"
#include "perifem/quadrature.hpp"

namespace perifem {

namespace {

// Bond sum for the force density at one point. The evaluator supplies the
// displacement; bonds whose far end leaves the tapered body drop out.
template <class Eval>
Point force_point_impl(const ForceContext& ctx, const Eval& eval, Point x, bool linearized) {
  const HorizonTable& tab = *ctx.table;
  const double eps = ctx.epsilon;
  const double wx = taper_omega(ctx.mesh->box, x, eps);
  Point out{0.0, 0.0};
  if (wx == 0.0) return out;
  const Point ux = eval(x);
  const double fp0 = linearized ? f_prime(ctx.pot, 0.0) : 0.0;
  double acc0 = 0.0, acc1 = 0.0;
  const int nq = tab.size();
  for (int q = 0; q < nq; ++q) {
    const Point xi = tab.xi[q];
    const Point y{x[0] + eps * xi[0], x[1] + eps * xi[1]};
    const double wy = taper_omega(ctx.mesh->box, y, eps);
    if (wy == 0.0) continue;
    const Point uy = eval(y);
    const double r = tab.r[q];
    const double s = ((uy[0] - ux[0]) * xi[0] + (uy[1] - ux[1]) * xi[1]) / (eps * r * r);
    const double fp = linearized ? fp0 : f_prime(ctx.pot, eps * r * s * s);
    const double k = tab.w[q] * wx * wy * tab.jval[q] * fp * s / r;
    acc0 += k * xi[0];
    acc1 += k * xi[1];
  }
  const double pref = 4.0 / (eps * unit_ball_volume(ctx.mesh->d));
  out[0] = pref * acc0;
  out[1] = pref * acc1;
  return out;
}

Point interp_in_elem(const Mesh& mesh, const FeField& u, int e, const double* bary) {
  const int npe = mesh.nodes_per_elem();
  Point val{0.0, 0.0};
  for (int a = 0; a < npe; ++a) {
    const Point nv = u.at_node(mesh.elems[e][a]);
    val[0] += bary[a] * nv[0];
    val[1] += bary[a] * nv[1];
  }
  return val;
}

} // namespace

Point pd_force_at_point(const ForceContext& ctx, const FeField& u, Point x, bool linearized) {
  return force_point_impl(ctx, [&](Point p) { return u.eval(p); }, x, linearized);
}

Point pd_force_at_point_fn(const ForceContext& ctx, const PointFn& u, Point x, bool linearized) {
  return force_point_impl(ctx, [&](Point p) { return u(p); }, x, linearized);
}

void nodal_force_strong(const ForceContext& ctx, const FeField& u, const BodyFn* b,
                        double t, std::vector<double>& out, bool linearized) {
  const Mesh& mesh = *ctx.mesh;
  const int n = mesh.n_nodes();
  const int d = mesh.d;
  out.assign(static_cast<std::size_t>(n) * d, 0.0);
  parallel_for(n, [&](int, int begin, int end) {
    for (int i = begin; i < end; ++i) {
      if (mesh.on_boundary[i]) continue;
      Point f = pd_force_at_point(ctx, u, mesh.nodes[i], linearized);
      if (b) {
        const Point bv = (*b)(t, mesh.nodes[i]);
        f[0] += bv[0];
        f[1] += bv[1];
      }
      for (int c = 0; c < d; ++c) out[static_cast<std::size_t>(i) * d + c] = f[c];
    }
  });
}

void assemble_weak_pd_force(const ForceContext& ctx, const FeField& u,
                            std::vector<double>& out, bool linearized) {
  const Mesh& mesh = *ctx.mesh;
  const HorizonTable& tab = *ctx.table;
  const double eps = ctx.epsilon;
  const int n = mesh.n_nodes();
  const int d = mesh.d;
  const int ne = mesh.n_elems();
  const int npe = mesh.nodes_per_elem();
  const SimplexRule& rule = simplex_rule(d, 2);
  const double pref = 2.0 / (eps * unit_ball_volume(d));
  const double fp0 = linearized ? f_prime(ctx.pot, 0.0) : 0.0;

  const int nchunks = chunk_count(ne);
  std::vector<std::vector<double>> buf(nchunks);
  for (auto& v : buf) v.assign(static_cast<std::size_t>(n) * d, 0.0);

  parallel_for(ne, [&](int chunk, int begin, int end) {
    std::vector<double>& acc = buf[chunk];
    double bary_y[3];
    for (int e = begin; e < end; ++e) {
      const double vol = element_volume(mesh, e);
      for (int g = 0; g < rule.npts; ++g) {
        const Point xg = map_to_element(mesh, e, rule, g);
        const double wx = taper_omega(mesh.box, xg, eps);
        if (wx == 0.0) continue;
        const double wg = rule.w[g] * vol;
        const Point ux = interp_in_elem(mesh, u, e, rule.bary[g]);
        for (int q = 0; q < tab.size(); ++q) {
          const Point xi = tab.xi[q];
          const Point y{xg[0] + eps * xi[0], xg[1] + eps * xi[1]};
          const double wy = taper_omega(mesh.box, y, eps);
          if (wy == 0.0) continue;
          const int ey = locate(mesh, y, bary_y);
          Point uy{0.0, 0.0};
          if (ey >= 0) uy = interp_in_elem(mesh, u, ey, bary_y);
          const double r = tab.r[q];
          const double s = ((uy[0] - ux[0]) * xi[0] + (uy[1] - ux[1]) * xi[1]) / (eps * r * r);
          const double fp = linearized ? fp0 : f_prime(ctx.pot, eps * r * s * s);
          const double kk = pref * wg * tab.w[q] * wx * wy * tab.jval[q] * fp * s / r;
          for (int c = 0; c < d; ++c) {
            const double val = kk * xi[c];
            for (int a = 0; a < npe; ++a)
              acc[static_cast<std::size_t>(mesh.elems[e][a]) * d + c] += val * rule.bary[g][a];
            if (ey >= 0) {
              for (int a = 0; a < npe; ++a)
                acc[static_cast<std::size_t>(mesh.elems[ey][a]) * d + c] -= val * bary_y[a];
            }
          }
        }
      }
    }
  });

  out.assign(static_cast<std::size_t>(n) * d, 0.0);
  for (int c = 0; c < nchunks; ++c) {
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += buf[c][i];
  }
  for (int i = 0; i < n; ++i) {
    if (!mesh.on_boundary[i]) continue;
    for (int c = 0; c < d; ++c) out[static_cast<std::size_t>(i) * d + c] = 0.0;
  }
}

void add_weak_body_force(const Mesh& mesh, const BodyFn& b, double t,
                         std::vector<double>& out, double* l2_b) {
  const int d = mesh.d;
  const int npe = mesh.nodes_per_elem();
  const SimplexRule& rule = simplex_rule(d, 2);
  double bsq = 0.0;
  for (int e = 0; e < mesh.n_elems(); ++e) {
    const double vol = element_volume(mesh, e);
    for (int g = 0; g < rule.npts; ++g) {
      const Point xg = map_to_element(mesh, e, rule, g);
      const Point bv = b(t, xg);
      const double wg = rule.w[g] * vol;
      for (int c = 0; c < d; ++c) {
        for (int a = 0; a < npe; ++a)
          out[static_cast<std::size_t>(mesh.elems[e][a]) * d + c] += wg * rule.bary[g][a] * bv[c];
      }
      bsq += wg * (bv[0] * bv[0] + bv[1] * bv[1]);
    }
  }
  if (l2_b) *l2_b = std::sqrt(bsq);
}

namespace {

double bilinear_impl(const ForceContext& ctx, const FeField& u, const FeField& v,
                     bool linearized) {
  const Mesh& mesh = *ctx.mesh;
  const HorizonTable& tab = *ctx.table;
  const double eps = ctx.epsilon;
  const int ne = mesh.n_elems();
  const SimplexRule& rule = simplex_rule(mesh.d, 2);
  const double pref = 2.0 / unit_ball_volume(mesh.d);
  const double fp0 = linearized ? f_prime(ctx.pot, 0.0) : 0.0;

  const int nchunks = chunk_count(ne);
  std::vector<double> partial(nchunks, 0.0);
  parallel_for(ne, [&](int chunk, int begin, int end) {
    double acc = 0.0;
    double bary_y[3];
    for (int e = begin; e < end; ++e) {
      const double vol = element_volume(mesh, e);
      for (int g = 0; g < rule.npts; ++g) {
        const Point xg = map_to_element(mesh, e, rule, g);
        const double wx = taper_omega(mesh.box, xg, eps);
        if (wx == 0.0) continue;
        const double wg = rule.w[g] * vol;
        const Point ux = interp_in_elem(mesh, u, e, rule.bary[g]);
        const Point vx = interp_in_elem(mesh, v, e, rule.bary[g]);
        for (int q = 0; q < tab.size(); ++q) {
          const Point xi = tab.xi[q];
          const Point y{xg[0] + eps * xi[0], xg[1] + eps * xi[1]};
          const double wy = taper_omega(mesh.box, y, eps);
          if (wy == 0.0) continue;
          const int ey = locate(mesh, y, bary_y);
          Point uy{0.0, 0.0}, vy{0.0, 0.0};
          if (ey >= 0) {
            uy = interp_in_elem(mesh, u, ey, bary_y);
            vy = interp_in_elem(mesh, v, ey, bary_y);
          }
          const double r = tab.r[q];
          const double den = eps * r * r;
          const double su = ((uy[0] - ux[0]) * xi[0] + (uy[1] - ux[1]) * xi[1]) / den;
          const double sv = ((vy[0] - vx[0]) * xi[0] + (vy[1] - vx[1]) * xi[1]) / den;
          const double fp = linearized ? fp0 : f_prime(ctx.pot, eps * r * su * su);
          acc += pref * wg * tab.w[q] * r * wx * wy * tab.jval[q] * fp * su * sv;
        }
      }
    }
    partial[chunk] = acc;
  });
  double total = 0.0;
  for (double p : partial) total += p;
  return total;
}

} // namespace

double bilinear_a(const ForceContext& ctx, const FeField& u, const FeField& v) {
  return bilinear_impl(ctx, u, v, false);
}

double bilinear_a_linear(const ForceContext& ctx, const FeField& u, const FeField& v) {
  return bilinear_impl(ctx, u, v, true);
}

double pd_energy(const ForceContext& ctx, const FeField& u) {
  const Mesh& mesh = *ctx.mesh;
  const HorizonTable& tab = *ctx.table;
  const double eps = ctx.epsilon;
  const int ne = mesh.n_elems();
  const SimplexRule& rule = simplex_rule(mesh.d, 2);
  const double pref = 1.0 / (eps * unit_ball_volume(mesh.d));

  const int nchunks = chunk_count(ne);
  std::vector<double> partial(nchunks, 0.0);
  parallel_for(ne, [&](int chunk, int begin, int end) {
    double acc = 0.0;
    double bary_y[3];
    for (int e = begin; e < end; ++e) {
      const double vol = element_volume(mesh, e);
      for (int g = 0; g < rule.npts; ++g) {
        const Point xg = map_to_element(mesh, e, rule, g);
        const double wx = taper_omega(mesh.box, xg, eps);
        if (wx == 0.0) continue;
        const double wg = rule.w[g] * vol;
        const Point ux = interp_in_elem(mesh, u, e, rule.bary[g]);
        for (int q = 0; q < tab.size(); ++q) {
          const Point xi = tab.xi[q];
          const Point y{xg[0] + eps * xi[0], xg[1] + eps * xi[1]};
          const double wy = taper_omega(mesh.box, y, eps);
          if (wy == 0.0) continue;
          const int ey = locate(mesh, y, bary_y);
          Point uy{0.0, 0.0};
          if (ey >= 0) uy = interp_in_elem(mesh, u, ey, bary_y);
          const double r = tab.r[q];
          const double s = ((uy[0] - ux[0]) * xi[0] + (uy[1] - ux[1]) * xi[1]) / (eps * r * r);
          acc += pref * wg * tab.w[q] * wx * wy * tab.jval[q] * f_value(ctx.pot, eps * r * s * s);
        }
      }
    }
    partial[chunk] = acc;
  });
  double total = 0.0;
  for (double p : partial) total += p;
  return total;
}

FeField l2_project(const Mesh& mesh, const MassMatrix& mass, const PointFn& fn,
                   bool constrain_boundary) {
  const int n = mesh.n_nodes();
  const int d = mesh.d;
  const int npe = mesh.nodes_per_elem();
  const SimplexRule& rule = simplex_rule(d, 4);
  std::vector<double> rhs(static_cast<std::size_t>(n) * d, 0.0);
  for (int e = 0; e < mesh.n_elems(); ++e) {
    const double vol = element_volume(mesh, e);
    for (int g = 0; g < rule.npts; ++g) {
      const Point xg = map_to_element(mesh, e, rule, g);
      const Point fv = fn(xg);
      const double wg = rule.w[g] * vol;
      for (int c = 0; c < d; ++c) {
        for (int a = 0; a < npe; ++a)
          rhs[static_cast<std::size_t>(mesh.elems[e][a]) * d + c] += wg * rule.bary[g][a] * fv[c];
      }
    }
  }
  if (constrain_boundary) {
    for (int i = 0; i < n; ++i) {
      if (!mesh.on_boundary[i]) continue;
      for (int c = 0; c < d; ++c) rhs[static_cast<std::size_t>(i) * d + c] = 0.0;
    }
  }
  std::vector<double> sol = mass.solve(rhs, constrain_boundary);
  return make_field(mesh, std::move(sol));
}

double l2_norm_fn(const Mesh& mesh, const PointFn& fn, int degree) {
  const SimplexRule& rule = simplex_rule(mesh.d, degree);
  double acc = 0.0;
  for (int e = 0; e < mesh.n_elems(); ++e) {
    const double vol = element_volume(mesh, e);
    for (int g = 0; g < rule.npts; ++g) {
      const Point xg = map_to_element(mesh, e, rule, g);
      const Point fv = fn(xg);
      acc += rule.w[g] * vol * (fv[0] * fv[0] + fv[1] * fv[1]);
    }
  }
  return std::sqrt(acc);
}

double l2_error_field_fn(const Mesh& mesh, const FeField& uh, const PointFn& fn, int degree) {
  const SimplexRule& rule = simplex_rule(mesh.d, degree);
  const int npe = mesh.nodes_per_elem();
  double acc = 0.0;
  for (int e = 0; e < mesh.n_elems(); ++e) {
    const double vol = element_volume(mesh, e);
    for (int g = 0; g < rule.npts; ++g) {
      const Point xg = map_to_element(mesh, e, rule, g);
      Point uv{0.0, 0.0};
      for (int a = 0; a < npe; ++a) {
        const Point nv = uh.at_node(mesh.elems[e][a]);
        uv[0] += rule.bary[g][a] * nv[0];
        uv[1] += rule.bary[g][a] * nv[1];
      }
      const Point fv = fn(xg);
      const double d0 = uv[0] - fv[0];
      const double d1 = uv[1] - fv[1];
      acc += rule.w[g] * vol * (d0 * d0 + d1 * d1);
    }
  }
  return std::sqrt(acc);
}

double l2_distance_fn(const Mesh& mesh, const PointFn& f, const PointFn& g, int degree) {
  const SimplexRule& rule = simplex_rule(mesh.d, degree);
  double acc = 0.0;
  for (int e = 0; e < mesh.n_elems(); ++e) {
    const double vol = element_volume(mesh, e);
    for (int q = 0; q < rule.npts; ++q) {
      const Point xg = map_to_element(mesh, e, rule, q);
      const Point fv = f(xg);
      const Point gv = g(xg);
      const double d0 = fv[0] - gv[0];
      const double d1 = fv[1] - gv[1];
      acc += rule.w[q] * vol * (d0 * d0 + d1 * d1);
    }
  }
  return std::sqrt(acc);
}

} // namespace perifem
