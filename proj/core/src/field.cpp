#include "perifem/field.hpp"

#include <cmath>

#include "perifem/errors.hpp"

namespace perifem {

Point FeField::at_node(int i) const {
  const int d = mesh->d;
  Point v{values[static_cast<size_t>(i) * d], 0.0};
  if (d == 2) v[1] = values[static_cast<size_t>(i) * d + 1];
  return v;
}

void FeField::set_node(int i, Point v) {
  const int d = mesh->d;
  values[static_cast<size_t>(i) * d] = v[0];
  if (d == 2) values[static_cast<size_t>(i) * d + 1] = v[1];
}

Point FeField::eval(Point x) const {
  double bary[3];
  const int e = locate(*mesh, x, bary);
  if (e < 0) return {0.0, 0.0};
  const auto& el = mesh->elems[e];
  Point out{0.0, 0.0};
  for (int i = 0; i <= mesh->d; ++i) {
    const Point vi = at_node(el[i]);
    out[0] += bary[i] * vi[0];
    out[1] += bary[i] * vi[1];
  }
  return out;
}

FeField make_zero_field(const Mesh& mesh) {
  FeField f;
  f.mesh = &mesh;
  f.values.assign(static_cast<size_t>(mesh.n_nodes()) * mesh.d, 0.0);
  return f;
}

FeField make_field(const Mesh& mesh, const std::vector<double>& values) {
  if (values.size() != static_cast<size_t>(mesh.n_nodes()) * mesh.d)
    throw DomainError("field values size does not match mesh");
  FeField f;
  f.mesh = &mesh;
  f.values = values;
  return f;
}

FeField interpolate_function(const Mesh& mesh, const PointFn& u) {
  FeField f = make_zero_field(mesh);
  for (int i = 0; i < mesh.n_nodes(); ++i) f.set_node(i, u(mesh.nodes[i]));
  return f;
}

namespace {

double bond_norm(int d, Point xi) {
  return d == 1 ? std::fabs(xi[0]) : std::hypot(xi[0], xi[1]);
}

} // namespace

double strain(const FeField& u, Point x, Point xi, double eps) {
  const int d = u.mesh->d;
  const double r = bond_norm(d, xi);
  if (r == 0.0) throw DomainError("strain: zero bond vector");
  const Point y = x + eps * xi;
  const Point du = u.eval(y) - u.eval(x);
  return (du[0] * xi[0] + du[1] * xi[1]) / (r * eps * r);
}

double strain_fn(const PointFn& u, int d, Point x, Point xi, double eps) {
  const double r = bond_norm(d, xi);
  if (r == 0.0) throw DomainError("strain: zero bond vector");
  const Point y = x + eps * xi;
  const Point du = u(y) - u(x);
  return (du[0] * xi[0] + du[1] * xi[1]) / (r * eps * r);
}

} // namespace perifem
