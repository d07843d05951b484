#include "perifem/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "perifem/errors.hpp"
#include "perifem/output.hpp"

namespace perifem {

double Box::min_extent() const {
  double m = extent(0);
  for (int i = 1; i < d; ++i) m = std::min(m, extent(i));
  return m;
}

bool Box::contains(Point x, double tol) const {
  for (int i = 0; i < d; ++i)
    if (x[i] < lo[i] - tol || x[i] > hi[i] + tol) return false;
  return true;
}

double Box::boundary_distance(Point x) const {
  double dist = std::min(x[0] - lo[0], hi[0] - x[0]);
  for (int i = 1; i < d; ++i)
    dist = std::min(dist, std::min(x[i] - lo[i], hi[i] - x[i]));
  return dist;
}

double smoothstep(double t) {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  return t * t * (3.0 - 2.0 * t);
}

double taper_omega(const Box& box, Point x, double eps) {
  if (!(eps > 0.0)) throw DomainError("taper_omega requires eps > 0");
  const double dist = box.boundary_distance(x);
  if (dist <= 0.0) return 0.0;
  return smoothstep(dist / eps);
}

namespace {

int cells_for(double extent, double target) {
  // Round-to-coarser guard so a target that divides the extent exactly is
  // not bumped to one extra cell by floating point noise.
  const double raw = extent / target;
  int n = static_cast<int>(std::ceil(raw * (1.0 - 1e-12)));
  return std::max(1, n);
}

} // namespace

Mesh build_uniform_mesh(const Box& box, double h_request) {
  if (box.d != 1 && box.d != 2) throw DomainError("mesh dimension must be 1 or 2");
  if (!(h_request > 0.0)) throw DomainError("mesh size must be positive");
  for (int i = 0; i < box.d; ++i)
    if (!(box.extent(i) > 0.0)) throw DomainError("box extents must be positive");

  Mesh mesh;
  mesh.d = box.d;
  mesh.box = box;

  if (box.d == 1) {
    const int n = cells_for(box.extent(0), h_request);
    mesh.nx = n;
    mesh.dx = box.extent(0) / n;
    mesh.nodes.resize(n + 1);
    mesh.on_boundary.assign(n + 1, 0);
    for (int i = 0; i <= n; ++i)
      mesh.nodes[i] = {box.lo[0] + box.extent(0) * i / n, 0.0};
    mesh.on_boundary.front() = 1;
    mesh.on_boundary.back() = 1;
    mesh.elems.resize(n);
    for (int e = 0; e < n; ++e) mesh.elems[e] = {e, e + 1, -1};
  } else {
    const double target = h_request / std::sqrt(2.0);
    const int nx = cells_for(box.extent(0), target);
    const int ny = cells_for(box.extent(1), target);
    mesh.nx = nx;
    mesh.ny = ny;
    mesh.dx = box.extent(0) / nx;
    mesh.dy = box.extent(1) / ny;
    mesh.nodes.resize(static_cast<size_t>(nx + 1) * (ny + 1));
    mesh.on_boundary.assign(mesh.nodes.size(), 0);
    for (int iy = 0; iy <= ny; ++iy) {
      for (int ix = 0; ix <= nx; ++ix) {
        const int id = iy * (nx + 1) + ix;
        mesh.nodes[id] = {box.lo[0] + box.extent(0) * ix / nx,
                          box.lo[1] + box.extent(1) * iy / ny};
        if (ix == 0 || ix == nx || iy == 0 || iy == ny) mesh.on_boundary[id] = 1;
      }
    }
    mesh.elems.reserve(static_cast<size_t>(nx) * ny * 2);
    for (int iy = 0; iy < ny; ++iy) {
      for (int ix = 0; ix < nx; ++ix) {
        const int n00 = iy * (nx + 1) + ix;
        const int n10 = n00 + 1;
        const int n01 = n00 + (nx + 1);
        const int n11 = n01 + 1;
        mesh.elems.push_back({n00, n10, n11}); // lower: sx >= sy
        mesh.elems.push_back({n00, n11, n01}); // upper: sx <= sy
      }
    }
  }

  mesh.h = 0.0;
  for (int e = 0; e < mesh.n_elems(); ++e)
    mesh.h = std::max(mesh.h, element_diameter(mesh, e));
  return mesh;
}

double element_volume(const Mesh& mesh, int e) {
  const auto& el = mesh.elems[e];
  if (mesh.d == 1) return std::fabs(mesh.nodes[el[1]][0] - mesh.nodes[el[0]][0]);
  const Point a = mesh.nodes[el[1]] - mesh.nodes[el[0]];
  const Point b = mesh.nodes[el[2]] - mesh.nodes[el[0]];
  return 0.5 * std::fabs(a[0] * b[1] - a[1] * b[0]);
}

double element_diameter(const Mesh& mesh, int e) {
  const auto& el = mesh.elems[e];
  if (mesh.d == 1) return element_volume(mesh, e);
  double diam = 0.0;
  for (int i = 0; i < 3; ++i) {
    const Point s = mesh.nodes[el[(i + 1) % 3]] - mesh.nodes[el[i]];
    diam = std::max(diam, std::hypot(s[0], s[1]));
  }
  return diam;
}

namespace {

bool bary_in_element(const Mesh& mesh, int e, Point x, double* bary) {
  const auto& el = mesh.elems[e];
  const double tol = -1e-12;
  if (mesh.d == 1) {
    const double x0 = mesh.nodes[el[0]][0];
    const double x1 = mesh.nodes[el[1]][0];
    const double t = (x[0] - x0) / (x1 - x0);
    if (t < tol || t > 1.0 - tol) return false;
    bary[0] = 1.0 - t;
    bary[1] = t;
    return true;
  }
  const Point a = mesh.nodes[el[0]];
  const Point b = mesh.nodes[el[1]];
  const Point c = mesh.nodes[el[2]];
  const double det = (b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]);
  const double l1 = ((x[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (x[1] - a[1])) / det;
  const double l2 = ((b[0] - a[0]) * (x[1] - a[1]) - (x[0] - a[0]) * (b[1] - a[1])) / det;
  const double l0 = 1.0 - l1 - l2;
  if (l0 < tol || l1 < tol || l2 < tol) return false;
  bary[0] = l0;
  bary[1] = l1;
  bary[2] = l2;
  return true;
}

} // namespace

int locate(const Mesh& mesh, Point x, double* bary) {
  if (!mesh.box.contains(x)) return -1;

  if (mesh.nx > 0) {
    if (mesh.d == 1) {
      int ix = static_cast<int>((x[0] - mesh.box.lo[0]) / mesh.dx);
      ix = std::clamp(ix, 0, mesh.nx - 1);
      double t = (x[0] - mesh.nodes[mesh.elems[ix][0]][0]) / mesh.dx;
      t = std::clamp(t, 0.0, 1.0);
      bary[0] = 1.0 - t;
      bary[1] = t;
      return ix;
    }
    int ix = static_cast<int>((x[0] - mesh.box.lo[0]) / mesh.dx);
    int iy = static_cast<int>((x[1] - mesh.box.lo[1]) / mesh.dy);
    ix = std::clamp(ix, 0, mesh.nx - 1);
    iy = std::clamp(iy, 0, mesh.ny - 1);
    const double sx = std::clamp((x[0] - mesh.box.lo[0]) / mesh.dx - ix, 0.0, 1.0);
    const double sy = std::clamp((x[1] - mesh.box.lo[1]) / mesh.dy - iy, 0.0, 1.0);
    const int cell = 2 * (iy * mesh.nx + ix);
    if (sx >= sy) {
      bary[0] = 1.0 - sx;
      bary[1] = sx - sy;
      bary[2] = sy;
      return cell;
    }
    bary[0] = 1.0 - sy;
    bary[1] = sx;
    bary[2] = sy - sx;
    return cell + 1;
  }

  // General fallback for meshes without grid structure.
  for (int e = 0; e < mesh.n_elems(); ++e)
    if (bary_in_element(mesh, e, x, bary)) return e;
  return -1;
}

std::vector<int> Mesh::boundary_nodes() const {
  std::vector<int> out;
  for (int i = 0; i < n_nodes(); ++i)
    if (on_boundary[i]) out.push_back(i);
  return out;
}

int Mesh::n_interior() const {
  int n = 0;
  for (int i = 0; i < n_nodes(); ++i)
    if (!on_boundary[i]) ++n;
  return n;
}

Mesh read_mesh_text(std::istream& in) {
  std::string magic;
  int d = 0, n_nodes = 0, n_elems = 0;
  if (!(in >> magic >> d >> n_nodes >> n_elems) || magic != "pdm")
    throw ConfigError("mesh file: bad header, expected 'pdm <d> <nodes> <elems>'");
  if (d != 1 && d != 2) throw ConfigError("mesh file: dimension must be 1 or 2");
  if (n_nodes < d + 1 || n_elems < 1) throw ConfigError("mesh file: too few nodes or elements");

  Mesh mesh;
  mesh.d = d;
  mesh.nodes.resize(n_nodes);
  for (int i = 0; i < n_nodes; ++i) {
    mesh.nodes[i] = {0.0, 0.0};
    for (int k = 0; k < d; ++k)
      if (!(in >> mesh.nodes[i][k])) throw ConfigError("mesh file: truncated node coordinates");
  }
  mesh.elems.resize(n_elems);
  for (int e = 0; e < n_elems; ++e) {
    mesh.elems[e] = {-1, -1, -1};
    for (int k = 0; k <= d; ++k) {
      int id = -1;
      if (!(in >> id)) throw ConfigError("mesh file: truncated connectivity");
      if (id < 0 || id >= n_nodes) throw ConfigError("mesh file: node index out of range");
      mesh.elems[e][k] = id;
    }
  }
  in >> std::ws;
  mesh.on_boundary.assign(n_nodes, 0);
  std::string line;
  if (std::getline(in, line)) {
    std::istringstream bs(line);
    int id = -1;
    while (bs >> id) {
      if (id < 0 || id >= n_nodes) throw ConfigError("mesh file: boundary index out of range");
      mesh.on_boundary[id] = 1;
    }
  }

  mesh.box.d = d;
  for (int k = 0; k < d; ++k) {
    double lo = mesh.nodes[0][k], hi = mesh.nodes[0][k];
    for (const auto& p : mesh.nodes) {
      lo = std::min(lo, p[k]);
      hi = std::max(hi, p[k]);
    }
    mesh.box.lo[k] = lo;
    mesh.box.hi[k] = hi;
  }
  mesh.h = 0.0;
  for (int e = 0; e < mesh.n_elems(); ++e) {
    if (element_volume(mesh, e) <= 0.0) throw ConfigError("mesh file: degenerate element");
    mesh.h = std::max(mesh.h, element_diameter(mesh, e));
  }
  return mesh;
}

void write_mesh_text(const Mesh& mesh, std::ostream& out) {
  out << "pdm " << mesh.d << ' ' << mesh.n_nodes() << ' ' << mesh.n_elems() << '\n';
  for (const auto& p : mesh.nodes) {
    out << format_double(p[0]);
    if (mesh.d == 2) out << ' ' << format_double(p[1]);
    out << '\n';
  }
  for (const auto& el : mesh.elems) {
    out << el[0] << ' ' << el[1];
    if (mesh.d == 2) out << ' ' << el[2];
    out << '\n';
  }
  bool first = true;
  for (int i = 0; i < mesh.n_nodes(); ++i) {
    if (!mesh.on_boundary[i]) continue;
    if (!first) out << ' ';
    out << i;
    first = false;
  }
  out << '\n';
}

} // namespace perifem
