#include "perifem/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "perifem/errors.hpp"

namespace perifem {

void CsrMatrix::matvec(const double* x, double* y) const {
  for (int i = 0; i < n; ++i) {
    double s = 0.0;
    for (int k = rowptr[i]; k < rowptr[i + 1]; ++k) s += val[k] * x[col[k]];
    y[i] = s;
  }
}

void CsrMatrix::matvec_masked(const double* x, double* y,
                              const std::vector<std::uint8_t>& mask) const {
  for (int i = 0; i < n; ++i) {
    if (mask[i]) {
      y[i] = x[i];
      continue;
    }
    double s = 0.0;
    for (int k = rowptr[i]; k < rowptr[i + 1]; ++k) {
      const int j = col[k];
      if (!mask[j]) s += val[k] * x[j];
    }
    y[i] = s;
  }
}

double CsrMatrix::diag(int i) const {
  for (int k = rowptr[i]; k < rowptr[i + 1]; ++k) {
    if (col[k] == i) return val[k];
  }
  return 0.0;
}

CgResult cg_solve(const CsrMatrix& A, const double* b, double* x, double tol,
                  int max_iter, const std::vector<std::uint8_t>* mask) {
  const int n = A.n;
  if (max_iter <= 0) max_iter = 10 * n;

  std::vector<double> diag_inv(n);
  for (int i = 0; i < n; ++i) {
    const double dv = (mask && (*mask)[i]) ? 1.0 : A.diag(i);
    if (!(dv > 0.0)) throw SolverError("cg: non-positive diagonal entry");
    diag_inv[i] = 1.0 / dv;
  }

  auto apply = [&](const double* in, double* out) {
    if (mask)
      A.matvec_masked(in, out, *mask);
    else
      A.matvec(in, out);
  };

  double bnorm = 0.0;
  for (int i = 0; i < n; ++i) bnorm += b[i] * b[i];
  bnorm = std::sqrt(bnorm);
  if (bnorm == 0.0) {
    std::fill(x, x + n, 0.0);
    return {0, 0.0};
  }

  std::vector<double> r(n), z(n), p(n), Ap(n);
  apply(x, Ap.data());
  for (int i = 0; i < n; ++i) r[i] = b[i] - Ap[i];
  for (int i = 0; i < n; ++i) z[i] = r[i] * diag_inv[i];
  p = z;
  double rz = 0.0;
  for (int i = 0; i < n; ++i) rz += r[i] * z[i];

  double rnorm = 0.0;
  for (int i = 0; i < n; ++i) rnorm += r[i] * r[i];
  rnorm = std::sqrt(rnorm);

  int it = 0;
  while (rnorm > tol * bnorm) {
    if (it >= max_iter)
      throw SolverError("cg: no convergence after " + std::to_string(max_iter) +
                        " iterations, relative residual " + std::to_string(rnorm / bnorm));
    apply(p.data(), Ap.data());
    double pAp = 0.0;
    for (int i = 0; i < n; ++i) pAp += p[i] * Ap[i];
    if (!(pAp > 0.0)) throw SolverError("cg: operator lost positive definiteness");
    const double alpha = rz / pAp;
    for (int i = 0; i < n; ++i) x[i] += alpha * p[i];
    for (int i = 0; i < n; ++i) r[i] -= alpha * Ap[i];
    for (int i = 0; i < n; ++i) z[i] = r[i] * diag_inv[i];
    double rz_new = 0.0;
    for (int i = 0; i < n; ++i) rz_new += r[i] * z[i];
    const double beta = rz_new / rz;
    rz = rz_new;
    for (int i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
    rnorm = 0.0;
    for (int i = 0; i < n; ++i) rnorm += r[i] * r[i];
    rnorm = std::sqrt(rnorm);
    ++it;
  }
  return {it, rnorm / bnorm};
}

MassMatrix assemble_mass(const Mesh& mesh) {
  const int n = mesh.n_nodes();
  const int npe = mesh.nodes_per_elem();

  std::vector<std::map<int, double>> rows(n);
  for (int e = 0; e < mesh.n_elems(); ++e) {
    const double vol = element_volume(mesh, e);
    // P1 element mass: diagonal gets vol * 2 / (npe * (npe + 1)),
    // off-diagonal vol / (npe * (npe + 1)).
    const double off = vol / (npe * (npe + 1));
    for (int a = 0; a < npe; ++a) {
      const int ia = mesh.elems[e][a];
      for (int b = 0; b < npe; ++b) {
        const int ib = mesh.elems[e][b];
        rows[ia][ib] += (a == b) ? 2.0 * off : off;
      }
    }
  }

  MassMatrix m;
  m.mesh = &mesh;
  m.scalar.n = n;
  m.scalar.rowptr.resize(n + 1, 0);
  for (int i = 0; i < n; ++i) m.scalar.rowptr[i + 1] = m.scalar.rowptr[i] + static_cast<int>(rows[i].size());
  m.scalar.col.reserve(m.scalar.rowptr[n]);
  m.scalar.val.reserve(m.scalar.rowptr[n]);
  for (int i = 0; i < n; ++i) {
    for (const auto& [j, v] : rows[i]) {
      m.scalar.col.push_back(j);
      m.scalar.val.push_back(v);
    }
  }
  m.lumped.resize(n, 0.0);
  for (int i = 0; i < n; ++i) {
    double s = 0.0;
    for (int k = m.scalar.rowptr[i]; k < m.scalar.rowptr[i + 1]; ++k) s += m.scalar.val[k];
    m.lumped[i] = s;
  }
  m.constrained = mesh.on_boundary;
  return m;
}

void MassMatrix::apply(const std::vector<double>& x, std::vector<double>& y,
                       bool with_constraints) const {
  const int n = scalar.n;
  const int d = mesh->d;
  y.assign(x.size(), 0.0);
  std::vector<double> xin(n), xout(n);
  for (int c = 0; c < d; ++c) {
    for (int i = 0; i < n; ++i) xin[i] = x[i * d + c];
    if (with_constraints)
      scalar.matvec_masked(xin.data(), xout.data(), constrained);
    else
      scalar.matvec(xin.data(), xout.data());
    for (int i = 0; i < n; ++i) y[i * d + c] = xout[i];
  }
}

std::vector<double> MassMatrix::solve(const std::vector<double>& rhs, bool with_constraints,
                                      double tol, CgResult* stats) const {
  const int n = scalar.n;
  const int d = mesh->d;
  std::vector<double> out(rhs.size(), 0.0);
  std::vector<double> bin(n), xout(n, 0.0);
  CgResult total;
  for (int c = 0; c < d; ++c) {
    for (int i = 0; i < n; ++i) bin[i] = rhs[i * d + c];
    std::fill(xout.begin(), xout.end(), 0.0);
    const CgResult r = cg_solve(scalar, bin.data(), xout.data(), tol, 0,
                                with_constraints ? &constrained : nullptr);
    total.iterations += r.iterations;
    total.rel_residual = std::max(total.rel_residual, r.rel_residual);
    for (int i = 0; i < n; ++i) out[i * d + c] = xout[i];
  }
  if (stats) *stats = total;
  return out;
}

std::vector<double> MassMatrix::solve_lumped(const std::vector<double>& rhs,
                                             bool with_constraints) const {
  const int n = scalar.n;
  const int d = mesh->d;
  std::vector<double> out(rhs.size(), 0.0);
  for (int i = 0; i < n; ++i) {
    const double inv = (with_constraints && constrained[i]) ? 1.0 : 1.0 / lumped[i];
    for (int c = 0; c < d; ++c) out[i * d + c] = rhs[i * d + c] * inv;
  }
  return out;
}

double MassMatrix::inner(const std::vector<double>& a, const std::vector<double>& b) const {
  std::vector<double> mb;
  apply(b, mb, false);
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * mb[i];
  return s;
}

double MassMatrix::inner_lumped(const std::vector<double>& a, const std::vector<double>& b) const {
  const int n = scalar.n;
  const int d = mesh->d;
  double s = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int c = 0; c < d; ++c) s += lumped[i] * a[i * d + c] * b[i * d + c];
  }
  return s;
}

} // namespace perifem
