#pragma once

#include <cstdint>
#include <vector>

#include "perifem/geometry.hpp"

namespace perifem {

/// Compressed sparse row matrix (square, symmetric storage not exploited).
struct CsrMatrix {
  int n = 0;
  std::vector<int> rowptr;
  std::vector<int> col;
  std::vector<double> val;

  void matvec(const double* x, double* y) const;
  /// Matvec of the constrained operator: identity on masked rows, masked
  /// columns dropped elsewhere.
  void matvec_masked(const double* x, double* y, const std::vector<std::uint8_t>& mask) const;
  double diag(int i) const;
};

struct CgResult {
  int iterations = 0;
  double rel_residual = 0.0;
};

/// Preconditioned conjugate gradients (Jacobi). Solves A x = b to relative
/// residual tol; when mask is given the identity-substituted operator is
/// used. Throws SolverError if max_iter (default 10 n) is exhausted.
CgResult cg_solve(const CsrMatrix& A, const double* b, double* x, double tol,
                  int max_iter = 0, const std::vector<std::uint8_t>* mask = nullptr);

/// Consistent P1 mass matrix (scalar pattern shared by all displacement
/// components) plus its lumped row sums and the boundary constraint mask.
struct MassMatrix {
  const Mesh* mesh = nullptr;
  CsrMatrix scalar;
  std::vector<double> lumped;
  std::vector<std::uint8_t> constrained;

  /// y = M x per displacement component of an (n_nodes * d) vector.
  void apply(const std::vector<double>& x, std::vector<double>& y, bool with_constraints) const;
  /// Solve M out = rhs per component via CG; constrained rows act as identity.
  std::vector<double> solve(const std::vector<double>& rhs, bool with_constraints,
                            double tol = 1e-12, CgResult* stats = nullptr) const;
  /// Lumped-diagonal solve.
  std::vector<double> solve_lumped(const std::vector<double>& rhs, bool with_constraints) const;
  /// a^T M b over all components (no constraints).
  double inner(const std::vector<double>& a, const std::vector<double>& b) const;
  double inner_lumped(const std::vector<double>& a, const std::vector<double>& b) const;
};

MassMatrix assemble_mass(const Mesh& mesh);

} // namespace perifem
