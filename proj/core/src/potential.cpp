#include "perifem/potential.hpp"

#include <cmath>
#include <vector>

#include "perifem/errors.hpp"

namespace perifem {

namespace {

void check_spec(const PotentialSpec& p) {
  if (!(p.c > 0.0) || !(p.beta > 0.0))
    throw DomainError("potential requires c > 0 and beta > 0");
}

void check_dim(int d) {
  if (d < 1 || d > 3) throw DomainError("dimension must be 1, 2 or 3");
}

} // namespace

double f_value(const PotentialSpec& p, double r) {
  check_spec(p);
  return p.c * (1.0 - std::exp(-p.beta * r));
}

double f_prime(const PotentialSpec& p, double r) {
  check_spec(p);
  return p.c * p.beta * std::exp(-p.beta * r);
}

double f_second(const PotentialSpec& p, double r) {
  check_spec(p);
  return -p.c * p.beta * p.beta * std::exp(-p.beta * r);
}

double f1_deriv(const PotentialSpec& p, int k, double r) {
  check_spec(p);
  const double c = p.c, b = p.beta;
  const double e = std::exp(-b * r * r);
  switch (k) {
    case 0: return c * (1.0 - e);
    case 1: return 2.0 * b * c * r * e;
    case 2: return 2.0 * b * c * (1.0 - 2.0 * b * r * r) * e;
    case 3: return 4.0 * b * b * c * r * (2.0 * b * r * r - 3.0) * e;
    case 4: {
      const double br2 = b * r * r;
      return 4.0 * b * b * c * (-4.0 * br2 * br2 + 12.0 * br2 - 3.0) * e;
    }
    default: throw DomainError("f1_deriv supports orders 0..4");
  }
}

double j_value(JKind j, double r) {
  if (r < 0.0) throw DomainError("j_value requires r >= 0");
  if (r >= 1.0) return (j == JKind::constant && r == 1.0) ? 1.0 : 0.0;
  switch (j) {
    case JKind::constant: return 1.0;
    case JKind::linear_decay: return 1.0 - r;
    case JKind::quartic: {
      const double q = 1.0 - r * r;
      const double q2 = q * q;
      return q2 * q2;
    }
  }
  return 0.0;
}

double unit_ball_volume(int n) {
  switch (n) {
    case 0: return 1.0;
    case 1: return 2.0;
    case 2: return M_PI;
    case 3: return 4.0 * M_PI / 3.0;
    default: throw DomainError("unit_ball_volume supports n = 0..3");
  }
}

double cd_coefficient(int d) {
  check_dim(d);
  switch (d) {
    case 1: return 2.0 / 3.0;
    case 2: return 1.0 / 4.0;
    default: return 1.0 / 5.0;
  }
}

double j_moment(JKind j, int d) {
  if (d < 0) throw DomainError("j_moment requires d >= 0");
  const double n = static_cast<double>(d);
  switch (j) {
    case JKind::constant: return 1.0 / (n + 1.0);
    case JKind::linear_decay: return 1.0 / ((n + 1.0) * (n + 2.0));
    case JKind::quartic: {
      // (1-r^2)^4 = sum_k binom(4,k) (-1)^k r^(2k)
      static const double binom[5] = {1.0, -4.0, 6.0, -4.0, 1.0};
      double s = 0.0;
      for (int k = 0; k <= 4; ++k) s += binom[k] / (n + 2.0 * k + 1.0);
      return s;
    }
  }
  return 0.0;
}

std::optional<double> j_bar1(JKind j, int d) {
  check_dim(d);
  // (1/omega_d) int_{B_1} J(|xi|)/|xi| dxi = d * int_0^1 J(r) r^(d-2) dr,
  // which diverges for d = 1 because J(0) = 1 for every profile here.
  if (d == 1) return std::nullopt;
  return static_cast<double>(d) * j_moment(j, d - 2);
}

Calibration calibrate(double lambda, double g_c, JKind j, int d) {
  check_dim(d);
  if (!(lambda > 0.0) || !(g_c > 0.0))
    throw DomainError("calibrate requires lambda > 0 and g_c > 0");
  const double md = j_moment(j, d);
  Calibration out;
  out.f_prime0 = lambda / (cd_coefficient(d) * md);
  out.f_inf = g_c * unit_ball_volume(d) / (2.0 * unit_ball_volume(d - 1) * md);
  out.c = out.f_inf;
  out.beta = out.f_prime0 / out.f_inf;
  return out;
}

double inflection_point(const PotentialSpec& p) {
  check_spec(p);
  // root of f'(r^2) + 2 r^2 f''(r^2) = c beta e^{-beta r^2} (1 - 2 beta r^2)
  return 1.0 / std::sqrt(2.0 * p.beta);
}

double critical_strain(double r_bar, double bond_length) {
  if (!(bond_length > 0.0))
    throw DomainError("critical_strain requires bond_length > 0");
  if (!(r_bar > 0.0)) throw DomainError("critical_strain requires r_bar > 0");
  return r_bar / std::sqrt(bond_length);
}

namespace {

// |F1^(k)| maximized over [0, rmax] by a log-spaced scan plus
// golden-section refinement of the best bracket.
double scan_sup(const PotentialSpec& p, int k, double rmax, int n) {
  std::vector<double> grid;
  grid.reserve(static_cast<size_t>(n) + 1);
  grid.push_back(0.0);
  const double lo_exp = std::log10(rmax) - 9.0;
  const double hi_exp = std::log10(rmax);
  for (int i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / static_cast<double>(n - 1);
    grid.push_back(std::pow(10.0, lo_exp + t * (hi_exp - lo_exp)));
  }

  size_t best = 0;
  double best_val = -1.0;
  for (size_t i = 0; i < grid.size(); ++i) {
    const double v = std::fabs(f1_deriv(p, k, grid[i]));
    if (v > best_val) {
      best_val = v;
      best = i;
    }
  }

  double a = grid[best > 0 ? best - 1 : 0];
  double b = grid[best + 1 < grid.size() ? best + 1 : grid.size() - 1];
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  while (b - a > 1e-13 * std::max(1.0, b)) {
    const double x1 = b - gr * (b - a);
    const double x2 = a + gr * (b - a);
    if (std::fabs(f1_deriv(p, k, x1)) < std::fabs(f1_deriv(p, k, x2)))
      a = x1;
    else
      b = x2;
  }
  return std::max(best_val, std::fabs(f1_deriv(p, k, 0.5 * (a + b))));
}

} // namespace

DerivedConstants potential_constants(const PotentialSpec& p, int d,
                                     int scan_points) {
  check_spec(p);
  check_dim(d);
  if (scan_points < 1000) throw DomainError("scan grid too coarse");

  DerivedConstants out;
  out.r_bar = inflection_point(p);
  const double rmax = 50.0 / std::sqrt(p.beta);
  out.c1 = scan_sup(p, 1, rmax, scan_points);
  out.c2 = scan_sup(p, 2, rmax, scan_points);
  out.c3 = scan_sup(p, 3, rmax, scan_points);
  out.c4 = scan_sup(p, 4, rmax, scan_points);
  out.m_d = j_moment(p.j, d);
  out.jbar1 = j_bar1(p.j, d);
  if (out.jbar1) out.l1 = 4.0 * out.c2 * *out.jbar1;
  return out;
}

} // namespace perifem
