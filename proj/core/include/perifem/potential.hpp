#pragma once

#include <optional>

namespace perifem {

/// Radial influence profile J(r) on [0,1].
enum class JKind { constant, linear_decay, quartic };

/// Bond potential profile f(r) = c * (1 - exp(-beta r)) together with the
/// influence function used to weight bonds. f is increasing, concave and
/// saturates at f_inf = c, so short bonds respond with stiffness f'(0) = c*beta
/// while heavily stretched bonds soften toward a finite energy per bond.
struct PotentialSpec {
  double c = 1.0;
  double beta = 1.0;
  JKind j = JKind::linear_decay;
};

double f_value(const PotentialSpec& p, double r);
double f_prime(const PotentialSpec& p, double r);
double f_second(const PotentialSpec& p, double r);

/// k-th derivative (k = 0..4) of the profile F1(r) = f(r^2).
double f1_deriv(const PotentialSpec& p, int k, double r);

/// J(r); zero outside [0,1].
double j_value(JKind j, double r);

/// Volume of the unit ball in R^n for n = 0..3: {1, 2, pi, 4 pi / 3}.
double unit_ball_volume(int n);

/// Dimension-dependent calibration coefficient: 2/3, 1/4, 1/5 for d = 1,2,3.
double cd_coefficient(int d);

/// d-th radial moment of J: integral of J(r) r^d over [0,1].
double j_moment(JKind j, int d);

/// (1/omega_d) * integral of J(|xi|)/|xi|^alpha over the unit ball, for
/// alpha = 1. Divergent when d = 1 (J does not vanish at the origin), in
/// which case nullopt is returned.
std::optional<double> j_bar1(JKind j, int d);

/// Material parameters (c, beta) matching a target Lame constant and
/// critical energy release rate:
///   lambda = mu  = C_d f'(0) M_d
///   G_c         = (2 omega_{d-1} / omega_d) f_inf M_d
struct Calibration {
  double f_prime0 = 0.0;
  double f_inf = 0.0;
  double c = 0.0;
  double beta = 0.0;
};
Calibration calibrate(double lambda, double g_c, JKind j, int d);

/// Location r_bar of the inflection of r -> f'(r^2) r; bonds soften once
/// sqrt(|y-x|) S exceeds it. For this profile r_bar = 1/sqrt(2 beta).
double inflection_point(const PotentialSpec& p);

/// Critical strain S_c = r_bar / sqrt(bond_length); the bond force
/// f'(l S^2) S peaks there. Throws DomainError for bond_length <= 0.
double critical_strain(double r_bar, double bond_length);

/// Constants of the potential entering the stability and error analysis.
/// C1..C4 are suprema of |F1^(k)| found by a log-spaced grid scan with
/// golden-section refinement; L1 = 4 C2 Jbar_1 is the force Lipschitz
/// numerator, absent whenever Jbar_1 diverges.
struct DerivedConstants {
  double r_bar = 0.0;
  double c1 = 0.0, c2 = 0.0, c3 = 0.0, c4 = 0.0;
  double m_d = 0.0;
  std::optional<double> jbar1;
  std::optional<double> l1;
};
DerivedConstants potential_constants(const PotentialSpec& p, int d,
                                     int scan_points = 1000000);

} // namespace perifem
