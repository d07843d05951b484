#include "perifem/quadrature.hpp"

#include "perifem/errors.hpp"

namespace perifem {

namespace {

// 1D Gauss-Legendre on [0,1], barycentric (1-t, t, unused).
// 2 points: exact through degree 3.
const double g2_t = 0.28867513459481287; // 1/(2 sqrt(3))
const double b1d2[2][3] = {{0.5 + g2_t, 0.5 - g2_t, 0.0},
                           {0.5 - g2_t, 0.5 + g2_t, 0.0}};
const double w1d2[2] = {0.5, 0.5};

// 3 points: exact through degree 5.
const double g3_t = 0.3872983346207417; // sqrt(3/5)/2
const double b1d4[3][3] = {{0.5 + g3_t, 0.5 - g3_t, 0.0},
                           {0.5, 0.5, 0.0},
                           {0.5 - g3_t, 0.5 + g3_t, 0.0}};
const double w1d4[3] = {5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0};

// Triangle, 3 interior points: exact through degree 2.
const double b2d2[3][3] = {{2.0 / 3.0, 1.0 / 6.0, 1.0 / 6.0},
                           {1.0 / 6.0, 2.0 / 3.0, 1.0 / 6.0},
                           {1.0 / 6.0, 1.0 / 6.0, 2.0 / 3.0}};
const double w2d2[3] = {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};

// Triangle, 6 points: exact through degree 4.
const double t4a = 0.445948490915965;
const double t4b = 0.091576213509771;
const double t4wa = 0.223381589678011;
const double t4wb = 0.109951743655322;
const double b2d4[6][3] = {
    {1.0 - 2.0 * t4a, t4a, t4a}, {t4a, 1.0 - 2.0 * t4a, t4a},
    {t4a, t4a, 1.0 - 2.0 * t4a}, {1.0 - 2.0 * t4b, t4b, t4b},
    {t4b, 1.0 - 2.0 * t4b, t4b}, {t4b, t4b, 1.0 - 2.0 * t4b}};
const double w2d4[6] = {t4wa, t4wa, t4wa, t4wb, t4wb, t4wb};

const SimplexRule rules[4] = {
    {2, b1d2, w1d2}, // d=1, degree 2 (actually exact to 3)
    {3, b1d4, w1d4}, // d=1, degree 4 (exact to 5)
    {3, b2d2, w2d2}, // d=2, degree 2
    {6, b2d4, w2d4}, // d=2, degree 4
};

} // namespace

const SimplexRule& simplex_rule(int d, int degree) {
  if (d != 1 && d != 2) throw DomainError("simplex_rule: d must be 1 or 2");
  if (degree != 2 && degree != 4) throw DomainError("simplex_rule: degree must be 2 or 4");
  return rules[(d - 1) * 2 + (degree == 4 ? 1 : 0)];
}

Point map_to_element(const Mesh& mesh, int e, const SimplexRule& rule, int q) {
  const auto& el = mesh.elems[e];
  Point x{0.0, 0.0};
  for (int i = 0; i <= mesh.d; ++i) {
    x[0] += rule.bary[q][i] * mesh.nodes[el[i]][0];
    x[1] += rule.bary[q][i] * mesh.nodes[el[i]][1];
  }
  return x;
}

} // namespace perifem
