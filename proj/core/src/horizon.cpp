#include "perifem/horizon.hpp"

#include <cmath>
#include <map>

#include "perifem/errors.hpp"

namespace perifem {

double HorizonTable::weight_sum() const {
  double s = 0.0;
  for (const double v : w) s += v;
  return s;
}

int default_m(double eps, double h) {
  if (!(eps > 0.0) || !(h > 0.0)) throw DomainError("default_m requires eps, h > 0");
  return std::max(2, static_cast<int>(std::lround(2.0 * eps / h)));
}

HorizonTable build_horizon_quadrature(double eps, int m, JKind j, int d) {
  if (!(eps > 0.0)) throw DomainError("horizon requires eps > 0");
  if (m < 1) throw DomainError("horizon requires m >= 1");
  if (d != 1 && d != 2) throw DomainError("horizon table supports d = 1 or 2");

  HorizonTable table;
  table.d = d;
  table.m = m;
  table.epsilon = eps;
  table.j = j;

  const double spacing = 1.0 / m;
  const double cell_vol = d == 1 ? spacing : spacing * spacing;
  constexpr int sub = 4; // 4^d subsample points per cut cell
  const int jcells = d == 1 ? 1 : 2 * m;

  std::map<std::pair<int, int>, int> index_of;
  for (int iy = 0; iy < jcells; ++iy) {
    for (int ix = 0; ix < 2 * m; ++ix) {
      const double cx = (ix - m + 0.5) * spacing;
      const double cy = d == 1 ? 0.0 : (iy - m + 0.5) * spacing;

      int inside = 0;
      double sx = 0.0, sy = 0.0;
      for (int qy = 0; qy < (d == 1 ? 1 : sub); ++qy) {
        for (int qx = 0; qx < sub; ++qx) {
          const double px = cx + ((qx + 0.5) / sub - 0.5) * spacing;
          const double py = d == 1 ? 0.0 : cy + ((qy + 0.5) / sub - 0.5) * spacing;
          if (px * px + py * py < 1.0) {
            ++inside;
            sx += px;
            sy += py;
          }
        }
      }
      if (inside == 0) continue;

      const int total = d == 1 ? sub : sub * sub;
      Point offset;
      if (inside == total) {
        offset = {cx, cy};
      } else {
        offset = {sx / inside, sy / inside};
      }
      table.xi.push_back(offset);
      table.w.push_back(cell_vol * inside / total);
      index_of[{ix, iy}] = static_cast<int>(table.xi.size()) - 1;
    }
  }

  table.r.resize(table.xi.size());
  table.jval.resize(table.xi.size());
  table.mirror.resize(table.xi.size());
  for (size_t q = 0; q < table.xi.size(); ++q) {
    const Point& p = table.xi[q];
    table.r[q] = d == 1 ? std::fabs(p[0]) : std::hypot(p[0], p[1]);
    table.jval[q] = j_value(j, table.r[q]);
  }
  for (const auto& [cell, q] : index_of) {
    const auto mirrored = std::make_pair(2 * m - 1 - cell.first,
                                         d == 1 ? 0 : jcells - 1 - cell.second);
    const auto it = index_of.find(mirrored);
    if (it == index_of.end()) throw SolverError("horizon table lost mirror symmetry");
    table.mirror[q] = it->second;
  }
  return table;
}

} // namespace perifem
