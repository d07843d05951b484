#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "perifem/dynamics.hpp"
#include "perifem/geometry.hpp"
#include "perifem/potential.hpp"

namespace perifem {

/// Parsed value of an [ic] or [forcing] selector line, e.g.
/// "sine_mode 1 0.05", "gaussian 0.5 0.1", "from_csv data.csv",
/// "constant 1 0", "mms sine1d 3.14 0.05".
struct Selector {
  std::string name = "zero";
  std::string token;        // case id (mms) or file path (from_csv)
  std::vector<double> args; // numeric parameters in order of appearance
};

struct Config {
  // [domain]
  int d = 0;
  Box box;
  // [discretization]
  double h = 0.0;
  double epsilon = 0.0;
  int m = 0; // 0 means the per-mesh default
  double dt = -1.0; // absent: allowed only for model=linear (CFL pick)
  double T = 0.0;
  Form form = Form::weak;
  Model model = Model::nonlinear;
  MassMode mass_mode = MassMode::consistent;
  bool deterministic = false;
  // [material]
  bool has_lame = false;
  double lambda = 0.0;
  double g_c = 0.0;
  bool has_cbeta = false;
  double c = 0.0;
  double beta = 0.0;
  JKind j_kind = JKind::linear_decay;
  // [ic]
  Selector u0;
  Selector v0;
  // [forcing]
  Selector b;
  // [output]
  std::string directory = "out";
  int stride = 1;

  /// Material resolved to the potential profile; (lambda, g_c) inputs run
  /// through the calibration identities for the domain dimension.
  PotentialSpec potential() const;
};

/// Strict parse: unknown sections or keys, malformed numbers, duplicate
/// keys, missing requirements, or invariant violations raise ConfigError
/// with the offending line number.
Config parse_config(std::istream& in, const std::string& filename);
Config load_config(const std::string& path);

/// Normalized echo; parsing the output reproduces the same Config.
std::string print_config(const Config& cfg);

/// Initial-condition selector resolved to a point function.
PointFn make_ic_fn(const Selector& sel, const Config& cfg);
/// Reads one line of d whitespace-separated values per mesh node.
std::vector<double> read_nodal_csv(const std::string& path, int n_nodes, int d);

} // namespace perifem
