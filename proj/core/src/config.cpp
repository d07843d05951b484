#include "perifem/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "perifem/errors.hpp"
#include "perifem/output.hpp"

namespace perifem {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void fail(const std::string& file, int line, const std::string& msg) {
  throw ConfigError(file + ":" + std::to_string(line) + ": " + msg);
}

double parse_double(const std::string& file, int line, const std::string& key,
                    const std::string& text) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(text, &pos);
    if (pos != text.size()) throw std::invalid_argument("trailing characters");
    if (!std::isfinite(v)) throw std::invalid_argument("non-finite");
    return v;
  } catch (const std::exception&) {
    fail(file, line, "key '" + key + "': cannot parse number '" + text + "'");
  }
}

int parse_int(const std::string& file, int line, const std::string& key,
              const std::string& text) {
  try {
    std::size_t pos = 0;
    const long v = std::stol(text, &pos);
    if (pos != text.size()) throw std::invalid_argument("trailing characters");
    return static_cast<int>(v);
  } catch (const std::exception&) {
    fail(file, line, "key '" + key + "': cannot parse integer '" + text + "'");
  }
}

bool parse_bool(const std::string& file, int line, const std::string& key,
                const std::string& text) {
  if (text == "true" || text == "1") return true;
  if (text == "false" || text == "0") return false;
  fail(file, line, "key '" + key + "': expected true/false, got '" + text + "'");
}

std::vector<std::string> split_ws(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream is(s);
  std::string tok;
  while (is >> tok) out.push_back(tok);
  return out;
}

struct Entry {
  std::string section;
  std::string key;
  std::string value;
  int line = 0;
};

Selector parse_selector(const std::string& file, int line, const std::string& key,
                        const std::string& value, bool forcing, int d) {
  const std::vector<std::string> toks = split_ws(value);
  if (toks.empty()) fail(file, line, "key '" + key + "': empty selector");
  Selector sel;
  sel.name = toks[0];
  auto num = [&](std::size_t i) { return parse_double(file, line, key, toks[i]); };
  auto need = [&](std::size_t lo, std::size_t hi) {
    if (toks.size() < lo + 1 || toks.size() > hi + 1)
      fail(file, line, "key '" + key + "': selector '" + sel.name +
                           "' has the wrong number of parameters");
  };
  if (sel.name == "zero") {
    need(0, 0);
    return sel;
  }
  if (!forcing && sel.name == "sine_mode") {
    need(1, 2);
    sel.args.push_back(num(1));
    sel.args.push_back(toks.size() > 2 ? num(2) : 1.0);
    if (sel.args[0] < 1.0 || sel.args[0] != std::floor(sel.args[0]))
      fail(file, line, "key '" + key + "': sine_mode index must be a positive integer");
    return sel;
  }
  if (!forcing && sel.name == "gaussian") {
    const std::size_t base = (d == 2) ? 3 : 2; // centers + width
    need(base, base + 1);
    for (std::size_t i = 1; i < toks.size(); ++i) sel.args.push_back(num(i));
    if (sel.args.size() == base) sel.args.push_back(1.0);
    const double width = sel.args[d];
    if (!(width > 0.0)) fail(file, line, "key '" + key + "': gaussian width must be positive");
    return sel;
  }
  if (!forcing && sel.name == "from_csv") {
    need(1, 1);
    sel.token = toks[1];
    return sel;
  }
  if (forcing && sel.name == "constant") {
    need(static_cast<std::size_t>(d), static_cast<std::size_t>(d));
    for (int i = 0; i < d; ++i) sel.args.push_back(num(1 + i));
    return sel;
  }
  if (forcing && sel.name == "mms") {
    need(1, 3);
    sel.token = toks[1];
    sel.args.push_back(toks.size() > 2 ? num(2) : kPi);
    sel.args.push_back(toks.size() > 3 ? num(3) : 0.05);
    if ((sel.token == "sine1d" && d != 1) || (sel.token == "sine2d" && d != 2))
      fail(file, line, "key '" + key + "': mms case '" + sel.token +
                           "' does not match the domain dimension");
    if (sel.token != "sine1d" && sel.token != "sine2d")
      fail(file, line, "key '" + key + "': unknown mms case '" + sel.token + "'");
    return sel;
  }
  fail(file, line, "key '" + key + "': unknown selector '" + sel.name + "'");
}

std::string selector_to_string(const Selector& sel) {
  std::string out = sel.name;
  if (!sel.token.empty()) out += " " + sel.token;
  for (double a : sel.args) out += " " + format_double(a);
  return out;
}

} // namespace

PotentialSpec Config::potential() const {
  PotentialSpec pot;
  pot.j = j_kind;
  if (has_cbeta) {
    pot.c = c;
    pot.beta = beta;
  } else {
    const Calibration cal = calibrate(lambda, g_c, j_kind, d);
    pot.c = cal.c;
    pot.beta = cal.beta;
  }
  return pot;
}

Config parse_config(std::istream& in, const std::string& filename) {
  static const std::map<std::string, std::vector<std::string>> kSchema = {
      {"domain", {"box", "d"}},
      {"discretization",
       {"h", "epsilon", "m", "dt", "T", "form", "model", "mass_mode", "deterministic"}},
      {"material", {"lambda", "g_c", "c", "beta", "j_kind"}},
      {"ic", {"u0", "v0"}},
      {"forcing", {"b"}},
      {"output", {"directory", "stride"}},
  };

  std::vector<Entry> entries;
  std::map<std::string, int> seen;
  std::string section;
  std::string raw;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    const std::string line = trim(raw);
    if (line.empty() || line[0] == '#' || line[0] == ';') continue;
    if (line.front() == '[') {
      if (line.back() != ']') fail(filename, lineno, "malformed section header");
      section = trim(line.substr(1, line.size() - 2));
      if (kSchema.find(section) == kSchema.end())
        fail(filename, lineno, "unknown section [" + section + "]");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) fail(filename, lineno, "expected key = value");
    if (section.empty()) fail(filename, lineno, "key outside any section");
    Entry e;
    e.section = section;
    e.key = trim(line.substr(0, eq));
    e.value = trim(line.substr(eq + 1));
    e.line = lineno;
    const auto& keys = kSchema.at(section);
    if (std::find(keys.begin(), keys.end(), e.key) == keys.end())
      fail(filename, lineno, "unknown key '" + e.key + "' in section [" + section + "]");
    const std::string id = section + "." + e.key;
    if (seen.count(id)) fail(filename, lineno, "duplicate key '" + id + "'");
    seen[id] = lineno;
    if (e.value.empty()) fail(filename, lineno, "key '" + e.key + "' has an empty value");
    entries.push_back(std::move(e));
  }

  Config cfg;
  auto find = [&](const std::string& sec, const std::string& key) -> const Entry* {
    for (const Entry& e : entries) {
      if (e.section == sec && e.key == key) return &e;
    }
    return nullptr;
  };

  const Entry* ed = find("domain", "d");
  if (!ed) throw ConfigError(filename + ": missing required key domain.d");
  cfg.d = parse_int(filename, ed->line, "d", ed->value);
  if (cfg.d != 1 && cfg.d != 2) fail(filename, ed->line, "d must be 1 or 2");

  const Entry* eb = find("domain", "box");
  if (!eb) throw ConfigError(filename + ": missing required key domain.box");
  {
    const std::vector<std::string> toks = split_ws(eb->value);
    if (static_cast<int>(toks.size()) != 2 * cfg.d)
      fail(filename, eb->line, "box needs " + std::to_string(2 * cfg.d) + " numbers");
    cfg.box.d = cfg.d;
    if (cfg.d == 1) {
      cfg.box.lo = {parse_double(filename, eb->line, "box", toks[0]), 0.0};
      cfg.box.hi = {parse_double(filename, eb->line, "box", toks[1]), 0.0};
    } else {
      cfg.box.lo = {parse_double(filename, eb->line, "box", toks[0]),
                    parse_double(filename, eb->line, "box", toks[1])};
      cfg.box.hi = {parse_double(filename, eb->line, "box", toks[2]),
                    parse_double(filename, eb->line, "box", toks[3])};
    }
    for (int i = 0; i < cfg.d; ++i) {
      if (!(cfg.box.hi[i] > cfg.box.lo[i]))
        fail(filename, eb->line, "box extents must be positive");
    }
  }

  for (const Entry& e : entries) {
    if (e.section == "domain") continue;
    if (e.section == "discretization") {
      if (e.key == "h") cfg.h = parse_double(filename, e.line, e.key, e.value);
      else if (e.key == "epsilon") cfg.epsilon = parse_double(filename, e.line, e.key, e.value);
      else if (e.key == "m") cfg.m = parse_int(filename, e.line, e.key, e.value);
      else if (e.key == "dt") cfg.dt = parse_double(filename, e.line, e.key, e.value);
      else if (e.key == "T") cfg.T = parse_double(filename, e.line, e.key, e.value);
      else if (e.key == "form") {
        if (e.value == "strong") cfg.form = Form::strong;
        else if (e.value == "weak") cfg.form = Form::weak;
        else fail(filename, e.line, "form must be strong or weak");
      } else if (e.key == "model") {
        if (e.value == "nonlinear") cfg.model = Model::nonlinear;
        else if (e.value == "linear") cfg.model = Model::linear;
        else fail(filename, e.line, "model must be nonlinear or linear");
      } else if (e.key == "mass_mode") {
        if (e.value == "consistent") cfg.mass_mode = MassMode::consistent;
        else if (e.value == "lumped") cfg.mass_mode = MassMode::lumped;
        else fail(filename, e.line, "mass_mode must be consistent or lumped");
      } else if (e.key == "deterministic") {
        cfg.deterministic = parse_bool(filename, e.line, e.key, e.value);
      }
    } else if (e.section == "material") {
      if (e.key == "lambda") { cfg.lambda = parse_double(filename, e.line, e.key, e.value); cfg.has_lame = true; }
      else if (e.key == "g_c") { cfg.g_c = parse_double(filename, e.line, e.key, e.value); }
      else if (e.key == "c") { cfg.c = parse_double(filename, e.line, e.key, e.value); cfg.has_cbeta = true; }
      else if (e.key == "beta") { cfg.beta = parse_double(filename, e.line, e.key, e.value); }
      else if (e.key == "j_kind") {
        if (e.value == "constant") cfg.j_kind = JKind::constant;
        else if (e.value == "linear_decay") cfg.j_kind = JKind::linear_decay;
        else if (e.value == "quartic") cfg.j_kind = JKind::quartic;
        else fail(filename, e.line, "j_kind must be constant, linear_decay, or quartic");
      }
    } else if (e.section == "ic") {
      if (e.key == "u0") cfg.u0 = parse_selector(filename, e.line, e.key, e.value, false, cfg.d);
      else cfg.v0 = parse_selector(filename, e.line, e.key, e.value, false, cfg.d);
    } else if (e.section == "forcing") {
      cfg.b = parse_selector(filename, e.line, e.key, e.value, true, cfg.d);
    } else if (e.section == "output") {
      if (e.key == "directory") cfg.directory = e.value;
      else if (e.key == "stride") cfg.stride = parse_int(filename, e.line, e.key, e.value);
    }
  }

  // Cross-field requirements.
  auto require = [&](bool ok, const std::string& msg) {
    if (!ok) throw ConfigError(filename + ": " + msg);
  };
  require(cfg.h > 0.0, "discretization.h must be given and positive");
  require(cfg.epsilon > 0.0, "discretization.epsilon must be given and positive");
  require(cfg.T > 0.0, "discretization.T must be given and positive");
  require(cfg.m == 0 || cfg.m >= 2, "discretization.m must be at least 2");
  require(cfg.epsilon < cfg.box.min_extent(),
          "epsilon must be smaller than the smallest box extent");

  const bool lame_partial = cfg.has_lame || (find("material", "g_c") != nullptr);
  const bool cbeta_partial = cfg.has_cbeta || (find("material", "beta") != nullptr);
  if (lame_partial && cbeta_partial)
    require(false, "material accepts either (lambda, g_c) or (c, beta), not both");
  if (lame_partial) {
    require(find("material", "lambda") && find("material", "g_c"),
            "material needs both lambda and g_c");
    require(cfg.lambda > 0.0 && cfg.g_c > 0.0, "lambda and g_c must be positive");
    cfg.has_lame = true;
    cfg.has_cbeta = false;
  } else if (cbeta_partial) {
    require(find("material", "c") && find("material", "beta"),
            "material needs both c and beta");
    require(cfg.c > 0.0 && cfg.beta > 0.0, "c and beta must be positive");
    cfg.has_cbeta = true;
  } else {
    require(false, "missing [material]: give (lambda, g_c) or (c, beta)");
  }

  if (cfg.dt >= 0.0) {
    const Entry* edt = find("discretization", "dt");
    if (!(cfg.dt > 0.0) || cfg.dt >= 1.0)
      fail(filename, edt ? edt->line : 0, "dt must lie strictly inside (0, 1)");
    const double ratio = cfg.T / cfg.dt;
    if (std::abs(ratio - std::llround(ratio)) > 1e-8 * std::max(1.0, ratio))
      fail(filename, edt ? edt->line : 0, "T must be an integer multiple of dt");
  } else {
    require(cfg.model == Model::linear,
            "dt may be omitted only with model = linear (CFL chooses the step)");
  }
  require(cfg.stride >= 1, "output.stride must be at least 1");
  return cfg;
}

Config load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  return parse_config(in, path);
}

std::string print_config(const Config& cfg) {
  std::string out;
  out += "[domain]\n";
  out += "d = " + std::to_string(cfg.d) + "\n";
  out += "box =";
  for (int i = 0; i < cfg.d; ++i) out += " " + format_double(cfg.box.lo[i]);
  for (int i = 0; i < cfg.d; ++i) out += " " + format_double(cfg.box.hi[i]);
  out += "\n\n[discretization]\n";
  out += "h = " + format_double(cfg.h) + "\n";
  out += "epsilon = " + format_double(cfg.epsilon) + "\n";
  if (cfg.m > 0) out += "m = " + std::to_string(cfg.m) + "\n";
  if (cfg.dt >= 0.0) out += "dt = " + format_double(cfg.dt) + "\n";
  out += "T = " + format_double(cfg.T) + "\n";
  out += std::string("form = ") + (cfg.form == Form::strong ? "strong" : "weak") + "\n";
  out += std::string("model = ") + (cfg.model == Model::linear ? "linear" : "nonlinear") + "\n";
  out += std::string("mass_mode = ") +
         (cfg.mass_mode == MassMode::lumped ? "lumped" : "consistent") + "\n";
  out += std::string("deterministic = ") + (cfg.deterministic ? "true" : "false") + "\n";
  out += "\n[material]\n";
  if (cfg.has_cbeta) {
    out += "c = " + format_double(cfg.c) + "\n";
    out += "beta = " + format_double(cfg.beta) + "\n";
  } else {
    out += "lambda = " + format_double(cfg.lambda) + "\n";
    out += "g_c = " + format_double(cfg.g_c) + "\n";
  }
  const char* jname = cfg.j_kind == JKind::constant
                          ? "constant"
                          : (cfg.j_kind == JKind::quartic ? "quartic" : "linear_decay");
  out += std::string("j_kind = ") + jname + "\n";
  out += "\n[ic]\n";
  out += "u0 = " + selector_to_string(cfg.u0) + "\n";
  out += "v0 = " + selector_to_string(cfg.v0) + "\n";
  out += "\n[forcing]\n";
  out += "b = " + selector_to_string(cfg.b) + "\n";
  out += "\n[output]\n";
  out += "directory = " + cfg.directory + "\n";
  out += "stride = " + std::to_string(cfg.stride) + "\n";
  return out;
}

PointFn make_ic_fn(const Selector& sel, const Config& cfg) {
  const Box box = cfg.box;
  const int d = cfg.d;
  if (sel.name == "zero") return [](Point) { return Point{0.0, 0.0}; };
  if (sel.name == "sine_mode") {
    const double k = sel.args[0];
    const double amp = sel.args[1];
    return [box, d, k, amp](Point x) -> Point {
      double s = amp;
      for (int i = 0; i < d; ++i) {
        const double hat = (x[i] - box.lo[i]) / box.extent(i);
        s *= std::sin(k * kPi * hat);
      }
      if (d == 1) return {s, 0.0};
      const double inv_sqrt2 = 0.7071067811865475244;
      return {s * inv_sqrt2, s * inv_sqrt2};
    };
  }
  if (sel.name == "gaussian") {
    Point center{sel.args[0], d == 2 ? sel.args[1] : 0.0};
    const double width = sel.args[d];
    const double amp = sel.args[d + 1];
    return [center, width, amp, d](Point x) -> Point {
      double r2 = 0.0;
      for (int i = 0; i < d; ++i) r2 += (x[i] - center[i]) * (x[i] - center[i]);
      const double s = amp * std::exp(-r2 / (2.0 * width * width));
      if (d == 1) return {s, 0.0};
      const double inv_sqrt2 = 0.7071067811865475244;
      return {s * inv_sqrt2, s * inv_sqrt2};
    };
  }
  throw ConfigError("selector '" + sel.name + "' has no point-function form");
}

std::vector<double> read_nodal_csv(const std::string& path, int n_nodes, int d) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open nodal data file: " + path);
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(n_nodes) * d);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    std::replace(t.begin(), t.end(), ',', ' ');
    const std::vector<std::string> toks = split_ws(t);
    if (static_cast<int>(toks.size()) != d)
      throw ConfigError(path + ":" + std::to_string(lineno) + ": expected " +
                        std::to_string(d) + " values per node");
    for (const std::string& tok : toks)
      out.push_back(parse_double(path, lineno, "node value", tok));
  }
  if (static_cast<int>(out.size()) != n_nodes * d)
    throw ConfigError(path + ": expected " + std::to_string(n_nodes) +
                      " rows of nodal values, found " + std::to_string(out.size() / d));
  return out;
}

} // namespace perifem
