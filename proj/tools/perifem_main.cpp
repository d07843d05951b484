#include <chrono>
#include <cmath>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "perifem/config.hpp"
#include "perifem/dynamics.hpp"
#include "perifem/errors.hpp"
#include "perifem/horizon.hpp"
#include "perifem/output.hpp"
#include "perifem/parallel.hpp"
#include "perifem/potential.hpp"
#include "perifem/stability.hpp"
#include "perifem/verification.hpp"

namespace {

using namespace perifem;

struct CommonArgs {
  std::string config_path;
  std::string out_dir;
  int threads = 1;
  bool deterministic = false;
  int stride = 0; // 0: keep the config's value
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--config", args.config_path, "configuration file")->required();
  cmd->add_option("--out", args.out_dir, "output directory (overrides [output] directory)");
  cmd->add_option("--threads", args.threads, "worker pool size")->check(CLI::PositiveNumber);
  cmd->add_flag("--deterministic", args.deterministic,
                "sequential reductions for byte-stable output");
  cmd->add_option("--stride", args.stride, "snapshot stride override")
      ->check(CLI::PositiveNumber);
}

Config load_with_overrides(const CommonArgs& args) {
  Config cfg = load_config(args.config_path);
  if (!args.out_dir.empty()) cfg.directory = args.out_dir;
  if (args.stride > 0) cfg.stride = args.stride;
  if (args.deterministic) cfg.deterministic = true;
  set_threads(cfg.deterministic ? 1 : args.threads);
  return cfg;
}

struct Problem {
  Mesh mesh;
  HorizonTable table;
  MassMatrix mass;
  PotentialSpec pot;
  int m = 0;
};

Problem build_problem(const Config& cfg) {
  Problem p;
  p.pot = cfg.potential();
  p.mesh = build_uniform_mesh(cfg.box, cfg.h);
  p.m = cfg.m > 0 ? cfg.m : default_m(cfg.epsilon, p.mesh.h);
  p.table = build_horizon_quadrature(cfg.epsilon, p.m, p.pot.j, cfg.d);
  p.mass = assemble_mass(p.mesh);
  return p;
}

std::string join_path(const std::string& dir, const std::string& name) {
  if (dir.empty()) return name;
  return dir + "/" + name;
}

int cmd_print_config(const CommonArgs& args) {
  const Config cfg = load_config(args.config_path);
  std::cout << print_config(cfg);
  return 0;
}

int cmd_calibrate(const CommonArgs& args) {
  const Config cfg = load_with_overrides(args);
  const PotentialSpec pot = cfg.potential();
  const DerivedConstants dc = potential_constants(pot, cfg.d);
  KeyValueBlock kv;
  kv.add("d", static_cast<long long>(cfg.d));
  kv.add("j_kind", cfg.j_kind == JKind::constant
                       ? "constant"
                       : (cfg.j_kind == JKind::quartic ? "quartic" : "linear_decay"));
  kv.add("f_prime_0", pot.c * pot.beta);
  kv.add("f_inf", pot.c);
  kv.add("c", pot.c);
  kv.add("beta", pot.beta);
  kv.add("r_bar", dc.r_bar);
  kv.add("M_d", dc.m_d);
  if (dc.l1)
    kv.add("L1", *dc.l1);
  else
    kv.add("L1", "n/a");
  std::cout << kv.to_string();
  return 0;
}

int cmd_cfl(const CommonArgs& args) {
  const Config cfg = load_with_overrides(args);
  const Problem p = build_problem(cfg);
  const SpectralEstimate est =
      rayleigh_sup(p.mesh, p.table, p.pot, cfg.epsilon, cfg.mass_mode);
  KeyValueBlock kv;
  kv.add("mu_max", est.mu_max);
  kv.add("dt_max", est.dt_max);
  kv.add("iterations", static_cast<long long>(est.iterations));
  kv.add("residual", est.residual);
  kv.add("mass_mode", cfg.mass_mode == MassMode::lumped ? "lumped" : "consistent");
  std::cout << kv.to_string();
  return 0;
}

int cmd_estimate(const CommonArgs& args, double c_t_flag, double sup_u_flag, double l1_flag) {
  const Config cfg = load_with_overrides(args);
  double c_t = c_t_flag;
  double sup_u = sup_u_flag;
  if (cfg.b.name == "mms" && (c_t <= 0.0 || sup_u <= 0.0)) {
    const ManufacturedCase cs = make_manufactured(cfg.b.token, cfg.b.args[0], cfg.b.args[1]);
    if (c_t <= 0.0) c_t = cs.sup_utt_l2() + cs.sup_vtt_l2();
    if (sup_u <= 0.0) sup_u = cs.sup_u_h2();
  }
  if (c_t <= 0.0) c_t = 1.0;
  if (sup_u <= 0.0) sup_u = 1.0;
  double l1 = l1_flag;
  if (l1 <= 0.0) {
    const DerivedConstants dc = potential_constants(cfg.potential(), cfg.d);
    l1 = dc.l1 ? *dc.l1 : 4.0;
  }
  const double dt = cfg.dt >= 0.0 ? cfg.dt : 0.0;
  const AprioriBound ab = apriori_bound(cfg.T, cfg.epsilon, cfg.h, dt, c_t, sup_u, l1);
  KeyValueBlock kv;
  kv.add("T", cfg.T);
  kv.add("epsilon", cfg.epsilon);
  kv.add("h", cfg.h);
  kv.add("dt", dt);
  kv.add("C_t", c_t);
  kv.add("sup_u_H2", sup_u);
  kv.add("L1", l1);
  kv.add("exponent", ab.exponent);
  kv.add("exp_factor", ab.exp_factor);
  kv.add("term_t", ab.term_t);
  kv.add("term_s", ab.term_s);
  kv.add("total", ab.total);
  std::cout << kv.to_string();
  return 0;
}

// Fills setup fields shared by run and mms.
void apply_config(RunSetup& setup, const Config& cfg, const Problem& p) {
  setup.mesh = &p.mesh;
  setup.table = &p.table;
  setup.mass = &p.mass;
  setup.pot = p.pot;
  setup.epsilon = cfg.epsilon;
  setup.form = cfg.form;
  setup.model = cfg.model;
  setup.mass_mode = cfg.mass_mode;
  setup.dt = cfg.dt >= 0.0 ? cfg.dt : 0.0;
  setup.T = cfg.T;
  setup.snapshot_stride = cfg.stride;
}

std::string snapshot_header(int d) {
  return d == 1 ? "step,time,node,x0,u0,v0" : "step,time,node,x0,x1,u0,u1,v0,v1";
}

void append_snapshot_rows(std::string& buf, const Mesh& mesh, int k, double t,
                          const std::vector<double>& u, const std::vector<double>& v) {
  const int d = mesh.d;
  for (int i = 0; i < mesh.n_nodes(); ++i) {
    buf += std::to_string(k);
    buf += ',';
    buf += format_double(t);
    buf += ',';
    buf += std::to_string(i);
    for (int c = 0; c < d; ++c) {
      buf += ',';
      buf += format_double(mesh.nodes[i][c]);
    }
    for (int c = 0; c < d; ++c) {
      buf += ',';
      buf += format_double(u[static_cast<std::size_t>(i) * d + c]);
    }
    for (int c = 0; c < d; ++c) {
      buf += ',';
      buf += format_double(v[static_cast<std::size_t>(i) * d + c]);
    }
    buf += '\n';
  }
}

int cmd_run(const CommonArgs& args) {
  const auto t_start = std::chrono::steady_clock::now();
  const Config cfg = load_with_overrides(args);
  const Problem p = build_problem(cfg);

  RunSetup setup;
  apply_config(setup, cfg, p);

  if (cfg.u0.name == "from_csv")
    setup.u0_nodal = read_nodal_csv(cfg.u0.token, p.mesh.n_nodes(), cfg.d);
  else
    setup.u0 = make_ic_fn(cfg.u0, cfg);
  if (cfg.v0.name == "from_csv")
    setup.v0_nodal = read_nodal_csv(cfg.v0.token, p.mesh.n_nodes(), cfg.d);
  else
    setup.v0 = make_ic_fn(cfg.v0, cfg);

  ManufacturedCase mms_case;
  HorizonTable oracle_table;
  ForceContext oracle_ctx;
  if (cfg.b.name == "constant") {
    const Point bv{cfg.b.args[0], cfg.d == 2 ? cfg.b.args[1] : 0.0};
    setup.b = [bv](double, Point) { return bv; };
  } else if (cfg.b.name == "mms") {
    mms_case = make_manufactured(cfg.b.token, cfg.b.args[0], cfg.b.args[1]);
    oracle_table = build_horizon_quadrature(cfg.epsilon, 4 * p.m, p.pot.j, cfg.d);
    oracle_ctx = ForceContext{p.pot, cfg.epsilon, &oracle_table, &p.mesh};
    setup.b = make_manufactured_rhs(mms_case, &oracle_ctx);
  }

  std::string snap_buf = snapshot_header(cfg.d) + "\n";
  std::string energy_buf = "step,time,kinetic,potential,total,work_bound\n";
  setup.snapshot_cb = [&](int k, double t, const std::vector<double>& u,
                          const std::vector<double>& v) {
    append_snapshot_rows(snap_buf, p.mesh, k, t, u, v);
  };
  setup.energy_cb = [&](int k, double t, double kin, double pot_e, double work) {
    energy_buf += std::to_string(k) + ',' + format_double(t) + ',' + format_double(kin) +
                  ',' + format_double(pot_e) + ',' + format_double(kin + pot_e) + ',' +
                  format_double(work) + '\n';
  };

  std::string status = "ok";
  int fail_step = -1;
  double fail_max = 0.0;
  RunResult res;
  int exit_code = 0;
  try {
    res = run(setup);
  } catch (const InstabilityError& e) {
    status = "unstable";
    fail_step = e.step;
    fail_max = e.max_abs_u;
    exit_code = 4;
  }

  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();

  KeyValueBlock kv;
  kv.add("status", status);
  kv.add("form", cfg.form == Form::strong ? "strong" : "weak");
  kv.add("model", cfg.model == Model::linear ? "linear" : "nonlinear");
  kv.add("mass_mode", cfg.mass_mode == MassMode::lumped ? "lumped" : "consistent");
  kv.add("d", static_cast<long long>(cfg.d));
  kv.add("h", p.mesh.h);
  kv.add("epsilon", cfg.epsilon);
  kv.add("m", static_cast<long long>(p.m));
  if (status == "ok") {
    kv.add("steps", static_cast<long long>(res.steps));
    kv.add("dt", res.dt);
    kv.add("final_time", res.T);
    if (res.auto_dt) {
      kv.add("dt_max", res.dt_max);
      kv.add("dt_auto", "true");
    }
    kv.add("max_abs_u", res.max_abs_u);
    if (!res.energy.empty()) {
      const StabilityCheckResult sc = energy_stability_check(res.energy, res.dt);
      kv.add("energy_stability", sc.pass ? "pass" : "fail");
      kv.add("energy_margin", sc.worst_margin);
    }
  } else {
    kv.add("instability_step", static_cast<long long>(fail_step));
    kv.add("max_abs_u", fail_max);
    if (setup.dt > 0.0) kv.add("dt", setup.dt);
  }
  kv.add("deterministic", cfg.deterministic ? "true" : "false");
  kv.add("wall_time_s", wall);

  atomic_write_file(join_path(cfg.directory, "snapshots.csv"), snap_buf);
  atomic_write_file(join_path(cfg.directory, "energy.csv"), energy_buf);
  atomic_write_file(join_path(cfg.directory, "summary.txt"), kv.to_string());
  std::cout << kv.to_string();
  return exit_code;
}

int cmd_mms(const CommonArgs& args) {
  const auto t_start = std::chrono::steady_clock::now();
  const Config cfg = load_with_overrides(args);
  if (cfg.b.name != "mms")
    throw ConfigError("the mms command needs [forcing] b = mms CASE [OMEGA [AMP]]");
  const Problem p = build_problem(cfg);
  const ManufacturedCase cs = make_manufactured(cfg.b.token, cfg.b.args[0], cfg.b.args[1]);
  HorizonTable oracle_table = build_horizon_quadrature(cfg.epsilon, 4 * p.m, p.pot.j, cfg.d);
  ForceContext oracle_ctx{p.pot, cfg.epsilon, &oracle_table, &p.mesh};

  RunSetup setup;
  apply_config(setup, cfg, p);
  setup.u0 = cs.u_at(0.0);
  setup.v0 = cs.ut_at(0.0);
  setup.record_energy = false;
  if (cfg.form == Form::strong)
    setup.b_nodal = make_cached_rhs_nodal(cs, &oracle_ctx, cfg.T);
  else
    setup.b = make_manufactured_rhs(cs, &oracle_ctx);

  std::string err_buf = "step,time,Ek\n";
  double sup_ek = 0.0;
  setup.snapshot_cb = [&](int k, double t, const std::vector<double>& u,
                          const std::vector<double>& v) {
    const double ek = error_ek(p.mesh, u, v, cs, t);
    sup_ek = std::max(sup_ek, ek);
    err_buf += std::to_string(k) + ',' + format_double(t) + ',' + format_double(ek) + '\n';
  };
  const RunResult res = run(setup);
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();

  KeyValueBlock kv;
  kv.add("status", "ok");
  kv.add("case", cs.id);
  kv.add("omega", cs.omega);
  kv.add("amplitude", cs.amplitude);
  kv.add("sup_Ek", sup_ek);
  kv.add("C_t", cs.sup_utt_l2() + cs.sup_vtt_l2());
  kv.add("sup_u_H2", cs.sup_u_h2());
  kv.add("steps", static_cast<long long>(res.steps));
  kv.add("dt", res.dt);
  kv.add("final_time", res.T);
  kv.add("wall_time_s", wall);
  atomic_write_file(join_path(cfg.directory, "errors.csv"), err_buf);
  atomic_write_file(join_path(cfg.directory, "summary.txt"), kv.to_string());
  std::cout << kv.to_string();
  return 0;
}

double parse_resolution_number(const std::string& text, const std::string& tok) {
  std::size_t used = 0;
  double value = 0.0;
  try {
    value = std::stod(text, &used);
  } catch (const std::exception&) {
    throw ConfigError("--resolutions: cannot parse '" + tok +
                      "' (expected a decimal or a num/den fraction)");
  }
  if (used != text.size())
    throw ConfigError("--resolutions: cannot parse '" + tok +
                      "' (expected a decimal or a num/den fraction)");
  return value;
}

double parse_resolution(const std::string& tok) {
  const auto slash = tok.find('/');
  double value = 0.0;
  if (slash != std::string::npos) {
    const double num = parse_resolution_number(tok.substr(0, slash), tok);
    const double den = parse_resolution_number(tok.substr(slash + 1), tok);
    value = num / den;
  } else {
    value = parse_resolution_number(tok, tok);
  }
  if (!std::isfinite(value) || value <= 0.0)
    throw ConfigError("--resolutions: '" + tok + "' must be a positive finite resolution");
  return value;
}

int cmd_converge(const CommonArgs& args, const std::string& kind_str,
                 const std::vector<std::string>& res_toks) {
  const auto t_start = std::chrono::steady_clock::now();
  const Config cfg = load_with_overrides(args);
  if (cfg.b.name != "mms")
    throw ConfigError("the converge command needs [forcing] b = mms CASE [OMEGA [AMP]]");
  SweepKind kind;
  if (kind_str == "spatial") kind = SweepKind::spatial;
  else if (kind_str == "temporal") kind = SweepKind::temporal;
  else throw ConfigError("--kind must be spatial or temporal");

  std::vector<double> resolutions;
  for (const std::string& tok : res_toks) resolutions.push_back(parse_resolution(tok));

  SweepRunSpec spec;
  spec.cs = make_manufactured(cfg.b.token, cfg.b.args[0], cfg.b.args[1]);
  spec.pot = cfg.potential();
  spec.epsilon = cfg.epsilon;
  spec.form = cfg.form;
  spec.model = cfg.model;
  spec.mass_mode = cfg.mass_mode;
  spec.T = cfg.T;
  spec.dt = cfg.dt >= 0.0 ? cfg.dt : 0.0;
  spec.h = cfg.h;
  spec.m = cfg.m;
  spec.sample_stride = cfg.stride;
  if (kind == SweepKind::spatial && !(spec.dt > 0.0))
    throw ConfigError("spatial sweeps need discretization.dt");

  const RateReport rep = converge_sweep(spec, kind, resolutions);
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();

  std::string csv = "resolution,sup_Ek\n";
  for (const SweepPoint& pt : rep.points)
    csv += format_double(pt.resolution) + ',' + format_double(pt.sup_ek) + '\n';
  KeyValueBlock kv;
  kv.add("kind", kind_str);
  kv.add("slope", rep.slope);
  kv.add("intercept", rep.intercept);
  kv.add("r2", rep.r2);
  kv.add("pre_asymptotic", rep.pre_asymptotic ? "true" : "false");
  kv.add("wall_time_s", wall);
  atomic_write_file(join_path(cfg.directory, "rates.csv"), csv);
  atomic_write_file(join_path(cfg.directory, "summary.txt"), kv.to_string());
  std::cout << kv.to_string();
  return 0;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"nonlocal bond-model finite element solver"};
  app.require_subcommand(1);

  CommonArgs run_args, cal_args, cfl_args, conv_args, est_args, mms_args, print_args;
  double est_ct = 0.0, est_supu = 0.0, est_l1 = 0.0;
  std::string conv_kind;
  std::vector<std::string> conv_res;

  CLI::App* c_run = app.add_subcommand("run", "time-step a configured problem");
  add_common(c_run, run_args);
  CLI::App* c_cal = app.add_subcommand("calibrate", "material calibration constants");
  add_common(c_cal, cal_args);
  CLI::App* c_cfl = app.add_subcommand("cfl", "stable time step for the linear model");
  add_common(c_cfl, cfl_args);
  CLI::App* c_conv = app.add_subcommand("converge", "manufactured-solution rate sweep");
  add_common(c_conv, conv_args);
  c_conv->add_option("--kind", conv_kind, "spatial or temporal")->required();
  c_conv->add_option("--resolutions", conv_res, "h or dt values, e.g. 1/16 1/32 1/64")
      ->required()
      ->expected(-3);
  CLI::App* c_est = app.add_subcommand("estimate", "a-priori error bound breakdown");
  add_common(c_est, est_args);
  c_est->add_option("--c-t", est_ct, "time-derivative constant C_t");
  c_est->add_option("--sup-u-h2", est_supu, "sup of the H2 norm of the exact solution");
  c_est->add_option("--l1", est_l1, "Lipschitz constant L1");
  CLI::App* c_mms = app.add_subcommand("mms", "manufactured-solution error run");
  add_common(c_mms, mms_args);
  CLI::App* c_print = app.add_subcommand("print-config", "echo the normalized configuration");
  add_common(c_print, print_args);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (c_run->parsed()) return cmd_run(run_args);
    if (c_cal->parsed()) return cmd_calibrate(cal_args);
    if (c_cfl->parsed()) return cmd_cfl(cfl_args);
    if (c_conv->parsed()) return cmd_converge(conv_args, conv_kind, conv_res);
    if (c_est->parsed()) return cmd_estimate(est_args, est_ct, est_supu, est_l1);
    if (c_mms->parsed()) return cmd_mms(mms_args);
    if (c_print->parsed()) return cmd_print_config(print_args);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const InstabilityError& e) {
    std::cerr << "instability: " << e.what() << "\n";
    return 4;
  } catch (const DomainError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "solver error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
