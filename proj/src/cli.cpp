#include "prodprice/cli.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "prodprice/config.hpp"
#include "prodprice/errors.hpp"
#include "prodprice/hamiltonian.hpp"
#include "prodprice/oracle.hpp"
#include "prodprice/simulate.hpp"
#include "prodprice/strategy.hpp"
#include "prodprice/value.hpp"

namespace prodprice {

namespace {

namespace fs = std::filesystem;

void write_file(const fs::path& path, const std::function<void(std::ostream&)>& body) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw ConfigError("cannot write '" + path.string() + "'");
  os << std::setprecision(17);
  body(os);
  if (!os) throw ConfigError("write failed for '" + path.string() + "'");
}

TailChoice parse_tail(const RunConfig& cfg) {
  TailChoice c;
  if (cfg.tail == "auto") {
    c.kind = TailKind::kAuto;
  } else if (cfg.tail == "static") {
    c.kind = TailKind::kStatic;
  } else if (cfg.tail == "relaxed") {
    c.kind = TailKind::kRelaxed;
  } else if (cfg.tail == "cyclic") {
    c.kind = TailKind::kCyclic;
  } else {
    throw InvalidParameter("--tail must be auto, static, relaxed or cyclic");
  }
  if (cfg.eps) {
    if (!(*cfg.eps > 0.0)) throw InvalidParameter("--eps must be positive");
    c.eps = *cfg.eps;
    if (c.kind == TailKind::kAuto) c.kind = TailKind::kCyclic;
  }
  if (c.kind == TailKind::kCyclic && !(c.eps > 0.0)) throw InvalidParameter("a cyclic tail needs --eps");
  return c;
}

struct Session {
  ProblemConfig config;
  ValidatedProblem problem;
  HamiltonianModel h;
  ValueFunction vf;
};

Session open_session(const RunConfig& cfg) {
  ProblemConfig pc = load_config(cfg.config_path, cfg.overrides);
  if (cfg.grid_n) pc.spec.grid_n = *cfg.grid_n;
  ValidatedProblem problem = validate_problem(pc.spec);
  HamiltonianOptions ho;
  ho.grid_n = std::max<std::size_t>(problem.grid_n(), ho.grid_n);
  HamiltonianModel h = build_hamiltonian(problem, ho);
  ValueFunction vf = build_value(h, problem.beta());
  return Session{std::move(pc), std::move(problem), std::move(h), std::move(vf)};
}

std::vector<double> value_grid(const OracleSettings& o) {
  std::vector<double> xs(o.nx);
  for (std::size_t i = 0; i < o.nx; ++i) {
    xs[i] = i + 1 == o.nx ? o.x_max : o.x_max * static_cast<double>(i) / static_cast<double>(o.nx - 1);
  }
  return xs;
}

StrategyPlan build_plan(const Session& s, double x0, const TailChoice& tail) {
  if (x0 > 0.0) return drawdown_plan(s.problem, s.vf, x0, tail);
  return std::visit([](const auto& p) -> StrategyPlan { return p; }, make_tail(s.problem, s.h, tail));
}

void cmd_solve(const Session& s, const fs::path& out) {
  write_file(out / "value.csv", [&](std::ostream& os) { write_value_csv(os, s.vf, value_grid(s.config.oracle)); });
  const StaticTest test = static_optimality_test(s.problem, s.h);
  const StaticCandidate cand = static_candidate(s.problem);
  const Convexified conv = convexified_static(s.problem, s.h);
  write_file(out / "summary.txt", [&](std::ostream& os) {
    os << "zeta=" << s.h.zeta() << '\n'
       << "m_hi=" << s.h.m_hi() << '\n'
       << "z_max=" << s.h.z_max() << '\n'
       << "trunc_bound=" << s.h.trunc_bound() << '\n'
       << "H_at_0=" << s.vf.H_at_0() << '\n'
       << "H_at_zeta=" << s.vf.H_at_zeta() << '\n'
       << "v0=" << s.vf.value_at(0.0) << '\n'
       << "v_limit=" << s.vf.H_at_0() / s.vf.beta() << '\n'
       << "u_hat=" << cand.u_hat << '\n'
       << "best_static=" << test.best_static << '\n'
       << "u_tilde=" << conv.u_tilde << '\n'
       << "relaxed_static_value=" << conv.value << '\n'
       << "static_optimal=" << (test.optimal ? "true" : "false") << '\n'
       << "zeta_zero=" << (s.vf.constant() ? "true" : "false") << '\n';
    if (const auto& cf = s.config.closed_form) {
      const ArvanMosesReference ref = arvan_moses_reference(cf->a, cf->b, cf->k);
      os << "regime=" << to_string(ref.regime) << '\n'
         << "reference_zeta=" << ref.zeta << '\n'
         << "reference_u_tilde=" << ref.u_hat << '\n';
    }
  });
}

void cmd_strategy(const Session& s, const RunConfig& cfg, const fs::path& out) {
  const TailChoice tail = parse_tail(cfg);
  const double x0 = cfg.x0.value_or(0.0);
  if (x0 < 0.0) throw InvalidParameter("--x0 must be non-negative");
  if (x0 > 0.0) {
    const DrawdownPlan plan = drawdown_plan(s.problem, s.vf, x0, tail);
    write_file(out / "drawdown.csv", [&](std::ostream& os) { write_drawdown_csv(os, plan); });
    write_file(out / "plan.txt", [&](std::ostream& os) {
      os << "x0=" << plan.x0 << '\n'
         << "tau=" << plan.tau << '\n'
         << "xi0=" << plan.xi0 << '\n'
         << "zeta_zero=" << (plan.zeta_zero ? "true" : "false") << '\n';
      write_tail(os, plan.tail);
    });
  } else {
    const TailPlan plan = make_tail(s.problem, s.h, tail);
    write_file(out / "plan.txt", [&](std::ostream& os) {
      os << "x0=0\n";
      write_tail(os, plan);
    });
  }
}

std::string gap_text(const Trajectory& traj, const ValueFunction& vf, double x0) {
  try {
    std::ostringstream os;
    os << std::setprecision(17) << profit_gap(traj, vf, x0);
    return os.str();
  } catch (const HorizonTooShort&) {
    return "unavailable";
  }
}

void cmd_simulate(const Session& s, const RunConfig& cfg, const fs::path& out) {
  const double x0 = cfg.x0.value_or(0.0);
  if (x0 < 0.0) throw InvalidParameter("--x0 must be non-negative");
  const double horizon = cfg.horizon.value_or(60.0);
  if (!(horizon > 0.0)) throw InvalidParameter("--horizon must be positive");
  const StrategyPlan plan = build_plan(s, x0, parse_tail(cfg));
  const Trajectory traj = simulate(s.problem, plan, x0, horizon, cfg.dt.value_or(0.0));
  write_file(out / "trajectory.csv", [&](std::ostream& os) { write_trajectory_csv(os, traj); });
  write_file(out / "simulation.txt", [&](std::ostream& os) {
    os << "x0=" << x0 << '\n'
       << "horizon=" << traj.horizon() << '\n'
       << "J=" << traj.total() << '\n'
       << "v_x0=" << s.vf.value_at(x0) << '\n';
    os << "profit_gap=" << gap_text(traj, s.vf, x0) << '\n';
  });
}

DPResult run_oracle(const Session& s, const RunConfig& cfg) {
  const OracleSettings& o = s.config.oracle;
  DPOptions opts;
  opts.max_sweeps = o.max_sweeps;
  return dp_value(s.problem, o.x_max, o.nx, cfg.dt.value_or(o.dt), o.tol, opts);
}

void cmd_oracle(const Session& s, const RunConfig& cfg, const fs::path& out) {
  const DPResult r = run_oracle(s, cfg);
  write_file(out / "dp.csv", [&](std::ostream& os) { write_dp_csv(os, r); });
}

void cmd_compare(const Session& s, const RunConfig& cfg, const fs::path& out) {
  const DPResult r = run_oracle(s, cfg);
  const double x_half = 0.5 * s.config.oracle.x_max;
  double max_err = 0.0;
  double arg = 0.0;
  for (std::size_t i = 0; i < r.x.size() && r.x[i] <= x_half; ++i) {
    const double e = std::abs(r.v_hat[i] - s.vf.value_at(r.x[i]));
    if (e > max_err) {
      max_err = e;
      arg = r.x[i];
    }
  }
  const double horizon = cfg.horizon.value_or(60.0);
  const TailChoice tail = parse_tail(cfg);
  write_file(out / "report.txt", [&](std::ostream& os) {
    os << "x_max=" << s.config.oracle.x_max << '\n'
       << "nx=" << s.config.oracle.nx << '\n'
       << "dt=" << r.dt << '\n'
       << "sweeps=" << r.iterations << '\n'
       << "max_abs_error=" << max_err << '\n'
       << "argmax_error=" << arg << '\n';
    for (int k = 0; k <= 4; ++k) {
      const double x0 = x_half * k / 4.0;
      const Trajectory traj = simulate(s.problem, build_plan(s, x0, tail), x0, horizon, 0.0);
      os << "profit_gap[" << x0 << "]=" << gap_text(traj, s.vf, x0) << '\n';
    }
  });
}

}  // namespace

int run(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  static const std::vector<std::string> commands = {"solve", "value", "strategy", "simulate", "oracle", "compare"};
  try {
    if (std::find(commands.begin(), commands.end(), cfg.command) == commands.end()) {
      throw InvalidParameter("unknown command '" + cfg.command + "'");
    }
    if (cfg.config_path.empty()) throw ConfigError("no config file given");
    std::error_code ec;
    fs::create_directories(cfg.out_dir, ec);
    if (!fs::is_directory(cfg.out_dir)) throw ConfigError("output directory '" + cfg.out_dir.string() + "' is not usable");

    const Session s = open_session(cfg);
    if (cfg.command == "solve") {
      cmd_solve(s, cfg.out_dir);
    } else if (cfg.command == "value") {
      write_file(cfg.out_dir / "value.csv",
                 [&](std::ostream& os) { write_value_csv(os, s.vf, value_grid(s.config.oracle)); });
    } else if (cfg.command == "strategy") {
      cmd_strategy(s, cfg, cfg.out_dir);
    } else if (cfg.command == "simulate") {
      cmd_simulate(s, cfg, cfg.out_dir);
    } else if (cfg.command == "oracle") {
      cmd_oracle(s, cfg, cfg.out_dir);
    } else {
      cmd_compare(s, cfg, cfg.out_dir);
    }
    out << cfg.command << ": wrote results to " << cfg.out_dir.string() << '\n';
    return kExitOk;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n' << config_schema() << '\n';
    return kExitInput;
  } catch (const AssumptionViolation& e) {
    err << "model assumption violated: " << e.what() << '\n';
    return kExitInput;
  } catch (const CoercivityUndetectable& e) {
    err << "cost coercivity cannot be established: " << e.what() << '\n';
    return kExitInput;
  } catch (const InvalidParameter& e) {
    err << "invalid parameter: " << e.what() << '\n';
    return kExitInput;
  } catch (const Error& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitNumerical;
  }
}

int cli_main(int argc, char** argv) {
  CLI::App app{"Production and pricing under a non-negative inventory constraint"};
  RunConfig cfg;
  std::string positional_config;
  std::string config_flag;
  std::string out_dir = ".";
  std::optional<double> eps, x0, horizon, dt;
  std::optional<std::size_t> grid_n;

  app.add_option("command", cfg.command, "solve | value | strategy | simulate | oracle | compare")->required();
  app.add_option("config_file", positional_config, "problem config (same as --config)");
  app.add_option("--config", config_flag, "problem config file");
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--set", cfg.overrides, "override a config value, section.key=value")->expected(1)->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
  app.add_option("--eps", eps, "cyclic period");
  app.add_option("--x0", x0, "initial inventory");
  app.add_option("--horizon", horizon, "simulation horizon (default 60)");
  app.add_option("--dt", dt, "simulation step, or oracle step for oracle/compare");
  app.add_option("--grid-n", grid_n, "sample grid size");
  app.add_option("--tail", cfg.tail, "auto | static | relaxed | cyclic");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInput;
  }
  cfg.config_path = !config_flag.empty() ? config_flag : positional_config;
  cfg.out_dir = out_dir;
  cfg.eps = eps;
  cfg.x0 = x0;
  cfg.horizon = horizon;
  cfg.dt = dt;
  cfg.grid_n = grid_n;
  return run(cfg, std::cout, std::cerr);
}

}  // namespace prodprice
