#include "cli/cli.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <memory>
#include <ostream>

#include <CLI11.hpp>

#include "cli/config.hpp"
#include "persist/persist.hpp"

namespace persist::cli {

namespace {

using Handler = std::function<int(const RunConfig&, std::ostream&)>;

struct Command {
  std::string name;
  std::string description;
  std::vector<OptionSpec> options;
  bool p_optional = false;
  Handler handler;
};

// ---------------------------------------------------------------------------
// shared option groups

std::vector<OptionSpec> with(std::vector<OptionSpec> base, const std::vector<OptionSpec>& extra) {
  base.insert(base.end(), extra.begin(), extra.end());
  return base;
}

const std::vector<OptionSpec>& common_options() {
  static const std::vector<OptionSpec> specs = {
      {"seed", OptKind::Integer, "master RNG seed", kDefaultSeed},
      {"out", OptKind::Text, "write the table (CSV) or result to this file"},
      {"format", OptKind::Text, "stdout format: json or csv", "json"},
      {"workers", OptKind::Integer, "worker threads, 0 = hardware concurrency", 0},
  };
  return specs;
}

const std::vector<OptionSpec>& family_options() {
  static const std::vector<OptionSpec> specs = {
      {"family", OptKind::Text, "geometric | exponential | twopoint | custom"},
      {"beta", OptKind::Number, "family parameter"},
      {"atoms", OptKind::AtomList, "custom atoms as t:w,t:w (JSON: [[t,w],...])"},
      {"t_min", OptKind::Number, "smallest admissible custom atom", kDefaultMinAtom},
  };
  return specs;
}

const std::vector<OptionSpec>& simulation_options() {
  static const std::vector<OptionSpec> specs = with(
      {
          {"schedule", OptKind::Text, "periodic | explicit | random", "periodic"},
          {"period", OptKind::Number, "period of a periodic schedule"},
          {"times", OptKind::NumberList, "kill times of an explicit schedule"},
          {"env_seed", OptKind::Integer, "seed of the random-environment stream", kDefaultSeed},
          {"init_n", OptKind::Integer, "initial susceptible count", 0},
          {"init_r", OptKind::Integer, "initial persistent count", 1},
          {"max_epochs", OptKind::Integer, "kill epochs counted as survival, 0 = off", kDefaultMaxKillEpochs},
          {"escape", OptKind::Integer, "population counted as survival, 0 = off", kDefaultEscapePopulation},
          {"horizon", OptKind::Number, "time horizon (censoring)"},
      },
      family_options());
  return specs;
}

// ---------------------------------------------------------------------------
// conversions

Json params_json(const ModelParams& p) {
  return Json{{"lambda", p.lambda()}, {"a", p.a()}, {"b", p.b()}, {"dn", p.d_n()}, {"dr", p.d_r()}, {"p", p.p()}};
}

const char* param_key(SweepVar v) {
  switch (v) {
    case SweepVar::Lambda: return "lambda";
    case SweepVar::P: return "p";
    case SweepVar::A: return "a";
  }
  return "";
}

ModelParams model(const RunConfig& cfg) { return ModelParams::validate(cfg.params()); }

EnvFamily family_from(const RunConfig& cfg) {
  const std::string kind = cfg.text("family");
  if (kind == "geometric") return EnvFamily::geometric(cfg.number("beta"));
  if (kind == "exponential") return EnvFamily::exponential(cfg.number("beta"));
  if (kind == "twopoint") return EnvFamily::two_point(cfg.number("beta"));
  if (kind == "custom") return EnvFamily::custom(cfg.atoms("atoms"), cfg.number("t_min"));
  throw ConfigError("unknown family '" + kind + "'", "family");
}

Json family_json(const EnvFamily& f) {
  Json j{{"family", f.name()}};
  if (f.kind() == EnvFamily::Kind::Custom) {
    Json atoms = Json::array();
    for (const Atom& a : f.atoms()) atoms.push_back(Json::array({a.time, a.weight}));
    j["atoms"] = atoms;
  } else {
    j["beta"] = f.beta();
  }
  j["mean"] = f.mean();
  return j;
}

KillSchedule schedule_from(const RunConfig& cfg) {
  const std::string kind = cfg.text("schedule");
  if (kind == "periodic") return Periodic{cfg.number("period")};
  if (kind == "explicit") return Explicit{cfg.numbers("times")};
  if (kind == "random") return RandomEnv{family_from(cfg), cfg.integer("env_seed")};
  throw ConfigError("unknown schedule '" + kind + "'", "schedule");
}

StopRule stop_from(const RunConfig& cfg) {
  StopRule stop;
  const std::uint64_t epochs = cfg.integer("max_epochs");
  const std::uint64_t escape = cfg.integer("escape");
  stop.max_kill_epochs = epochs ? std::optional<std::uint64_t>(epochs) : std::nullopt;
  stop.escape_population = escape ? std::optional<std::uint64_t>(escape) : std::nullopt;
  stop.time_horizon = cfg.maybe_number("horizon");
  return stop;
}

Json stop_json(const StopRule& stop) {
  Json j = Json::object();
  j["max_epochs"] = stop.max_kill_epochs ? Json(*stop.max_kill_epochs) : Json(nullptr);
  j["escape"] = stop.escape_population ? Json(*stop.escape_population) : Json(nullptr);
  j["horizon"] = stop.time_horizon ? Json(*stop.time_horizon) : Json(nullptr);
  return j;
}

Json schedule_json(const KillSchedule& schedule) {
  if (const auto* p = std::get_if<Periodic>(&schedule)) return Json{{"schedule", "periodic"}, {"period", p->period}};
  if (const auto* e = std::get_if<RandomEnv>(&schedule)) {
    return Json{{"schedule", "random"}, {"environment", family_json(e->family)}, {"env_seed", e->seed}};
  }
  return Json{{"schedule", "explicit"}, {"times", std::get<Explicit>(schedule).times}};
}

PopulationState init_from(const RunConfig& cfg) { return {cfg.integer("init_n"), cfg.integer("init_r"), 0.0}; }

std::size_t workers(const RunConfig& cfg) { return static_cast<std::size_t>(cfg.integer("workers")); }

bool wants_csv(const RunConfig& cfg, bool supported) {
  const std::string format = cfg.text("format");
  if (format == "json") return false;
  if (format != "csv") throw ConfigError("format must be json or csv", "format");
  if (!supported) throw ConfigError("csv output is not available for this command", "format");
  return true;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream file(path, std::ios::binary);
  if (!file) throw ConfigError("cannot write '" + path + "'", "out");
  file << content;
}

int emit(const RunConfig& cfg, const Json& result, std::ostream& out) {
  const std::string text = result.dump(2) + "\n";
  if (cfg.has("out")) write_file(cfg.text("out"), text);
  out << text;
  return kExitOk;
}

// ---------------------------------------------------------------------------
// handlers

int cmd_critical_time(const RunConfig& cfg, std::ostream& out) {
  wants_csv(cfg, false);
  const ModelParams params = model(cfg);
  const CriticalTimeResult r = critical_time(params, cfg.number("tol"));
  return emit(cfg,
              Json{{"command", "critical-time"},
                   {"params", params_json(params)},
                   {"t_c", r.t_c},
                   {"bracket", {r.lo, r.hi}},
                   {"residual", r.residual},
                   {"iterations", r.iterations}},
              out);
}

int cmd_critical_p(const RunConfig& cfg, std::ostream& out) {
  wants_csv(cfg, false);
  const ModelParams params = model(cfg);
  const double t = cfg.number("t");
  const std::optional<double> pc = critical_p(params, t, cfg.number("tol"));
  return emit(cfg,
              Json{{"command", "critical-p"},
                   {"params", params_json(params)},
                   {"t", t},
                   {"p_c", pc ? Json(*pc) : Json(nullptr)},
                   {"survival_for_all_p", !pc.has_value()}},
              out);
}

int cmd_classify(const RunConfig& cfg, std::ostream& out) {
  wants_csv(cfg, false);
  const ModelParams params = model(cfg);
  const double period = cfg.number("period");
  const Classification c = classify(params, period);
  return emit(cfg,
              Json{{"command", "classify"},
                   {"params", params_json(params)},
                   {"period", period},
                   {"verdict", to_string(c.verdict)},
                   {"gamma_plus", c.gamma_plus},
                   {"log_gamma_plus", c.log_gamma_plus}},
              out);
}

SweepAxis axis_from(const RunConfig& cfg, const std::string& suffix) {
  const std::string var_key = "var" + suffix;
  const auto var = parse_sweep_var(cfg.text(var_key));
  if (!var) throw ConfigError("sweep variable must be lambda, p or a", var_key);
  SweepAxis axis{*var, {}};
  if (cfg.has("values" + suffix)) {
    axis.values = cfg.numbers("values" + suffix);
  } else {
    axis.values = linspace(cfg.number("from" + suffix), cfg.number("to" + suffix),
                           static_cast<std::size_t>(cfg.integer("steps" + suffix)));
  }
  if (axis.values.empty()) throw ConfigError("sweep axis has no points", "steps" + suffix);
  return axis;
}

int cmd_sweep(const RunConfig& cfg, std::ostream& out) {
  const bool csv = wants_csv(cfg, true);
  std::vector<SweepAxis> axes{axis_from(cfg, "")};
  if (cfg.has("var2")) axes.push_back(axis_from(cfg, "2"));
  std::vector<std::string> swept;
  for (const SweepAxis& axis : axes) swept.emplace_back(param_key(axis.var));
  const RawParams base = cfg.params(swept);
  const SweepTable table = sweep(base, axes, cfg.number("tol"), workers(cfg));

  const std::string table_csv = sweep_csv(table);
  if (cfg.has("out")) write_file(cfg.text("out"), table_csv);
  if (cfg.has("svg")) {
    AxesSpec spec;
    spec.title = "critical period T_c";
    spec.x_label = std::string(to_string(axes[0].var));
    spec.y_label = "T_c";
    write_file(cfg.text("svg"), emit_svg(sweep_series(table), spec));
  }
  if (csv) {
    out << table_csv;
    return kExitOk;
  }
  Json rows = Json::array();
  for (const SweepRow& row : table.rows) {
    Json j = Json::object();
    for (std::size_t k = 0; k < table.vars.size(); ++k) j[std::string(to_string(table.vars[k]))] = row.coords[k];
    j["t_c"] = row.t_c ? Json(*row.t_c) : Json(nullptr);
    j["residual"] = row.residual;
    j["status"] = row.status;
    rows.push_back(j);
  }
  Json vars = Json::array();
  for (SweepVar v : table.vars) vars.push_back(to_string(v));
  out << Json{{"command", "sweep"}, {"vars", vars}, {"rows", rows}}.dump(2) << "\n";
  return kExitOk;
}

int cmd_simulate(const RunConfig& cfg, std::ostream& out) {
  const bool csv = wants_csv(cfg, true);
  const ModelParams params = model(cfg);
  const KillSchedule schedule = schedule_from(cfg);
  const StopRule stop = stop_from(cfg);
  Engine engine = make_engine(cfg.integer("seed"), 0);
  const bool record = csv || cfg.has("out");
  const TrajectoryOutcome o = run(params, schedule, init_from(cfg), stop, engine, record);

  if (record) {
    const std::string text = trajectory_csv(o.trajectory);
    if (cfg.has("out")) write_file(cfg.text("out"), text);
    if (csv) {
      out << text;
      return kExitOk;
    }
  }
  out << Json{{"command", "simulate"},
              {"params", params_json(params)},
              {"schedule", schedule_json(schedule)},
              {"stop", stop_json(stop)},
              {"outcome", to_string(o.outcome)},
              {"reason", to_string(o.reason)},
              {"final", {{"t", o.final_state.t}, {"n", o.final_state.n}, {"r", o.final_state.r}}},
              {"kills", o.kills},
              {"events", o.events}}
             .dump(2)
      << "\n";
  return kExitOk;
}

int cmd_mc_survival(const RunConfig& cfg, std::ostream& out) {
  wants_csv(cfg, false);
  const ModelParams params = model(cfg);
  const KillSchedule schedule = schedule_from(cfg);
  const StopRule stop = stop_from(cfg);
  const SurvivalEstimate e =
      mc_survival(params, schedule, init_from(cfg), cfg.integer("trials"), stop, cfg.integer("seed"), workers(cfg));
  return emit(cfg,
              Json{{"command", "mc-survival"},
                   {"params", params_json(params)},
                   {"schedule", schedule_json(schedule)},
                   {"stop", stop_json(stop)},
                   {"seed", cfg.integer("seed")},
                   {"trials", e.trials},
                   {"p_hat", e.p_hat},
                   {"ci_halfwidth", e.ci_halfwidth},
                   {"survived", e.survived},
                   {"extinct", e.extinct},
                   {"censored", e.censored},
                   {"escaped_population", e.escaped_population},
                   {"escaped_epochs", e.escaped_epochs}},
              out);
}

int cmd_mc_mean(const RunConfig& cfg, std::ostream& out) {
  wants_csv(cfg, false);
  const ModelParams params = model(cfg);
  const double t = cfg.number("t");
  const PopulationState init = init_from(cfg);
  const MeanEstimate e = mc_mean(params, t, init, cfg.integer("trials"), cfg.integer("seed"), workers(cfg));
  Json expected = nullptr;
  if (params.supercritical()) {
    try {
      const FlowMatrix f = flow(params, t);
      const double n0 = static_cast<double>(init.n), r0 = static_cast<double>(init.r);
      expected = Json::array({f.n_tilde * n0 + f.n_bar * r0, f.r_tilde * n0 + f.r_bar * r0});
    } catch (const Error&) {
    }
  }
  return emit(cfg,
              Json{{"command", "mc-mean"},
                   {"params", params_json(params)},
                   {"t", t},
                   {"init", {init.n, init.r}},
                   {"seed", cfg.integer("seed")},
                   {"trials", e.trials},
                   {"mean", {e.mean_n, e.mean_r}},
                   {"std_err", {e.se_n, e.se_r}},
                   {"mean_field", expected}},
              out);
}

LyapunovOptions lyapunov_options(const RunConfig& cfg) {
  LyapunovOptions opt;
  opt.epochs = static_cast<std::size_t>(cfg.integer("epochs"));
  opt.replicates = static_cast<std::size_t>(cfg.integer("replicates"));
  if (cfg.has("burn_in")) opt.burn_in = static_cast<std::size_t>(cfg.integer("burn_in"));
  opt.renorm_every = static_cast<std::size_t>(cfg.integer("renorm_every"));
  opt.master_seed = cfg.integer("seed");
  opt.workers = workers(cfg);
  return opt;
}

int cmd_lyapunov(const RunConfig& cfg, std::ostream& out) {
  wants_csv(cfg, false);
  const ModelParams params = model(cfg);
  const EnvFamily family = family_from(cfg);
  const LyapunovEstimate e = lyapunov(params, family, lyapunov_options(cfg));
  Json result{{"command", "lyapunov"},
              {"params", params_json(params)},
              {"environment", family_json(family)},
              {"seed", cfg.integer("seed")},
              {"delta_hat", e.delta_hat},
              {"std_err", e.std_err},
              {"epochs", e.epochs},
              {"burn_in", e.burn_in},
              {"replicates", e.replicates},
              {"verdict", to_string(e.verdict)}};
  if (params.p() == 1.0 && family.discrete()) result["exact_log_mean"] = exact_log_mean(params, family);
  return emit(cfg, result, out);
}

int cmd_beta_critical(const RunConfig& cfg, std::ostream& out) {
  wants_csv(cfg, false);
  const ModelParams params = model(cfg);
  const std::string kind = cfg.text("family");
  FamilyConstructor ctor;
  if (kind == "geometric") {
    ctor = [](double beta) { return EnvFamily::geometric(beta); };
  } else if (kind == "exponential") {
    ctor = [](double beta) { return EnvFamily::exponential(beta); };
  } else if (kind == "twopoint") {
    ctor = [](double beta) { return EnvFamily::two_point(beta); };
  } else if (kind == "atom") {
    ctor = [](double beta) { return EnvFamily::custom({{beta, 1.0}}); };
  } else {
    throw ConfigError("beta-critical family must be geometric, exponential, twopoint or atom", "family");
  }
  BetaCriticalOptions opt;
  opt.lo = cfg.number("lo");
  opt.hi = cfg.number("hi");
  opt.tol = cfg.number("tol");
  opt.lyapunov = lyapunov_options(cfg);
  opt.max_epochs = static_cast<std::size_t>(cfg.integer("epoch_cap"));
  const BetaBracket b = beta_critical(params, ctor, opt);
  return emit(cfg,
              Json{{"command", "beta-critical"},
                   {"params", params_json(params)},
                   {"family", kind},
                   {"seed", cfg.integer("seed")},
                   {"lo", b.lo},
                   {"hi", b.hi},
                   {"evaluations", b.evaluations},
                   {"exact", b.exact},
                   {"widened", b.widened}},
              out);
}

int cmd_env_sample(const RunConfig& cfg, std::ostream& out) {
  const bool csv = wants_csv(cfg, true);
  const EnvFamily family = family_from(cfg);
  Engine engine = make_engine(cfg.integer("seed"), 0);
  const std::vector<double> times = sample_times(family, static_cast<std::size_t>(cfg.integer("n")), engine);
  std::string table = "t\n";
  for (double t : times) table += format_number(t) + "\n";
  if (cfg.has("out")) write_file(cfg.text("out"), table);
  if (csv) {
    out << table;
    return kExitOk;
  }
  out << Json{{"command", "env-sample"}, {"environment", family_json(family)}, {"seed", cfg.integer("seed")},
              {"times", times}}
             .dump(2)
      << "\n";
  return kExitOk;
}

std::vector<Command> commands() {
  const std::vector<OptionSpec> lyap = {
      {"epochs", OptKind::Integer, "matrix-product length per replicate", 10000},
      {"replicates", OptKind::Integer, "independent replicates", 32},
      {"burn_in", OptKind::Integer, "leading epochs excluded (default epochs/10)"},
      {"renorm_every", OptKind::Integer, "renormalisation cadence in epochs", 1},
  };
  return {
      {"critical-time", "critical period T_c(p) for periodic killing",
       with(common_options(), {{"tol", OptKind::Number, "absolute tolerance on T_c", kDefaultTimeTolerance}}), false,
       cmd_critical_time},
      {"critical-p", "critical kill probability p_c(t) for period t",
       with(common_options(), {{"t", OptKind::Number, "kill period"},
                               {"tol", OptKind::Number, "absolute tolerance on p_c", kDefaultProbabilityTolerance}}),
       true, cmd_critical_p},
      {"classify", "extinction/survival verdict for a periodic schedule",
       with(common_options(), {{"period", OptKind::Number, "kill period"}}), false, cmd_classify},
      {"sweep", "T_c over a grid of lambda, p or a",
       with(common_options(),
            {{"var", OptKind::Text, "first grid variable: lambda | p | a"},
             {"from", OptKind::Number, "first axis start"},
             {"to", OptKind::Number, "first axis end"},
             {"steps", OptKind::Integer, "first axis point count", 11},
             {"values", OptKind::NumberList, "explicit first axis values"},
             {"var2", OptKind::Text, "second grid variable (one series per value)"},
             {"from2", OptKind::Number, "second axis start"},
             {"to2", OptKind::Number, "second axis end"},
             {"steps2", OptKind::Integer, "second axis point count", 3},
             {"values2", OptKind::NumberList, "explicit second axis values"},
             {"tol", OptKind::Number, "absolute tolerance on T_c", kDefaultTimeTolerance},
             {"svg", OptKind::Text, "write an SVG plot of T_c to this file"}}),
       false, cmd_sweep},
      {"simulate", "one exact CTMC trajectory with mass killings", with(common_options(), simulation_options()), false,
       cmd_simulate},
      {"mc-survival", "Monte Carlo survival probability",
       with(with(common_options(), simulation_options()), {{"trials", OptKind::Integer, "number of trials", 2000}}),
       false, cmd_mc_survival},
      {"mc-mean", "Monte Carlo mean population without killing",
       with(common_options(), {{"t", OptKind::Number, "time"},
                               {"init_n", OptKind::Integer, "initial susceptible count", 1},
                               {"init_r", OptKind::Integer, "initial persistent count", 0},
                               {"trials", OptKind::Integer, "number of trials", 100000}}),
       false, cmd_mc_mean},
      {"lyapunov", "Lyapunov exponent of the random moment-matrix product",
       with(with(common_options(), family_options()), lyap), false, cmd_lyapunov},
      {"beta-critical", "bracket the critical environment parameter beta_c",
       with(with(common_options(), lyap),
            {{"family", OptKind::Text, "geometric | exponential | twopoint | atom"},
             {"lo", OptKind::Number, "search range start"},
             {"hi", OptKind::Number, "search range end"},
             {"tol", OptKind::Number, "bracket width", 1e-3},
             {"epoch_cap", OptKind::Integer, "largest epoch count tried on inconclusive verdicts", 160000}}),
       false, cmd_beta_critical},
      {"env-sample", "draw inter-killing times from a family",
       with(with(common_options(), family_options()), {{"n", OptKind::Integer, "number of draws", 10}}), false,
       cmd_env_sample},
  };
}

int exit_code_for(ErrorCode code) {
  return code == ErrorCode::InvalidParameter ? kExitConfig : kExitAnalytic;
}

void report_error(std::ostream& out, std::ostream& err, const std::string& code, const std::string& message,
                  const std::string& field) {
  Json j{{"error", code}, {"message", message}};
  if (!field.empty()) j["field"] = field;
  if (code == "DegenerateProduct") j["verdict"] = "Extinct";
  out << j.dump(2) << "\n";
  err << "error: " << message << (field.empty() ? "" : " [" + field + "]") << "\n";
}

}  // namespace

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Persistent/susceptible bacteria under mass killings: criticality and simulation", "persist"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "expand all help");

  std::vector<Command> cmds = commands();
  std::vector<std::unique_ptr<RunConfig>> configs;
  std::vector<CLI::App*> subs;
  for (const Command& c : cmds) {
    CLI::App* sub = app.add_subcommand(c.name, c.description);
    configs.push_back(std::make_unique<RunConfig>(c.options, c.p_optional));
    configs.back()->register_flags(*sub);
    subs.push_back(sub);
  }

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e, out, err);
    return rc == 0 ? kExitOk : kExitConfig;
  }

  for (std::size_t i = 0; i < cmds.size(); ++i) {
    if (!subs[i]->parsed()) continue;
    try {
      configs[i]->finalize();
      return cmds[i].handler(*configs[i], out);
    } catch (const ConfigError& e) {
      report_error(out, err, "ConfigError", e.what(), e.field());
      return kExitConfig;
    } catch (const Error& e) {
      report_error(out, err, std::string(to_string(e.code())), e.what(), e.field());
      return exit_code_for(e.code());
    }
  }
  return kExitConfig;
}

}  // namespace persist::cli
