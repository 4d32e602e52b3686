#include "cli.hpp"

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "rsi/chain.hpp"
#include "rsi/experiment.hpp"
#include "rsi/instance.hpp"
#include "rsi/io.hpp"
#include "rsi/rng.hpp"
#include "rsi/scorer.hpp"
#include "rsi/simulator.hpp"

namespace rsi::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Largest exponent accepted without --allow-large.
constexpr unsigned kDeskScaleExponent = 14;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct GenFlags {
  unsigned l = 10;
  std::uint64_t seed = 0;
  unsigned support_min = 10;
  unsigned support_max = 100;
  std::string weights = "flat_dirichlet";
  bool allow_large = false;
};

struct Common {
  std::string out_dir;
  std::string format = "csv";
  unsigned threads = 1;
};

void add_gen_flags(CLI::App* cmd, GenFlags& g) {
  cmd->add_option("--support-min", g.support_min, "Smallest support size")->capture_default_str();
  cmd->add_option("--support-max", g.support_max, "Largest support size")->capture_default_str();
  cmd->add_option("--weights", g.weights, "Weight law: flat_dirichlet | normalized_uniform")
      ->capture_default_str();
  cmd->add_flag("--allow-large", g.allow_large, "Permit l above desk scale (14)");
}

WeightLaw weight_law(const GenFlags& g) {
  auto law = parse_weight_law(g.weights);
  if (!law) throw UsageError("--weights: unknown weight law '" + g.weights + "'");
  return *law;
}

double estimated_mib(unsigned l, unsigned support_min, unsigned support_max) {
  const double n = std::ldexp(1.0, static_cast<int>(l));
  const double entries = n + (n - 1) * 0.5 * (support_min + support_max);
  // Instance, reverse adjacency and sampler each hold ~12 bytes per entry.
  return (36.0 * entries + 128.0 * n) / (1024.0 * 1024.0);
}

void gate_exponent(unsigned l, const GenFlags& g, const char* flag, std::ostream& err) {
  if (l <= kDeskScaleExponent) return;
  err << "note: l = " << l << " needs roughly "
      << static_cast<long long>(estimated_mib(l, g.support_min, g.support_max)) << " MiB\n";
  if (!g.allow_large) {
    throw UsageError(std::string(flag) + ": l = " + std::to_string(l) +
                     " exceeds desk scale (" + std::to_string(kDeskScaleExponent) +
                     "); pass --allow-large to run it");
  }
}

void check_format(const std::string& format, std::initializer_list<const char*> allowed) {
  for (const char* a : allowed) {
    if (format == a) return;
  }
  throw UsageError("--format: unsupported value '" + format + "'");
}

// Writes to <out_dir>/<name> when an output directory is set, else to `out`.
void emit(const Common& common, const std::string& name, const std::string& contents,
          std::ostream& out, std::ostream& log) {
  if (common.out_dir.empty()) {
    out << contents;
    return;
  }
  fs::create_directories(common.out_dir);
  const fs::path path = fs::path(common.out_dir) / name;
  write_file(path, contents);
  log << "wrote " << path.string() << '\n';
}

std::ostream& log_stream(const Common& common, std::ostream& out, std::ostream& err) {
  return common.out_dir.empty() ? err : out;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

json score_json(Score s) {
  if (s.is_infinite()) return "inf";
  return s.value();
}

std::string vector_line(const std::vector<double>& values) {
  std::string line = "[";
  for (std::size_t k = 0; k < values.size(); ++k) {
    if (k) line += ", ";
    line += shortest_decimal(values[k]);
  }
  return line + "]";
}

std::string score_list(std::span<const Score> scores) {
  std::string line;
  for (std::size_t k = 0; k < scores.size(); ++k) {
    if (k) line += ", ";
    line += scores[k].is_infinite() ? "inf" : shortest_decimal(scores[k].value());
  }
  return line;
}

// example -----------------------------------------------------------------

int run_example(const Common& common, std::ostream& out) {
  check_format(common.format, {"csv", "text", "json"});
  const ProgramSpace space = worked_example();
  SettlingScorer scorer(space);
  const std::size_t n = space.size();

  json steps = json::array();
  std::ostringstream text;
  text << "programs: " << n << ", optimal: " << space.optimal() << '\n';
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> dense(n, 0.0);
    const SparseRow& row = space.rows()[i];
    for (std::size_t k = 0; k < row.size(); ++k) dense[row.support[k]] = row.weights[k];
    text << "w[" << i << "] = " << vector_line(dense) << '\n';
  }

  std::optional<ProgramIndex> settled = space.optimal();
  for (std::size_t step = 0; settled; ++step) {
    const TransitionMatrix chain = build_transition(space, scorer.scores());
    std::vector<Score> tentative;
    for (std::size_t i = 0; i < n; ++i) tentative.push_back(scorer.tentative(static_cast<ProgramIndex>(i)));
    const auto dense = chain.dense();

    text << "\nstep " << step << ": settled program " << *settled << " with score "
         << score_list(std::span<const Score>(&scorer.scores()[*settled], 1)) << '\n';
    text << "scores: " << score_list(scorer.scores()) << '\n';
    text << "transition matrix:\n";
    for (const auto& row : dense) text << "  " << vector_line(row) << '\n';
    text << "tentative values: " << score_list(tentative) << '\n';

    json jscores = json::array();
    json jtentative = json::array();
    for (std::size_t i = 0; i < n; ++i) {
      jscores.push_back(score_json(scorer.scores()[i]));
      jtentative.push_back(score_json(tentative[i]));
    }
    steps.push_back({{"step", step},
                     {"settled", *settled},
                     {"scores", jscores},
                     {"tentative", jtentative},
                     {"transition", dense}});
    settled = scorer.step();
  }

  const std::vector<Score> final_scores(scorer.scores().begin(), scorer.scores().end());
  text << "\nfinal scores: " << score_list(final_scores) << '\n';
  text << "settle order:";
  for (ProgramIndex i : scorer.settle_order()) text << ' ' << i;
  text << '\n';

  if (common.format == "json") {
    json jfinal = json::array();
    for (Score s : final_scores) jfinal.push_back(score_json(s));
    const json doc = {{"config", {{"command", "example"}}},
                      {"n", n},
                      {"optimal", space.optimal()},
                      {"steps", steps},
                      {"scores", jfinal},
                      {"settle_order", std::vector<ProgramIndex>(scorer.settle_order().begin(),
                                                                 scorer.settle_order().end())}};
    out << doc.dump(2) << '\n';
  } else {
    out << text.str();
  }
  return kExitOk;
}

// gen / score / check -----------------------------------------------------

int run_gen(const GenFlags& g, const Common& common, std::ostream& out, std::ostream& err) {
  gate_exponent(g.l, g, "--l", err);
  GenConfig cfg{g.l, g.support_min, g.support_max, g.seed, weight_law(g)};
  ProgramSpace space;
  try {
    space = generate_random_instance(cfg);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  std::ostringstream os;
  const std::string config = json{{"command", "gen"}, {"generator", json::parse(gen_config_json(cfg))}}.dump();
  write_instance(os, space, config);
  emit(common, "instance.json", os.str(), out, log_stream(common, out, err));
  return kExitOk;
}

ProgramSpace load_checked(const std::string& path, std::ostream& err, bool& ok) {
  try {
    ok = true;
    return load_instance(path);
  } catch (const ValidationError& e) {
    err << path << ": " << e.what();
    ok = false;
  } catch (const FormatError& e) {
    err << path << ": " << e.what() << '\n';
    ok = false;
  }
  return {};
}

int run_score(const std::string& instance_path, const Common& common, std::ostream& out,
              std::ostream& err) {
  bool ok = false;
  const ProgramSpace space = load_checked(instance_path, err, ok);
  if (!ok) return kExitInvalid;
  const auto start = std::chrono::steady_clock::now();
  const ScoreTable table = consistent_scores(space);
  const double elapsed = seconds_since(start);

  std::ostringstream os;
  write_scores(os, table, json{{"command", "score"}, {"instance", instance_path}}.dump());
  std::ostream& log = log_stream(common, out, err);
  emit(common, "scores.json", os.str(), out, log);
  log << "score construction: " << elapsed << " s for n = " << space.size() << '\n';
  return kExitOk;
}

int run_check(const std::string& instance_path, const std::string& scores_path,
              std::ostream& out, std::ostream& err) {
  bool ok = false;
  const ProgramSpace space = load_checked(instance_path, err, ok);
  if (!ok) return kExitInvalid;
  ScoreTable table;
  if (scores_path.empty()) {
    table = consistent_scores(space);
  } else {
    try {
      table = load_scores(scores_path);
    } catch (const FormatError& e) {
      err << scores_path << ": " << e.what() << '\n';
      return kExitInvalid;
    }
  }
  const ConsistencyReport report = check_consistency(space, table);
  if (report.ok()) {
    out << "ok: scores are consistent (" << space.size() << " programs)\n";
    return kExitOk;
  }
  out << report.violations.size() << " violation(s):\n" << report.describe();
  return kExitInvalid;
}

// simulate ----------------------------------------------------------------

struct SimulateFlags {
  std::string instance;
  std::string scores;
  ProgramIndex start = 0;
  std::uint64_t seed = 0;
  std::uint64_t max_steps = 0;
  std::size_t runs = 1;
};

int run_simulate(const SimulateFlags& f, const Common& common, std::ostream& out,
                 std::ostream& err) {
  check_format(common.format, {"csv", "json"});
  bool ok = false;
  const ProgramSpace space = load_checked(f.instance, err, ok);
  if (!ok) return kExitInvalid;
  if (f.start >= space.size()) throw UsageError("--start: program index out of range");
  const ScoreTable table = f.scores.empty() ? consistent_scores(space) : load_scores(f.scores);
  if (table.size() != space.size()) {
    err << f.scores << ": score table has " << table.size() << " entries for "
        << space.size() << " programs\n";
    return kExitInvalid;
  }

  json config = {{"command", "simulate"}, {"instance", f.instance},  {"scores", f.scores},
                 {"start", f.start},      {"seed", f.seed},          {"max_steps", f.max_steps},
                 {"runs", f.runs},        {"engine", std::string(kEngineName)}};
  std::ostringstream os;
  const auto start = std::chrono::steady_clock::now();
  if (f.runs <= 1) {
    const std::uint64_t max_steps = f.max_steps ? f.max_steps : default_max_steps(table.scores[f.start]);
    const Trajectory t = run_rsi(space, table, f.start, f.seed, max_steps);
    const std::vector<Rank> ranks = all_ranks(table.scores);
    if (common.format == "json") {
      json doc = {{"config", config},
                  {"visited", t.visited},
                  {"steps_to_absorption", t.absorbed() ? json(*t.steps_to_absorption) : json(nullptr)}};
      os << doc.dump() << '\n';
    } else {
      os << "# " << config.dump() << '\n' << "step,program,score,rank\n";
      for (std::size_t s = 0; s < t.visited.size(); ++s) {
        const ProgramIndex p = t.visited[s];
        os << s << ',' << p << ',' << to_string(table.scores[p]) << ',' << ranks[p].value << '\n';
      }
    }
  } else {
    if (table.scores[f.start].is_infinite()) {
      err << "start program " << f.start << " has infinite score; the mean is undefined\n";
      return kExitInvalid;
    }
    SimulationOptions options;
    options.max_steps = f.max_steps;
    options.threads = common.threads;
    const MeanEstimate est = estimate_mean_steps(space, table, f.start, f.runs, f.seed, options);
    if (common.format == "json") {
      json doc = {{"config", config},          {"mean", est.mean},
                  {"std_error", est.std_error}, {"runs", est.runs},
                  {"truncated", est.truncated}, {"score", score_json(table.scores[f.start])}};
      os << doc.dump() << '\n';
    } else {
      os << "# " << config.dump() << '\n' << "start,runs,mean,std_error,truncated,score\n";
      os << f.start << ',' << est.runs << ',' << shortest_decimal(est.mean) << ','
         << shortest_decimal(est.std_error) << ',' << est.truncated << ','
         << to_string(table.scores[f.start]) << '\n';
    }
  }
  std::ostream& log = log_stream(common, out, err);
  emit(common, f.runs <= 1 ? "trajectory." + common.format : "estimate." + common.format,
       os.str(), out, log);
  log << "simulation: " << seconds_since(start) << " s\n";
  return kExitOk;
}

// sweep / ensemble --------------------------------------------------------

struct SweepFlags {
  unsigned l_min = 1;
  unsigned l_max = kDeskScaleExponent;
  unsigned repeats = 10;
};

std::string fit_line(const char* name, const std::optional<FitResult>& fit) {
  std::ostringstream os;
  os << name << ": ";
  if (!fit) {
    os << "n/a (needs two l values)";
  } else {
    os << "slope " << fit->slope << ", intercept " << fit->intercept << ", R^2 " << fit->r_squared;
  }
  return os.str();
}

int run_sweep(const SweepFlags& s, const GenFlags& g, const Common& common, std::ostream& out,
              std::ostream& err) {
  check_format(common.format, {"csv", "json"});
  gate_exponent(s.l_max, g, "--l-max", err);
  SweepConfig cfg;
  cfg.l_min = s.l_min;
  cfg.l_max = s.l_max;
  cfg.repeats = s.repeats;
  cfg.master_seed = g.seed;
  cfg.support_min = g.support_min;
  cfg.support_max = g.support_max;
  cfg.weights = weight_law(g);
  cfg.threads = common.threads;

  const auto start = std::chrono::steady_clock::now();
  SweepResult result;
  try {
    result = sweep(cfg);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  const double elapsed = seconds_since(start);

  std::ostringstream csv;
  write_sweep_csv(csv, result);
  std::ostream& log = log_stream(common, out, err);
  if (common.out_dir.empty()) {
    out << (common.format == "json" ? fit_summary_json(result) : csv.str());
  } else {
    emit(common, "sweep.csv", csv.str(), out, log);
    emit(common, "fit.json", fit_summary_json(result), out, log);
  }
  log << fit_line("steps vs l (per-l means)", result.steps_vs_l) << '\n'
      << fit_line("steps vs l (all repeats)", result.steps_vs_l_scatter) << '\n'
      << fit_line("rank vs n (per-l means)", result.rank_vs_n) << '\n'
      << "score construction: " << result.score_seconds << " s, total " << elapsed << " s\n";
  return kExitOk;
}

struct EnsembleFlags {
  unsigned l = kDeskScaleExponent;
  std::size_t runs = 100;
  std::uint64_t max_steps = 0;
  std::string checkpoints = "geometric";
};

int run_ensemble(const EnsembleFlags& e, const GenFlags& g, const Common& common,
                 std::ostream& out, std::ostream& err) {
  check_format(common.format, {"csv"});
  gate_exponent(e.l, g, "--l", err);
  if (e.checkpoints != "geometric" && e.checkpoints != "every") {
    throw UsageError("--checkpoints: expected geometric or every");
  }
  TrajectoryConfig cfg;
  cfg.l = e.l;
  cfg.runs = e.runs;
  cfg.master_seed = g.seed;
  cfg.support_min = g.support_min;
  cfg.support_max = g.support_max;
  cfg.weights = weight_law(g);
  cfg.max_steps = e.max_steps;
  cfg.threads = common.threads;

  TrajectoryResult result;
  try {
    if (e.checkpoints == "every") cfg.schedule = CheckpointSchedule::kEveryStep;
    result = trajectory_experiment(cfg);
  } catch (const std::invalid_argument& ex) {
    throw UsageError(ex.what());
  }

  const std::string header = "# " + trajectory_config_json(cfg) + "\n";
  std::ostringstream stats_csv;
  stats_csv << header;
  write_ensemble_csv(stats_csv, result.ensemble.stats);
  std::ostringstream runs_csv;
  runs_csv << header;
  write_runs_csv(runs_csv, result.ensemble.runs);

  std::ostream& log = log_stream(common, out, err);
  if (common.out_dir.empty()) {
    out << stats_csv.str();
  } else {
    emit(common, "ensemble.csv", stats_csv.str(), out, log);
    emit(common, "runs.csv", runs_csv.str(), out, log);
  }
  std::size_t truncated = 0;
  for (const RunSummary& r : result.ensemble.runs) truncated += r.truncated ? 1 : 0;
  log << "n = " << result.instance.n() << ", optimal = " << result.optimal
      << ", score of program 0 = " << to_string(result.start_score)
      << ", rank " << result.start_rank.value << '\n'
      << "absorbed: " << (result.ensemble.runs.size() - truncated) << "/"
      << result.ensemble.runs.size() << " (max_steps " << result.ensemble.max_steps << ")\n";
  if (auto fit = pre_absorption_decay_fit(result.ensemble.stats)) {
    log << "log(mean rank) vs step before first absorption: slope " << fit->slope << ", R^2 "
        << fit->r_squared << " over " << fit->n_points << " checkpoints\n";
  }
  log << "score construction: " << result.score_seconds << " s, simulation: "
      << result.simulate_seconds << " s\n";
  return kExitOk;
}

}  // namespace

int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Recursive self-improvement model: scoring, simulation and scaling experiments"};
  app.require_subcommand(1);

  Common common;
  GenFlags gen;
  SweepFlags sweep_flags;
  EnsembleFlags ensemble_flags;
  SimulateFlags simulate_flags;
  std::string instance_path;
  std::string scores_path;

  auto* example = app.add_subcommand("example", "Walk through the four-program worked example");
  example->add_option("--format", common.format, "text | json")->capture_default_str();

  auto* gen_cmd = app.add_subcommand("gen", "Generate a random instance");
  gen_cmd->add_option("--l", gen.l, "n = 2^l")->capture_default_str();
  gen_cmd->add_option("--seed", gen.seed, "Instance seed")->capture_default_str();
  gen_cmd->add_option("--out", common.out_dir, "Output directory (default: stdout)");
  add_gen_flags(gen_cmd, gen);

  auto* score_cmd = app.add_subcommand("score", "Compute the consistent score function");
  score_cmd->add_option("--instance,--in", instance_path, "Instance file")->required();
  score_cmd->add_option("--out", common.out_dir, "Output directory (default: stdout)");

  auto* check_cmd = app.add_subcommand("check", "Verify scores against the exact hitting times");
  check_cmd->add_option("--instance,--in", instance_path, "Instance file")->required();
  check_cmd->add_option("--scores", scores_path, "Score file (default: compute)");

  auto* sim_cmd = app.add_subcommand("simulate", "Run the process forward");
  sim_cmd->add_option("--instance,--in", simulate_flags.instance, "Instance file")->required();
  sim_cmd->add_option("--scores", simulate_flags.scores, "Score file (default: compute)");
  sim_cmd->add_option("--start", simulate_flags.start, "Start program")->capture_default_str();
  sim_cmd->add_option("--seed", simulate_flags.seed, "Run seed")->capture_default_str();
  sim_cmd->add_option("--max-steps", simulate_flags.max_steps,
                      "Step cap (default: 100 x expected steps)");
  sim_cmd->add_option("--runs", simulate_flags.runs, "1: print the trajectory; >1: estimate the mean")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  sim_cmd->add_option("--format", common.format, "csv | json")->capture_default_str();
  sim_cmd->add_option("--threads", common.threads, "Worker threads (0: all cores)");
  sim_cmd->add_option("--out", common.out_dir, "Output directory (default: stdout)");

  auto* sweep_cmd = app.add_subcommand("sweep", "Size sweep with linear fits");
  sweep_cmd->add_option("--l-min", sweep_flags.l_min, "Smallest l")->capture_default_str();
  sweep_cmd->add_option("--l-max", sweep_flags.l_max, "Largest l")->capture_default_str();
  sweep_cmd->add_option("--repeats", sweep_flags.repeats, "Instances per l")->capture_default_str();
  sweep_cmd->add_option("--seed", gen.seed, "Master seed")->capture_default_str();
  sweep_cmd->add_option("--format", common.format, "stdout format without --out: csv | json")
      ->capture_default_str();
  sweep_cmd->add_option("--threads", common.threads, "Worker threads (0: all cores)");
  sweep_cmd->add_option("--out", common.out_dir, "Output directory (default: stdout)");
  add_gen_flags(sweep_cmd, gen);

  auto* ens_cmd = app.add_subcommand("ensemble", "Rank trajectories of many runs on one instance");
  ens_cmd->add_option("--l", ensemble_flags.l, "n = 2^l")->capture_default_str();
  ens_cmd->add_option("--runs", ensemble_flags.runs, "Number of runs")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  ens_cmd->add_option("--seed", gen.seed, "Master seed")->capture_default_str();
  ens_cmd->add_option("--max-steps", ensemble_flags.max_steps,
                      "Step cap (default: 100 x expected steps)");
  ens_cmd->add_option("--checkpoints", ensemble_flags.checkpoints, "geometric | every")
      ->capture_default_str();
  ens_cmd->add_option("--format", common.format, "csv")->capture_default_str();
  ens_cmd->add_option("--threads", common.threads, "Worker threads (0: all cores)");
  ens_cmd->add_option("--out", common.out_dir, "Output directory (default: stdout)");
  add_gen_flags(ens_cmd, gen);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << '\n';
    if (!app.get_subcommands().empty()) {
      err << app.get_subcommands().front()->help();
    } else {
      err << app.help();
    }
    return kExitUsage;
  }

  try {
    if (example->parsed()) {
      if (common.format == "csv") common.format = "text";
      return run_example(common, out);
    }
    if (gen_cmd->parsed()) return run_gen(gen, common, out, err);
    if (score_cmd->parsed()) return run_score(instance_path, common, out, err);
    if (check_cmd->parsed()) return run_check(instance_path, scores_path, out, err);
    if (sim_cmd->parsed()) return run_simulate(simulate_flags, common, out, err);
    if (sweep_cmd->parsed()) return run_sweep(sweep_flags, gen, common, out, err);
    if (ens_cmd->parsed()) return run_ensemble(ensemble_flags, gen, common, out, err);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ValidationError& e) {
    err << e.what();
    return kExitInvalid;
  } catch (const FormatError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitInvalid;
  }
  return kExitUsage;
}

}  // namespace rsi::cli
