#include "rsi/experiment.hpp"

#include <chrono>
#include <cmath>
#include <new>
#include <ostream>

#include "json.hpp"
#include "rsi/parallel.hpp"
#include "rsi/rng.hpp"

namespace rsi {

using nlohmann::json;

namespace {

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

json fit_json(const std::optional<FitResult>& fit) {
  if (!fit) return nullptr;
  return {{"slope", fit->slope},
          {"intercept", fit->intercept},
          {"r_squared", fit->r_squared},
          {"n_points", fit->n_points}};
}

json sweep_config(const SweepConfig& cfg) {
  return {{"engine", std::string(kEngineName)},
          {"l_min", cfg.l_min},
          {"l_max", cfg.l_max},
          {"repeats", cfg.repeats},
          {"master_seed", cfg.master_seed},
          {"support_min", cfg.support_min},
          {"support_max", cfg.support_max},
          {"weights", std::string(to_string(cfg.weights))},
          {"seed_derivation", "instance_seed = derive_seed(master_seed, (l << 32) | repeat)"}};
}

}  // namespace

std::uint64_t sweep_instance_seed(std::uint64_t master_seed, unsigned l, unsigned repeat) {
  return derive_seed(master_seed, (static_cast<std::uint64_t>(l) << 32) | repeat);
}

SweepResult sweep(const SweepConfig& cfg) {
  if (cfg.l_min < 1 || cfg.l_min > cfg.l_max) {
    throw std::invalid_argument("sweep: need 1 <= l_min <= l_max");
  }
  if (cfg.l_max > kMaxExponent) {
    throw std::invalid_argument("sweep: l_max must be <= " + std::to_string(kMaxExponent));
  }
  if (cfg.repeats < 1) throw std::invalid_argument("sweep: repeats must be >= 1");

  SweepResult result;
  result.config = cfg;
  const unsigned levels = cfg.l_max - cfg.l_min + 1;
  const std::size_t cells = static_cast<std::size_t>(levels) * cfg.repeats;
  result.records.resize(cells);
  std::vector<double> cell_seconds(cells, 0.0);

  parallel_for(cells, cfg.threads, [&](std::size_t job) {
    const unsigned l = cfg.l_min + static_cast<unsigned>(job / cfg.repeats);
    const auto repeat = static_cast<unsigned>(job % cfg.repeats);
    ExperimentRecord& rec = result.records[job];
    rec.l = l;
    rec.n = std::size_t{1} << l;
    rec.repeat_index = repeat;
    rec.instance_seed = sweep_instance_seed(cfg.master_seed, l, repeat);
    try {
      GenConfig gen{l, cfg.support_min, cfg.support_max, rec.instance_seed, cfg.weights};
      const ProgramSpace space = generate_random_instance(gen);
      const auto start = std::chrono::steady_clock::now();
      const ScoreTable table = consistent_scores(space);
      cell_seconds[job] = seconds_since(start);
      rec.start_score = table.scores[0];
      rec.start_rank = rank_of(table, 0);
    } catch (const std::bad_alloc&) {
      throw SweepError(l, "sweep: out of memory at l = " + std::to_string(l));
    }
    if (rec.start_score.is_infinite()) {
      // Row 0 covers every program, so this cannot happen for a valid space.
      throw std::logic_error("sweep: infinite start score at l = " + std::to_string(l));
    }
  });

  std::vector<double> scatter_x;
  std::vector<double> scatter_y;
  std::vector<double> ns;
  for (unsigned level = 0; level < levels; ++level) {
    double score_sum = 0.0;
    double rank_sum = 0.0;
    for (unsigned r = 0; r < cfg.repeats; ++r) {
      const ExperimentRecord& rec = result.records[level * cfg.repeats + r];
      score_sum += rec.start_score.value();
      rank_sum += rec.start_rank.value;
      scatter_x.push_back(rec.l);
      scatter_y.push_back(rec.start_score.value());
    }
    const unsigned l = cfg.l_min + level;
    result.ls.push_back(l);
    ns.push_back(std::ldexp(1.0, static_cast<int>(l)));
    result.mean_start_score.push_back(score_sum / cfg.repeats);
    result.mean_start_rank.push_back(rank_sum / cfg.repeats);
  }
  for (double s : cell_seconds) result.score_seconds += s;

  if (levels >= 2) {
    result.steps_vs_l = ols_fit(result.ls, result.mean_start_score);
    result.steps_vs_l_scatter = ols_fit(scatter_x, scatter_y);
    result.rank_vs_n = ols_fit(ns, result.mean_start_rank);
  }
  return result;
}

TrajectoryResult trajectory_experiment(const TrajectoryConfig& cfg) {
  if (cfg.runs < 1) throw std::invalid_argument("trajectory_experiment: runs must be >= 1");
  TrajectoryResult result;
  result.instance = GenConfig{cfg.l, cfg.support_min, cfg.support_max,
                              derive_seed(cfg.master_seed, 0), cfg.weights};
  const ProgramSpace space = generate_random_instance(result.instance);
  result.optimal = space.optimal();

  auto start = std::chrono::steady_clock::now();
  const ScoreTable table = consistent_scores(space);
  result.score_seconds = seconds_since(start);
  result.start_score = table.scores[0];
  result.start_rank = rank_of(table, 0);

  start = std::chrono::steady_clock::now();
  SimulationOptions options;
  options.max_steps = cfg.max_steps;
  options.threads = cfg.threads;
  options.schedule = cfg.schedule;
  result.ensemble = ensemble(space, table, 0, cfg.runs, cfg.checkpoints,
                             derive_seed(cfg.master_seed, 1), options);
  result.simulate_seconds = seconds_since(start);
  return result;
}

std::optional<FitResult> pre_absorption_decay_fit(const EnsembleStats& stats) {
  std::vector<double> xs;
  std::vector<double> ys;
  for (std::size_t k = 0; k < stats.checkpoints.size(); ++k) {
    if (stats.absorbed_count[k] != 0) break;
    xs.push_back(static_cast<double>(stats.checkpoints[k]));
    ys.push_back(std::log(stats.mean_rank[k]));
  }
  if (xs.size() < 2) return std::nullopt;
  return ols_fit(xs, ys);
}

std::string sweep_config_json(const SweepConfig& cfg) { return sweep_config(cfg).dump(); }

std::string trajectory_config_json(const TrajectoryConfig& cfg) {
  json j = {{"engine", std::string(kEngineName)},
            {"l", cfg.l},
            {"n", std::size_t{1} << cfg.l},
            {"runs", cfg.runs},
            {"master_seed", cfg.master_seed},
            {"instance_seed", derive_seed(cfg.master_seed, 0)},
            {"ensemble_seed", derive_seed(cfg.master_seed, 1)},
            {"support_min", cfg.support_min},
            {"support_max", cfg.support_max},
            {"weights", std::string(to_string(cfg.weights))},
            {"max_steps", cfg.max_steps},
            {"start", 0},
            {"seed_derivation", "run_seed = derive_seed(ensemble_seed, run_index)"}};
  if (cfg.checkpoints) {
    j["checkpoints"] = *cfg.checkpoints;
  } else {
    j["checkpoints"] = cfg.schedule == CheckpointSchedule::kEveryStep ? "every" : "geometric";
  }
  return j.dump();
}

void write_sweep_csv(std::ostream& os, const SweepResult& result) {
  os << "# " << sweep_config_json(result.config) << '\n';
  os << "l,n,repeat,instance_seed,start_score,start_rank\n";
  for (const ExperimentRecord& rec : result.records) {
    os << rec.l << ',' << rec.n << ',' << rec.repeat_index << ',' << rec.instance_seed << ','
       << to_string(rec.start_score) << ',' << rec.start_rank.value << '\n';
  }
}

std::string fit_summary_json(const SweepResult& result) {
  json per_l = json::array();
  for (std::size_t k = 0; k < result.ls.size(); ++k) {
    per_l.push_back({{"l", result.ls[k]},
                     {"mean_start_score", result.mean_start_score[k]},
                     {"mean_start_rank", result.mean_start_rank[k]}});
  }
  json j = {{"steps_vs_l", fit_json(result.steps_vs_l)},
            {"steps_vs_l_scatter", fit_json(result.steps_vs_l_scatter)},
            {"rank_vs_n", fit_json(result.rank_vs_n)},
            {"per_l", per_l},
            {"config", sweep_config(result.config)}};
  return j.dump(2) + "\n";
}

}  // namespace rsi
