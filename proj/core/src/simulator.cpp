#include "rsi/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "rsi/parallel.hpp"

namespace rsi {

ProgramSampler::ProgramSampler(const ProgramSpace& space) {
  offset_.reserve(space.size() + 1);
  offset_.push_back(0);
  support_.reserve(space.total_support());
  cumulative_.reserve(space.total_support());
  for (const auto& row : space.rows()) {
    double acc = 0.0;
    for (std::size_t k = 0; k < row.size(); ++k) {
      if (row.weights[k] <= 0.0) continue;
      acc += row.weights[k];
      support_.push_back(row.support[k]);
      cumulative_.push_back(acc);
    }
    offset_.push_back(support_.size());
  }
}

ProgramIndex ProgramSampler::operator()(ProgramIndex row, Engine& rng) const {
  const std::size_t begin = offset_[row];
  const std::size_t end = offset_[row + 1];
  std::uniform_real_distribution<double> u(0.0, cumulative_[end - 1]);
  const double x = u(rng);
  const auto first = cumulative_.begin() + static_cast<std::ptrdiff_t>(begin);
  const auto last = cumulative_.begin() + static_cast<std::ptrdiff_t>(end);
  auto it = std::upper_bound(first, last, x);
  if (it == last) --it;
  return support_[static_cast<std::size_t>(it - cumulative_.begin())];
}

Trajectory run_rsi(const ProgramSpace& space, const ProgramSampler& sampler,
                   const ScoreTable& table, ProgramIndex start, std::uint64_t seed,
                   std::uint64_t max_steps) {
  if (table.size() != space.size()) {
    throw std::invalid_argument("run_rsi: score table does not match the space");
  }
  Engine rng = make_engine(seed);
  Trajectory traj = run_rsi_with(table.scores, space.optimal(), start, max_steps,
                                 [&](ProgramIndex current) { return sampler(current, rng); });
  traj.seed = seed;
  return traj;
}

Trajectory run_rsi(const ProgramSpace& space, const ScoreTable& table, ProgramIndex start,
                   std::uint64_t seed, std::uint64_t max_steps) {
  require_valid(space);
  return run_rsi(space, ProgramSampler(space), table, start, seed, max_steps);
}

std::uint64_t default_max_steps(Score start_score) {
  if (start_score.is_infinite()) return 100000;
  return std::max<std::uint64_t>(1, static_cast<std::uint64_t>(std::ceil(100.0 * start_score.value())));
}

namespace {

std::uint64_t resolve_max_steps(const ScoreTable& table, ProgramIndex start,
                                const SimulationOptions& options) {
  if (start >= table.size()) throw std::out_of_range("start program out of range");
  return options.max_steps != 0 ? options.max_steps : default_max_steps(table.scores[start]);
}

}  // namespace

MeanEstimate estimate_mean_steps(const ProgramSpace& space, const ScoreTable& table,
                                 ProgramIndex start, std::size_t runs, std::uint64_t seed,
                                 const SimulationOptions& options) {
  if (runs < 2) throw std::invalid_argument("estimate_mean_steps: runs must be >= 2");
  const std::uint64_t max_steps = resolve_max_steps(table, start, options);
  if (table.scores[start].is_infinite()) {
    throw std::invalid_argument("estimate_mean_steps: start program has infinite score");
  }
  require_valid(space);
  const ProgramSampler sampler(space);

  std::vector<std::uint64_t> steps(runs);
  std::vector<char> truncated(runs, 0);
  parallel_for(runs, options.threads, [&](std::size_t r) {
    const Trajectory t = run_rsi(space, sampler, table, start, derive_seed(seed, r), max_steps);
    steps[r] = t.absorbed() ? *t.steps_to_absorption : max_steps;
    truncated[r] = t.absorbed() ? 0 : 1;
  });

  MeanEstimate est;
  est.runs = runs;
  double sum = 0.0;
  for (std::size_t r = 0; r < runs; ++r) {
    sum += static_cast<double>(steps[r]);
    est.truncated += truncated[r];
  }
  est.mean = sum / static_cast<double>(runs);
  double ss = 0.0;
  for (auto s : steps) ss += (static_cast<double>(s) - est.mean) * (static_cast<double>(s) - est.mean);
  est.std_error = std::sqrt(ss / static_cast<double>(runs - 1) / static_cast<double>(runs));
  return est;
}

std::vector<std::uint64_t> geometric_checkpoints(std::uint64_t last) {
  std::vector<std::uint64_t> out{0};
  for (std::uint64_t c = 1; c < last; c *= 2) out.push_back(c);
  if (last > 0) out.push_back(last);
  return out;
}

EnsembleResult ensemble(const ProgramSpace& space, const ScoreTable& table, ProgramIndex start,
                        std::size_t runs, std::optional<std::vector<std::uint64_t>> checkpoints,
                        std::uint64_t seed, const SimulationOptions& options) {
  if (runs < 1) throw std::invalid_argument("ensemble: runs must be >= 1");
  if (checkpoints && !std::is_sorted(checkpoints->begin(), checkpoints->end())) {
    throw std::invalid_argument("ensemble: checkpoints must be increasing");
  }
  const std::uint64_t max_steps = resolve_max_steps(table, start, options);
  require_valid(space);
  const ProgramSampler sampler(space);

  std::vector<Trajectory> trajectories(runs);
  parallel_for(runs, options.threads, [&](std::size_t r) {
    trajectories[r] = run_rsi(space, sampler, table, start, derive_seed(seed, r), max_steps);
  });

  EnsembleResult result;
  result.max_steps = max_steps;
  std::uint64_t longest = 0;
  for (std::size_t r = 0; r < runs; ++r) {
    const Trajectory& t = trajectories[r];
    result.runs.push_back({r, t.absorbed() ? *t.steps_to_absorption : max_steps, !t.absorbed()});
    longest = std::max(longest, t.steps());
  }

  EnsembleStats& stats = result.stats;
  if (checkpoints) {
    stats.checkpoints = std::move(*checkpoints);
  } else if (options.schedule == CheckpointSchedule::kEveryStep) {
    stats.checkpoints.resize(longest + 1);
    for (std::uint64_t c = 0; c <= longest; ++c) stats.checkpoints[c] = c;
  } else {
    stats.checkpoints = geometric_checkpoints(longest);
  }
  const std::vector<Rank> ranks = all_ranks(table.scores);
  for (const std::uint64_t c : stats.checkpoints) {
    double sum = 0.0;
    std::uint32_t lo = static_cast<std::uint32_t>(space.size());
    std::uint32_t hi = 1;
    std::size_t absorbed = 0;
    std::vector<double> values(runs);
    for (std::size_t r = 0; r < runs; ++r) {
      const Trajectory& t = trajectories[r];
      const std::uint32_t rank = ranks[t.at(c)].value;
      values[r] = rank;
      sum += rank;
      lo = std::min(lo, rank);
      hi = std::max(hi, rank);
      if (t.absorbed() && *t.steps_to_absorption <= c) ++absorbed;
    }
    const double mean = sum / static_cast<double>(runs);
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    stats.mean_rank.push_back(mean);
    stats.std_rank.push_back(runs > 1 ? std::sqrt(ss / static_cast<double>(runs - 1)) : 0.0);
    stats.min_rank.push_back(lo);
    stats.max_rank.push_back(hi);
    stats.absorbed_count.push_back(absorbed);
  }
  return result;
}

namespace {

std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

void write_ensemble_csv(std::ostream& os, const EnsembleStats& stats) {
  os << "checkpoint,mean_rank,std_rank,min_rank,max_rank,absorbed_count\n";
  for (std::size_t k = 0; k < stats.checkpoints.size(); ++k) {
    os << stats.checkpoints[k] << ',' << format_double(stats.mean_rank[k]) << ','
       << format_double(stats.std_rank[k]) << ',' << stats.min_rank[k] << ','
       << stats.max_rank[k] << ',' << stats.absorbed_count[k] << '\n';
  }
}

void write_runs_csv(std::ostream& os, std::span<const RunSummary> runs) {
  os << "run_index,steps_to_absorption,truncated\n";
  for (const RunSummary& r : runs) {
    os << r.run_index << ',' << r.steps << ',' << (r.truncated ? 1 : 0) << '\n';
  }
}

}  // namespace rsi
