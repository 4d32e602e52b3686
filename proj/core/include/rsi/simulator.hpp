#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "rsi/instance.hpp"
#include "rsi/rng.hpp"
#include "rsi/scorer.hpp"

namespace rsi {

/// One run of the generate-and-accept loop.
struct Trajectory {
  /// Current program after each generation step, starting with the start
  /// program; visited.size() - 1 steps were taken.
  std::vector<ProgramIndex> visited;
  /// Step count at which the optimal program was entered, if it was.
  std::optional<std::uint64_t> steps_to_absorption;
  std::uint64_t seed = 0;

  [[nodiscard]] bool absorbed() const { return steps_to_absorption.has_value(); }
  [[nodiscard]] std::uint64_t steps() const { return visited.size() - 1; }
  /// Program held after `step` steps; the final program past the end.
  [[nodiscard]] ProgramIndex at(std::uint64_t step) const {
    return step < visited.size() ? visited[step] : visited.back();
  }
};

/// Draws a program from a row's distribution by inverse-CDF lookup.
class ProgramSampler {
 public:
  explicit ProgramSampler(const ProgramSpace& space);

  ProgramIndex operator()(ProgramIndex row, Engine& rng) const;

 private:
  std::vector<std::size_t> offset_;
  std::vector<ProgramIndex> support_;
  std::vector<double> cumulative_;
};

/// Runs the loop with an arbitrary candidate source: `propose(current)` yields
/// the generated program. Stops on entering `optimal` or after max_steps
/// generations; every generation counts as a step, accepted or not.
template <typename Propose>
Trajectory run_rsi_with(std::span<const Score> scores, ProgramIndex optimal, ProgramIndex start,
                        std::uint64_t max_steps, Propose&& propose) {
  if (start >= scores.size()) throw std::out_of_range("run_rsi: start out of range");
  if (max_steps < 1) throw std::invalid_argument("run_rsi: max_steps must be >= 1");
  Trajectory traj;
  traj.visited.push_back(start);
  ProgramIndex current = start;
  if (current == optimal) {
    traj.steps_to_absorption = 0;
    return traj;
  }
  for (std::uint64_t step = 1; step <= max_steps; ++step) {
    const ProgramIndex candidate = propose(current);
    if (scores[candidate] < scores[current]) current = candidate;
    traj.visited.push_back(current);
    if (current == optimal) {
      traj.steps_to_absorption = step;
      break;
    }
  }
  return traj;
}

Trajectory run_rsi(const ProgramSpace& space, const ProgramSampler& sampler,
                   const ScoreTable& table, ProgramIndex start, std::uint64_t seed,
                   std::uint64_t max_steps);
Trajectory run_rsi(const ProgramSpace& space, const ScoreTable& table, ProgramIndex start,
                   std::uint64_t seed, std::uint64_t max_steps);

/// 100 x the expected steps when finite (at least 1), else 1e5.
std::uint64_t default_max_steps(Score start_score);

/// Checkpoints used by ensemble() when none are given explicitly.
enum class CheckpointSchedule {
  kGeometric,  // 0, 1, 2, 4, ..., longest run
  kEveryStep,  // 0, 1, 2, ..., longest run
};

struct SimulationOptions {
  std::uint64_t max_steps = 0;  // 0: default_max_steps(scores[start])
  unsigned threads = 1;         // 0: one per hardware thread
  CheckpointSchedule schedule = CheckpointSchedule::kGeometric;
};

struct MeanEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t runs = 0;
  std::size_t truncated = 0;  // runs cut at max_steps, counted as max_steps
};

/// Monte Carlo estimate of the expected steps from `start`. Run r uses seed
/// derive_seed(seed, r). Throws std::invalid_argument if runs < 2 or the
/// start score is infinite.
MeanEstimate estimate_mean_steps(const ProgramSpace& space, const ScoreTable& table,
                                 ProgramIndex start, std::size_t runs, std::uint64_t seed,
                                 const SimulationOptions& options = {});

struct EnsembleStats {
  std::vector<std::uint64_t> checkpoints;
  std::vector<double> mean_rank;
  std::vector<double> std_rank;  // sample standard deviation; 0 for one run
  std::vector<std::uint32_t> min_rank;
  std::vector<std::uint32_t> max_rank;
  std::vector<std::size_t> absorbed_count;
};

struct RunSummary {
  std::size_t run_index = 0;
  std::uint64_t steps = 0;  // steps to absorption, or max_steps when truncated
  bool truncated = false;
};

struct EnsembleResult {
  EnsembleStats stats;
  std::vector<RunSummary> runs;
  std::uint64_t max_steps = 0;
};

/// {0, 1, 2, 4, ...} below `last`, then `last`.
std::vector<std::uint64_t> geometric_checkpoints(std::uint64_t last);

/// Runs `runs` trajectories from `start` and reports rank statistics at each
/// checkpoint. Without explicit checkpoints, options.schedule up to the longest
/// run is used.
EnsembleResult ensemble(const ProgramSpace& space, const ScoreTable& table, ProgramIndex start,
                        std::size_t runs, std::optional<std::vector<std::uint64_t>> checkpoints,
                        std::uint64_t seed, const SimulationOptions& options = {});

/// checkpoint,mean_rank,std_rank,min_rank,max_rank,absorbed_count
void write_ensemble_csv(std::ostream& os, const EnsembleStats& stats);
/// run_index,steps_to_absorption,truncated
void write_runs_csv(std::ostream& os, std::span<const RunSummary> runs);

}  // namespace rsi
