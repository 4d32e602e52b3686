#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "rsi/instance.hpp"
#include "rsi/regression.hpp"
#include "rsi/scorer.hpp"
#include "rsi/simulator.hpp"

namespace rsi {

/// One (l, repeat) cell of the size sweep, measured at program 0.
struct ExperimentRecord {
  unsigned l = 0;
  std::size_t n = 0;
  unsigned repeat_index = 0;
  std::uint64_t instance_seed = 0;
  Score start_score;
  Rank start_rank;
};

struct SweepConfig {
  unsigned l_min = 1;
  unsigned l_max = 14;
  unsigned repeats = 10;
  std::uint64_t master_seed = 0;
  unsigned support_min = 10;
  unsigned support_max = 100;
  WeightLaw weights = WeightLaw::kFlatDirichlet;
  unsigned threads = 1;  // 0: one per hardware thread; never affects results
};

struct SweepResult {
  SweepConfig config;
  std::vector<ExperimentRecord> records;  // ordered by (l, repeat)
  std::vector<double> ls;                 // one entry per l
  std::vector<double> mean_start_score;   // per l
  std::vector<double> mean_start_rank;    // per l
  // Fits need at least two distinct l values.
  std::optional<FitResult> steps_vs_l;          // per-l means
  std::optional<FitResult> steps_vs_l_scatter;  // every record
  std::optional<FitResult> rank_vs_n;           // per-l means, x = n
  double score_seconds = 0.0;                   // summed over cells
};

class SweepError : public std::runtime_error {
 public:
  SweepError(unsigned l, const std::string& what)
      : std::runtime_error(what), l_(l) {}
  [[nodiscard]] unsigned l() const { return l_; }

 private:
  unsigned l_;
};

/// Seed of the instance for cell (l, repeat) under a master seed.
std::uint64_t sweep_instance_seed(std::uint64_t master_seed, unsigned l, unsigned repeat);

/// Generates and scores one instance per (l, repeat), then fits expected
/// steps against l and rank against n. Throws std::invalid_argument on a bad
/// config and SweepError when a cell runs out of memory.
SweepResult sweep(const SweepConfig& cfg);

struct TrajectoryConfig {
  unsigned l = 14;
  std::size_t runs = 100;
  std::uint64_t master_seed = 0;
  unsigned support_min = 10;
  unsigned support_max = 100;
  WeightLaw weights = WeightLaw::kFlatDirichlet;
  std::uint64_t max_steps = 0;  // 0: simulator default
  std::optional<std::vector<std::uint64_t>> checkpoints;
  CheckpointSchedule schedule = CheckpointSchedule::kGeometric;
  unsigned threads = 1;
};

struct TrajectoryResult {
  GenConfig instance;
  ProgramIndex optimal = 0;
  Score start_score;
  Rank start_rank;
  EnsembleResult ensemble;
  double score_seconds = 0.0;
  double simulate_seconds = 0.0;
};

/// One instance at n = 2^l, scored, then an ensemble of runs from program 0.
/// The instance uses derive_seed(master, 0) and the runs derive_seed(master, 1).
TrajectoryResult trajectory_experiment(const TrajectoryConfig& cfg);

/// Fit of log(mean_rank) against the checkpoint step over the checkpoints
/// where no run has absorbed yet. nullopt with fewer than two such points.
std::optional<FitResult> pre_absorption_decay_fit(const EnsembleStats& stats);

std::string sweep_config_json(const SweepConfig& cfg);
std::string trajectory_config_json(const TrajectoryConfig& cfg);

/// "# <config json>" line, then l,n,repeat,instance_seed,start_score,start_rank.
void write_sweep_csv(std::ostream& os, const SweepResult& result);
/// {"steps_vs_l": {...}, "steps_vs_l_scatter": {...}, "rank_vs_n": {...},
///  "per_l": [...], "config": {...}}
std::string fit_summary_json(const SweepResult& result);

}  // namespace rsi
