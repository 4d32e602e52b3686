#include "doctest.h"

#include <sstream>

#include "rsi/experiment.hpp"

using namespace rsi;

TEST_CASE("smallest sweep") {
  SweepConfig cfg;
  cfg.l_min = 1;
  cfg.l_max = 1;
  cfg.repeats = 1;
  const SweepResult result = sweep(cfg);
  REQUIRE(result.records.size() == 1);
  CHECK(result.records[0].n == 2);
  CHECK(result.records[0].start_score.is_finite());
  CHECK_FALSE(result.steps_vs_l.has_value());
}

TEST_CASE("sweep records are ordered, finite and reproducible") {
  SweepConfig cfg;
  cfg.l_min = 1;
  cfg.l_max = 8;
  cfg.repeats = 10;
  cfg.master_seed = 7;
  const SweepResult a = sweep(cfg);
  REQUIRE(a.records.size() == 80);
  for (std::size_t k = 0; k < a.records.size(); ++k) {
    const ExperimentRecord& r = a.records[k];
    CHECK(r.l == 1 + k / 10);
    CHECK(r.repeat_index == k % 10);
    CHECK(r.n == (std::size_t{1} << r.l));
    CHECK(r.instance_seed == sweep_instance_seed(7, r.l, r.repeat_index));
    CHECK(r.start_score.is_finite());
    CHECK(r.start_rank.value >= 1);
    CHECK(r.start_rank.value <= r.n);
  }
  REQUIRE(a.steps_vs_l.has_value());
  CHECK(a.steps_vs_l->n_points == 8);
  CHECK(a.steps_vs_l_scatter->n_points == 80);
  CHECK(a.rank_vs_n->n_points == 8);

  // Mean expected steps grow with l; one inversion allowed at 10 repeats.
  int inversions = 0;
  for (std::size_t k = 1; k < a.mean_start_score.size(); ++k) {
    if (a.mean_start_score[k] < a.mean_start_score[k - 1]) ++inversions;
  }
  CHECK(inversions <= 1);

  cfg.threads = 3;
  const SweepResult b = sweep(cfg);
  std::ostringstream csv_a, csv_b;
  write_sweep_csv(csv_a, a);
  write_sweep_csv(csv_b, b);
  CHECK(csv_a.str() == csv_b.str());
  CHECK(fit_summary_json(a) == fit_summary_json(b));
}

TEST_CASE("sweep csv layout") {
  SweepConfig cfg;
  cfg.l_min = 2;
  cfg.l_max = 3;
  cfg.repeats = 2;
  const SweepResult result = sweep(cfg);
  std::ostringstream os;
  write_sweep_csv(os, result);
  std::istringstream in(os.str());
  std::string line;
  std::getline(in, line);
  CHECK(line.rfind("# {", 0) == 0);
  CHECK(line.find("\"master_seed\":0") != std::string::npos);
  std::getline(in, line);
  CHECK(line == "l,n,repeat,instance_seed,start_score,start_rank");
  int rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    CHECK(line.find("inf") == std::string::npos);
  }
  CHECK(rows == 4);
  const std::string json = fit_summary_json(result);
  CHECK(json.find("\"steps_vs_l\"") != std::string::npos);
  CHECK(json.find("\"rank_vs_n\"") != std::string::npos);
  CHECK(json.find("\"config\"") != std::string::npos);
}

TEST_CASE("sweep rejects bad ranges") {
  SweepConfig cfg;
  cfg.l_min = 0;
  CHECK_THROWS_AS(sweep(cfg), std::invalid_argument);
  cfg.l_min = 5;
  cfg.l_max = 4;
  CHECK_THROWS_AS(sweep(cfg), std::invalid_argument);
  cfg.l_max = 5;
  cfg.repeats = 0;
  CHECK_THROWS_AS(sweep(cfg), std::invalid_argument);
}

TEST_CASE("trajectory experiment at n = 16") {
  TrajectoryConfig cfg;
  cfg.l = 4;
  cfg.runs = 100;
  cfg.master_seed = 3;
  const TrajectoryResult result = trajectory_experiment(cfg);
  CHECK(result.instance.n() == 16);
  CHECK(result.ensemble.stats.absorbed_count.back() == 100);
  for (const RunSummary& r : result.ensemble.runs) CHECK_FALSE(r.truncated);
  CHECK(result.start_score.is_finite());
}

TEST_CASE("single-run trajectory experiment") {
  TrajectoryConfig cfg;
  cfg.l = 6;
  cfg.runs = 1;
  const TrajectoryResult result = trajectory_experiment(cfg);
  for (double sd : result.ensemble.stats.std_rank) CHECK(sd == 0.0);
}

TEST_CASE("pre-absorption decay fit") {
  EnsembleStats stats;
  stats.checkpoints = {0, 1, 2, 3, 4};
  stats.mean_rank = {100, 50, 25, 12.5, 1};
  stats.absorbed_count = {0, 0, 0, 0, 3};
  const auto fit = pre_absorption_decay_fit(stats);
  REQUIRE(fit.has_value());
  CHECK(fit->n_points == 4);
  CHECK(fit->slope == doctest::Approx(std::log(0.5)));
  CHECK(fit->r_squared == doctest::Approx(1.0));

  stats.absorbed_count = {0, 1, 1, 1, 3};
  CHECK_FALSE(pre_absorption_decay_fit(stats).has_value());
}
