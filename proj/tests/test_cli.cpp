#include "doctest.h"

#include <sstream>

#include "cli.hpp"
#include "rsi/io.hpp"
#include "test_support.hpp"

using namespace rsi;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::cli_main(args, out, err);
  return {code, out.str(), err.str()};
}

}  // namespace

TEST_CASE("example prints the constructed scores") {
  const Result r = run({"example"});
  REQUIRE(r.code == 0);
  CHECK(r.out.find("final scores: 0, 1.3333333333333333, 2.6666666666666665, 3.0574712643678") !=
        std::string::npos);
  CHECK(r.out.find("[0.25, 0.25, 0.5, 0]") != std::string::npos);
  CHECK(r.out.find("[0, 0.58, 0, 0.42]") != std::string::npos);
  CHECK(r.out.find("tentative values: 0, 1.3333333333333333, 4, inf") != std::string::npos);

  const Result j = run({"example", "--format", "json"});
  REQUIRE(j.code == 0);
  CHECK(j.out.find("\"steps\"") != std::string::npos);
}

TEST_CASE("gen, score, check, simulate pipeline") {
  const auto dir = testing::scratch_dir("cli_pipeline");
  const std::string out = dir.string();
  REQUIRE(run({"gen", "--l", "6", "--seed", "11", "--out", out}).code == 0);
  const ProgramSpace space = load_instance(dir / "instance.json");
  CHECK(space.size() == 64);
  CHECK(read_file(dir / "instance.json").find("\"seed\":11") != std::string::npos);

  REQUIRE(run({"score", "--instance", (dir / "instance.json").string(), "--out", out}).code == 0);
  const ScoreTable table = load_scores(dir / "scores.json");
  CHECK(table == consistent_scores(space));

  const Result check = run({"check", "--instance", (dir / "instance.json").string(), "--scores",
                            (dir / "scores.json").string()});
  CHECK(check.code == 0);
  CHECK(check.out.rfind("ok", 0) == 0);

  const Result sim = run({"simulate", "--instance", (dir / "instance.json").string(), "--seed", "4"});
  CHECK(sim.code == 0);
  CHECK(sim.out.find("step,program,score,rank\n0,0,") != std::string::npos);

  const Result est = run({"simulate", "--instance", (dir / "instance.json").string(), "--runs",
                          "2000", "--format", "json"});
  CHECK(est.code == 0);
  CHECK(est.out.find("\"std_error\"") != std::string::npos);
}

TEST_CASE("check flags inconsistent scores") {
  const auto dir = testing::scratch_dir("cli_check");
  save_instance(dir / "example.json", worked_example());
  ScoreTable naive{{Score::finite(0), Score::finite(1), Score::finite(2), Score::finite(3)}, {0, 1, 2, 3}};
  save_scores(dir / "naive.json", naive);
  const Result r = run({"check", "--instance", (dir / "example.json").string(), "--scores",
                        (dir / "naive.json").string()});
  CHECK(r.code == 1);
  CHECK(r.out.find("fixed point") != std::string::npos);
}

TEST_CASE("score on an invalid file exits 1 with the violations") {
  const auto dir = testing::scratch_dir("cli_invalid");
  write_file(dir / "bad.json",
             R"({"n": 2, "optimal": 0, "rows": [{"support": [0], "weights": [1]}, {"support": [0, 1], "weights": [0.5, 0.4]}]})");
  const Result r = run({"score", "--instance", (dir / "bad.json").string()});
  CHECK(r.code == 1);
  CHECK(r.err.find("row 1: row sum") != std::string::npos);

  write_file(dir / "cut.json", R"({"n": 2, "optimal": 0, "rows": [{"supp)");
  const Result cut = run({"score", "--instance", (dir / "cut.json").string()});
  CHECK(cut.code == 1);
  CHECK(cut.err.find("byte") != std::string::npos);
}

TEST_CASE("usage errors exit 2 and name the flag") {
  const Result unknown = run({"sweep", "--bogus", "3"});
  CHECK(unknown.code == 2);
  CHECK(unknown.err.find("--bogus") != std::string::npos);

  const Result bad_value = run({"gen", "--l", "abc"});
  CHECK(bad_value.code == 2);
  CHECK(bad_value.err.find("--l") != std::string::npos);

  const Result none = run({});
  CHECK(none.code == 2);

  const Result large = run({"gen", "--l", "20"});
  CHECK(large.code == 2);
  CHECK(large.err.find("--allow-large") != std::string::npos);
  CHECK(large.err.find("MiB") != std::string::npos);

  const Result zero = run({"gen", "--l", "0"});
  CHECK(zero.code == 2);

  const Result fmt = run({"sweep", "--l-max", "2", "--format", "xml"});
  CHECK(fmt.code == 2);
  CHECK(fmt.err.find("--format") != std::string::npos);

  CHECK(run({"score"}).code == 2);
  CHECK(run({"--help"}).code == 0);
}

TEST_CASE("sweep is byte-identical across runs and thread counts") {
  const auto a = testing::scratch_dir("cli_sweep_a");
  const auto b = testing::scratch_dir("cli_sweep_b");
  REQUIRE(run({"sweep", "--l-min", "1", "--l-max", "8", "--repeats", "10", "--seed", "7", "--out",
               a.string()})
              .code == 0);
  REQUIRE(run({"sweep", "--l-min", "1", "--l-max", "8", "--repeats", "10", "--seed", "7", "--out",
               b.string(), "--threads", "4"})
              .code == 0);
  CHECK(read_file(a / "sweep.csv") == read_file(b / "sweep.csv"));
  CHECK(read_file(a / "fit.json") == read_file(b / "fit.json"));
}

TEST_CASE("ensemble writes both csv files") {
  const auto dir = testing::scratch_dir("cli_ensemble");
  const Result r = run({"ensemble", "--l", "6", "--runs", "20", "--seed", "2", "--out", dir.string()});
  REQUIRE(r.code == 0);
  const std::string stats = read_file(dir / "ensemble.csv");
  CHECK(stats.find("\ncheckpoint,mean_rank,std_rank,min_rank,max_rank,absorbed_count\n0,") !=
        std::string::npos);
  const std::string runs = read_file(dir / "runs.csv");
  CHECK(runs.find("\nrun_index,steps_to_absorption,truncated\n0,") != std::string::npos);
  CHECK(r.out.find("score construction") != std::string::npos);
  CHECK(r.out.find("simulation") != std::string::npos);
}
