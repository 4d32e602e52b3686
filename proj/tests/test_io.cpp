#include "doctest.h"

#include <sstream>

#include "rsi/io.hpp"
#include "test_support.hpp"

using namespace rsi;

namespace {
std::string dump(const ProgramSpace& space, std::string_view config = {}) {
  std::ostringstream os;
  write_instance(os, space, config);
  return os.str();
}
}  // namespace

TEST_CASE("instance round trip is exact") {
  CHECK(parse_instance(dump(worked_example())) == worked_example());

  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    GenConfig cfg;
    cfg.l = 7;
    cfg.seed = seed;
    cfg.weights = seed % 2 ? WeightLaw::kNormalizedUniform : WeightLaw::kFlatDirichlet;
    const ProgramSpace space = generate_random_instance(cfg);
    const std::string text = dump(space, gen_config_json(cfg));
    const ProgramSpace back = parse_instance(text);
    CHECK(back == space);
    CHECK(dump(back, gen_config_json(cfg)) == text);
  }
}

TEST_CASE("instance files on disk") {
  const auto dir = testing::scratch_dir("io");
  const auto path = dir / "example.json";
  save_instance(path, worked_example());
  CHECK(load_instance(path) == worked_example());
  CHECK_THROWS_AS(load_instance(dir / "missing.json"), IoError);
}

TEST_CASE("optimal out of range fails validation on load") {
  const std::string text =
      R"({"n": 4, "optimal": 7, "rows": [{"support": [0], "weights": [1]},)"
      R"({"support": [0], "weights": [1]},{"support": [0], "weights": [1]},)"
      R"({"support": [0], "weights": [1]}]})";
  try {
    parse_instance(text);
    FAIL("expected ValidationError");
  } catch (const ValidationError& e) {
    CHECK(e.report().has(ViolationKind::kOptimalOutOfRange));
    CHECK(std::string(e.what()).find("optimal out of range") != std::string::npos);
  }
}

TEST_CASE("truncated file names the byte offset") {
  const std::string full = dump(worked_example());
  const std::string cut = full.substr(0, full.size() / 2);
  try {
    parse_instance(cut);
    FAIL("expected FormatError");
  } catch (const FormatError& e) {
    CHECK(std::string(e.what()).find("parse error at byte") != std::string::npos);
  }
}

TEST_CASE("malformed fields are named") {
  auto message = [](const std::string& text) {
    try {
      parse_instance(text);
    } catch (const FormatError& e) {
      return std::string(e.what());
    }
    return std::string("no error");
  };
  CHECK(message(R"({"optimal": 0, "rows": []})").find("missing field \"n\"") != std::string::npos);
  CHECK(message(R"({"n": 1, "optimal": 0, "rows": [{"support": [-1], "weights": [1]}]})")
            .find("rows[0].support[0]") != std::string::npos);
  CHECK(message(R"({"n": 1, "optimal": 0, "rows": [{"support": [0], "weights": ["x"]}]})")
            .find("rows[0].weights[0]") != std::string::npos);
  CHECK(message(R"({"n": 1, "optimal": 0, "rows": 3})").find("instance.rows") != std::string::npos);
}

TEST_CASE("length mismatch on load is a validation failure") {
  CHECK_THROWS_AS(parse_instance(R"({"n": 1, "optimal": 0, "rows": [{"support": [0], "weights": [0.5, 0.5]}]})"),
                  ValidationError);
}

TEST_CASE("score files keep infinity as a string") {
  ScoreTable table{{Score::finite(0.0), Score::finite(4.0 / 3.0), Score::infinity()}, {0, 1}};
  std::ostringstream os;
  write_scores(os, table);
  CHECK(os.str().find("\"inf\"") != std::string::npos);
  CHECK(parse_scores(os.str()) == table);

  std::ostringstream with_config;
  write_scores(with_config, table, R"({"seed": 3})");
  CHECK(parse_scores(with_config.str()) == table);

  CHECK_THROWS_AS(parse_scores(R"({"scores": ["nan"], "settle_order": []})"), FormatError);
  CHECK_THROWS_AS(parse_scores(R"({"scores": [0], "settle_order": [1]})"), FormatError);
}
