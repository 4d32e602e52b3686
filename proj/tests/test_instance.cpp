#include "doctest.h"

#include <map>
#include <thread>

#include "rsi/instance.hpp"

using namespace rsi;

TEST_CASE("worked example") {
  const ProgramSpace space = worked_example();
  CHECK(space.size() == 4);
  CHECK(space.optimal() == 0);
  CHECK(validate(space).ok());

  SUBCASE("zero weights are dropped") {
    CHECK(space.row(1).support == std::vector<ProgramIndex>{0, 2});
    CHECK(space.row(1).weights == std::vector<double>{0.75, 0.25});
    CHECK(space.row(3).support == std::vector<ProgramIndex>{1, 3});
    CHECK(space.row(0).size() == 4);
    CHECK(space.total_support() == 4 + 2 + 4 + 2);
  }
}

TEST_CASE("validate reports each violation with its row") {
  SUBCASE("row sum") {
    ProgramSpace space(2, {{{0, 1}, {0.5, 0.4}}, {{0}, {1.0}}}, 0);
    const auto report = validate(space);
    REQUIRE_FALSE(report.ok());
    CHECK(report.has(ViolationKind::kRowSum));
    CHECK(report.violations.size() == 1);
    CHECK(report.violations[0].row == 0);
    CHECK(report.describe().find("row sum") != std::string::npos);
  }
  SUBCASE("index out of range") {
    ProgramSpace space(2, {{{0}, {1.0}}, {{2}, {1.0}}}, 0);
    const auto report = validate(space);
    CHECK(report.has(ViolationKind::kIndexOutOfRange));
    CHECK(report.violations[0].row == 1);
  }
  SUBCASE("unsorted and duplicate support") {
    ProgramSpace unsorted(2, {{{1, 0}, {0.5, 0.5}}, {{0}, {1.0}}}, 0);
    CHECK(validate(unsorted).has(ViolationKind::kUnsortedSupport));
    ProgramSpace dup(2, {{{0, 0}, {0.5, 0.5}}, {{0}, {1.0}}}, 0);
    CHECK(validate(dup).has(ViolationKind::kUnsortedSupport));
  }
  SUBCASE("negative weight") {
    ProgramSpace space(2, {{{0, 1}, {1.5, -0.5}}, {{0}, {1.0}}}, 0);
    CHECK(validate(space).has(ViolationKind::kBadWeight));
  }
  SUBCASE("optimal out of range") {
    ProgramSpace space(2, {{{0}, {1.0}}, {{0}, {1.0}}}, 2);
    CHECK(validate(space).has(ViolationKind::kOptimalOutOfRange));
  }
  SUBCASE("structure") {
    CHECK(validate(ProgramSpace{}).has(ViolationKind::kEmptySpace));
    ProgramSpace short_rows(3, {{{0}, {1.0}}}, 0);
    CHECK(validate(short_rows).has(ViolationKind::kRowCountMismatch));
    ProgramSpace mismatch(1, {{{0}, {0.5, 0.5}}}, 0);
    CHECK(validate(mismatch).has(ViolationKind::kLengthMismatch));
  }
  SUBCASE("sum tolerance is 1e-9") {
    ProgramSpace inside(1, {{{0}, {1.0 + 5e-10}}}, 0);
    CHECK(validate(inside).ok());
    ProgramSpace outside(1, {{{0}, {1.0 + 5e-9}}}, 0);
    CHECK_FALSE(validate(outside).ok());
  }
  CHECK_THROWS_AS(require_valid(ProgramSpace(2, {{{0}, {1.0}}, {{2}, {1.0}}}, 0)),
                  ValidationError);
}

TEST_CASE("random instance shape") {
  GenConfig cfg;
  cfg.l = 4;
  cfg.seed = 99;
  const ProgramSpace space = generate_random_instance(cfg);
  REQUIRE(space.size() == 16);
  CHECK(validate(space).ok());
  const SparseRow& row0 = space.row(0);
  REQUIRE(row0.size() == 16);
  for (std::size_t j = 0; j < 16; ++j) {
    CHECK(row0.support[j] == j);
    CHECK(row0.weights[j] == 0.0625);
  }
  CHECK(space.optimal() != 0);
  CHECK(space.optimal() < 16);
}

TEST_CASE("support sizes are clamped to n") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    GenConfig cfg;
    cfg.l = 1;
    cfg.seed = seed;
    const ProgramSpace space = generate_random_instance(cfg);
    CHECK(space.size() == 2);
    CHECK(space.optimal() == 1);
    for (const auto& row : space.rows()) CHECK(row.size() <= 2);
    CHECK(validate(space).ok());
  }
}

TEST_CASE("support sizes follow Uniform{10..100}") {
  GenConfig cfg;
  cfg.l = 10;
  cfg.seed = 7;
  const ProgramSpace space = generate_random_instance(cfg);
  for (std::size_t i = 1; i < space.size(); ++i) {
    CHECK(space.rows()[i].size() >= 10);
    CHECK(space.rows()[i].size() <= 100);
  }

  // Chi-square over >= 10^4 rows against 91 equiprobable sizes: 90 degrees of
  // freedom, 0.999 quantile 137.208.
  cfg.l = 14;
  const ProgramSpace big = generate_random_instance(cfg);
  std::map<std::size_t, double> counts;
  const auto rows = static_cast<double>(big.size() - 1);
  for (std::size_t i = 1; i < big.size(); ++i) counts[big.rows()[i].size()] += 1;
  double chi2 = 0.0;
  const double expected = rows / 91.0;
  for (std::size_t k = 10; k <= 100; ++k) {
    const double d = counts[k] - expected;
    chi2 += d * d / expected;
  }
  CHECK(counts.size() == 91);
  CHECK(chi2 < 137.208);
}

TEST_CASE("every generated row is stochastic, sorted and in range") {
  for (auto law : {WeightLaw::kFlatDirichlet, WeightLaw::kNormalizedUniform}) {
    for (unsigned l = 1; l <= 9; ++l) {
      GenConfig cfg;
      cfg.l = l;
      cfg.seed = 1000 + l;
      cfg.weights = law;
      const ProgramSpace space = generate_random_instance(cfg);
      CHECK(validate(space).ok());
    }
  }
}

TEST_CASE("weight laws differ and are selectable by name") {
  GenConfig a;
  a.l = 8;
  a.seed = 3;
  GenConfig b = a;
  b.weights = WeightLaw::kNormalizedUniform;
  CHECK_FALSE(generate_random_instance(a) == generate_random_instance(b));
  CHECK(parse_weight_law("flat_dirichlet") == WeightLaw::kFlatDirichlet);
  CHECK(parse_weight_law(to_string(WeightLaw::kNormalizedUniform)) == WeightLaw::kNormalizedUniform);
  CHECK_FALSE(parse_weight_law("gaussian").has_value());
}

TEST_CASE("generation is deterministic, also across threads") {
  GenConfig cfg;
  cfg.l = 9;
  cfg.seed = 42;
  const ProgramSpace reference = generate_random_instance(cfg);
  CHECK(generate_random_instance(cfg) == reference);

  std::vector<ProgramSpace> results(4);
  {
    std::vector<std::jthread> workers;
    for (std::size_t t = 0; t < results.size(); ++t) {
      workers.emplace_back([&, t] { results[t] = generate_random_instance(cfg); });
    }
  }
  for (const auto& r : results) CHECK(r == reference);

  cfg.seed = 43;
  CHECK_FALSE(generate_random_instance(cfg) == reference);
}

TEST_CASE("generator rejects bad configs") {
  GenConfig cfg;
  cfg.l = 0;
  CHECK_THROWS_AS(generate_random_instance(cfg), std::invalid_argument);
  cfg.l = kMaxExponent + 1;
  CHECK_THROWS_AS(generate_random_instance(cfg), std::invalid_argument);
  cfg.l = 3;
  cfg.support_min = 5;
  cfg.support_max = 4;
  CHECK_THROWS_AS(generate_random_instance(cfg), std::invalid_argument);
  cfg.support_min = 0;
  CHECK_THROWS_AS(generate_random_instance(cfg), std::invalid_argument);
}
