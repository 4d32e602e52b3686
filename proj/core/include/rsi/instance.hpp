#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "rsi/score.hpp"

namespace rsi {

/// One program's generation distribution in sparse form.
struct SparseRow {
  std::vector<ProgramIndex> support;  // ascending, distinct
  std::vector<double> weights;        // same length as support

  [[nodiscard]] std::size_t size() const { return support.size(); }
  friend bool operator==(const SparseRow&, const SparseRow&) = default;
};

/// A finite space of programs, each a fixed distribution over programs, with
/// one designated optimal (target) program.
///
/// Construction does not validate; call validate() or let consumers reject
/// invalid spaces. Immutable once built.
class ProgramSpace {
 public:
  ProgramSpace() = default;
  ProgramSpace(std::size_t n, std::vector<SparseRow> rows, ProgramIndex optimal);

  /// Builds the canonical sparse form of dense weight rows; zero entries are
  /// dropped.
  static ProgramSpace from_dense(const std::vector<std::vector<double>>& rows,
                                 ProgramIndex optimal);

  [[nodiscard]] std::size_t size() const { return n_; }
  [[nodiscard]] ProgramIndex optimal() const { return optimal_; }
  [[nodiscard]] std::span<const SparseRow> rows() const { return rows_; }
  [[nodiscard]] const SparseRow& row(ProgramIndex i) const { return rows_.at(i); }

  /// Sum of support sizes over all rows.
  [[nodiscard]] std::size_t total_support() const;

  friend bool operator==(const ProgramSpace&, const ProgramSpace&) = default;

 private:
  std::size_t n_ = 0;
  std::vector<SparseRow> rows_;
  ProgramIndex optimal_ = 0;
};

enum class ViolationKind {
  kEmptySpace,
  kRowCountMismatch,
  kLengthMismatch,
  kIndexOutOfRange,
  kUnsortedSupport,
  kBadWeight,
  kRowSum,
  kOptimalOutOfRange,
};

std::string_view to_string(ViolationKind kind);

struct Violation {
  ViolationKind kind;
  std::optional<std::size_t> row;
  std::string message;
};

struct ValidationReport {
  std::vector<Violation> violations;

  [[nodiscard]] bool ok() const { return violations.empty(); }
  [[nodiscard]] bool has(ViolationKind kind) const;
  /// One violation per line.
  [[nodiscard]] std::string describe() const;
};

/// Row sums must be within this distance of 1.
inline constexpr double kRowSumTolerance = 1e-9;

ValidationReport validate(const ProgramSpace& space);

/// Thrown by consumers that require a valid ProgramSpace.
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(ValidationReport report);
  [[nodiscard]] const ValidationReport& report() const { return report_; }

 private:
  ValidationReport report_;
};

/// Throws ValidationError unless validate(space) is ok.
void require_valid(const ProgramSpace& space);

/// The four-program worked example. Program 0 is optimal.
ProgramSpace worked_example();

/// How row weights are drawn once the support is fixed.
enum class WeightLaw {
  kFlatDirichlet,      // normalized unit exponentials: uniform on the simplex
  kNormalizedUniform,  // normalized U(0,1) draws
};

std::string_view to_string(WeightLaw law);
std::optional<WeightLaw> parse_weight_law(std::string_view name);

struct GenConfig {
  unsigned l = 1;  // n = 2^l
  unsigned support_min = 10;
  unsigned support_max = 100;
  std::uint64_t seed = 0;
  WeightLaw weights = WeightLaw::kFlatDirichlet;

  [[nodiscard]] std::size_t n() const { return std::size_t{1} << l; }
};

inline constexpr unsigned kMaxExponent = 30;

/// Random instance: row 0 uniform over all n programs; every other row has a
/// support of Uniform{support_min..support_max} programs (clamped to n) chosen
/// as a uniform subset, with weights drawn per cfg.weights. The optimal
/// program is uniform over 1..n-1. Deterministic in cfg.
///
/// Throws std::invalid_argument for l == 0, l > kMaxExponent, or bad support
/// bounds.
ProgramSpace generate_random_instance(const GenConfig& cfg);

}  // namespace rsi
