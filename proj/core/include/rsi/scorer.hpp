#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "rsi/instance.hpp"
#include "rsi/score.hpp"

namespace rsi {

/// Expected steps to the optimal program, one entry per program, plus the
/// order in which the entries were finalized.
struct ScoreTable {
  std::vector<Score> scores;
  std::vector<ProgramIndex> settle_order;

  [[nodiscard]] std::size_t size() const { return scores.size(); }
  friend bool operator==(const ScoreTable&, const ScoreTable&) = default;
};

/// 1-based position in ascending score order; ties broken by program index.
struct Rank {
  std::uint32_t value = 1;
  friend auto operator<=>(Rank, Rank) = default;
};

/// Expected steps to the settled set when every move goes into it: a / b, or
/// +infinity when b == 0. Here a = 1 + sum(q * S) and b = sum(q) over the
/// settled programs a row can generate.
Score tentative_value(double a, double b);

/// Incremental construction of the consistent score function.
///
/// The optimal program is settled on construction with score 0. Each step()
/// finalizes the unsettled program with the smallest tentative value (lowest
/// index on ties) and folds its score into the accumulators of the programs
/// that can generate it. Programs whose tentative value never becomes finite
/// keep score +infinity.
class SettlingScorer {
 public:
  /// Throws ValidationError if the space is invalid.
  explicit SettlingScorer(const ProgramSpace& space);

  /// Settles one more program; nullopt once every remaining key is infinite.
  std::optional<ProgramIndex> step();

  /// Runs step() to completion and returns the final table.
  ScoreTable run() &&;

  [[nodiscard]] bool done() const { return heap_.empty(); }

  /// Current tentative value of an unsettled program, or the final score of a
  /// settled one.
  [[nodiscard]] Score tentative(ProgramIndex i) const;

  /// Scores so far: settled programs finite, the rest +infinity.
  [[nodiscard]] std::span<const Score> scores() const { return scores_; }
  [[nodiscard]] std::span<const ProgramIndex> settle_order() const { return order_; }
  [[nodiscard]] bool is_settled(ProgramIndex i) const { return settled_[i] != 0; }

 private:
  struct Entry {
    double key;
    ProgramIndex index;
  };
  struct EntryGreater {
    bool operator()(const Entry& lhs, const Entry& rhs) const {
      if (lhs.key != rhs.key) return lhs.key > rhs.key;
      return lhs.index > rhs.index;
    }
  };

  void settle(ProgramIndex i, double score);
  void push(Entry entry);

  std::size_t n_;
  // Reverse adjacency in CSR form: for program i, the programs j with
  // q[j][i] > 0 and those probabilities.
  std::vector<std::size_t> rev_offset_;
  std::vector<ProgramIndex> rev_source_;
  std::vector<double> rev_prob_;

  std::vector<double> acc_a_;
  std::vector<double> acc_b_;
  std::vector<double> key_;  // last pushed key per program, +inf if none
  std::vector<char> settled_;
  std::vector<Score> scores_;
  std::vector<ProgramIndex> order_;
  std::vector<Entry> heap_;
  double last_settled_ = 0.0;
};

/// Consistent score function of the space; see SettlingScorer.
ScoreTable consistent_scores(const ProgramSpace& space);

/// Rank of every program under the table's scores.
std::vector<Rank> all_ranks(std::span<const Score> scores);

/// Rank of one program. Throws std::out_of_range for a bad index.
Rank rank_of(const ScoreTable& table, ProgramIndex i);

}  // namespace rsi
