#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "rsi/instance.hpp"
#include "rsi/scorer.hpp"

namespace rsi {

struct Transition {
  ProgramIndex dest;
  double prob;
  friend bool operator==(const Transition&, const Transition&) = default;
};

/// Sparse row-stochastic chain of the accept-if-strictly-better process.
///
/// Each row lists its destinations ascending, self-loop included. The
/// absorbing state's row is {(absorbing, 1)}.
struct TransitionMatrix {
  std::size_t n = 0;
  std::vector<std::vector<Transition>> rows;
  ProgramIndex absorbing = 0;

  [[nodiscard]] double prob(ProgramIndex from, ProgramIndex to) const;
  [[nodiscard]] std::vector<std::vector<double>> dense() const;
};

/// Chain induced by a (possibly intermediate) score vector: i moves to j with
/// probability q[i][j] when scores[j] < scores[i]; every non-improving draw
/// stays at i, so the self-loop mass is the sum of those weights.
///
/// Throws std::invalid_argument on a length mismatch and ValidationError on an
/// invalid space.
TransitionMatrix build_transition(const ProgramSpace& space, std::span<const Score> scores);
TransitionMatrix build_transition(const ProgramSpace& space, const ScoreTable& table);

class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct HittingTimeOptions {
  std::size_t direct_limit = 2048;  // dense LU at or below this many unknowns
  double tolerance = 1e-12;         // max residual for the iterative sweep
  std::size_t max_sweeps = 200000;
};

/// Expected steps to reach `target` from every state of the chain.
///
/// States that reach the target with probability < 1 get +infinity. The
/// solver only reads the chain, never a score table, which makes it usable as
/// an independent check of the scorer.
std::vector<Score> hitting_times_exact(const TransitionMatrix& chain, ProgramIndex target,
                                       const HittingTimeOptions& options = {});

enum class ConsistencyCheck {
  kShape,        // table size, optimal score, settle_order structure
  kFixedPoint,   // score != hitting time of the chain it induces
  kOrder,        // score order disagrees with hitting-time order
  kSettleOrder,  // scores along settle_order decrease somewhere
};

std::string_view to_string(ConsistencyCheck check);

struct ConsistencyViolation {
  ConsistencyCheck check;
  std::string message;
};

struct ConsistencyReport {
  std::vector<ConsistencyViolation> violations;
  std::vector<Score> hitting_times;

  [[nodiscard]] bool ok() const { return violations.empty(); }
  [[nodiscard]] bool has(ConsistencyCheck check) const;
  [[nodiscard]] std::string describe() const;
};

inline constexpr double kConsistencyTolerance = 1e-8;

/// Rebuilds the chain the table induces, solves it exactly, and compares.
ConsistencyReport check_consistency(const ProgramSpace& space, const ScoreTable& table,
                                    const HittingTimeOptions& options = {});

/// Edge list "source,dest,prob" with a header row.
void write_edge_csv(std::ostream& os, const TransitionMatrix& chain);

}  // namespace rsi
