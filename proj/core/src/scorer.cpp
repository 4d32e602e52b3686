#include "rsi/scorer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>

namespace rsi {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
// Keys may only decrease; allow this much relative rounding slack.
constexpr double kKeyIncreaseSlack = 1e-12;
}  // namespace

Score tentative_value(double a, double b) {
  if (b <= 0.0) return Score::infinity();
  return Score::finite(a / b);
}

SettlingScorer::SettlingScorer(const ProgramSpace& space) : n_(space.size()) {
  require_valid(space);

  rev_offset_.assign(n_ + 1, 0);
  for (const auto& row : space.rows()) {
    for (std::size_t k = 0; k < row.size(); ++k) {
      if (row.weights[k] > 0.0) ++rev_offset_[row.support[k] + 1];
    }
  }
  std::partial_sum(rev_offset_.begin(), rev_offset_.end(), rev_offset_.begin());
  rev_source_.resize(rev_offset_.back());
  rev_prob_.resize(rev_offset_.back());
  {
    std::vector<std::size_t> cursor(rev_offset_.begin(), rev_offset_.end() - 1);
    for (std::size_t j = 0; j < n_; ++j) {
      const SparseRow& row = space.rows()[j];
      for (std::size_t k = 0; k < row.size(); ++k) {
        if (row.weights[k] <= 0.0) continue;
        const std::size_t slot = cursor[row.support[k]]++;
        rev_source_[slot] = static_cast<ProgramIndex>(j);
        rev_prob_[slot] = row.weights[k];
      }
    }
  }

  acc_a_.assign(n_, 1.0);
  acc_b_.assign(n_, 0.0);
  key_.assign(n_, kInf);
  settled_.assign(n_, 0);
  scores_.assign(n_, Score::infinity());
  order_.reserve(n_);

  settle(space.optimal(), 0.0);
}

void SettlingScorer::push(Entry entry) {
  heap_.push_back(entry);
  std::push_heap(heap_.begin(), heap_.end(), EntryGreater{});
}

void SettlingScorer::settle(ProgramIndex i, double score) {
  settled_[i] = 1;
  scores_[i] = Score::finite(score);
  order_.push_back(i);
  last_settled_ = score;

  for (std::size_t e = rev_offset_[i]; e < rev_offset_[i + 1]; ++e) {
    const ProgramIndex j = rev_source_[e];
    if (settled_[j]) continue;
    const double q = rev_prob_[e];
    acc_a_[j] += q * score;
    acc_b_[j] += q;
    // Mathematically the new key is >= score (the settle order is
    // nondecreasing); clamping removes rounding below it.
    const double key = std::max(acc_a_[j] / acc_b_[j], score);
    if (key > key_[j] * (1.0 + kKeyIncreaseSlack)) {
      throw std::logic_error("SettlingScorer: tentative key increased for program " +
                             std::to_string(j));
    }
    if (key < key_[j]) {
      key_[j] = key;
      push({key, j});
    }
  }
}

std::optional<ProgramIndex> SettlingScorer::step() {
  while (!heap_.empty()) {
    std::pop_heap(heap_.begin(), heap_.end(), EntryGreater{});
    const Entry top = heap_.back();
    heap_.pop_back();
    if (settled_[top.index] || top.key != key_[top.index]) continue;  // stale
    settle(top.index, top.key);
    return top.index;
  }
  return std::nullopt;
}

ScoreTable SettlingScorer::run() && {
  while (step()) {
  }
  return ScoreTable{std::move(scores_), std::move(order_)};
}

Score SettlingScorer::tentative(ProgramIndex i) const {
  if (i >= n_) throw std::out_of_range("SettlingScorer::tentative: index out of range");
  if (settled_[i]) return scores_[i];
  return tentative_value(acc_a_[i], acc_b_[i]);
}

ScoreTable consistent_scores(const ProgramSpace& space) {
  return SettlingScorer(space).run();
}

std::vector<Rank> all_ranks(std::span<const Score> scores) {
  std::vector<ProgramIndex> order(scores.size());
  std::iota(order.begin(), order.end(), ProgramIndex{0});
  std::stable_sort(order.begin(), order.end(), [&](ProgramIndex a, ProgramIndex b) {
    return scores[a] < scores[b];
  });
  std::vector<Rank> ranks(scores.size());
  for (std::size_t pos = 0; pos < order.size(); ++pos) {
    ranks[order[pos]] = Rank{static_cast<std::uint32_t>(pos + 1)};
  }
  return ranks;
}

Rank rank_of(const ScoreTable& table, ProgramIndex i) {
  if (i >= table.scores.size()) throw std::out_of_range("rank_of: index out of range");
  const Score s = table.scores[i];
  std::uint32_t rank = 1;
  for (std::size_t j = 0; j < table.scores.size(); ++j) {
    const Score t = table.scores[j];
    if (t < s || (t == s && j < i)) ++rank;
  }
  return Rank{rank};
}

}  // namespace rsi
