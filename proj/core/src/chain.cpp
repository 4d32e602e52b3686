#include "rsi/chain.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <deque>
#include <optional>
#include <ostream>
#include <sstream>

namespace rsi {

double TransitionMatrix::prob(ProgramIndex from, ProgramIndex to) const {
  for (const Transition& t : rows.at(from)) {
    if (t.dest == to) return t.prob;
  }
  return 0.0;
}

std::vector<std::vector<double>> TransitionMatrix::dense() const {
  std::vector<std::vector<double>> out(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (const Transition& t : rows[i]) out[i][t.dest] = t.prob;
  }
  return out;
}

TransitionMatrix build_transition(const ProgramSpace& space, std::span<const Score> scores) {
  require_valid(space);
  const std::size_t n = space.size();
  if (scores.size() != n) {
    throw std::invalid_argument("build_transition: " + std::to_string(scores.size()) +
                                " scores for " + std::to_string(n) + " programs");
  }

  TransitionMatrix chain;
  chain.n = n;
  chain.absorbing = space.optimal();
  chain.rows.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto& out = chain.rows[i];
    if (i == chain.absorbing) {
      out.push_back({static_cast<ProgramIndex>(i), 1.0});
      continue;
    }
    const SparseRow& row = space.rows()[i];
    double stay = 0.0;
    for (std::size_t k = 0; k < row.size(); ++k) {
      const ProgramIndex j = row.support[k];
      if (j != i && scores[j] < scores[i]) {
        out.push_back({j, row.weights[k]});
      } else {
        stay += row.weights[k];
      }
    }
    if (stay > 0.0) {
      const auto self = static_cast<ProgramIndex>(i);
      auto pos = std::lower_bound(out.begin(), out.end(), self,
                                  [](const Transition& t, ProgramIndex d) { return t.dest < d; });
      out.insert(pos, Transition{self, stay});
    }
  }
  return chain;
}

TransitionMatrix build_transition(const ProgramSpace& space, const ScoreTable& table) {
  return build_transition(space, table.scores);
}

namespace {

using Adjacency = std::vector<std::vector<ProgramIndex>>;

Adjacency reverse_edges(const TransitionMatrix& chain) {
  Adjacency rev(chain.n);
  for (std::size_t i = 0; i < chain.n; ++i) {
    for (const Transition& t : chain.rows[i]) {
      if (t.dest != i && t.prob > 0.0) rev[t.dest].push_back(static_cast<ProgramIndex>(i));
    }
  }
  return rev;
}

// Breadth-first search over reversed edges; returns the visit order.
std::vector<ProgramIndex> reverse_reach(const Adjacency& rev,
                                        const std::vector<ProgramIndex>& sources,
                                        std::vector<char>& mark) {
  std::vector<ProgramIndex> order;
  std::deque<ProgramIndex> queue;
  for (ProgramIndex s : sources) {
    if (!mark[s]) {
      mark[s] = 1;
      queue.push_back(s);
    }
  }
  while (!queue.empty()) {
    const ProgramIndex v = queue.front();
    queue.pop_front();
    order.push_back(v);
    for (ProgramIndex u : rev[v]) {
      if (!mark[u]) {
        mark[u] = 1;
        queue.push_back(u);
      }
    }
  }
  return order;
}

void solve_direct(const TransitionMatrix& chain, const std::vector<ProgramIndex>& unknowns,
                  const std::vector<std::ptrdiff_t>& slot, std::vector<double>& h) {
  const auto size = static_cast<Eigen::Index>(unknowns.size());
  Eigen::MatrixXd a = Eigen::MatrixXd::Identity(size, size);
  for (Eigen::Index r = 0; r < size; ++r) {
    for (const Transition& t : chain.rows[unknowns[r]]) {
      const std::ptrdiff_t c = slot[t.dest];
      if (c >= 0) a(r, c) -= t.prob;
    }
  }
  const Eigen::VectorXd rhs = Eigen::VectorXd::Ones(size);
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(a);
  const Eigen::VectorXd x = lu.solve(rhs);
  const double residual = (a * x - rhs).lpNorm<Eigen::Infinity>();
  if (!x.allFinite() || !(residual <= 1e-8 * std::max(1.0, x.lpNorm<Eigen::Infinity>()))) {
    throw SolverError("hitting_times_exact: singular hitting-time system");
  }
  for (Eigen::Index r = 0; r < size; ++r) h[unknowns[r]] = x(r);
}

void solve_iterative(const TransitionMatrix& chain, const std::vector<ProgramIndex>& unknowns,
                     const HittingTimeOptions& options, std::vector<double>& h) {
  std::vector<double> leave(chain.n, 0.0);
  for (ProgramIndex i : unknowns) {
    for (const Transition& t : chain.rows[i]) {
      if (t.dest != i) leave[i] += t.prob;
    }
  }
  for (std::size_t sweep = 0; sweep < options.max_sweeps; ++sweep) {
    double worst = 0.0;
    for (ProgramIndex i : unknowns) {
      double acc = 1.0;
      double self = 0.0;
      for (const Transition& t : chain.rows[i]) {
        if (t.dest == i) {
          self = t.prob;
        } else {
          acc += t.prob * h[t.dest];
        }
      }
      const double residual = std::abs(acc + self * h[i] - h[i]);
      worst = std::max(worst, residual / std::max(1.0, std::abs(h[i])));
      h[i] = acc / leave[i];
    }
    if (worst < options.tolerance) return;
  }
  throw SolverError("hitting_times_exact: iteration cap exceeded");
}

}  // namespace

std::vector<Score> hitting_times_exact(const TransitionMatrix& chain, ProgramIndex target,
                                       const HittingTimeOptions& options) {
  if (target >= chain.n || target != chain.absorbing) {
    throw std::invalid_argument("hitting_times_exact: target must be the absorbing state");
  }
  const Adjacency rev = reverse_edges(chain);

  std::vector<char> reaches(chain.n, 0);
  const std::vector<ProgramIndex> bfs = reverse_reach(rev, {target}, reaches);

  // A state reaching any non-reaching state may never absorb.
  std::vector<ProgramIndex> stuck;
  for (std::size_t i = 0; i < chain.n; ++i) {
    if (!reaches[i]) stuck.push_back(static_cast<ProgramIndex>(i));
  }
  std::vector<char> doomed(chain.n, 0);
  reverse_reach(rev, stuck, doomed);

  std::vector<ProgramIndex> unknowns;
  std::vector<std::ptrdiff_t> slot(chain.n, -1);
  for (ProgramIndex v : bfs) {
    if (v == target || doomed[v]) continue;
    slot[v] = static_cast<std::ptrdiff_t>(unknowns.size());
    unknowns.push_back(v);
  }

  std::vector<double> h(chain.n, 0.0);
  if (!unknowns.empty()) {
    if (unknowns.size() <= options.direct_limit) {
      solve_direct(chain, unknowns, slot, h);
    } else {
      solve_iterative(chain, unknowns, options, h);
    }
  }

  std::vector<Score> out(chain.n, Score::infinity());
  out[target] = Score::finite(0.0);
  for (ProgramIndex v : unknowns) out[v] = Score::finite(h[v]);
  return out;
}

std::string_view to_string(ConsistencyCheck check) {
  switch (check) {
    case ConsistencyCheck::kShape: return "shape";
    case ConsistencyCheck::kFixedPoint: return "fixed point";
    case ConsistencyCheck::kOrder: return "order";
    case ConsistencyCheck::kSettleOrder: return "settle order";
  }
  return "unknown";
}

bool ConsistencyReport::has(ConsistencyCheck check) const {
  return std::any_of(violations.begin(), violations.end(),
                     [check](const ConsistencyViolation& v) { return v.check == check; });
}

std::string ConsistencyReport::describe() const {
  std::ostringstream os;
  for (const auto& v : violations) os << to_string(v.check) << ": " << v.message << '\n';
  return os.str();
}

namespace {

bool close(double value, double reference) {
  return std::abs(value - reference) <= kConsistencyTolerance * std::max(1.0, std::abs(reference));
}

}  // namespace

ConsistencyReport check_consistency(const ProgramSpace& space, const ScoreTable& table,
                                    const HittingTimeOptions& options) {
  ConsistencyReport report;
  auto add = [&](ConsistencyCheck check, std::string message) {
    report.violations.push_back({check, std::move(message)});
  };

  const auto valid = validate(space);
  if (!valid.ok()) {
    add(ConsistencyCheck::kShape, "invalid program space: " + valid.describe());
    return report;
  }
  const std::size_t n = space.size();
  if (table.scores.size() != n) {
    add(ConsistencyCheck::kShape, std::to_string(table.scores.size()) + " scores for " +
                                      std::to_string(n) + " programs");
    return report;
  }
  const ProgramIndex optimal = space.optimal();
  if (table.scores[optimal] != Score::finite(0.0)) {
    add(ConsistencyCheck::kShape, "optimal program has score " + to_string(table.scores[optimal]));
  }

  std::vector<char> listed(n, 0);
  for (std::size_t k = 0; k < table.settle_order.size(); ++k) {
    const ProgramIndex i = table.settle_order[k];
    if (i >= n || listed[i]) {
      add(ConsistencyCheck::kShape, "settle_order entry " + std::to_string(k) + " invalid");
      return report;
    }
    listed[i] = 1;
  }
  if (table.settle_order.empty() || table.settle_order.front() != optimal) {
    add(ConsistencyCheck::kShape, "settle_order does not start with the optimal program");
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (static_cast<bool>(listed[i]) != table.scores[i].is_finite()) {
      add(ConsistencyCheck::kShape, "program " + std::to_string(i) +
                                        (listed[i] ? " settled with infinite score"
                                                   : " unsettled with finite score"));
    }
  }
  for (std::size_t k = 1; k < table.settle_order.size(); ++k) {
    const Score prev = table.scores[table.settle_order[k - 1]];
    const Score cur = table.scores[table.settle_order[k]];
    if (cur < prev) {
      add(ConsistencyCheck::kSettleOrder, "position " + std::to_string(k) + ": " +
                                              to_string(cur) + " < " + to_string(prev));
    }
  }

  const TransitionMatrix chain = build_transition(space, table);
  report.hitting_times = hitting_times_exact(chain, optimal, options);
  const auto& h = report.hitting_times;

  for (std::size_t i = 0; i < n; ++i) {
    const Score s = table.scores[i];
    bool mismatch = false;
    if (s.is_finite() != h[i].is_finite()) {
      mismatch = true;
    } else if (s.is_finite()) {
      mismatch = !close(s.value(), h[i].value());
    }
    if (mismatch) {
      add(ConsistencyCheck::kFixedPoint, "program " + std::to_string(i) + ": score " +
                                             to_string(s) + ", hitting time " + to_string(h[i]));
    }
  }

  // Whenever S(p) > S(p'), the hitting time from p must not fall below the
  // one from p' by more than the tolerance.
  std::vector<ProgramIndex> by_score(n);
  for (std::size_t i = 0; i < n; ++i) by_score[i] = static_cast<ProgramIndex>(i);
  std::stable_sort(by_score.begin(), by_score.end(), [&](ProgramIndex a, ProgramIndex b) {
    return table.scores[a] < table.scores[b];
  });
  std::optional<Score> slowest_below;  // max hitting time over strictly lower scores
  std::size_t group_begin = 0;
  while (group_begin < n) {
    std::size_t group_end = group_begin + 1;
    while (group_end < n && table.scores[by_score[group_end]] == table.scores[by_score[group_begin]]) {
      ++group_end;
    }
    Score group_slowest = Score::finite(0.0);
    for (std::size_t k = group_begin; k < group_end; ++k) {
      const ProgramIndex i = by_score[k];
      group_slowest = std::max(group_slowest, h[i]);
      if (!slowest_below || h[i].is_infinite()) continue;
      const bool faster = slowest_below->is_infinite() ||
                          (h[i].value() < slowest_below->value() &&
                           !close(h[i].value(), slowest_below->value()));
      if (faster) {
        add(ConsistencyCheck::kOrder, "program " + std::to_string(i) + " (score " +
                                          to_string(table.scores[i]) + ", hitting time " +
                                          to_string(h[i]) + ") beats a lower-scored program (" +
                                          to_string(*slowest_below) + ")");
      }
    }
    slowest_below = slowest_below ? std::max(*slowest_below, group_slowest) : group_slowest;
    group_begin = group_end;
  }
  return report;
}

void write_edge_csv(std::ostream& os, const TransitionMatrix& chain) {
  os << "source,dest,prob\n";
  char buf[32];
  for (std::size_t i = 0; i < chain.rows.size(); ++i) {
    for (const Transition& t : chain.rows[i]) {
      std::snprintf(buf, sizeof buf, "%.17g", t.prob);
      os << i << ',' << t.dest << ',' << buf << '\n';
    }
  }
}

}  // namespace rsi
