#include "rsi/instance.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <utility>

#include "rsi/rng.hpp"

namespace rsi {

ProgramSpace::ProgramSpace(std::size_t n, std::vector<SparseRow> rows,
                           ProgramIndex optimal)
    : n_(n), rows_(std::move(rows)), optimal_(optimal) {}

ProgramSpace ProgramSpace::from_dense(const std::vector<std::vector<double>>& rows,
                                      ProgramIndex optimal) {
  std::vector<SparseRow> sparse;
  sparse.reserve(rows.size());
  for (const auto& dense : rows) {
    SparseRow row;
    for (std::size_t j = 0; j < dense.size(); ++j) {
      if (dense[j] != 0.0) {
        row.support.push_back(static_cast<ProgramIndex>(j));
        row.weights.push_back(dense[j]);
      }
    }
    sparse.push_back(std::move(row));
  }
  const std::size_t n = rows.size();
  return ProgramSpace(n, std::move(sparse), optimal);
}

std::size_t ProgramSpace::total_support() const {
  std::size_t m = 0;
  for (const auto& row : rows_) m += row.size();
  return m;
}

std::string_view to_string(ViolationKind kind) {
  switch (kind) {
    case ViolationKind::kEmptySpace: return "empty space";
    case ViolationKind::kRowCountMismatch: return "row count != n";
    case ViolationKind::kLengthMismatch: return "support/weights length mismatch";
    case ViolationKind::kIndexOutOfRange: return "index out of range";
    case ViolationKind::kUnsortedSupport: return "support not sorted/distinct";
    case ViolationKind::kBadWeight: return "weight negative or not finite";
    case ViolationKind::kRowSum: return "row sum != 1";
    case ViolationKind::kOptimalOutOfRange: return "optimal out of range";
  }
  return "unknown";
}

bool ValidationReport::has(ViolationKind kind) const {
  return std::any_of(violations.begin(), violations.end(),
                     [kind](const Violation& v) { return v.kind == kind; });
}

std::string ValidationReport::describe() const {
  std::ostringstream os;
  for (const auto& v : violations) {
    if (v.row) os << "row " << *v.row << ": ";
    os << to_string(v.kind);
    if (!v.message.empty()) os << " (" << v.message << ")";
    os << '\n';
  }
  return os.str();
}

ValidationReport validate(const ProgramSpace& space) {
  ValidationReport report;
  auto add = [&](ViolationKind kind, std::optional<std::size_t> row, std::string msg) {
    report.violations.push_back({kind, row, std::move(msg)});
  };

  const std::size_t n = space.size();
  if (n == 0) add(ViolationKind::kEmptySpace, std::nullopt, "n = 0");
  if (space.rows().size() != n) {
    add(ViolationKind::kRowCountMismatch, std::nullopt,
        "n = " + std::to_string(n) + ", rows = " + std::to_string(space.rows().size()));
  }
  if (space.optimal() >= n) {
    add(ViolationKind::kOptimalOutOfRange, std::nullopt,
        "optimal = " + std::to_string(space.optimal()) + ", n = " + std::to_string(n));
  }

  for (std::size_t i = 0; i < space.rows().size(); ++i) {
    const SparseRow& row = space.rows()[i];
    if (row.support.size() != row.weights.size()) {
      add(ViolationKind::kLengthMismatch, i,
          std::to_string(row.support.size()) + " indices, " +
              std::to_string(row.weights.size()) + " weights");
      continue;
    }
    bool sorted = true;
    for (std::size_t k = 0; k < row.size(); ++k) {
      if (row.support[k] >= n) {
        add(ViolationKind::kIndexOutOfRange, i,
            "index " + std::to_string(row.support[k]));
      }
      if (k > 0 && row.support[k] <= row.support[k - 1]) sorted = false;
    }
    if (!sorted) add(ViolationKind::kUnsortedSupport, i, {});

    double sum = 0.0;
    bool weights_ok = true;
    for (double w : row.weights) {
      if (!std::isfinite(w) || w < 0.0) weights_ok = false;
      sum += w;
    }
    if (!weights_ok) {
      add(ViolationKind::kBadWeight, i, {});
    } else if (std::abs(sum - 1.0) > kRowSumTolerance) {
      std::ostringstream os;
      os.precision(17);
      os << "sum = " << sum;
      add(ViolationKind::kRowSum, i, os.str());
    }
  }
  return report;
}

ValidationError::ValidationError(ValidationReport report)
    : std::runtime_error("invalid program space:\n" + report.describe()),
      report_(std::move(report)) {}

void require_valid(const ProgramSpace& space) {
  auto report = validate(space);
  if (!report.ok()) throw ValidationError(std::move(report));
}

ProgramSpace worked_example() {
  return ProgramSpace::from_dense({{0.97, 0.01, 0.01, 0.01},
                                   {0.75, 0.0, 0.25, 0.0},
                                   {0.25, 0.25, 0.25, 0.25},
                                   {0.0, 0.58, 0.0, 0.42}},
                                  0);
}

std::string_view to_string(WeightLaw law) {
  switch (law) {
    case WeightLaw::kFlatDirichlet: return "flat_dirichlet";
    case WeightLaw::kNormalizedUniform: return "normalized_uniform";
  }
  return "unknown";
}

std::optional<WeightLaw> parse_weight_law(std::string_view name) {
  if (name == "flat_dirichlet") return WeightLaw::kFlatDirichlet;
  if (name == "normalized_uniform") return WeightLaw::kNormalizedUniform;
  return std::nullopt;
}

namespace {

// Floyd's algorithm: a uniform k-subset of {0..n-1}, returned sorted.
std::vector<ProgramIndex> sample_subset(std::size_t n, std::size_t k, Engine& rng) {
  std::vector<ProgramIndex> chosen;
  chosen.reserve(k);
  for (std::size_t j = n - k; j < n; ++j) {
    std::uniform_int_distribution<std::size_t> pick(0, j);
    const auto t = static_cast<ProgramIndex>(pick(rng));
    if (std::find(chosen.begin(), chosen.end(), t) == chosen.end()) {
      chosen.push_back(t);
    } else {
      chosen.push_back(static_cast<ProgramIndex>(j));
    }
  }
  std::sort(chosen.begin(), chosen.end());
  return chosen;
}

std::vector<double> sample_weights(std::size_t k, WeightLaw law, Engine& rng) {
  std::vector<double> w(k);
  double sum = 0.0;
  while (sum <= 0.0) {
    sum = 0.0;
    if (law == WeightLaw::kFlatDirichlet) {
      std::exponential_distribution<double> draw(1.0);
      for (auto& x : w) sum += (x = draw(rng));
    } else {
      std::uniform_real_distribution<double> draw(0.0, 1.0);
      for (auto& x : w) sum += (x = draw(rng));
    }
  }
  for (auto& x : w) x /= sum;
  return w;
}

}  // namespace

ProgramSpace generate_random_instance(const GenConfig& cfg) {
  if (cfg.l == 0) {
    throw std::invalid_argument("generate_random_instance: l must be >= 1 (n >= 2)");
  }
  if (cfg.l > kMaxExponent) {
    throw std::invalid_argument("generate_random_instance: l must be <= " +
                                std::to_string(kMaxExponent));
  }
  if (cfg.support_min < 1 || cfg.support_min > cfg.support_max) {
    throw std::invalid_argument(
        "generate_random_instance: need 1 <= support_min <= support_max");
  }

  const std::size_t n = cfg.n();
  Engine rng = make_engine(cfg.seed);

  std::vector<SparseRow> rows(n);
  {
    SparseRow& uniform = rows[0];
    uniform.support.resize(n);
    for (std::size_t j = 0; j < n; ++j) uniform.support[j] = static_cast<ProgramIndex>(j);
    uniform.weights.assign(n, 1.0 / static_cast<double>(n));
  }

  std::uniform_int_distribution<unsigned> support_size(cfg.support_min, cfg.support_max);
  for (std::size_t i = 1; i < n; ++i) {
    const std::size_t k = std::min<std::size_t>(support_size(rng), n);
    rows[i].support = sample_subset(n, k, rng);
    rows[i].weights = sample_weights(k, cfg.weights, rng);
  }

  std::uniform_int_distribution<std::size_t> pick_optimal(1, n - 1);
  const auto optimal = static_cast<ProgramIndex>(pick_optimal(rng));
  return ProgramSpace(n, std::move(rows), optimal);
}

}  // namespace rsi
