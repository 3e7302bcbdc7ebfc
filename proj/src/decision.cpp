// Copyright 2026 The Countermeasure DSS Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "dss/decision.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "dss/error.hpp"

namespace dss {

WeightVector::WeightVector(std::vector<double> k) : k_(std::move(k)) {
  if (k_.empty()) throw ValidationError("weights", "empty weight vector");
  double sum = 0.0;
  for (std::size_t i = 0; i < k_.size(); ++i) {
    if (!std::isfinite(k_[i]) || k_[i] < 0.0) {
      throw ValidationError("weights[" + std::to_string(i) + "]", "must be a nonnegative number");
    }
    sum += k_[i];
  }
  if (std::abs(sum - 1.0) > kSimplexTolerance) {
    throw ValidationError("weights", "must sum to 1 (got " + std::to_string(sum) + ")");
  }
}

WeightVector WeightVector::short_vs_long_term(double c) {
  if (!(c >= 0.0 && c <= 0.5)) throw DomainError("c must lie in [0, 0.5]");
  return WeightVector({c, c, 1.0 - 2.0 * c});
}

std::optional<WeightVector> weight_preset(std::string_view name) {
  if (name == "covid-only") return WeightVector({1.0, 0.0, 0.0});
  if (name == "covid-cancer") return WeightVector({0.5, 0.5, 0.0});
  if (name == "equal") return WeightVector({1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0});
  if (name == "custom-0.45") return WeightVector({0.45, 0.45, 0.1});
  return std::nullopt;
}

std::vector<std::string> weight_preset_names() {
  return {"covid-only", "covid-cancer", "equal", "custom-0.45"};
}

void AttributeVector::validate() const {
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!std::isfinite(a[i]) || a[i] < 0.0) {
      throw ValidationError("attributes[" + std::to_string(i) + "]", "must be nonnegative");
    }
  }
}

double expected_utility(const WeightVector& weights, const AttributeVector& attrs) {
  if (weights.size() != attrs.a.size()) {
    throw std::invalid_argument("weight/attribute dimension mismatch");
  }
  double score = 0.0;
  for (std::size_t i = 0; i < attrs.a.size(); ++i) {
    score += weights[i] * marginal_utility(attrs.a[i]);
  }
  return score;
}

ScoredStrategy score_strategy(const WeightVector& weights, const StrategyAttributes& row) {
  const auto& a = row.attributes.a;
  if (weights.size() != a.size()) {
    throw std::invalid_argument("weight/attribute dimension mismatch for " + row.strategy_id);
  }
  ScoredStrategy out{row.strategy_id, 0.0, std::vector<double>(a.size())};
  for (std::size_t i = 0; i < a.size(); ++i) {
    out.contributions[i] = weights[i] * marginal_utility(a[i]);
    out.score += out.contributions[i];
  }
  return out;
}

std::vector<ScoredStrategy> rank(const WeightVector& weights,
                                 std::span<const StrategyAttributes> table) {
  std::vector<ScoredStrategy> out;
  out.reserve(table.size());
  for (const auto& row : table) out.push_back(score_strategy(weights, row));
  std::sort(out.begin(), out.end(), [](const ScoredStrategy& l, const ScoredStrategy& r) {
    if (l.score != r.score) return l.score > r.score;
    return l.strategy_id < r.strategy_id;
  });
  return out;
}

std::vector<ParetoPoint> pareto_front(std::span<const ParetoPoint> points) {
  std::vector<ParetoPoint> sorted(points.begin(), points.end());
  std::sort(sorted.begin(), sorted.end(), [](const ParetoPoint& l, const ParetoPoint& r) {
    if (l.x != r.x) return l.x < r.x;
    if (l.y != r.y) return l.y < r.y;
    return l.id < r.id;
  });

  // Every lexicographically earlier point with y' <= y dominates, so a group of
  // coincident points survives iff all earlier points have larger y.
  std::vector<ParetoPoint> front;
  double min_y = std::numeric_limits<double>::infinity();
  std::size_t i = 0;
  while (i < sorted.size()) {
    std::size_t j = i;
    while (j < sorted.size() && sorted[j].x == sorted[i].x && sorted[j].y == sorted[i].y) ++j;
    if (sorted[i].y < min_y) {
      front.insert(front.end(), sorted.begin() + static_cast<std::ptrdiff_t>(i),
                   sorted.begin() + static_cast<std::ptrdiff_t>(j));
      min_y = sorted[i].y;
    }
    i = j;
  }
  return front;
}

std::optional<AxisGrouping> axis_grouping(std::string_view key) {
  if (key == kDefaultAxisGrouping) {
    return AxisGrouping{std::string(key), {kCovidAttribute, kCancerAttribute}, {kPovertyAttribute}};
  }
  if (key == "covid_vs_cancer") {
    return AxisGrouping{std::string(key), {kCovidAttribute}, {kCancerAttribute}};
  }
  if (key == "covid_vs_poverty") {
    return AxisGrouping{std::string(key), {kCovidAttribute}, {kPovertyAttribute}};
  }
  if (key == "cancer_vs_poverty") {
    return AxisGrouping{std::string(key), {kCancerAttribute}, {kPovertyAttribute}};
  }
  return std::nullopt;
}

std::vector<std::string> axis_grouping_keys() {
  return {std::string(kDefaultAxisGrouping), "covid_vs_cancer", "covid_vs_poverty",
          "cancer_vs_poverty"};
}

std::vector<ParetoPoint> group_points(std::span<const StrategyAttributes> table,
                                      const AxisGrouping& grouping) {
  std::vector<ParetoPoint> out;
  out.reserve(table.size());
  for (const auto& row : table) {
    ParetoPoint p{row.strategy_id, 0.0, 0.0};
    for (std::size_t i : grouping.x_attributes) p.x += row.attributes.a.at(i);
    for (std::size_t i : grouping.y_attributes) p.y += row.attributes.a.at(i);
    out.push_back(std::move(p));
  }
  return out;
}

namespace {

struct Best {
  double score = -std::numeric_limits<double>::infinity();
  const StrategyAttributes* row = nullptr;
};

// Highest score under k(c); ties resolved by id like `rank`.
Best best_of(std::span<const StrategyAttributes> set, const WeightVector& k) {
  Best best;
  for (const auto& row : set) {
    const double s = expected_utility(k, row.attributes);
    if (best.row == nullptr || s > best.score ||
        (s == best.score && row.strategy_id < best.row->strategy_id)) {
      best = {s, &row};
    }
  }
  return best;
}

int sign_of(double v) { return v > 0.0 ? 1 : (v < 0.0 ? -1 : 0); }

}  // namespace

double envelope_gap(std::span<const StrategyAttributes> lockdown,
                    std::span<const StrategyAttributes> non_lockdown, double c) {
  const WeightVector k = WeightVector::short_vs_long_term(c);
  return best_of(lockdown, k).score - best_of(non_lockdown, k).score;
}

CriticalWeightResult critical_weight(std::span<const StrategyAttributes> lockdown,
                                     std::span<const StrategyAttributes> non_lockdown,
                                     double tolerance) {
  if (lockdown.empty() || non_lockdown.empty()) {
    throw std::invalid_argument("critical_weight needs both strategy sets to be nonempty");
  }
  for (const auto* set : {&lockdown, &non_lockdown}) {
    for (const auto& row : *set) {
      if (row.attributes.a.size() != kAttributeCount) {
        throw std::invalid_argument("critical_weight needs 3 attributes per strategy");
      }
    }
  }
  auto gap = [&](double c) { return envelope_gap(lockdown, non_lockdown, c); };
  auto describe_at = [&](CriticalWeightResult& r, double c) {
    const WeightVector k = WeightVector::short_vs_long_term(c);
    r.best_lockdown = best_of(lockdown, k).row->strategy_id;
    r.best_non_lockdown = best_of(non_lockdown, k).row->strategy_id;
  };

  constexpr double kHalf = 0.5;
  constexpr int kGrid = 1000;
  CriticalWeightResult result;
  const int s_half = sign_of(gap(kHalf));

  // The envelopes are piecewise linear, so a zero at the grid points means
  // zero in between only up to the grid; good enough for "identical sets".
  bool all_zero = s_half == 0;
  for (int g = 0; all_zero && g <= kGrid; ++g) all_zero = sign_of(gap(kHalf * g / kGrid)) == 0;
  if (all_zero) {
    result.kind = CrossingKind::Degenerate;
    result.lower = 0.0;
    result.upper = kHalf;
    describe_at(result, kHalf);
    return result;
  }

  result.winner_at_half = s_half > 0 ? "lockdown" : (s_half < 0 ? "non_lockdown" : "");
  if (s_half == 0) {
    // Tie exactly at c = 0.5 with a strict winner below it.
    result.kind = CrossingKind::Crossing;
    result.c = result.lower = result.upper = kHalf;
    describe_at(result, kHalf);
    return result;
  }

  // Scan down from c = 0.5 for the crossing nearest to it.
  double hi = kHalf;
  double lo = -1.0;
  for (int g = kGrid - 1; g >= 0; --g) {
    const double c = kHalf * g / kGrid;
    if (sign_of(gap(c)) != s_half) {
      lo = c;
      break;
    }
    hi = c;
  }
  if (lo < 0.0) {
    result.kind = CrossingKind::NoCrossing;
    result.lower = 0.0;
    result.upper = kHalf;
    describe_at(result, kHalf);
    return result;
  }
  while (hi - lo > tolerance) {
    const double mid = 0.5 * (lo + hi);
    if (sign_of(gap(mid)) == s_half) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  result.kind = CrossingKind::Crossing;
  result.lower = lo;
  result.upper = hi;
  result.c = 0.5 * (lo + hi);
  result.ratio = importance_ratio(result.c);
  describe_at(result, result.c);
  return result;
}

double importance_ratio(double c) {
  if (!(c >= 0.0 && c < 0.5)) throw DomainError("importance ratio defined for c in [0, 0.5)");
  return c / (1.0 - 2.0 * c);
}

}  // namespace dss
