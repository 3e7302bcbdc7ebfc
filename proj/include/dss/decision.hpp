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

#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace dss {

// Attribute order used throughout: a1 COVID-19 deaths, a2 delayed cancer
// diagnoses, a3 poverty. All in expected life-years lost.
inline constexpr std::size_t kAttributeCount = 3;
inline constexpr std::size_t kCovidAttribute = 0;
inline constexpr std::size_t kCancerAttribute = 1;
inline constexpr std::size_t kPovertyAttribute = 2;

/// Criterion weights on the probability simplex.
class WeightVector {
 public:
  static constexpr double kSimplexTolerance = 1e-9;

  /// Throws ValidationError("weights", ...) off the simplex.
  explicit WeightVector(std::vector<double> k);

  /// k(c) = (c, c, 1 - 2c) for c in [0, 0.5].
  static WeightVector short_vs_long_term(double c);

  std::span<const double> values() const noexcept { return k_; }
  std::size_t size() const noexcept { return k_.size(); }
  double operator[](std::size_t i) const { return k_[i]; }

 private:
  std::vector<double> k_;
};

/// The four criterion weightings compared in the standard analysis, by name:
/// "covid-only", "covid-cancer", "equal", "custom-0.45".
std::optional<WeightVector> weight_preset(std::string_view name);
std::vector<std::string> weight_preset_names();

struct AttributeVector {
  std::vector<double> a;

  void validate() const;  // a_i >= 0
  friend bool operator==(const AttributeVector&, const AttributeVector&) = default;
};

struct StrategyAttributes {
  std::string strategy_id;
  AttributeVector attributes;
  friend bool operator==(const StrategyAttributes&, const StrategyAttributes&) = default;
};

struct ScoredStrategy {
  std::string strategy_id;
  double score = 0.0;
  std::vector<double> contributions;  // k_i * U_i(a_i)
};

/// U_i(a) = -a. Nonlinear (risk-averse) marginals would replace this.
constexpr double marginal_utility(double life_years_lost) noexcept { return -life_years_lost; }

/// Sum_i k_i * U_i(a_i). Throws std::invalid_argument on dimension mismatch.
double expected_utility(const WeightVector& weights, const AttributeVector& attrs);

ScoredStrategy score_strategy(const WeightVector& weights, const StrategyAttributes& row);

/// Best (highest score) first; equal scores ordered by strategy id.
std::vector<ScoredStrategy> rank(const WeightVector& weights,
                                 std::span<const StrategyAttributes> table);

struct ParetoPoint {
  std::string id;
  double x = 0.0;
  double y = 0.0;
  friend bool operator==(const ParetoPoint&, const ParetoPoint&) = default;
};

/// True if `p` is at least as good in both coordinates and strictly better in
/// one (lower is better).
constexpr bool dominates(const ParetoPoint& p, const ParetoPoint& q) noexcept {
  return p.x <= q.x && p.y <= q.y && (p.x < q.x || p.y < q.y);
}

/// Non-dominated subset, sorted by x (then y, then id).
std::vector<ParetoPoint> pareto_front(std::span<const ParetoPoint> points);

/// Which attributes are summed onto each Pareto axis.
struct AxisGrouping {
  std::string key;
  std::vector<std::size_t> x_attributes;
  std::vector<std::size_t> y_attributes;
};

/// Known keys: "short-medium_vs_long" (default; a1+a2 vs a3), "covid_vs_cancer",
/// "covid_vs_poverty", "cancer_vs_poverty".
std::optional<AxisGrouping> axis_grouping(std::string_view key);
std::vector<std::string> axis_grouping_keys();
inline constexpr std::string_view kDefaultAxisGrouping = "short-medium_vs_long";

std::vector<ParetoPoint> group_points(std::span<const StrategyAttributes> table,
                                      const AxisGrouping& grouping);

enum class CrossingKind {
  Crossing,    // sign change located
  NoCrossing,  // one side wins on all of [0, 0.5]
  Degenerate,  // envelopes coincide on all of [0, 0.5]
};

struct CriticalWeightResult {
  CrossingKind kind = CrossingKind::NoCrossing;
  double c = 0.0;      // crossing point (Crossing only)
  double lower = 0.0;  // bracket; [0, 0.5] when Degenerate
  double upper = 0.0;
  std::optional<double> ratio;  // c / (1 - 2c)
  // Best strategy of each set at c (or at 0.5 when there is no crossing).
  std::string best_lockdown;
  std::string best_non_lockdown;
  // Which set wins with the weight fully on the short/medium-term attributes
  // (c = 0.5); empty when degenerate.
  std::string winner_at_half;
};

inline constexpr double kCriticalWeightTolerance = 1e-6;

/// Best-of-set score difference at c: max over `lockdown` minus max over
/// `non_lockdown` of expected_utility(k(c), a).
double envelope_gap(std::span<const StrategyAttributes> lockdown,
                    std::span<const StrategyAttributes> non_lockdown, double c);

/// The weight c in k(c) = (c, c, 1 - 2c) at which the best lockdown and best
/// non-lockdown strategies swap, located by bisection on `envelope_gap` to
/// `tolerance`. Throws std::invalid_argument if either set is empty.
CriticalWeightResult critical_weight(std::span<const StrategyAttributes> lockdown,
                                     std::span<const StrategyAttributes> non_lockdown,
                                     double tolerance = kCriticalWeightTolerance);

/// c / (1 - 2c): how many times more the short/medium-term attributes weigh
/// than the long-term one. Throws DomainError at c >= 0.5 or c < 0.
double importance_ratio(double c);

}  // namespace dss
