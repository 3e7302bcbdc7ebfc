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

#include <doctest.h>

#include <cmath>

#include "dss/epi_core.hpp"
#include "support.hpp"

using namespace dss;

namespace {

// P(removed within w days) for a constant daily removal probability x.
double removed_within(double x, int w) {
  double sum = 0.0;
  for (int t = 0; t < w; ++t) sum += x * std::pow(1.0 - x, t);
  return sum;
}

// Sum_t lambda (1 - gamma - lambda)^t, truncated once the tail is negligible.
double death_probability(double gamma, double lambda) {
  double sum = 0.0, survive = 1.0;
  for (int t = 0; t < 100000 && survive > 1e-18; ++t) {
    sum += lambda * survive;
    survive *= 1.0 - gamma - lambda;
  }
  return sum;
}

EpiRates one_cell_rates(double beta, double gamma, double lambda) {
  EpiRates r;
  r.gamma = {gamma};
  r.lambda = {lambda};
  r.p = beta;
  r.contacts = {std::vector<double>{1.0}, std::vector<double>{1.0}, std::vector<double>{1.0}};
  return r;
}

}  // namespace

TEST_CASE("calibrate_removal_rate closed form and geometric series") {
  CHECK(std::abs(calibrate_removal_rate(28, 0.05) - 0.101466) <= 1e-6);
  CHECK(calibrate_removal_rate(1, 0.5) == 0.5);
  const double x14 = calibrate_removal_rate(14, 0.05);
  // 1 - 0.05^(1/14) = 0.1926362...
  CHECK(std::abs(x14 - 0.192636) <= 1e-6);
  CHECK(std::abs(removed_within(x14, 14) - 0.95) <= 1e-12);
  CHECK(std::abs(removed_within(calibrate_removal_rate(28, 0.05), 28) - 0.95) <= 1e-12);
}

TEST_CASE("calibrate_removal_rate rejects bad inputs") {
  CHECK_THROWS_AS(calibrate_removal_rate(0, 0.05), DomainError);
  CHECK_THROWS_AS(calibrate_removal_rate(28, 0.0), DomainError);
  CHECK_THROWS_AS(calibrate_removal_rate(28, 1.0), DomainError);
}

TEST_CASE("split_rates examples") {
  const auto z = split_rates(0.0, 0.101466);
  CHECK(z.gamma == 0.101466);
  CHECK(z.lambda == 0.0);
  const auto s = split_rates(0.093, 0.101466);
  CHECK(std::abs(s.gamma - 0.092030) <= 1e-6);
  CHECK(std::abs(s.lambda - 0.009436) <= 1e-6);
  CHECK(std::abs(death_probability(s.gamma, s.lambda) - 0.093) <= 1e-12);
  const auto h = split_rates(0.5, 0.2);
  CHECK(h.gamma == doctest::Approx(0.1));
  CHECK(h.lambda == doctest::Approx(0.1));
  CHECK_THROWS_AS(split_rates(1.0, 0.1), DomainError);
  CHECK_THROWS_AS(split_rates(0.1, 0.0), DomainError);
}

TEST_CASE("split_rates recovers the fatality ratio") {
  dss_test::Gen g(11);
  const double total = calibrate_removal_rate(28, 0.05);
  for (int k = 0; k < 1000; ++k) {
    const double ifr = g.uniform(0.0, 0.999);
    const auto s = split_rates(ifr, total);
    CHECK(s.lambda / (s.gamma + s.lambda) == doctest::Approx(ifr).epsilon(1e-15));
    CHECK(s.gamma >= 0.0);
  }
}

TEST_CASE("calibrate_transmission_probability examples") {
  CalibrationInputs in;
  in.ifr = {0.01};
  in.population_weights = {1000};
  in.baseline_contacts = {10};
  in.r0 = 2.79;
  CHECK(calibrate_transmission_probability(in, 0.1) == doctest::Approx(0.0279).epsilon(1e-12));
  in.baseline_contacts = {1};
  in.r0 = 1.0;
  CHECK(calibrate_transmission_probability(in, 1.0) == doctest::Approx(1.0).epsilon(1e-12));
  in.baseline_contacts = {0};
  CHECK_THROWS_AS(calibrate_transmission_probability(in, 0.1), DomainError);
}

TEST_CASE("calibrate_transmission_probability matches a truncated-sum oracle") {
  dss_test::Gen g(5);
  for (int k = 0; k < 50; ++k) {
    CalibrationInputs in;
    const std::size_t ages = static_cast<std::size_t>(g.integer(1, 7));
    in.ifr = g.vec(ages, 0.0, 0.1);
    in.population_weights = g.vec(ages, 1e3, 1e7);
    in.baseline_contacts = g.vec(ages, 1.0, 20.0);
    in.r0 = g.uniform(0.5, 4.0);
    const double total = g.uniform(0.05, 0.5);
    // R0 = p * sum_a n_a c_a sum_t (1 - total)^t / sum_a n_a
    double num = 0.0, den = 0.0;
    for (std::size_t a = 0; a < ages; ++a) {
      double series = 0.0, term = 1.0;
      while (term > 1e-17) {
        series += term;
        term *= 1.0 - total;
      }
      num += in.population_weights[a] * in.baseline_contacts[a] * series;
      den += in.population_weights[a];
    }
    CHECK(calibrate_transmission_probability(in, total) == doctest::Approx(in.r0 * den / num).epsilon(1e-12));
  }
}

TEST_CASE("regime_contacts examples and overrides") {
  const std::vector<double> c{10.0};
  CHECK(regime_contacts(c, Regime::NoLockdown)[0] == 10.0);
  CHECK(regime_contacts(c, Regime::PartialLockdown)[0] == 5.0);
  CHECK(regime_contacts(c, Regime::CompleteLockdown)[0] == 3.0);
  RegimeContactRules rules;
  rules.overrides[index_of(Regime::PartialLockdown)] = {7.0};
  CHECK(regime_contacts(c, Regime::PartialLockdown, rules)[0] == 7.0);
}

TEST_CASE("step with no infection is the identity on compartments") {
  CompartmentState s(2, 3);
  for (auto& c : s.cells()) c = {100.0, 0.0, 5.0, 1.0};
  EpiRates r = one_cell_rates(0.3, 0.05, 0.05);
  r.gamma.assign(3, 0.05);
  r.lambda.assign(3, 0.05);
  for (auto& v : r.contacts) v.assign(3, 1.0);
  const auto next = step(s, r, Regime::NoLockdown);
  for (std::size_t k = 0; k < s.cells().size(); ++k) CHECK(next.cells()[k] == s.cells()[k]);
  CHECK(next.day() == s.day() + 1);
}

TEST_CASE("step hand-applied single stratum") {
  CompartmentState s(1, 1);
  s.at({0, 0}) = {99.0, 1.0, 0.0, 0.0};
  const auto n = step(s, one_cell_rates(0.3, 0.05, 0.05), Regime::NoLockdown);
  CHECK(n.at({0, 0}).S - 99.0 == doctest::Approx(-0.297).epsilon(1e-12));
  CHECK(n.at({0, 0}).D == doctest::Approx(0.05).epsilon(1e-12));
  CHECK(n.at({0, 0}).R == doctest::Approx(0.05).epsilon(1e-12));
  CHECK(n.at({0, 0}).I == doctest::Approx(1.0 + 0.297 - 0.1).epsilon(1e-12));
}

TEST_CASE("step with exhausted susceptibles") {
  CompartmentState s(1, 1);
  s.at({0, 0}) = {0.0, 40.0, 50.0, 10.0};
  const auto n = step(s, one_cell_rates(0.3, 0.05, 0.05), Regime::NoLockdown);
  CHECK(n.at({0, 0}).S == 0.0);
  CHECK(n.at({0, 0}).I == doctest::Approx(40.0 - 0.1 * 40.0));
}

TEST_CASE("step matches a straight-line oracle over 70 days") {
  // Independent recomputation of the difference equations for one stratum.
  const double beta = 0.31, gamma = 0.09, lambda = 0.011, N = 1e6;
  double S = N - 10.0, I = 10.0, R = 0.0, D = 0.0;
  CompartmentState s(1, 1);
  s.at({0, 0}) = {S, I, R, D};
  const auto rates = one_cell_rates(beta, gamma, lambda);
  for (int day = 0; day < 70; ++day) {
    const double inflow = beta * (I / N) * S;
    const double dS = -inflow, dI = inflow - (gamma + lambda) * I, dR = gamma * I, dD = lambda * I;
    S += dS;
    I += dI;
    R += dR;
    D += dD;
    s = step(s, rates, Regime::NoLockdown);
    const auto& c = s.at({0, 0});
    CHECK(std::abs(c.S - S) <= 1e-12 * N);
    CHECK(std::abs(c.I - I) <= 1e-12 * N);
    CHECK(std::abs(c.R - R) <= 1e-12 * N);
    CHECK(std::abs(c.D - D) <= 1e-12 * N);
  }
}

TEST_CASE("step clamps the infection inflow at S") {
  CompartmentState s(1, 1);
  s.at({0, 0}) = {50.0, 50.0, 0.0, 0.0};
  auto r = one_cell_rates(1.0, 0.1, 0.1);
  r.contacts = {std::vector<double>{5.0}, std::vector<double>{5.0}, std::vector<double>{5.0}};
  r.p = 1.0;
  const auto n = step(s, r, Regime::NoLockdown);
  CHECK(n.at({0, 0}).S == 0.0);
  CHECK(n.at({0, 0}).total() == doctest::Approx(100.0).epsilon(1e-15));
}

TEST_CASE("conservation, monotonicity and nonnegativity under random dynamics") {
  dss_test::Gen g(2024);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t regions = static_cast<std::size_t>(g.integer(1, 4));
    const std::size_t ages = static_cast<std::size_t>(g.integer(1, 7));
    const auto model = dss_test::random_model(g, regions, ages);
    const std::vector<double> inf(regions, g.uniform(0.0, 100.0));
    auto state = CompartmentState::seeded(model.populations, inf, 0);
    const auto rates = model.rates_with(g.uniform(0.0, 0.2));
    for (int day = 0; day < 120; ++day) {
      const Regime regime = kAllRegimes[static_cast<std::size_t>(g.integer(0, 2))];
      const auto next = step(state, rates, regime);
      for (std::size_t i = 0; i < regions; ++i) {
        for (std::size_t a = 0; a < ages; ++a) {
          const auto& c0 = state.at({i, a});
          const auto& c1 = next.at({i, a});
          const double n = model.populations[i][a];
          CHECK(std::abs(c1.total() - n) <= 1e-9 * n);
          CHECK(c1.S >= 0.0);
          CHECK(c1.I >= 0.0);
          CHECK(c1.D >= c0.D);
          CHECK(c1.R >= c0.R);
          CHECK(c1.S <= c0.S);
        }
      }
      state = next;
    }
  }
}

TEST_CASE("seeded state validation") {
  const std::vector<std::vector<double>> pops{{10.0, 20.0}};
  const std::vector<double> too_many{25.0};
  CHECK_THROWS_AS(CompartmentState::seeded(pops, too_many, 1), ValidationError);
  const std::vector<double> ok{5.0};
  const auto s = CompartmentState::seeded(pops, ok, 1);
  CHECK(s.at({0, 1}).I == 5.0);
  CHECK(s.at({0, 1}).S == 15.0);
  CHECK(s.total_population() == 30.0);
}

TEST_CASE("step rejects an invalid input state") {
  CompartmentState s(1, 1);
  s.at({0, 0}) = {-1.0, 1.0, 0.0, 0.0};
  CHECK_THROWS_AS(step(s, one_cell_rates(0.1, 0.1, 0.0), Regime::NoLockdown), DomainError);
}
