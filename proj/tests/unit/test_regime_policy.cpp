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

#include <algorithm>

#include "dss/regime_policy.hpp"
#include "support.hpp"

using namespace dss;

namespace {

Strategy lockdown(double L, std::optional<double> E) {
  return Strategy{"t", Regime::CompleteLockdown, L, E, kDefaultTighteningRise};
}

Observation obs(double deaths, double prop, int week = 1) { return {deaths, prop, week}; }

}  // namespace

TEST_CASE("r0 transitions at the death threshold, ties act") {
  const Strategy s = lockdown(300, 0.3);
  PolicyState st;
  CHECK(decide_transition(s, st, obs(301, 0.0)) == Regime::CompleteLockdown);
  CHECK(decide_transition(s, st, obs(300, 0.0)) == Regime::CompleteLockdown);
  CHECK(decide_transition(s, st, obs(299.9, 0.0)) == Regime::NoLockdown);
  Strategy star{"s", Regime::PartialLockdown, 300, std::nullopt, std::nullopt};
  CHECK(decide_transition(star, st, obs(301, 0.0)) == Regime::PartialLockdown);
}

TEST_CASE("E0 never eases") {
  const Strategy s = lockdown(100, 0.0);
  PolicyState st{Regime::CompleteLockdown, 0.5, true, 0.5};
  dss_test::Gen g(3);
  for (int k = 0; k < 200; ++k) {
    CHECK(decide_transition(s, st, obs(1e4, g.uniform(0.0, 1.0))) == Regime::CompleteLockdown);
  }
}

TEST_CASE("easing below E times the peak") {
  const Strategy s = lockdown(100, 0.3);
  PolicyState st{Regime::CompleteLockdown, 0.02, true, 0.01};
  CHECK(decide_transition(s, st, obs(1e4, 0.0059)) == Regime::PartialLockdown);
  CHECK(decide_transition(s, st, obs(1e4, 0.006)) == Regime::CompleteLockdown);  // strict <
}

TEST_CASE("tightening on a 5% rise of the observed series") {
  const Strategy s = lockdown(100, 0.3);
  PolicyState st{Regime::PartialLockdown, std::nullopt, true, 0.010};
  CHECK(decide_transition(s, st, obs(1e4, 0.0105)) == Regime::CompleteLockdown);
  CHECK(decide_transition(s, st, obs(1e4, 0.0104)) == Regime::PartialLockdown);
  // A flat zero series is not a rise.
  PolicyState zero{Regime::PartialLockdown, std::nullopt, true, 0.0};
  CHECK(decide_transition(s, zero, obs(1e4, 0.0)) == Regime::PartialLockdown);
  Strategy star{"s", Regime::PartialLockdown, 100, std::nullopt, std::nullopt};
  CHECK(decide_transition(star, st, obs(1e4, 0.5)) == Regime::PartialLockdown);
}

TEST_CASE("peak resets on each entry into r2") {
  const Strategy s = lockdown(1, 0.5);
  PolicyState st;
  // Week 1: enter r2 observing 0.10.
  Regime next = decide_transition(s, st, obs(10, 0.10));
  REQUIRE(next == Regime::CompleteLockdown);
  st = advance_policy(st, obs(10, 0.10), next);
  CHECK(*st.peak_infected_proportion_since_r2 == 0.10);
  // Peak grows while in r2.
  st = advance_policy(st, obs(20, 0.20), decide_transition(s, st, obs(20, 0.20)));
  CHECK(*st.peak_infected_proportion_since_r2 == 0.20);
  // Ease at 0.09 < 0.5 * 0.20.
  next = decide_transition(s, st, obs(30, 0.09));
  REQUIRE(next == Regime::PartialLockdown);
  st = advance_policy(st, obs(30, 0.09), next);
  CHECK_FALSE(st.peak_infected_proportion_since_r2.has_value());
  // Rise of more than 5% re-enters r2 with a fresh peak.
  next = decide_transition(s, st, obs(40, 0.03 + 0.09));
  REQUIRE(next == Regime::CompleteLockdown);
  st = advance_policy(st, obs(40, 0.12), next);
  CHECK(*st.peak_infected_proportion_since_r2 == 0.12);
  // Old peak 0.20 would ease at 0.099; the fresh peak does not.
  CHECK(decide_transition(s, st, obs(50, 0.099)) == Regime::CompleteLockdown);
}

TEST_CASE("standard strategies") {
  const auto all = enumerate_standard_strategies();
  CHECK(all.size() == 15);
  const auto find = [&](const std::string& id) {
    return *std::find_if(all.begin(), all.end(), [&](const Strategy& s) { return s.id == id; });
  };
  const Strategy l2e1 = find("L2_E1");
  CHECK(l2e1.lockdown_threshold == 300);
  CHECK(*l2e1.easing_fraction == 0.12);
  CHECK(l2e1.initial_target == Regime::CompleteLockdown);
  const Strategy l3s = find("L3_E*");
  CHECK(l3s.initial_target == Regime::PartialLockdown);
  CHECK_FALSE(l3s.tightening_rise.has_value());
  CHECK_FALSE(l3s.easing_fraction.has_value());
  CHECK(find("L1_E0").lockdown_threshold == 100);
  CHECK(find("L3_E3").lockdown_threshold == 500);
  CHECK(*find("L3_E3").easing_fraction == 0.5);
  CHECK(*find("L1_E2").easing_fraction == 0.3);
  for (const auto& s : all) CHECK_NOTHROW(s.validate());
}

TEST_CASE("strategy validation names the field") {
  Strategy s = lockdown(100, 1.3);
  try {
    s.validate("strategies[0]");
    FAIL("expected a validation error");
  } catch (const ValidationError& e) {
    CHECK(e.field_path() == "strategies[0].easing_fraction");
  }
  s = lockdown(0, 0.3);
  CHECK_THROWS_AS(s.validate(), ValidationError);
}

TEST_CASE("random observation streams respect the state-machine properties") {
  dss_test::Gen g(77);
  const auto strategies = enumerate_standard_strategies();
  for (int trial = 0; trial < 300; ++trial) {
    const Strategy& s = strategies[static_cast<std::size_t>(g.integer(0, 14))];
    PolicyState st;
    Regime prev = Regime::NoLockdown;
    bool left = false;
    double deaths = 0.0;
    for (int w = 1; w <= 40; ++w) {
      deaths += g.uniform(0.0, 40.0);
      const Observation o = obs(deaths, g.uniform(0.0, 0.05), w);
      const Regime next = decide_transition(s, st, o);
      CHECK(decide_transition(s, st, o) == next);  // pure
      if (left) CHECK(next != Regime::NoLockdown);
      if (!s.can_enter_complete_lockdown()) CHECK(next != Regime::CompleteLockdown);
      // One switch per epoch: r0 can only go to the target, r1/r2 only to each other.
      if (prev == Regime::NoLockdown) CHECK((next == prev || next == s.initial_target));
      st = advance_policy(st, o, next);
      if (next != Regime::NoLockdown) left = true;
      CHECK(st.has_left_r0 == left);
      CHECK(st.peak_infected_proportion_since_r2.has_value() == (next == Regime::CompleteLockdown));
      prev = next;
    }
  }
}
