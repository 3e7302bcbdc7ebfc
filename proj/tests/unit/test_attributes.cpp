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
#include <numeric>

#include "dss/attributes.hpp"
#include "support.hpp"

using namespace dss;

TEST_CASE("covid life-years") {
  const LifeTable t{{80, 70, 50, 30, 15, 9, 5}};
  CHECK(covid_life_years(std::vector<double>(7, 0.0), t) == 0.0);
  CHECK(covid_life_years(std::vector<double>{0, 0, 0, 0, 0, 0, 100}, t) == 500.0);
  dss_test::Gen g(1);
  for (int k = 0; k < 200; ++k) {
    const auto d = g.vec(7, 0.0, 1e5);
    double oracle = 0.0;
    for (std::size_t a = 0; a < 7; ++a) oracle += d[a] * t.expected_remaining_years[a];
    CHECK(std::abs(covid_life_years(d, t) - oracle) <= 1e-12 * oracle);
  }
  CHECK_THROWS_AS(covid_life_years(std::vector<double>(8, 1.0), t), ValidationError);
}

TEST_CASE("cancer life-years") {
  CancerDelayModel m{{10, 20, 30}, 0.5};
  CHECK(cancer_life_years(0, 0, m) == 0.0);
  CHECK(cancer_life_years(10, 0, m) == cancer_life_years(0, 20, m));
  CHECK(cancer_life_years(12, 6, m) == doctest::Approx(60.0 * 15.0).epsilon(1e-15));
  CHECK_THROWS_AS(cancer_life_years(-1, 0, m), DomainError);
}

TEST_CASE("poverty life-years reproduce the reference totals") {
  const PovertyModel p;
  CHECK(poverty_life_years(0, 0, p) == 0.0);
  const double total = poverty_life_years(10, 0, p);
  CHECK(total == doctest::Approx(4.37e6 / 8.8).epsilon(1e-15));
  CHECK(std::abs(total - 0.498e6) / 0.498e6 <= 0.01);
  CHECK(std::abs(poverty_life_years(10, 0, p, PovertyBand::WorkingAge) - 0.2886e6) <= 0.0001e6);
  CHECK(std::abs(poverty_life_years(10, 0, p, PovertyBand::Children) - 0.16e6) / 0.16e6 <= 0.01);
  CHECK(std::abs(poverty_life_years(10, 0, p, PovertyBand::PensionAge) - 0.048e6) / 0.048e6 <= 0.01);
}

TEST_CASE("attribute linearity and partial-lockdown scaling") {
  dss_test::Gen g(2);
  const PovertyModel p;
  const CancerDelayModel c{g.vec(7, 0.0, 500.0), 0.5};
  for (int k = 0; k < 200; ++k) {
    const double w2 = g.uniform(0, 40), w1 = g.uniform(0, 40), s = g.uniform(0.1, 10);
    CHECK(cancer_life_years(s * w2, s * w1, c) == doctest::Approx(s * cancer_life_years(w2, w1, c)).epsilon(1e-12));
    CHECK(poverty_life_years(w2 + 1, w1, p) ==
          doctest::Approx(poverty_life_years(w2, w1, p) + poverty_life_years(1, 0, p)).epsilon(1e-12));
    CHECK(cancer_life_years(0, w1, c) == doctest::Approx(0.5 * cancer_life_years(w1, 0, c)).epsilon(1e-15));
    CHECK(poverty_life_years(0, w1, p) == doctest::Approx(0.5 * poverty_life_years(w1, 0, p)).epsilon(1e-15));
    double by_band = 0.0;
    for (std::size_t b = 0; b < kPovertyBandCount; ++b) {
      by_band += poverty_life_years(w2, w1, p, static_cast<PovertyBand>(b));
    }
    const double all = poverty_life_years(w2, w1, p);
    CHECK(std::abs(by_band - all) <= 1e-9 * std::max(1.0, all));
  }
}

TEST_CASE("poverty model validation") {
  PovertyModel p;
  p.age_shares = {0.5, 0.5, 0.5};
  CHECK_THROWS_AS(p.validate(), ValidationError);
  CHECK(poverty_band_from_string("working-age") == PovertyBand::WorkingAge);
  CHECK_THROWS_AS(poverty_band_from_string("teen"), std::invalid_argument);
}

TEST_CASE("split_age_band") {
  const auto half = split_age_band(100, std::vector<double>{0.5, 0.5});
  CHECK(half == std::vector<double>{50, 50});
  CHECK(split_age_band(7.25, std::vector<double>{1.0}) == std::vector<double>{7.25});
  const auto three = split_age_band(10, std::vector<double>{0.2, 0.3, 0.5});
  CHECK(three[0] == doctest::Approx(2));
  CHECK(three[1] == doctest::Approx(3));
  CHECK(three[2] == doctest::Approx(5));
  CHECK_THROWS_AS(split_age_band(1, std::vector<double>{0.5, 0.6}), ValidationError);
  dss_test::Gen g(4);
  for (int k = 0; k < 500; ++k) {
    const auto f = g.simplex(static_cast<std::size_t>(g.integer(1, 7)));
    const double v = g.uniform(0, 1e6);
    const auto parts = split_age_band(v, f);
    CHECK(std::accumulate(parts.begin(), parts.end(), 0.0) == doctest::Approx(v).epsilon(1e-12));
  }
}

TEST_CASE("remap_age_bands") {
  BandMapping m{{"60-69", "70+"}, {{0.5, 0.5, 0.0}, {0.0, 0.0, 1.0}}};
  const auto out = remap_age_bands(std::vector<double>{100, 40}, m, 3);
  CHECK(out == std::vector<double>{50, 50, 40});
  BandMapping bad{{"x"}, {{0.4, 0.4, 0.0}}};
  CHECK_THROWS_AS(remap_age_bands(std::vector<double>{1}, bad, 3), ValidationError);
}

TEST_CASE("life table validation") {
  LifeTable t{{5, 10}};
  CHECK_THROWS_AS(t.validate(2), ValidationError);
  CHECK_NOTHROW(t.validate(2, false));
  CHECK_THROWS_AS(t.validate(3, false), ValidationError);
}
