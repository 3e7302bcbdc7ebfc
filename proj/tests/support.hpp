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

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "dss/epi_core.hpp"
#include "dss/monte_carlo.hpp"

namespace dss_test {

// Small seeded generator for property tests.
class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  bool coin(double p = 0.5) { return uniform(0.0, 1.0) < p; }

  std::vector<double> vec(std::size_t n, double lo, double hi) {
    std::vector<double> v(n);
    for (auto& x : v) x = uniform(lo, hi);
    return v;
  }

  // A point on the simplex of dimension n.
  std::vector<double> simplex(std::size_t n) {
    std::vector<double> v(n);
    double sum = 0.0;
    for (auto& x : v) sum += (x = -std::log(uniform(1e-12, 1.0)));
    for (auto& x : v) x /= sum;
    return v;
  }

  std::mt19937_64& engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

// r regions x a age groups with random rates and populations.
inline dss::EpiModel random_model(Gen& g, std::size_t regions, std::size_t ages) {
  dss::EpiModel m;
  for (std::size_t i = 0; i < regions; ++i) m.populations.push_back(g.vec(ages, 1e3, 1e6));
  for (std::size_t a = 0; a < ages; ++a) {
    const double total = g.uniform(0.01, 0.5);
    const double ifr = g.uniform(0.0, 0.2);
    m.lambda.push_back(ifr * total);
    m.gamma.push_back(total - ifr * total);
  }
  const auto base = g.vec(ages, 1.0, 20.0);
  for (dss::Regime r : dss::kAllRegimes) m.contacts[dss::index_of(r)] = dss::regime_contacts(base, r);
  return m;
}

}  // namespace dss_test
