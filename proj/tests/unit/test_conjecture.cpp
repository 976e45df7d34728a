#include "doctest.h"

#include <cmath>

#include "inflex/conjecture.hpp"
#include "inflex/errors.hpp"

using namespace inflex;

TEST_CASE("random jets respect their ranges") {
  for (int i = 0; i < 200; ++i) {
    const auto g = random_jet(5, trial_seed(1, 5, i));
    CHECK(g.size() == 5);
    CHECK(std::abs(g[0]) >= 0.1);
    for (double a : g) CHECK(std::abs(a) <= 10.0);
    for (double a : random_jet(2, trial_seed(1, 2, i), JetMode::positive)) CHECK(a >= 0.1);
  }
  CHECK(random_jet(4, 77) == random_jet(4, 77));
  CHECK(trial_seed(5, 3, 0) != trial_seed(5, 3, 1));
  CHECK(trial_seed(5, 3, 0) != trial_seed(5, 4, 0));
}

TEST_CASE("scan output is byte-deterministic") {
  const std::vector<int> ns{3, 4};
  const std::vector<double> ms{16, 64, 256};
  const std::string a = conjecture_scan(ns, 5, ms, 42).to_json().dump();
  const std::string b = conjecture_scan(ns, 5, ms, 42).to_json().dump();
  const std::string c = conjecture_scan(ns, 5, ms, 43).to_json().dump();
  CHECK(a == b);
  CHECK(a != c);
  CHECK(conjecture_scan(ns, 5, ms, 42).to_json()["evidence_only"] == true);
}

TEST_CASE("a trial replays from its seed") {
  const std::vector<int> ns{5};
  const auto ms = default_conjecture_schedule();
  const auto rep = conjecture_scan(ns, 3, ms, 9);
  const auto& t = rep.trials[2];
  const auto replay = run_trial(5, random_jet(5, t.seed), ms);
  CHECK(replay.scaled_roots == t.scaled_roots);
  CHECK(replay.min_distance == t.min_distance);
}

TEST_CASE("n = 2 with positive jets is never definite") {
  const std::vector<int> ns{2};
  const std::vector<double> ms{10, 100, 1000};
  const auto rep = conjecture_scan(ns, 50, ms, 3, JetMode::positive);
  CHECK(rep.summaries[0].definite_fraction == 0.0);
  CHECK_THROWS_AS(conjecture_scan(ns, 5, ms, 3), InvalidInput);
}

TEST_CASE("n = 3 collar roots crowd the inner edge") {
  // h''' ~ a0 w^-3 P_2(2t - 1) on the collar, so two roots sit inside it at every large m
  const std::vector<int> ns{3};
  const auto ms = default_conjecture_schedule();
  const auto rep = conjecture_scan(ns, 20, ms, 5);
  CHECK(rep.summaries[0].definite_fraction == 0.0);
  CHECK(rep.summaries[0].min_distance < 1e-8);
  for (const auto& t : rep.trials) {
    CHECK(t.scaled_roots.back().size() == 2);
    for (std::size_t k = 1; k < t.min_distance.size(); ++k) CHECK(t.min_distance[k] < t.min_distance[k - 1]);
  }
}

TEST_CASE("scaled root tables") {
  const auto ms = default_conjecture_schedule();
  const auto t3 = scaled_root_table({1.0, 0.0, 0.0}, ms);
  REQUIRE(t3.extrapolated.size() == 2);
  for (double r : t3.extrapolated) CHECK(std::abs(r - 1.0) < 1e-6);
  // leading order: x = m + w t with t at the shifted Legendre nodes
  const double m = ms.back();
  CHECK(t3.rows.back().roots[0] == doctest::Approx(1 + (0.5 - 0.5 / std::sqrt(3.0)) / (m * m)).epsilon(1e-12));

  const auto zero = scaled_root_table({0.0, 0.0, 0.0}, ms);
  for (const auto& row : zero.rows) CHECK(row.roots.empty());

  const auto t4 = scaled_root_table(random_jet(4, 11), ms);
  REQUIRE(t4.extrapolated.size() == t4.previous_extrapolated.size());
  REQUIRE_FALSE(t4.extrapolated.empty());
  for (std::size_t r = 0; r < t4.extrapolated.size(); ++r)
    CHECK(std::abs(t4.extrapolated[r] - t4.previous_extrapolated[r]) < 5e-4 * std::abs(t4.extrapolated[r]));
}

TEST_CASE("definite then indefinite is a counterexample candidate") {
  // n = 2 is definite only while w a1 lies in (-2, -1.5)
  const std::vector<double> ms{4, 8};
  const auto t = run_trial(2, {1.0, -7.0}, ms);
  CHECK(is_definite(t.signs[0]));
  CHECK_FALSE(is_definite(t.signs[1]));
  REQUIRE(t.violations.size() == 1);
  CHECK(t.violations[0] == 1);
  CHECK_FALSE(t.m_min.has_value());

  ConjectureReport rep;
  rep.trials.push_back(t);
  CHECK(rep.counterexample_candidates().size() == 1);
  CHECK(rep.to_json()["counterexample_candidates"][0]["indefinite_after_definite_at_m"][0] == 8.0);
}
