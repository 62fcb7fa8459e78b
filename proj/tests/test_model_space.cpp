#include <doctest.h>

#include "cmc/error.hpp"
#include "cmc/model_space.hpp"
#include "oracles.hpp"

using namespace cmc;

namespace {

long binom(int n, int k) {
  long r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

}  // namespace

TEST_CASE("models_of_size counts and order") {
  CHECK(models_of_size(4, 0).size() == 1);
  CHECK(models_of_size(4, 0)[0].mask == 0);
  CHECK(models_of_size(4, 4).size() == 1);
  CHECK(models_of_size(4, 4)[0].mask == 0b1111);

  auto two_of_five = models_of_size(5, 2);
  CHECK(two_of_five.size() == 10);
  CHECK(two_of_five.front().mask == 0b00011);  // {x1, x2}
  CHECK(two_of_five.back().mask == 0b11000);   // {x4, x5}
  for (std::size_t i = 1; i < two_of_five.size(); ++i) {
    CHECK(two_of_five[i - 1].mask < two_of_five[i].mask);
  }

  for (int j = 0; j <= 8; ++j) {
    auto v = models_of_size(8, j);
    CHECK(static_cast<long>(v.size()) == binom(8, j));
    for (const auto& m : v) CHECK(m.size() == j);
  }

  CHECK_THROWS_AS(models_of_size(4, 5), UsageError);
  CHECK_THROWS_AS(models_of_size(4, -1), UsageError);
}

TEST_CASE("best_of_size trivial sizes") {
  auto prob = oracle::random_problem(Family::gaussian, 100, 6, 3, 2);
  auto bottom = best_of_size(prob.data, 0);
  CHECK(bottom.model.mask == 0);
  auto top = best_of_size(prob.data, 6);
  CHECK(top.model.mask == 0b111111);
}

TEST_CASE("best_of_size matches the exhaustive RSS oracle") {
  auto prob = oracle::random_problem(Family::gaussian, 100, 6, 3, 8);
  for (int j = 0; j <= 6; ++j) {
    auto got = best_of_size(prob.data, j);
    // Smallest RSS of size j, found by an independent per-mask scan.
    ModelId best;
    double best_rss = 1e300;
    for (const auto& m : models_of_size(6, j)) {
      double rss = oracle::rss_normal_equations(prob.data, m);
      if (rss < best_rss) {
        best_rss = rss;
        best = m;
      }
    }
    CHECK(got.model == best);
  }
}

TEST_CASE("ml_set equals the size-grouped exhaustive scan") {
  for (Family fam : {Family::gaussian, Family::binomial, Family::poisson}) {
    int p = fam == Family::gaussian ? 8 : 6;
    auto prob = oracle::random_problem(fam, 150, p, 3, 40 + static_cast<int>(fam));
    MLSet set = ml_set(prob.data);
    auto expected = oracle::exhaustive_best_by_size(prob.data);
    REQUIRE(set.entries.size() == expected.size());
    for (int j = 0; j <= p; ++j) {
      CHECK(set.entries[j].model == expected[j].first);
      CHECK(set.entries[j].fit.loglik ==
            doctest::Approx(expected[j].second).epsilon(1e-9));
    }
  }
}

TEST_CASE("ml_set loglik is non-decreasing in size") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    auto prob = oracle::random_problem(Family::gaussian, 120, 7, 3, seed);
    MLSet set = ml_set(prob.data);
    for (int j = 0; j + 1 <= set.max_size(); ++j) {
      CHECK(set.entries[j].fit.loglik <=
            set.entries[j + 1].fit.loglik + 1e-8);
    }
  }
}

TEST_CASE("ml_set honors the size cap") {
  auto prob = oracle::random_problem(Family::gaussian, 100, 10, 3, 6);
  SearchBudget budget;
  budget.max_size = 3;
  MLSet set = ml_set(prob.data, budget);
  CHECK(set.entries.size() == 4);
  for (int j = 0; j <= 3; ++j) CHECK(set.entries[j].model.size() == j);
}

TEST_CASE("p=1 ml_set is intercept-only plus full") {
  auto prob = oracle::random_problem(Family::gaussian, 40, 1, 1, 12);
  MLSet set = ml_set(prob.data);
  REQUIRE(set.entries.size() == 2);
  CHECK(set.entries[0].model.mask == 0);
  CHECK(set.entries[1].model.mask == 1);
}

TEST_CASE("parallel and serial searches agree") {
  auto prob = oracle::random_problem(Family::gaussian, 150, 8, 3, 77);
  SearchBudget serial;
  serial.threads = 1;
  SearchBudget parallel;
  parallel.threads = 4;
  MLSet a = ml_set(prob.data, serial);
  MLSet b = ml_set(prob.data, parallel);
  REQUIRE(a.entries.size() == b.entries.size());
  for (std::size_t j = 0; j < a.entries.size(); ++j) {
    CHECK(a.entries[j].model == b.entries[j].model);
    CHECK(a.entries[j].fit.loglik == b.entries[j].fit.loglik);
  }
}

TEST_CASE("exhaustive search refuses oversized problems") {
  auto prob = oracle::random_problem(Family::gaussian, 60, 5, 2, 1);
  SearchBudget budget;
  budget.exhaustive_limit = 4;
  CHECK_THROWS_AS(ml_set(prob.data, budget), UsageError);
}
