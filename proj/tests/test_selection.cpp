#include <cmath>
#include <doctest.h>

#include "cmc/error.hpp"
#include "cmc/selection.hpp"
#include "cmc/stats.hpp"
#include "oracles.hpp"

using namespace cmc;

TEST_CASE("lambda_of basics") {
  auto prob = oracle::random_problem(Family::gaussian, 60, 4, 2, 21);
  FitResult full = fit_submodel(prob.data, ModelId::full(4));
  CHECK(lambda_of(full, full) == 0.0);
  FitResult sub = fit_submodel(prob.data, ModelId{0b0001});
  CHECK(lambda_of(sub, full) >= 0.0);
  // Gaussian identity: lambda = n ln(RSS_j / RSS_full).
  double expected = 60.0 * std::log(sub.rss / full.rss);
  CHECK(lambda_of(sub, full) == doctest::Approx(expected).epsilon(1e-8));

  auto other = oracle::random_problem(Family::gaussian, 60, 4, 2, 22);
  FitResult alien = fit_submodel(other.data, ModelId::full(4));
  CHECK_THROWS_AS(lambda_of(sub, alien), UsageError);
}

TEST_CASE("lambda for RSS ratio 2 at n=10 is 10 ln 2") {
  // Evaluate both profiled log-likelihoods explicitly and difference them.
  int n = 10;
  double rss_full = 3.7;
  double rss_j = 2.0 * rss_full;
  auto profiled = [n](double rss) {
    return -0.5 * n * (std::log(2.0 * M_PI) + std::log(rss / n) + 1.0);
  };
  double lambda = -2.0 * (profiled(rss_j) - profiled(rss_full));
  CHECK(lambda == doctest::Approx(10.0 * std::log(2.0)).epsilon(1e-10));
}

TEST_CASE("make_threshold schedule and fixed modes") {
  Threshold t = make_threshold(AlphaMode::Schedule(0.5), 100, 3);
  CHECK(t.value == doctest::Approx(10.0).epsilon(1e-12));
  CHECK(t.df == 4);
  double alpha_oracle = 1.0 - oracle::reg_gamma_lower_quadrature(2.0, 5.0);
  CHECK(t.alpha_effective == doctest::Approx(alpha_oracle).epsilon(1e-9));
  CHECK(t.alpha_effective == doctest::Approx(0.04043).epsilon(1e-3));

  Threshold f = make_threshold(AlphaMode::Fixed(0.5), 50, 1);
  CHECK(f.value == doctest::Approx(-2.0 * std::log(0.5)).epsilon(1e-10));

  Threshold big = make_threshold(AlphaMode::Schedule(0.5), 10000, 3);
  CHECK(big.value == doctest::Approx(100.0).epsilon(1e-12));
  CHECK(big.alpha_effective < t.alpha_effective);

  CHECK_THROWS_AS(AlphaMode::Fixed(0.0), UsageError);
  CHECK_THROWS_AS(AlphaMode::Schedule(1.0), UsageError);
  CHECK_THROWS_AS(make_threshold(AlphaMode::Fixed(0.5), 4, 3), UsageError);
}

TEST_CASE("schedule threshold round-trips through the quantile") {
  for (int n : {50, 400, 3000}) {
    for (int p : {2, 6}) {
      Threshold t = make_threshold(AlphaMode::Schedule(0.5), n, p);
      double back = chi2_quantile(1.0 - t.alpha_effective, p + 1);
      CHECK(std::fabs(back - t.value) <= 1e-6 * t.value);
    }
  }
}

TEST_CASE("cmc trivial selections") {
  // Pure-noise response: the intercept-only fit sits inside a generous region.
  auto noise = oracle::random_problem(Family::gaussian, 100, 5, 0, 33);
  SelectionResult loose = cmc_select(noise.data, AlphaMode::Fixed(0.01));
  REQUIRE(loose.lambda_by_size[0].lambda <= loose.threshold->value);
  CHECK(loose.selected.mask == 0);

  // Near-zero threshold: only the full model (lambda = 0) survives.
  auto prob = oracle::random_problem(Family::gaussian, 100, 5, 2, 33);
  SelectionResult tight = cmc_select(prob.data, AlphaMode::Fixed(1.0 - 1e-12));
  REQUIRE(tight.lambda_by_size[4].lambda > tight.threshold->value);
  CHECK(tight.selected == ModelId::full(5));
}

TEST_CASE("region membership is monotone in size") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    auto prob = oracle::random_problem(Family::gaussian, 120, 6, 3, seed);
    SelectionResult res = cmc_select(prob.data, AlphaMode::Schedule(0.5));
    // lambda non-increasing, so in_region flips false->true exactly once.
    for (std::size_t j = 1; j < res.lambda_by_size.size(); ++j) {
      CHECK(res.lambda_by_size[j].lambda <=
            res.lambda_by_size[j - 1].lambda + 1e-8);
      CHECK(res.lambda_by_size[j].in_region >=
            res.lambda_by_size[j - 1].in_region);
    }
    CHECK(res.lambda_by_size.back().lambda == 0.0);
    CHECK(res.lambda_by_size[res.selected.size()].in_region);
    if (res.selected.size() > 0) {
      CHECK_FALSE(res.lambda_by_size[res.selected.size() - 1].in_region);
    }
  }
}

TEST_CASE("cmc_select equals the brute-force rule") {
  for (Family fam : {Family::gaussian, Family::binomial, Family::poisson}) {
    for (std::uint64_t seed = 0; seed < 8; ++seed) {
      auto prob =
          oracle::random_problem(fam, 150, 6, 3, 100 + seed);
      for (double alpha : {0.1, 0.5, 0.9}) {
        SelectionResult res = cmc_select(prob.data, AlphaMode::Fixed(alpha));
        ModelId brute =
            oracle::brute_force_cmc(prob.data, res.threshold->value);
        CHECK(res.selected == brute);
      }
    }
  }
}

TEST_CASE("selected size is non-decreasing in alpha") {
  auto prob = oracle::random_problem(Family::gaussian, 200, 6, 3, 55);
  int prev = -1;
  for (double alpha = 0.05; alpha < 0.99; alpha += 0.05) {
    SelectionResult res = cmc_select(prob.data, AlphaMode::Fixed(alpha));
    CHECK(res.selected.size() >= prev);
    prev = res.selected.size();
  }
}

TEST_CASE("information criterion scores and selection") {
  SUBCASE("penalty arithmetic") {
    auto prob = oracle::random_problem(Family::gaussian, 100, 4, 2, 61);
    SelectionResult aic = ic_select(prob.data, Criterion::aic);
    for (const auto& row : aic.lambda_by_size) {
      double ll = fit_submodel(prob.data, row.model).loglik;
      CHECK(*row.score ==
            doctest::Approx(-2.0 * ll + 2.0 * (row.size + 1)).epsilon(1e-10));
    }
    // Worked value: loglik -50, size 2 => AIC = 100 + 6.
    CHECK(-2.0 * (-50.0) + 2.0 * 3 == 106.0);
  }

  SUBCASE("aic and bic match the exhaustive scan") {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      auto prob = oracle::random_problem(Family::gaussian, 130, 6, 3, seed);
      SelectionResult aic = ic_select(prob.data, Criterion::aic);
      CHECK(aic.selected == oracle::brute_force_ic(prob.data, 2.0));
      SelectionResult bic = ic_select(prob.data, Criterion::bic);
      CHECK(bic.selected ==
            oracle::brute_force_ic(prob.data, std::log(130.0)));
    }
  }

}

TEST_CASE("hq penalty accepted for n >= 3") {
  auto prob = oracle::random_problem(Family::gaussian, 30, 2, 1, 2);
  SelectionResult hq = ic_select(prob.data, Criterion::hq);
  CHECK(hq.lambda_by_size.size() == 3);
}

TEST_CASE("parse_mode accepts the documented spellings") {
  CHECK(parse_mode("aic").criterion == Criterion::aic);
  CHECK(parse_mode("bic").criterion == Criterion::bic);
  CHECK(parse_mode("hq").criterion == Criterion::hq);
  CHECK(parse_mode("cmc").alpha->kind == AlphaMode::Kind::schedule);
  CHECK(parse_mode("cmc:alpha=0.1").alpha->alpha == doctest::Approx(0.1));
  CHECK(parse_mode("cmc:gamma=0.7").alpha->gamma == doctest::Approx(0.7));
  CHECK_THROWS_AS(parse_mode("cv"), UsageError);
  CHECK_THROWS_AS(parse_mode("cmc:beta=1"), UsageError);
}

TEST_CASE("compare shares one ML set and matches individual runs") {
  auto prob = oracle::random_problem(Family::gaussian, 160, 6, 3, 91);
  std::vector<CompareMode> modes = {
      parse_mode("cmc:gamma=0.5"), parse_mode("cmc:alpha=0.5"),
      parse_mode("cmc:alpha=0.9"), parse_mode("aic"), parse_mode("bic")};
  ComparisonReport report = compare(prob.data, modes);
  REQUIRE(report.rows.size() == modes.size());

  CHECK(report.rows[0].second.selected ==
        cmc_select(prob.data, AlphaMode::Schedule(0.5)).selected);
  CHECK(report.rows[1].second.selected ==
        cmc_select(prob.data, AlphaMode::Fixed(0.5)).selected);
  CHECK(report.rows[3].second.selected ==
        ic_select(prob.data, Criterion::aic).selected);
  CHECK(report.rows[4].second.selected ==
        ic_select(prob.data, Criterion::bic).selected);

  // Larger alpha means a smaller region, so sizes cannot shrink.
  CHECK(report.rows[2].second.selected.size() >=
        report.rows[1].second.selected.size());

  SUBCASE("single mode reduces to that mode's result") {
    ComparisonReport one = compare(prob.data, {parse_mode("aic")});
    REQUIRE(one.rows.size() == 1);
    CHECK(one.rows[0].second.selected ==
          ic_select(prob.data, Criterion::aic).selected);
  }

  CHECK_THROWS_AS(compare(prob.data, {}), UsageError);
}
