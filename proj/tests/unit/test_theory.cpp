#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "supportest/chebyshev.hpp"
#include "supportest/error.hpp"
#include "supportest/theory.hpp"

using namespace supportest;

namespace {

double rel_diff(double got, double want) { return std::fabs(got - want) / std::fabs(want); }

double total(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s;
}

// Least-squares slope of y on x.
double slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  const double mx = total(x) / n;
  const double my = total(y) / n;
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxy / sxx;
}

}  // namespace

TEST_SUITE("theory") {
  TEST_CASE("best constant approximation of 1/x") {
    for (auto [a, b] : {std::pair{1.0, 2.0}, std::pair{1.0, 50.0}, std::pair{3.5, 7.25}}) {
      const ApproxResult r = best_inv_approx(0, a, b);
      CHECK(rel_diff(r.error, (1 / a - 1 / b) / 2) < 1e-14);
      CHECK(rel_diff(r.evaluate(0.5 * (a + b)), (1 / a + 1 / b) / 2) < 1e-14);
      REQUIRE(r.extrema.size() == 2);
      CHECK(r.extrema.front() == a);
      CHECK(r.extrema.back() == b);
    }
  }

  TEST_CASE("Remez against the closed form") {
    CHECK(rel_diff(best_inv_approx(3, 1, 10).error, closed_form_error(4, 1, 10)) < 1e-8);
    CHECK(rel_diff(best_inv_approx(2, 1, 25).error, closed_form_error(3, 1, 25)) < 1e-8);
    CHECK(rel_diff(closed_form_error(1, 1, 25), (1.0 - 1.0 / 25) / 2) < 1e-15);
    CHECK(rel_diff(closed_form_error(1, 2.5, 9), (1 / 2.5 - 1 / 9.0) / 2) < 1e-15);

    std::mt19937_64 gen(2024);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int i = 0; i < 30; ++i) {
      const int deg = i % 8;
      const double a = 1.0 + 10.0 * unit(gen);
      const double b = a * (1.2 + 20.0 * unit(gen));
      const ApproxResult r = best_inv_approx(deg, a, b);
      CAPTURE(deg);
      CAPTURE(a);
      CAPTURE(b);
      CHECK(rel_diff(r.error, closed_form_error(deg + 1, a, b)) < 1e-8);
      REQUIRE(r.extrema.size() == static_cast<std::size_t>(deg + 2));
      for (std::size_t j = 0; j < r.extrema.size(); ++j) {
        const double res = r.residual(r.extrema[j]);
        // 1/x - p(x) is evaluated in double, so allow a few ulps of 1/a.
        CHECK(std::fabs(std::fabs(res) - r.error) < 1e-8 * r.error + 1e-15 / a);
        if (j > 0) CHECK(res * r.residual(r.extrema[j - 1]) < 0.0);
      }
      // The residual never exceeds the error anywhere on [a, b].
      double worst = 0.0;
      for (int g = 0; g <= 5000; ++g) worst = std::max(worst, std::fabs(r.residual(a + (b - a) * g / 5000.0)));
      CHECK(worst <= r.error * (1 + 1e-8));
    }
  }

  TEST_CASE("approximation error shrinks with the interval and the degree") {
    double prev = best_inv_approx(2, 1.0, 3.0).error;
    for (double b : {2.0, 1.5, 1.1, 1.01}) {
      const double e = best_inv_approx(2, 1.0, b).error;
      CHECK(e < prev);
      prev = e;
    }
    CHECK(prev < 1e-7);

    const double s = std::sqrt(1.0 / 40.0);
    const double ratio = 1.0 - 2.0 * s / (1.0 + s);
    for (int L = 1; L < 10; ++L) {
      CHECK(rel_diff(closed_form_error(L + 1, 1, 40) / closed_form_error(L, 1, 40), ratio) < 1e-13);
    }
  }

  TEST_CASE("approximation parameter checks") {
    CHECK_THROWS_AS(best_inv_approx(2, 0.5, 3), ParameterError);
    CHECK_THROWS_AS(best_inv_approx(2, 3, 3), ParameterError);
    CHECK_THROWS_AS(best_inv_approx(-1, 1, 3), ParameterError);
    CHECK_THROWS_AS(closed_form_error(0, 1, 3), ParameterError);
  }

  TEST_CASE("LP primal value and duality") {
    CHECK(rel_diff(primal_value(0, 1, 10, 50), 1.0 - 0.1) < 1e-12);
    CHECK(rel_diff(primal_value(0, 2, 7, 9), 0.5 - 1.0 / 7) < 1e-12);
    CHECK(rel_diff(primal_value(3, 1, 10, 2000), 2 * best_inv_approx(3, 1, 10).error) < 1e-3);
    CHECK(rel_diff(primal_value(1, 1.5, 30, 2000), 2 * best_inv_approx(1, 1.5, 30).error) < 1e-3);
    CHECK_THROWS_AS(primal_value(3, 1, 10, 4), ParameterError);
  }

  TEST_CASE("prior pair for L = 1 is a two-point construction") {
    const double a = 1.0;
    const double lambda = 8.0;
    const PriorPair p = construct_prior_pair(1, 0.0, lambda);
    // X = delta_a, X' = delta_lambda, so U puts 1/a at a and U' puts 1/lambda at lambda.
    REQUIRE(p.u.atoms.size() == 2);
    REQUIRE(p.u_prime.atoms.size() == 2);
    CHECK(p.u.atoms[1] == a);
    CHECK(p.u_prime.atoms[1] == lambda);
    CHECK(p.u.weights[0] == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(p.u_prime.weights[0] == doctest::Approx(1 - 1 / lambda).epsilon(1e-15));
    CHECK(p.u_prime.weights[1] == doctest::Approx(1 / lambda).epsilon(1e-15));
    CHECK(p.gap == doctest::Approx(1 - 1 / lambda).epsilon(1e-15));
  }

  TEST_CASE("prior pair invariants") {
    for (int L : {1, 2, 3, 5, 8, 11}) {
      for (auto [nu, lambda] : {std::pair{0.0, 10.0}, std::pair{0.3, 40.0}, std::pair{0.05, 909.0}}) {
        const PriorPair p = construct_prior_pair(L, nu, lambda);
        CAPTURE(L);
        CAPTURE(lambda);
        CHECK(rel_diff(p.gap, 2 * closed_form_error(L, 1 + nu, lambda)) < 1e-6);
        CHECK(p.u_prime.mass_at_zero() - p.u.mass_at_zero() == doctest::Approx(p.gap).epsilon(1e-10));
        CHECK(std::fabs(total(p.u.weights) - 1) < 1e-10);
        CHECK(std::fabs(total(p.u_prime.weights) - 1) < 1e-10);
        CHECK(std::fabs(p.u.moment(1) - 1) < 1e-8);
        CHECK(std::fabs(p.u_prime.moment(1) - 1) < 1e-8);
        for (int j = 1; j <= L; ++j) {
          CHECK(std::fabs(p.u.moment(j) - p.u_prime.moment(j)) <= 1e-8 * std::pow(lambda, j));
        }
        for (const DiscretePrior* d : {&p.u, &p.u_prime}) {
          for (std::size_t i = 0; i < d->atoms.size(); ++i) {
            CHECK(d->weights[i] >= 0.0);
            if (d->atoms[i] != 0.0) {
              CHECK(d->atoms[i] >= 1 + nu);
              CHECK(d->atoms[i] <= lambda);
            }
          }
        }
      }
    }
    CHECK_THROWS_AS(construct_prior_pair(0, 0.0, 10), ParameterError);
    CHECK_THROWS_AS(construct_prior_pair(2, -0.1, 10), ParameterError);
    CHECK_THROWS_AS(construct_prior_pair(2, 0.5, 1.5), ParameterError);
  }

  TEST_CASE("tv_exact examples") {
    const PriorPair p = construct_prior_pair(3, 0.0, 12.0);
    PriorPair same = p;
    same.u_prime = same.u;
    const TvEstimate zero = tv_exact(same, 0.7);
    CHECK(zero.lower == 0.0);
    CHECK(zero.upper <= 1e-12);

    PriorPair point;
    point.u = {{0.0}, {1.0}};
    point.u_prime = {{9.0}, {1.0}};
    for (double s : {0.01, 0.2, 1.0}) {
      const TvEstimate t = tv_exact(point, s);
      CHECK(rel_diff(t.lower, 1 - std::exp(-9 * s)) < 1e-14);
      CHECK(t.upper >= 1 - std::exp(-9 * s));
    }

    CHECK_THROWS_AS(tv_exact(p, 5.0, 3), PrecisionError);
    const int c = certified_cutoff(p, 5.0);
    CHECK_NOTHROW(tv_exact(p, 5.0, c));
    CHECK_THROWS_AS(tv_exact(p, 5.0, c - 1), PrecisionError);
    CHECK_THROWS_AS(tv_exact(p, -1.0, 10), ParameterError);
  }

  TEST_CASE("tv_exact decays like scale^(L+1) for moment-matched priors") {
    for (int L : {1, 2, 3, 4}) {
      const PriorPair p = construct_prior_pair(L, 0.0, 10.0);
      std::vector<double> xs;
      std::vector<double> ys;
      for (int i = 0; i <= 8; ++i) {
        const double s = std::pow(10.0, -4.0 + 0.25 * i);
        xs.push_back(std::log(s));
        ys.push_back(std::log(tv_exact(p, s).lower));
      }
      CAPTURE(L);
      CHECK(slope(xs, ys) == doctest::Approx(L + 1.0).epsilon(0.03));
    }
  }

  TEST_CASE("tv_bound") {
    const TvBound b = tv_bound(2.0, 4);
    CHECK(b.simplified == doctest::Approx(std::pow(std::numbers::e / 4, 4)).epsilon(1e-14));
    CHECK(b.simplified == doctest::Approx(0.2134).epsilon(1e-3));
    const double lead = std::pow(1.0, 5) / 120.0;
    CHECK(b.full == doctest::Approx(lead * (2 + std::exp2(-3.0) + std::exp2(1 / std::numbers::ln2 - 4))).epsilon(1e-14));
    CHECK(b.value == std::min(b.full, b.simplified));

    // L > (e/2) Lambda with Lambda large: the two exponential terms are negligible.
    const TvBound big = tv_bound(40.0, 200);
    const double two_lead = 2 * std::exp(201 * std::log(20.0) - std::lgamma(202.0));
    CHECK(rel_diff(big.full, two_lead) < 1e-6);

    CHECK_THROWS_AS(tv_bound(0.0, 2), ParameterError);
    CHECK_THROWS_AS(tv_bound(1.0, 0), ParameterError);
  }

  TEST_CASE("tv_exact stays below tv_bound") {
    std::mt19937_64 gen(11);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int i = 0; i < 12; ++i) {
      const int L = 1 + i % 6;
      const double lambda = 2.0 + 30.0 * unit(gen);
      const PriorPair p = construct_prior_pair(L, 0.0, lambda);
      const double Lambda = 1.0 + 29.0 * unit(gen);
      const double scale = Lambda / lambda;
      CAPTURE(L);
      CAPTURE(Lambda);
      CHECK(tv_exact(p, scale).upper <= tv_bound(Lambda, L).value);
    }
  }

  TEST_CASE("Le Cam certificate") {
    const double k = 1e6;
    const double eps = 0.2;
    const double c0 = 0.8;
    const double gamma = 2.0;
    const LowerBoundRecipe r = lower_bound_recipe(k, eps, c0, gamma, 0.9 * recipe_max_constant(c0, gamma));
    CHECK(r.L == 11);
    CHECK(r.alpha == doctest::Approx(0.01).epsilon(1e-12));
    const Certificate c = lecam_certificate(k, r.n, eps, r.L, r.lambda, r.nu, r.alpha);
    CHECK(c.valid);
    CHECK(c.lhs <= 0.6);
    CHECK(c.lhs == doctest::Approx(c.mass_term + c.support_term + c.tv_term).epsilon(1e-14));
    CHECK(c.implied_epsilon == doctest::Approx((1 - 2 * r.alpha) * c.gap / 2).epsilon(1e-14));
    CHECK(rel_diff(c.gap, 2 * closed_form_error(r.L, 1 + r.nu, r.lambda)) < 1e-6);

    const Certificate far = lecam_certificate(k, 1e3 * r.n, eps, r.L, r.lambda, r.nu, r.alpha);
    CHECK_FALSE(far.valid);
    CHECK(far.tv_term > c.tv_term);

    CHECK_THROWS_AS(lecam_certificate(k, r.n, eps, r.L, r.lambda, r.nu, 0.5), ParameterError);
    CHECK_THROWS_AS(lecam_certificate(k, r.n, eps, r.L, r.lambda, r.nu, 0.7), ParameterError);
    CHECK(recipe_max_constant(c0, gamma) ==
          doctest::Approx(2 * c0 / (std::numbers::e * gamma * gamma) * std::exp(-1 / c0)).epsilon(1e-15));
  }

  TEST_CASE("max_exp_cheby against a dense grid") {
    const ExpChebyMax m = max_exp_cheby(3.0, 6);
    double best = 0.0;
    constexpr int kGrid = 1000000;
    for (int i = 0; i <= kGrid; ++i) {
      const double x = 1.0 + 49.0 * i / kGrid;
      best = std::max(best, std::exp(-3.0 * x) * cheb_eval(6, x));
    }
    CHECK(rel_diff(m.value, best) < 1e-8);
    CHECK(m.residual < 1e-10);

    for (auto [beta, L] : {std::pair{0.5, 2}, std::pair{10.0, 3}, std::pair{40.0, 25}, std::pair{0.01, 1}}) {
      const ExpChebyMax r = max_exp_cheby(beta, L);
      CAPTURE(beta);
      CAPTURE(L);
      CHECK(r.x_star >= 1.0);
      CHECK(r.residual < 1e-10);
      if (r.x_star > 1.0) {
        const double h = 1e-4 * r.x_star;
        CHECK(r.value >= std::exp(-beta * (r.x_star + h)) * cheb_eval(L, r.x_star + h));
        CHECK(r.value >= std::exp(-beta * (r.x_star - h)) * cheb_eval(L, r.x_star - h));
      }
    }
    // Small beta pushes the maximizer outward.
    CHECK(max_exp_cheby(0.01, 4).x_star > max_exp_cheby(0.1, 4).x_star);
    CHECK_THROWS_AS(max_exp_cheby(0.0, 3), ParameterError);
    CHECK_THROWS_AS(max_exp_cheby(1.0, 0), ParameterError);
  }

  TEST_CASE("max_exp_cheby large-L limit") {
    for (double alpha : {0.5, 2.0, 5.0}) {
      const int L = 200;
      const ExpChebyMax m = max_exp_cheby(L / alpha, L);
      const double limit = (alpha + std::sqrt(alpha * alpha + 1)) / std::exp(std::sqrt(1 + 1 / (alpha * alpha)));
      CAPTURE(alpha);
      CHECK(rel_diff(std::exp(m.log_value / L), limit) < 0.05);
    }
  }

  TEST_CASE("rate envelope") {
    const double k = 1e4;
    CHECK(rate_envelope(k, 0) == 1.0);
    CHECK(rate_envelope(k, k * std::log(k)) == doctest::Approx(std::log(k)).epsilon(1e-14));
    CHECK(rate_envelope(k, k) == doctest::Approx(std::sqrt(std::log(k))).epsilon(1e-14));
    double prev = 0.0;
    for (double n = 0; n <= 1e7; n += 2.5e4) {
      const double v = rate_envelope(k, n);
      CHECK(v >= prev);
      prev = v;
    }
  }
}
