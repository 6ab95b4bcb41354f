#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "supportest/error.hpp"
#include "supportest/estimators.hpp"
#include "supportest/synth.hpp"

using namespace supportest;

namespace {

std::vector<double> masses_of(const DiscreteDistribution& p) { return {p.masses().begin(), p.masses().end()}; }

void check_masses(const DiscreteDistribution& p, const std::vector<double>& want) {
  REQUIRE(p.support_size() == want.size());
  for (std::size_t i = 0; i < want.size(); ++i) {
    CAPTURE(i);
    CHECK(p.masses()[i] == doctest::Approx(want[i]).epsilon(1e-15));
  }
}

// CDF of Binom(k, q) at 0..k, via the pmf recurrence.
std::vector<double> binomial_cdf(int k, double q) {
  std::vector<double> pmf(k + 1);
  pmf[0] = std::pow(1.0 - q, k);
  for (int i = 1; i <= k; ++i) pmf[i] = pmf[i - 1] * (k - i + 1) / i * q / (1.0 - q);
  std::vector<double> cdf(k + 1);
  std::partial_sum(pmf.begin(), pmf.end(), cdf.begin());
  return cdf;
}

}  // namespace

TEST_SUITE("synth") {
  TEST_CASE("uniform") {
    check_masses(make_uniform(4), {0.25, 0.25, 0.25, 0.25});
    check_masses(make_uniform(1), {1.0});
    const auto p = make_uniform(777);
    CHECK(p.min_mass() == doctest::Approx(1.0 / 777).epsilon(1e-15));
    CHECK(p.support_size() == 777);
    CHECK(effective_k(p) == doctest::Approx(777.0).epsilon(1e-12));
    CHECK_THROWS_AS(make_uniform(0), ParameterError);
  }

  TEST_CASE("zipf") {
    CHECK(masses_of(make_zipf(50, 0.0)) == masses_of(make_uniform(50)));
    check_masses(make_zipf(2, 1.0), {2.0 / 3.0, 1.0 / 3.0});
    const double z = 1.0 + 1.0 / std::sqrt(2.0) + 1.0 / std::sqrt(3.0);
    check_masses(make_zipf(3, 0.5), {1.0 / z, 1.0 / std::sqrt(2.0) / z, 1.0 / std::sqrt(3.0) / z});
    for (std::size_t k : {1u, 10u, 1000u}) {
      double h = 0.0;
      for (std::size_t i = 1; i <= k; ++i) h += 1.0 / static_cast<double>(i);
      CHECK(effective_k(make_zipf(k, 1.0)) == doctest::Approx(k * h).epsilon(1e-12));
    }
    CHECK_THROWS_AS(make_zipf(10, -0.5), ParameterError);
  }

  TEST_CASE("mixture") {
    check_masses(make_mixture(4), {1.0 / 3, 1.0 / 6, 1.0 / 3, 1.0 / 6});
    CHECK(effective_k(make_mixture(4)) == doctest::Approx(6.0).epsilon(1e-14));

    for (std::size_t k : {10u, 100u, 5000u}) {
      const auto p = make_mixture(k);
      const auto m = p.masses();
      const double first = std::accumulate(m.begin(), m.begin() + k / 2, 0.0);
      const double second = std::accumulate(m.begin() + k / 2, m.end(), 0.0);
      CHECK(first == doctest::Approx(0.5).epsilon(1e-13));
      CHECK(second == doctest::Approx(0.5).epsilon(1e-13));
    }

    // k = 10: geometric ratio 4/5, so the i = 5 term is the smallest of the
    // second half. The 1/i half reaches lower (1/5 of 1/(2 H_5)).
    const auto p = make_mixture(10);
    const auto m = p.masses();
    const std::size_t argmin = std::min_element(m.begin() + 5, m.end()) - m.begin();
    CHECK(argmin == 9);
    const double geo_total = (1.0 - std::pow(0.8, 5)) / 0.2;
    CHECK(m[9] == doctest::Approx(0.5 * std::pow(0.8, 4) / geo_total).epsilon(1e-14));
    const double h5 = 1.0 + 1.0 / 2 + 1.0 / 3 + 1.0 / 4 + 1.0 / 5;
    CHECK(p.min_mass() == doctest::Approx(0.5 * 0.2 / h5).epsilon(1e-14));

    CHECK_THROWS_AS(make_mixture(7), ParameterError);
    CHECK_THROWS_AS(make_mixture(2), ParameterError);
  }

  TEST_CASE("family specs") {
    CHECK(make_family("uniform:k=1000").support_size() == 1000);
    CHECK(make_family("uniform:k=1e5").support_size() == 100000);
    CHECK(masses_of(make_family("zipf:k=30,alpha=0.5")) == masses_of(make_zipf(30, 0.5)));
    CHECK(masses_of(make_family("mixture:k=12")) == masses_of(make_mixture(12)));
    CHECK_THROWS_AS(make_family("gauss:k=10"), ParameterError);
    CHECK_THROWS_AS(make_family("uniform"), ParameterError);
    CHECK_THROWS_AS(make_family("uniform:k=2.5"), ParameterError);
    CHECK_THROWS_AS(make_family("zipf:k=10"), ParameterError);
    CHECK_THROWS_AS(make_family("uniform:k=10,alpha=1"), ParameterError);
    CHECK_THROWS_AS(make_family("uniform:k=ten"), ParameterError);
  }

  TEST_CASE("distribution validation") {
    CHECK_THROWS_AS(DiscreteDistribution({}, "x"), ParameterError);
    CHECK_THROWS_AS(DiscreteDistribution({0.5, 0.0, 0.5}, "x"), ParameterError);
    CHECK_THROWS_AS(DiscreteDistribution({0.5, 0.4}, "x"), ParameterError);
    CHECK_NOTHROW(DiscreteDistribution({0.5, 0.5 + 1e-13}, "x"));
  }

  TEST_CASE("every family lies in D_k for k = effective_k") {
    for (const char* spec : {"uniform:k=300", "zipf:k=300,alpha=1.5", "mixture:k=300"}) {
      const auto p = make_family(spec);
      const double k = effective_k(p);
      for (double m : p.masses()) CHECK(m * k >= 1.0 - 1e-12);
    }
  }

  TEST_CASE("fixed-n sampler") {
    CHECK(sample_iid(make_uniform(5), 0, 1).distinct() == 0);
    const Histogram point = sample_iid(make_uniform(1), 7, 42);
    REQUIRE(point.distinct() == 1);
    CHECK(point.entries()[0].count == 7);

    const auto p = make_uniform(1000);
    const double sigma = std::sqrt(1e6 * 1e-3 * (1 - 1e-3));
    for (std::uint64_t seed : {1u, 2u, 3u}) {
      const auto counts = sample_iid_counts(p, 1000000, seed);
      REQUIRE(counts.size() == 1000);
      CHECK(std::accumulate(counts.begin(), counts.end(), Count{0}) == 1000000);
      double worst = 0.0;
      for (Count c : counts) worst = std::max(worst, std::fabs(static_cast<double>(c) - 1000.0));
      CHECK(worst < 5.0 * sigma);
    }
  }

  TEST_CASE("Poissonized sampler") {
    CHECK(sample_poissonized(make_uniform(5), 0.0, 1).distinct() == 0);

    const auto p = make_zipf(400, 1.0);
    const double n = 3000.0;
    constexpr int kTrials = 400;
    double total = 0.0;
    for (int t = 0; t < kTrials; ++t) total += static_cast<double>(sample_poissonized(p, n, 1000 + t).n());
    const double mean = total / kTrials;
    CHECK(std::fabs(mean - n) < 3.0 * std::sqrt(n / kTrials));
  }

  TEST_CASE("plug-in under Poissonized uniform sampling is Binom(k, 1 - e^{-n/k})") {
    constexpr int k = 200;
    constexpr int kTrials = 3000;
    const auto p = make_uniform(k);
    std::vector<int> hits(k + 1, 0);
    for (int t = 0; t < kTrials; ++t) {
      const Histogram h = sample_poissonized(p, 200.0, 77 + t);
      ++hits[h.distinct()];
    }
    const std::vector<double> cdf = binomial_cdf(k, 1.0 - std::exp(-1.0));
    double ks = 0.0;
    int running = 0;
    for (int i = 0; i <= k; ++i) {
      running += hits[i];
      ks = std::max(ks, std::fabs(static_cast<double>(running) / kTrials - cdf[i]));
    }
    // 0.1% critical value of the one-sample Kolmogorov-Smirnov statistic.
    CHECK(ks < 1.95 / std::sqrt(static_cast<double>(kTrials)));
  }

  TEST_CASE("samplers are deterministic in the seed") {
    const auto p = make_mixture(500);
    CHECK(sample_iid(p, 20000, 9) == sample_iid(p, 20000, 9));
    CHECK_FALSE(sample_iid(p, 20000, 9) == sample_iid(p, 20000, 10));
    CHECK(sample_poissonized(p, 20000, 9) == sample_poissonized(p, 20000, 9));
    CHECK_FALSE(sample_poissonized(p, 20000, 9) == sample_poissonized(p, 20000, 10));

    const auto dense = sample_iid_counts(p, 5000, 3);
    CHECK(fingerprint_of_counts(dense) == fingerprint_of(sample_iid(p, 5000, 3)));
  }
}
