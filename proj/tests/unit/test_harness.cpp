#include <doctest.h>

#include <charconv>
#include <cmath>
#include <fstream>
#include <json.hpp>
#include <limits>
#include <sstream>

#include "supportest/error.hpp"
#include "supportest/harness.hpp"

using namespace supportest;

namespace {

SweepSpec small_spec() {
  SweepSpec s;
  s.family = "zipf:k=400,alpha=1";
  s.n_grid = {100, 400, 1600};
  s.trials = 6;
  s.estimators = {"plugin", "wy", "gt", "cl1", "et"};
  s.seed = 1234;
  s.sampling = Sampling::kIid;
  return s;
}

}  // namespace

TEST_SUITE("harness") {
  TEST_CASE("plug-in mean under Poissonized uniform sampling") {
    SweepSpec s;
    s.family = "uniform:k=1000";
    s.n_grid = {10000};
    s.trials = 50;
    s.estimators = {"plugin"};
    s.sampling = Sampling::kPoissonized;
    const auto rows = run_sweep(s);
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].mean_estimate.value() == doctest::Approx(1000 * (1 - std::exp(-10.0))).epsilon(5e-4));
    CHECK(rows[0].undefined_count == 0);
    CHECK(rows[0].trials == 50);
  }

  TEST_CASE("point mass") {
    SweepSpec s;
    s.family = "uniform:k=1";
    s.n_grid = {1, 5, 60};
    s.trials = 4;
    s.estimators = {"plugin"};
    for (const auto& row : run_sweep(s)) {
      CHECK(row.mean_estimate == 1.0);
      CHECK(row.rmse == 0.0);
      CHECK(row.std_dev == 0.0);
    }
  }

  TEST_CASE("undefined trials are counted, never averaged") {
    // With n = 1 every sample is a singleton, so coverage is zero.
    SweepSpec s;
    s.family = "uniform:k=50";
    s.n_grid = {1, 200};
    s.trials = 5;
    s.estimators = {"gt"};
    const auto rows = run_sweep(s);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].undefined_count == 5);
    CHECK_FALSE(rows[0].mean_estimate.has_value());
    CHECK_FALSE(rows[0].rmse.has_value());
    CHECK(rows[1].undefined_count == 0);
    CHECK(rows[1].rmse.has_value());
  }

  TEST_CASE("rows, moments and ordering") {
    const SweepSpec s = small_spec();
    const auto rows = run_sweep(s);
    REQUIRE(rows.size() == s.estimators.size() * s.n_grid.size());
    for (std::size_t e = 0; e < s.estimators.size(); ++e) {
      for (std::size_t i = 0; i < s.n_grid.size(); ++i) {
        const SweepRow& row = rows[e * s.n_grid.size() + i];
        CHECK(row.estimator == s.estimators[e]);
        CHECK(row.n == s.n_grid[i]);
        CHECK(row.undefined_count <= row.trials);
        if (row.rmse) {
          CHECK(*row.rmse >= 0.0);
          // RMSE^2 = bias^2 + (m-1)/m var over the defined trials.
          const double m = row.trials - row.undefined_count;
          const double bias = *row.mean_estimate - 400.0;
          const double mse = bias * bias + (m - 1) / m * *row.std_dev * *row.std_dev;
          CHECK(*row.rmse * *row.rmse == doctest::Approx(mse).epsilon(1e-9));
        }
      }
    }
  }

  TEST_CASE("sweeps are reproducible, whatever the thread count") {
    SweepSpec s = small_spec();
    s.threads = 1;
    const std::string one = format_sweep_csv(run_sweep(s));
    s.threads = 4;
    const std::string four = format_sweep_csv(run_sweep(s));
    CHECK(one == four);
    CHECK(one == format_sweep_csv(run_sweep(s)));
    s.seed += 1;
    CHECK(one != format_sweep_csv(run_sweep(s)));

    SweepSpec single = small_spec();
    single.trials = 1;
    CHECK(format_sweep_csv(run_sweep(single)) == format_sweep_csv(run_sweep(single)));
  }

  TEST_CASE("sweep validation") {
    SweepSpec s = small_spec();
    s.n_grid = {10, 10};
    CHECK_THROWS_AS(run_sweep(s), ParameterError);
    s = small_spec();
    s.n_grid = {};
    CHECK_THROWS_AS(run_sweep(s), ParameterError);
    s = small_spec();
    s.trials = 0;
    CHECK_THROWS_AS(run_sweep(s), ParameterError);
    s = small_spec();
    s.estimators = {"nope"};
    CHECK_THROWS_AS(run_sweep(s), ParameterError);
    s = small_spec();
    s.k = 5.0;
    s.estimators = {"wy"};
    CHECK_THROWS_AS(run_sweep(s), DegenerateDegreeError);
  }

  TEST_CASE("CSV format and round trip") {
    CHECK(format_sweep_csv({}) == "estimator,n,mean_estimate,rmse,std_dev,trials,undefined_count\n");
    CHECK(parse_sweep_csv(format_sweep_csv({})).empty());

    const auto rows = run_sweep(small_spec());
    CHECK(parse_sweep_csv(format_sweep_csv(rows)) == rows);

    std::vector<SweepRow> odd(2);
    odd[0] = {"gt", 1, std::nullopt, std::nullopt, std::nullopt, 3, 3};
    odd[1] = {"wy", 7, 0.1 + 0.2, 1e-300, 123456789.123456789, 3, 0};
    const std::string csv = format_sweep_csv(odd);
    CHECK(csv.find("gt,1,,,,3,3\n") != std::string::npos);
    CHECK(parse_sweep_csv(csv) == odd);

    CHECK_THROWS_AS(parse_sweep_csv("bad header\n"), ParseError);
    CHECK_THROWS_AS(parse_sweep_csv(std::string(format_sweep_csv({})) + "wy,x,1,1,1,1,0\n"), ParseError);
  }

  TEST_CASE("shortest round-trip doubles") {
    for (double x : {0.1, 1.0 / 3.0, 1e-310, 6.02214076e23, -2.5, 0.0,
                     std::numeric_limits<double>::max(), std::nextafter(1.0, 2.0)}) {
      const std::string text = format_double(x);
      double back = 1.0;
      std::from_chars(text.data(), text.data() + text.size(), back);
      CHECK(back == x);
    }
    CHECK(format_double(0.1) == "0.1");
    CHECK(format_double(1000.0) == "1000");
  }

  TEST_CASE("JSON lines") {
    std::vector<SweepRow> rows(2);
    rows[0] = {"gt", 1, std::nullopt, std::nullopt, std::nullopt, 3, 3};
    rows[1] = {"wy", 7, 0.3, 2.0, 1.5, 3, 0};
    std::istringstream in(format_sweep_json(rows));
    std::string line;
    std::vector<nlohmann::json> parsed;
    while (std::getline(in, line)) parsed.push_back(nlohmann::json::parse(line));
    REQUIRE(parsed.size() == 2);
    CHECK(parsed[0]["estimator"] == "gt");
    CHECK(parsed[0]["mean_estimate"].is_null());
    CHECK(parsed[0]["undefined_count"] == 3);
    CHECK(parsed[1]["n"] == 7);
    CHECK(parsed[1]["rmse"] == 2.0);
  }

  TEST_CASE("emitting to files") {
    const std::string path = "harness_emit_test.csv";
    const auto rows = run_sweep(small_spec());
    emit_csv(rows, path);
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    CHECK(parse_sweep_csv(ss.str()) == rows);
    std::remove(path.c_str());
    CHECK_THROWS_AS(emit_csv(rows, "/nonexistent-dir/x.csv"), IoError);
  }

  TEST_CASE("Wilson interval") {
    const auto [lo, hi] = wilson_interval(10, 100);
    CHECK(lo == doctest::Approx(0.05522).epsilon(1e-3));
    CHECK(hi == doctest::Approx(0.17437).epsilon(1e-3));
    const auto [zlo, zhi] = wilson_interval(0, 40);
    CHECK(zlo == 0.0);
    CHECK(zhi == doctest::Approx(1.96 * 1.96 / (40 + 1.96 * 1.96)).epsilon(1e-12));
    CHECK_THROWS_AS(wilson_interval(5, 4), ParameterError);
    CHECK_THROWS_AS(wilson_interval(0, 0), ParameterError);
  }

  TEST_CASE("probe: epsilon = 1/2 needs no samples") {
    ProbeSpec s;
    s.family = "uniform:k=1000";
    s.epsilon = 0.5;
    const ProbeResult r = probe_sample_complexity(s);
    CHECK(r.n_star == 0);
    CHECK_FALSE(r.ceiling_reached);
    CHECK(r.evaluations == 0);
  }

  TEST_CASE("probe: plug-in on a small uniform family") {
    ProbeSpec s;
    s.family = "uniform:k=200";
    s.epsilon = 0.1;
    s.trials = 40;
    s.estimator = "plugin";
    s.seed = 5;
    const ProbeResult r = probe_sample_complexity(s);
    CHECK_FALSE(r.ceiling_reached);
    CHECK(r.failure_rate <= s.delta);
    CHECK(r.confirmation_trials == 160);
    CHECK(r.wilson_low <= r.failure_rate);
    CHECK(r.wilson_high >= r.failure_rate);
    // Missing mass k e^{-n/k} reaches eps k = 20 near n = k ln 10 ~ 460.
    CHECK(r.n_star > 300);
    CHECK(r.n_star < 700);
    CHECK(probe_sample_complexity(s).n_star == r.n_star);

    s.ceiling = 50;
    const ProbeResult capped = probe_sample_complexity(s);
    CHECK(capped.ceiling_reached);
    CHECK(capped.n_star == 50);

    s.epsilon = 1e-4;
    CHECK_THROWS_AS(probe_sample_complexity(s), ParameterError);
  }
}
