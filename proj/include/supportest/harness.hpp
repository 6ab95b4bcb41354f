#pragma once

// Simulation sweeps and sample-complexity probes over synthetic families.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "supportest/estimators.hpp"
#include "supportest/ingest.hpp"

namespace supportest {

enum class Sampling { kIid, kPoissonized };

Sampling parse_sampling(std::string_view name);

struct SweepSpec {
  /// Family spec accepted by make_family.
  std::string family;
  std::vector<Count> n_grid;
  int trials = 50;
  std::vector<std::string> estimators;
  std::uint64_t seed = 0;
  Sampling sampling = Sampling::kIid;
  EstimatorConfig config;
  /// Estimator k; defaults to effective_k(family).
  std::optional<double> k;
  double et_t = 1.0;
  int et_J = 10;
  double gtoulmin_t = 1.0;
  /// 0 = hardware concurrency.
  unsigned threads = 0;
};

/// One (estimator, n) cell. Moments exclude trials where the estimator was
/// undefined; a cell where every trial was undefined has no moments.
struct SweepRow {
  std::string estimator;
  Count n = 0;
  std::optional<double> mean_estimate;
  std::optional<double> rmse;
  std::optional<double> std_dev;
  int trials = 0;
  int undefined_count = 0;

  bool operator==(const SweepRow&) const = default;
};

/// Trial t of grid point i uses seed derive_seed(spec.seed, i, t); all
/// estimators of a trial see the same sample. RMSE is against S(P).
std::vector<SweepRow> run_sweep(const SweepSpec& spec);

/// Column order: estimator,n,mean_estimate,rmse,std_dev,trials,undefined_count.
/// Missing moments are empty fields; doubles use shortest round-trip form.
std::string format_sweep_csv(const std::vector<SweepRow>& rows);
std::vector<SweepRow> parse_sweep_csv(std::string_view text);
/// One JSON object per line.
std::string format_sweep_json(const std::vector<SweepRow>& rows);

/// Writes to `path` ("-" = stdout). Throws IoError naming the path.
void emit_csv(const std::vector<SweepRow>& rows, const std::string& path);
void emit_json(const std::vector<SweepRow>& rows, const std::string& path);
void write_text(const std::string& text, const std::string& path);

/// Shortest representation that parses back to the same double.
std::string format_double(double x);

struct ProbeSpec {
  std::string family;
  double epsilon = 0.1;
  double delta = 0.1;
  int trials = 100;
  std::uint64_t seed = 0;
  std::string estimator = "wy";
  Sampling sampling = Sampling::kPoissonized;
  EstimatorConfig config;
  double et_t = 1.0;
  int et_J = 10;
  double gtoulmin_t = 1.0;
  /// Defaults to 10 k ln k, lowered for wy to the largest n below c1 k ln k
  /// (beyond it the estimator is undefined).
  std::optional<Count> ceiling;
  unsigned threads = 0;
};

struct ProbeResult {
  /// Smallest n on the search grid whose failure frequency is <= delta.
  Count n_star = 0;
  bool ceiling_reached = false;
  Count ceiling = 0;
  double k = 0.0;
  /// Empirical P[|S_hat - S| >= eps k] at n_star, on the confirmation run.
  double failure_rate = 0.0;
  int confirmation_trials = 0;
  /// 95% Wilson interval for the failure probability at n_star.
  double wilson_low = 0.0;
  double wilson_high = 0.0;
  int evaluations = 0;
};

/// Binary search for the smallest n with failure frequency <= delta.
/// Undefined estimates count as failures. The returned point is confirmed
/// with 4x trials; a failed confirmation moves the lower end up and resumes.
ProbeResult probe_sample_complexity(const ProbeSpec& spec);

/// Wilson score interval at z = 1.96.
std::pair<double, double> wilson_interval(int failures, int trials);

}  // namespace supportest
