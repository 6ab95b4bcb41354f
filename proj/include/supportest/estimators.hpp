#pragma once

// Support-size estimators. Every estimator is a pure function of the
// Fingerprint.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "supportest/chebyshev.hpp"
#include "supportest/ingest.hpp"

namespace supportest {

/// Constants of the polynomial estimator: L = floor(c0 ln k),
/// r = c1 ln k / n, l = 1/k. `k` is the reciprocal of the minimum nonzero
/// probability mass, not the support size.
struct EstimatorConfig {
  double c0 = 0.45;
  double c1 = 0.5;
  std::optional<int> override_degree;
};

/// c0 that optimizes the worst-case rate bound (with c1 = 0.5).
inline constexpr double kRateOptimalC0 = 0.558;

struct DegreeParams {
  int degree = 0;
  double l = 0.0;
  double r = 0.0;
};

/// Natural logarithms throughout. Throws DegenerateDegreeError when the
/// degree is zero (use the plug-in estimator instead) and ParameterError
/// unless k >= 2, n >= 1, c0 > 0, c1 > 0.
DegreeParams degree_params(double k, double n, const EstimatorConfig& cfg = {});

struct Estimate {
  double value = 0.0;
  std::int64_t rounded = 0;
  std::string estimator;
  double n = 0.0;
  std::optional<double> k;
  std::optional<int> degree;
  std::optional<double> l;
  std::optional<double> r;
};

/// sum_{j<=L} g_L(j) h_j + sum_{j>L} h_j.
Estimate wy_estimate(const Fingerprint& fp, double k, const EstimatorConfig& cfg = {});
/// Same, with a precomputed table (table.n is used as the sample size).
Estimate wy_estimate(const Fingerprint& fp, const CoefficientTable& table, double k);

/// Number of distinct observed symbols.
Estimate plug_in(const Fingerprint& fp);

/// plug_in / C with sample coverage C = 1 - h_1/n. Undefined when h_1 == n.
Estimate good_turing(const Fingerprint& fp);

/// Chao-Lee coverage estimators with coefficient-of-variation correction:
///   C = 1 - f1/n,  S0 = D/C,  s = sum_i i(i-1) f_i / (n(n-1))
///   gamma1^2 = max(S0 s - 1, 0)                      S_CL1 = S0 + (f1/C) gamma1^2
///   gamma2^2 = max(gamma1^2 (1 + f1 s / C), 0)       S_CL2 = S0 + (f1/C) gamma2^2
/// Requires n >= 1; undefined when C == 0 (always the case at n = 1).
Estimate chao_lee(const Fingerprint& fp, int variant);

/// plug_in + sum_{j=1}^{J} (-1)^{j+1} t^j b_j h_j, b_j = P[Binom(J, 1/(1+t)) >= j].
Estimate efron_thisted(const Fingerprint& fp, double t = 1.0, int J = 10);

/// plug_in + sum_j (-1)^{j+1} t^j h_j.
Estimate good_toulmin(const Fingerprint& fp, double t = 1.0);

enum class EstimatorKind { kWy, kPlugIn, kGoodTuring, kChaoLee1, kChaoLee2, kEfronThisted, kGoodToulmin };

/// Names: wy, plugin, gt, cl1, cl2, et, gtoulmin.
EstimatorKind parse_estimator(std::string_view name);
std::string_view estimator_name(EstimatorKind kind);

/// Uniform entry point used by the CLI and the simulation harness.
struct EstimatorSpec {
  EstimatorKind kind = EstimatorKind::kWy;
  /// Required by wy; echoed by the others.
  std::optional<double> k;
  EstimatorConfig config;
  double et_t = 1.0;
  int et_J = 10;
  double gtoulmin_t = 1.0;
};

Estimate evaluate(const EstimatorSpec& spec, const Fingerprint& fp);

/// Restricts the value to [plug_in, k] (or [plug_in, inf) without k).
Estimate clamp_estimate(Estimate e, const Fingerprint& fp);

}  // namespace supportest
