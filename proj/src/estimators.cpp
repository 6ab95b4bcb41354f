#include "supportest/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "supportest/error.hpp"

namespace supportest {

namespace {

Estimate make_estimate(std::string name, double value, const Fingerprint& fp) {
  Estimate e;
  e.value = value;
  e.rounded = static_cast<std::int64_t>(std::llround(value));
  e.estimator = std::move(name);
  e.n = static_cast<double>(fp.n());
  return e;
}

void require_samples(const Fingerprint& fp, Count minimum, const char* name) {
  if (fp.n() < minimum) {
    throw ParameterError(std::string(name) + " requires n >= " + std::to_string(minimum));
  }
}

}  // namespace

DegreeParams degree_params(double k, double n, const EstimatorConfig& cfg) {
  if (!(k >= 2.0) || !std::isfinite(k)) throw ParameterError("k must be a finite number >= 2");
  if (!(n >= 1.0) || !std::isfinite(n)) throw ParameterError("n must be a finite number >= 1");
  if (!(cfg.c0 > 0.0) || !(cfg.c1 > 0.0)) throw ParameterError("c0 and c1 must be positive");

  const double lnk = std::log(k);
  DegreeParams p;
  p.degree = cfg.override_degree ? *cfg.override_degree : static_cast<int>(std::floor(cfg.c0 * lnk));
  if (p.degree < 0) throw ParameterError("degree must be non-negative");
  if (p.degree == 0) {
    throw DegenerateDegreeError("polynomial degree is 0 (k=" + std::to_string(k) +
                                ", c0=" + std::to_string(cfg.c0) +
                                "); the estimator reduces to plug-in, use --estimator plugin");
  }
  p.l = 1.0 / k;
  p.r = cfg.c1 * lnk / n;
  return p;
}

Estimate wy_estimate(const Fingerprint& fp, double k, const EstimatorConfig& cfg) {
  require_samples(fp, 1, "wy");
  const DegreeParams p = degree_params(k, static_cast<double>(fp.n()), cfg);
  if (!(p.r > p.l)) {
    throw UndefinedEstimatorError("approximation interval is empty (r=" + std::to_string(p.r) +
                                  " <= l=" + std::to_string(p.l) +
                                  "): n exceeds c1 k ln k, where plug-in is already accurate");
  }
  return wy_estimate(fp, g_table(p.degree, p.l, p.r, static_cast<double>(fp.n())), k);
}

Estimate wy_estimate(const Fingerprint& fp, const CoefficientTable& table, double k) {
  long double sum = 0.0L;
  for (const auto& [j, hj] : fp.counts()) {
    sum += static_cast<long double>(table.weight(j)) * static_cast<long double>(hj);
  }
  Estimate e = make_estimate("wy", static_cast<double>(sum), fp);
  e.n = table.n;
  e.k = k;
  e.degree = table.degree;
  e.l = table.l;
  e.r = table.r;
  return e;
}

Estimate plug_in(const Fingerprint& fp) {
  return make_estimate("plugin", static_cast<double>(fp.distinct()), fp);
}

Estimate good_turing(const Fingerprint& fp) {
  require_samples(fp, 1, "gt");
  const Count h1 = fp.at(1);
  if (h1 == fp.n()) throw UndefinedEstimatorError("sample coverage is zero (every symbol seen once)");
  const double coverage = 1.0 - static_cast<double>(h1) / static_cast<double>(fp.n());
  return make_estimate("gt", static_cast<double>(fp.distinct()) / coverage, fp);
}

Estimate chao_lee(const Fingerprint& fp, int variant) {
  if (variant != 1 && variant != 2) throw ParameterError("Chao-Lee variant must be 1 or 2");
  const char* name = variant == 1 ? "cl1" : "cl2";
  require_samples(fp, 1, name);
  if (fp.at(1) == fp.n()) throw UndefinedEstimatorError("sample coverage is zero (every symbol seen once)");
  const double n = static_cast<double>(fp.n());
  const double f1 = static_cast<double>(fp.at(1));
  const double coverage = 1.0 - f1 / n;
  const double s0 = static_cast<double>(fp.distinct()) / coverage;

  long double pairs = 0.0L;
  for (const auto& [i, fi] : fp.counts()) {
    pairs += static_cast<long double>(i) * static_cast<long double>(i - 1) * static_cast<long double>(fi);
  }
  const double s = static_cast<double>(pairs / (static_cast<long double>(n) * (n - 1.0)));
  const double gamma1 = std::max(s0 * s - 1.0, 0.0);
  const double gamma_sq = variant == 1 ? gamma1 : std::max(gamma1 * (1.0 + f1 * s / coverage), 0.0);
  return make_estimate(name, s0 + f1 / coverage * gamma_sq, fp);
}

Estimate efron_thisted(const Fingerprint& fp, double t, int J) {
  require_samples(fp, 1, "et");
  if (!(t > 0.0) || !std::isfinite(t)) throw ParameterError("Efron-Thisted t must be positive");
  if (J < 1) throw ParameterError("Efron-Thisted J must be >= 1");

  // pmf of Binom(J, q); b_j is the upper tail from j.
  const double q = 1.0 / (1.0 + t);
  std::vector<double> pmf(J + 1);
  for (int i = 0; i <= J; ++i) {
    pmf[i] = std::exp(std::lgamma(J + 1.0) - std::lgamma(i + 1.0) - std::lgamma(J - i + 1.0)) *
             std::pow(q, i) * std::pow(1.0 - q, J - i);
  }
  std::vector<double> tail(J + 2, 0.0);
  for (int i = J; i >= 0; --i) tail[i] = tail[i + 1] + pmf[i];

  double value = static_cast<double>(fp.distinct());
  for (const auto& [j, hj] : fp.counts()) {
    if (j > static_cast<Count>(J)) break;
    const double sign = j % 2 == 1 ? 1.0 : -1.0;
    value += sign * std::pow(t, static_cast<double>(j)) * tail[j] * static_cast<double>(hj);
  }
  return make_estimate("et", value, fp);
}

Estimate good_toulmin(const Fingerprint& fp, double t) {
  require_samples(fp, 1, "gtoulmin");
  if (!(t > 0.0) || !std::isfinite(t)) throw ParameterError("Good-Toulmin t must be positive");
  double value = static_cast<double>(fp.distinct());
  for (const auto& [j, hj] : fp.counts()) {
    const double sign = j % 2 == 1 ? 1.0 : -1.0;
    value += sign * std::pow(t, static_cast<double>(j)) * static_cast<double>(hj);
  }
  return make_estimate("gtoulmin", value, fp);
}

EstimatorKind parse_estimator(std::string_view name) {
  if (name == "wy") return EstimatorKind::kWy;
  if (name == "plugin") return EstimatorKind::kPlugIn;
  if (name == "gt") return EstimatorKind::kGoodTuring;
  if (name == "cl1") return EstimatorKind::kChaoLee1;
  if (name == "cl2") return EstimatorKind::kChaoLee2;
  if (name == "et") return EstimatorKind::kEfronThisted;
  if (name == "gtoulmin") return EstimatorKind::kGoodToulmin;
  throw ParameterError("unknown estimator '" + std::string(name) +
                       "' (expected wy, plugin, gt, cl1, cl2, et, gtoulmin)");
}

std::string_view estimator_name(EstimatorKind kind) {
  switch (kind) {
    case EstimatorKind::kWy: return "wy";
    case EstimatorKind::kPlugIn: return "plugin";
    case EstimatorKind::kGoodTuring: return "gt";
    case EstimatorKind::kChaoLee1: return "cl1";
    case EstimatorKind::kChaoLee2: return "cl2";
    case EstimatorKind::kEfronThisted: return "et";
    case EstimatorKind::kGoodToulmin: return "gtoulmin";
  }
  throw InternalError("unhandled estimator kind");
}

Estimate evaluate(const EstimatorSpec& spec, const Fingerprint& fp) {
  Estimate e;
  switch (spec.kind) {
    case EstimatorKind::kWy:
      if (!spec.k) throw ParameterError("the wy estimator requires k (1 / minimum mass)");
      return wy_estimate(fp, *spec.k, spec.config);
    case EstimatorKind::kPlugIn: e = plug_in(fp); break;
    case EstimatorKind::kGoodTuring: e = good_turing(fp); break;
    case EstimatorKind::kChaoLee1: e = chao_lee(fp, 1); break;
    case EstimatorKind::kChaoLee2: e = chao_lee(fp, 2); break;
    case EstimatorKind::kEfronThisted: e = efron_thisted(fp, spec.et_t, spec.et_J); break;
    case EstimatorKind::kGoodToulmin: e = good_toulmin(fp, spec.gtoulmin_t); break;
  }
  e.k = spec.k;
  return e;
}

Estimate clamp_estimate(Estimate e, const Fingerprint& fp) {
  const double lower = static_cast<double>(fp.distinct());
  double value = std::max(e.value, lower);
  if (e.k) value = std::min(value, std::max(*e.k, lower));
  e.value = value;
  e.rounded = static_cast<std::int64_t>(std::llround(value));
  return e;
}

}  // namespace supportest
