#include "supportest/harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <exception>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <map>
#include <mutex>
#include <thread>

#include "supportest/error.hpp"
#include "supportest/random.hpp"
#include "supportest/synth.hpp"

namespace supportest {

namespace {

// Runs fn(0..count-1) on up to `threads` workers. The first exception is
// rethrown after all workers stop.
template <typename Fn>
void parallel_for(std::size_t count, unsigned threads, Fn&& fn) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, count));
  if (threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (unsigned w = 0; w < threads; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= count || failed.load()) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
          failed = true;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

std::vector<Count> draw_counts(const DiscreteDistribution& p, Count n, Sampling sampling, std::uint64_t seed) {
  return sampling == Sampling::kIid ? sample_iid_counts(p, n, seed)
                                    : sample_poissonized_counts(p, static_cast<double>(n), seed);
}

// nullopt when the estimator is undefined on this sample.
std::optional<double> try_estimate(const EstimatorSpec& spec, const Fingerprint& fp) {
  if (fp.n() == 0 && spec.kind != EstimatorKind::kPlugIn) return std::nullopt;
  try {
    return evaluate(spec, fp).value;
  } catch (const UndefinedEstimatorError&) {
    return std::nullopt;
  }
}

EstimatorSpec make_spec(std::string_view name, double k, const EstimatorConfig& cfg, double et_t, int et_J,
                        double gtoulmin_t) {
  EstimatorSpec s;
  s.kind = parse_estimator(name);
  s.k = k;
  s.config = cfg;
  s.et_t = et_t;
  s.et_J = et_J;
  s.gtoulmin_t = gtoulmin_t;
  return s;
}

}  // namespace

Sampling parse_sampling(std::string_view name) {
  if (name == "iid") return Sampling::kIid;
  if (name == "poissonized" || name == "poisson") return Sampling::kPoissonized;
  throw ParameterError("sampling must be 'iid' or 'poissonized'");
}

std::vector<SweepRow> run_sweep(const SweepSpec& spec) {
  if (spec.n_grid.empty()) throw ParameterError("n grid must not be empty");
  for (std::size_t i = 1; i < spec.n_grid.size(); ++i) {
    if (spec.n_grid[i] <= spec.n_grid[i - 1]) throw ParameterError("n grid must be strictly increasing");
  }
  if (spec.trials < 1) throw ParameterError("trials must be >= 1");
  if (spec.estimators.empty()) throw ParameterError("at least one estimator is required");

  const DiscreteDistribution dist = make_family(spec.family);
  const double k = spec.k.value_or(effective_k(dist));
  const double truth = static_cast<double>(dist.support_size());
  std::vector<EstimatorSpec> specs;
  for (const auto& name : spec.estimators) {
    specs.push_back(make_spec(name, k, spec.config, spec.et_t, spec.et_J, spec.gtoulmin_t));
    // Surface configuration errors (e.g. a zero degree) before sampling.
    if (specs.back().kind == EstimatorKind::kWy) degree_params(k, 1.0, spec.config);
  }

  const std::size_t grid = spec.n_grid.size();
  const auto trials = static_cast<std::size_t>(spec.trials);
  const std::size_t ne = specs.size();
  std::vector<std::optional<double>> results(grid * trials * ne);

  parallel_for(grid * trials, spec.threads, [&](std::size_t task) {
    const std::size_t i = task / trials;
    const std::size_t t = task % trials;
    const auto counts = draw_counts(dist, spec.n_grid[i], spec.sampling, derive_seed(spec.seed, i, t));
    const Fingerprint fp = fingerprint_of_counts(counts);
    for (std::size_t e = 0; e < ne; ++e) results[task * ne + e] = try_estimate(specs[e], fp);
  });

  std::vector<SweepRow> rows;
  for (std::size_t e = 0; e < ne; ++e) {
    for (std::size_t i = 0; i < grid; ++i) {
      SweepRow row;
      row.estimator = std::string(estimator_name(specs[e].kind));
      row.n = spec.n_grid[i];
      row.trials = spec.trials;
      long double sum = 0.0L;
      long double sq_err = 0.0L;
      std::vector<double> values;
      for (std::size_t t = 0; t < trials; ++t) {
        const auto& v = results[(i * trials + t) * ne + e];
        if (!v) {
          ++row.undefined_count;
          continue;
        }
        values.push_back(*v);
        sum += *v;
        sq_err += (static_cast<long double>(*v) - truth) * (static_cast<long double>(*v) - truth);
      }
      if (!values.empty()) {
        const long double m = static_cast<long double>(values.size());
        const long double mean = sum / m;
        long double var = 0.0L;
        for (double v : values) var += (v - mean) * (v - mean);
        row.mean_estimate = static_cast<double>(mean);
        row.rmse = static_cast<double>(std::sqrt(sq_err / m));
        row.std_dev = values.size() > 1 ? static_cast<double>(std::sqrt(var / (m - 1))) : 0.0;
      }
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

// ---------------------------------------------------------------------------
// Serialization

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  if (ec != std::errc()) throw InternalError("double formatting failed");
  return std::string(buf, ptr);
}

namespace {

constexpr std::string_view kCsvHeader = "estimator,n,mean_estimate,rmse,std_dev,trials,undefined_count";

std::string optional_field(const std::optional<double>& v) { return v ? format_double(*v) : std::string(); }

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  for (;;) {
    const auto pos = line.find(sep);
    out.push_back(line.substr(0, pos));
    if (pos == std::string_view::npos) return out;
    line = line.substr(pos + 1);
  }
}

template <typename T>
T parse_field(std::string_view s, std::size_t line) {
  T v{};
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end) throw ParseError(line, "bad numeric field '" + std::string(s) + "'");
  return v;
}

std::optional<double> parse_optional(std::string_view s, std::size_t line) {
  if (s.empty()) return std::nullopt;
  if (s == "inf") return HUGE_VAL;
  if (s == "-inf") return -HUGE_VAL;
  if (s == "nan") return std::nan("");
  return parse_field<double>(s, line);
}

nlohmann::json optional_json(const std::optional<double>& v) {
  if (!v || !std::isfinite(*v)) return nullptr;
  return *v;
}

}  // namespace

std::string format_sweep_csv(const std::vector<SweepRow>& rows) {
  std::string out(kCsvHeader);
  out += '\n';
  for (const auto& r : rows) {
    out += r.estimator + ',' + std::to_string(r.n) + ',' + optional_field(r.mean_estimate) + ',' +
           optional_field(r.rmse) + ',' + optional_field(r.std_dev) + ',' + std::to_string(r.trials) + ',' +
           std::to_string(r.undefined_count) + '\n';
  }
  return out;
}

std::vector<SweepRow> parse_sweep_csv(std::string_view text) {
  std::vector<SweepRow> rows;
  std::size_t line_no = 0;
  bool header_seen = false;
  while (!text.empty()) {
    ++line_no;
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    if (!header_seen) {
      if (line != kCsvHeader) throw ParseError(line_no, "unexpected CSV header");
      header_seen = true;
      continue;
    }
    const auto f = split(line, ',');
    if (f.size() != 7) throw ParseError(line_no, "expected 7 fields, got " + std::to_string(f.size()));
    SweepRow r;
    r.estimator = std::string(f[0]);
    r.n = parse_field<Count>(f[1], line_no);
    r.mean_estimate = parse_optional(f[2], line_no);
    r.rmse = parse_optional(f[3], line_no);
    r.std_dev = parse_optional(f[4], line_no);
    r.trials = parse_field<int>(f[5], line_no);
    r.undefined_count = parse_field<int>(f[6], line_no);
    rows.push_back(std::move(r));
  }
  if (!header_seen) throw ParseError(1, "missing CSV header");
  return rows;
}

std::string format_sweep_json(const std::vector<SweepRow>& rows) {
  std::string out;
  for (const auto& r : rows) {
    nlohmann::ordered_json j;
    j["estimator"] = r.estimator;
    j["n"] = r.n;
    j["mean_estimate"] = optional_json(r.mean_estimate);
    j["rmse"] = optional_json(r.rmse);
    j["std_dev"] = optional_json(r.std_dev);
    j["trials"] = r.trials;
    j["undefined_count"] = r.undefined_count;
    out += j.dump();
    out += '\n';
  }
  return out;
}

void write_text(const std::string& text, const std::string& path) {
  if (path == "-") {
    std::cout << text;
    std::cout.flush();
    if (!std::cout) throw IoError("<stdout>", "write failed");
    return;
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(path, "cannot open for writing");
  out << text;
  out.flush();
  if (!out) throw IoError(path, "write failed");
}

void emit_csv(const std::vector<SweepRow>& rows, const std::string& path) { write_text(format_sweep_csv(rows), path); }

void emit_json(const std::vector<SweepRow>& rows, const std::string& path) {
  write_text(format_sweep_json(rows), path);
}

// ---------------------------------------------------------------------------
// Sample-complexity probe

std::pair<double, double> wilson_interval(int failures, int trials) {
  if (trials <= 0) throw ParameterError("Wilson interval needs trials > 0");
  if (failures < 0 || failures > trials) throw ParameterError("failures must lie in [0, trials]");
  constexpr double z = 1.96;
  const double n = trials;
  const double p = failures / n;
  const double denom = 1.0 + z * z / n;
  const double center = (p + z * z / (2.0 * n)) / denom;
  const double half = z / denom * std::sqrt(p * (1.0 - p) / n + z * z / (4.0 * n * n));
  return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

ProbeResult probe_sample_complexity(const ProbeSpec& spec) {
  const DiscreteDistribution dist = make_family(spec.family);
  const double k = effective_k(dist);
  const double truth = static_cast<double>(dist.support_size());
  if (!(spec.epsilon >= 1.0 / k - 1e-12 && spec.epsilon <= 0.5)) {
    throw ParameterError("epsilon must lie in [1/k, 1/2]");
  }
  if (!(spec.delta > 0.0 && spec.delta < 1.0)) throw ParameterError("delta must lie in (0, 1)");
  if (spec.trials < 1) throw ParameterError("trials must be >= 1");

  ProbeResult res;
  res.k = k;
  res.ceiling = spec.ceiling.value_or(static_cast<Count>(std::ceil(10.0 * k * std::log(k))));
  if (res.ceiling < 1) throw ParameterError("search ceiling must be >= 1");
  if (spec.epsilon >= 0.5) {
    // Any estimator within k/2 of the truth succeeds without samples.
    return res;
  }

  const EstimatorSpec est = make_spec(spec.estimator, k, spec.config, spec.et_t, spec.et_J, spec.gtoulmin_t);
  if (est.kind == EstimatorKind::kWy && !spec.ceiling) {
    // The polynomial estimator is undefined once r = c1 ln k / n drops to
    // l = 1/k, so the default search stops at the last n where it exists.
    // A Poissonized sample has N ~ Poi(n) draws; keep n + 6 sqrt(n) inside.
    degree_params(k, 1.0, spec.config);
    auto defined = [&](Count n) {
      double size = static_cast<double>(n);
      if (spec.sampling == Sampling::kPoissonized) size += std::ceil(6.0 * std::sqrt(size));
      const DegreeParams p = degree_params(k, size, spec.config);
      return p.r > p.l;
    };
    Count last = std::min(res.ceiling, static_cast<Count>(spec.config.c1 * k * std::log(k)));
    while (last > 1 && !defined(last)) --last;
    res.ceiling = std::max<Count>(last, 1);
  }
  const double threshold = spec.epsilon * k;
  const std::uint64_t search_stream = derive_seed(spec.seed, 0, 0);
  const std::uint64_t confirm_stream = derive_seed(spec.seed, 1, 0);

  auto failures_at = [&](Count n, int trials, std::uint64_t stream) {
    std::vector<char> failed(static_cast<std::size_t>(trials), 0);
    parallel_for(failed.size(), spec.threads, [&](std::size_t t) {
      const auto counts = draw_counts(dist, n, spec.sampling, derive_seed(stream, n, t));
      const auto value = try_estimate(est, fingerprint_of_counts(counts));
      failed[t] = !value || std::fabs(*value - truth) >= threshold;
    });
    ++res.evaluations;
    return static_cast<int>(std::count(failed.begin(), failed.end(), 1));
  };
  auto passes = [&](Count n) { return failures_at(n, spec.trials, search_stream) <= spec.delta * spec.trials; };

  if (!passes(res.ceiling)) {
    res.ceiling_reached = true;
    res.n_star = res.ceiling;
    const int f = failures_at(res.ceiling, 4 * spec.trials, confirm_stream);
    res.confirmation_trials = 4 * spec.trials;
    res.failure_rate = static_cast<double>(f) / res.confirmation_trials;
    std::tie(res.wilson_low, res.wilson_high) = wilson_interval(f, res.confirmation_trials);
    return res;
  }

  // Invariant: lo fails (or is 0), hi passes. Successful search points are
  // remembered so a failed confirmation can resume above it.
  Count lo = 0;
  Count hi = res.ceiling;
  std::map<Count, bool> passed{{res.ceiling, true}};
  for (int round = 0; round < 32; ++round) {
    while (hi - lo > std::max<Count>(1, hi / 100)) {
      const Count mid = lo + (hi - lo) / 2;
      const bool ok = passes(mid);
      passed[mid] = ok;
      (ok ? hi : lo) = mid;
    }
    const int confirm_trials = 4 * spec.trials;
    const int f = failures_at(hi, confirm_trials, confirm_stream);
    res.n_star = hi;
    res.confirmation_trials = confirm_trials;
    res.failure_rate = static_cast<double>(f) / confirm_trials;
    std::tie(res.wilson_low, res.wilson_high) = wilson_interval(f, confirm_trials);
    if (f <= spec.delta * confirm_trials) return res;
    if (hi == res.ceiling) {
      res.ceiling_reached = true;
      return res;
    }
    lo = hi;
    hi = res.ceiling;
    for (const auto& [n, ok] : passed) {
      if (n > lo && ok) {
        hi = n;
        break;
      }
    }
  }
  return res;
}

}  // namespace supportest
