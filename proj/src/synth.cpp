#include "supportest/synth.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <string>

#include "supportest/error.hpp"
#include "supportest/random.hpp"

namespace supportest {

DiscreteDistribution::DiscreteDistribution(std::vector<double> masses, std::string family_label)
    : masses_(std::move(masses)), min_mass_(0.0), label_(std::move(family_label)) {
  if (masses_.empty()) throw ParameterError("distribution needs at least one mass");
  // Kahan summation in long double keeps the check meaningful at k ~ 1e6.
  long double total = 0.0L;
  long double carry = 0.0L;
  min_mass_ = masses_.front();
  for (double p : masses_) {
    if (!(p > 0.0) || !std::isfinite(p)) throw ParameterError("masses must be finite and positive");
    min_mass_ = std::min(min_mass_, p);
    const long double y = static_cast<long double>(p) - carry;
    const long double t = total + y;
    carry = (t - total) - y;
    total = t;
  }
  if (std::fabs(static_cast<double>(total - 1.0L)) > 1e-12) {
    throw ParameterError("masses sum to " + std::to_string(static_cast<double>(total)) + ", not 1");
  }
}

namespace {

std::vector<double> normalize(const std::vector<long double>& weights, long double total_mass) {
  long double z = 0.0L;
  for (long double w : weights) z += w;
  std::vector<double> out;
  out.reserve(weights.size());
  for (long double w : weights) out.push_back(static_cast<double>(w / z * total_mass));
  return out;
}

}  // namespace

DiscreteDistribution make_uniform(std::size_t k) {
  if (k < 1) throw ParameterError("uniform family needs k >= 1");
  return DiscreteDistribution(std::vector<double>(k, 1.0 / static_cast<double>(k)),
                              "uniform:k=" + std::to_string(k));
}

DiscreteDistribution make_zipf(std::size_t k, double alpha) {
  if (k < 1) throw ParameterError("zipf family needs k >= 1");
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) throw ParameterError("zipf alpha must be >= 0");
  std::vector<long double> w(k);
  for (std::size_t i = 0; i < k; ++i) w[i] = std::pow(static_cast<long double>(i + 1), -static_cast<long double>(alpha));
  return DiscreteDistribution(normalize(w, 1.0L),
                              "zipf:k=" + std::to_string(k) + ",alpha=" + std::to_string(alpha));
}

DiscreteDistribution make_mixture(std::size_t k) {
  if (k < 4 || k % 2 != 0) throw ParameterError("mixture family needs an even k >= 4");
  const std::size_t half = k / 2;
  std::vector<long double> zipf_part(half);
  std::vector<long double> geom_part(half);
  const long double ratio = 1.0L - 2.0L / static_cast<long double>(k);
  long double g = 1.0L;
  for (std::size_t i = 0; i < half; ++i) {
    zipf_part[i] = 1.0L / static_cast<long double>(i + 1);
    geom_part[i] = g;
    g *= ratio;
  }
  std::vector<double> masses = normalize(zipf_part, 0.5L);
  const std::vector<double> tail = normalize(geom_part, 0.5L);
  masses.insert(masses.end(), tail.begin(), tail.end());
  return DiscreteDistribution(std::move(masses), "mixture:k=" + std::to_string(k));
}

namespace {

double parse_number(std::string_view key, std::string_view text) {
  double value = 0.0;
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end) {
    throw ParameterError("family parameter " + std::string(key) + " is not a number: '" +
                         std::string(text) + "'");
  }
  return value;
}

std::size_t parse_size(std::string_view key, std::string_view text) {
  const double v = parse_number(key, text);
  if (!(v >= 1.0) || v != std::floor(v) || v > 1e12) {
    throw ParameterError("family parameter " + std::string(key) + " must be a positive integer");
  }
  return static_cast<std::size_t>(v);
}

}  // namespace

DiscreteDistribution make_family(std::string_view spec) {
  const auto colon = spec.find(':');
  const std::string_view name = spec.substr(0, colon);
  std::map<std::string, std::string, std::less<>> params;
  if (colon != std::string_view::npos) {
    std::string_view rest = spec.substr(colon + 1);
    while (!rest.empty()) {
      const auto comma = rest.find(',');
      const std::string_view item = rest.substr(0, comma);
      rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
      const auto eq = item.find('=');
      if (eq == std::string_view::npos || eq == 0) {
        throw ParameterError("family parameters must look like key=value, got '" + std::string(item) + "'");
      }
      params[std::string(item.substr(0, eq))] = std::string(item.substr(eq + 1));
    }
  }
  auto take = [&](std::string_view key) -> std::string {
    auto it = params.find(key);
    if (it == params.end()) throw ParameterError("family '" + std::string(name) + "' needs " + std::string(key) + "=");
    std::string v = it->second;
    params.erase(it);
    return v;
  };
  auto finish = [&](DiscreteDistribution d) {
    if (!params.empty()) throw ParameterError("unknown family parameter '" + params.begin()->first + "'");
    return d;
  };

  if (name == "uniform") return finish(make_uniform(parse_size("k", take("k"))));
  if (name == "zipf") {
    const std::size_t k = parse_size("k", take("k"));
    const double alpha = parse_number("alpha", take("alpha"));
    return finish(make_zipf(k, alpha));
  }
  if (name == "mixture") return finish(make_mixture(parse_size("k", take("k"))));
  throw ParameterError("unknown family '" + std::string(name) + "' (expected uniform, zipf, mixture)");
}

double effective_k(const DiscreteDistribution& p) { return 1.0 / p.min_mass(); }

std::vector<Count> sample_iid_counts(const DiscreteDistribution& p, std::uint64_t n, std::uint64_t seed) {
  std::vector<Count> counts(p.support_size(), 0);
  if (n == 0) return counts;
  const AliasTable table(p.masses());
  Rng rng(seed);
  for (std::uint64_t t = 0; t < n; ++t) ++counts[table.sample(rng)];
  return counts;
}

std::vector<Count> sample_poissonized_counts(const DiscreteDistribution& p, double n, std::uint64_t seed) {
  if (!(n >= 0.0) || !std::isfinite(n)) throw ParameterError("Poissonized sample size must be >= 0");
  std::vector<Count> counts(p.support_size(), 0);
  if (n == 0.0) return counts;
  Rng rng(seed);
  const auto masses = p.masses();
  for (std::size_t i = 0; i < masses.size(); ++i) counts[i] = rng.poisson(n * masses[i]);
  return counts;
}

Histogram sample_iid(const DiscreteDistribution& p, std::uint64_t n, std::uint64_t seed) {
  return Histogram::from_dense(sample_iid_counts(p, n, seed));
}

Histogram sample_poissonized(const DiscreteDistribution& p, double n, std::uint64_t seed) {
  return Histogram::from_dense(sample_poissonized_counts(p, n, seed));
}

Fingerprint fingerprint_of_counts(std::span<const Count> counts) {
  std::map<Count, Count> h;
  for (Count c : counts) {
    if (c > 0) ++h[c];
  }
  return Fingerprint::from_counts(h);
}

}  // namespace supportest
