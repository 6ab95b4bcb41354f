#include "supportest/random.hpp"

#include <cmath>
#include <limits>

#include "supportest/error.hpp"

namespace supportest {

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream, std::uint64_t index) noexcept {
  return splitmix64(splitmix64(master ^ splitmix64(stream)) ^ index);
}

std::uint64_t Rng::below(std::uint64_t bound) {
  if (bound == 0) throw ParameterError("Rng::below requires a positive bound");
  // Reject the low residue class so every value is equally likely.
  const std::uint64_t threshold = (0 - bound) % bound;
  for (;;) {
    const std::uint64_t x = engine_();
    if (x >= threshold) return x % bound;
  }
}

std::uint64_t Rng::poisson(double mean) {
  if (!(mean >= 0.0) || !std::isfinite(mean)) throw ParameterError("Poisson mean must be finite and >= 0");
  if (mean == 0.0) return 0;

  if (mean < 12.0) {
    const double u = uniform();
    double p = std::exp(-mean);
    double cdf = p;
    std::uint64_t k = 0;
    // The cap only matters when u lands within rounding of 1.
    while (u > cdf && k < 200) {
      ++k;
      p *= mean / static_cast<double>(k);
      cdf += p;
    }
    return k;
  }

  // PTRS: transformed rejection with squeeze (Hormann 1993).
  const double slam = std::sqrt(mean);
  const double loglam = std::log(mean);
  const double b = 0.931 + 2.53 * slam;
  const double a = -0.059 + 0.02483 * b;
  const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
  const double vr = 0.9277 - 3.6224 / (b - 2.0);
  for (;;) {
    const double u = uniform() - 0.5;
    const double v = uniform();
    const double us = 0.5 - std::fabs(u);
    const double k = std::floor((2.0 * a / us + b) * u + mean + 0.43);
    if (us >= 0.07 && v <= vr) return static_cast<std::uint64_t>(k);
    if (k < 0.0 || (us < 0.013 && v > us)) continue;
    if (std::log(v) + std::log(inv_alpha) - std::log(a / (us * us) + b) <=
        -mean + k * loglam - std::lgamma(k + 1.0)) {
      return static_cast<std::uint64_t>(k);
    }
  }
}

AliasTable::AliasTable(std::span<const double> weights) {
  const std::size_t m = weights.size();
  if (m == 0) throw ParameterError("alias table needs at least one weight");
  if (m > std::numeric_limits<std::uint32_t>::max()) throw ParameterError("alias table too large");
  double total = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw ParameterError("alias weights must be finite and >= 0");
    total += w;
  }
  if (!(total > 0.0)) throw ParameterError("alias weights must have a positive sum");

  prob_.assign(m, 0.0);
  alias_.assign(m, 0);
  std::vector<double> scaled(m);
  std::vector<std::uint32_t> small;
  std::vector<std::uint32_t> large;
  for (std::size_t i = 0; i < m; ++i) {
    scaled[i] = weights[i] * static_cast<double>(m) / total;
    (scaled[i] < 1.0 ? small : large).push_back(static_cast<std::uint32_t>(i));
  }
  while (!small.empty() && !large.empty()) {
    const std::uint32_t s = small.back();
    small.pop_back();
    const std::uint32_t g = large.back();
    prob_[s] = scaled[s];
    alias_[s] = g;
    scaled[g] = (scaled[g] + scaled[s]) - 1.0;
    if (scaled[g] < 1.0) {
      large.pop_back();
      small.push_back(g);
    }
  }
  for (std::uint32_t g : large) prob_[g] = 1.0;
  for (std::uint32_t s : small) prob_[s] = 1.0;
}

std::size_t AliasTable::sample(Rng& rng) const {
  const std::size_t column = rng.below(prob_.size());
  return rng.uniform() < prob_[column] ? column : alias_[column];
}

}  // namespace supportest
