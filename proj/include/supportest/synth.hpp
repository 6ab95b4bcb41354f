#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "supportest/ingest.hpp"

namespace supportest {

/// Finite distribution with strictly positive masses summing to 1 (1e-12).
class DiscreteDistribution {
 public:
  /// Throws ParameterError on empty input, non-positive masses or a total
  /// further than 1e-12 from one.
  DiscreteDistribution(std::vector<double> masses, std::string family_label);

  std::span<const double> masses() const noexcept { return masses_; }
  double min_mass() const noexcept { return min_mass_; }
  std::size_t support_size() const noexcept { return masses_.size(); }
  const std::string& label() const noexcept { return label_; }

 private:
  std::vector<double> masses_;
  double min_mass_;
  std::string label_;
};

DiscreteDistribution make_uniform(std::size_t k);
/// p_i proportional to i^-alpha, i = 1..k.
DiscreteDistribution make_zipf(std::size_t k, double alpha);
/// Half the mass on p_i ~ 1/i (i <= k/2), half on p_{k/2+i} ~ (1 - 2/k)^{i-1}.
/// k must be even and >= 4.
DiscreteDistribution make_mixture(std::size_t k);

/// "uniform:k=1000", "zipf:k=1000,alpha=0.5", "mixture:k=1000".
DiscreteDistribution make_family(std::string_view spec);

/// 1 / min_mass.
double effective_k(const DiscreteDistribution& p);

/// Multinomial(n, P) counts via an alias table; symbol id i = index of p_i.
Histogram sample_iid(const DiscreteDistribution& p, std::uint64_t n, std::uint64_t seed);
/// Independent N_i ~ Poisson(n p_i).
Histogram sample_poissonized(const DiscreteDistribution& p, double n, std::uint64_t seed);

/// Dense-count variants used by the simulation harness (index = symbol).
std::vector<Count> sample_iid_counts(const DiscreteDistribution& p, std::uint64_t n, std::uint64_t seed);
std::vector<Count> sample_poissonized_counts(const DiscreteDistribution& p, double n, std::uint64_t seed);

Fingerprint fingerprint_of_counts(std::span<const Count> counts);

}  // namespace supportest
