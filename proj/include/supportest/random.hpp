#pragma once

// Seeded random generation with fully specified algorithms. The standard
// library fixes the output of std::mt19937_64 but not of its distributions,
// so every transform on top of the raw engine is implemented here.

#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace supportest {

std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// seed = splitmix64(splitmix64(master ^ splitmix64(stream)) ^ index).
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream, std::uint64_t index) noexcept;

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }
  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  /// Uniform integer in [0, bound). bound must be > 0.
  std::uint64_t below(std::uint64_t bound);
  /// Poisson(mean): CDF inversion below mean 12, Hormann's PTRS above.
  std::uint64_t poisson(double mean);

 private:
  std::mt19937_64 engine_;
};

/// Walker/Vose alias table for O(1) draws from a finite distribution.
class AliasTable {
 public:
  AliasTable() = default;
  /// Weights need not be normalized; all must be >= 0 with a positive sum.
  explicit AliasTable(std::span<const double> weights);

  std::size_t size() const noexcept { return prob_.size(); }
  std::size_t sample(Rng& rng) const;

 private:
  std::vector<double> prob_;
  std::vector<std::uint32_t> alias_;
};

}  // namespace supportest
