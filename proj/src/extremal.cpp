#include <algorithm>
#include <cmath>

#include "supportest/error.hpp"
#include "supportest/theory.hpp"

namespace supportest {

ExpChebyMax max_exp_cheby(double beta, int L) {
  if (!(beta > 0.0) || !std::isfinite(beta)) throw ParameterError("beta must be positive");
  if (L < 1) throw ParameterError("L must be >= 1");

  const double target = beta / L;
  const double alpha = L / beta;
  // g(y) = tanh(L y) / sinh(y) decreases from L at y = 0+ to 0.
  auto g = [L](double y) { return std::tanh(L * y) / std::sinh(y); };

  ExpChebyMax out;
  double y = 0.0;
  if (target < L) {
    double lo = 0.0;
    double hi = 1.0;
    while (g(hi) > target) {
      lo = hi;
      hi *= 2.0;
    }
    for (int it = 0; it < 400 && hi - lo > 0.0; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (mid <= lo || mid >= hi) break;
      (g(mid) > target ? lo : hi) = mid;
    }
    y = 0.5 * (lo + hi);
  }
  out.x_star = std::cosh(y);
  // log(e^{-beta x} cosh(L y)) without overflow.
  out.log_value = -beta * out.x_star + L * y + std::log1p(std::exp(-2.0 * L * y)) - std::log(2.0);
  out.value = std::exp(out.log_value);
  out.residual = y == 0.0 ? 0.0 : std::fabs(std::tanh(L * y) * alpha - std::sinh(y));
  return out;
}

double rate_envelope(double k, double n) {
  if (!(k >= 2.0)) throw ParameterError("k must be >= 2");
  if (!(n >= 0.0)) throw ParameterError("n must be >= 0");
  return std::max({std::sqrt(n * std::log(k) / k), n / k, 1.0});
}

}  // namespace supportest
