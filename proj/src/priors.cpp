#include <boost/multiprecision/cpp_bin_float.hpp>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "supportest/error.hpp"
#include "supportest/theory.hpp"

namespace supportest {

namespace {

using Quad = boost::multiprecision::cpp_bin_float_quad;

constexpr double kTailTolerance = 1e-12;

// Chernoff bound on P[Poi(mu) >= c]: e^{-mu} (e mu / c)^c for c > mu.
double poisson_tail_bound(double mu, int c) {
  if (mu <= 0.0) return c >= 1 ? 0.0 : 1.0;
  const double cc = static_cast<double>(c);
  if (cc <= mu) return 1.0;
  return std::exp(-mu + cc * (1.0 + std::log(mu / cc)));
}

// Mixture-weighted tail mass beyond `cutoff` for one prior, halved as it
// enters the total variation.
double prior_tail(const DiscretePrior& p, double scale, int cutoff) {
  double tail = 0.0;
  for (std::size_t i = 0; i < p.atoms.size(); ++i) {
    tail += p.weights[i] * poisson_tail_bound(scale * p.atoms[i], cutoff + 1);
  }
  return tail;
}

double pair_tail(const PriorPair& pair, double scale, int cutoff) {
  return 0.5 * (prior_tail(pair.u, scale, cutoff) + prior_tail(pair.u_prime, scale, cutoff));
}

// E[Poi(scale U) = j] for j = 0..cutoff.
std::vector<Quad> mixture_pmf(const DiscretePrior& p, double scale, int cutoff) {
  std::vector<Quad> pmf(cutoff + 1, Quad(0));
  for (std::size_t i = 0; i < p.atoms.size(); ++i) {
    const Quad mu = Quad(scale) * Quad(p.atoms[i]);
    const Quad w(p.weights[i]);
    Quad term = boost::multiprecision::exp(-mu);
    for (int j = 0; j <= cutoff; ++j) {
      if (j > 0) term = term * mu / j;
      pmf[j] += w * term;
    }
  }
  return pmf;
}

void check_prior(const DiscretePrior& p, const char* name) {
  if (p.atoms.size() != p.weights.size()) {
    throw ParameterError(std::string(name) + ": atoms and weights differ in length");
  }
  for (std::size_t i = 0; i < p.atoms.size(); ++i) {
    if (!(p.atoms[i] >= 0.0) || !(p.weights[i] >= 0.0)) {
      throw ParameterError(std::string(name) + ": atoms and weights must be >= 0");
    }
  }
}

}  // namespace

double DiscretePrior::moment(int j) const {
  long double s = 0.0L;
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    s += static_cast<long double>(weights[i]) * std::pow(static_cast<long double>(atoms[i]), j);
  }
  return static_cast<double>(s);
}

double DiscretePrior::mass_at_zero() const {
  double s = 0.0;
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    if (atoms[i] == 0.0) s += weights[i];
  }
  return s;
}

PriorPair construct_prior_pair(int L, double nu, double lambda) {
  if (L < 1) throw ParameterError("prior pair requires L >= 1");
  if (!(nu >= 0.0)) throw ParameterError("prior pair requires nu >= 0");
  if (!(lambda > 1.0 + nu) || !std::isfinite(lambda)) throw ParameterError("prior pair requires lambda > 1 + nu");

  const ApproxResult approx = best_inv_approx(L - 1, 1.0 + nu, lambda);
  const std::vector<double>& x = approx.extrema;
  const std::size_t m = x.size();

  // Divided-difference weights annihilate every polynomial of degree < L, so
  // sum_i mu_i x_i^j = 0 for j = 0..L-1. Their signs alternate like the residual.
  std::vector<long double> mu(m);
  long double smallest_gap = std::numeric_limits<long double>::infinity();
  for (std::size_t i = 0; i < m; ++i) {
    long double prod = 1.0L;
    for (std::size_t k = 0; k < m; ++k) {
      if (k == i) continue;
      const long double d = static_cast<long double>(x[i]) - x[k];
      smallest_gap = std::min(smallest_gap, std::fabs(d));
      prod *= d;
    }
    mu[i] = 1.0L / prod;
  }
  if (!(smallest_gap > 0.0L) || !std::isfinite(static_cast<double>(smallest_gap))) {
    throw SolverError("moment system is singular: equioscillation points are not distinct");
  }
  if ((mu[0] > 0) != (approx.residual(x[0]) > 0)) {
    for (auto& v : mu) v = -v;
  }

  long double pos = 0.0L;
  long double neg = 0.0L;
  for (long double v : mu) (v > 0 ? pos : neg) += std::fabs(v);
  if (std::fabs(pos - neg) > 1e-9L * pos) {
    throw SolverError("moment system is ill-conditioned: weight totals " + std::to_string(static_cast<double>(pos)) +
                      " vs " + std::to_string(static_cast<double>(neg)));
  }

  auto to_u = [&](bool positive) {
    DiscretePrior u;
    long double inv_mean = 0.0L;
    std::vector<double> atoms;
    std::vector<double> weights;
    for (std::size_t i = 0; i < m; ++i) {
      if ((mu[i] > 0) != positive) continue;
      const long double w = std::fabs(mu[i]) / pos;
      inv_mean += w / x[i];
      atoms.push_back(x[i]);
      weights.push_back(static_cast<double>(w / x[i]));
    }
    u.atoms.push_back(0.0);
    u.weights.push_back(static_cast<double>(1.0L - inv_mean));
    u.atoms.insert(u.atoms.end(), atoms.begin(), atoms.end());
    u.weights.insert(u.weights.end(), weights.begin(), weights.end());
    return std::pair{u, inv_mean};
  };

  auto [u, inv_x] = to_u(true);
  auto [u_prime, inv_x_prime] = to_u(false);

  PriorPair pair;
  pair.u = std::move(u);
  pair.u_prime = std::move(u_prime);
  pair.L = L;
  pair.nu = nu;
  pair.lambda = lambda;
  pair.gap = static_cast<double>(inv_x - inv_x_prime);
  return pair;
}

int certified_cutoff(const PriorPair& pair, double scale, double tolerance) {
  if (!(scale >= 0.0) || !std::isfinite(scale)) throw ParameterError("scale must be finite and >= 0");
  double max_mu = 0.0;
  for (double a : pair.u.atoms) max_mu = std::max(max_mu, scale * a);
  for (double a : pair.u_prime.atoms) max_mu = std::max(max_mu, scale * a);
  int c = static_cast<int>(std::ceil(max_mu));
  while (pair_tail(pair, scale, c) > tolerance) {
    if (c > 100000000) throw PrecisionError("no cutoff certifies the Poisson tail");
    c += 1 + c / 64;
  }
  // Step back to the smallest certified value.
  while (c > 0 && pair_tail(pair, scale, c - 1) <= tolerance) --c;
  return c;
}

TvEstimate tv_exact(const PriorPair& pair, double scale, int cutoff) {
  if (!(scale >= 0.0) || !std::isfinite(scale)) throw ParameterError("scale must be finite and >= 0");
  if (cutoff < 0) throw ParameterError("cutoff must be >= 0");
  check_prior(pair.u, "U");
  check_prior(pair.u_prime, "U'");

  TvEstimate est;
  est.cutoff = cutoff;
  est.tail_bound = pair_tail(pair, scale, cutoff);
  if (est.tail_bound > kTailTolerance) {
    throw PrecisionError("cutoff " + std::to_string(cutoff) + " leaves a Poisson tail bound of " +
                         std::to_string(est.tail_bound) + " (> 1e-12); use at least " +
                         std::to_string(certified_cutoff(pair, scale, kTailTolerance)));
  }
  const std::vector<Quad> p = mixture_pmf(pair.u, scale, cutoff);
  const std::vector<Quad> q = mixture_pmf(pair.u_prime, scale, cutoff);
  Quad sum = 0;
  for (int j = 0; j <= cutoff; ++j) sum += boost::multiprecision::abs(p[j] - q[j]);
  const double lower = static_cast<double>(sum / 2);
  est.lower = lower;
  // The quad sum is accurate far beyond double; only the final rounding counts.
  const double allowance = 2.0 * std::numeric_limits<double>::epsilon() * lower + 1e-30;
  est.upper = lower + est.tail_bound + allowance;
  return est;
}

TvEstimate tv_exact(const PriorPair& pair, double scale) {
  return tv_exact(pair, scale, certified_cutoff(pair, scale, 1e-16));
}

TvBound tv_bound(double Lambda, int L) {
  if (!(Lambda > 0.0) || !std::isfinite(Lambda)) throw ParameterError("tv_bound requires Lambda > 0");
  if (L < 1) throw ParameterError("tv_bound requires L >= 1");
  const double lead = std::exp((L + 1) * std::log(Lambda / 2.0) - std::lgamma(L + 2.0));
  TvBound b;
  b.full = lead * (2.0 + std::exp2(Lambda / 2.0 - L) + std::exp2(Lambda / (2.0 * std::numbers::ln2) - L));
  b.simplified = std::pow(std::numbers::e * Lambda / (2.0 * L), L);
  b.value = std::min(b.full, b.simplified);
  return b;
}

Certificate lecam_certificate(double k, double n, double epsilon, int L, double lambda, double nu, double alpha) {
  if (!(k > 0.0)) throw ParameterError("k must be positive");
  if (!(n >= 0.0)) throw ParameterError("n must be >= 0");
  if (!(alpha > 0.0 && alpha < 0.5)) throw ParameterError("alpha must lie in (0, 1/2)");
  const PriorPair pair = construct_prior_pair(L, nu, lambda);

  Certificate c;
  c.gap = pair.gap;
  c.mass_term = 2.0 * lambda / (k * nu * nu);
  c.support_term = 2.0 / (k * alpha * alpha * c.gap * c.gap);
  c.tv_term = k * std::pow(std::numbers::e * n * lambda / (2.0 * k * L), L);
  c.lhs = c.mass_term + c.support_term + c.tv_term;
  c.valid = c.lhs <= 0.6;
  c.implied_epsilon = (1.0 - 2.0 * alpha) * c.gap / 2.0;
  c.meets_target = c.implied_epsilon >= epsilon;
  return c;
}

LowerBoundRecipe lower_bound_recipe(double k, double epsilon, double c0, double gamma, double C) {
  if (!(k >= 2.0)) throw ParameterError("k must be >= 2");
  if (!(epsilon > 0.0 && epsilon < 0.5)) throw ParameterError("epsilon must lie in (0, 1/2)");
  if (!(c0 > 0.0) || !(gamma > 0.0) || !(C > 0.0)) throw ParameterError("c0, gamma and C must be positive");
  const double lnk = std::log(k);
  const double ell = std::log(1.0 / (2.0 * epsilon));
  LowerBoundRecipe r;
  r.L = static_cast<int>(std::floor(c0 * lnk));
  if (r.L < 1) throw ParameterError("c0 ln k < 1: degree would be zero");
  r.lambda = std::pow(gamma * lnk / ell, 2);
  r.n = C * k / lnk * ell * ell;
  r.alpha = std::cbrt(1.0 / k);
  r.nu = std::sqrt(std::sqrt(r.lambda / k) * (1.0 - 2.0 * epsilon));
  return r;
}

double recipe_max_constant(double c0, double gamma) {
  if (!(c0 > 0.0) || !(gamma > 0.0)) throw ParameterError("c0 and gamma must be positive");
  return 2.0 * c0 / (std::numbers::e * gamma * gamma) * std::exp(-1.0 / c0);
}

}  // namespace supportest
