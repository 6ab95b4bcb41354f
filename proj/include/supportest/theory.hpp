#pragma once

// Numerical laboratory for the lower-bound side: best uniform approximation
// of 1/x, its LP dual, moment-matched prior pairs, Poisson-mixture total
// variation, and the Le Cam sample-complexity certificate.

#include <vector>

namespace supportest {

// ---------------------------------------------------------------------------
// Best polynomial approximation of 1/x

struct ApproxResult {
  int degree = 0;
  double a = 0.0;
  double b = 0.0;
  /// Coefficients in the Chebyshev basis of [a, b]:
  /// p(x) = sum_k c_k T_k((2x - a - b)/(b - a)).
  std::vector<double> cheb_coeffs;
  /// E_degree(1/x, [a, b]).
  double error = 0.0;
  /// degree + 2 alternation points, ascending.
  std::vector<double> extrema;
  int iterations = 0;

  double evaluate(double x) const;
  /// 1/x - p(x).
  double residual(double x) const;
};

/// Remez exchange. Throws ParameterError unless 1 <= a < b and degree >= 0,
/// SolverError (with the last residual profile) on non-convergence.
ApproxResult best_inv_approx(int degree, double a, double b, int max_iterations = 100);

/// Closed form of E_{L-1}(1/x, [a, b]):
///   (1/2) ((1 + s)^2 / a) (1 - 2s/(1 + s))^L,  s = sqrt(a/b).
double closed_form_error(int L, double a, double b);

/// sup E[1/X] - E[1/X'] over X, X' supported on a grid of `grid_size`
/// Chebyshev-Lobatto points of [a, b] with E[X^j] = E[X'^j], j = 1..L.
/// Converges to 2 E_L(1/x, [a, b]). Requires grid_size >= L + 2.
double primal_value(int L, double a, double b, int grid_size);

// ---------------------------------------------------------------------------
// Moment-matched priors

struct DiscretePrior {
  std::vector<double> atoms;
  std::vector<double> weights;

  double moment(int j) const;
  double mass_at_zero() const;
};

/// U, U' on {0} u [1 + nu, lambda] with E[U] = E[U'] = 1 and matching
/// moments j = 1..L. `gap` = P[U' = 0] - P[U = 0] = 2 E_{L-1}(1/x, [1 + nu, lambda]).
struct PriorPair {
  DiscretePrior u;
  DiscretePrior u_prime;
  int L = 0;
  double nu = 0.0;
  double lambda = 0.0;
  double gap = 0.0;
};

/// Places the atoms of X, X' on the equioscillation points of the
/// degree-(L-1) best approximation (positive residual -> X, negative -> X')
/// and maps them to U, U' by P_U(du) = (1 - E[1/X]) delta_0 + u^-1 P_X(du).
PriorPair construct_prior_pair(int L, double nu, double lambda);

struct TvEstimate {
  /// Truncated sum over j <= cutoff.
  double lower = 0.0;
  /// lower + tail_bound + rounding allowance.
  double upper = 0.0;
  double tail_bound = 0.0;
  int cutoff = 0;
};

/// TV(E[Poi(scale U)], E[Poi(scale U')]). Throws PrecisionError when the
/// Chernoff tail bound beyond `cutoff` exceeds 1e-12.
TvEstimate tv_exact(const PriorPair& pair, double scale, int cutoff);
/// Chooses the smallest certified cutoff.
TvEstimate tv_exact(const PriorPair& pair, double scale);

/// Smallest cutoff whose tail bound is below `tolerance`.
int certified_cutoff(const PriorPair& pair, double scale, double tolerance = 1e-12);

struct TvBound {
  /// (Lambda/2)^{L+1}/(L+1)! (2 + 2^{Lambda/2 - L} + 2^{Lambda/(2 ln 2) - L})
  double full = 0.0;
  /// (e Lambda / (2L))^L
  double simplified = 0.0;
  double value = 0.0;
};

/// Bound on TV between Poisson mixtures whose mixing laws on [0, Lambda]
/// share their first L moments.
TvBound tv_bound(double Lambda, int L);

struct Certificate {
  bool valid = false;
  double lhs = 0.0;
  double gap = 0.0;
  double implied_epsilon = 0.0;
  /// Individual terms of lhs.
  double mass_term = 0.0;
  double support_term = 0.0;
  double tv_term = 0.0;
  /// implied_epsilon >= the requested epsilon.
  bool meets_target = false;
};

/// Checks 2 lambda/(k nu^2) + 2/(k alpha^2 d^2) + k (e n lambda / (2 k L))^L <= 0.6,
/// with d from construct_prior_pair(L, nu, lambda). When valid, n is a lower
/// bound on the Poissonized sample complexity at accuracy (1 - 2 alpha) d / 2.
Certificate lecam_certificate(double k, double n, double epsilon, int L, double lambda, double nu,
                              double alpha);

struct LowerBoundRecipe {
  int L = 0;
  double lambda = 0.0;
  double nu = 0.0;
  double alpha = 0.0;
  double n = 0.0;
};

/// L = floor(c0 ln k), lambda = (gamma ln k / ln(1/(2 eps)))^2,
/// n = C k / ln k ln^2(1/(2 eps)), alpha = k^{-1/3},
/// nu = sqrt(sqrt(lambda/k) (1 - 2 eps)).
LowerBoundRecipe lower_bound_recipe(double k, double epsilon, double c0, double gamma, double C);

/// Largest C allowed by the recipe's TV condition: 2 c0 / (e gamma^2) exp(-1/c0).
double recipe_max_constant(double c0, double gamma);

// ---------------------------------------------------------------------------
// Exponentially damped Chebyshev maximum and the rate envelope

struct ExpChebyMax {
  double x_star = 1.0;
  double value = 0.0;
  double log_value = 0.0;
  /// |tanh(L arccosh x*) alpha - sqrt(x*^2 - 1)|, alpha = L / beta.
  double residual = 0.0;
};

/// max_{x >= 1} e^{-beta x} T_L(x), via bisection on y = arccosh x of
/// tanh(L y)/sinh(y) = beta/L.
ExpChebyMax max_exp_cheby(double beta, int L);

/// max(sqrt(n ln k / k), n/k, 1).
double rate_envelope(double k, double n);

}  // namespace supportest
