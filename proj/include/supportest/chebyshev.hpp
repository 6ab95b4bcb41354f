#pragma once

// Shifted Chebyshev polynomial P_L on [l, r] normalized so P_L(0) = -1, its
// monomial coefficients a_j and the linear-estimator weights g_L(j).

#include <cstdint>
#include <vector>

namespace supportest {

/// T_L(x) for any real x. Uses cos(L acos x) on [-1, 1] and
/// (z^L + z^-L)/2 with z + 1/z = 2|x| outside, with T_L(-x) = (-1)^L T_L(x).
double cheb_eval(int degree, double x);

/// T_L^{(0)}(x), ..., T_L^{(jmax)}(x) from the differentiated three-term
/// recurrence, computed in quad precision and rounded at the end.
/// Requires 0 <= jmax <= degree.
std::vector<double> cheb_derivatives(int degree, double x, int jmax);

/// Monomial coefficients a_0..a_L of
///   P_L(x) = -T_L((2x - r - l)/(r - l)) / T_L(-(r + l)/(r - l)).
/// a_0 = -1 exactly. Throws ParameterError unless 0 < l < r and L >= 1.
std::vector<double> shifted_coeffs(int degree, double l, double r);

/// Everything needed to evaluate the polynomial estimator for one (L, l, r, n).
struct CoefficientTable {
  int degree = 0;
  double l = 0.0;
  double r = 0.0;
  double n = 0.0;
  /// a_0..a_L rounded to double; a[0] == -1.
  std::vector<double> a;
  /// g_L(0)..g_L(L); g[0] == 0 and g[j] = a_j j!/n^j + 1.
  std::vector<double> g;
  /// a_j rounded to long double, used by poly_eval. The monomial form loses
  /// roughly log10(T_L(3)) digits on [l, r], which double cannot absorb for L >= 10.
  std::vector<long double> a_extended;

  /// Weight applied to h_j: g[j] for j <= L, 1 beyond.
  double weight(std::uint64_t j) const noexcept {
    return j <= static_cast<std::uint64_t>(degree) ? g[j] : 1.0;
  }
};

/// Throws ParameterError unless 0 < l < r, L >= 1 and n >= 1.
CoefficientTable g_table(int degree, double l, double r, double n);

/// P_L(x) by Horner's scheme over the table's monomial coefficients.
double poly_eval(const CoefficientTable& table, double x);

/// P_L(x) through the shifted Chebyshev form; independent of the coefficients.
double poly_eval_direct(int degree, double l, double r, double x);

/// 1/|T_L(-(r + l)/(r - l))|, the sup norm of P_L on [l, r].
double sup_norm_on_interval(int degree, double l, double r);

}  // namespace supportest
