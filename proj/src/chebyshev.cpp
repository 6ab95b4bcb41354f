#include "supportest/chebyshev.hpp"

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <cmath>
#include <string>

#include "supportest/error.hpp"

namespace supportest {

namespace {

using Quad = boost::multiprecision::cpp_bin_float_quad;

// T_L^{(j)}(x) for j = 0..jmax, via the recurrence differentiated j times:
//   T_{m+1}^{(j)} = 2x T_m^{(j)} + 2j T_m^{(j-1)} - T_{m-1}^{(j)}.
std::vector<Quad> derivatives_quad(int degree, const Quad& x, int jmax) {
  std::vector<Quad> prev(jmax + 1, Quad(0));
  std::vector<Quad> cur(jmax + 1, Quad(0));
  prev[0] = 1;
  if (degree == 0) return prev;
  cur[0] = x;
  if (jmax >= 1) cur[1] = 1;
  for (int m = 1; m < degree; ++m) {
    std::vector<Quad> next(jmax + 1);
    for (int j = 0; j <= jmax; ++j) {
      next[j] = 2 * x * cur[j] - prev[j];
      if (j > 0) next[j] += 2 * j * cur[j - 1];
    }
    prev = std::move(cur);
    cur = std::move(next);
  }
  return cur;
}

void check_interval(int degree, double l, double r) {
  if (degree < 1) throw ParameterError("Chebyshev degree must be >= 1, got " + std::to_string(degree));
  if (!(l > 0.0) || !(r > l) || !std::isfinite(r)) {
    throw ParameterError("interval requires 0 < l < r (l=" + std::to_string(l) +
                         ", r=" + std::to_string(r) + ")");
  }
}

// Normalized derivative ratios T_L^{(j)}(x0) / T_L(x0), j = 0..L, in quad.
std::vector<Quad> derivative_ratios(int degree, double l, double r) {
  const Quad lq(l);
  const Quad rq(r);
  const Quad x0 = -(rq + lq) / (rq - lq);
  std::vector<Quad> d = derivatives_quad(degree, x0, degree);
  const Quad t0 = d[0];
  for (Quad& v : d) v /= t0;
  return d;
}

}  // namespace

double cheb_eval(int degree, double x) {
  if (degree < 0) throw ParameterError("Chebyshev degree must be >= 0");
  if (degree == 0) return 1.0;
  if (std::fabs(x) <= 1.0) return std::cos(degree * std::acos(x));
  const double ax = std::fabs(x);
  const double z = ax + std::sqrt((ax - 1.0) * (ax + 1.0));
  const double zl = std::pow(z, degree);
  const double value = 0.5 * (zl + 1.0 / zl);
  return (x < 0.0 && degree % 2 == 1) ? -value : value;
}

std::vector<double> cheb_derivatives(int degree, double x, int jmax) {
  if (degree < 0) throw ParameterError("Chebyshev degree must be >= 0");
  if (jmax < 0 || jmax > degree) throw ParameterError("cheb_derivatives requires 0 <= jmax <= degree");
  const std::vector<Quad> d = derivatives_quad(degree, Quad(x), jmax);
  std::vector<double> out;
  out.reserve(d.size());
  for (const Quad& v : d) out.push_back(static_cast<double>(v));
  return out;
}

std::vector<double> shifted_coeffs(int degree, double l, double r) {
  return g_table(degree, l, r, 1.0).a;
}

CoefficientTable g_table(int degree, double l, double r, double n) {
  check_interval(degree, l, r);
  if (!(n >= 1.0) || !std::isfinite(n)) throw ParameterError("sample size n must be >= 1");

  const std::vector<Quad> ratio = derivative_ratios(degree, l, r);
  const Quad scale = Quad(2) / (Quad(r) - Quad(l));
  const Quad nq(n);

  CoefficientTable t;
  t.degree = degree;
  t.l = l;
  t.r = r;
  t.n = n;
  t.a.resize(degree + 1);
  t.a_extended.resize(degree + 1);
  t.g.resize(degree + 1);

  Quad scale_pow = 1;    // (2/(r-l))^j
  Quad factorial = 1;    // j!
  Quad n_pow = 1;        // n^j
  for (int j = 0; j <= degree; ++j) {
    if (j > 0) {
      scale_pow *= scale;
      factorial *= j;
      n_pow *= nq;
    }
    // a_j = -(2/(r-l))^j / j! * T^{(j)}(x0)/T(x0); the j! cancels in g.
    const Quad aj = -scale_pow / factorial * ratio[j];
    t.a[j] = static_cast<double>(aj);
    t.a_extended[j] = static_cast<long double>(aj);
    t.g[j] = j == 0 ? 0.0 : static_cast<double>(-scale_pow / n_pow * ratio[j] + 1);
  }
  t.a[0] = -1.0;
  t.a_extended[0] = -1.0L;
  return t;
}

double poly_eval(const CoefficientTable& table, double x) {
  long double acc = 0.0L;
  const long double xl = x;
  for (auto it = table.a_extended.rbegin(); it != table.a_extended.rend(); ++it) acc = acc * xl + *it;
  return static_cast<double>(acc);
}

double poly_eval_direct(int degree, double l, double r, double x) {
  check_interval(degree, l, r);
  const double t = (2.0 * x - r - l) / (r - l);
  const double x0 = -(r + l) / (r - l);
  return -cheb_eval(degree, t) / cheb_eval(degree, x0);
}

double sup_norm_on_interval(int degree, double l, double r) {
  check_interval(degree, l, r);
  return 1.0 / std::fabs(cheb_eval(degree, -(r + l) / (r - l)));
}

}  // namespace supportest
