#include "supportest/theory.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <string>

#include "supportest/error.hpp"
#include "supportest/simplex.hpp"

namespace supportest {

namespace {

using Real = long double;

struct Interval {
  Real a;
  Real b;
  Real to_unit(Real x) const { return (2 * x - a - b) / (b - a); }
  Real from_unit(Real t) const { return (a + b) / 2 + (b - a) / 2 * t; }
  // Chebyshev-Lobatto point i of m + 1, ascending.
  Real lobatto(std::size_t i, std::size_t m) const {
    return from_unit(-std::cos(std::numbers::pi_v<Real> * static_cast<Real>(i) / static_cast<Real>(m)));
  }
};

Real clenshaw(const std::vector<Real>& c, Real t) {
  Real b1 = 0;
  Real b2 = 0;
  for (std::size_t k = c.size(); k-- > 1;) {
    const Real b0 = 2 * t * b1 - b2 + c[k];
    b2 = b1;
    b1 = b0;
  }
  return t * b1 - b2 + c[0];
}

// Gaussian elimination with partial pivoting; `m` is row-major n x n.
std::vector<Real> solve_dense(std::vector<Real> m, std::vector<Real> rhs) {
  const std::size_t n = rhs.size();
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < n; ++r) {
      if (std::fabs(m[r * n + col]) > std::fabs(m[piv * n + col])) piv = r;
    }
    if (m[piv * n + col] == 0) throw SolverError("singular Remez reference system");
    if (piv != col) {
      for (std::size_t j = 0; j < n; ++j) std::swap(m[col * n + j], m[piv * n + j]);
      std::swap(rhs[col], rhs[piv]);
    }
    for (std::size_t r = col + 1; r < n; ++r) {
      const Real f = m[r * n + col] / m[col * n + col];
      if (f == 0) continue;
      for (std::size_t j = col; j < n; ++j) m[r * n + j] -= f * m[col * n + j];
      rhs[r] -= f * rhs[col];
    }
  }
  std::vector<Real> x(n);
  for (std::size_t i = n; i-- > 0;) {
    Real s = rhs[i];
    for (std::size_t j = i + 1; j < n; ++j) s -= m[i * n + j] * x[j];
    x[i] = s / m[i * n + i];
  }
  return x;
}

struct Extremum {
  Real x;
  Real r;
};

class RemezSolver {
 public:
  RemezSolver(int degree, Real a, Real b) : degree_(degree), iv_{a, b} {}

  Real residual(Real x) const { return 1 / x - clenshaw(coeffs_, iv_.to_unit(x)); }

  // Solves p(x_i) + (-1)^i E = 1/x_i on the current reference.
  void level(const std::vector<Real>& ref) {
    const std::size_t n = ref.size();
    std::vector<Real> m(n * n);
    std::vector<Real> rhs(n);
    for (std::size_t i = 0; i < n; ++i) {
      const Real t = iv_.to_unit(ref[i]);
      Real tkm1 = 1;
      Real tk = t;
      for (std::size_t k = 0; k + 1 < n; ++k) {
        if (k == 0) {
          m[i * n] = 1;
        } else if (k == 1) {
          m[i * n + 1] = t;
        } else {
          const Real next = 2 * t * tk - tkm1;
          tkm1 = tk;
          tk = next;
          m[i * n + k] = tk;
        }
      }
      m[i * n + n - 1] = (i % 2 == 0) ? 1 : -1;
      rhs[i] = 1 / ref[i];
    }
    const std::vector<Real> sol = solve_dense(std::move(m), std::move(rhs));
    coeffs_.assign(sol.begin(), sol.end() - 1);
    levelled_ = sol.back();
  }

  // Alternating set of degree + 2 local extrema of the residual.
  std::vector<Extremum> extrema() const {
    const std::size_t grid = 2000 + 200 * static_cast<std::size_t>(degree_);
    std::vector<Real> xs(grid + 1);
    std::vector<Real> rs(grid + 1);
    for (std::size_t i = 0; i <= grid; ++i) {
      xs[i] = iv_.lobatto(i, grid);
      rs[i] = residual(xs[i]);
    }
    xs.front() = iv_.a;
    xs.back() = iv_.b;
    rs.front() = residual(iv_.a);
    rs.back() = residual(iv_.b);

    std::vector<Extremum> cands;
    for (std::size_t i = 0; i <= grid; ++i) {
      const Real s = rs[i] >= 0 ? 1 : -1;
      const bool left_ok = i == 0 || s * rs[i] >= s * rs[i - 1];
      const bool right_ok = i == grid || s * rs[i] >= s * rs[i + 1];
      if (!left_ok || !right_ok) continue;
      if (i == 0 || i == grid) {
        cands.push_back({xs[i], rs[i]});
      } else {
        cands.push_back(refine(xs[i - 1], xs[i + 1], s));
      }
    }

    std::vector<Extremum> alt;
    for (const Extremum& e : cands) {
      if (!alt.empty() && (alt.back().r >= 0) == (e.r >= 0)) {
        if (std::fabs(e.r) > std::fabs(alt.back().r)) alt.back() = e;
      } else {
        alt.push_back(e);
      }
    }
    const std::size_t want = static_cast<std::size_t>(degree_) + 2;
    while (alt.size() > want) {
      if (std::fabs(alt.front().r) < std::fabs(alt.back().r)) {
        alt.erase(alt.begin());
      } else {
        alt.pop_back();
      }
    }
    return alt;
  }

  const std::vector<Real>& coeffs() const { return coeffs_; }
  Real levelled() const { return levelled_; }

 private:
  Extremum refine(Real lo, Real hi, Real sign) const {
    static const Real kInvPhi = (std::sqrt(Real(5)) - 1) / 2;
    Real x1 = hi - kInvPhi * (hi - lo);
    Real x2 = lo + kInvPhi * (hi - lo);
    Real f1 = sign * residual(x1);
    Real f2 = sign * residual(x2);
    for (int it = 0; it < 200 && hi - lo > 1e-17L * (1 + std::fabs(hi)); ++it) {
      if (f1 < f2) {
        lo = x1;
        x1 = x2;
        f1 = f2;
        x2 = lo + kInvPhi * (hi - lo);
        f2 = sign * residual(x2);
      } else {
        hi = x2;
        x2 = x1;
        f2 = f1;
        x1 = hi - kInvPhi * (hi - lo);
        f1 = sign * residual(x1);
      }
    }
    const Real x = (lo + hi) / 2;
    return {x, residual(x)};
  }

  int degree_;
  Interval iv_;
  std::vector<Real> coeffs_;
  Real levelled_ = 0;
};

}  // namespace

double ApproxResult::evaluate(double x) const {
  const double t = (2.0 * x - a - b) / (b - a);
  double b1 = 0.0;
  double b2 = 0.0;
  for (std::size_t k = cheb_coeffs.size(); k-- > 1;) {
    const double b0 = 2.0 * t * b1 - b2 + cheb_coeffs[k];
    b2 = b1;
    b1 = b0;
  }
  return t * b1 - b2 + cheb_coeffs[0];
}

double ApproxResult::residual(double x) const { return 1.0 / x - evaluate(x); }

ApproxResult best_inv_approx(int degree, double a, double b, int max_iterations) {
  if (degree < 0) throw ParameterError("approximation degree must be >= 0");
  if (!(a >= 1.0) || !(b > a) || !std::isfinite(b)) throw ParameterError("best_inv_approx requires 1 <= a < b");

  RemezSolver solver(degree, a, b);
  const Interval iv{a, b};
  const std::size_t n = static_cast<std::size_t>(degree) + 2;
  std::vector<Real> ref(n);
  for (std::size_t i = 0; i < n; ++i) ref[i] = iv.lobatto(i, n - 1);

  std::vector<Extremum> ext;
  for (int it = 1; it <= max_iterations; ++it) {
    solver.level(ref);
    ext = solver.extrema();
    if (ext.size() < n) {
      throw SolverError("Remez: residual alternates on only " + std::to_string(ext.size()) +
                        " points, need " + std::to_string(n));
    }
    Real hi = 0;
    Real lo = std::numeric_limits<Real>::infinity();
    for (const Extremum& e : ext) {
      hi = std::max(hi, std::fabs(e.r));
      lo = std::min(lo, std::fabs(e.r));
    }
    for (std::size_t i = 0; i < n; ++i) ref[i] = ext[i].x;
    if (hi - lo <= 1e-12L * hi) {
      solver.level(ref);
      ApproxResult res;
      res.degree = degree;
      res.a = a;
      res.b = b;
      res.cheb_coeffs.assign(solver.coeffs().begin(), solver.coeffs().end());
      res.error = static_cast<double>(std::fabs(solver.levelled()));
      for (Real x : ref) res.extrema.push_back(static_cast<double>(x));
      res.iterations = it;
      return res;
    }
  }
  std::ostringstream msg;
  msg << "Remez exchange did not converge in " << max_iterations << " iterations; last residual profile:";
  for (const Extremum& e : ext) msg << " (" << static_cast<double>(e.x) << ", " << static_cast<double>(e.r) << ")";
  throw SolverError(msg.str());
}

double closed_form_error(int L, double a, double b) {
  if (L < 1) throw ParameterError("closed_form_error requires L >= 1");
  if (!(a >= 1.0) || !(b > a)) throw ParameterError("closed_form_error requires 1 <= a < b");
  const double s = std::sqrt(a / b);
  return 0.5 * (1.0 + s) * (1.0 + s) / a * std::pow((1.0 - s) / (1.0 + s), L);
}

double primal_value(int L, double a, double b, int grid_size) {
  if (L < 0) throw ParameterError("primal_value requires L >= 0");
  if (!(a >= 1.0) || !(b > a)) throw ParameterError("primal_value requires 1 <= a < b");
  if (grid_size < L + 2) throw ParameterError("grid_size must be >= L + 2");

  const Interval iv{a, b};
  const auto g = static_cast<std::size_t>(grid_size);
  std::vector<Real> xs(g);
  for (std::size_t i = 0; i < g; ++i) xs[i] = g == 1 ? iv.a : iv.lobatto(i, g - 1);
  xs.front() = a;
  xs.back() = b;

  // Columns: w_0..w_{g-1} (law of X), then w'_0..w'_{g-1} (law of X').
  // Moments are matched in the Chebyshev basis of [a, b], which spans the
  // same space as x^j and keeps the rows well scaled.
  LinearProgram lp;
  lp.rows = static_cast<std::size_t>(L) + 2;
  lp.cols = 2 * g;
  lp.A.assign(lp.rows * lp.cols, 0.0);
  lp.b.assign(lp.rows, 0.0);
  lp.c.assign(lp.cols, 0.0);
  lp.b[0] = 1.0;
  lp.b[1] = 1.0;
  for (std::size_t i = 0; i < g; ++i) {
    lp.at(0, i) = 1.0;
    lp.at(1, g + i) = 1.0;
    lp.c[i] = static_cast<double>(1 / xs[i]);
    lp.c[g + i] = -static_cast<double>(1 / xs[i]);
    const Real t = iv.to_unit(xs[i]);
    Real tkm1 = 1;
    Real tk = t;
    for (int j = 1; j <= L; ++j) {
      if (j > 1) {
        const Real next = 2 * t * tk - tkm1;
        tkm1 = tk;
        tk = next;
      }
      lp.at(1 + j, i) = static_cast<double>(tk);
      lp.at(1 + j, g + i) = -static_cast<double>(tk);
    }
  }
  const LpSolution sol = solve_lp(lp);
  if (sol.status != LpStatus::kOptimal) {
    throw InternalError("moment-matching LP did not reach optimality (status " +
                        std::to_string(static_cast<int>(sol.status)) + ")");
  }
  return sol.objective;
}

}  // namespace supportest
