#pragma once
// Positive definite quadratic forms Q_A(x) = x^T A x, the derived matrix
// B(s) = tr(A) A - 2(s+1) A^2, and cubature over the unit sup-norm sphere:
// the surface functional V_Q(s) and its boundary derivative V_Q'(d/2 - 1).

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

#include "latsum/common.hpp"

namespace latsum {

using Mat = std::vector<std::vector<double>>;
using CMat = std::vector<std::vector<cplx>>;

struct QuadForm {
  int dim = 0;
  Mat matrix;      // symmetrized A
  Mat chol;        // lower triangular L with A = L L^T
  Mat inv_matrix;  // A^{-1}
  double det = 0;  // Delta = det A
  double trace = 0;
};

struct SurfaceRule {
  int order = 12;           // Gauss-Legendre points per axis per face
  int max_refinements = 5;  // order doublings before giving up
  double tol = 1e-10;       // successive-estimate difference target
};

struct QineqcReport {
  bool holds_leq = false;  // d Q_{A^2} <= tr(A) Q_A everywhere sampled
  bool holds_geq = false;
  bool indefinite = false;  // both strict signs observed
};

namespace detail {

inline Mat mat_mul(const Mat& a, const Mat& b) {
  int d = (int)a.size();
  Mat c(d, std::vector<double>(d, 0.0));
  for (int i = 0; i < d; ++i)
    for (int k = 0; k < d; ++k)
      for (int j = 0; j < d; ++j) c[i][j] += a[i][k] * b[k][j];
  return c;
}

// x^T M x for symmetric M.
inline double quad_eval(const Mat& m, const std::vector<double>& x) {
  int d = (int)m.size();
  double acc = 0;
  for (int i = 0; i < d; ++i) {
    double row = 0;
    for (int j = 0; j < d; ++j) row += m[i][j] * x[j];
    acc += x[i] * row;
  }
  return acc;
}

}  // namespace detail

inline QuadForm make_form(const Mat& entries) {
  int d = (int)entries.size();
  if (d < 1) throw DomainError("make_form: dimension must be at least 1");
  for (const auto& row : entries) {
    if ((int)row.size() != d)
      throw DomainError("make_form: matrix must be square");
    for (double v : row)
      if (!std::isfinite(v)) throw DomainError("make_form: entries must be finite");
  }
  QuadForm q;
  q.dim = d;
  q.matrix.assign(d, std::vector<double>(d));
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      q.matrix[i][j] = 0.5 * (entries[i][j] + entries[j][i]);
  q.chol.assign(d, std::vector<double>(d, 0.0));
  for (int j = 0; j < d; ++j) {
    double diag = q.matrix[j][j];
    for (int k = 0; k < j; ++k) diag -= q.chol[j][k] * q.chol[j][k];
    if (!(diag > 0.0))
      throw NotPositiveDefinite("make_form: nonpositive Cholesky pivot");
    q.chol[j][j] = std::sqrt(diag);
    for (int i = j + 1; i < d; ++i) {
      double v = q.matrix[i][j];
      for (int k = 0; k < j; ++k) v -= q.chol[i][k] * q.chol[j][k];
      q.chol[i][j] = v / q.chol[j][j];
    }
  }
  q.det = 1.0;
  for (int j = 0; j < d; ++j) q.det *= q.chol[j][j] * q.chol[j][j];
  q.trace = 0.0;
  for (int j = 0; j < d; ++j) q.trace += q.matrix[j][j];
  // A^{-1} column by column: L y = e_i, then L^T x = y.
  q.inv_matrix.assign(d, std::vector<double>(d, 0.0));
  std::vector<double> y(d), x(d);
  for (int c = 0; c < d; ++c) {
    for (int i = 0; i < d; ++i) {
      double v = (i == c) ? 1.0 : 0.0;
      for (int k = 0; k < i; ++k) v -= q.chol[i][k] * y[k];
      y[i] = v / q.chol[i][i];
    }
    for (int i = d - 1; i >= 0; --i) {
      double v = y[i];
      for (int k = i + 1; k < d; ++k) v -= q.chol[k][i] * x[k];
      x[i] = v / q.chol[i][i];
    }
    for (int i = 0; i < d; ++i) q.inv_matrix[i][c] = x[i];
  }
  return q;
}

// x^T A x as |L^T x|^2: nonnegative by construction.
inline double q_value(const QuadForm& q, const std::vector<double>& x) {
  if ((int)x.size() != q.dim)
    throw DomainError("q_value: vector length must match the form dimension");
  double acc = 0;
  for (int i = 0; i < q.dim; ++i) {
    double v = 0;
    for (int j = i; j < q.dim; ++j) v += q.chol[j][i] * x[j];
    acc += v * v;
  }
  return acc;
}

inline QuadForm inverse_form(const QuadForm& q) { return make_form(q.inv_matrix); }

// B(s) = tr(A) A - 2(s+1) A^2.
inline CMat b_matrix(const QuadForm& q, cplx s) {
  Mat a2 = detail::mat_mul(q.matrix, q.matrix);
  CMat b(q.dim, std::vector<cplx>(q.dim));
  cplx two_s1 = 2.0 * (s + 1.0);
  for (int i = 0; i < q.dim; ++i)
    for (int j = 0; j < q.dim; ++j)
      b[i][j] = q.trace * q.matrix[i][j] - two_s1 * a2[i][j];
  return b;
}

// Integral of f over the boundary of the unit sup-norm ball, the 2d faces
// {x : x_j = +-1, |x_k| <= 1}.  Tensor Gauss-Legendre per face; the order is
// doubled until two successive estimates differ by less than rule.tol.  The
// last difference is the error estimate; a result that never met the target
// is returned with converged = false rather than thrown away.
template <typename F>
SeriesResult surface_integral(int d, F&& f, SurfaceRule rule = {}) {
  if (d < 1) throw DomainError("surface_integral: dimension must be at least 1");
  if (rule.order < 2 || rule.tol <= 0.0)
    throw DomainError("surface_integral: order must be >= 2 and tol > 0");
  long evals = 0;
  if (d == 1) {
    cplx v = f(std::vector<double>{1.0}) + f(std::vector<double>{-1.0});
    return {v, 0.0, 2, true};
  }
  // scale accumulates sum |w f|; the rounding floor 1e-15 * scale keeps the
  // error estimate honest when the integral itself cancels to near zero.
  double scale = 0.0;
  auto pass = [&](int order) {
    const GaussRule& g = gauss_legendre(order);
    Kahan<cplx> acc;
    Kahan<double> mag;
    std::vector<double> x(d);
    std::vector<int> idx(d - 1);
    for (int face = 0; face < d; ++face) {
      for (int sign = 0; sign < 2; ++sign) {
        std::fill(idx.begin(), idx.end(), 0);
        for (;;) {
          double w = 1.0;
          int pos = 0;
          for (int k = 0; k < d; ++k) {
            if (k == face) {
              x[k] = sign ? -1.0 : 1.0;
            } else {
              x[k] = g.x[idx[pos]];
              w *= g.w[idx[pos]];
              ++pos;
            }
          }
          cplx fx = w * f(x);
          acc.add(fx);
          mag.add(std::abs(fx));
          ++evals;
          int c = d - 2;
          while (c >= 0 && ++idx[c] == order) idx[c--] = 0;
          if (c < 0) break;
        }
      }
    }
    scale = mag.value();
    return acc.value();
  };
  int refinements = std::max(1, rule.max_refinements);
  cplx prev = pass(rule.order);
  double diff = 0.0;
  for (int r = 1; r <= refinements; ++r) {
    cplx cur = pass(rule.order << r);
    diff = std::abs(cur - prev);
    prev = cur;
    if (diff < rule.tol)
      return {cur, std::max(diff, 1e-15 * scale), evals, true};
  }
  return {prev, std::max(diff, 1e-15 * scale), evals, false};
}

// V_Q(s): surface integral of Q_{B(s)}(x) / Q_A(x)^{s+2}.  Since
// Q_{B(s)} = tr(A) Q_A - 2(s+1) Q_{A^2}, only the two real quadratics are
// evaluated per node.
inline SeriesResult v_q(const QuadForm& q, cplx s, SurfaceRule rule = {}) {
  Mat a2 = detail::mat_mul(q.matrix, q.matrix);
  cplx two_s1 = 2.0 * (s + 1.0);
  cplx expo = -(s + 2.0);
  auto f = [&](const std::vector<double>& x) -> cplx {
    double qa = detail::quad_eval(q.matrix, x);
    double qa2 = detail::quad_eval(a2, x);
    return (q.trace * qa - two_s1 * qa2) * std::exp(expo * std::log(qa));
  };
  return surface_integral(q.dim, f, rule);
}

// V_Q'(d/2 - 1) from the analytic expression
//   -4 tr(A) / (d sqrt(Delta)) pi^{d/2} / Gamma(d/2)
//   - surface integral of [tr(A) Q_A - d Q_{A^2}] Q_A^{-d/2-1} log Q_A,
// cross-checked against a central finite difference of V_Q at the boundary.
inline SeriesResult v_q_prime_boundary(const QuadForm& q, SurfaceRule rule = {}) {
  int d = q.dim;
  double closed = -4.0 * q.trace / (d * std::sqrt(q.det)) *
                  std::pow(pi, 0.5 * d) / std::tgamma(0.5 * d);
  Mat a2 = detail::mat_mul(q.matrix, q.matrix);
  double expo = -(0.5 * d + 1.0);
  auto f = [&](const std::vector<double>& x) -> cplx {
    double qa = detail::quad_eval(q.matrix, x);
    double qa2 = detail::quad_eval(a2, x);
    double lq = std::log(qa);
    return cplx((q.trace * qa - d * qa2) * std::pow(qa, expo) * lq, 0.0);
  };
  SeriesResult integral = surface_integral(d, f, rule);
  double value = closed - integral.value.real();
  // Central difference of V_Q; the analytic value is authoritative, the
  // difference quotient only guards against sign and factor slips.
  double h = 1e-4;
  cplx s0(0.5 * d - 1.0, 0.0);
  SeriesResult vp = v_q(q, s0 + h, rule);
  SeriesResult vm = v_q(q, s0 - h, rule);
  double fd = (vp.value.real() - vm.value.real()) / (2.0 * h);
  double cub_err = integral.abs_err_estimate +
                   (vp.abs_err_estimate + vm.abs_err_estimate) / (2.0 * h);
  double tol = std::max(1e-6, 10.0 * cub_err);
  if (std::abs(value - fd) > tol)
    throw CrossCheckFailure("v_q_prime_boundary: analytic value and finite "
                            "difference disagree");
  SeriesResult out;
  out.value = cplx(value, 0.0);
  out.abs_err_estimate = integral.abs_err_estimate + 1e-14 * std::abs(closed);
  out.terms_used = integral.terms_used + vp.terms_used + vm.terms_used;
  out.converged = integral.converged && vp.converged && vm.converged;
  return out;
}

// Samples g(x) = d Q_{A^2}(x) - tr(A) Q_A(x) on a uniform grid over every
// face of the unit sup-norm sphere and reports its sign pattern.  A
// sufficient-condition detector, not a proof.
inline QineqcReport qineqc_check(const QuadForm& q, int grid_per_face) {
  if (grid_per_face < 2)
    throw DomainError("qineqc_check: grid_per_face must be at least 2");
  int d = q.dim;
  Mat a2 = detail::mat_mul(q.matrix, q.matrix);
  std::vector<double> g_vals;
  std::vector<double> x(d);
  std::vector<int> idx(d > 1 ? d - 1 : 0);
  double gmax = 0.0;
  for (int face = 0; face < d; ++face) {
    for (int sign = 0; sign < 2; ++sign) {
      std::fill(idx.begin(), idx.end(), 0);
      for (;;) {
        int pos = 0;
        for (int k = 0; k < d; ++k) {
          if (k == face)
            x[k] = sign ? -1.0 : 1.0;
          else
            x[k] = -1.0 + 2.0 * idx[pos++] / (grid_per_face - 1);
        }
        double g = d * detail::quad_eval(a2, x) -
                   q.trace * detail::quad_eval(q.matrix, x);
        g_vals.push_back(g);
        gmax = std::max(gmax, std::abs(g));
        if (d == 1) break;
        int c = d - 2;
        while (c >= 0 && ++idx[c] == grid_per_face) idx[c--] = 0;
        if (c < 0) break;
      }
      if (d == 1 && sign == 1) break;
    }
  }
  double eps = 1e-10 * std::max(gmax, q.trace);
  QineqcReport rep;
  rep.holds_leq = true;
  rep.holds_geq = true;
  for (double g : g_vals) {
    if (g > eps) rep.holds_leq = false;
    if (g < -eps) rep.holds_geq = false;
  }
  rep.indefinite = !rep.holds_leq && !rep.holds_geq;
  return rep;
}

}  // namespace latsum
