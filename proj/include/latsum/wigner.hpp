#pragma once
// Truncated lattice sums alpha_N over expanding regions, the matching
// truncated integrals beta_N, their differences sigma_N, extrapolated limits,
// and the jump of the limit at s = d/2 - 1.

#include <latsum/common.hpp>
#include <latsum/epstein.hpp>
#include <latsum/lattice.hpp>
#include <latsum/quadform.hpp>
#include <latsum/specfun.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <complex>
#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

namespace latsum {

struct WignerEval {
  cplx s;
  TruncationRegion region;
  cplx alpha_n;
  cplx beta_n;
  cplx sigma_n;  // alpha_n - beta_n by construction
  double n = 0.0;
};

enum class LimitModelKind { PowerTail, Richardson };

struct LimitModel {
  LimitModelKind kind = LimitModelKind::PowerTail;
  std::vector<double> exponents;  // inverse powers of N in the fitted basis
  int order = 0;                  // Richardson only
};

struct LimitEstimate {
  cplx value;
  LimitModel model;
  double abs_err_estimate = 0.0;
  std::vector<double> n_sequence;
};

struct JumpReport {
  double s_boundary = 0.0;
  cplx sigma_boundary;        // sigma_limit at s = d/2 - 1
  cplx sigma_inside_limit;    // eps -> 0 extrapolation from inside the strip
  cplx alpha_continuation;    // continued Z_Q(d/2 - 1), the reference
  cplx jump;                  // jump_general value
  cplx lhs;                   // sigma_boundary - jump
  cplx rhs;                   // sigma_inside_limit
  double discrepancy = 0.0;   // |lhs - rhs|
  double reference_gap = 0.0; // |rhs - alpha_continuation|
  std::vector<double> eps_used;
};

namespace detail {

// (2N+1)^d as an exact integer product; at s = 0 the sum-minus-integral
// identity sigma_N = -1 must survive floating point unharmed.
inline double odd_power(long n, int d) {
  double r = 1.0;
  for (int i = 0; i < d; ++i) r *= (double)(2 * n + 1);
  return r;
}

}  // namespace detail

// Incremental accumulator for alpha_N.  Each shell splits into slabs by the
// first coordinate; slab sums are reduced in a fixed order, so the value is
// identical for every thread count and an N sweep costs one pass.
class AlphaAccumulator {
 public:
  AlphaAccumulator(const QuadForm& q, cplx s, int threads = 1)
      : q_(q), s_(s), threads_(std::max(1, threads)) {}

  long current_n() const { return n_; }
  cplx value() const { return acc_.value(); }

  void advance_to(long n) {
    if (n < n_)
      throw DomainError("AlphaAccumulator: N must not decrease");
    while (n_ < n) add_shell(++n_);
  }

 private:
  void add_shell(long n) {
    int d = q_.dim;
    if (d == 1) {
      acc_.add(point_term(std::vector<double>{(double)-n}));
      acc_.add(point_term(std::vector<double>{(double)n}));
      return;
    }
    long slabs = 2 * n + 1;
    // Shells below ~10^4 points are not worth the spawn overhead.
    double shell_points = 2.0 * std::pow((double)slabs, d - 1);
    if (threads_ == 1 || shell_points < 20000.0) {
      for (long c = -n; c <= n; ++c) acc_.add(slab_sum(n, c));
      return;
    }
    std::vector<cplx> out(slabs);
    std::atomic<long> next{0};
    auto worker = [&]() {
      for (;;) {
        long i = next.fetch_add(1);
        if (i >= slabs) return;
        out[i] = slab_sum(n, i - n);
      }
    };
    std::vector<std::thread> pool;
    for (int t = 0; t < threads_; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    for (cplx v : out) acc_.add(v);
  }

  cplx point_term(const std::vector<double>& x) const {
    double qv = q_value(q_, x);
    if (s_.imag() == 0.0) return cplx(std::pow(qv, -s_.real()), 0.0);
    return std::exp(-s_ * std::log(qv));
  }

  // Sum over the shell points with first coordinate c: the full (d-1)-box
  // when |c| = n, the (d-1)-shell otherwise.
  cplx slab_sum(long n, long c) const {
    int d = q_.dim;
    std::vector<double> x(d);
    x[0] = (double)c;
    bool real_s = s_.imag() == 0.0;
    double sr = s_.real();
    Kahan<double> racc;
    Kahan<cplx> cacc;
    auto eat = [&]() {
      double qv = q_value(q_, x);
      if (real_s)
        racc.add(std::pow(qv, -sr));
      else
        cacc.add(std::exp(-s_ * std::log(qv)));
    };
    if (std::labs(c) == n) {
      std::vector<long> idx(d - 1, -n);
      for (;;) {
        for (int k = 1; k < d; ++k) x[k] = (double)idx[k - 1];
        eat();
        int k = d - 2;
        while (k >= 0 && ++idx[k] > n) idx[k--] = -n;
        if (k < 0) break;
      }
    } else {
      shell_iter(d - 1, n, [&](const std::vector<long>& w) {
        for (int k = 1; k < d; ++k) x[k] = (double)w[k - 1];
        eat();
      });
    }
    return real_s ? cplx(racc.value(), 0.0) : cacc.value();
  }

  QuadForm q_;
  cplx s_;
  int threads_;
  long n_ = 0;
  Kahan<cplx> acc_;
};

// Sum of Q(n)^{-s} over the punctured cube 0 < ||n||_inf <= N.
inline cplx alpha_n(const QuadForm& q, long n, cplx s, int threads = 1) {
  if (n < 1) throw DomainError("alpha_n: N must be at least 1");
  AlphaAccumulator acc(q, s, threads);
  acc.advance_to(n);
  return acc.value();
}

// beta_0 = (1/2)^{d-2s} (d-2s)^{-1} * surface integral of Q^{-s}: the
// integral of Q^{-s} over the unit cube for Re s < d/2 and its meromorphic
// continuation elsewhere, with the single pole at s = d/2.
inline cplx beta_0(const QuadForm& q, cplx s, SurfaceRule rule = {}) {
  int d = q.dim;
  if (std::abs(s - cplx(0.5 * d)) < 1e-12)
    throw PoleError("beta_0: pole at s = d/2");
  if (s == cplx(0.0)) return cplx(1.0);  // unit cube volume, kept exact
  auto f = [&](const std::vector<double>& x) -> cplx {
    return std::exp(-s * std::log(q_value(q, x)));
  };
  SeriesResult surf = surface_integral(d, f, rule);
  cplx dm2s = (double)d - 2.0 * s;
  return std::exp(dm2s * std::log(0.5)) / dm2s * surf.value;
}

// beta_N = (2N+1)^{d-2s} beta_0, exact rescaling in the continued sense.
inline cplx beta_n(const QuadForm& q, long n, cplx s, SurfaceRule rule = {}) {
  if (n < 0) throw DomainError("beta_n: N must be nonnegative");
  cplx b0 = beta_0(q, s, rule);
  if (s == cplx(0.0)) return detail::odd_power(n, q.dim);
  return std::exp(((double)q.dim - 2.0 * s) *
                  std::log((double)(2 * n + 1))) *
         b0;
}

inline WignerEval sigma_n(const QuadForm& q, long n, cplx s,
                          SurfaceRule rule = {}, int threads = 1) {
  WignerEval ev;
  ev.s = s;
  ev.region = cube_region((double)n);
  ev.n = (double)n;
  ev.alpha_n = alpha_n(q, n, s, threads);
  ev.beta_n = beta_n(q, n, s, rule);
  ev.sigma_n = ev.alpha_n - ev.beta_n;
  return ev;
}

namespace detail {

inline void check_n_list(const std::vector<long>& n_list, const char* who) {
  if (n_list.size() < 4)
    throw DomainError(std::string(who) + ": need at least 4 values of N");
  for (std::size_t i = 0; i < n_list.size(); ++i) {
    if (n_list[i] < 1)
      throw DomainError(std::string(who) + ": N values must be positive");
    if (i > 0 && n_list[i] <= n_list[i - 1])
      throw DomainError(std::string(who) +
                        ": N values must be strictly increasing");
  }
}

// One pass over the largest cube, emitting sigma_N at each requested N.
inline std::vector<cplx> sigma_sweep(const QuadForm& q, cplx s,
                                     SurfaceRule rule,
                                     const std::vector<long>& n_list,
                                     int threads) {
  cplx b0 = beta_0(q, s, rule);
  AlphaAccumulator acc(q, s, threads);
  std::vector<cplx> out;
  out.reserve(n_list.size());
  for (long n : n_list) {
    acc.advance_to(n);
    cplx bn = (s == cplx(0.0))
                  ? cplx(odd_power(n, q.dim))
                  : std::exp(((double)q.dim - 2.0 * s) *
                             std::log((double)(2 * n + 1))) *
                        b0;
    out.push_back(acc.value() - bn);
  }
  return out;
}

struct PowerFit {
  cplx value;
  double max_resid = 0.0;
};

// Least squares of y against the basis {(N_0/N)^{p}} for the given inverse
// powers; the leading power must be 0 and its coefficient is the limit.
inline PowerFit fit_power_tail(const std::vector<double>& ns,
                               const std::vector<cplx>& ys,
                               const std::vector<double>& powers,
                               const char* who) {
  int k = (int)powers.size();
  int m = (int)ns.size();
  double n0 = ns.front();
  std::vector<std::vector<double>> phi(m, std::vector<double>(k));
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < k; ++j) phi[i][j] = std::pow(n0 / ns[i], powers[j]);
  std::vector<std::vector<double>> g(k, std::vector<double>(k, 0.0));
  std::vector<cplx> rhs(k);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < k; ++j) {
      for (int l = 0; l < k; ++l) g[j][l] += phi[i][j] * phi[i][l];
      rhs[j] += phi[i][j] * ys[i];
    }
  // Gaussian elimination with partial pivoting on the normal equations.
  double scale = 0.0;
  for (int j = 0; j < k; ++j) scale = std::max(scale, std::abs(g[j][j]));
  for (int col = 0; col < k; ++col) {
    int piv = col;
    for (int r = col + 1; r < k; ++r)
      if (std::abs(g[r][col]) > std::abs(g[piv][col])) piv = r;
    if (std::abs(g[piv][col]) < 1e-12 * scale)
      throw IllConditioned(std::string(who) + ": tail fit is degenerate");
    std::swap(g[col], g[piv]);
    std::swap(rhs[col], rhs[piv]);
    for (int r = col + 1; r < k; ++r) {
      double f = g[r][col] / g[col][col];
      for (int l = col; l < k; ++l) g[r][l] -= f * g[col][l];
      rhs[r] -= f * rhs[col];
    }
  }
  std::vector<cplx> coef(k);
  for (int col = k - 1; col >= 0; --col) {
    cplx v = rhs[col];
    for (int l = col + 1; l < k; ++l) v -= g[col][l] * coef[l];
    coef[col] = v / g[col][col];
  }
  PowerFit fit;
  fit.value = coef[0];
  for (int i = 0; i < m; ++i) {
    cplx model = 0.0;
    for (int j = 0; j < k; ++j) model += coef[j] * phi[i][j];
    fit.max_resid = std::max(fit.max_resid, std::abs(ys[i] - model));
  }
  return fit;
}

// Exact polynomial extrapolation to x = 0 through the given points.
inline cplx neville_at_zero(const std::vector<double>& xs,
                            std::vector<cplx> ys) {
  int m = (int)xs.size();
  for (int lev = 1; lev < m; ++lev)
    for (int i = 0; i < m - lev; ++i)
      ys[i] = (xs[i + lev] * ys[i] - xs[i] * ys[i + 1]) /
              (xs[i + lev] - xs[i]);
  return ys[0];
}

}  // namespace detail

// Extrapolated Wigner limit in the closed-open strip [d/2 - 1, d/2).  The
// increments sigma_N - sigma_{N-1} carry a known leading term
// s V_Q(s)/12 N^{-(2s-d+3)}; its tail is summed off with the zeta function
// before the {1, 1/N, 1/N^2} least-squares fit.  At the boundary V_Q
// vanishes and the plain fit already matches the decay.
inline LimitEstimate sigma_limit(const QuadForm& q, cplx s, SurfaceRule rule,
                                 const std::vector<long>& n_list,
                                 int threads = 1) {
  int d = q.dim;
  double re = s.real();
  if (re < 0.5 * d - 1.0 - 1e-12 || re >= 0.5 * d - 1e-12)
    throw StripViolation("sigma_limit: Re s must lie in [d/2 - 1, d/2)");
  detail::check_n_list(n_list, "sigma_limit");
  std::vector<cplx> sig = detail::sigma_sweep(q, s, rule, n_list, threads);
  // The correction has a removable singularity at the boundary: kappa
  // vanishes linearly there while zeta(w) has the simple pole, so the
  // product stays finite and only the exact boundary point must skip it.
  if (re > 0.5 * d - 1.0 + 1e-12) {
    cplx w = 2.0 * s - (double)d + 3.0;
    cplx kappa = s * v_q(q, s, rule).value / 12.0;
    cplx zw = riemann_zeta(w);
    Kahan<cplx> h;
    long m = 0;
    for (std::size_t i = 0; i < n_list.size(); ++i) {
      while (m < n_list[i]) {
        ++m;
        h.add(std::exp(-w * std::log((double)m)));
      }
      sig[i] += kappa * (zw - h.value());
    }
  }
  std::vector<double> ns(n_list.begin(), n_list.end());
  detail::PowerFit fit =
      detail::fit_power_tail(ns, sig, {0.0, 1.0, 2.0}, "sigma_limit");
  LimitEstimate est;
  est.value = fit.value;
  est.model = {LimitModelKind::PowerTail, {0.0, 1.0, 2.0}, 0};
  est.n_sequence = ns;
  est.abs_err_estimate = fit.max_resid +
                         std::abs(sig.back() - sig[sig.size() - 2]) +
                         1e-14 * (1.0 + std::abs(fit.value));
  return est;
}

// (1/6) pi^{d/2} / Gamma(d/2 - 1): the cubic jump height.  At d = 2 the
// Gamma factor diverges and the limit is continuous, so the jump is 0.
inline double jump_cubic(int d) {
  if (d < 2) throw DomainError("jump_cubic: dimension must be at least 2");
  if (d == 2) return 0.0;
  return std::pow(pi, 0.5 * d) / (6.0 * std::tgamma(0.5 * d - 1.0));
}

// Jump height for a general form: -(d/2 - 1)/24 * V_Q'(d/2 - 1).
inline SeriesResult jump_general(const QuadForm& q, SurfaceRule rule = {}) {
  SeriesResult vp = v_q_prime_boundary(q, rule);
  double fac = -(0.5 * q.dim - 1.0) / 24.0;
  return {fac * vp.value, std::abs(fac) * vp.abs_err_estimate, vp.terms_used,
          vp.converged};
}

// Verifies the jump relation: sigma(d/2-1) minus the jump must equal the
// one-sided limit of sigma from inside the strip, which in turn equals the
// continued Z_Q(d/2-1).  All three quantities are computed independently.
inline JumpReport jump_verify(const QuadForm& q, SurfaceRule rule,
                              const std::vector<long>& n_list,
                              std::vector<double> eps_list = {},
                              int threads = 1) {
  int d = q.dim;
  double s0 = 0.5 * d - 1.0;
  if (eps_list.empty()) eps_list = {0.2, 0.1, 0.05, 0.025};
  std::sort(eps_list.rbegin(), eps_list.rend());
  for (double e : eps_list)
    if (!(e > 0.0) || e >= 1.0)
      throw DomainError("jump_verify: eps values must lie in (0, 1)");
  JumpReport r;
  r.s_boundary = s0;
  r.eps_used = eps_list;
  r.sigma_boundary = sigma_limit(q, cplx(s0), rule, n_list, threads).value;
  std::vector<cplx> ys;
  ys.reserve(eps_list.size());
  for (double e : eps_list)
    ys.push_back(sigma_limit(q, cplx(s0 + e), rule, n_list, threads).value);
  r.sigma_inside_limit = detail::neville_at_zero(eps_list, ys);
  r.jump = jump_general(q, rule).value;
  // Reference continuation: the boundary series for scaled cubic forms,
  // the general theta route otherwise.
  double c0 = q.matrix[0][0];
  bool cubic = true;
  for (int i = 0; i < d && cubic; ++i)
    for (int j = 0; j < d && cubic; ++j) {
      double want = i == j ? c0 : 0.0;
      if (std::abs(q.matrix[i][j] - want) > 1e-14 * std::abs(c0))
        cubic = false;
    }
  if (cubic)
    r.alpha_continuation = std::pow(c0, -s0) * z_boundary_value(d).value;
  else
    r.alpha_continuation = z_epstein(q, cplx(s0)).value;
  r.lhs = r.sigma_boundary - r.jump;
  r.rhs = r.sigma_inside_limit;
  r.discrepancy = std::abs(r.lhs - r.rhs);
  r.reference_gap = std::abs(r.rhs - r.alpha_continuation);
  return r;
}

// Sum of Q(n)^{-s} over nonzero lattice points of the p-ball region.
inline cplx alpha_hat_n(const QuadForm& q, const TruncationRegion& region,
                        cplx s) {
  if (region.kind != RegionKind::PBall)
    throw DomainError("alpha_hat_n: region must be a p-ball");
  int d = q.dim;
  bool real_s = s.imag() == 0.0;
  double sr = s.real();
  Kahan<double> racc;
  Kahan<cplx> cacc;
  std::vector<double> x(d);
  pball_scan(d, region.p, {region.n}, [&](const std::vector<long>& v, int) {
    for (int i = 0; i < d; ++i) x[i] = (double)v[i];
    double qv = q_value(q, x);
    if (real_s)
      racc.add(std::pow(qv, -sr));
    else
      cacc.add(std::exp(-s * std::log(qv)));
  });
  return real_s ? cplx(racc.value(), 0.0) : cacc.value();
}

namespace detail {

inline double norm_p(const std::vector<double>& x, double p) {
  if (std::isinf(p)) {
    double m = 0.0;
    for (double c : x) m = std::max(m, std::abs(c));
    return m;
  }
  double acc = 0.0;
  for (double c : x) acc += std::pow(std::abs(c), p);
  return std::pow(acc, 1.0 / p);
}

}  // namespace detail

// beta_hat_1 = (d-2s)^{-1} * integral over the unit sup-norm sphere of
// Q(u)^{-s} ||u||_p^{2s-d}: the cone over each cube face sweeps out the
// p-ball when cut at radius 1/||u||_p, which folds the p-sphere geometry
// into a flat-face quadrature.
inline cplx beta_hat_1(const QuadForm& q, double p, cplx s,
                       SurfaceRule rule = {}) {
  int d = q.dim;
  if (std::abs(s - cplx(0.5 * d)) < 1e-12)
    throw PoleError("beta_hat_1: pole at s = d/2");
  cplx dm2s = (double)d - 2.0 * s;
  cplx expo = 2.0 * s - (double)d;
  auto f = [&](const std::vector<double>& x) -> cplx {
    cplx qpart = std::exp(-s * std::log(q_value(q, x)));
    return qpart * std::exp(expo * std::log(detail::norm_p(x, p)));
  };
  SeriesResult surf = surface_integral(d, f, rule);
  return surf.value / dm2s;
}

// beta_hat_N = N^{d-2s} beta_hat_1.
inline cplx beta_hat_n(const QuadForm& q, const TruncationRegion& region,
                       cplx s, SurfaceRule rule = {}) {
  if (region.kind != RegionKind::PBall)
    throw DomainError("beta_hat_n: region must be a p-ball");
  cplx b1 = beta_hat_1(q, region.p, s, rule);
  return std::exp(((double)q.dim - 2.0 * s) * std::log(region.n)) * b1;
}

// Reference counting exponents for the strip bound max(d/2-1, lambda/2):
// proven for p = 2, d >= 4 and for integer p > d+1; conjectural reference
// values in low dimensions; the generic surface bound otherwise.
inline double default_lambda(int d, double p) {
  if (std::isinf(p)) return d - 1.0;
  if (p == 2.0) {
    if (d == 2) return 0.5;
    if (d == 3) return 1.0;
    return d - 2.0;
  }
  if (p == std::floor(p) && p > d + 1) return (d - 1.0) * (1.0 - 1.0 / p);
  return d - 1.0;
}

// Dense radius window for sigma_hat_limit: golden-ratio spacing
// equidistributes the fractional part of N, which is what averages the
// period-one boundary oscillation of the lattice count.
inline std::vector<double> hat_window(double lo, double hi) {
  std::vector<double> out;
  for (double n = lo; n <= hi; n += 0.61803398874989485)
    out.push_back(n);
  return out;
}

// p-ball limit of alpha_hat_N - beta_hat_N.  The counting error of the ball
// is a mean-zero oscillation in N with envelope ~ N^{lambda - 2 Re s}, not a
// smooth power tail: inverse-power fits latch onto its phase and degrade the
// estimate, so the extrapolant is the constant-basis fit (the window mean)
// over a dense N_list such as hat_window().  Integer-spaced N phase-lock the
// oscillation and bias the mean; keep the spacing irrational.
inline LimitEstimate sigma_hat_limit(const QuadForm& q, double p, cplx s,
                                     SurfaceRule rule,
                                     const std::vector<double>& n_list,
                                     double lambda_ref = -1.0) {
  int d = q.dim;
  if (lambda_ref < 0.0) lambda_ref = default_lambda(d, p);
  double lo = std::max(0.5 * d - 1.0, 0.5 * lambda_ref);
  double re = s.real();
  if (re <= lo + 1e-12 || re >= 0.5 * d - 1e-12)
    throw StripViolation(
        "sigma_hat_limit: Re s must lie in (max(d/2 - 1, lambda/2), d/2)");
  if (n_list.size() < 8)
    throw IllConditioned(
        "sigma_hat_limit: N_list too short to average the oscillatory tail");
  for (std::size_t i = 0; i < n_list.size(); ++i) {
    if (!(n_list[i] > 0.0))
      throw DomainError("sigma_hat_limit: N values must be positive");
    if (i > 0 && !(n_list[i] > n_list[i - 1]))
      throw DomainError("sigma_hat_limit: N values must be strictly increasing");
  }
  // Single bucketed pass over the largest ball.
  bool real_s = s.imag() == 0.0;
  double sr = s.real();
  int nb = (int)n_list.size();
  std::vector<Kahan<double>> rbuck(nb);
  std::vector<Kahan<cplx>> cbuck(nb);
  std::vector<double> x(d);
  pball_scan(d, p, n_list, [&](const std::vector<long>& v, int b) {
    for (int i = 0; i < d; ++i) x[i] = (double)v[i];
    double qv = q_value(q, x);
    if (real_s)
      rbuck[b].add(std::pow(qv, -sr));
    else
      cbuck[b].add(std::exp(-s * std::log(qv)));
  });
  cplx b1 = beta_hat_1(q, p, s, rule);
  std::vector<cplx> sig(nb);
  cplx alpha = 0.0;
  for (int i = 0; i < nb; ++i) {
    alpha += real_s ? cplx(rbuck[i].value(), 0.0) : cbuck[i].value();
    sig[i] = alpha -
             std::exp(((double)d - 2.0 * s) * std::log(n_list[i])) * b1;
  }
  // Window mean plus a scatter-based error bar: half-window drift catches
  // any residual smooth component, rms/sqrt(m) the averaged oscillation.
  int m = nb;
  cplx mean = 0.0;
  for (const cplx& v : sig) mean += v;
  mean /= (double)m;
  cplx mean_lo = 0.0, mean_hi = 0.0;
  int half = m / 2;
  for (int i = 0; i < half; ++i) mean_lo += sig[i];
  for (int i = half; i < m; ++i) mean_hi += sig[i];
  mean_lo /= (double)half;
  mean_hi /= (double)(m - half);
  double rms = 0.0;
  for (const cplx& v : sig) rms += std::norm(v - mean);
  rms = std::sqrt(rms / (double)m);
  LimitEstimate est;
  est.value = mean;
  est.model = {LimitModelKind::PowerTail, {0.0}, 0};
  est.n_sequence = n_list;
  est.abs_err_estimate = 0.5 * std::abs(mean_hi - mean_lo) +
                         rms / std::sqrt((double)m) +
                         1e-14 * (1.0 + std::abs(mean));
  return est;
}

}  // namespace latsum
