#pragma once
// Complex special functions: gamma, Hurwitz/Riemann zeta, Dirichlet beta,
// modified Bessel K, Jacobi theta3 on the imaginary axis. Double precision
// interfaces; a few internals run in long double to buy headroom against
// cancellation. Everything is pure and re-entrant.

#include <cmath>
#include <complex>
#include <cstdlib>
#include <limits>
#include <vector>

#include "latsum/common.hpp"

namespace latsum {

struct ZetaConfig {
  int direct_terms = 20;     // floor; raised automatically with |Im s|
  int bernoulli_terms = 12;  // correction terms, at most 16
};

namespace detail {

// The Euler-Maclaurin pieces run in long double: the direct sum and the
// closing N^{1-s}/(s-1) term reach magnitude N^{-Re s + 1} while the result
// stays O(1), so double rounding alone would break the 1e-12 contract on the
// continued side Re s < 0.
using lc = std::complex<long double>;

// B_{2j} for j = 1..16.
inline constexpr long double bernoulli_2j[] = {
    0.0L,
    1.0L / 6,
    -1.0L / 30,
    1.0L / 42,
    -1.0L / 30,
    5.0L / 66,
    -691.0L / 2730,
    7.0L / 6,
    -3617.0L / 510,
    43867.0L / 798,
    -174611.0L / 330,
    854513.0L / 138,
    -236364091.0L / 2730,
    8553103.0L / 6,
    -23749461029.0L / 870,
    8615841276005.0L / 14322,
    -7709321041217.0L / 510,
};
inline constexpr int bernoulli_2j_max = 16;

// (e^u - 1)/u, continuous through u = 0.
inline lc expm1_over(lc u) {
  if (std::abs(u) < 0.25L) {
    lc term(1.0L), sum(1.0L);
    for (int k = 2; k <= 14; ++k) {
      term *= u / (long double)k;
      sum += term;
    }
    return sum;
  }
  return (std::exp(u) - 1.0L) / u;
}

struct EmParams {
  int n;  // direct terms
  int j;  // Bernoulli correction terms
};

// The remainder of the Euler-Maclaurin formula scales like
// ((|s| + 2J)/(2 pi (N+a)))^{2J}.  For Re s >= 0.25 the terms are O(1) and a
// generous N is free; on the continued side the terms grow like N^{-Re s}, so
// rounding forces N down to the smallest count the remainder allows (checked
// against a 256-bit reference: scale-relative error stays below 1e-14).
inline EmParams em_params(cplx s, const ZetaConfig& cfg) {
  if (cfg.bernoulli_terms > bernoulli_2j_max)
    throw TableTooSmall("hurwitz_zeta: bernoulli_terms exceeds the table");
  int j = std::max(1, cfg.bernoulli_terms);
  double need;
  if (s.real() >= 0.25) {
    need = 1.3 * std::abs(s.imag()) + 4;
  } else {
    j = std::max(j, 14);
    need = 0.5 * (std::abs(s.imag()) + 2 * j + 2 * std::abs(s.real())) + 6;
  }
  return {std::max(cfg.direct_terms, (int)std::ceil(need)), j};
}

// base^{-e} via the real logarithm; base > 0 always.
inline lc rpow(long double base, lc e) { return std::exp(e * std::log(base)); }

inline lc em_direct_sum(lc s, long double a, int n) {
  Kahan<lc> acc;
  for (int k = 0; k < n; ++k) acc.add(rpow(a + k, -s));
  return acc.value();
}

// (N+a)^{-s}/2 + sum_j B_{2j}/(2j)! (s)_{2j-1} (N+a)^{-s-2j+1}.
inline lc em_correction(lc s, long double a, int n, int jmax) {
  long double na = a + n;
  lc nms = rpow(na, -s);
  lc sum = nms * 0.5L;
  lc rising = s;
  long double fact = 2;
  lc napow = nms / na;
  for (int j = 1; j <= jmax; ++j) {
    if (j > 1) {
      rising *= (s + lc(2 * j - 3)) * (s + lc(2 * j - 2));
      fact *= (2 * j - 1) * (2 * j);
      napow /= na * na;
    }
    sum += (bernoulli_2j[j] / fact) * rising * napow;
  }
  return sum;
}

inline cplx narrow(lc z) {
  return cplx((double)z.real(), (double)z.imag());
}

}  // namespace detail

// Lanczos approximation, g = 7, 9 coefficients; reflection for Re s < 1/2.
// Holds 12+ significant digits over |s| <= 50.
inline cplx gamma(cplx s) {
  static const double lanczos[9] = {
      0.99999999999980993,
      676.5203681218851,
      -1259.1392167224028,
      771.32342877765313,
      -176.61502916214059,
      12.507343278686905,
      -0.13857109526572012,
      9.9843695780195716e-6,
      1.5056327351493116e-7,
  };
  if (s.imag() == 0.0 && s.real() <= 0.0 && s.real() == std::floor(s.real()))
    throw PoleError("gamma: pole at nonpositive integer");
  if (s.real() < 0.5)
    return pi / (std::sin(pi * s) * gamma(1.0 - s));
  cplx z = s - 1.0;
  cplx x = lanczos[0];
  for (int i = 1; i < 9; ++i) x += lanczos[i] / (z + cplx(i));
  cplx t = z + 7.5;
  return std::sqrt(2 * pi) * std::pow(t, z + 0.5) * std::exp(-t) * x;
}

// Reciprocal gamma; entire, vanishing at the nonpositive integers.
inline cplx inv_gamma(cplx z) {
  if (z.real() > 0.5) return 1.0 / gamma(z);
  return std::sin(pi * z) * gamma(1.0 - z) / pi;
}

inline cplx hurwitz_zeta(cplx s, double a, ZetaConfig cfg = {}) {
  if (!(a > 0.0) || a > 1.0)
    throw DomainError("hurwitz_zeta: a must lie in (0, 1]");
  if (s == cplx(1.0)) throw PoleError("hurwitz_zeta: pole at s = 1");
  auto [n, j] = detail::em_params(s, cfg);
  detail::lc ls(s.real(), s.imag());
  long double na = a + (long double)n;
  detail::lc pole_term = detail::rpow(na, 1.0L - ls) / (ls - 1.0L);
  return detail::narrow(detail::em_direct_sum(ls, a, n) + pole_term +
                        detail::em_correction(ls, a, n, j));
}

// zeta(s, a1) - zeta(s, a2) with the two pole terms combined analytically;
// finite for every s, in particular at s = 1.
inline cplx hurwitz_zeta_pair_difference(cplx s, double a1, double a2,
                                         ZetaConfig cfg = {}) {
  if (!(a1 > 0.0) || a1 > 1.0 || !(a2 > 0.0) || a2 > 1.0)
    throw DomainError("hurwitz_zeta_pair_difference: a must lie in (0, 1]");
  auto [n, j] = detail::em_params(s, cfg);
  detail::lc ls(s.real(), s.imag());
  Kahan<detail::lc> acc;
  for (int k = 0; k < n; ++k)
    acc.add(detail::rpow(a1 + (long double)k, -ls) -
            detail::rpow(a2 + (long double)k, -ls));
  long double na1 = a1 + (long double)n, na2 = a2 + (long double)n;
  // [na1^{1-s} - na2^{1-s}]/(s-1) = -na2^{1-s} log(r) E((1-s) log r).
  long double logr = std::log(na1 / na2);
  detail::lc pole_term = detail::rpow(na2, 1.0L - ls) * (-logr) *
                         detail::expm1_over((1.0L - ls) * logr);
  return detail::narrow(acc.value() + pole_term +
                        detail::em_correction(ls, a1, n, j) -
                        detail::em_correction(ls, a2, n, j));
}

inline cplx riemann_zeta(cplx s, ZetaConfig cfg = {}) {
  if (s == cplx(1.0)) throw PoleError("riemann_zeta: pole at s = 1");
  return hurwitz_zeta(s, 1.0, cfg);
}

// zeta(s) - 1/(s-1): entire, equals euler_gamma at s = 1.
inline cplx riemann_zeta_minus_pole(cplx s, ZetaConfig cfg = {}) {
  auto [n, j] = detail::em_params(s, cfg);
  detail::lc ls(s.real(), s.imag());
  long double na = 1.0L + n;
  long double logna = std::log(na);
  // [na^{1-s} - 1]/(s-1) = -log(na) E((1-s) log na).
  detail::lc pole_term = -logna * detail::expm1_over((1.0L - ls) * logna);
  return detail::narrow(detail::em_direct_sum(ls, 1.0L, n) + pole_term +
                        detail::em_correction(ls, 1.0L, n, j));
}

// beta(s) = 4^{-s} (zeta(s,1/4) - zeta(s,3/4)); entire.
inline cplx dirichlet_beta(cplx s, ZetaConfig cfg = {}) {
  detail::lc ls(s.real(), s.imag());
  cplx diff = hurwitz_zeta_pair_difference(s, 0.25, 0.75, cfg);
  return detail::narrow(detail::rpow(4.0L, -ls)) * diff;
}

namespace detail {

inline constexpr long double euler_gamma_l =
    0.577215664901532860606512090082402431042L;

// K_{m+1/2} closes in elementary terms; upward recurrence in the order.
inline double bessel_k_half_integer(double nu, double x) {
  long double base = std::sqrt(pi / (2 * (long double)x)) * std::exp((long double)-x);
  long double k0 = base;                // K_{1/2}
  if (nu < 1.0) return (double)k0;
  long double k1 = base * (1 + 1 / (long double)x);  // K_{3/2}
  long double order = 1.5L;
  while (order < nu - 0.25) {
    long double k2 = k0 + (2 * order / x) * k1;
    k0 = k1;
    k1 = k2;
    order += 1;
  }
  return (double)k1;
}

// Small-x power series, long double internals. Integer orders go through the
// logarithmic K0/K1 series plus upward recurrence; fractional orders through
// pi/2 (I_{-nu} - I_nu)/sin(pi nu). Orders within 1e-8 of an integer are
// snapped to it (the fractional route loses half the digits there).
inline double bessel_k_series(double nu, double x) {
  using ld = long double;
  ld q = (ld)x * x / 4, lx = std::log((ld)x / 2);
  double nr = std::round(nu);
  if (std::abs(nu - nr) < 1e-8) {
    int m = (int)nr;
    // K0 = -(log(x/2)+gamma) I0 + sum H_k q^k/(k!)^2.
    ld t = 1, a0 = 1, s0 = 0, h = 0;
    for (int k = 1; k <= 60; ++k) {
      t *= q / ((ld)k * k);
      h += 1.0L / k;
      a0 += t;
      s0 += t * h;
      if (t < 1e-20L * a0) break;
    }
    ld k0 = -(lx + euler_gamma_l) * a0 + s0;
    if (m == 0) return (double)k0;
    // K1 = 1/x + log(x/2) I1 - (1/2) sum u_k (H_k + H_{k+1} - 2 gamma).
    ld u = (ld)x / 2, i1 = u, s1 = u * (1 - 2 * euler_gamma_l), hk = 0;
    for (int k = 1; k <= 60; ++k) {
      u *= q / ((ld)k * (k + 1));
      hk += 1.0L / k;
      ld hk1 = hk + 1.0L / (k + 1);
      i1 += u;
      s1 += u * (hk + hk1 - 2 * euler_gamma_l);
      if (u < 1e-20L * i1) break;
    }
    ld k1 = 1 / (ld)x + lx * i1 - s1 / 2;
    ld ka = k0, kb = k1;
    for (int ord = 1; ord < m; ++ord) {
      ld kc = ka + (2.0L * ord / x) * kb;
      ka = kb;
      kb = kc;
    }
    return (double)kb;
  }
  auto ibranch = [&](ld mu) {
    ld t = std::exp(mu * lx) / std::tgamma(1 + mu);
    ld s = t;
    for (int k = 1; k <= 80; ++k) {
      t *= q / (k * (k + mu));
      s += t;
      if (std::abs(t) < 1e-20L * std::abs(s)) break;
    }
    return s;
  };
  ld num = ibranch((ld)-nu) - ibranch((ld)nu);
  return (double)(pi / 2 * num / std::sin(pi * (ld)nu));
}

// K_nu(x) = int_0^inf exp(-x cosh t) cosh(nu t) dt; the window [0, T] with
// x (cosh T - 1) ~ 46 captures the mass to ~1e-20 relative for x >= 2.
template <class Nu>
auto bessel_k_integral_t(Nu nu, double x) {
  double T = std::acosh(1 + 46.0 / x);
  const GaussRule& g = gauss_legendre(64);
  using R = decltype(std::cosh(nu * 0.0) * 0.0);
  R sum{};
  for (int i = 0; i < 64; ++i) {
    double t = T * (g.x[i] + 1) / 2;
    sum += g.w[i] * std::exp(-x * std::cosh(t)) * std::cosh(nu * t);
  }
  return sum * (T / 2);
}

inline double bessel_k_integral(double nu, double x) {
  return bessel_k_integral_t(nu, x);
}
inline cplx bessel_k_integral_c(cplx nu, double x) {
  return bessel_k_integral_t(nu, x);
}

// Divergent large-x expansion, summed to its smallest term.
inline double bessel_k_asymptotic(double nu, double x) {
  long double mu = 4.0L * nu * nu, term = 1, sum = 1;
  for (int k = 1; k <= 40; ++k) {
    long double next = term * (mu - (2.0L * k - 1) * (2 * k - 1)) / (8.0L * k * x);
    if (std::abs(next) >= std::abs(term)) break;
    sum += next;
    term = next;
    if (std::abs(next) < 1e-19L * std::abs(sum)) break;
  }
  return (double)(std::sqrt(pi / (2 * (long double)x)) * std::exp((long double)-x) * sum);
}

}  // namespace detail

// Modified Bessel function of the second kind, real order (sign ignored).
inline double bessel_k(double nu, double x) {
  if (!(x > 0.0)) throw DomainError("bessel_k: x must be positive");
  nu = std::abs(nu);
  double twice = std::round(2 * nu);
  if (std::abs(2 * nu - twice) < 1e-12 && (long)twice % 2 != 0)
    return detail::bessel_k_half_integer(nu, x);
  if (x >= 14.0) return detail::bessel_k_asymptotic(nu, x);
  if (x >= 6.0) return detail::bessel_k_integral(nu, x);
  return detail::bessel_k_series(nu, x);
}

// Complex order via the cosh-integral window; restricted to x >= 2 where
// the window captures the mass, ample for arguments 2 pi n sqrt(m).
inline cplx bessel_k_c(cplx nu, double x) {
  if (nu.imag() == 0.0) return bessel_k(nu.real(), x);
  if (!(x >= 2.0)) throw DomainError("bessel_k_c: requires x >= 2");
  return detail::bessel_k_integral_c(nu, x);
}

// theta3(it) - 1 = 2 sum_{n>=1} exp(-pi n^2 t); requires t >= 1 so the raw
// sum is already the numerically stable object.
inline double theta3_imag_minus_one(double t) {
  if (!(t >= 1.0)) throw DomainError("theta3_imag_minus_one: requires t >= 1");
  Kahan<double> acc;
  for (int n = 1;; ++n) {
    double term = 2 * std::exp(-pi * n * n * t);
    acc.add(term);
    if (term < 1e-17 * (1 + acc.value())) break;
  }
  return acc.value();
}

// theta3(it) = sum_n exp(-pi n^2 t); the modular transformation
// theta3(i/t) = sqrt(t) theta3(it) keeps term counts O(1) for t < 1.
inline double theta3_imag(double t) {
  if (!(t > 0.0)) throw DomainError("theta3_imag: t must be positive");
  if (t < 1.0) return theta3_imag(1.0 / t) / std::sqrt(t);
  return 1.0 + theta3_imag_minus_one(t);
}

namespace detail {

// tau(0..m) from Delta = q prod (1-q^k)^24: the Euler product once via the
// pentagonal-number theorem, then the 24th power by repeated squaring of
// truncated series.  tau(k) is the coefficient of q^{k-1}; tau(0) unused.
inline std::vector<long long> tau_coeffs(long m) {
  using i128 = __int128;
  long len = m;  // coefficients of q^0 .. q^{m-1}
  std::vector<i128> euler(len, 0);
  euler[0] = 1;
  for (long j = 1;; ++j) {
    long g1 = j * (3 * j - 1) / 2, g2 = j * (3 * j + 1) / 2;
    if (g1 >= len && g2 >= len) break;
    i128 sign = (j % 2 == 1) ? -1 : 1;
    if (g1 < len) euler[g1] += sign;
    if (g2 < len) euler[g2] += sign;
  }
  auto mul = [len](const std::vector<i128>& a, const std::vector<i128>& b) {
    std::vector<i128> c(len, 0);
    for (long i = 0; i < len; ++i) {
      if (a[i] == 0) continue;
      for (long j = 0; i + j < len; ++j)
        if (b[j] != 0) c[i + j] += a[i] * b[j];
    }
    return c;
  };
  std::vector<i128> e2 = mul(euler, euler);
  std::vector<i128> e4 = mul(e2, e2);
  std::vector<i128> e8 = mul(e4, e4);
  std::vector<i128> e16 = mul(e8, e8);
  std::vector<i128> e24 = mul(e16, e8);
  std::vector<long long> tau(m + 1, 0);
  for (long k = 1; k <= m; ++k) {
    i128 v = e24[k - 1];
    if (v > (i128)std::numeric_limits<long long>::max() ||
        v < (i128)std::numeric_limits<long long>::min())
      throw OverflowError("tau_coeffs: entry exceeds 64 bits");
    tau[k] = (long long)v;
  }
  return tau;
}

inline const std::vector<long long>& tau_cache(long m) {
  static std::mutex mu;
  static std::vector<long long> cache;
  std::lock_guard<std::mutex> lock(mu);
  if ((long)cache.size() < m + 1) cache = tau_coeffs(m);
  return cache;
}

}  // namespace detail

// L_Delta(s) = sum tau(n)/n^s in its direct-sum region Re s > 13/2.  The
// tail estimate uses |tau(n)| <= d(n) n^{11/2} and a divisor-sum integral
// bound; it is honest rather than tight.
inline SeriesResult l_delta(cplx s, int n_terms) {
  if (!(s.real() > 6.5))
    throw DomainError("l_delta: requires Re s > 13/2");
  if (n_terms < 1) throw DomainError("l_delta: n_terms must be at least 1");
  const std::vector<long long>& tau = detail::tau_cache(n_terms);
  Kahan<cplx> acc;
  for (int n = 1; n <= n_terms; ++n)
    acc.add((double)tau[n] * std::exp(-s * std::log((double)n)));
  double x = s.real() - 5.5;  // sum d(n) n^{-x} converges for x > 1
  double nn = n_terms;
  double tail =
      4.0 * std::pow(nn, 1.0 - x) *
      (std::log(nn + 1.0) / (x - 1.0) + 1.0 / ((x - 1.0) * (x - 1.0)));
  SeriesResult r;
  r.value = acc.value();
  r.abs_err_estimate = tail + 1e-15 * std::abs(r.value);
  r.terms_used = n_terms;
  r.converged = r.abs_err_estimate <= 1e-6 * (1.0 + std::abs(r.value));
  return r;
}

}  // namespace latsum
