#pragma once
// Analytic continuation of Epstein zeta functions: incomplete-theta
// representations (cubic and general positive definite forms), the Bessel
// double series, hyperbolic boundary series, closed forms for d in
// {2,4,6,8,24}, and functional-equation / residue verification.

#include <cmath>
#include <complex>
#include <vector>

#include "latsum/common.hpp"
#include "latsum/lattice.hpp"
#include "latsum/quadform.hpp"
#include "latsum/specfun.hpp"

namespace latsum {

struct ContinuationConfig {
  double theta_tail_tol = 1e-12;
  int quad_points = 64;      // Gauss-Legendre nodes for the [1, inf) integrals
  int bessel_m_max = 40;
  int bessel_n_max = 20;
  double spectrum_cutoff = 10.0;
};

namespace detail {

inline void check_continuation_config(const ContinuationConfig& cfg) {
  if (!(cfg.theta_tail_tol > 0.0) || cfg.quad_points < 2 ||
      cfg.bessel_m_max < 1 || cfg.bessel_n_max < 1 ||
      !(cfg.spectrum_cutoff > 0.0))
    throw DomainError("ContinuationConfig: all fields must be positive");
}

// int_1^inf f(t) sum_i t^{e_i} dt via t = 1/(1-u), u in [0,1), with
// Gauss-Legendre at n and 2n nodes; the difference is the error estimate.
template <class F>
SeriesResult power_tail_integral(F&& f, const std::vector<cplx>& exps, int n) {
  auto pass = [&](int order) {
    const GaussRule& g = gauss_legendre(order);
    Kahan<cplx> acc;
    for (int i = 0; i < order; ++i) {
      double u = (g.x[i] + 1) / 2;
      double t = 1.0 / (1.0 - u);
      double jac = t * t / 2;  // d t / d u times the [0,1] map factor
      double fv = f(t);
      if (fv == 0.0) continue;
      cplx powers = 0.0;
      for (cplx e : exps) powers += std::pow(t, e);
      acc.add(g.w[i] * jac * fv * powers);
    }
    return acc.value();
  };
  cplx coarse = pass(n), fine = pass(2 * n);
  SeriesResult r;
  r.value = fine;
  r.abs_err_estimate = std::abs(fine - coarse) + 1e-16 * std::abs(fine);
  r.terms_used = 3 * n;
  r.converged = r.abs_err_estimate <= 1e-8 * (1.0 + std::abs(fine));
  return r;
}

inline void check_pole(double re_s, double im_s, int d) {
  if (std::abs(cplx(re_s - d / 2.0, im_s)) < 1e-8)
    throw PoleError("epstein: simple pole at s = d/2");
}

// Gamma(w/2 + 1) zeta(w), entire except w = 1.  The reflected branch keeps
// the trivial-zero cancellations explicit for Re w < -1/2.
inline cplx zeta_gamma_factor(cplx w) {
  if (w.real() >= -0.5) return gamma(w / 2.0 + 1.0) * riemann_zeta(w);
  return (w / 2.0) * std::pow(pi, w - 0.5) * gamma((1.0 - w) / 2.0) *
         riemann_zeta(1.0 - w);
}

}  // namespace detail

// Z_d(s) for the cubic lattice via the symmetric incomplete-theta form:
// pi^{-s} Gamma(s) Z_d(s) = 1/(s-d/2) - 1/s
//   + int_1^inf (theta3^d(ix) - 1)(x^{s-1} + x^{d/2-s-1}) dx.
inline SeriesResult z_cubic_theta(int d, cplx s,
                                  const ContinuationConfig& cfg = {}) {
  if (d < 2) throw DomainError("z_cubic_theta: d must be at least 2");
  detail::check_continuation_config(cfg);
  detail::check_pole(s.real(), s.imag(), d);
  auto f = [d](double t) {
    return std::expm1(d * std::log1p(theta3_imag_minus_one(t)));
  };
  SeriesResult integ = detail::power_tail_integral(
      f, {s - 1.0, d / 2.0 - s - 1.0}, cfg.quad_points);
  cplx core = 1.0 / (s - d / 2.0) + integ.value;
  cplx pis = std::pow(pi, s);
  cplx value = pis * (core * inv_gamma(s) - inv_gamma(s + 1.0));
  SeriesResult r;
  r.value = value;
  r.abs_err_estimate = std::abs(pis * inv_gamma(s)) * integ.abs_err_estimate +
                       1e-15 * std::abs(value);
  r.terms_used = integ.terms_used;
  r.converged = integ.converged;
  return r;
}

// Z_d(s) via the Bessel double series
//   2d Gamma((2s-d+3)/2)/Gamma(s+1) pi^{(d-1)/2} zeta(2s-d+1)
//   + 4d pi^{s+1}/Gamma(s+1) sum_m r_{d-1}(m) m^{(2s-d+3)/4}
//       sum_n K_{(2s-d+3)/2}(2 pi n sqrt(m)) n^{(d+1-2s)/2}.
inline SeriesResult z_cubic_bessel(int d, cplx s,
                                   const ContinuationConfig& cfg = {}) {
  if (d < 2) throw DomainError("z_cubic_bessel: d must be at least 2");
  detail::check_continuation_config(cfg);
  detail::check_pole(s.real(), s.imag(), d);
  if (std::exp(-2 * pi * std::sqrt((double)cfg.bessel_m_max)) >
      cfg.theta_tail_tol)
    throw TableTooSmall("z_cubic_bessel: bessel_m_max too small for tolerance");
  cplx w = 2.0 * s - (double)d + 1.0;
  cplx nu = w / 2.0 + 1.0;
  cplx ig1 = inv_gamma(s + 1.0);
  cplx lead = 2.0 * d * std::pow(pi, (d - 1) / 2.0) * ig1 *
              detail::zeta_gamma_factor(w);
  CoeffTable r_table = r_squares_table(d - 1, cfg.bessel_m_max);
  cplx mexp = (2.0 * s - (double)d + 3.0) / 4.0;
  cplx nexp = ((double)d + 1.0 - 2.0 * s) / 2.0;
  bool real_s = s.imag() == 0.0;
  Kahan<cplx> dsum;
  long terms = 0;
  const double x_cut = 55.0;  // exp(-55) is below every tolerance in play
  for (long m = 1; m <= cfg.bessel_m_max; ++m) {
    if (r_table.values[m] == 0) continue;
    double sqm = std::sqrt((double)m);
    if (2 * pi * sqm > x_cut) break;
    cplx mfac = (double)r_table.values[m] * std::pow((double)m, mexp);
    for (long n = 1; n <= cfg.bessel_n_max; ++n) {
      double x = 2 * pi * n * sqm;
      if (x > x_cut) break;
      cplx k = real_s ? cplx(bessel_k(nu.real(), x)) : bessel_k_c(nu, x);
      dsum.add(mfac * std::pow((double)n, nexp) * k);
      ++terms;
    }
  }
  cplx pref = 4.0 * d * std::pow(pi, s + 1.0) * ig1;
  cplx value = lead + pref * dsum.value();
  // Tail: the first omitted m, with a crude r_{d-1} growth bound and the
  // leading Bessel decay; n-tails are negligible at the default n_max.
  double m1 = cfg.bessel_m_max + 1.0;
  double rho = std::pow(2 * std::sqrt(m1) + 2, d - 1);
  double tail = std::abs(pref) * rho * std::pow(m1, std::abs(mexp.real()) / 2) *
                2.0 * std::exp(-2 * pi * std::sqrt(m1));
  tail += std::abs(pref) * 1e-22;
  SeriesResult out;
  out.value = value;
  out.abs_err_estimate = tail + 1e-14 * (std::abs(lead) + std::abs(value));
  out.terms_used = terms;
  out.converged = true;
  return out;
}

// Z_d(d/2 - 1) = 2 d pi^{d/2}/Gamma(d/2) [ -1/12
//   + (1/2) sum_m r_{d-1}(m)/(cosh(2 pi sqrt(m)) - 1) ].
inline SeriesResult z_boundary_value(int d, const ContinuationConfig& cfg = {}) {
  if (d < 2) throw DomainError("z_boundary_value: d must be at least 2");
  detail::check_continuation_config(cfg);
  const long m_max = 80;  // exp(-2 pi sqrt(80)) ~ 5e-25
  CoeffTable r_table = r_squares_table(d - 1, m_max);
  Kahan<double> acc;
  for (long m = 1; m <= m_max; ++m) {
    if (r_table.values[m] == 0) continue;
    acc.add((double)r_table.values[m] /
            (std::cosh(2 * pi * std::sqrt((double)m)) - 1.0));
  }
  double pref = 2.0 * d * std::pow(pi, d / 2.0) / std::tgamma(d / 2.0);
  double value = pref * (-1.0 / 12.0 + acc.value() / 2);
  double omitted = std::pow(2 * std::sqrt((double)m_max + 1) + 2, d - 1) *
                   2.0 * std::exp(-2 * pi * std::sqrt((double)m_max + 1));
  SeriesResult r;
  r.value = value;
  r.abs_err_estimate = pref * omitted + 1e-15 * std::abs(value);
  r.terms_used = m_max;
  r.converged = true;
  return r;
}

// Z_Q(s) for a positive definite form via the two-sided theta identity
// pi^{-s} Gamma(s) Z_Q(s) = -1/s + Delta^{-1/2}/(s - d/2)
//   + int_1^inf (Theta_Q(t)-1) t^{s-1} dt
//   + Delta^{-1/2} int_1^inf (Theta_{Q^{-1}}(t)-1) t^{d/2-s-1} dt.
inline SeriesResult z_epstein(const QuadForm& q, cplx s,
                              const ContinuationConfig& cfg = {}) {
  detail::check_continuation_config(cfg);
  int d = q.dim;
  detail::check_pole(s.real(), s.imag(), d);
  CoeffTable spec = q_spectrum(q, cfg.spectrum_cutoff);
  CoeffTable spec_inv = q_spectrum(inverse_form(q), cfg.spectrum_cutoff);
  auto theta_m1 = [](const CoeffTable& sp, double t) {
    Kahan<double> acc;
    for (long i = 0; i < sp.max_index; ++i) {
      double term = (double)sp.values[i] * std::exp(-pi * t * sp.spectrum[i]);
      if (term == 0.0) break;  // spectrum sorted ascending
      acc.add(term);
    }
    return acc.value();
  };
  SeriesResult i_q = detail::power_tail_integral(
      [&](double t) { return theta_m1(spec, t); }, {s - 1.0}, cfg.quad_points);
  SeriesResult i_qi = detail::power_tail_integral(
      [&](double t) { return theta_m1(spec_inv, t); }, {d / 2.0 - s - 1.0},
      cfg.quad_points);
  double rdelta = 1.0 / std::sqrt(q.det);
  cplx core = rdelta / (s - d / 2.0) + i_q.value + rdelta * i_qi.value;
  cplx pis = std::pow(pi, s);
  cplx value = pis * (core * inv_gamma(s) - inv_gamma(s + 1.0));
  // Spectrum truncation tail at t >= 1 for both thetas.
  double cut_tail =
      (double)(spec.max_index + spec_inv.max_index + 2 * d) *
      std::exp(-pi * cfg.spectrum_cutoff);
  SeriesResult r;
  r.value = value;
  r.abs_err_estimate =
      std::abs(pis * inv_gamma(s)) *
          (i_q.abs_err_estimate + rdelta * i_qi.abs_err_estimate +
           (1.0 + rdelta) * cut_tail) +
      1e-15 * std::abs(value);
  r.terms_used = i_q.terms_used + i_qi.terms_used;
  r.converged = i_q.converged && i_qi.converged;
  return r;
}

// |LHS - RHS| / (|LHS| + |RHS| + eps) for the completed-function identity
// Z_Q(s) Gamma(s) pi^{-s} = Delta^{-1/2} Z_{Q^{-1}}(d/2-s) Gamma(d/2-s)
// pi^{-(d/2-s)}.
inline double functional_equation_residual(const QuadForm& q, cplx s,
                                           const ContinuationConfig& cfg = {}) {
  int d = q.dim;
  cplx lhs = z_epstein(q, s, cfg).value * gamma(s) * std::pow(pi, -s);
  cplx sd = d / 2.0 - s;
  cplx rhs = z_epstein(inverse_form(q), sd, cfg).value * gamma(sd) *
             std::pow(pi, -sd) / std::sqrt(q.det);
  return std::abs(lhs - rhs) / (std::abs(lhs) + std::abs(rhs) + 1e-30);
}

// Relative deviation of the Richardson-extrapolated (s - d/2) Z_Q(s) from
// the exact residue Delta^{-1/2} pi^{d/2}/Gamma(d/2).
inline double residue_probe(const QuadForm& q, const ContinuationConfig& cfg = {}) {
  int d = q.dim;
  double h1 = 1e-3, h2 = 1e-4;
  cplx r1 = h1 * z_epstein(q, cplx(d / 2.0 + h1), cfg).value;
  cplx r2 = h2 * z_epstein(q, cplx(d / 2.0 + h2), cfg).value;
  cplx extrap = (h1 * r2 - h2 * r1) / (h1 - h2);
  double exact = std::pow(pi, d / 2.0) / (std::sqrt(q.det) * std::tgamma(d / 2.0));
  return std::abs(extrap - exact) / exact;
}

namespace detail {

// sin(z)/z, stable near zero.
inline cplx sin_over(cplx z) {
  if (std::abs(z) > 0.25) return std::sin(z) / z;
  cplx z2 = z * z, term = 1.0, sum = 1.0;
  for (int k = 1; k <= 10; ++k) {
    term *= -z2 / double((2 * k) * (2 * k + 1));
    sum += term;
    if (std::abs(term) < 1e-18 * std::abs(sum)) break;
  }
  return sum;
}

// cexpm1(z)/z, stable near zero.
inline cplx cexpm1_over(cplx z) {
  if (std::abs(z) > 0.25) return cexpm1(z) / z;
  cplx term = 1.0, sum = 1.0;
  for (int k = 2; k <= 18; ++k) {
    term *= z / double(k);
    sum += term;
    if (std::abs(term) < 1e-18 * std::abs(sum)) break;
  }
  return sum;
}

}  // namespace detail

// Exact lattice zeta combinations for d in {2, 4, 6, 8, 24}.  Removable
// singularities of the constituent factors (notably at s = 1) are evaluated
// through stable splittings; the genuine pole at s = d/2 raises.
inline cplx z_closed_form(int d, cplx s) {
  detail::check_pole(s.real(), s.imag(), d);
  const double ln2 = 0.693147180559945309417232121458176568;
  switch (d) {
    case 2:
      return 4.0 * riemann_zeta(s) * dirichlet_beta(s);
    case 4: {
      // 8 (1 - 2^{2-2s}) zeta(s-1) zeta(s); the factor's zero at s = 1
      // cancels the zeta pole.
      if (std::abs(s - 1.0) < 0.25) {
        cplx u = -2.0 * (s - 1.0) * ln2;  // (1 - 2^{2-2s}) = -cexpm1(u)
        cplx stable = 2.0 * ln2 * detail::cexpm1_over(u) -
                      cexpm1(u) * riemann_zeta_minus_pole(s);
        return 8.0 * riemann_zeta(s - 1.0) * stable;
      }
      return 8.0 * (1.0 - std::pow(2.0, 2.0 - 2.0 * s)) *
             riemann_zeta(s - 1.0) * riemann_zeta(s);
    }
    case 6: {
      // 16 zeta(s-2) beta(s) - 4 zeta(s) beta(s-2); near s = 1 the beta
      // reflection exposes the zero of beta(s-2) against the zeta pole.
      cplx first = 16.0 * riemann_zeta(s - 2.0) * dirichlet_beta(s);
      if (std::abs(s - 1.0) < 0.5) {
        cplx arg = pi * (s - 1.0) / 2.0;
        cplx refl = std::pow(pi / 2.0, s - 3.0) * gamma(3.0 - s) *
                    dirichlet_beta(3.0 - s);
        cplx second = -4.0 * refl *
                      ((pi / 2.0) * detail::sin_over(arg) +
                       std::sin(arg) * riemann_zeta_minus_pole(s));
        return first + second;
      }
      return first - 4.0 * riemann_zeta(s) * dirichlet_beta(s - 2.0);
    }
    case 8: {
      // 16 (1 - 2^{1-s} + 4^{2-s}) zeta(s) zeta(s-3); near s = 1 the
      // reflected zeta(s-3) vanishes against the zeta pole.
      cplx factor = 16.0 * (1.0 - std::pow(2.0, 1.0 - s) +
                            std::pow(4.0, 2.0 - s));
      if (std::abs(s - 1.0) < 0.5) {
        cplx arg = pi * (s - 1.0) / 2.0;
        // zeta(s-3) = -2^{s-3} pi^{s-4} sin(pi (s-1)/2) Gamma(4-s) zeta(4-s)
        cplx refl = std::pow(2.0, s - 3.0) * std::pow(pi, s - 4.0) *
                    gamma(4.0 - s) * riemann_zeta(4.0 - s);
        cplx zz = -refl * ((pi / 2.0) * detail::sin_over(arg) +
                           std::sin(arg) * riemann_zeta_minus_pole(s));
        return factor * zz;
      }
      return factor * riemann_zeta(s) * riemann_zeta(s - 3.0);
    }
    case 24: {
      if (!(s.real() > 6.6))
        throw DomainError("z_closed_form: d=24 needs Re s > 13/2");
      cplx p12 = std::pow(2.0, 12.0 - 2.0 * s);
      cplx zeta_part = (16.0 / 691.0) *
                       (p12 - std::pow(2.0, 1.0 - s) + 1.0) *
                       riemann_zeta(s) * riemann_zeta(s - 11.0);
      cplx l_part = (128.0 / 691.0) *
                    (259.0 + 745.0 * std::pow(2.0, 4.0 - s) + 259.0 * p12) *
                    l_delta(s, 200).value;
      return zeta_part + l_part;
    }
    default:
      throw DomainError("z_closed_form: d must be one of 2, 4, 6, 8, 24");
  }
}

}  // namespace latsum
