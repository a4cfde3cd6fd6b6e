// Tests for the Epstein zeta continuations: theta and Bessel routes, the
// boundary cosh series, general positive definite forms, functional
// equation, residues, and closed forms.

#include <catch2/catch_amalgamated.hpp>

#include <latsum/epstein.hpp>

#include <cmath>
#include <random>
#include <vector>

#include "oracles.hpp"

using latsum::cplx;
using latsum::ContinuationConfig;
using latsum::Mat;
using latsum::QuadForm;
using Catch::Matchers::WithinAbs;

namespace {

constexpr double kCatalan = 0.915965594177219015054603514932;
constexpr double kZeta3 = 1.20205690315959428540;
constexpr double kZeta5 = 1.03692775514336992633;
constexpr double kLn2 = 0.693147180559945309417232121458;

Mat identity(int d) {
  Mat m(d, std::vector<double>(d, 0.0));
  for (int i = 0; i < d; ++i) m[i][i] = 1.0;
  return m;
}

Mat random_pd(std::mt19937_64& rng, int d) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Mat m(d, std::vector<double>(d));
  for (auto& row : m)
    for (double& v : row) v = u(rng);
  Mat a(d, std::vector<double>(d, 0.0));
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      for (int k = 0; k < d; ++k) a[i][j] += m[k][i] * m[k][j];
      if (i == j) a[i][j] += 0.3;
    }
  return a;
}

// Real parts for the evaluation grid, avoiding the pole band at d/2.
std::vector<double> grid_re(int d) {
  std::vector<double> out;
  for (double re = -1.0; re <= d / 2.0 + 2.0 + 1e-9; re += 0.5)
    if (std::abs(re - d / 2.0) > 0.3) out.push_back(re);
  return out;
}

}  // namespace

TEST_CASE("continuation config validates") {
  ContinuationConfig bad;
  bad.theta_tail_tol = 0.0;
  CHECK_THROWS_AS(latsum::z_cubic_theta(2, 3.0, bad), latsum::DomainError);
  bad = {};
  bad.quad_points = 1;
  CHECK_THROWS_AS(latsum::z_cubic_theta(2, 3.0, bad), latsum::DomainError);
  bad = {};
  bad.spectrum_cutoff = -1.0;
  CHECK_THROWS_AS(latsum::z_cubic_theta(2, 3.0, bad), latsum::DomainError);
}

TEST_CASE("z_cubic_theta anchors") {
  // Z_2(3) = 4 zeta(3) beta(3).
  double beta3 = 0.968946146259369380318;
  auto z23 = latsum::z_cubic_theta(2, 3.0);
  CHECK_THAT(z23.value.real(), WithinAbs(4.0 * kZeta3 * beta3, 1e-10));
  CHECK_THAT(z23.value.imag(), WithinAbs(0.0, 1e-12));
  CHECK(z23.abs_err_estimate < 1e-9);

  // Z_3(2) against the frozen direct sum over the box |n|_inf <= 60
  // (oracle: brute_alpha_cube) with the integral tail bound.
  double partial = 16.3596763851105181514;
  double bound = oracle::tail_bound_outside_cube(3.0, 3, 2.0, 60);
  auto z32 = latsum::z_cubic_theta(3, 2.0);
  CHECK(std::abs(z32.value.real() - partial) < bound);
  CHECK(z32.value.real() > partial);  // the tail is positive

  // Z_4(1) = -8 log 2, a removable point of the closed form.
  auto z41 = latsum::z_cubic_theta(4, 1.0);
  CHECK_THAT(z41.value.real(), WithinAbs(-8.0 * kLn2, 1e-9));
  CHECK_THAT(std::abs(latsum::z_closed_form(4, cplx(1.0 + 1e-6)) -
                      cplx(-8.0 * kLn2)),
             WithinAbs(0.0, 1e-4));
}

TEST_CASE("z_cubic_theta value at zero and errors") {
  for (int d : {2, 3, 5}) {
    auto z = latsum::z_cubic_theta(d, 0.0);
    CHECK_THAT(z.value.real(), WithinAbs(-1.0, 1e-12));
    CHECK_THAT(z.value.imag(), WithinAbs(0.0, 1e-13));
  }
  CHECK_THROWS_AS(latsum::z_cubic_theta(2, 1.0), latsum::PoleError);
  CHECK_THROWS_AS(latsum::z_cubic_theta(3, cplx(1.5 + 1e-9)), latsum::PoleError);
  CHECK_THROWS_AS(latsum::z_cubic_theta(1, 2.0), latsum::DomainError);
}

TEST_CASE("dual continuations agree") {
  for (int d : {2, 3, 4, 5}) {
    for (double re : grid_re(d)) {
      for (double im : {0.0, 2.5, 5.0}) {
        cplx s(re, im);
        INFO("d=" << d << " s=" << re << "+" << im << "i");
        auto zt = latsum::z_cubic_theta(d, s);
        auto zb = latsum::z_cubic_bessel(d, s);
        CHECK(std::abs(zt.value - zb.value) <=
              1e-8 * (1.0 + std::abs(zt.value)));
      }
    }
  }
}

TEST_CASE("cubic functional equation via the Bessel route") {
  auto near_nonpos_int = [](double x) {
    return x < 0.26 && std::abs(x - std::round(x)) < 0.05;
  };
  for (int d : {2, 3, 4}) {
    for (double re : grid_re(d)) {
      for (double im : {0.0, 2.0}) {
        // On the real axis the Gamma factors pole at nonpositive integers,
        // on either side of the equation.
        if (im == 0.0 &&
            (near_nonpos_int(re) || near_nonpos_int(d / 2.0 - re)))
          continue;
        cplx s(re, im);
        INFO("d=" << d << " s=" << re << "+" << im << "i");
        cplx f1 = latsum::z_cubic_bessel(d, s).value * latsum::gamma(s) *
                  std::pow(latsum::pi, -s);
        cplx sd = d / 2.0 - s;
        cplx f2 = latsum::z_cubic_bessel(d, sd).value * latsum::gamma(sd) *
                  std::pow(latsum::pi, -sd);
        CHECK(std::abs(f1 - f2) / (std::abs(f1) + std::abs(f2) + 1e-30) <=
              1e-8);
      }
    }
  }
}

TEST_CASE("z_cubic_bessel anchors") {
  // Mutual consistency with the theta route.
  auto zt = latsum::z_cubic_theta(3, 2.0);
  auto zb = latsum::z_cubic_bessel(3, 2.0);
  CHECK(std::abs(zt.value - zb.value) <= 1e-8 * (1.0 + std::abs(zt.value)));

  // Z_2(1/2) = 4 zeta(1/2) beta(1/2).
  double want = 4.0 * (-1.460354508809586812889499) * 0.667691457189609176542;
  auto zh = latsum::z_cubic_bessel(2, 0.5);
  CHECK_THAT(zh.value.real(), WithinAbs(want, 1e-8));

  // At s = d/2 - 1 the series collapses to the cosh form; compare with an
  // independently assembled partial sum (oracle: brute_r_squares).
  auto r2 = oracle::brute_r_squares(2, 30);
  double acc = -1.0 / 12.0;
  for (long m = 1; m <= 30; ++m)
    acc += 0.5 * (double)r2[m] /
           (std::cosh(2 * latsum::pi * std::sqrt((double)m)) - 1.0);
  double cosh_value = 12.0 * latsum::pi * acc;
  auto zb3 = latsum::z_cubic_bessel(3, 0.5);
  CHECK_THAT(zb3.value.real(), WithinAbs(cosh_value, 1e-10));
  auto zv3 = latsum::z_boundary_value(3);
  CHECK_THAT(zv3.value.real(), WithinAbs(cosh_value, 1e-10));

  ContinuationConfig small;
  small.bessel_m_max = 4;
  CHECK_THROWS_AS(latsum::z_cubic_bessel(3, 2.0, small),
                  latsum::TableTooSmall);
}

TEST_CASE("z_boundary_value anchors") {
  // The d = 2 value encodes sum 1/(cosh(2 pi m) - 1) = 1/12 - 1/(4 pi).
  double lhs = 0.0;
  for (int m = 1; m <= 10; ++m) lhs += 1.0 / (std::cosh(2 * latsum::pi * m) - 1.0);
  CHECK_THAT(lhs, WithinAbs(1.0 / 12.0 - 1.0 / (4 * latsum::pi), 1e-14));

  auto z2 = latsum::z_boundary_value(2);
  CHECK_THAT(z2.value.real(), WithinAbs(-1.0, 1e-12));
  auto z4 = latsum::z_boundary_value(4);
  CHECK_THAT(z4.value.real(), WithinAbs(-8.0 * kLn2, 1e-10));
  CHECK_THROWS_AS(latsum::z_boundary_value(1), latsum::DomainError);
}

TEST_CASE("z_epstein matches the cubic continuations") {
  auto q3 = latsum::make_form(identity(3));
  auto ze = latsum::z_epstein(q3, 2.0);
  auto zt = latsum::z_cubic_theta(3, 2.0);
  CHECK(std::abs(ze.value - zt.value) <= 1e-10 * (1.0 + std::abs(zt.value)));

  auto q2 = latsum::make_form(identity(2));
  double beta3 = 0.968946146259369380318;
  auto ze2 = latsum::z_epstein(q2, 3.0);
  CHECK_THAT(ze2.value.real(), WithinAbs(4.0 * kZeta3 * beta3, 1e-9));

  // Z_{lambda Q}(s) = lambda^{-s} Z_Q(s).
  Mat scaled = identity(2);
  scaled[0][0] = scaled[1][1] = 4.0;
  auto zs = latsum::z_epstein(latsum::make_form(scaled), 2.5);
  auto zc = latsum::z_cubic_theta(2, 2.5);
  CHECK(std::abs(zs.value - std::pow(4.0, -2.5) * zc.value) <= 1e-9);
}

TEST_CASE("z_epstein in the convergence region matches direct sums") {
  std::mt19937_64 rng(77);
  for (int d : {2, 3}) {
    auto q = latsum::make_form(identity(d));
    for (double s : {d / 2.0 + 1.0, d / 2.0 + 1.8}) {
      auto z = latsum::z_epstein(q, s);
      auto brute = oracle::brute_alpha_cube(identity(d), 40, s);
      double bound = oracle::tail_bound_outside_cube((double)d, d, s, 40);
      INFO("d=" << d << " s=" << s);
      CHECK(std::abs(z.value - cplx((double)brute.real(), (double)brute.imag())) <=
            bound + z.abs_err_estimate);
    }
  }
  Mat a = random_pd(rng, 2);
  auto q = latsum::make_form(a);
  double trace_inv = q.inv_matrix[0][0] + q.inv_matrix[1][1];
  auto z = latsum::z_epstein(q, 2.4);
  auto brute = oracle::brute_alpha_cube(a, 40, 2.4);
  double bound = oracle::tail_bound_outside_cube(trace_inv, 2, 2.4, 40);
  CHECK(std::abs(z.value - cplx((double)brute.real(), (double)brute.imag())) <=
        bound + z.abs_err_estimate);
}

TEST_CASE("functional equation residual") {
  for (int d : {2, 3}) {
    auto q = latsum::make_form(identity(d));
    CHECK(latsum::functional_equation_residual(q, d / 4.0) <= 1e-12);
  }
  auto qd = latsum::make_form({{2.0, 0.0}, {0.0, 0.5}});
  CHECK(latsum::functional_equation_residual(qd, 0.8) <= 1e-8);
  std::mt19937_64 rng(12);
  auto q3 = latsum::make_form(random_pd(rng, 3));
  CHECK(latsum::functional_equation_residual(q3, 1.1) <= 1e-7);
  auto q2 = latsum::make_form(random_pd(rng, 2));
  CHECK(latsum::functional_equation_residual(q2, cplx(0.7, 1.0)) <= 1e-7);
}

TEST_CASE("residue_probe") {
  CHECK(latsum::residue_probe(latsum::make_form(identity(2))) <= 1e-6);
  CHECK(latsum::residue_probe(latsum::make_form(identity(5))) <= 1e-6);
  Mat scaled = identity(2);
  scaled[0][0] = scaled[1][1] = 4.0;
  CHECK(latsum::residue_probe(latsum::make_form(scaled)) <= 1e-6);
}

TEST_CASE("z_closed_form anchors") {
  double pi2_6 = latsum::pi * latsum::pi / 6.0;
  CHECK_THAT(std::abs(latsum::z_closed_form(2, 2.0) -
                      cplx(4.0 * pi2_6 * kCatalan)),
             WithinAbs(0.0, 1e-12));
  CHECK_THAT(std::abs(latsum::z_closed_form(4, 3.0) -
                      cplx(8.0 * (1.0 - 0.0625) * pi2_6 * kZeta3)),
             WithinAbs(0.0, 1e-12));
  CHECK_THAT(std::abs(latsum::z_closed_form(8, 5.0) -
                      cplx(16.0 * (1.0 - 0.0625 + 1.0 / 64.0) * kZeta5 * pi2_6)),
             WithinAbs(0.0, 1e-12));
  // Removable points at s = 1.
  CHECK_THAT(std::abs(latsum::z_closed_form(4, 1.0) - cplx(-8.0 * kLn2)),
             WithinAbs(0.0, 1e-13));
  CHECK_THAT(std::abs(latsum::z_closed_form(6, 1.0) -
                      cplx(-latsum::pi / 3.0 - 8.0 * kCatalan / latsum::pi)),
             WithinAbs(0.0, 1e-12));
  CHECK_THROWS_AS(latsum::z_closed_form(24, 3.0), latsum::DomainError);
  CHECK_THROWS_AS(latsum::z_closed_form(24, 12.0), latsum::PoleError);
  CHECK_THROWS_AS(latsum::z_closed_form(2, 1.0), latsum::PoleError);
  CHECK_THROWS_AS(latsum::z_closed_form(5, 2.0), latsum::DomainError);
}

TEST_CASE("z_closed_form branch seams are consistent") {
  // Inside the stabilized window the values must match the plain products.
  cplx s(1.3, 0.0);
  cplx direct6 = 16.0 * latsum::riemann_zeta(s - 2.0) * latsum::dirichlet_beta(s) -
                 4.0 * latsum::riemann_zeta(s) * latsum::dirichlet_beta(s - 2.0);
  CHECK_THAT(std::abs(latsum::z_closed_form(6, s) - direct6),
             WithinAbs(0.0, 1e-11));
  cplx direct8 = 16.0 *
                 (1.0 - std::pow(2.0, 1.0 - s) + std::pow(4.0, 2.0 - s)) *
                 latsum::riemann_zeta(s) * latsum::riemann_zeta(s - 3.0);
  CHECK_THAT(std::abs(latsum::z_closed_form(8, s) - direct8),
             WithinAbs(0.0, 1e-11));
  cplx s4(1.1, 0.0);
  cplx direct4 = 8.0 * (1.0 - std::pow(2.0, 2.0 - 2.0 * s4)) *
                 latsum::riemann_zeta(s4 - 1.0) * latsum::riemann_zeta(s4);
  CHECK_THAT(std::abs(latsum::z_closed_form(4, s4) - direct4),
             WithinAbs(0.0, 1e-11));
  // Approach to the removable point is smooth.
  for (double eps : {1e-5, -1e-5}) {
    CHECK_THAT(std::abs(latsum::z_closed_form(4, cplx(1.0 + eps)) -
                        cplx(-8.0 * kLn2)),
               WithinAbs(0.0, 1e-4));
  }
}

TEST_CASE("closed forms agree with the theta continuation") {
  for (int d : {2, 4, 6, 8}) {
    std::vector<double> res = grid_re(d);
    if (d != 2) res.push_back(1.0);  // removable point of the closed form
    for (double re : res) {
      for (double im : {0.0, 2.5}) {
        cplx s(re, im);
        INFO("d=" << d << " s=" << re << "+" << im << "i");
        auto zt = latsum::z_cubic_theta(d, s);
        cplx zc = latsum::z_closed_form(d, s);
        CHECK(std::abs(zt.value - zc) <= 1e-9 * (1.0 + std::abs(zc)));
      }
    }
  }
}

TEST_CASE("Z24 closed form against the theta continuation") {
  cplx closed = latsum::z_closed_form(24, 11.0);
  auto theta = latsum::z_cubic_theta(24, 11.0);
  CHECK(std::abs(theta.value - closed) <= 1e-6 * std::abs(closed));
}

TEST_CASE("z_epstein errors") {
  auto q = latsum::make_form(identity(2));
  CHECK_THROWS_AS(latsum::z_epstein(q, 1.0), latsum::PoleError);
  auto q24 = latsum::make_form(identity(24));
  CHECK_THROWS_AS(latsum::z_epstein(q24, 13.0), latsum::BudgetExceeded);
}
