// Tests for lattice enumeration, p-ball counts, coefficient tables, and
// quadratic-form spectra.  Expected values marked "oracle:" were computed
// with the brute-force reference implementations in oracles.hpp.

#include <catch2/catch_amalgamated.hpp>

#include <latsum/lattice.hpp>
#include <latsum/quadform.hpp>

#include <cmath>
#include <random>
#include <vector>

#include "oracles.hpp"

using latsum::CoeffTable;
using latsum::Mat;
using latsum::QuadForm;
using latsum::RegionKind;
using latsum::TableKind;
using Catch::Matchers::WithinAbs;

namespace {

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

std::vector<std::vector<long>> collect_shell(int d, long n) {
  std::vector<std::vector<long>> out;
  latsum::shell_iter(d, n, [&](const std::vector<long>& v) { out.push_back(v); });
  return out;
}

}  // namespace

TEST_CASE("truncation region factories validate") {
  auto c = latsum::cube_region(2.5);
  CHECK(c.kind == RegionKind::Cube);
  CHECK(c.n == 2.5);
  auto b = latsum::pball_region(3.0, 10.0);
  CHECK(b.kind == RegionKind::PBall);
  CHECK(b.p == 3.0);
  CHECK(b.n == 10.0);
  auto binf = latsum::pball_region(std::numeric_limits<double>::infinity(), 4.0);
  CHECK(std::isinf(binf.p));
  CHECK_THROWS_AS(latsum::cube_region(0.0), latsum::DomainError);
  CHECK_THROWS_AS(latsum::cube_region(-1.0), latsum::DomainError);
  CHECK_THROWS_AS(latsum::pball_region(0.5, 1.0), latsum::DomainError);
  CHECK_THROWS_AS(latsum::pball_region(2.0, 0.0), latsum::DomainError);
}

TEST_CASE("shell_iter enumerates sup-norm shells in lexicographic order") {
  // d=1: the shell is the two endpoints.
  auto s1 = collect_shell(1, 3);
  REQUIRE(s1.size() == 2);
  CHECK(s1[0] == std::vector<long>{-3});
  CHECK(s1[1] == std::vector<long>{3});

  // d=2, N=1: all 8 boundary points of the 3x3 box.
  auto s2 = collect_shell(2, 1);
  REQUIRE(s2.size() == 8);
  CHECK(s2.front() == std::vector<long>{-1, -1});
  CHECK(s2.back() == std::vector<long>{1, 1});

  // d=3, N=2: 5^3 - 3^3 = 98 points.  oracle: brute_shell_count.
  auto s3 = collect_shell(3, 2);
  REQUIRE((long long)s3.size() == 98);
  CHECK((long long)s3.size() == oracle::brute_shell_count(3, 2));
  for (auto& v : s3) {
    long m = 0;
    for (long c : v) m = std::max(m, std::labs(c));
    CHECK(m == 2);
  }
  // Strictly increasing lexicographic order implies determinism and no
  // duplicates.
  for (size_t i = 1; i < s3.size(); ++i) CHECK(s3[i - 1] < s3[i]);

  CHECK_THROWS_AS(collect_shell(0, 1), latsum::DomainError);
  CHECK_THROWS_AS(collect_shell(2, 0), latsum::DomainError);
}

TEST_CASE("shells tile the cube") {
  for (int d = 1; d <= 3; ++d) {
    long long total = 1;  // origin
    for (long k = 1; k <= 4; ++k) total += (long long)collect_shell(d, k).size();
    long long box = 1;
    for (int i = 0; i < d; ++i) box *= 9;
    CHECK(total == box);
  }
}

TEST_CASE("count_pball integer cases match brute force") {
  CHECK(latsum::count_pball(2, 2.0, 1.0) == 5);
  // oracle: brute_count_pball_int(2, 2, 2).
  CHECK(latsum::count_pball(2, 2.0, 2.0) == 13);
  CHECK(latsum::count_pball(3, 2.0, 2.0) == 33);
  auto inf = std::numeric_limits<double>::infinity();
  CHECK(latsum::count_pball(2, inf, 2.0) == 25);
  for (int d = 1; d <= 3; ++d)
    for (int p : {1, 2, 4})
      for (long n = 1; n <= 6; ++n)
        CHECK(latsum::count_pball(d, (double)p, (double)n) ==
              oracle::brute_count_pball_int(d, p, n));
  CHECK(latsum::count_pball(4, 2.0, 3.0) == oracle::brute_count_pball_int(4, 2, 3));
  CHECK(latsum::count_pball(4, 2.0, 7.0) == oracle::brute_count_pball_int(4, 2, 7));
  CHECK_THROWS_AS(latsum::count_pball(0, 2.0, 1.0), latsum::DomainError);
  CHECK_THROWS_AS(latsum::count_pball(2, 0.5, 1.0), latsum::DomainError);
  CHECK_THROWS_AS(latsum::count_pball(2, 2.0, -1.0), latsum::DomainError);
}

TEST_CASE("count_pball sup-norm closed form") {
  auto inf = std::numeric_limits<double>::infinity();
  for (int d = 1; d <= 4; ++d)
    for (double n : {0.0, 0.5, 1.0, 2.7, 3.0}) {
      long long side = 2 * (long long)std::floor(n) + 1;
      long long expect = 1;
      for (int i = 0; i < d; ++i) expect *= side;
      CHECK(latsum::count_pball(d, inf, n) == expect);
    }
}

TEST_CASE("count_pball real p and radius match brute force") {
  for (int d : {2, 3})
    for (double p : {1.5, 2.5, 3.3})
      for (double n : {2.3, 4.7})
        CHECK(latsum::count_pball(d, p, n) ==
              oracle::brute_count_pball_real(d, p, n));
  // Non-integral radius, integer p: no lattice point sits on the boundary.
  CHECK(latsum::count_pball(2, 2.0, 2.5) ==
        oracle::brute_count_pball_real(2, 2.0, 2.5));
  // Radius sqrt(2): the boundary points (+-1,+-1) must be included.
  CHECK(latsum::count_pball(2, 2.0, std::sqrt(2.0)) == 9);
}

TEST_CASE("euclidean prefix tables agree with representation counts") {
  auto tables = latsum::detail::build_euclid_tables(200, true);
  for (int d = 2; d <= 6; ++d) {
    auto r = latsum::r_squares_table(d, 200);
    long long prefix = 0;
    for (long q = 0; q <= 200; ++q) {
      prefix += r.values[q];
      CHECK(latsum::detail::count_from_tables(tables, d, q) == prefix);
    }
  }
}

TEST_CASE("pball_volume closed forms") {
  CHECK_THAT(latsum::pball_volume(2, 2.0, 1.0), WithinAbs(latsum::pi, 1e-14));
  CHECK_THAT(latsum::pball_volume(3, 2.0, 1.0),
             WithinAbs(4.0 * latsum::pi / 3.0, 1e-14));
  CHECK_THAT(latsum::pball_volume(2, 1.0, 1.0), WithinAbs(2.0, 1e-14));
  auto inf = std::numeric_limits<double>::infinity();
  CHECK_THAT(latsum::pball_volume(3, inf, 2.0), WithinAbs(64.0, 1e-12));
  // Large p approaches the cube volume.
  CHECK_THAT(latsum::pball_volume(2, 64.0, 1.0), WithinAbs(4.0, 0.15));
  // Scaling is N^d.
  CHECK_THAT(latsum::pball_volume(3, 2.5, 2.0),
             WithinAbs(8.0 * latsum::pball_volume(3, 2.5, 1.0), 1e-12));
  CHECK_THROWS_AS(latsum::pball_volume(2, 0.5, 1.0), latsum::DomainError);
  CHECK_THROWS_AS(latsum::pball_volume(2, 2.0, -1.0), latsum::DomainError);
  CHECK_THROWS_AS(latsum::pball_volume(0, 2.0, 1.0), latsum::DomainError);
}

TEST_CASE("lambda_estimate lands in the known growth bands") {
  double l22 = latsum::lambda_estimate(2, 2.0, 2048);
  CHECK(l22 > 0.4);
  CHECK(l22 < 0.7);
  double l42 = latsum::lambda_estimate(4, 2.0, 512);
  CHECK(l42 > 1.8);
  CHECK(l42 < 2.2);
  double l24 = latsum::lambda_estimate(2, 4.0, 1024);
  CHECK(l24 > 0.6);
  CHECK(l24 < 0.9);
  CHECK_THROWS_AS(latsum::lambda_estimate(2, 2.0, 15), latsum::DomainError);
}

TEST_CASE("r_squares_table matches brute force") {
  for (int d = 1; d <= 4; ++d) {
    auto t = latsum::r_squares_table(d, 50);
    CHECK(t.kind == TableKind::RSquares);
    CHECK(t.dim == d);
    CHECK(t.max_index == 50);
    CHECK(t.values[0] == 1);
    auto brute = oracle::brute_r_squares(d, 50);
    for (long k = 0; k <= 50; ++k) CHECK(t.values[k] == brute[k]);
  }
  // Every positive integer is a sum of four squares.
  auto t4 = latsum::r_squares_table(4, 200);
  for (long k = 1; k <= 200; ++k) CHECK(t4.values[k] > 0);
  CHECK_THROWS_AS(latsum::r_squares_table(0, 10), latsum::DomainError);
  CHECK_THROWS_AS(latsum::r_squares_table(2, -1), latsum::DomainError);
}

TEST_CASE("representation tables convolve") {
  const int pairs[][2] = {{1, 2}, {2, 2}, {3, 5}, {4, 4}, {1, 7}};
  for (auto& pr : pairs) {
    int i = pr[0], j = pr[1];
    auto a = latsum::r_squares_table(i, 200);
    auto b = latsum::r_squares_table(j, 200);
    auto c = latsum::r_squares_table(i + j, 200);
    for (long n = 0; n <= 200; n += 7) {
      long long conv = 0;
      for (long k = 0; k <= n; ++k) conv += a.values[k] * b.values[n - k];
      CHECK(conv == c.values[n]);
    }
  }
}

TEST_CASE("r_squares_table overflow raises") {
  CHECK_THROWS_AS(latsum::r_squares_table(24, 80), latsum::OverflowError);
}

TEST_CASE("tau_table matches the multiplication oracle") {
  auto t = latsum::tau_table(60);
  CHECK(t.kind == TableKind::Tau);
  CHECK(t.max_index == 60);
  CHECK(t.values[1] == 1);
  // oracle: tau_by_multiplication.
  CHECK(t.values[2] == -24);
  CHECK(t.values[3] == 252);
  auto brute = oracle::tau_by_multiplication(60);
  for (long k = 1; k <= 60; ++k) CHECK(t.values[k] == brute[k]);
  // Multiplicative on coprime indices; Hecke recursion at the prime square.
  CHECK(t.values[6] == t.values[2] * t.values[3]);
  CHECK(t.values[4] == t.values[2] * t.values[2] - 2048);
  CHECK_THROWS_AS(latsum::tau_table(0), latsum::DomainError);
}

TEST_CASE("q_spectrum on identity forms reproduces representation counts") {
  auto q2 = latsum::make_form(identity(2));
  auto s = latsum::q_spectrum(q2, 1.0);
  REQUIRE(s.max_index == 1);
  CHECK_THAT(s.spectrum[0], WithinAbs(1.0, 1e-12));
  CHECK(s.values[0] == 4);

  for (int d : {2, 3}) {
    auto q = latsum::make_form(identity(d));
    auto spec = latsum::q_spectrum(q, 20.0);
    auto r = latsum::r_squares_table(d, 20);
    size_t idx = 0;
    for (long n = 1; n <= 20; ++n) {
      if (r.values[n] == 0) continue;
      REQUIRE(idx < spec.spectrum.size());
      CHECK_THAT(spec.spectrum[idx], WithinAbs((double)n, 1e-9));
      CHECK(spec.values[idx] == r.values[n]);
      ++idx;
    }
    CHECK(idx == spec.spectrum.size());
  }
}

TEST_CASE("q_spectrum diagonal example") {
  // diag(1,2), cutoff 2: the only nonzero points with Q <= 2 are
  // (+-1, 0) with Q = 1 and (0, +-1) with Q = 2.  oracle: brute_spectrum.
  auto q = latsum::make_form({{1.0, 0.0}, {0.0, 2.0}});
  auto s = latsum::q_spectrum(q, 2.0);
  REQUIRE(s.max_index == 2);
  CHECK_THAT(s.spectrum[0], WithinAbs(1.0, 1e-12));
  CHECK(s.values[0] == 2);
  CHECK_THAT(s.spectrum[1], WithinAbs(2.0, 1e-12));
  CHECK(s.values[1] == 2);
}

TEST_CASE("q_spectrum matches brute force on random forms") {
  std::mt19937_64 rng(2026);
  for (int d : {2, 3}) {
    for (int trial = 0; trial < 5; ++trial) {
      auto a = random_pd(rng, d);
      auto q = latsum::make_form(a);
      double cutoff = 2.0 + 0.5 * trial;
      auto got = latsum::q_spectrum(q, cutoff);
      long box = 0;
      for (int i = 0; i < d; ++i)
        box = std::max(box, (long)std::floor(std::sqrt(
                                cutoff * q.inv_matrix[i][i])) +
                                1);
      auto want = oracle::brute_spectrum(a, cutoff, box);
      REQUIRE((size_t)got.max_index == want.size());
      for (size_t i = 0; i < want.size(); ++i) {
        CHECK_THAT(got.spectrum[i], WithinAbs(want[i].first, 1e-9));
        CHECK(got.values[i] == want[i].second);
      }
      long long total = 0;
      for (long long m : got.values) total += m;
      long long brute_total = 0;
      for (auto& [v, m] : want) brute_total += m;
      CHECK(total == brute_total);
    }
  }
}

TEST_CASE("q_spectrum budget and domain errors") {
  auto q3 = latsum::make_form(identity(3));
  CHECK_THROWS_AS(latsum::q_spectrum(q3, 1e4, 100), latsum::BudgetExceeded);
  CHECK_THROWS_AS(latsum::q_spectrum(q3, 0.0), latsum::DomainError);
  CHECK_THROWS_AS(latsum::q_spectrum(q3, -2.0), latsum::DomainError);
}

TEST_CASE("csv export shapes") {
  auto r = latsum::r_squares_table(2, 3);
  CHECK(latsum::table_to_csv(r) == "n,value\n0,1\n1,4\n2,4\n3,0\n");
  auto t = latsum::tau_table(2);
  CHECK(latsum::table_to_csv(t) == "n,value\n1,1\n2,-24\n");
  auto q = latsum::make_form(identity(2));
  auto s = latsum::q_spectrum(q, 1.0);
  CHECK(latsum::table_to_csv(s) == "q,multiplicity\n1,4\n");
}
