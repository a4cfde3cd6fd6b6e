#pragma once
// Shared plumbing: error taxonomy, result carrier, compensated summation,
// Gauss-Legendre node cache, and small complex helpers.

#include <cmath>
#include <complex>
#include <map>
#include <mutex>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace latsum {

using cplx = std::complex<double>;

inline constexpr double pi = 3.141592653589793238462643383279502884;
inline constexpr double euler_gamma = 0.577215664901532860606512090082402431;

// All library errors derive from Error; callers may catch the base.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct PoleError : Error { using Error::Error; };
struct DomainError : Error { using Error::Error; };
struct NotPositiveDefinite : Error { using Error::Error; };
struct CrossCheckFailure : Error { using Error::Error; };
struct BudgetExceeded : Error { using Error::Error; };
struct TableTooSmall : Error { using Error::Error; };
struct StripViolation : Error { using Error::Error; };
struct IllConditioned : Error { using Error::Error; };
struct OverflowError : Error { using Error::Error; };

// Value with an error bound and work counter. converged=false marks an
// estimate that stopped on a budget rather than on tolerance; the value is
// still the best available and abs_err_estimate still bounds it.
struct SeriesResult {
  cplx value{0.0, 0.0};
  double abs_err_estimate = 0.0;
  long terms_used = 0;
  bool converged = true;
};

// Kahan compensated accumulator; addition order defines the result bit-exactly.
template <class T>
struct Kahan {
  T sum{};
  T comp{};
  void add(T x) {
    T y = x - comp;
    T t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }
  T value() const { return sum; }
};

// exp(z) - 1 without cancellation for small z.
inline cplx cexpm1(cplx z) {
  if (std::abs(z) > 0.25) return std::exp(z) - 1.0;
  cplx term = z, sum = z;
  for (int k = 2; k <= 20; ++k) {
    term *= z / double(k);
    sum += term;
    if (std::abs(term) < 1e-18 * std::abs(sum)) break;
  }
  return sum;
}

// (b^e - 1) for real b > 0, complex e; stable when e*log(b) is small.
inline cplx pow_minus_one(double b, cplx e) { return cexpm1(e * std::log(b)); }

// Gauss-Legendre nodes and weights on [-1, 1], cached per order.
struct GaussRule {
  std::vector<double> x, w;
};

inline const GaussRule& gauss_legendre(int n) {
  static std::map<int, GaussRule> cache;
  static std::mutex mu;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;

  GaussRule r;
  r.x.resize(n);
  r.w.resize(n);
  // Newton iteration from the Chebyshev-angle initial guess; the Legendre
  // recurrence also yields the derivative needed for the weight.
  for (int i = 0; i < n / 2 + n % 2; ++i) {
    double x = std::cos(pi * (i + 0.75) / (n + 0.5));
    double dp = 0;
    for (int it2 = 0; it2 < 100; ++it2) {
      double p0 = 1, p1 = x;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1);
      double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    r.x[i] = -x;
    r.x[n - 1 - i] = x;
    double w = 2 / ((1 - x * x) * dp * dp);
    r.w[i] = w;
    r.w[n - 1 - i] = w;
  }
  if (n % 2) r.x[n / 2] = 0;
  return cache.emplace(n, std::move(r)).first->second;
}

}  // namespace latsum
