#pragma once
// Integer-lattice enumeration and counting: sup-norm shells, p-norm ball
// counts and volumes, representation-number tables r_d(n), Ramanujan tau,
// and the value spectrum of a quadratic form below a cutoff.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "latsum/common.hpp"
#include "latsum/quadform.hpp"
#include "latsum/specfun.hpp"

namespace latsum {

enum class RegionKind { Cube, PBall };

struct TruncationRegion {
  RegionKind kind = RegionKind::Cube;
  double n = 1.0;  // half-width (Cube) or radius (PBall)
  double p = 2.0;  // PBall norm exponent; infinity allowed
};

inline TruncationRegion cube_region(double n) {
  if (!(n > 0.0)) throw DomainError("cube_region: N must be positive");
  return {RegionKind::Cube, n, 2.0};
}

inline TruncationRegion pball_region(double p, double n) {
  if (!(n > 0.0)) throw DomainError("pball_region: N must be positive");
  if (!(p >= 1.0)) throw DomainError("pball_region: p must be at least 1");
  return {RegionKind::PBall, n, p};
}

enum class TableKind { RSquares, Tau, QSpectrum };

struct CoeffTable {
  TableKind kind = TableKind::RSquares;
  int dim = 0;        // d for RSquares and QSpectrum
  long max_index = 0; // highest valid index (RSquares/Tau); entry count (QSpectrum)
  std::vector<long long> values;
  std::vector<double> spectrum;  // QSpectrum only: sorted distinct Q values
};

// Calls fn(n) once for every integer vector with sup-norm exactly N, in
// lexicographic order.  The buffer passed to fn is reused between calls.
template <typename Fn>
void shell_iter(int d, long n, Fn&& fn) {
  if (d < 1) throw DomainError("shell_iter: dimension must be at least 1");
  if (n < 1) throw DomainError("shell_iter: N must be at least 1");
  std::vector<long> v(d);
  // hit marks whether an earlier coordinate already attained |v_i| = N.
  // Paths that cannot reach the shell are cut at the last axis, so the
  // total work is proportional to the shell size, not the box size.
  auto rec = [&](auto&& self, int axis, bool hit) -> void {
    if (axis == d) {
      fn(const_cast<const std::vector<long>&>(v));
      return;
    }
    if (axis == d - 1 && !hit) {
      v[axis] = -n;
      self(self, axis + 1, true);
      v[axis] = n;
      self(self, axis + 1, true);
      return;
    }
    for (long c = -n; c <= n; ++c) {
      v[axis] = c;
      self(self, axis + 1, hit || c == -n || c == n);
    }
  };
  rec(rec, 0, false);
}

namespace detail {

using i128 = __int128;

inline i128 ipow128(long long base, int e) {
  i128 r = 1, b = base;
  for (int k = 0; k < e; ++k) r *= b;
  return r;
}

// Largest b >= 0 with b^p <= x (x >= 0).
inline long long int_root(i128 x, int p) {
  if (x < 0) return -1;
  long long guess = (long long)std::floor(
      std::pow((double)x, 1.0 / p) * (1.0 + 1e-14));
  guess = std::max(0LL, guess - 2);
  while (ipow128(guess + 1, p) <= x) ++guess;
  if (ipow128(guess, p) > x) --guess;
  return guess;
}

// Exact count of n in Z^d with sum |n_i|^p <= t, integer p: the first d-1
// axes run over the nonnegative orthant with a sign multiplier, the last
// axis closes in O(1) via an integer root.
inline long long count_int_p(int d, int p, i128 t) {
  if (t < 0) return 0;
  if (d == 1) return 2 * int_root(t, p) + 1;
  long long total = 0;
  auto rec = [&](auto&& self, int axis, i128 left, long long mult) -> void {
    if (axis == d - 1) {
      total += mult * (2 * int_root(left, p) + 1);
      return;
    }
    self(self, axis + 1, left, mult);  // this axis = 0
    for (long long c = 1;; ++c) {
      i128 cp = ipow128(c, p);
      if (cp > left) break;
      self(self, axis + 1, left - cp, 2 * mult);
    }
  };
  rec(rec, 0, t, 1);
  return total;
}

// Same shape for non-integer p, in floating point.  The relative guard
// band is applied once to the threshold so boundary points classify stably.
inline long long count_real_p(int d, double p, double t) {
  if (t < 0) return 0;
  double tb = t * (1.0 + 1e-12);
  auto last_axis = [&](double left) -> long long {
    long long b = (long long)std::floor(std::pow(left, 1.0 / p));
    b = std::max(0LL, b - 2);
    while (std::pow((double)(b + 1), p) <= left) ++b;
    if (std::pow((double)b, p) > left) --b;
    return b;
  };
  if (d == 1) return 2 * last_axis(tb) + 1;
  long long total = 0;
  auto rec = [&](auto&& self, int axis, double left, long long mult) -> void {
    if (axis == d - 1) {
      total += mult * (2 * last_axis(left) + 1);
      return;
    }
    self(self, axis + 1, left, mult);
    for (long long c = 1;; ++c) {
      double cp = std::pow((double)c, p);
      if (cp > left) break;
      self(self, axis + 1, left - cp, 2 * mult);
    }
  };
  rec(rec, 0, tb, 1);
  return total;
}

// Prefix tables for the Euclidean sweep: c2[t] and c3[t] count lattice
// points of Z^2 and Z^3 inside the sphere of squared radius t.
struct EuclidTables {
  long long m = 0;
  std::vector<long long> r2, c2, c3;
};

inline EuclidTables build_euclid_tables(long long m, bool need_c3) {
  EuclidTables t;
  t.m = m;
  t.r2.assign(m + 1, 0);
  for (long long a = 0; a * a <= m; ++a) {
    long long ma = a > 0 ? 2 : 1;
    for (long long b = 0; a * a + b * b <= m; ++b)
      t.r2[a * a + b * b] += ma * (b > 0 ? 2 : 1);
  }
  t.c2 = t.r2;
  for (long long k = 1; k <= m; ++k) t.c2[k] += t.c2[k - 1];
  if (need_c3) {
    t.c3.assign(m + 1, 0);
    for (long long x = 0; x <= m; ++x) {
      long long acc = t.c2[x];
      for (long long j = 1; j * j <= x; ++j) acc += 2 * t.c2[x - j * j];
      t.c3[x] = acc;
    }
  }
  return t;
}

// Euclidean count from the prefix tables, d <= 6.
inline long long count_from_tables(const EuclidTables& t, int d, long long q) {
  switch (d) {
    case 2:
      return t.c2[q];
    case 3:
      return t.c3[q];
    case 4: {
      long long acc = t.c3[q];
      for (long long j = 1; j * j <= q; ++j) acc += 2 * t.c3[q - j * j];
      return acc;
    }
    case 5: {
      long long acc = 0;
      for (long long k = 0; k <= q; ++k)
        if (t.r2[k]) acc += t.r2[k] * t.c3[q - k];
      return acc;
    }
    default: {
      // d == 6 via r3 * c3 with r3[k] = sum over j of mult * r2[k - j^2].
      std::vector<long long> r3(q + 1, 0);
      for (long long k = 0; k <= q; ++k) {
        long long v = t.r2[k];
        for (long long j = 1; j * j <= k; ++j) v += 2 * t.r2[k - j * j];
        r3[k] = v;
      }
      long long acc = 0;
      for (long long k = 0; k <= q; ++k)
        if (r3[k]) acc += r3[k] * t.c3[q - k];
      return acc;
    }
  }
}

}  // namespace detail

inline double pball_volume(int d, double p, double n) {
  if (d < 1) throw DomainError("pball_volume: dimension must be at least 1");
  if (!(n >= 0.0)) throw DomainError("pball_volume: N must be nonnegative");
  if (std::isinf(p)) return std::pow(2.0 * n, d);
  if (!(p >= 1.0)) throw DomainError("pball_volume: p must be at least 1");
  return std::pow(2.0 * std::tgamma(1.0 + 1.0 / p), d) /
         std::tgamma(1.0 + (double)d / p) * std::pow(n, d);
}

// Exact number of lattice points with |n|_p <= N, origin included.
inline long long count_pball(int d, double p, double n) {
  if (d < 1) throw DomainError("count_pball: dimension must be at least 1");
  if (!(n >= 0.0)) throw DomainError("count_pball: N must be nonnegative");
  if (std::isinf(p)) {
    long long half = (long long)std::floor(n);
    long long total = 1;
    for (int i = 0; i < d; ++i) total *= 2 * half + 1;
    return total;
  }
  if (!(p >= 1.0)) throw DomainError("count_pball: p must be at least 1");
  bool int_p = p == std::floor(p) && p <= 40.0;
  if (int_p) {
    int ip = (int)p;
    detail::i128 t;
    if (n == std::floor(n)) {
      t = detail::ipow128((long long)n, ip);
    } else {
      double tf = std::pow(n, p);
      t = (detail::i128)(tf * (1.0 + 1e-12));
    }
    return detail::count_int_p(d, ip, t);
  }
  return detail::count_real_p(d, p, std::pow(n, p));
}

// Visits every nonzero lattice point of the largest of the given p-balls in
// lexicographic order as visit(point, b), where b is the index of the
// smallest ball containing the point.  Membership uses the same thresholds
// as count_pball, so sums and counts classify boundary points identically.
template <typename Visit>
void pball_scan(int d, double p, const std::vector<double>& radii,
                Visit&& visit) {
  if (d < 1) throw DomainError("pball_scan: dimension must be at least 1");
  if (radii.empty()) throw DomainError("pball_scan: need at least one radius");
  for (std::size_t i = 0; i < radii.size(); ++i) {
    if (!(radii[i] > 0.0))
      throw DomainError("pball_scan: radii must be positive");
    if (i > 0 && !(radii[i] > radii[i - 1]))
      throw DomainError("pball_scan: radii must be strictly increasing");
  }
  int nb = (int)radii.size();
  std::vector<long> v(d);
  if (std::isinf(p)) {
    std::vector<long> half(nb);
    for (int i = 0; i < nb; ++i) half[i] = (long)std::floor(radii[i]);
    auto rec = [&](auto&& self, int axis, long m) -> void {
      if (axis == d) {
        if (m == 0) return;
        int b = (int)(std::lower_bound(half.begin(), half.end(), m) -
                      half.begin());
        visit(const_cast<const std::vector<long>&>(v), b);
        return;
      }
      for (long c = -half.back(); c <= half.back(); ++c) {
        v[axis] = c;
        self(self, axis + 1, std::max(m, std::labs(c)));
      }
    };
    rec(rec, 0, 0);
    return;
  }
  if (!(p >= 1.0)) throw DomainError("pball_scan: p must be at least 1");
  if (p == std::floor(p) && p <= 40.0) {
    int ip = (int)p;
    std::vector<detail::i128> th(nb);
    for (int i = 0; i < nb; ++i) {
      if (radii[i] == std::floor(radii[i]))
        th[i] = detail::ipow128((long long)radii[i], ip);
      else
        th[i] = (detail::i128)(std::pow(radii[i], p) * (1.0 + 1e-12));
    }
    auto rec = [&](auto&& self, int axis, detail::i128 used,
                   bool nonzero) -> void {
      long cmax = (long)detail::int_root(th.back() - used, ip);
      if (axis == d - 1) {
        for (long c = -cmax; c <= cmax; ++c) {
          if (!nonzero && c == 0) continue;
          detail::i128 key = used + detail::ipow128(std::labs(c), ip);
          int b = (int)(std::lower_bound(th.begin(), th.end(), key) -
                        th.begin());
          v[axis] = c;
          visit(const_cast<const std::vector<long>&>(v), b);
        }
        return;
      }
      for (long c = -cmax; c <= cmax; ++c) {
        v[axis] = c;
        self(self, axis + 1, used + detail::ipow128(std::labs(c), ip),
             nonzero || c != 0);
      }
    };
    rec(rec, 0, 0, false);
    return;
  }
  // Non-integer p: the banded thresholds are consumed by the same
  // subtract-down chain as count_real_p, so the classifications agree.
  std::vector<std::vector<double>> left((std::size_t)d + 1,
                                        std::vector<double>(nb));
  for (int i = 0; i < nb; ++i) left[0][i] = std::pow(radii[i], p) * (1.0 + 1e-12);
  auto croot = [&](double t) -> long {
    if (t < 0.0) return -1;
    long b = (long)std::floor(std::pow(t, 1.0 / p));
    b = std::max(0L, b - 2);
    while (std::pow((double)(b + 1), p) <= t) ++b;
    if (b >= 0 && std::pow((double)b, p) > t) --b;
    return b;
  };
  auto rec = [&](auto&& self, int axis, bool nonzero) -> void {
    long cmax = croot(left[axis][nb - 1]);
    if (axis == d - 1) {
      for (long c = -cmax; c <= cmax; ++c) {
        if (!nonzero && c == 0) continue;
        double cp = std::pow((double)std::labs(c), p);
        int b = 0;
        while (cp > left[axis][b]) ++b;
        v[axis] = c;
        visit(const_cast<const std::vector<long>&>(v), b);
      }
      return;
    }
    for (long c = -cmax; c <= cmax; ++c) {
      double cp = std::pow((double)std::labs(c), p);
      for (int i = 0; i < nb; ++i) left[axis + 1][i] = left[axis][i] - cp;
      v[axis] = c;
      self(self, axis + 1, nonzero || c != 0);
    }
  };
  rec(rec, 0, false);
}

// Least-squares slope of log|count - volume - 1| against log N over the
// local maxima of the error on N in [n_max/4, n_max].  The error changes
// sign, so raw log-fits are meaningless near zero crossings; the peaks
// trace its envelope.  The slope is descriptive, not a proof.
inline double lambda_estimate(int d, double p, int n_max) {
  if (n_max < 16) throw DomainError("lambda_estimate: N_max must be >= 16");
  int n_lo = n_max / 4;
  bool table_path = d >= 3 && d <= 6 && p == 2.0;
  detail::EuclidTables tables;
  if (table_path)
    tables = detail::build_euclid_tables((long long)n_max * n_max, true);
  std::vector<double> err(n_max - n_lo + 1);
  for (int n = n_lo; n <= n_max; ++n) {
    long long c = table_path
                      ? detail::count_from_tables(tables, d, (long long)n * n)
                      : count_pball(d, p, (double)n);
    err[n - n_lo] = std::abs((double)c - pball_volume(d, p, (double)n) - 1.0);
  }
  std::vector<double> lx, ly;
  for (int n = n_lo + 1; n < n_max; ++n) {
    double e = err[n - n_lo];
    if (e > 0.0 && e >= err[n - n_lo - 1] && e >= err[n - n_lo + 1]) {
      lx.push_back(std::log((double)n));
      ly.push_back(std::log(e));
    }
  }
  // Oscillating errors are fitted through the envelope of local maxima.
  // Monotone errors (the sup-norm excess) have no interior peaks; every
  // positive sample enters the fit instead.
  if (lx.size() < 2) {
    lx.clear();
    ly.clear();
    for (int n = n_lo; n <= n_max; ++n) {
      double e = err[n - n_lo];
      if (e > 0.0) {
        lx.push_back(std::log((double)n));
        ly.push_back(std::log(e));
      }
    }
    if (lx.size() < 2)
      throw DomainError("lambda_estimate: error term is identically zero");
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (size_t i = 0; i < lx.size(); ++i) {
    sx += lx[i];
    sy += ly[i];
    sxx += lx[i] * lx[i];
    sxy += lx[i] * ly[i];
  }
  double m = (double)lx.size();
  return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

// r_d(k) for 0 <= k <= m by d-fold convolution of the one-dimensional table;
// exact in 128-bit intermediates, OverflowError if an entry leaves 64 bits.
inline CoeffTable r_squares_table(int d, long m) {
  if (d < 1) throw DomainError("r_squares_table: dimension must be at least 1");
  if (m < 0) throw DomainError("r_squares_table: M must be nonnegative");
  std::vector<detail::i128> cur(m + 1, 0);
  cur[0] = 1;
  for (long j = 1; j * j <= m; ++j) cur[j * j] = 2;
  std::vector<detail::i128> next(m + 1);
  for (int step = 1; step < d; ++step) {
    std::fill(next.begin(), next.end(), (detail::i128)0);
    for (long k = 0; k <= m; ++k) {
      if (cur[k] == 0) continue;
      next[k] += cur[k];
      for (long j = 1; k + j * j <= m; ++j) next[k + j * j] += 2 * cur[k];
    }
    cur.swap(next);
  }
  CoeffTable t;
  t.kind = TableKind::RSquares;
  t.dim = d;
  t.max_index = m;
  t.values.resize(m + 1);
  for (long k = 0; k <= m; ++k) {
    if (cur[k] > (detail::i128)std::numeric_limits<long long>::max())
      throw OverflowError("r_squares_table: entry exceeds 64 bits");
    t.values[k] = (long long)cur[k];
  }
  return t;
}

// tau(1..m) as a table; the series construction is shared with l_delta.
inline CoeffTable tau_table(long m) {
  if (m < 1) throw DomainError("tau_table: M must be at least 1");
  CoeffTable t;
  t.kind = TableKind::Tau;
  t.max_index = m;
  t.values = detail::tau_coeffs(m);
  return t;
}

// Distinct values of Q(n) <= cutoff over nonzero lattice vectors, with
// multiplicities.  Enumeration runs over the axis-aligned bounding box
// |n_i| <= sqrt(cutoff (A^{-1})_ii) of the ellipsoid (each per-axis bound
// is at most the Rayleigh bound cutoff/lambda_min).
inline CoeffTable q_spectrum(const QuadForm& q, double cutoff,
                             long long budget = 20000000) {
  if (!(cutoff > 0.0)) throw DomainError("q_spectrum: cutoff must be positive");
  int d = q.dim;
  std::vector<long> half(d);
  double box_points = 1.0;
  for (int i = 0; i < d; ++i) {
    half[i] = (long)std::floor(std::sqrt(cutoff * q.inv_matrix[i][i]) *
                               (1.0 + 1e-12));
    box_points *= 2.0 * half[i] + 1.0;
  }
  if (box_points > (double)budget)
    throw BudgetExceeded("q_spectrum: bounding box exceeds the point budget");
  std::vector<std::pair<double, long long>> hits;
  std::vector<double> x(d);
  std::vector<long> idx(d, 0);
  for (int i = 0; i < d; ++i) idx[i] = -half[i];
  for (;;) {
    bool zero = true;
    for (int i = 0; i < d; ++i) {
      x[i] = (double)idx[i];
      if (idx[i] != 0) zero = false;
    }
    if (!zero) {
      double v = q_value(q, x);
      if (v <= cutoff * (1.0 + 1e-12)) hits.push_back({v, 1});
    }
    int c = d - 1;
    while (c >= 0 && ++idx[c] > half[c]) idx[c--] = -half[c];
    if (c < 0) break;
  }
  std::sort(hits.begin(), hits.end());
  CoeffTable t;
  t.kind = TableKind::QSpectrum;
  t.dim = d;
  for (size_t i = 0; i < hits.size();) {
    size_t j = i;
    long long mult = 0;
    while (j < hits.size() && hits[j].first - hits[i].first <= 1e-9) {
      mult += hits[j].second;
      ++j;
    }
    t.spectrum.push_back(hits[i].first);
    t.values.push_back(mult);
    i = j;
  }
  t.max_index = (long)t.spectrum.size();
  return t;
}

inline std::string table_to_csv(const CoeffTable& t) {
  std::string out;
  if (t.kind == TableKind::QSpectrum) {
    out = "q,multiplicity\n";
    for (size_t i = 0; i < t.spectrum.size(); ++i) {
      char buf[64];
      std::snprintf(buf, sizeof buf, "%.17g,%lld\n", t.spectrum[i],
                    t.values[i]);
      out += buf;
    }
  } else {
    out = "n,value\n";
    long start = t.kind == TableKind::Tau ? 1 : 0;
    for (long k = start; k <= t.max_index; ++k) {
      char buf[64];
      std::snprintf(buf, sizeof buf, "%ld,%lld\n", k, t.values[k]);
      out += buf;
    }
  }
  return out;
}

}  // namespace latsum
