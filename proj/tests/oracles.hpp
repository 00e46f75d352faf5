#pragma once

// Independent reference computations used only by the tests. Everything here
// works in long double from the raw rates and shares no code with the library.

#include <array>
#include <cmath>
#include <cstdint>
#include <random>

#include "persist/error.hpp"
#include "persist/model.hpp"

namespace oracle {

using ld = long double;
using M2 = std::array<ld, 4>;  // row-major {m11, m12, m21, m22}

inline persist::RawParams ex1(double p = 1.0) {
  const double s = std::sqrt(21.0);
  return {(s + 3.0) / 4.0, 0.5, (s - 3.0) / 4.0, 0.5, 0.5, p};
}

inline persist::RawParams triangular(double p = 1.0) { return {1.0, 0.0, 1.0, 0.0, 0.0, p}; }

inline persist::RawParams figure(double p = 1.0) { return {3.7, 0.01, 0.01, 0.025, 0.025, p}; }

inline ld ex1_tc() { return std::log(3.0L + std::sqrt(21.0L)) - std::log(5.0L - std::sqrt(21.0L)); }

inline ld ex1_rbar(ld t) {
  const ld s = std::sqrt(21.0L);
  return std::exp(t) * (5.0L - s) / 8.0L + std::exp(-t) * (3.0L + s) / 8.0L;
}

inline M2 generator(const persist::RawParams& q) {
  return {ld(q.lambda) - q.a - q.d_n, ld(q.b), ld(q.a), -(ld(q.b) + q.d_r)};
}

inline M2 mul(const M2& x, const M2& y) {
  return {x[0] * y[0] + x[1] * y[2], x[0] * y[1] + x[1] * y[3], x[2] * y[0] + x[3] * y[2],
          x[2] * y[1] + x[3] * y[3]};
}

// Scaling and squaring with a 40-term Taylor series.
inline M2 expm(const M2& a, ld t) {
  M2 x{a[0] * t, a[1] * t, a[2] * t, a[3] * t};
  ld norm = 0;
  for (ld v : x) norm = std::max(norm, std::fabs(v));
  int squarings = 0;
  while (norm > 0.25L) {
    norm /= 2;
    ++squarings;
  }
  const ld scale = std::ldexp(1.0L, -squarings);
  for (ld& v : x) v *= scale;
  M2 sum{1, 0, 0, 1};
  M2 term{1, 0, 0, 1};
  for (int k = 1; k <= 40; ++k) {
    term = mul(term, x);
    for (ld& v : term) v /= k;
    for (int i = 0; i < 4; ++i) sum[i] += term[i];
  }
  for (int i = 0; i < squarings; ++i) sum = mul(sum, sum);
  return sum;
}

// Post-kill mean matrix diag(1-p, 1) e^{At}.
inline M2 moment(const persist::RawParams& q, ld t) {
  M2 e = expm(generator(q), t);
  e[0] *= 1.0L - q.p;
  e[1] *= 1.0L - q.p;
  return e;
}

// Largest eigenvalue by the plain quadratic formula.
inline ld perron(const M2& m) {
  const ld tr = m[0] + m[3];
  const ld det = m[0] * m[3] - m[1] * m[2];
  const ld disc = std::max(0.0L, tr * tr / 4 - det);
  return tr / 2 + std::sqrt(disc);
}

inline std::array<ld, 2> eigenvalues(const persist::RawParams& q) {
  const M2 a = generator(q);
  const ld tr = a[0] + a[3];
  const ld det = a[0] * a[3] - a[1] * a[2];
  const ld root = std::sqrt(tr * tr / 4 - det);
  return {tr / 2 + root, tr / 2 - root};
}

// Critical period by coarse scan then bisection on perron(M(t)) - 1.
inline ld critical_time(const persist::RawParams& q) {
  ld lo = 0, hi = 1e-3L;
  while (perron(moment(q, hi)) <= 1.0L) {
    lo = hi;
    hi *= 1.25L;
  }
  for (int i = 0; i < 200; ++i) {
    const ld mid = (lo + hi) / 2;
    (perron(moment(q, mid)) <= 1.0L ? lo : hi) = mid;
  }
  return (lo + hi) / 2;
}

// Extinction probability of a single-type birth-death process from one
// individual: smallest fixed point of s = (d + l s^2) / (l + d).
inline ld birth_death_extinction(ld l, ld d) {
  ld s = 0;
  for (int i = 0; i < 200000; ++i) s = (d + l * s * s) / (l + d);
  return s;
}

// Sum_k (1/beta)(1-1/beta)^{k-1} log rbar(k) for the p=1 reduction.
inline ld geometric_log_mean(const persist::RawParams& q, ld beta) {
  const ld s = 1.0L / beta;
  ld weight = s, tail = 1, total = 0;
  for (int k = 1; tail > 1e-15L && k < 100000; ++k) {
    total += weight * std::log(expm(generator(q), k)[3]);
    tail -= weight;
    weight *= 1 - s;
  }
  return total;
}

// Random supercritical parameter sets with a comfortable spectral gap.
inline persist::RawParams random_supercritical(std::mt19937_64& g, double p = 0.5) {
  std::uniform_real_distribution<double> u(0.01, 2.0);
  for (;;) {
    persist::RawParams q{u(g) + 0.5, u(g), u(g), u(g) * 0.5, u(g) * 0.5, p};
    const double det = (q.b + q.d_r) * (q.lambda - q.d_n) - q.a * q.d_r;
    if (det > 0.05) return q;
  }
}

inline ld rel_err(ld x, ld ref) { return std::fabs(x - ref) / std::max(1.0L, std::fabs(ref)); }

}  // namespace oracle
