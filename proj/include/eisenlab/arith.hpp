#pragma once

#include <cstdint>
#include <algorithm>
#include <numeric>
#include <utility>
#include <vector>

#include "errors.hpp"

namespace eisenlab {

using i64 = std::int64_t;

struct Factorization {
  i64 n = 1;
  std::vector<std::pair<i64, int>> factors;

  int omega() const { return static_cast<int>(factors.size()); }
};

struct FullnessSplit {
  i64 a = 1, b = 1, a_full = 1, a_perp = 1;
};

inline i64 gcd(i64 a, i64 b) { return std::gcd(a, b); }
inline i64 lcm(i64 a, i64 b) { return (a == 0 || b == 0) ? 0 : std::lcm(a, b); }

// Non-negative residue.
inline i64 mod(i64 a, i64 m) {
  i64 r = a % m;
  return r < 0 ? r + m : r;
}

inline i64 mulmod(i64 a, i64 b, i64 m) {
  return static_cast<i64>((static_cast<__int128>(a) * b) % m);
}

inline i64 powmod(i64 a, i64 e, i64 m) {
  i64 r = 1 % m;
  a = mod(a, m);
  while (e > 0) {
    if (e & 1) r = mulmod(r, a, m);
    a = mulmod(a, a, m);
    e >>= 1;
  }
  return r;
}

// Returns g = gcd(a,b) and x, y with a x + b y = g.
inline i64 ext_gcd(i64 a, i64 b, i64& x, i64& y) {
  i64 x0 = 1, y0 = 0, x1 = 0, y1 = 1;
  while (b != 0) {
    i64 q = a / b;
    i64 t = a - q * b; a = b; b = t;
    t = x0 - q * x1; x0 = x1; x1 = t;
    t = y0 - q * y1; y0 = y1; y1 = t;
  }
  if (a < 0) { a = -a; x0 = -x0; y0 = -y0; }
  x = x0;
  y = y0;
  return a;
}

inline i64 inv_mod(i64 a, i64 m) {
  i64 x, y;
  if (ext_gcd(mod(a, m), m, x, y) != 1) throw domain_error("inv_mod: not a unit");
  return mod(x, m);
}

inline Factorization factorize(i64 n) {
  if (n <= 0) throw domain_error("factorize: n must be positive");
  Factorization fz;
  fz.n = n;
  auto take = [&](i64 p) {
    int e = 0;
    while (n % p == 0) { n /= p; ++e; }
    if (e) fz.factors.emplace_back(p, e);
  };
  take(2);
  take(3);
  take(5);
  // wheel mod 30
  static const int inc[8] = {4, 2, 4, 2, 4, 6, 2, 6};
  i64 p = 7;
  int k = 0;
  while (p <= n / p) {
    take(p);
    p += inc[k];
    k = (k + 1) & 7;
  }
  if (n > 1) fz.factors.emplace_back(n, 1);
  return fz;
}

inline std::vector<i64> prime_divisors(i64 n) {
  std::vector<i64> ps;
  for (auto& [p, e] : factorize(n).factors) ps.push_back(p);
  return ps;
}

inline bool is_prime(i64 n) {
  if (n < 2) return false;
  auto f = factorize(n);
  return f.factors.size() == 1 && f.factors[0].second == 1;
}

inline int mobius(i64 n) {
  int m = 1;
  for (auto& [p, e] : factorize(n).factors) {
    if (e > 1) return 0;
    m = -m;
  }
  return m;
}

inline i64 euler_phi(i64 n) {
  i64 r = n;
  for (auto& [p, e] : factorize(n).factors) r = r / p * (p - 1);
  return r;
}

inline std::vector<i64> divisors(i64 n) {
  std::vector<i64> ds{1};
  for (auto& [p, e] : factorize(n).factors) {
    std::size_t m = ds.size();
    i64 pk = 1;
    for (int k = 1; k <= e; ++k) {
      pk *= p;
      for (std::size_t i = 0; i < m; ++i) ds.push_back(ds[i] * pk);
    }
  }
  std::sort(ds.begin(), ds.end());
  return ds;
}

inline int divisor_count(i64 n) { return static_cast<int>(divisors(n).size()); }

inline int omega(i64 n) { return factorize(n).omega(); }

inline int ppart_order(i64 p, i64 n) {
  if (!is_prime(p)) throw domain_error("ppart_order: p must be prime");
  if (n <= 0) throw domain_error("ppart_order: n must be positive");
  int e = 0;
  while (n % p == 0) { n /= p; ++e; }
  return e;
}

inline FullnessSplit fullness(i64 a, i64 b) {
  if (a <= 0 || b <= 0) throw domain_error("fullness: arguments must be positive");
  FullnessSplit s;
  s.a = a;
  s.b = b;
  i64 full = 1, rest = a;
  for (;;) {
    i64 g = gcd(rest, b);
    if (g == 1) break;
    while (rest % g == 0) { rest /= g; full *= g; }
  }
  s.a_full = full;
  s.a_perp = rest;
  return s;
}

// Index of Gamma_0(M) in SL_2(Z).
inline i64 nu_index(i64 M) {
  i64 r = M;
  for (auto& [p, e] : factorize(M).factors) r = r / p * (p + 1);
  return r;
}

}  // namespace eisenlab
