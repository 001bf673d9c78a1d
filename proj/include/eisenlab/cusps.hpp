#pragma once

#include <complex>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <vector>

#include "arith.hpp"
#include "characters.hpp"

namespace eisenlab {

struct GL2Z {
  i64 a = 1, b = 0, c = 0, d = 1;

  i64 det() const { return a * d - b * c; }
  GL2Z operator*(const GL2Z& o) const {
    return {a * o.a + b * o.c, a * o.b + b * o.d, c * o.a + d * o.c, c * o.b + d * o.d};
  }
  GL2Z inverse() const { return {d, -b, -c, a}; }
  bool operator==(const GL2Z& o) const { return a == o.a && b == o.b && c == o.c && d == o.d; }

  cplx apply(cplx z) const {
    return (static_cast<double>(a) * z + static_cast<double>(b)) /
           (static_cast<double>(c) * z + static_cast<double>(d));
  }
  // Numerically careful imaginary part: Im(z)/|cz+d|^2.
  double im_apply(cplx z) const {
    return z.imag() / std::norm(static_cast<double>(c) * z + static_cast<double>(d));
  }

  static GL2Z translation(i64 t) { return {1, t, 0, 1}; }
};

inline bool in_gamma0(const GL2Z& g, i64 N) { return g.det() == 1 && g.c % N == 0; }

// Point of P^1(Q); den == 0 is infinity.
struct P1Q {
  i64 num = 1, den = 0;
  static P1Q infinity() { return {1, 0}; }
  P1Q normalized() const {
    i64 g = gcd(num, den);
    if (g == 0) return {1, 0};
    i64 n = num / g, d = den / g;
    if (d < 0 || (d == 0 && n < 0)) { n = -n; d = -d; }
    return {n, d};
  }
  bool operator==(const P1Q& o) const {
    auto x = normalized(), y = o.normalized();
    return x.num == y.num && x.den == y.den;
  }
};

inline P1Q apply(const GL2Z& g, const P1Q& p) {
  return P1Q{g.a * p.num + g.b * p.den, g.c * p.num + g.d * p.den}.normalized();
}

struct Cusp {
  i64 u = 1, f = 1, N = 1;

  i64 width() const { return N / gcd(N, f * f); }
  i64 gcd_f() const { return gcd(f, N / f); }
  P1Q point() const { return {u, f}; }
  bool is_infinity() const { return f == N; }
  bool operator==(const Cusp& o) const { return u == o.u && f == o.f && N == o.N; }
  bool operator<(const Cusp& o) const {
    return N != o.N ? N < o.N : (f != o.f ? f < o.f : u < o.u);
  }
};

// Least u = v mod (f,N/f), u >= 1, coprime to f (scan upward in steps of (f,N/f)).
inline i64 cusp_min_rep(i64 N, i64 f, i64 v) {
  i64 g = gcd(f, N / f);
  i64 u = mod(v, g);
  if (u == 0) u = g;
  while (gcd(u, f) != 1) u += g;
  return u;
}

inline std::vector<Cusp> cusp_set(i64 N) {
  if (N < 1) throw domain_error("cusp_set: N must be positive");
  std::vector<Cusp> out;
  for (i64 f : divisors(N)) {
    i64 g = gcd(f, N / f);
    for (i64 v = 1; v <= g; ++v) {
      if (gcd(v, g) != 1) continue;
      out.push_back({cusp_min_rep(N, f, v), f, N});
    }
  }
  return out;
}

// Representative in cusp_set(N) of the orbit of p. The orbit of a/c (lowest terms)
// is determined by f = (c,N) and a*(c/f) mod (f,N/f).
inline Cusp reduce(const P1Q& p0, i64 N) {
  P1Q p = p0.normalized();
  i64 c = p.den, a = p.num;
  i64 f = gcd(c, N);
  if (c == 0) f = N;
  i64 g = gcd(f, N / f);
  i64 c0 = (c == 0) ? 0 : c / f;
  i64 v = (c == 0) ? 1 : mod(mulmod(mod(a, g), mod(c0, g), g), g);
  return {cusp_min_rep(N, f, v), f, N};
}

inline bool equivalent(const P1Q& a, const P1Q& b, i64 N) { return reduce(a, N) == reduce(b, N); }

// Explicit search for gamma in Gamma_0(N) with gamma a = b, entries bounded by `bound`.
inline std::optional<GL2Z> find_gamma(const P1Q& a0, const P1Q& b0, i64 N, i64 bound) {
  P1Q a = a0.normalized(), b = b0.normalized();
  for (i64 c = 0; c <= bound; c += N) {
    for (i64 d = -bound; d <= bound; ++d) {
      if (gcd(c, d) != 1) continue;
      if (c == 0 && d != 1) continue;
      i64 x, y;
      ext_gcd(d, c, x, y);  // d x + c y = 1: (x, -y; c, d)
      GL2Z g0{x, -y, c, d};
      // gamma = T^t g0 covers the coset; solve for t
      P1Q img = apply(g0, a);
      if (img.den != b.den) continue;
      if (b.den == 0) return g0;
      i64 diff = b.num - img.num;
      if (diff % b.den != 0) continue;
      GL2Z g = GL2Z::translation(diff / b.den) * g0;
      if (apply(g, a) == b) return g;
    }
  }
  return std::nullopt;
}

inline i64 width(const Cusp& a) { return a.width(); }

// Absolute width of the cusp reduced to level M | N.
inline i64 width_at_level(const Cusp& a, i64 M) {
  i64 fm = gcd(M, a.f);
  return M / gcd(M, fm * fm);
}

inline i64 relative_width(const Cusp& a, i64 M) {
  if (M < 1 || a.N % M != 0) throw domain_error("relative_width: M must divide N");
  return width_at_level(a, 1 * a.N) / width_at_level(a, M);
}

inline Cusp reduce_to_level(const Cusp& a, i64 M) { return reduce(a.point(), M); }

inline bool is_singular(const Cusp& a, const DirichletCharacter& chi) {
  if (!chi.is_even()) throw domain_error("is_singular: character must be even");
  if (chi.modulus() != a.N) throw domain_error("is_singular: modulus must equal level");
  return lcm(a.f, a.N / a.f) % chi.conductor() == 0;
}

inline std::vector<Cusp> singular_cusps(i64 N, const DirichletCharacter& chi) {
  std::vector<Cusp> out;
  for (auto& c : cusp_set(N))
    if (is_singular(c, chi)) out.push_back(c);
  return out;
}

inline bool is_atkin_lehner(const Cusp& a) { return a.u == 1 && gcd(a.f, a.N / a.f) == 1; }

inline Cusp atkin_lehner_complement(const Cusp& a) {
  if (!is_atkin_lehner(a)) throw domain_error("atkin_lehner_complement: not an Atkin-Lehner cusp");
  return {1, a.N / a.f, a.N};
}

struct ScalingMatrix {
  GL2Z gamma;
  i64 W = 1;

  // sigma z = gamma (W z)
  cplx apply(cplx z) const { return gamma.apply(static_cast<double>(W) * z); }
};

// gamma = (u v; f w) with the least |v|.
inline GL2Z cusp_gamma(i64 u, i64 f) {
  i64 x, y;
  ext_gcd(u, f, x, y);  // u x + f y = 1
  i64 v = -y, w = x;
  if (u != 0) {
    // (u, v + k u; f, w + k f)
    double kr = -static_cast<double>(v) / static_cast<double>(u);
    i64 best = v, bk = 0;
    for (i64 k = static_cast<i64>(std::floor(kr)) - 1; k <= static_cast<i64>(std::ceil(kr)) + 1; ++k) {
      i64 cand = v + k * u;
      if (std::llabs(cand) < std::llabs(best) || (std::llabs(cand) == std::llabs(best) && cand > best)) {
        best = cand;
        bk = k;
      }
    }
    v = best;
    w = w + bk * f;
  }
  return {u, v, f, w};
}

inline ScalingMatrix scaling_matrix(const Cusp& a) { return {cusp_gamma(a.u, a.f), a.width()}; }

// ---- P^1(Z/M) and coset representatives of Gamma_0(M)\SL_2(Z) ----

struct P1Table {
  i64 M = 1;
  std::vector<std::pair<i64, i64>> forms;  // canonical forms in lexicographic order
  std::vector<GL2Z> reps;
  std::vector<int> index;  // index[c*M+d] for every (c,d) with gcd(c,d,M)=1, else -1
  std::vector<i64> units;

  static std::shared_ptr<const P1Table> get(i64 M) {
    static std::mutex mu;
    static std::map<i64, std::shared_ptr<const P1Table>> cache;
    std::lock_guard<std::mutex> lk(mu);
    auto it = cache.find(M);
    if (it != cache.end()) return it->second;
    auto t = std::make_shared<const P1Table>(build(M));
    cache.emplace(M, t);
    return t;
  }

  static std::pair<i64, i64> normal_form(i64 c, i64 d, i64 M, const std::vector<i64>& units) {
    c = mod(c, M);
    d = mod(d, M);
    std::pair<i64, i64> best{M, M};
    for (i64 l : units) {
      std::pair<i64, i64> cand{mulmod(l, c, M), mulmod(l, d, M)};
      if (cand < best) best = cand;
    }
    return best;
  }

  // SL_2(Z) matrix whose bottom row is congruent to (c, d) mod M.
  static GL2Z lift(i64 c, i64 d, i64 M) {
    if (M == 1) return {};
    c = mod(c, M);
    d = mod(d, M);
    if (c == 0) {
      // d is a unit; bottom row (M, d') would also do, but (0, 1) is the canonical class
      if (d == 1) return {};
      i64 cc = M, dd = d;
      i64 x, y;
      ext_gcd(dd, cc, x, y);
      return {x, -y, cc, dd};
    }
    i64 dd = d;
    while (gcd(c, dd) != 1) dd += M;
    i64 x, y;
    ext_gcd(dd, c, x, y);  // dd x + c y = 1
    return {x, -y, c, dd};
  }

 private:
  static P1Table build(i64 M) {
    P1Table t;
    t.M = M;
    for (i64 l = 0; l < M; ++l)
      if (gcd(l, M) == 1) t.units.push_back(l);
    if (M == 1) t.units = {0};
    t.index.assign(M * M, -1);
    std::map<std::pair<i64, i64>, int> pos;
    for (i64 c = 0; c < M; ++c)
      for (i64 d = 0; d < M; ++d) {
        if (gcd(gcd(c, d), M) != 1) continue;
        auto nf = normal_form(c, d, M, t.units);
        if (nf.first == c && nf.second == d) pos.emplace(nf, 0);
      }
    int k = 0;
    for (auto& [nf, j] : pos) {
      j = k++;
      t.forms.push_back(nf);
      t.reps.push_back(lift(nf.first, nf.second, M));
    }
    for (i64 c = 0; c < M; ++c)
      for (i64 d = 0; d < M; ++d) {
        if (gcd(gcd(c, d), M) != 1) continue;
        t.index[c * M + d] = pos.at(normal_form(c, d, M, t.units));
      }
    return t;
  }
};

inline std::vector<GL2Z> coset_reps(i64 M) { return P1Table::get(M)->reps; }

inline int coset_index(const GL2Z& g, i64 M) {
  auto t = P1Table::get(M);
  return t->index[mod(g.c, M) * M + mod(g.d, M)];
}

// Representatives of Gamma_0(N)\Gamma_0(M), M | N.
inline std::vector<GL2Z> cosets_between(i64 N, i64 M) {
  if (N % M != 0) throw domain_error("cosets_between: M must divide N");
  auto t = P1Table::get(N);
  std::vector<GL2Z> out;
  for (auto& [c, d] : t->forms) {
    if (c % M != 0) continue;
    if (c == 0) { out.push_back({}); continue; }
    i64 dd = d;
    while (gcd(c, dd) != 1) dd += N;
    i64 x, y;
    ext_gcd(dd, c, x, y);
    out.push_back({x, -y, c, dd});
  }
  return out;
}

// Number of gamma in Gamma_0(N)\Gamma_0(M) with gamma b equivalent to a at level N.
inline i64 coset_count(const Cusp& a, const Cusp& b, i64 N, i64 M) {
  if (N % M != 0) throw domain_error("coset_count: M must divide N");
  if (!(reduce(a.point(), M) == reduce(b.point(), M))) return 0;
  return relative_width(a, M);
}

// Cusp-adapted representatives gamma_a T^t (0 <= t < W_a) of Gamma_0(N)\SL_2(Z).
struct CuspCoset {
  Cusp cusp;
  i64 t;
  GL2Z g;
};

inline std::vector<CuspCoset> cusp_adapted_cosets(i64 N) {
  std::vector<CuspCoset> out;
  for (auto& a : cusp_set(N)) {
    GL2Z ga = cusp_gamma(a.u, a.f);
    for (i64 t = 0; t < a.width(); ++t) out.push_back({a, t, ga * GL2Z::translation(t)});
  }
  return out;
}

}  // namespace eisenlab

namespace eisenlab {

struct Reduced {
  cplx z;
  GL2Z delta;  // delta * z_in = z
};

// Standard reduction into D = {|x| <= 1/2, |z| >= 1}.
inline Reduced reduce_to_D(cplx z) {
  if (!(z.imag() > 0.0)) throw domain_error("reduce_to_D: point must lie in the upper half-plane");
  GL2Z d{};
  for (int it = 0; it < 10000; ++it) {
    double n = std::round(z.real());
    if (n != 0.0) {
      z -= n;
      d = GL2Z::translation(-static_cast<i64>(n)) * d;
    }
    if (std::norm(z) < 1.0 - 1e-15) {
      z = -1.0 / z;
      d = GL2Z{0, -1, 1, 0} * d;
    } else {
      break;
    }
  }
  return {z, d};
}

// gamma in Gamma_0(L) maximizing Im(gamma z), followed by a translation to |x| <= 1/2.
inline GL2Z gamma0_lift(cplx z, i64 L) {
  if (L == 1) return reduce_to_D(z).delta;
  const double x = z.real(), y = z.imag();
  double best = 1.0;  // |cz+d|^2 for the identity
  i64 bc = 0, bd = 1;
  for (i64 c = L; static_cast<double>(c) * y < 1.0; c += L) {
    double cy2 = static_cast<double>(c) * c * y * y;
    if (cy2 >= best) break;
    double center = -static_cast<double>(c) * x;
    i64 d0 = static_cast<i64>(std::floor(center));
    // scan outward from the nearest integers until the real part alone exceeds best
    for (i64 k = 0;; ++k) {
      bool any = false;
      for (i64 d : {d0 - k, d0 + 1 + k}) {
        double re = static_cast<double>(d) - center;
        double v = re * re + cy2;
        if (v >= best) continue;
        any = true;
        if (gcd(c, d) == 1) {
          best = v;
          bc = c;
          bd = d;
        }
      }
      if (!any) break;
    }
  }
  GL2Z g{1, 0, 0, 1};
  if (bc != 0) {
    i64 a, b;
    ext_gcd(bd, bc, a, b);  // bd a + bc b = 1 -> (a, -b; bc, bd)
    g = GL2Z{a, -b, bc, bd};
  }
  cplx w = g.apply(z);
  double n = std::round(w.real());
  return GL2Z::translation(-static_cast<i64>(n)) * g;
}

}  // namespace eisenlab
