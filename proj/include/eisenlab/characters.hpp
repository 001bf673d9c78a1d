#pragma once

#include <cmath>
#include <complex>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <optional>
#include <vector>

#include "arith.hpp"

namespace eisenlab {

using cplx = std::complex<double>;

// e(k/L) with exact values at the quarter points.
inline cplx unit_root(i64 k, i64 L) {
  k = mod(k, L);
  if (k == 0) return {1.0, 0.0};
  if (2 * k == L) return {-1.0, 0.0};
  if (4 * k == L) return {0.0, 1.0};
  if (4 * k == 3 * L) return {0.0, -1.0};
  double t = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(L);
  return {std::cos(t), std::sin(t)};
}

// Generators of (Z/N)^x, one cyclic factor per entry, with discrete-log data.
struct CharGroup {
  struct Gen {
    i64 pe;     // prime-power component modulus
    i64 g;      // generator mod pe (for 2^e, e>=3: -1 then 5)
    i64 order;
    i64 lift;   // element mod N: g on this component, 1 elsewhere
  };
  i64 N = 1;
  i64 exponent = 1;  // lcm of orders
  std::vector<Gen> gens;
  // logs[n*ngens + i] = discrete log of n on generator i, or -1 for non-units
  std::vector<int> logs;

  int ngens() const { return static_cast<int>(gens.size()); }

  static std::shared_ptr<const CharGroup> get(i64 N) {
    static std::mutex mu;
    static std::map<i64, std::shared_ptr<const CharGroup>> cache;
    std::lock_guard<std::mutex> lk(mu);
    auto it = cache.find(N);
    if (it != cache.end()) return it->second;
    auto g = std::make_shared<const CharGroup>(build(N));
    cache.emplace(N, g);
    return g;
  }

 private:
  static i64 primitive_root_mod_p(i64 p) {
    if (p == 2) return 1;
    auto ps = prime_divisors(p - 1);
    for (i64 g = 2;; ++g) {
      bool ok = true;
      for (i64 r : ps)
        if (powmod(g, (p - 1) / r, p) == 1) { ok = false; break; }
      if (ok) return g;
    }
  }

  static i64 crt_lift(i64 v, i64 pe, i64 N) {
    // x = v mod pe, x = 1 mod N/pe
    i64 other = N / pe;
    if (other == 1) return mod(v, N);
    i64 t = mulmod(mod(v - 1, pe), inv_mod(other, pe), pe);
    return mod(1 + other * t, N);
  }

  static CharGroup build(i64 N) {
    CharGroup G;
    G.N = N;
    std::vector<std::vector<std::vector<int>>> comp_logs;  // per gen: table over residues mod pe
    for (auto& [p, e] : factorize(N).factors) {
      i64 pe = 1;
      for (int k = 0; k < e; ++k) pe *= p;
      if (p == 2) {
        if (e >= 2) G.gens.push_back({pe, pe - 1, 2, 0});
        if (e >= 3) G.gens.push_back({pe, 5, pe / 4, 0});
      } else {
        i64 g = primitive_root_mod_p(p);
        if (e >= 2 && powmod(g, p - 1, p * p) == 1) g += p;
        G.gens.push_back({pe, g, pe / p * (p - 1), 0});
      }
    }
    for (auto& gen : G.gens) {
      gen.lift = crt_lift(gen.g, gen.pe, N);
      G.exponent = lcm(G.exponent, gen.order);
    }
    const int ng = G.ngens();
    G.logs.assign(static_cast<std::size_t>(N) * std::max(ng, 1), -1);
    // enumerate the group as products of generator powers
    std::vector<i64> idx(ng, 0);
    for (;;) {
      i64 x = 1 % N;
      for (int i = 0; i < ng; ++i) x = mulmod(x, powmod(G.gens[i].lift, idx[i], N), N);
      for (int i = 0; i < ng; ++i) G.logs[x * ng + i] = static_cast<int>(idx[i]);
      if (ng == 0) {
        G.logs[0] = 0;
        break;
      }
      int i = 0;
      while (i < ng && ++idx[i] == G.gens[i].order) idx[i++] = 0;
      if (i == ng) break;
    }
    return G;
  }
};

class DirichletCharacter {
 public:
  DirichletCharacter() : DirichletCharacter(1, {}) {}

  // exps[i] in Z/order_i on the generators of CharGroup::get(N)
  DirichletCharacter(i64 N, std::vector<i64> exps) : group_(CharGroup::get(N)), exps_(std::move(exps)) {
    if (N < 1) throw domain_error("character modulus must be positive");
    exps_.resize(group_->ngens(), 0);
    for (int i = 0; i < group_->ngens(); ++i) exps_[i] = mod(exps_[i], group_->gens[i].order);
    build_table();
  }

  static DirichletCharacter trivial(i64 N) { return DirichletCharacter(N, {}); }

  i64 modulus() const { return group_->N; }
  i64 root_order() const { return group_->exponent; }
  const std::vector<i64>& exponents() const { return exps_; }
  i64 conductor() const { return conductor_; }
  bool is_primitive() const { return conductor_ == modulus(); }
  bool is_principal() const { return conductor_ == 1; }
  bool is_even() const { return parity_ == 0; }
  int parity() const { return parity_; }

  // value e(k/root_order) as k, or nullopt when gcd(a,N) > 1
  std::optional<i64> exponent_at(i64 a) const {
    int k = table_[mod(a, modulus())];
    if (k < 0) return std::nullopt;
    return k;
  }

  cplx operator()(i64 a) const {
    int k = table_[mod(a, modulus())];
    if (k < 0) return {0.0, 0.0};
    return unit_root(k, root_order());
  }

  i64 order() const {
    i64 o = 1;
    for (int i = 0; i < group_->ngens(); ++i) {
      i64 ord = group_->gens[i].order;
      o = lcm(o, ord / gcd(ord, exps_[i]));
    }
    return o;
  }

  DirichletCharacter conj() const {
    std::vector<i64> e(exps_.size());
    for (std::size_t i = 0; i < e.size(); ++i) e[i] = -exps_[i];
    return DirichletCharacter(modulus(), e);
  }

  // Character mod M (N | M, or M | N when this character factors through M).
  DirichletCharacter lift_to(i64 M) const {
    auto G = CharGroup::get(M);
    std::vector<i64> e(G->ngens());
    for (int i = 0; i < G->ngens(); ++i) {
      i64 x = G->gens[i].lift;
      if (M % modulus() != 0)
        while (gcd(x, modulus()) != 1) x += M;
      auto k = exponent_at(x);
      if (!k) throw domain_error("lift_to: character does not factor through modulus");
      // k/root_order must be a multiple of 1/order_i
      i64 num = *k * G->gens[i].order;
      if (num % root_order() != 0) throw domain_error("lift_to: character does not factor through modulus");
      e[i] = num / root_order();
    }
    DirichletCharacter c(M, e);
    return c;
  }

  DirichletCharacter product(const DirichletCharacter& o) const {
    i64 M = lcm(modulus(), o.modulus());
    DirichletCharacter a = lift_to(M), b = o.lift_to(M);
    std::vector<i64> e(a.exps_.size());
    for (std::size_t i = 0; i < e.size(); ++i) e[i] = a.exps_[i] + b.exps_[i];
    return DirichletCharacter(M, e);
  }

  DirichletCharacter primitive_inducer() const { return lift_to(conductor_); }

  // Same primitive inducer.
  bool equivalent(const DirichletCharacter& o) const {
    if (conductor_ != o.conductor_) return false;
    return primitive_inducer() == o.primitive_inducer();
  }

  cplx gauss_sum() const {
    if (!is_primitive()) throw domain_error("gauss_sum: character must be primitive");
    i64 q = modulus();
    if (q == 1) return {1.0, 0.0};
    cplx s = 0;
    for (i64 a = 1; a < q; ++a) s += (*this)(a) * unit_root(a, q);
    return s;
  }

  bool operator==(const DirichletCharacter& o) const {
    return modulus() == o.modulus() && exps_ == o.exps_;
  }
  bool operator!=(const DirichletCharacter& o) const { return !(*this == o); }

 private:
  void build_table() {
    const i64 N = modulus();
    const int ng = group_->ngens();
    const i64 L = group_->exponent;
    table_.assign(N, -1);
    for (i64 n = 0; n < N; ++n) {
      if (gcd(n, N) != 1) continue;
      if (ng == 0) { table_[n] = 0; continue; }
      i64 k = 0;
      for (int i = 0; i < ng; ++i)
        k += exps_[i] * group_->logs[n * ng + i] * (L / group_->gens[i].order);
      table_[n] = static_cast<int>(mod(k, L));
    }
    if (N == 1) table_[0] = 0;
    auto km = exponent_at(-1);
    parity_ = (km && *km != 0) ? 1 : 0;
    conductor_ = N;
    for (i64 d : divisors(N)) {
      bool ok = true;
      for (i64 a = 1 % N; a < N && ok; a += d)
        if (table_[a] > 0) ok = false;
      if (d == N || ok) { conductor_ = d; break; }
    }
  }

  std::shared_ptr<const CharGroup> group_;
  std::vector<i64> exps_;
  std::vector<int> table_;
  i64 conductor_ = 1;
  int parity_ = 0;
};

inline std::vector<DirichletCharacter> all_characters(i64 N) {
  auto G = CharGroup::get(N);
  std::vector<DirichletCharacter> out;
  std::vector<i64> idx(G->ngens(), 0);
  for (;;) {
    out.emplace_back(N, idx);
    int i = 0;
    while (i < G->ngens() && ++idx[i] == G->gens[i].order) idx[i++] = 0;
    if (i == G->ngens()) break;
  }
  return out;
}

inline std::vector<DirichletCharacter> primitive_characters(i64 q) {
  static std::mutex mu;
  static std::map<i64, std::vector<DirichletCharacter>> cache;
  std::lock_guard<std::mutex> lk(mu);
  auto it = cache.find(q);
  if (it != cache.end()) return it->second;
  std::vector<DirichletCharacter> out;
  for (auto& c : all_characters(q))
    if (c.is_primitive()) out.push_back(c);
  cache.emplace(q, out);
  return out;
}

inline std::vector<DirichletCharacter> even_characters(i64 N) {
  std::vector<DirichletCharacter> out;
  for (auto& c : all_characters(N))
    if (c.is_even()) out.push_back(c);
  return out;
}

}  // namespace eisenlab
