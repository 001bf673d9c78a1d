#include <gtest/gtest.h>

#include <map>
#include <numeric>
#include <random>
#include <set>

#include "eisenlab/cusps.hpp"

using namespace eisenlab;

namespace {

// Orbit oracle: union-find over reduced fractions a/c (0 <= a < c <= D) plus infinity,
// merged under small elements of Gamma_0(N) applied to translates.
struct OrbitOracle {
  i64 N, D;
  std::map<std::pair<i64, i64>, int> id;
  std::vector<int> parent;

  int find(int x) { return parent[x] == x ? x : parent[x] = find(parent[x]); }
  void unite(int a, int b) { parent[find(a)] = find(b); }

  static std::pair<i64, i64> key(P1Q p) {
    p = p.normalized();
    if (p.den == 0) return {1, 0};
    return {mod(p.num, p.den), p.den};
  }

  OrbitOracle(i64 N_, i64 D_) : N(N_), D(D_) {
    id[{1, 0}] = 0;
    for (i64 c = 1; c <= D; ++c)
      for (i64 a = 0; a < c; ++a)
        if (std::gcd(a, c) == 1) id[{a, c}] = static_cast<int>(id.size());
    parent.resize(id.size());
    std::iota(parent.begin(), parent.end(), 0);
    i64 B = 2 * N + 4;
    std::vector<GL2Z> gens;
    for (i64 c = N; c <= B; c += N)
      for (i64 d = -B; d <= B; ++d) {
        if (std::gcd(c, d) != 1) continue;
        i64 x, y;
        ext_gcd(d, c, x, y);
        gens.push_back({x, -y, c, d});
      }
    for (auto& [k, i] : id) {
      for (auto& g : gens)
        for (i64 t = -3; t <= 3; ++t) {
          P1Q p = (k.second == 0) ? P1Q::infinity() : P1Q{k.first + t * k.second, k.second};
          P1Q im = apply(g, p);
          auto kk = key(im);
          auto it = id.find(kk);
          if (it != id.end()) unite(i, it->second);
        }
    }
  }

  int cls(P1Q p) { return find(id.at(key(p))); }
};

}  // namespace

TEST(Cusps, SetSizes) {
  EXPECT_EQ(cusp_set(1).size(), 1u);
  EXPECT_EQ(cusp_set(12).size(), 6u);
  auto c7 = cusp_set(7);
  ASSERT_EQ(c7.size(), 2u);
  EXPECT_EQ(c7[0], (Cusp{1, 1, 7}));
  EXPECT_EQ(c7[1], (Cusp{1, 7, 7}));
  for (i64 N = 1; N <= 200; ++N) {
    i64 expect = 0, wsum = 0;
    for (i64 f : divisors(N)) expect += euler_phi(gcd(f, N / f));
    auto cs = cusp_set(N);
    EXPECT_EQ(static_cast<i64>(cs.size()), expect);
    for (auto& c : cs) {
      EXPECT_EQ(N % c.f, 0);
      EXPECT_EQ(gcd(c.u, c.f), 1);
      wsum += c.width();
    }
    EXPECT_EQ(wsum, nu_index(N)) << N;
  }
}

TEST(Cusps, MatchesOrbitOracle) {
  for (i64 N : {2, 4, 6, 7, 8, 9, 12, 16, 18, 20, 24, 25}) {
    OrbitOracle orb(N, 2 * N);
    auto cs = cusp_set(N);
    std::set<int> classes;
    for (auto& c : cs) classes.insert(orb.cls(c.point()));
    EXPECT_EQ(classes.size(), cs.size()) << N;
    for (i64 c = 1; c <= 2 * N; ++c)
      for (i64 a = 0; a < c; ++a) {
        if (std::gcd(a, c) != 1) continue;
        P1Q p{a, c};
        Cusp r = reduce(p, N);
        EXPECT_EQ(orb.cls(p), orb.cls(r.point())) << N << " " << a << "/" << c;
      }
    EXPECT_EQ(orb.cls(P1Q::infinity()), orb.cls(P1Q{1, N}));
  }
}

TEST(Cusps, Equivalence) {
  for (i64 N = 1; N <= 30; ++N) {
    EXPECT_TRUE(equivalent(P1Q::infinity(), P1Q{1, N}, N));
    EXPECT_TRUE(equivalent(P1Q{0, 1}, P1Q{1, 1}, N));
    EXPECT_EQ(reduce(P1Q::infinity(), N), (Cusp{1, N, N}));
  }
  EXPECT_FALSE(equivalent(P1Q{1, 2}, P1Q{1, 3}, 12));
  // explicit gamma search agrees with reduction
  for (i64 N : {6, 9, 12}) {
    auto cs = cusp_set(N);
    for (i64 c = 1; c <= 12; ++c)
      for (i64 a = 0; a < c; ++a) {
        if (std::gcd(a, c) != 1) continue;
        auto r = reduce(P1Q{a, c}, N);
        auto g = find_gamma(P1Q{a, c}, r.point(), N, N * N);
        ASSERT_TRUE(g.has_value());
        EXPECT_TRUE(in_gamma0(*g, N));
        EXPECT_EQ(apply(*g, P1Q{a, c}), r.point());
      }
  }
}

TEST(Cusps, Widths) {
  EXPECT_EQ((Cusp{1, 12, 12}).width(), 1);
  EXPECT_EQ((Cusp{1, 1, 12}).width(), 12);
  EXPECT_EQ((Cusp{1, 2, 12}).width(), 3);
  // oracle: least t > 0 with gamma T^t gamma^-1 in Gamma_0(N)
  for (i64 N = 1; N <= 60; ++N)
    for (auto& c : cusp_set(N)) {
      auto s = scaling_matrix(c);
      EXPECT_EQ(s.gamma.det(), 1);
      EXPECT_EQ(apply(s.gamma, P1Q::infinity()), c.point());
      i64 t = 1;
      while (!in_gamma0(s.gamma * GL2Z::translation(t) * s.gamma.inverse(), N)) ++t;
      EXPECT_EQ(t, c.width());
      EXPECT_EQ(s.W, c.width());
    }
  auto s = scaling_matrix(Cusp{1, 7, 7});
  EXPECT_EQ(s.gamma, (GL2Z{1, 0, 7, 1}));
  EXPECT_EQ(s.W, 1);
  auto z = scaling_matrix(Cusp{1, 1, 7});
  EXPECT_EQ(z.W, 7);
  EXPECT_EQ(z.gamma, (GL2Z{1, 0, 1, 1}));
}

TEST(Cusps, RelativeWidth) {
  Cusp a{1, 2, 12};
  EXPECT_EQ(relative_width(a, 12), 1);
  EXPECT_EQ(relative_width(a, 1), a.width());
  EXPECT_EQ(relative_width(a, 4), 3);
  EXPECT_THROW(relative_width(a, 5), domain_error);
  for (i64 N = 1; N <= 60; ++N)
    for (i64 M : divisors(N))
      for (auto& c : cusp_set(N)) {
        Cusp cm = reduce_to_level(c, M);
        EXPECT_EQ(relative_width(c, M) * cm.width(), c.width());
      }
}

TEST(Cusps, CosetCountMatchesEnumeration) {
  for (i64 N = 1; N <= 36; ++N)
    for (i64 M : divisors(N)) {
      auto reps = cosets_between(N, M);
      ASSERT_EQ(static_cast<i64>(reps.size()), nu_index(N) / nu_index(M));
      for (auto& g : reps) EXPECT_TRUE(in_gamma0(g, M));
      auto cs = cusp_set(N);
      for (auto& a : cs)
        for (auto& b : cs) {
          i64 cnt = 0;
          for (auto& g : reps)
            if (reduce(apply(g, b.point()), N) == a) ++cnt;
          EXPECT_EQ(cnt, coset_count(a, b, N, M)) << N << " " << M;
        }
    }
}

TEST(Cusps, Singularity) {
  // oracle: chi is trivial on the stabilizer generator gamma T^W gamma^-1
  for (i64 N = 1; N <= 60; ++N)
    for (auto& chi : even_characters(N))
      for (auto& c : cusp_set(N)) {
        auto s = scaling_matrix(c);
        GL2Z st = s.gamma * GL2Z::translation(s.W) * s.gamma.inverse();
        bool expect = std::abs(chi(st.d) - 1.0) < 1e-12;
        EXPECT_EQ(is_singular(c, chi), expect) << N << " " << c.u << "/" << c.f;
        if (chi.is_primitive() && N > 1)
          EXPECT_EQ(is_singular(c, chi), c.u == 1 && c.gcd_f() == 1);
      }
  for (auto& chi : all_characters(5))
    if (!chi.is_even()) EXPECT_THROW(is_singular(Cusp{1, 1, 5}, chi), domain_error);
  // N = p^2, primitive chi, f = p
  for (auto& chi : primitive_characters(9))
    if (chi.is_even()) EXPECT_FALSE(is_singular(Cusp{1, 3, 9}, chi));
}

TEST(Cusps, AtkinLehner) {
  EXPECT_EQ(atkin_lehner_complement(Cusp{1, 1, 7}), (Cusp{1, 7, 7}));
  EXPECT_EQ(atkin_lehner_complement(Cusp{1, 7, 7}), (Cusp{1, 1, 7}));
  EXPECT_EQ(atkin_lehner_complement(Cusp{1, 3, 15}), (Cusp{1, 5, 15}));
  EXPECT_THROW(atkin_lehner_complement(Cusp{1, 2, 4}), domain_error);
}

TEST(Cosets, RepsAndIndex) {
  EXPECT_EQ(coset_reps(1).size(), 1u);
  EXPECT_EQ(coset_reps(2).size(), 3u);
  for (i64 M = 1; M <= 30; ++M) {
    auto reps = coset_reps(M);
    ASSERT_EQ(static_cast<i64>(reps.size()), nu_index(M));
    for (std::size_t i = 0; i < reps.size(); ++i) {
      EXPECT_EQ(reps[i].det(), 1);
      EXPECT_EQ(coset_index(reps[i], M), static_cast<int>(i));
      for (std::size_t j = 0; j < i; ++j) EXPECT_FALSE(in_gamma0(reps[i] * reps[j].inverse(), M));
    }
    EXPECT_EQ(reps[coset_index(GL2Z{}, M)], GL2Z{});
  }
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<i64> dist(-40, 40);
  const i64 M = 6;
  auto reps = coset_reps(M);
  for (int it = 0; it < 300; ++it) {
    i64 c = dist(rng), d = dist(rng);
    if (std::gcd(c, d) != 1) continue;
    i64 x, y;
    ext_gcd(d, c, x, y);
    GL2Z g{x, -y, c, d};
    int lin = -1;
    for (std::size_t j = 0; j < reps.size(); ++j)
      if (in_gamma0(g * reps[j].inverse(), M)) lin = static_cast<int>(j);
    EXPECT_EQ(coset_index(g, M), lin);
    GL2Z h{1, dist(rng), 0, 1};
    GL2Z g0 = GL2Z{1, 0, M, 1} * h;
    EXPECT_EQ(coset_index(g0 * g, M), lin);
  }
}

TEST(Cosets, CuspAdaptedRepsArePartition) {
  for (i64 N = 1; N <= 40; ++N) {
    auto cc = cusp_adapted_cosets(N);
    ASSERT_EQ(static_cast<i64>(cc.size()), nu_index(N));
    std::set<int> idx;
    for (auto& x : cc) idx.insert(coset_index(x.g, N));
    EXPECT_EQ(static_cast<i64>(idx.size()), nu_index(N)) << N;
  }
}

TEST(Reduction, FundamentalDomain) {
  for (cplx z : {cplx(0, 1), cplx(5, 1), cplx(0.3, 0.001), cplx(-7.2, 0.013)}) {
    auto r = reduce_to_D(z);
    EXPECT_LE(std::abs(r.z.real()), 0.5 + 1e-12);
    EXPECT_GE(std::norm(r.z), 1.0 - 1e-12);
    EXPECT_EQ(r.delta.det(), 1);
    EXPECT_NEAR(std::abs(r.delta.apply(z) - r.z), 0.0, 1e-12);
  }
  EXPECT_NEAR(std::abs(reduce_to_D({5, 1}).z - cplx(0, 1)), 0.0, 1e-15);
  EXPECT_THROW(reduce_to_D({0.2, -1.0}), domain_error);
}

TEST(Reduction, Gamma0Lift) {
  for (i64 L : {2, 5, 12, 30})
    for (cplx z : {cplx(0.1234, 0.004), cplx(-0.37, 0.02), cplx(0.2, 3.0)}) {
      GL2Z g = gamma0_lift(z, L);
      EXPECT_TRUE(in_gamma0(g, L));
      cplx w = g.apply(z);
      EXPECT_LE(std::abs(w.real()), 0.5 + 1e-12);
      // no element of Gamma_0(L) with small entries does better
      for (i64 c = L; c <= 20 * L; c += L)
        for (i64 d = -400; d <= 400; ++d) {
          if (gcd(c, d) != 1) continue;
          EXPECT_LE(z.imag() / std::norm(static_cast<double>(c) * z + static_cast<double>(d)), w.imag() * (1 + 1e-12));
        }
    }
}
