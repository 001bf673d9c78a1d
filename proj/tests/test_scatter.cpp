#include <gtest/gtest.h>

#include "eisenlab/scatter.hpp"

using namespace eisenlab;

namespace {

DirichletCharacter first_with_parity(i64 q, int parity) {
  for (auto& c : primitive_characters(q))
    if (c.parity() == parity) return c;
  throw std::runtime_error("no character");
}

DirichletCharacter primitive_even(i64 N) {
  for (auto& c : even_characters(N))
    if (c.conductor() == N) return c;
  throw std::runtime_error("no primitive even character");
}

Cusp infinity(i64 N) { return {1, N, N}; }

const DirichletCharacter one = DirichletCharacter::trivial(1);

// least-squares fit of (y^s, y^{1-s}) at two heights
ConstantTermPair extract(const CuspEisenstein& E, const Cusp& b, double x) {
  const cplx s = E.s();
  auto sb = scaling_matrix(b);
  double y1 = 20.0, y2 = 30.0;
  cplx v1 = E(sb.apply({x, y1})), v2 = E(sb.apply({x, y2}));
  cplx p1 = std::pow(y1, s), p2 = std::pow(y2, s), r1 = std::pow(y1, 1.0 - s), r2 = std::pow(y2, 1.0 - s);
  cplx det = p1 * r2 - p2 * r1;
  return {(v1 * r2 - v2 * r1) / det, (p1 * v2 - p2 * v1) / det};
}

}  // namespace

TEST(ConstantTerm, Basics) {
  auto cd = constant_term_coeffs(one, one, 1, GL2Z{}, 2.0);
  EXPECT_NEAR(std::abs(cd.C - 1.0), 0.0, 1e-15);
  auto c5 = first_with_parity(5, 0);
  // q2 = 5 does not divide f = 1
  EXPECT_EQ(constant_term_coeffs(one, c5, 1, GL2Z{0, -1, 1, 0}, 2.0).C, cplx(0.0));
  EXPECT_THROW(constant_term_coeffs(one, one, 1, GL2Z{1, 1, 1, 1}, 2.0), domain_error);
}

TEST(ConstantTerm, AsymptoticResidual) {
  auto c5 = first_with_parity(5, 0);
  cplx s{0.5, 1.0};
  GL2Z g{0, -1, 1, 0};
  CharEisenstein E(one, c5, s);
  auto cd = constant_term_coeffs(one, c5, 1, g, s);
  for (double x : {0.0, 0.3}) {
    double y = 40.0;
    cplx v = E(g.apply(cplx(x, y)));
    EXPECT_LE(std::abs(v - cd.C * std::pow(y, s) - cd.D * std::pow(y, 1.0 - s)), 1e-8);
  }
}

TEST(Scattering, LevelOneClassical) {
  // phi(s) = xi(2s-1)/xi(2s) with xi(s) = pi^{-s/2} Gamma(s/2) zeta(s)
  cplx s = 2.0;
  cplx phi = phi_infinity(infinity(1), s, DirichletCharacter::trivial(1));
  double xi3 = std::pow(kPi, -1.5) * std::tgamma(1.5) * 1.2020569031595942854;
  double xi4 = std::pow(kPi, -2.0) * 1.0 * (std::pow(kPi, 4) / 90.0);
  EXPECT_NEAR(phi.real(), xi3 / xi4, 1e-10);
  EXPECT_NEAR(std::abs(phi_general(infinity(1), infinity(1), s, DirichletCharacter::trivial(1)) - phi), 0.0, 1e-12);
}

TEST(Scattering, GeneralMatchesInfinityRow) {
  for (i64 N = 1; N <= 30; ++N)
    for (cplx s : {cplx(0.5, 1.0), cplx(1.7, -0.4)}) {
      auto chi = DirichletCharacter::trivial(N);
      auto row = phi_infinity_row(N, chi, s);
      for (std::size_t i = 0; i < row.cusps.size(); ++i)
        EXPECT_NEAR(std::abs(phi_general(infinity(N), row.cusps[i], s, chi) - row.entries[i]), 0.0, 1e-10)
            << N << " f=" << row.cusps[i].f;
    }
  for (i64 N : {12, 20, 25, 27})
    for (auto& chi : even_characters(N)) {
      auto row = phi_infinity_row(N, chi, {0.5, 2.0});
      for (std::size_t i = 0; i < row.cusps.size(); ++i)
        EXPECT_NEAR(std::abs(phi_general(infinity(N), row.cusps[i], {0.5, 2.0}, chi) - row.entries[i]), 0.0, 1e-10);
    }
}

TEST(Scattering, InfinityRowSpecialValues) {
  for (i64 N : {6, 12, 13})
    for (auto& chi : even_characters(N)) {
      auto row = phi_infinity_row(N, chi, {0.5, 0.7});
      for (std::size_t i = 0; i < row.cusps.size(); ++i)
        if (row.cusps[i].is_infinity() && !chi.is_principal()) EXPECT_EQ(row.entries[i], cplx(0.0));
    }
  auto row = phi_infinity_row(12, DirichletCharacter::trivial(12), 0.5);
  for (std::size_t i = 0; i < row.cusps.size(); ++i)
    EXPECT_NEAR(std::abs(row.entries[i] - (row.cusps[i].is_infinity() ? -1.0 : 0.0)), 0.0, 1e-12);
}

TEST(Scattering, Unitarity) {
  for (i64 N = 1; N <= 60; ++N)
    for (auto& chi : even_characters(N))
      for (double T : {0.5, 1.0, 2.0}) EXPECT_LE(phi_infinity_row(N, chi, {0.5, T}).unitarity_residual(), 1e-9) << N;
}

TEST(Scattering, AtkinLehnerClosedForm) {
  for (i64 N : {5, 7, 12, 15, 21})
    for (auto& chi : even_characters(N)) {
      if (!chi.is_primitive()) continue;
      cplx s{0.5, 1.0};
      for (auto& a : singular_cusps(N, chi))
        for (auto& b : singular_cusps(N, chi)) {
          cplx g = phi_general(a, b, s, chi), c = phi_atkin_lehner(a, b, s, chi);
          EXPECT_NEAR(std::abs(g - c), 0.0, 1e-10);
          if (!(b == atkin_lehner_complement(a))) EXPECT_LE(std::abs(g), 1e-8);
        }
    }
}

TEST(Scattering, AssembledConstantTerms) {
  for (i64 N = 1; N <= 20; ++N)
    for (auto& chi : even_characters(N)) {
      cplx s{0.5, 1.0};
      auto cs = singular_cusps(N, chi);
      for (auto& a : cs) {
        CuspEisenstein E(a, chi, s);
        for (auto& b : cs) {
          auto ct = cusp_constant_term(E, b);
          EXPECT_NEAR(std::abs(ct.C - (a == b ? 1.0 : 0.0)), 0.0, 1e-10);
          EXPECT_NEAR(std::abs(ct.D - phi_general(a, b, s, chi)), 0.0, 1e-10);
        }
      }
    }
}

TEST(Scattering, NumericExtraction) {
  for (i64 N : {1, 4, 6, 9, 10, 12})
    for (auto& chi : even_characters(N)) {
      cplx s{0.5, 1.0};
      auto cs = singular_cusps(N, chi);
      for (auto& a : cs) {
        CuspEisenstein E(a, chi, s);
        for (auto& b : cs) {
          auto ex = extract(E, b, 0.17);
          EXPECT_NEAR(std::abs(ex.C - (a == b ? 1.0 : 0.0)), 0.0, 1e-6);
          EXPECT_NEAR(std::abs(ex.D - phi_general(a, b, s, chi)), 0.0, 1e-6);
        }
      }
    }
}

TEST(Scattering, NonSingularCuspThrows) {
  auto chi = primitive_even(9);
  EXPECT_THROW(phi_general(Cusp{1, 3, 9}, infinity(9), 2.0, chi), domain_error);
}

TEST(LogDerivative, AnalyticVsFiniteDifference) {
  EXPECT_NEAR(std::abs(phi_log_derivative(infinity(6), 1.0, DirichletCharacter::trivial(6)) -
                       phi_log_derivative_fd(infinity(6), 1.0, DirichletCharacter::trivial(6))),
              0.0, 1e-6);
  for (i64 N : {6, 12, 30, 35})
    for (auto& chi : even_characters(N)) {
      i64 q = chi.conductor();
      for (auto& a : singular_cusps(N, chi)) {
        if ((N / q) % a.f != 0) {
          EXPECT_THROW(phi_log_derivative(a, 1.0, chi), domain_error);
          continue;
        }
        for (double T : {0.7, 1.0}) {
          cplx an = phi_log_derivative(a, T, chi);
          EXPECT_NEAR(std::abs(an - phi_log_derivative_fd(a, T, chi)), 0.0, 1e-6);
          EXPECT_NEAR(std::abs(an - phi_log_derivative_printed(a, T, chi)), 0.0, 1e-10);
        }
      }
    }
}

TEST(LogDerivative, PrimitiveLevel) {
  // N = q: the entry at the only allowed cusp f = 1 reduces to -3 log N - 4 Re L'/L + O(1)
  auto chi = primitive_even(13);
  Cusp a{1, 1, 13};
  cplx an = phi_log_derivative(a, 1.0, chi);
  EXPECT_NEAR(std::abs(an - phi_log_derivative_fd(a, 1.0, chi)), 0.0, 1e-6);
  EXPECT_NEAR(an.imag(), 0.0, 1e-10);
}

TEST(LogDerivative, Reflection) {
  for (i64 N : {6, 15}) {
    auto chi = DirichletCharacter::trivial(N);
    for (auto& a : singular_cusps(N, chi)) {
      cplx p = phi_log_derivative(a, 1.3, chi), m = phi_log_derivative(a, -1.3, chi);
      EXPECT_NEAR(std::abs(p - std::conj(m)), 0.0, 1e-10);
    }
  }
}

TEST(DecayProbe, NonSingularCusps) {
  std::vector<double> ys = {2, 4, 10, 15, 20, 30, 40, 50};
  for (i64 N : {9, 12, 25}) {
    auto chi = primitive_even(N);
    Cusp b{0, 0, 0};
    for (auto& c : cusp_set(N))
      if (!is_singular(c, chi)) {
        b = c;
        break;
      }
    ASSERT_NE(b.N, 0);
    for (auto& a : singular_cusps(N, chi)) {
      auto p = nonsingular_decay_probe(a, b, chi, {0.5, 1.0}, ys, 0.1);
      EXPECT_GT(p.kappa, 0.0);
      for (std::size_t i = 0; i < ys.size(); ++i) {
        if (ys[i] <= 4.0) EXPECT_NEAR(p.modulus[i], p.direct[i], 1e-9);
        if (i > 0 && ys[i] >= 10.0) EXPECT_LT(p.modulus[i], p.modulus[i - 1]);
      }
      EXPECT_LT(p.modulus.back(), 0.05);
      // y-doubling ratio at the tail
      EXPECT_LT(p.modulus[4] / p.modulus[2], 0.7);
    }
  }
}

TEST(DecayProbe, SingularControl) {
  auto chi = DirichletCharacter::trivial(6);
  Cusp a = infinity(6), b{1, 1, 6};
  cplx s{0.5, 1.0};
  auto p = nonsingular_decay_probe(a, b, chi, s, {10, 20, 40}, 0.1);
  cplx phi = phi_general(a, b, s, chi);
  for (std::size_t i = 0; i < p.y.size(); ++i) EXPECT_NEAR(p.modulus[i], std::abs(phi) * std::sqrt(p.y[i]), 1e-8);
}

TEST(HardSums, WeightedLogIdentity) {
  for (i64 N = 1; N <= 100; ++N)
    for (auto& chi : even_characters(N)) {
      auto h = hard_sums(N, chi, 1.0);
      EXPECT_LE(h.identity_residual(), 1e-9) << N;
    }
  auto h = hard_sums(30, DirichletCharacter::trivial(30), 1.0);
  EXPECT_NEAR(h.S1 + h.S3, std::log(30.0), 1e-9);
  auto hp = hard_sums(13, primitive_even(13), 1.0);
  EXPECT_NEAR(hp.S3, 0.0, 1e-15);
  EXPECT_NEAR(hp.S1, 0.0, 1e-15);
}

TEST(HardSums, DivisorLogSum) {
  double brute = 0.0;
  for (i64 g = 1; g <= 210; ++g)
    if (210 % g == 0) brute += std::log(double(g)) / g * std::pow(4.0, omega(g));
  EXPECT_NEAR(divisor_log_sum(210, 4), brute, 1e-12);
  EXPECT_EQ(divisors(210).size(), 16u);
}

TEST(HardSums, Csv) {
  std::vector<HardSumCsvRow> rows;
  hard_sums(12, DirichletCharacter::trivial(12), 1.0, &rows);
  EXPECT_EQ(rows.size(), 6u);
  auto csv = hard_sums_csv(rows);
  EXPECT_EQ(csv.substr(0, 4), "N,q,");
}
