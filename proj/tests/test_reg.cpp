#include <gtest/gtest.h>

#include <random>

#include "eisenlab/reg.hpp"

using namespace eisenlab;

namespace {

DirichletCharacter even_primitive(i64 q, int skip = 0) {
  for (auto& c : primitive_characters(q))
    if (c.is_even() && skip-- == 0) return c;
  throw std::runtime_error("no even primitive character");
}

DirichletCharacter induced(const DirichletCharacter& psi, i64 N) {
  return psi.product(DirichletCharacter::trivial(N));
}

}  // namespace

TEST(Laurent, ResidueIsInverseVolume) {
  for (i64 N = 1; N <= 20; ++N)
    for (auto& a : cusp_set(N)) EXPECT_NEAR(3.0 / kPi * laurent_F(a, 1.0).real(), 1.0 / volume(N), 1e-10) << N;
}

TEST(Laurent, ConstantIsLogDerivativeOfF) {
  const double h = 1e-5;
  for (i64 N : {1, 4, 6, 8, 9, 12, 18})
    for (auto& a : cusp_set(N)) {
      double d = (std::log(laurent_F(a, 1.0 + h).real()) - std::log(laurent_F(a, 1.0 - h).real())) / (2 * h);
      EXPECT_NEAR(laurent_c0(a), d / volume(N), 1e-8) << N << " " << a.u << "/" << a.f;
    }
}

TEST(Laurent, MatchesSymmetricLimitOfSeries) {
  // (E(1+h) + E(1-h))/2, Richardson in h, minus the G part; cusps without eta terms
  auto triv = [](i64 N) { return DirichletCharacter::trivial(N); };
  const cplx z{0.17, 0.83};
  for (i64 N : {4, 6, 12})
    for (auto& a : cusp_set(N)) {
      if (gcd(a.f, N / a.f) > 2) continue;
      auto S = [&](double h) {
        return 0.5 * (CuspEisenstein(a, triv(N), 1.0 + h)(z) + CuspEisenstein(a, triv(N), 1.0 - h)(z)).real();
      };
      double lim = (4.0 * S(5e-3) - S(1e-2)) / 3.0;
      for (auto& [g, c] : laurent_cg(a)) lim -= c * eval_level1_G(static_cast<double>(g) * z);
      EXPECT_NEAR(lim, laurent_c0(a), 1e-6) << N << " " << a.u << "/" << a.f;
    }
}

TEST(Renormalized, LevelOneEisensteinVanishes) {
  Cusp inf{1, 1, 1};
  Level1Eisenstein E(2.0);
  auto r = renormalized_integral([&](cplx z) { return E(z); }, 1, eisenstein_profile(inf, 2.0));
  EXPECT_NEAR(std::abs(r.value), 0.0, 2e-3);
  EXPECT_LT(r.R_independence_residual, 1e-6);
}

TEST(Renormalized, ConstantIsVolume) {
  for (i64 N : {1, 4, 6}) {
    std::vector<CuspProfile> prof;
    for (auto& c : cusp_set(N)) prof.push_back({c, {{1.0, 0.0}}});
    auto r = renormalized_integral([](cplx) { return cplx(1.0); }, N, prof);
    EXPECT_NEAR(r.value.real(), volume(N), 1e-8);
  }
}

TEST(Renormalized, EisensteinProductsVanish) {
  const i64 N = 4;
  auto triv = DirichletCharacter::trivial(N);
  auto cs = cusp_set(N);
  for (std::size_t i = 0; i < cs.size(); i += 2)
    for (std::size_t k = 0; k < cs.size(); ++k) {
      CuspEisenstein Ea(cs[i], triv, 2.0), Eb(cs[k], triv, 2.5);
      auto f = [&](cplx z) { return Ea(z) * std::conj(Eb(z)); };
      auto r = renormalized_integral(f, N, eisenstein_product_profile(cs[i], 2.0, cs[k], 2.5));
      EXPECT_NEAR(std::abs(r.value), 0.0, 5e-3) << i << " " << k;
      EXPECT_LT(r.R_independence_residual, 2.0 * std::max(r.quad_error, 1e-6));
    }
}

TEST(Renormalized, ExponentOneRejected) {
  std::vector<CuspProfile> prof{{Cusp{1, 1, 1}, {{1.0, 1.0}}}};
  EXPECT_THROW(renormalized_integral([](cplx z) { return cplx(z.imag()); }, 1, prof), domain_error);
  EXPECT_THROW(renormalized_integral([](cplx) { return cplx(1.0); }, 1, {}, 1.0), domain_error);
}

TEST(Kernel, RejectsZeroT) {
  EXPECT_THROW(build_kernel(5, DirichletCharacter::trivial(5), 0.0), domain_error);
  auto chi = even_primitive(5);
  EXPECT_THROW(build_kernel_al(Cusp{1, 1, 5}, chi, 0.0), domain_error);
  EXPECT_THROW(build_kernel_al(Cusp{1, 1, 10}, induced(chi, 10), 1.0), domain_error);
}

TEST(Kernel, AtkinLehnerHasTwoTerms) {
  auto chi = even_primitive(5);
  auto K = build_kernel_al(Cusp{1, 1, 5}, chi, 1.0);
  ASSERT_EQ(K.terms.size(), 2u);
  EXPECT_EQ(K.terms[0].eps, 1);
  EXPECT_EQ(K.terms[1].eps, -1);
  EXPECT_EQ(K.terms[1].cusp, atkin_lehner_complement(Cusp{1, 1, 5}));
  EXPECT_NEAR(std::abs(K.terms[1].w0), 1.0, 1e-10);  // |phi_{a a*}| = 1 on the line
}

TEST(Kernel, AtkinLehnerLogDerivative) {
  const double h = 1e-5;
  for (i64 N : {5, 13, 15}) {
    auto chi = even_primitive(N);
    for (auto& a : cusp_set(N)) {
      if (!is_atkin_lehner(a)) continue;
      Cusp as = atkin_lehner_complement(a);
      for (double T : {0.5, 1.0}) {
        auto lp = [&](double d) { return std::log(phi_atkin_lehner(a, as, cplx(0.5 + d, -T), chi.conj())); };
        cplx fd = (lp(h) - lp(-h)) / (2.0 * h);
        EXPECT_NEAR(std::abs(phi_al_log_derivative(a, T, chi) - fd), 0.0, 1e-6) << N;
      }
    }
  }
}

TEST(Kernel, WeightsExpandToFirstOrder) {
  auto K = build_kernel(10, induced(even_primitive(5), 10), 1.0);
  const double b = 1e-5;
  for (auto& t : K.terms) {
    EXPECT_NEAR(std::abs(t.weight(0.0) - t.w0), 0.0, 1e-12);
    EXPECT_NEAR(std::abs((t.weight(b) - t.weight(-b)) / (2 * b) - t.w1), 0.0, 1e-6);
  }
}

TEST(Traced, C1EqualsCM) {
  auto chi = even_primitive(15);
  auto tf = traced_kernel(build_kernel(15, chi, 1.0), 3);
  EXPECT_NEAR(tf.cg.at(1), 0.25, 1e-12);
  EXPECT_NEAR(tf.cg.at(3), 0.25, 1e-12);
  EXPECT_TRUE(tf.cg_prime.empty());
  auto t11 = traced_kernel(build_kernel(11, even_primitive(11), 1.0), 11);
  EXPECT_NEAR(t11.cg.at(11), 1.0 / 12.0, 1e-12);
}

TEST(Traced, TrivialCharacterCarriesEisensteinTerm) {
  auto K = build_kernel(7, DirichletCharacter::trivial(7), 1.0);
  auto tf = traced_kernel(K, 1);
  ASSERT_EQ(tf.cg_prime.size(), 1u);
  // M = 1: c_1' = conj(phi_{infinity infinity})
  EXPECT_NEAR(std::abs(tf.cg_prime.at(1) - std::conj(K.phi_inf_inf)), 0.0, 1e-12);
}

TEST(Traced, PoleAndEtaCancellation) {
  for (i64 N : {4, 8, 9, 12, 16, 18, 20}) {
    for (auto& chi : even_characters(N)) {
      auto K = build_kernel(N, chi, 1.0);
      for (i64 M : divisors(N)) {
        auto tf = traced_kernel(K, M);
        EXPECT_LT(tf.pole_residual, 1e-10) << N << " " << M;
        EXPECT_LT(tf.eta_residual, 1e-10) << N << " " << M;
        EXPECT_LT(std::abs(tf.c0.imag()), 1e-10);
      }
    }
  }
}

TEST(Traced, ClosedFormMatchesBetaLimit) {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> ux(-0.5, 0.5), uy(0.4, 1.6);
  std::vector<RegKernel> ks{build_kernel(6, DirichletCharacter::trivial(6), 1.0),
                            build_kernel(10, induced(even_primitive(5), 10), 1.0),
                            build_kernel_al(Cusp{1, 1, 5}, even_primitive(5), 1.0)};
  for (auto& K : ks) {
    KernelBetaOracle ora(K);
    TracedEvaluator ev(traced_kernel(K, K.N));
    for (int t = 0; t < 20; ++t) {
      cplx z{ux(rng), uy(rng)};
      cplx a = ora(z);
      EXPECT_NEAR(a.real(), ev(z), 1e-5) << K.N;
      EXPECT_NEAR(a.imag(), 0.0, 1e-6);
    }
  }
}

TEST(Traced, PaperFormDiscrepancyIsBounded) {
  for (i64 N : {7, 11, 12}) {
    auto tf = traced_kernel(build_kernel(N, DirichletCharacter::trivial(N), 1.0), 1);
    EXPECT_TRUE(std::isfinite(tf.discrepancy()));
    EXPECT_LT(std::abs(tf.discrepancy()) * volume(1), 10.0);
  }
}

TEST(Traced, CoefficientShape) {
  std::vector<double> ratios;
  for (i64 M : {2, 3, 5, 6, 10, 12, 30}) {
    auto tf = traced_kernel(build_kernel(M, DirichletCharacter::trivial(M), 1.0), M);
    ratios.push_back(tf.log23_ratio());
    EXPECT_TRUE(std::isfinite(ratios.back()));
  }
  for (double r : ratios) EXPECT_LT(r, 10.0 * ratios.front());
}

TEST(WeightedAverage, TwoPaths) {
  // N = 20, q = 5: there is no even character of conductor 3
  auto w = weighted_average(20, induced(even_primitive(5), 20), 1.0);
  EXPECT_NEAR(std::abs(w.exact - w.proof_form), 0.0, 1e-8);
  auto w12 = weighted_average(12, DirichletCharacter::trivial(12), 1.0);
  EXPECT_NEAR(std::abs(w12.exact - w12.proof_form), 0.0, 1e-8);
}

TEST(WeightedAverage, TrivialIsReal) {
  auto w = weighted_average(2, DirichletCharacter::trivial(2), 1.0);
  EXPECT_NEAR(w.exact.imag(), 0.0, 1e-10);
}

TEST(WeightedAverage, PrimitiveSingleCusp) {
  auto chi = even_primitive(13);
  auto w = weighted_average(13, chi, 1.0);
  // only f = 1 survives: 4 Re Lambda'/Lambda(1+2iT, conj chi)
  double ref = 4.0 * completed_log_derivative(cplx(1.0, 2.0), chi.conj()).real();
  EXPECT_NEAR(w.exact.real(), ref, 1e-9);
}

TEST(Alpha, LevelOneSingleDivisor) {
  auto K = build_kernel(5, DirichletCharacter::trivial(5), 1.0);
  auto tf = traced_kernel(K, 1);
  auto a = alpha_phi(tf, TestFunction::phi0());
  ASSERT_EQ(a.summands.size(), 2u);
  EXPECT_FALSE(a.summands[0].eisenstein);
  EXPECT_TRUE(a.summands[1].eisenstein);
  EXPECT_NEAR(a.value, a.summands[0].contribution + a.summands[1].contribution, 1e-14);
}

TEST(Alpha, MainTermRoutesAgree) {
  auto K = build_kernel(5, DirichletCharacter::trivial(5), 1.0);
  auto phi0 = TestFunction::phi0();
  auto a = alpha_phi(traced_kernel(K, 1), phi0);
  auto d = kernel_pairing_direct(K, phi0);
  EXPECT_NEAR(a.main + a.value, d.value.real(), 1e-3 * std::abs(d.value.real()));
}

TEST(Consistency, RoutesAgreeAtTwo) {
  auto chi = even_primitive(8);
  auto tf = traced_kernel(build_kernel(8, chi, 1.0), 2);
  auto cs = consistency_sum(tf, Bump{}, 8);
  EXPECT_NEAR(cs.route_a, cs.route_b, 1e-3 * std::max(1.0, std::abs(cs.route_b)));
}

TEST(Consistency, ElevenCoefficients) {
  auto tf = traced_kernel(build_kernel(11, even_primitive(11), 1.0), 11);
  // coefficients only, no quadrature needed beyond phi0
  double g = 0.0, l = 0.0;
  for (auto& [d, c] : tf.cg) {
    double dd = static_cast<double>(d), idx = static_cast<double>(nu_index(11)) / nu_index(d);
    double lam = 0.0, S = 0.0;
    for (i64 b : divisors(d)) lam += 1.0 / b;
    for (i64 a : divisors(d)) S += std::log(dd / (static_cast<double>(a) * a)) / a;
    g += c * idx * dd * lam;
    l += c * idx * dd * S;
  }
  EXPECT_NEAR(g, 2.0, 1e-12);
  EXPECT_NEAR(l / std::log(11.0), 10.0 / 12.0, 1e-12);
}

TEST(Boundedness, TrivialPrime) {
  auto K = build_kernel(5, DirichletCharacter::trivial(5), 1.0);
  auto probes = kernel_boundedness(K, {10.0, 20.0, 40.0});
  ASSERT_EQ(probes.size(), 2u);
  for (auto& p : probes) {
    EXPECT_TRUE(p.bounded()) << p.cusp.f << " " << p.residual[0] << " " << p.residual[2];
    EXPECT_GT(p.raw[2], 3.0 * p.raw[0]);  // |E|^2 alone grows like y
  }
}
