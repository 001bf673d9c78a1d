#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "geom.hpp"
#include "scatter.hpp"

namespace eisenlab {

// ---- Laurent data of E_a(z, s) (trivial character) at s = 1 ----

// F_a(s) = W^{-s} f^{-s}/phi((f,N/f)) * zeta(2s)/L(2s, chi_0,N) * sum_{a|f, b|N/f} mu(a) mu(b) (ab)^{-s}
inline cplx laurent_F(const Cusp& a, cplx s) {
  const i64 N = a.N, f = a.f;
  cplx v = detail::rpow(static_cast<double>(a.width() * f), -s) / static_cast<double>(euler_phi(gcd(f, N / f)));
  for (i64 p : prime_divisors(N)) v /= 1.0 - detail::rpow(static_cast<double>(p), -2.0 * s);
  cplx sum = 0.0;
  for (i64 x : divisors(f))
    for (i64 y : divisors(N / f)) {
      int mu = mobius(x) * mobius(y);
      if (mu != 0) sum += static_cast<double>(mu) * detail::rpow(static_cast<double>(x * y), -s);
    }
  return v * sum;
}

// Constant c_{a,0}; the sum over p | (f, N/f) enters with a plus sign, as F'/F(1) requires.
inline double laurent_c0(const Cusp& a) {
  const i64 N = a.N, f = a.f, g = gcd(f, N / f);
  double v = std::log(static_cast<double>(g) / static_cast<double>(N));
  for (i64 p : prime_divisors(N)) v += std::log(static_cast<double>(p)) / (p + 1.0);
  for (i64 p : prime_divisors(g)) v += std::log(static_cast<double>(p)) / (p - 1.0);
  return v / volume(N);
}

// c_{a,g} for g | N, the coefficient of G(gz).
inline std::map<i64, double> laurent_cg(const Cusp& a) {
  const i64 N = a.N, f = a.f, r = gcd(f, N / f);
  double pre = static_cast<double>(r) / (static_cast<double>(N) * euler_phi(r));
  for (i64 p : prime_divisors(N)) pre /= 1.0 - 1.0 / static_cast<double>(p * p);
  std::map<i64, double> out;
  for (i64 x : divisors(f))
    for (i64 y : divisors(N / f)) {
      int mu = mobius(x) * mobius(y);
      if (mu == 0) continue;
      if ((y * f) % x != 0) throw domain_error("laurent_cg: non-integral dilation");
      out[y * f / x] += pre * mu / static_cast<double>(x * y);
    }
  return out;
}

// ---- renormalized integrals ----

// Growth profile sum_i coef_i y^{alpha_i} of F(sigma_c(x+iy)) at the cusp c.
struct CuspProfile {
  Cusp cusp;
  std::vector<std::pair<cplx, cplx>> terms;  // (coef, alpha)
};

struct RenormResult {
  cplx value = 0.0;
  double R_used = 0.0;
  double R_independence_residual = 0.0;
  double quad_error = 0.0;
};

namespace detail {

template <class F>
QuadResult truncated_integral(const F& f, i64 N, double R) {
  std::vector<std::pair<GL2Z, double>> pieces;  // coset, cutoff in z = W R
  for (auto& cc : cusp_adapted_cosets(N)) pieces.push_back({cc.g, static_cast<double>(cc.cusp.width()) * R});
  auto run = [&](const Rule1D& rx, const Rule1D& ru) {
    const int nx = static_cast<int>(rx.x.size());
    auto cols = parallel_map<cplx>(nx, [&](int i) {
      double x = 0.5 * rx.x[i];
      double ua = std::log(std::sqrt(1.0 - x * x));
      CompensatedSum<cplx> acc;
      for (auto& [g, ytop] : pieces) {
        double ub = std::log(ytop);
        int panels = std::max(2, static_cast<int>(std::ceil(2.0 * (ub - ua))));
        double hu = (ub - ua) / panels;
        for (int p = 0; p < panels; ++p)
          for (std::size_t k = 0; k < ru.x.size(); ++k) {
            double u = ua + hu * (p + 0.5 + 0.5 * ru.x[k]);
            double y = std::exp(u);
            acc.add(cplx(f(g.apply({x, y}))) * (ru.w[k] * 0.5 * hu / y));
          }
      }
      return acc.value() * (0.5 * rx.w[i]);
    });
    CompensatedSum<cplx> tot;
    for (auto& c : cols) tot.add(c);
    return tot.value();
  };
  cplx fine = run(gauss_rule<40>(), gauss_rule<20>());
  cplx coarse = run(gauss_rule<30>(), gauss_rule<15>());
  return {fine, std::abs(fine - coarse)};
}

inline cplx profile_antiderivative(const std::vector<CuspProfile>& prof, double R) {
  cplx v = 0.0;
  for (auto& p : prof)
    for (auto& [c, al] : p.terms) v += c * detail::rpow(R, al - 1.0) / (al - 1.0);
  return v;
}

}  // namespace detail

// R.N. int F dmu over Y_0(N). The pieces int_{F_a(R)} (F - psi_a) are exponentially small for
// R >= 2 and are dropped; the profile tails enter through their antiderivatives at R.
template <class F>
RenormResult renormalized_integral(const F& f, i64 N, const std::vector<CuspProfile>& profiles, double R = 3.0) {
  if (R < 2.0) throw domain_error("renormalized_integral: R must be at least 2");
  for (auto& p : profiles)
    for (auto& t : p.terms)
      if (std::abs(t.second - 1.0) < 1e-12) throw domain_error("renormalized_integral: exponent 1 in profile");
  auto at = [&](double r) {
    auto q = detail::truncated_integral(f, N, r);
    return std::pair<cplx, double>{q.value - detail::profile_antiderivative(profiles, r), q.error_estimate};
  };
  auto [v1, e1] = at(R);
  auto [v2, e2] = at(2.0 * R);
  RenormResult out;
  out.value = v1;
  out.R_used = R;
  out.R_independence_residual = std::abs(v1 - v2);
  out.quad_error = std::max(e1, e2);
  return out;
}

// Profile of E_a(z, s) at every cusp of level N (trivial character).
inline std::vector<CuspProfile> eisenstein_profile(const Cusp& a, cplx s) {
  auto chi = DirichletCharacter::trivial(a.N);
  std::vector<CuspProfile> out;
  for (auto& c : cusp_set(a.N)) {
    CuspProfile p{c, {}};
    if (c == a) p.terms.push_back({1.0, s});
    p.terms.push_back({phi_general(a, c, s, chi), 1.0 - s});
    out.push_back(p);
  }
  return out;
}

// Profile of E_a(z, s1) conj(E_b(z, s2)).
inline std::vector<CuspProfile> eisenstein_product_profile(const Cusp& a, cplx s1, const Cusp& b, cplx s2) {
  auto pa = eisenstein_profile(a, s1), pb = eisenstein_profile(b, s2);
  std::vector<CuspProfile> out;
  for (std::size_t i = 0; i < pa.size(); ++i) {
    CuspProfile p{pa[i].cusp, {}};
    for (auto& [c1, a1] : pa[i].terms)
      for (auto& [c2, a2] : pb[i].terms) p.terms.push_back({c1 * std::conj(c2), a1 + std::conj(a2)});
    out.push_back(p);
  }
  return out;
}

// ---- the regularizing kernel ----

struct KernelTerm {
  Cusp cusp;  // level N, trivial character
  int eps;    // s = 1 + eps * beta
  cplx w0, w1;  // weight(beta) = w0 + w1 beta + O(beta^2)
  std::function<cplx(double)> weight;
};

struct RegKernel {
  enum class Kind { Infinity, AtkinLehner };
  Kind kind = Kind::Infinity;
  i64 N = 1;
  DirichletCharacter chi = DirichletCharacter::trivial(1);
  double T = 0.0;
  Cusp source;                 // the cusp of E = E_source(z, 1/2 + iT, chi)
  std::vector<KernelTerm> terms;
  cplx phi_inf_inf = 0.0;      // coefficient in 2 Re(phi E_infinity(z, 1 - 2iT))

  CuspEisenstein series() const { return CuspEisenstein(source, chi, {0.5, T}); }
};

inline Cusp infinity_cusp(i64 N) { return {1, N, N}; }

// Kernel for E = E_infinity(z, 1/2 + iT, chi): the pole term plus one E_a(z, 1 - beta) per singular a.
inline RegKernel build_kernel(i64 N, const DirichletCharacter& chi, double T) {
  if (T == 0.0) throw domain_error("build_kernel: T must be nonzero");
  if (chi.modulus() != N) throw domain_error("build_kernel: modulus must equal level");
  if (!chi.is_even()) throw domain_error("build_kernel: character must be even");
  RegKernel K;
  K.kind = RegKernel::Kind::Infinity;
  K.N = N;
  K.chi = chi;
  K.T = T;
  K.source = infinity_cusp(N);
  K.terms.push_back({K.source, +1, 1.0, 0.0, [](double) { return cplx(1.0); }});
  const cplx s{0.5, T};
  auto chib = chi.conj();
  for (auto& a : singular_cusps(N, chi)) {
    cplx p = phi_infinity(a, s, chi);
    if (p == 0.0) continue;
    cplx w0 = p * phi_infinity(a, std::conj(s), chib);
    cplx w1 = w0 * phi_log_derivative(a, T, chi);
    K.terms.push_back({a, -1, w0, w1, [a, p, chib, T](double b) {
                         return p * phi_infinity(a, cplx(0.5 + b, -T), chib);
                       }});
  }
  K.phi_inf_inf = phi_infinity(K.source, s, chi);
  return K;
}

// d/ds log phi_{a a*}(s, conj chi) at s = 1/2 - iT.
inline cplx phi_al_log_derivative(const Cusp& a, double T, const DirichletCharacter& chi) {
  const i64 N = a.N, f = a.f;
  auto chib = chi.conj();
  for (auto& c1 : primitive_characters(N / f))
    for (auto& c2 : primitive_characters(f)) {
      if (!(c1.product(c2.conj()) == chib)) continue;
      auto prod = c1.product(c2).primitive_inducer();
      const cplx s{0.5, -T};
      // phi = const * N^{-s} Lambda(2-2s, conj prod)/Lambda(2s, prod)
      return -std::log(static_cast<double>(N)) - 2.0 * completed_log_derivative(2.0 - 2.0 * s, prod.conj()) -
             2.0 * completed_log_derivative(2.0 * s, prod);
    }
  throw domain_error("phi_al_log_derivative: no factorization of chi");
}

// Kernel for E = E_a(z, 1/2 + iT, chi), chi primitive, a Atkin-Lehner: terms at a and a*.
inline RegKernel build_kernel_al(const Cusp& a, const DirichletCharacter& chi, double T) {
  if (T == 0.0) throw domain_error("build_kernel_al: T must be nonzero");
  if (!chi.is_primitive() || chi.modulus() != a.N) throw domain_error("build_kernel_al: chi must be primitive mod N");
  if (!is_atkin_lehner(a)) throw domain_error("build_kernel_al: cusp must be Atkin-Lehner");
  RegKernel K;
  K.kind = RegKernel::Kind::AtkinLehner;
  K.N = a.N;
  K.chi = chi;
  K.T = T;
  K.source = a;
  Cusp as = atkin_lehner_complement(a);
  const cplx s{0.5, T};
  auto chib = chi.conj();
  cplx p = phi_atkin_lehner(a, as, s, chi);
  cplx w0 = p * phi_atkin_lehner(a, as, std::conj(s), chib);
  cplx w1 = w0 * phi_al_log_derivative(a, T, chi);
  K.terms.push_back({a, +1, 1.0, 0.0, [](double) { return cplx(1.0); }});
  K.terms.push_back({as, -1, w0, w1, [a, as, p, chib, T](double b) {
                       return p * phi_atkin_lehner(a, as, cplx(0.5 + b, -T), chib);
                     }});
  return K;
}

// Direct evaluation of the kernel through the beta-limit, Richardson on beta in {b1, b2}.
// Used as an independent check of the closed form.
class KernelBetaOracle {
 public:
  explicit KernelBetaOracle(const RegKernel& K, double b1 = 1e-3, double b2 = 1e-4) : K_(K), b1_(b1), b2_(b2) {
    auto triv = DirichletCharacter::trivial(K.N);
    for (auto& t : K.terms) {
      e1_.push_back(std::make_shared<CuspEisenstein>(t.cusp, triv, 1.0 + t.eps * b1));
      e2_.push_back(std::make_shared<CuspEisenstein>(t.cusp, triv, 1.0 + t.eps * b2));
      w1_.push_back(t.weight(b1));
      w2_.push_back(t.weight(b2));
    }
    if (K.phi_inf_inf != 0.0)
      einf_ = std::make_shared<CuspEisenstein>(infinity_cusp(K.N), triv, cplx(1.0, -2.0 * K.T));
  }

  cplx operator()(cplx z) const {
    cplx f1 = 0.0, f2 = 0.0;
    for (std::size_t i = 0; i < e1_.size(); ++i) {
      f1 += w1_[i] * (*e1_[i])(z);
      f2 += w2_[i] * (*e2_[i])(z);
    }
    cplx lim = (b1_ * f2 - b2_ * f1) / (b1_ - b2_);
    if (einf_) lim += 2.0 * (K_.phi_inf_inf * (*einf_)(z)).real();
    return lim;
  }

 private:
  RegKernel K_;
  double b1_, b2_;
  std::vector<std::shared_ptr<CuspEisenstein>> e1_, e2_;
  std::vector<cplx> w1_, w2_;
  std::shared_ptr<CuspEisenstein> einf_;
};

// ---- traced kernel ----

struct TracedForm {
  i64 N = 1, M = 1;
  double T = 0.0;
  RegKernel::Kind kind = RegKernel::Kind::Infinity;
  cplx c0 = 0.0;
  double c0_display = std::numeric_limits<double>::quiet_NaN();
  std::map<i64, double> cg;
  std::map<i64, cplx> cg_prime;  // coefficient of E(gz, 1 + 2iT); the term enters as 2 Re(.)
  double pole_residual = 0.0;
  double eta_residual = 0.0;

  double discrepancy() const { return c0.real() - c0_display; }

  double coefficient_mass() const {
    double t = 0.0;
    for (auto& [g, c] : cg) t += std::abs(c);
    for (auto& [g, c] : cg_prime) t += std::abs(c);
    return t;
  }
  // sum (|c_g| + |c_g'|) against M^{-1} (log log 100M)^3
  double log23_ratio() const {
    double ll = std::log(std::log(100.0 * static_cast<double>(M)));
    return coefficient_mass() * static_cast<double>(M) / (ll * ll * ll);
  }
};

inline std::map<i64, cplx> infinity_dilation_coeffs(i64 M, cplx s) {
  // E_infinity^{(M)}(z, s) = sum_g mu(M/g) M^{-2s} g^s zeta(2s)/L(2s, chi_0,M) E(gz, s)
  cplx zl = 1.0;
  for (i64 p : prime_divisors(M)) zl /= 1.0 - detail::rpow(static_cast<double>(p), -2.0 * s);
  std::map<i64, cplx> out;
  for (i64 g : divisors(M)) {
    int mu = mobius(M / g);
    if (mu == 0) continue;
    out[g] = static_cast<double>(mu) * detail::rpow(static_cast<double>(M), -2.0 * s) *
             detail::rpow(static_cast<double>(g), s) * zl;
  }
  return out;
}

inline TracedForm traced_kernel(const RegKernel& K, i64 M) {
  if (M < 1 || K.N % M != 0) throw domain_error("traced_kernel: M must divide N");
  TracedForm tf;
  tf.N = K.N;
  tf.M = M;
  tf.T = K.T;
  tf.kind = K.kind;
  const double VM = volume(M);
  cplx pole = 0.0;
  // (f', u') at level M -> accumulated weight
  std::map<std::pair<i64, i64>, cplx> classes;
  for (auto& t : K.terms) {
    Cusp am = reduce_to_level(t.cusp, M);
    double L = std::log(static_cast<double>(relative_width(t.cusp, M)));
    tf.c0 += t.w0 * laurent_c0(am) + (t.w1 / static_cast<double>(t.eps) - t.w0 * L) / VM;
    for (auto& [g, c] : laurent_cg(am)) tf.cg[g] += (t.w0 * c).real();
    pole += t.w0 / static_cast<double>(t.eps);
    classes[{am.f, am.u}] += t.w0;
  }
  tf.pole_residual = std::abs(pole);
  for (i64 fp : divisors(M)) {
    i64 r0 = gcd(fp, M / fp);
    for (i64 r : divisors(r0)) {
      if (r == 1) continue;
      for (auto& eta : primitive_characters(r)) {
        cplx acc = 0.0;
        for (auto& [key, w] : classes)
          if (key.first == fp) acc += w * std::conj(eta(-key.second));
        tf.eta_residual = std::max(tf.eta_residual, std::abs(acc));
      }
    }
  }
  if (K.phi_inf_inf != 0.0)
    for (auto& [g, d] : infinity_dilation_coeffs(M, cplx(1.0, 2.0 * K.T))) tf.cg_prime[g] = std::conj(K.phi_inf_inf) * d;
  if (K.kind == RegKernel::Kind::Infinity) {
    auto psi = K.chi.primitive_inducer();
    const i64 q = psi.modulus();
    double lg = std::log(static_cast<double>(K.N) * K.N / (static_cast<double>(M) * gcd(M, K.N / q)));
    tf.c0_display = (lg + 4.0 * log_derivative(cplx(1.0, 2.0 * K.T), psi.conj()).real()) / VM;
  }
  return tf;
}

// Pointwise value c0 + sum c_g G(gz) + 2 Re sum c_g' E(gz, 1 + 2iT).
class TracedEvaluator {
 public:
  explicit TracedEvaluator(const TracedForm& tf) : tf_(tf) {
    if (!tf.cg_prime.empty()) E_ = std::make_shared<Level1Eisenstein>(cplx(1.0, 2.0 * tf.T));
  }
  double operator()(cplx z) const {
    double v = tf_.c0.real();
    for (auto& [g, c] : tf_.cg) v += c * eval_level1_G(static_cast<double>(g) * z);
    for (auto& [g, c] : tf_.cg_prime) v += 2.0 * (c * (*E_)(static_cast<double>(g) * z)).real();
    return v;
  }

 private:
  TracedForm tf_;
  std::shared_ptr<Level1Eisenstein> E_;
};

// ---- weighted logarithmic average ----

struct WeightedAverage {
  cplx exact = 0.0;       // -sum |phi|^2 (phi'/phi(1/2 - iT, conj chi) + log W_a)
  cplx proof_form = 0.0;  // sum |phi|^2 (2 log f + 4 Re Lambda'/Lambda + 2 sum_{p|N} - 2 sum_{p|N/f})
  double display_main = 0.0;  // 2 log N + 4 Re L'/L(1 + 2iT, conj psi)
};

inline WeightedAverage weighted_average(i64 N, const DirichletCharacter& chi, double T) {
  if (T == 0.0) throw domain_error("weighted_average: T must be nonzero");
  auto row = phi_infinity_row(N, chi, {0.5, T});
  auto psi = chi.primitive_inducer();
  WeightedAverage w;
  cplx lam = 4.0 * completed_log_derivative(cplx(1.0, 2.0 * T), psi.conj()).real();
  for (std::size_t i = 0; i < row.cusps.size(); ++i) {
    double p2 = std::norm(row.entries[i]);
    if (p2 == 0.0) continue;
    auto& a = row.cusps[i];
    w.exact -= p2 * (phi_log_derivative(a, T, chi) + std::log(static_cast<double>(a.width())));
    cplx e = 2.0 * std::log(static_cast<double>(a.f)) + lam;
    for (i64 p : prime_divisors(N)) {
      const double lp = std::log(static_cast<double>(p));
      cplx x = psi(p) * detail::rpow(static_cast<double>(p), cplx(-1.0, 2.0 * T));
      e += 2.0 * x * lp / (1.0 - x);
      if ((N / a.f) % p == 0) {
        cplx y = psi(p) * detail::rpow(static_cast<double>(p), cplx(0.0, 2.0 * T));
        e -= 2.0 * y * lp / (1.0 - y);
      }
    }
    w.proof_form += p2 * e;
  }
  w.display_main = 2.0 * std::log(static_cast<double>(N)) + 4.0 * log_derivative(cplx(1.0, 2.0 * T), psi.conj()).real();
  return w;
}

// ---- alpha_phi and the main term ----

struct AlphaSummand {
  i64 g;
  bool eisenstein;  // false: <G|_g, phi>, true: <E(g., 1+2iT), phi>
  cplx coefficient;
  cplx pairing;
  double contribution;
};

struct AlphaResult {
  double value = 0.0;
  double main = 0.0;     // c0 <1, phi>_M
  double mass = 0.0;     // <1, phi>_M
  double quad_error = 0.0;
  std::vector<AlphaSummand> summands;
};

inline AlphaResult alpha_phi(const TracedForm& tf, const TestFunction& phi, const QuadratureSpec& spec = {}) {
  if (phi.level() != tf.M) throw domain_error("alpha_phi: test function must live at level M");
  AlphaResult r;
  auto one = pair_with_test([](cplx) { return cplx(1.0); }, tf.M, phi, spec);
  r.mass = one.value.real();
  r.main = tf.c0.real() * r.mass;
  for (auto& [g, c] : tf.cg) {
    double gd = static_cast<double>(g);
    auto q = pair_with_test([gd](cplx z) { return cplx(eval_level1_G(gd * z)); }, tf.M, phi, spec);
    double contrib = c * q.value.real();
    r.summands.push_back({g, false, c, q.value, contrib});
    r.value += contrib;
    r.quad_error += std::abs(c) * q.error_estimate;
  }
  if (!tf.cg_prime.empty()) {
    Level1Eisenstein E(cplx(1.0, 2.0 * tf.T));
    for (auto& [g, c] : tf.cg_prime) {
      double gd = static_cast<double>(g);
      auto q = pair_with_test([&E, gd](cplx z) { return E(gd * z); }, tf.M, phi, spec);
      double contrib = 2.0 * (c * q.value).real();
      r.summands.push_back({g, true, c, q.value, contrib});
      r.value += contrib;
      r.quad_error += 2.0 * std::abs(c) * q.error_estimate;
    }
  }
  return r;
}

// <E, phi>_N with the kernel evaluated pointwise through the beta-limit.
inline QuadResult kernel_pairing_direct(const RegKernel& K, const TestFunction& phi, const QuadratureSpec& spec = {}) {
  KernelBetaOracle ora(K);
  return pair_with_test(ora, K.N, phi, spec);
}

// ---- summed alphas for primitive chi, M prime ----

struct ConsistencySum {
  double route_a = 0.0;  // sum_j alpha_{phi_j} by per-coset quadrature
  double route_b = 0.0;  // Hecke route
  double predicted = 0.0;  // <1,phi0>/<1,1> log(M (M, N/q))
  double g_coefficient = 0.0;
  double log_coefficient_ratio = 0.0;
  double G_phi0 = 0.0, one_phi0 = 0.0;
};

inline ConsistencySum consistency_sum(const TracedForm& tf, const Bump& base, i64 q, const QuadratureSpec& spec = {}) {
  if (!tf.cg_prime.empty()) throw domain_error("consistency_sum: requires c_g' = 0 (nontrivial character)");
  const i64 M = tf.M;
  ConsistencySum cs;
  for (int j = 0; j < static_cast<int>(nu_index(M)); ++j)
    cs.route_a += alpha_phi(tf, TestFunction(base, M, j), spec).value;
  auto phi0 = TestFunction::phi0(base);
  cs.G_phi0 = pair_with_test([](cplx z) { return cplx(eval_level1_G(z)); }, 1, phi0, spec).value.real();
  cs.one_phi0 = pair_with_test([](cplx) { return cplx(1.0); }, 1, phi0, spec).value.real();
  double logsum = 0.0;
  for (auto& [g, c] : tf.cg) {
    double gd = static_cast<double>(g);
    double idx = static_cast<double>(nu_index(M)) / static_cast<double>(nu_index(g));
    double lam = 0.0, S = 0.0;
    for (i64 b : divisors(g)) lam += 1.0 / static_cast<double>(b);
    lam *= std::sqrt(gd);
    for (i64 a : divisors(g)) S += std::log(gd / (static_cast<double>(a) * a)) / static_cast<double>(a);
    cs.g_coefficient += c * idx * std::sqrt(gd) * lam;
    logsum += c * idx * gd * S;
    cs.route_b += c * idx * std::sqrt(gd) * (lam * cs.G_phi0 + 3.0 / kPi * std::sqrt(gd) * S * cs.one_phi0);
  }
  // (3/pi) * volume(1) = 1
  cs.log_coefficient_ratio = M > 1 ? logsum / std::log(static_cast<double>(M)) : 0.0;
  cs.predicted = cs.one_phi0 / volume(1) * std::log(static_cast<double>(M * gcd(M, tf.N / q)));
  return cs;
}

// ---- T -> 0 sweep at M = q = 1 ----

struct TSweep {
  std::vector<double> T, value;
  double intercept = 0.0, slope = 0.0;
};

inline TSweep t_zero_sweep(i64 N, const std::vector<double>& Ts, const Bump& base = {},
                           const QuadratureSpec& spec = {}) {
  TSweep out;
  auto chi = DirichletCharacter::trivial(N);
  auto phi0 = TestFunction::phi0(base);
  for (double T : Ts) {
    auto tf = traced_kernel(build_kernel(N, chi, T), 1);
    auto a = alpha_phi(tf, phi0, spec);
    out.T.push_back(T);
    out.value.push_back(a.main + a.value);
  }
  // least-squares line
  double n = static_cast<double>(Ts.size()), sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < Ts.size(); ++i) {
    sx += out.T[i];
    sy += out.value[i];
    sxx += out.T[i] * out.T[i];
    sxy += out.T[i] * out.value[i];
  }
  double den = n * sxx - sx * sx;
  out.slope = den != 0.0 ? (n * sxy - sx * sy) / den : 0.0;
  out.intercept = (sy - out.slope * sx) / n;
  return out;
}

// ---- kernel boundedness probe ----

struct BoundednessProbe {
  Cusp cusp;
  std::vector<double> y;
  std::vector<double> raw;       // |E(sigma_b z)|^2
  std::vector<double> residual;  // | |E|^2 - kernel |
  bool bounded(double factor = 5.0) const {
    double r0 = residual.front();
    for (double r : residual)
      if (!(r <= factor * r0)) return false;
    return true;
  }
};

inline std::vector<BoundednessProbe> kernel_boundedness(const RegKernel& K, const std::vector<double>& ys,
                                                        double x = 0.123) {
  auto tf = traced_kernel(K, K.N);
  TracedEvaluator ker(tf);
  auto E = K.series();
  std::vector<BoundednessProbe> out;
  for (auto& b : cusp_set(K.N)) {
    auto sb = scaling_matrix(b);
    BoundednessProbe p{b, {}, {}, {}};
    for (double y : ys) {
      cplx z = sb.apply({x, y});
      double e2 = std::norm(E(z));
      p.y.push_back(y);
      p.raw.push_back(e2);
      p.residual.push_back(std::abs(e2 - ker(z)));
    }
    out.push_back(p);
  }
  return out;
}

}  // namespace eisenlab
