#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <memory>
#include <mutex>
#include <vector>

#include "cusps.hpp"
#include "lfun.hpp"
#include "special.hpp"

namespace eisenlab {

struct FourierTruncation {
  int n_max = 0;  // 0: automatic
  double target_abs_error = 1e-13;
};

namespace detail {

// prod_{p | M, p not | cond(psi)} (1 - psi(p) p^{-w})
inline cplx euler_missing(cplx w, const DirichletCharacter& psi, i64 M) {
  cplx v = 1.0;
  for (i64 p : prime_divisors(M)) {
    if (psi.modulus() % p == 0) continue;
    v *= 1.0 - psi(p) * std::exp(-w * std::log(static_cast<double>(p)));
  }
  return v;
}

inline cplx rpow(double base, cplx s) { return std::exp(s * std::log(base)); }

}  // namespace detail

// theta_{chi1,chi2}(s) = q2^s pi^{-s}/tau(chi2) Gamma(s) L(2s, chi1 chi2), written as
// q2^s q'^{-s}/tau(chi2) Lambda(2s, psi') E(2s) with psi' the inducer of chi1 chi2.
struct ThetaParts {
  cplx pre;      // q2^s q'^{-s}/tau(chi2)
  cplx lam_reg;  // Lambda(2s, psi'), times 2s(2s-1) when q' = 1
  cplx poly;     // 2s(2s-1) when q' = 1, else 1
  cplx euler;    // missing Euler factors
};

inline ThetaParts theta_parts(const DirichletCharacter& chi1, const DirichletCharacter& chi2, cplx s) {
  const i64 q1 = chi1.modulus(), q2 = chi2.modulus();
  auto prod = chi1.product(chi2);
  auto psi = prod.primitive_inducer();
  const double qp = static_cast<double>(psi.modulus());
  ThetaParts t;
  t.pre = detail::rpow(static_cast<double>(q2), s) * detail::rpow(qp, -s) / chi2.gauss_sum();
  t.lam_reg = lambda_reg(2.0 * s, psi);
  t.poly = (psi.modulus() == 1) ? 2.0 * s * (2.0 * s - 1.0) : cplx(1.0);
  t.euler = detail::euler_missing(2.0 * s, psi, q1 * q2);
  return t;
}

inline cplx theta_factor(const DirichletCharacter& chi1, const DirichletCharacter& chi2, cplx s) {
  auto t = theta_parts(chi1, chi2, s);
  if (std::abs(t.poly) < 1e-10) throw pole_error("theta(s): L(2s) at 2s=1");
  return t.pre * t.lam_reg / t.poly * t.euler;
}

// 1/theta_{chi1,chi2}(s); vanishes where theta has a pole.
inline cplx theta_reciprocal(const DirichletCharacter& chi1, const DirichletCharacter& chi2, cplx s) {
  auto t = theta_parts(chi1, chi2, s);
  cplx den = t.pre * t.lam_reg * t.euler;
  if (std::abs(den) < 1e-10) throw pole_error("1/theta(s): Lambda(2s) E(2s) vanishes");
  return t.poly / den;
}

// theta_{conj chi2, conj chi1}(1-s) / theta_{chi1,chi2}(s)
inline cplx theta_reflect_ratio(const DirichletCharacter& chi1, const DirichletCharacter& chi2, cplx s) {
  const i64 q1 = chi1.modulus(), q2 = chi2.modulus();
  auto psi = chi1.product(chi2).primitive_inducer();
  auto psib = psi.conj();
  const double qp = static_cast<double>(psi.modulus());
  cplx pre_num = detail::rpow(static_cast<double>(q1), 1.0 - s) * detail::rpow(qp, -(1.0 - s)) /
                 chi1.conj().gauss_sum();
  cplx pre_den = detail::rpow(static_cast<double>(q2), s) * detail::rpow(qp, -s) / chi2.gauss_sum();
  cplx eu_num = detail::euler_missing(2.0 - 2.0 * s, psib, q1 * q2);
  cplx eu_den = detail::euler_missing(2.0 * s, psi, q1 * q2);
  if (std::abs(eu_den) < 1e-10) throw pole_error("theta ratio: Euler factor E(2s) vanishes");
  return pre_num / pre_den * lambda_reflect_ratio(s, psib, psi) * eu_num / eu_den;
}

// lambda_{chi1,chi2}(n, s) = chi2(sgn n) sum_{ab=|n|} chi1(a) conj(chi2)(b) (b/a)^{s-1/2}
inline cplx lambda_coeff(const DirichletCharacter& chi1, const DirichletCharacter& chi2, i64 n, cplx s) {
  if (n == 0) throw domain_error("lambda_coeff: n must be nonzero");
  i64 m = std::llabs(n);
  cplx v = 0.0;
  for (i64 a : divisors(m)) {
    i64 b = m / a;
    cplx c = chi1(a) * std::conj(chi2(b));
    if (c == 0.0) continue;
    v += c * std::exp((s - 0.5) * std::log(static_cast<double>(b) / static_cast<double>(a)));
  }
  return n < 0 ? chi2(-1) * v : v;
}

// E_{chi1,chi2}(z, s) for primitive chi1 mod q1, chi2 mod q2 of equal parity.
class CharEisenstein {
 public:
  CharEisenstein(DirichletCharacter chi1, DirichletCharacter chi2, cplx s)
      : chi1_(std::move(chi1)), chi2_(std::move(chi2)), s_(s) {
    if (!chi1_.is_primitive() || !chi2_.is_primitive())
      throw domain_error("CharEisenstein: characters must be primitive");
    if (chi1_.parity() != chi2_.parity()) throw domain_error("CharEisenstein: parity mismatch");
    q1_ = chi1_.modulus();
    q2_ = chi2_.modulus();
    level_ = q1_ * q2_;
    auto_char_ = chi1_.product(chi2_.conj()).lift_to(level_);
    rho_ = theta_reciprocal(chi1_, chi2_, s);
    if (q2_ == 1) ct_b_ = theta_reflect_ratio(chi1_, chi2_, s);
    sign_ = chi2_(-1).real();
    lam_ = std::make_shared<const std::vector<cplx>>();
  }

  cplx s() const { return s_; }
  i64 level() const { return level_; }
  const DirichletCharacter& chi1() const { return chi1_; }
  const DirichletCharacter& chi2() const { return chi2_; }
  cplx rho() const { return rho_; }
  // E(gamma z) = automorphy(d_gamma) E(z) for gamma in Gamma_0(q1 q2)
  const DirichletCharacter& automorphy() const { return auto_char_; }

  // constant term delta_{q1=1} (q2 y)^s + delta_{q2=1} ct_b (q1 y)^{1-s}
  cplx constant_term(double y) const {
    cplx v = 0.0;
    if (q1_ == 1) v += detail::rpow(static_cast<double>(q2_) * y, s_);
    if (q2_ == 1) v += ct_b_ * detail::rpow(static_cast<double>(q1_) * y, 1.0 - s_);
    return v;
  }

  cplx operator()(cplx z, const FourierTruncation& tr = {}) const {
    GL2Z g = gamma0_lift(z, level_);
    cplx w = g.apply(z);
    // E(z) = conj(chi(d)) E(gamma z)
    return std::conj(auto_char_(g.d)) * fourier(w, tr);
  }

  // Fourier expansion at w without any reduction.
  cplx fourier(cplx w, const FourierTruncation& tr = {}) const {
    const double x = w.real(), y = w.imag();
    int n_max = tr.n_max > 0 ? tr.n_max : auto_nmax(y);
    cplx v = constant_term(y);
    if (rho_ == 0.0) return v;
    auto lam = coefficients(n_max);
    auto kb = bessel_k_batch(s_ - 0.5, 2.0 * kPi * y, n_max);
    cplx acc = 0.0;
    for (int n = 1; n <= n_max; ++n) {
      cplx kv = kb[n - 1];
      if (kv == 0.0) break;
      double t = 2.0 * kPi * n * x;
      cplx ex = (sign_ > 0) ? cplx(2.0 * std::cos(t), 0.0) : cplx(0.0, 2.0 * std::sin(t));
      acc += (*lam)[n] * kv * ex;
    }
    return v + 2.0 * std::sqrt(y) * rho_ * acc;
  }

  // theta(s) E(z, s)
  cplx completed(cplx z, const FourierTruncation& tr = {}) const {
    return theta_factor(chi1_, chi2_, s_) * (*this)(z, tr);
  }

  int auto_nmax(double y) const {
    double T = std::abs(s_.imag());
    double sig = std::abs(s_.real() - 0.5);
    double base = (37.0 + T) / (2.0 * kPi * y);
    // polynomial growth of lambda(n) K(2 pi n y) for Re s away from 1/2
    double extra = sig * std::log(base + 2.0) / (2.0 * kPi * y);
    return std::max(1, static_cast<int>(std::ceil(base + extra)));
  }

  // lambda(n, s) for 0 <= n <= n_max (index 0 unused); snapshot of the cache.
  std::shared_ptr<const std::vector<cplx>> coefficients(int n_max) const {
    {
      std::lock_guard<std::mutex> lk(mu_);
      if (static_cast<int>(lam_->size()) > n_max) return lam_;
    }
    int target = std::max(n_max + 1, 2 * static_cast<int>(lam_->size()));
    auto fresh = std::make_shared<std::vector<cplx>>(build_lambda(target));
    std::lock_guard<std::mutex> lk(mu_);
    if (lam_->size() < fresh->size()) lam_ = fresh;
    return lam_;
  }

 private:
  std::vector<cplx> build_lambda(int size) const {
    std::vector<cplx> out(size, 0.0), pw(size, 0.0), c1(size), c2(size);
    for (int k = 1; k < size; ++k) {
      pw[k] = std::exp((s_ - 0.5) * std::log(static_cast<double>(k)));
      c1[k] = chi1_(k);
      c2[k] = std::conj(chi2_(k));
    }
    for (int a = 1; a < size; ++a) {
      if (c1[a] == 0.0) continue;
      cplx ia = c1[a] / pw[a];
      for (int b = 1; a * b < size; ++b) {
        if (c2[b] == 0.0) continue;
        out[a * b] += ia * c2[b] * pw[b];
      }
    }
    return out;
  }

  DirichletCharacter chi1_, chi2_, auto_char_;
  cplx s_;
  i64 q1_ = 1, q2_ = 1, level_ = 1;
  cplx rho_ = 0.0, ct_b_ = 0.0;
  double sign_ = 1.0;
  mutable std::mutex mu_;
  mutable std::shared_ptr<const std::vector<cplx>> lam_;
};

// Level-one E(z, s).
inline cplx eval_level1_E(cplx z, cplx s) {
  auto t = DirichletCharacter::trivial(1);
  return CharEisenstein(t, t, s)(z);
}

// E(z, s) for a fixed s with cached coefficients.
class Level1Eisenstein {
 public:
  explicit Level1Eisenstein(cplx s)
      : E_(DirichletCharacter::trivial(1), DirichletCharacter::trivial(1), s) {}
  cplx operator()(cplx z) const { return E_(z); }
  cplx s() const { return E_.s(); }

 private:
  CharEisenstein E_;
};

// Kronecker limit function G(z) = lim_{s->1} (E(z,s) - (3/pi)/(s-1)), by Richardson
// extrapolation of S(h) = (E(z,1+h) + E(z,1-h))/2 at h = 1e-2, 5e-3.
class KroneckerG {
 public:
  static constexpr double h1 = 1e-2, h2 = 5e-3;

  KroneckerG() : ep1_(1.0 + h1), em1_(1.0 - h1), ep2_(1.0 + h2), em2_(1.0 - h2) {}

  static const KroneckerG& instance() {
    static const KroneckerG g;
    return g;
  }

  double operator()(cplx z) const {
    cplx w = reduce_to_D(z).z;
    double s1 = 0.5 * (ep1_(w) + em1_(w)).real();
    double s2 = 0.5 * (ep2_(w) + em2_(w)).real();
    return (4.0 * s2 - s1) / 3.0;
  }

  // single-step value at h, for consistency checks
  double symmetric(cplx z, double h) const {
    cplx w = reduce_to_D(z).z;
    return 0.5 * (eval_level1_E(w, 1.0 + h) + eval_level1_E(w, 1.0 - h)).real();
  }

 private:
  Level1Eisenstein ep1_, em1_, ep2_, em2_;
};

inline double eval_level1_G(cplx z) { return KroneckerG::instance()(z); }

// T_n f(z) = n^{-1/2} sum_{ad=n} sum_{b mod d} f((az+b)/d)
template <class F>
auto hecke_apply(i64 n, const F& f, cplx z) -> decltype(f(z)) {
  using R = decltype(f(z));
  R acc{};
  for (i64 a : divisors(n)) {
    i64 d = n / a;
    for (i64 b = 0; b < d; ++b)
      acc += f((static_cast<double>(a) * z + static_cast<double>(b)) / static_cast<double>(d));
  }
  return acc / std::sqrt(static_cast<double>(n));
}

// E_a(z, s, chi) at level N through the change of basis to E_{chi1,chi2}(K z, s).
class CuspEisenstein {
 public:
  struct Term {
    i64 K;
    cplx coef;
  };
  struct Group {
    std::shared_ptr<CharEisenstein> E;
    std::vector<Term> terms;
  };

  CuspEisenstein(const Cusp& a, const DirichletCharacter& chi, cplx s) : cusp_(a), chi_(chi), s_(s) {
    const i64 N = a.N, f = a.f;
    if (chi.modulus() != N) throw domain_error("CuspEisenstein: modulus must equal level");
    if (!is_singular(a, chi)) throw domain_error("CuspEisenstein: cusp is not singular for chi");
    const i64 g = gcd(f, N / f);
    cplx pre = detail::rpow(static_cast<double>(a.width()), -s) * detail::rpow(static_cast<double>(f), -s) /
               static_cast<double>(euler_phi(g));
    auto target = chi.primitive_inducer();
    for (i64 q1 : divisors(N / f))
      for (i64 q2 : divisors(f))
        for (auto& c1 : primitive_characters(q1))
          for (auto& c2 : primitive_characters(q2)) {
            if (c1.parity() != c2.parity()) continue;
            if (!(c1.product(c2.conj()).primitive_inducer() == target)) continue;
            auto psi = c1.product(c2).primitive_inducer();
            cplx ratio = 1.0;
            for (i64 p : prime_divisors(N)) {
              if ((q1 * q2) % p == 0) continue;
              ratio /= 1.0 - psi(p) * detail::rpow(static_cast<double>(p), -2.0 * s);
            }
            cplx c12 = pre * std::conj(c2(-a.u)) * ratio;
            Group grp;
            for (i64 aa : divisors(f))
              for (i64 bb : divisors(N / f)) {
                int mu = mobius(aa) * mobius(bb);
                if (mu == 0) continue;
                cplx m = static_cast<double>(mu) * c1(bb) * c2(aa) *
                         detail::rpow(static_cast<double>(aa * bb), -s);
                if (m == 0.0) continue;
                if ((bb * f) % (aa * q2) != 0) throw domain_error("CuspEisenstein: non-integral dilation");
                grp.terms.push_back({bb * f / (aa * q2), c12 * m});
              }
            if (grp.terms.empty()) continue;
            grp.E = std::make_shared<CharEisenstein>(c1, c2, s);
            groups_.push_back(std::move(grp));
          }
  }

  const Cusp& cusp() const { return cusp_; }
  const DirichletCharacter& character() const { return chi_; }
  cplx s() const { return s_; }
  const std::vector<Group>& groups() const { return groups_; }

  cplx operator()(cplx z, const FourierTruncation& tr = {}) const {
    cplx v = 0.0;
    for (auto& g : groups_)
      for (auto& t : g.terms) v += t.coef * (*g.E)(static_cast<double>(t.K) * z, tr);
    return v;
  }

 private:
  Cusp cusp_;
  DirichletCharacter chi_;
  cplx s_;
  std::vector<Group> groups_;
};

inline cplx eval_cusp_eisenstein(const Cusp& a, const DirichletCharacter& chi, cplx z, cplx s) {
  return CuspEisenstein(a, chi, s)(z);
}

inline cplx eval_char_eisenstein(const DirichletCharacter& chi1, const DirichletCharacter& chi2, cplx z, cplx s,
                                 const FourierTruncation& tr = {}) {
  return CharEisenstein(chi1, chi2, s)(z, tr);
}

// Explicit coset sum of E_a^{(N)} over Gamma_0(N)\Gamma_0(M) (trivial character).
inline cplx trace_down(const CuspEisenstein& E, i64 M, cplx z) {
  if (!E.character().is_principal()) throw domain_error("trace_down: trivial character required");
  cplx v = 0.0;
  for (auto& g : cosets_between(E.cusp().N, M)) v += E(g.apply(z));
  return v;
}

// (W^M_N(a))^{1-s} E_a^{(M)}(z, s)
inline cplx trace_down_closed(const CuspEisenstein& E, i64 M, cplx z) {
  Cusp am = reduce_to_level(E.cusp(), M);
  double w = static_cast<double>(relative_width(E.cusp(), M));
  CuspEisenstein EM(am, DirichletCharacter::trivial(M), E.s());
  return detail::rpow(w, 1.0 - E.s()) * EM(z);
}

// |E_{chi1,chi2}(sigma_a z, s)| / |E_{1,chi1 chi2}(z, s)| at N = q1 q2, a = 1/q2.
inline double slash_modulus_check(const DirichletCharacter& chi1, const DirichletCharacter& chi2, cplx z, cplx s) {
  const i64 q1 = chi1.modulus(), q2 = chi2.modulus();
  if (gcd(q1, q2) != 1) throw domain_error("slash_modulus_check: conductors must be coprime");
  // sigma = (1 v; q2 w) diag(q1, 1) with q1 | w, an Atkin-Lehner matrix for Q = q1
  i64 v = q1 == 1 ? 0 : mod(-inv_mod(q2, q1), q1);
  GL2Z g{1, v, q2, 1 + q2 * v};
  cplx num = CharEisenstein(chi1, chi2, s)(g.apply(static_cast<double>(q1) * z));
  auto prod = chi1.product(chi2);
  cplx den = CharEisenstein(DirichletCharacter::trivial(1), prod, s)(z);
  if (std::abs(den) < 1e-12) throw accuracy_error("slash_modulus_check: degenerate point");
  return std::abs(num) / std::abs(den);
}

}  // namespace eisenlab
