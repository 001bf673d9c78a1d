#pragma once

#include <cmath>
#include <complex>
#include <numbers>

#include "characters.hpp"
#include "special.hpp"

namespace eisenlab {

struct LValue {
  cplx s;
  cplx value;
  cplx derivative;
  double est_abs_error = 0.0;
};

struct HurwitzValue {
  cplx value;
  cplx derivative;
};

namespace detail {

// expm1(w)/w and its derivative in w
inline void expm1_over(cplx w, cplx& e1, cplx& de1) {
  if (std::abs(w) < 0.1) {
    // sum w^k/(k+1)!, derivative sum k w^{k-1}/(k+1)!
    e1 = 0.0;
    de1 = 0.0;
    cplx p = 1.0;
    double f = 1.0;
    for (int k = 0; k < 14; ++k) {
      f *= (k + 1);
      e1 += p / f;
      if (k + 1 < 14) de1 += static_cast<double>(k + 1) * p / (f * (k + 2));
      p *= w;
    }
    return;
  }
  cplx ew = std::exp(w);
  e1 = (ew - 1.0) / w;
  de1 = (ew * (w - 1.0) + 1.0) / (w * w);
}

// Euler-Maclaurin with 12 Bernoulli corrections. With `regular`, returns
// zeta(s,a) - 1/(s-1) (entire) and its derivative.
inline HurwitzValue hurwitz_em(cplx s, double a, bool regular) {
  const int n = 20 + static_cast<int>(std::ceil(std::abs(s.imag())));
  cplx v = 0.0, dv = 0.0;
  for (int k = 0; k < n; ++k) {
    double lk = std::log(k + a);
    cplx t = std::exp(-s * lk);
    v += t;
    dv -= lk * t;
  }
  const double na = n + a;
  const double ln = std::log(na);
  cplx pw = std::exp(-s * ln);  // (n+a)^{-s}
  cplx sm1 = s - 1.0;
  if (regular) {
    // ((n+a)^{1-s} - 1)/(s-1) = -ln * expm1(w)/w, w = (1-s) ln
    cplx e1, de1;
    expm1_over((1.0 - s) * ln, e1, de1);
    v += -ln * e1;
    dv += ln * ln * de1;
  } else {
    v += pw * na / sm1;
    dv += -ln * pw * na / sm1 - pw * na / (sm1 * sm1);
  }
  v += 0.5 * pw;
  dv -= 0.5 * ln * pw;
  const auto& B = bernoulli_even();
  // term_j = B_2j/(2j)! * P_j(s) * (n+a)^{-s-2j+1}, P_j = s(s+1)...(s+2j-2)
  cplx P = s, dP = 1.0;
  cplx q = pw / na;
  double fact = 2.0;
  for (int j = 1; j <= 12; ++j) {
    cplx coef = B[j - 1] / fact;
    v += coef * P * q;
    dv += coef * (dP - ln * P) * q;
    for (int i = 2 * j - 1; i <= 2 * j; ++i) {
      dP = dP * (s + static_cast<double>(i)) + P;
      P = P * (s + static_cast<double>(i));
    }
    q /= na * na;
    fact *= (2.0 * j + 1.0) * (2.0 * j + 2.0);
  }
  return {v, dv};
}

}  // namespace detail

inline HurwitzValue hurwitz_zeta(cplx s, double a) {
  if (!(a > 0.0 && a <= 1.0)) throw domain_error("hurwitz_zeta: a must lie in (0,1]");
  if (std::abs(s - 1.0) < 1e-15) throw pole_error("hurwitz zeta at s=1");
  if (s.real() <= -2.0) throw domain_error("hurwitz_zeta: Re s must exceed -2");
  return detail::hurwitz_em(s, a, false);
}

inline double euler_gamma() { return 0.57721566490153286061; }

// (s-1) zeta(s), entire; Stieltjes expansion in a small disc around 1.
inline cplx zeta_reg(cplx s) {
  cplx w = s - 1.0;
  if (std::abs(w) < 1e-3) {
    const double g0 = 0.57721566490153286061, g1 = -0.07281584548367672486,
                 g2 = -0.00969036319287231848, g3 = 0.00205383442030334587;
    return 1.0 + w * (g0 + w * (-g1 + w * (g2 / 2.0 + w * (-g3 / 6.0))));
  }
  return w * hurwitz_zeta(s, 1.0).value;
}

namespace detail {

inline cplx cpow_real(double base, cplx s) { return std::exp(s * std::log(base)); }

// L(s, psi) for primitive psi, with derivative.
inline HurwitzValue l_primitive(cplx s, const DirichletCharacter& psi) {
  const i64 q = psi.modulus();
  if (q == 1) return hurwitz_zeta(s, 1.0);
  cplx v = 0.0, dv = 0.0;
  for (i64 a = 1; a <= q; ++a) {
    cplx c = psi(a);
    if (c == 0.0) continue;
    // the 1/(s-1) parts cancel because sum psi(a) = 0
    auto h = hurwitz_em(s, static_cast<double>(a) / static_cast<double>(q), true);
    v += c * h.value;
    dv += c * h.derivative;
  }
  double lq = std::log(static_cast<double>(q));
  cplx qs = std::exp(-s * lq);
  return {qs * v, qs * (dv - lq * v)};
}

}  // namespace detail

// Finite Euler product prod_{p | N, p not | q} (1 - psi(p) p^{-s}) and its derivative.
inline HurwitzValue imprimitive_factor(cplx s, const DirichletCharacter& psi, i64 N) {
  cplx v = 1.0, dlog = 0.0;
  for (i64 p : prime_divisors(N)) {
    if (psi.modulus() % p == 0) continue;
    double lp = std::log(static_cast<double>(p));
    cplx t = psi(p) * std::exp(-s * lp);
    v *= 1.0 - t;
    dlog += t * lp / (1.0 - t);
  }
  return {v, v * dlog};
}

inline LValue dirichlet_l(cplx s, const DirichletCharacter& chi) {
  auto psi = chi.primitive_inducer();
  if (psi.modulus() == 1 && std::abs(s - 1.0) < 1e-15) throw pole_error("L(s, principal) at s=1");
  auto base = detail::l_primitive(s, psi);
  auto ef = imprimitive_factor(s, psi, chi.modulus());
  LValue r;
  r.s = s;
  r.value = base.value * ef.value;
  r.derivative = base.derivative * ef.value + base.value * ef.derivative;
  r.est_abs_error = 1e-14 * (1.0 + std::abs(r.value)) * std::sqrt(static_cast<double>(psi.modulus()));
  return r;
}

// L'/L for primitive chi.
inline cplx log_derivative(cplx s, const DirichletCharacter& chi) {
  if (!chi.is_primitive()) throw domain_error("log_derivative: character must be primitive");
  if (chi.modulus() == 1 && std::abs(s - 1.0) < 1e-12) throw pole_error("zeta'/zeta at s=1");
  auto v = detail::l_primitive(s, chi);
  return v.derivative / v.value;
}

inline cplx root_number(const DirichletCharacter& psi) {
  if (psi.modulus() == 1) return 1.0;
  cplx ie = psi.is_even() ? cplx(1.0) : cplx(0.0, 1.0);
  return psi.gauss_sum() / (ie * std::sqrt(static_cast<double>(psi.modulus())));
}

// s(s-1) Lambda(s) when psi is trivial (entire), Lambda(s, psi) otherwise.
inline cplx lambda_reg(cplx s, const DirichletCharacter& psi) {
  if (!psi.is_primitive()) throw domain_error("completed_l: character must be primitive");
  const i64 q = psi.modulus();
  if (s.real() < 0.5) {
    cplx w = (q == 1) ? cplx(1.0) : root_number(psi);
    return w * lambda_reg(1.0 - s, psi.conj());
  }
  const double eps = psi.is_even() ? 0.0 : 1.0;
  cplx h = (s + eps) / 2.0;
  cplx pre = detail::cpow_real(static_cast<double>(q) / kPi, h) * gamma_c(h);
  if (q == 1) return s * pre * zeta_reg(s);
  return pre * detail::l_primitive(s, psi).value;
}

// Lambda(s, psi) = (q/pi)^{(s+e)/2} Gamma((s+e)/2) L(s, psi).
inline cplx completed_l(cplx s, const DirichletCharacter& psi) {
  if (psi.modulus() == 1) {
    cplx poly = s * (s - 1.0);
    if (std::abs(poly) < 1e-10) throw pole_error("Lambda(s) at s in {0,1}");
    return lambda_reg(s, psi) / poly;
  }
  return lambda_reg(s, psi);
}

// Lambda'/Lambda(s, psi).
inline cplx completed_log_derivative(cplx s, const DirichletCharacter& psi) {
  if (!psi.is_primitive()) throw domain_error("completed_log_derivative: character must be primitive");
  if (s.real() < 0.5) return -completed_log_derivative(1.0 - s, psi.conj());
  const double eps = psi.is_even() ? 0.0 : 1.0;
  double lq = std::log(static_cast<double>(psi.modulus()) / kPi);
  return 0.5 * lq + 0.5 * digamma_c((s + eps) / 2.0) + log_derivative(s, psi);
}

// Lambda(2-2s, psi_a) / Lambda(2s, psi_b) with conj(psi_a) = psi_b; the trivial case
// is taken through s(s-1)Lambda so that s = 1/2 gives the limit -1.
inline cplx lambda_reflect_ratio(cplx s, const DirichletCharacter& psi_a, const DirichletCharacter& psi_b) {
  cplx num = lambda_reg(2.0 - 2.0 * s, psi_a);
  cplx den = lambda_reg(2.0 * s, psi_b);
  if (std::abs(den) < 1e-300) throw pole_error("Lambda(2s) zero");
  if (psi_b.modulus() == 1) {
    // poly(2s)/poly(2-2s) = 2s(2s-1)/((2-2s)(1-2s)) = -s/(1-s)
    if (std::abs(1.0 - s) < 1e-10) throw pole_error("Lambda(2-2s) at s=1");
    return -(s / (1.0 - s)) * num / den;
  }
  return num / den;
}

}  // namespace eisenlab
