#pragma once

#include <cmath>
#include <complex>
#include <sstream>
#include <string>
#include <vector>

#include "eisen.hpp"

namespace eisenlab {

struct ConstantTermPair {
  cplx C = 0.0;
  cplx D = 0.0;
};

// Constant term C y^s + D y^{1-s} of E_{chi1,chi2}(K gamma z, s), gamma = (u v; f w).
// f = 0 stands for gamma = identity.
inline ConstantTermPair constant_term_coeffs(const DirichletCharacter& chi1, const DirichletCharacter& chi2, i64 K,
                                             const GL2Z& gamma, cplx s) {
  if (gamma.det() != 1) throw domain_error("constant_term_coeffs: det must be 1");
  if (K < 1) throw domain_error("constant_term_coeffs: K must be positive");
  const i64 q1 = chi1.modulus(), q2 = chi2.modulus();
  const i64 u = gamma.a, f = gamma.c;
  ConstantTermPair r;
  if (f % q2 == 0) {
    i64 g = gcd(q2 * K, f);
    r.C = detail::rpow(static_cast<double>(g), 2.0 * s) * detail::rpow(static_cast<double>(q2 * K), -s) *
          chi1(-f / g) * chi2(q2 * K * u / g);
  }
  if (f % q1 == 0) {
    i64 g = gcd(q1 * K, f);
    cplx ratio = theta_reflect_ratio(chi1, chi2, s);
    r.D = ratio * detail::rpow(static_cast<double>(g), 2.0 - 2.0 * s) *
          detail::rpow(static_cast<double>(q1 * K), s - 1.0) * std::conj(chi1(q1 * K * u / g)) *
          std::conj(chi2(-f / g));
  }
  return r;
}

// delta_ab and phi_ab from the change of basis and the constant terms of each E_{chi1,chi2}(K sigma_b z).
inline ConstantTermPair cusp_constant_term(const CuspEisenstein& E, const Cusp& b) {
  const cplx s = E.s();
  if (!is_singular(b, E.character())) throw domain_error("cusp_constant_term: cusp b is not singular");
  GL2Z gb = cusp_gamma(b.u, b.f);
  ConstantTermPair acc;
  for (auto& grp : E.groups())
    for (auto& t : grp.terms) {
      auto cd = constant_term_coeffs(grp.E->chi1(), grp.E->chi2(), t.K, gb, s);
      acc.C += t.coef * cd.C;
      acc.D += t.coef * cd.D;
    }
  const double W = static_cast<double>(b.width());
  acc.C *= detail::rpow(W, s);
  acc.D *= detail::rpow(W, 1.0 - s);
  return acc;
}

namespace detail {

inline void require_singular(const Cusp& a, const DirichletCharacter& chi) {
  if (chi.modulus() != a.N) throw domain_error("scattering: modulus must equal level");
  if (!is_singular(a, chi)) throw domain_error("scattering: cusp is not singular for chi");
}

// L(2s, chi1 chi2) / L(2s, chi1 chi2 chi_0,N)
inline cplx l_ratio_2s(const DirichletCharacter& chi1, const DirichletCharacter& chi2, i64 N, cplx s) {
  auto psi = chi1.product(chi2);
  cplx r = 1.0;
  for (i64 p : prime_divisors(N)) {
    if ((chi1.modulus() * chi2.modulus()) % p == 0) continue;
    r /= 1.0 - psi(p) * rpow(static_cast<double>(p), -2.0 * s);
  }
  return r;
}

}  // namespace detail

// phi_ab(s, chi) by the double divisor sum over primitive pairs (chi1, chi2).
inline cplx phi_general(const Cusp& a, const Cusp& b, cplx s, const DirichletCharacter& chi) {
  detail::require_singular(a, chi);
  detail::require_singular(b, chi);
  const i64 N = a.N, fa = a.f, fb = b.f;
  auto target = chi.primitive_inducer();
  cplx outer = detail::rpow(static_cast<double>(a.width()), -s) * detail::rpow(static_cast<double>(b.width()), 1.0 - s) /
               (static_cast<double>(fa) * static_cast<double>(euler_phi(gcd(fa, N / fa))));
  cplx total = 0.0;
  for (i64 q1 : divisors(gcd(N / fa, fb)))
    for (i64 q2 : divisors(fa))
      for (auto& c1 : primitive_characters(q1))
        for (auto& c2 : primitive_characters(q2)) {
          if (c1.parity() != c2.parity()) continue;
          if (!(c1.product(c2.conj()).primitive_inducer() == target)) continue;
          cplx pre = std::conj(c1(b.u)) * std::conj(c2(a.u)) * detail::l_ratio_2s(c1, c2, N, s) *
                     theta_reflect_ratio(c1, c2, s) *
                     detail::rpow(static_cast<double>(q2) / static_cast<double>(q1), 1.0 - s);
          cplx inner = 0.0;
          for (i64 aa : divisors(fa))
            for (i64 bb : divisors(N / fa)) {
              int mu = mobius(aa) * mobius(bb);
              if (mu == 0) continue;
              cplx m = static_cast<double>(mu) * c1(bb) * c2(aa);
              if (m == 0.0) continue;
              i64 K = bb * fa / (aa * q2);
              i64 g = gcd(q1 * K, fb);
              inner += m * detail::rpow(static_cast<double>(aa), 1.0 - 2.0 * s) / static_cast<double>(bb) *
                       detail::rpow(static_cast<double>(g), 2.0 - 2.0 * s) * std::conj(c1(q1 * K / g)) *
                       std::conj(c2(fb / g));
            }
          total += pre * inner;
        }
  return outer * total;
}

// phi_{infinity b}(s, chi) in closed form.
inline cplx phi_infinity(const Cusp& b, cplx s, const DirichletCharacter& chi) {
  detail::require_singular(b, chi);
  const i64 N = b.N, f = b.f;
  auto psi = chi.primitive_inducer();
  const i64 q = psi.modulus();
  if ((N / q) % f != 0) return 0.0;
  auto psib = psi.conj();
  cplx v = psib.gauss_sum() * detail::rpow(static_cast<double>(b.width()), -s) *
           detail::rpow(static_cast<double>(f), 1.0 - 2.0 * s) / static_cast<double>(euler_phi(gcd(f, N / f)));
  v *= lambda_reflect_ratio(s, psi, psib);
  for (i64 p : prime_divisors(N)) {
    const double pd = static_cast<double>(p);
    v /= 1.0 - psib(p) * detail::rpow(pd, -2.0 * s);
    if (f % p == 0) v *= 1.0 - 1.0 / pd;
    if ((N / f) % p == 0) v *= 1.0 - psib(p) * detail::rpow(pd, 1.0 - 2.0 * s);
  }
  return v;
}

struct ScatteringRow {
  i64 N = 1;
  DirichletCharacter chi = DirichletCharacter::trivial(1);
  cplx s = 0.0;
  std::vector<Cusp> cusps;
  std::vector<cplx> entries;  // phi_{infinity a}(s, chi)

  double unitarity_residual() const {
    double t = 0.0;
    for (auto& e : entries) t += std::norm(e);
    return std::abs(t - 1.0);
  }
  cplx general(const Cusp& a, const Cusp& b) const { return phi_general(a, b, s, chi); }
};

inline ScatteringRow phi_infinity_row(i64 N, const DirichletCharacter& chi, cplx s) {
  if (chi.modulus() != N) throw domain_error("phi_infinity_row: modulus must equal level");
  if (!chi.is_even()) throw domain_error("phi_infinity_row: character must be even");
  ScatteringRow r;
  r.N = N;
  r.chi = chi;
  r.s = s;
  r.cusps = singular_cusps(N, chi);
  for (auto& b : r.cusps) r.entries.push_back(phi_infinity(b, s, chi));
  return r;
}

// Atkin-Lehner entry phi_ab for primitive chi = chi1 conj(chi2), chi1 mod N/f_a, chi2 mod f_a.
inline cplx phi_atkin_lehner(const Cusp& a, const Cusp& b, cplx s, const DirichletCharacter& chi) {
  if (!chi.is_primitive()) throw domain_error("phi_atkin_lehner: character must be primitive");
  if (!is_atkin_lehner(a) || !is_atkin_lehner(b)) throw domain_error("phi_atkin_lehner: cusps must be Atkin-Lehner");
  const i64 N = a.N, f = a.f;
  if (!(b == atkin_lehner_complement(a))) return 0.0;
  for (auto& c1 : primitive_characters(N / f))
    for (auto& c2 : primitive_characters(f)) {
      if (!(c1.product(c2.conj()) == chi)) continue;
      auto prod = c1.product(c2);
      cplx v = c1(-1) * c1.gauss_sum() * c2.gauss_sum() * detail::rpow(static_cast<double>(N), -s);
      return v * lambda_reflect_ratio(s, prod.conj(), prod);
    }
  throw domain_error("phi_atkin_lehner: no factorization of chi");
}

// d/ds log phi_{infinity a}(s, conj chi) at s = 1/2 - iT.
inline cplx phi_log_derivative(const Cusp& a, double T, const DirichletCharacter& chi) {
  auto chib = chi.conj();
  detail::require_singular(a, chib);
  const i64 N = a.N, f = a.f;
  auto psi = chi.primitive_inducer();  // phi(s, conj chi) involves conj(psi) in the numerator
  if ((N / psi.modulus()) % f != 0) throw domain_error("phi_log_derivative: entry vanishes");
  const cplx s{0.5, -T};
  cplx v = -std::log(static_cast<double>(N) * f / gcd(f, N / f));
  v -= 2.0 * completed_log_derivative(2.0 - 2.0 * s, psi.conj());
  v -= 2.0 * completed_log_derivative(2.0 * s, psi);
  for (i64 p : prime_divisors(N)) {
    const double lp = std::log(static_cast<double>(p));
    cplx x = psi(p) * detail::rpow(static_cast<double>(p), -2.0 * s);
    v -= 2.0 * lp * x / (1.0 - x);
    if ((N / f) % p == 0) {
      cplx y = psi(p) * detail::rpow(static_cast<double>(p), 1.0 - 2.0 * s);
      v += 2.0 * lp * y / (1.0 - y);
    }
  }
  return v;
}

// The same quantity in the form log(fN/(f,N/f)) + 4 Re Lambda'/Lambda(1+2iT, conj psi) + ..., negated.
inline cplx phi_log_derivative_printed(const Cusp& a, double T, const DirichletCharacter& chi) {
  const i64 N = a.N, f = a.f;
  auto psi = chi.primitive_inducer();
  cplx e = std::log(static_cast<double>(f) * N / gcd(f, N / f));
  e += 4.0 * completed_log_derivative(cplx(1.0, 2.0 * T), psi.conj()).real();
  for (i64 p : prime_divisors(N)) {
    const double lp = std::log(static_cast<double>(p));
    cplx x = psi(p) * detail::rpow(static_cast<double>(p), cplx(-1.0, 2.0 * T));
    e += 2.0 * x * lp / (1.0 - x);
    if ((N / f) % p == 0) {
      cplx y = psi(p) * detail::rpow(static_cast<double>(p), cplx(0.0, 2.0 * T));
      e -= 2.0 * y * lp / (1.0 - y);
    }
  }
  return -e;
}

// Central finite difference of log phi_{infinity a}(s, conj chi) at 1/2 - iT.
inline cplx phi_log_derivative_fd(const Cusp& a, double T, const DirichletCharacter& chi, double h = 1e-5) {
  auto chib = chi.conj();
  const cplx s{0.5, -T};
  cplx p = phi_infinity(a, s + h, chib), m = phi_infinity(a, s - h, chib), c = phi_infinity(a, s, chib);
  return (p - m) / (2.0 * h * c);
}

// |E_a(sigma_b(x+iy), s, chi)| at each y, from the Fourier modes of E_a(sigma_b z) e(-kappa x) on the
// line Im z = y0 (32 samples) carried to height y by sqrt(y) K_{s-1/2}(2 pi |n+kappa| y).
struct DecayProbe {
  double kappa = 0.0;
  std::vector<double> y;
  std::vector<double> modulus;
  std::vector<double> direct;  // direct values for y <= 4, NaN above
};

inline DecayProbe nonsingular_decay_probe(const Cusp& a, const Cusp& b, const DirichletCharacter& chi, cplx s,
                                          const std::vector<double>& ys, double x = 0.0, double y0 = 1.0) {
  CuspEisenstein E(a, chi, s);
  auto sb = scaling_matrix(b);
  GL2Z gb = sb.gamma;
  GL2Z shift = gb * GL2Z::translation(b.width()) * gb.inverse();
  if (!in_gamma0(shift, b.N)) throw domain_error("nonsingular_decay_probe: bad scaling matrix");
  cplx ek = chi(shift.d);
  double kappa = std::arg(ek) / (2.0 * kPi);
  if (kappa < -1e-12) kappa += 1.0;
  if (std::abs(kappa) < 1e-12 || std::abs(kappa - 1.0) < 1e-12) kappa = 0.0;
  DecayProbe out;
  out.kappa = kappa;
  const int P = 32;
  std::vector<cplx> samples(P);
  for (int j = 0; j < P; ++j) {
    double xj = static_cast<double>(j) / P;
    samples[j] = E(sb.apply({xj, y0})) * std::exp(cplx(0.0, -2.0 * kPi * kappa * xj));
  }
  std::vector<cplx> coef(P);
  for (int n = -P / 2; n < P / 2; ++n) {
    cplx c = 0.0;
    for (int j = 0; j < P; ++j) c += samples[j] * std::exp(cplx(0.0, -2.0 * kPi * n * j / P));
    coef[n + P / 2] = c / static_cast<double>(P);
  }
  for (double y : ys) {
    cplx v = 0.0;
    for (int n = -P / 2; n < P / 2; ++n) {
      double m = n + kappa;
      cplx c = coef[n + P / 2];
      if (m == 0.0) {
        // constant mode: only present at singular cusps, kept as the sampled profile
        auto ct = cusp_constant_term(E, b);
        v += ct.C * detail::rpow(y, s) + ct.D * detail::rpow(y, 1.0 - s);
        continue;
      }
      double am = std::abs(m);
      cplx k0 = bessel_k(s - 0.5, 2.0 * kPi * am * y0);
      if (k0 == 0.0) continue;
      cplx k1 = bessel_k(s - 0.5, 2.0 * kPi * am * y);
      v += c * std::sqrt(y / y0) * (k1 / k0) * std::exp(cplx(0.0, 2.0 * kPi * m * x));
    }
    out.y.push_back(y);
    out.modulus.push_back(std::abs(v));
    out.direct.push_back(y <= 4.0 ? std::abs(E(sb.apply({x, y}))) : std::nan(""));
  }
  return out;
}

// sum_{g | L} (log g / g) k^{omega(g)}
inline double divisor_log_sum(i64 L, int k) {
  double t = 0.0;
  for (i64 g : divisors(L)) t += std::log(static_cast<double>(g)) / g * std::pow(static_cast<double>(k), omega(g));
  return t;
}

struct HardSums {
  double S1 = 0.0;  // sum |phi|^2 log(N/(q f))
  cplx S2 = 0.0;    // sum |phi|^2 sum_{p | N/f} psi(p) log p / (psi(p) p^{2s-1} - 1)
  double S3 = 0.0;  // sum |phi|^2 log f
  double log_N_over_q = 0.0;
  double identity_residual() const { return std::abs(S1 + S3 - log_N_over_q); }
};

struct HardSumCsvRow {
  i64 N, q;
  double T;
  i64 f;
  double phi2, s1_part, s3_part;
};

inline HardSums hard_sums(i64 N, const DirichletCharacter& chi, double T, std::vector<HardSumCsvRow>* rows = nullptr) {
  const cplx s{0.5, T};
  auto row = phi_infinity_row(N, chi, s);
  auto psi = chi.primitive_inducer();
  const i64 q = psi.modulus();
  HardSums h;
  h.log_N_over_q = std::log(static_cast<double>(N) / q);
  for (std::size_t i = 0; i < row.cusps.size(); ++i) {
    const i64 f = row.cusps[i].f;
    double w = std::norm(row.entries[i]);
    double l1 = std::log(static_cast<double>(N) / (static_cast<double>(q) * f));
    double l3 = std::log(static_cast<double>(f));
    h.S1 += w * l1;
    h.S3 += w * l3;
    cplx inner = 0.0;
    for (i64 p : prime_divisors(N / f)) {
      cplx x = psi(p);
      if (x == 0.0) continue;
      inner += x * std::log(static_cast<double>(p)) / (x * detail::rpow(static_cast<double>(p), 2.0 * s - 1.0) - 1.0);
    }
    h.S2 += w * inner;
    if (rows) rows->push_back({N, q, T, f, w, w * l1, w * l3});
  }
  return h;
}

inline std::string hard_sums_csv(const std::vector<HardSumCsvRow>& rows) {
  std::ostringstream os;
  os.precision(17);
  os << "N,q,T,f,phi2,S1_part,S3_part\n";
  for (auto& r : rows) os << r.N << ',' << r.q << ',' << r.T << ',' << r.f << ',' << r.phi2 << ',' << r.s1_part << ',' << r.s3_part << '\n';
  return os.str();
}

}  // namespace eisenlab
