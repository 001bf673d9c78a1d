#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "errors.hpp"

namespace eisenlab {

using cplx = std::complex<double>;

constexpr double kPi = std::numbers::pi;

// B_{2k}, k = 1..15
inline const std::array<double, 15>& bernoulli_even() {
  static const std::array<double, 15> b = {
      1.0 / 6,           -1.0 / 30,           1.0 / 42,          -1.0 / 30,
      5.0 / 66,          -691.0 / 2730,       7.0 / 6,           -3617.0 / 510,
      43867.0 / 798,     -174611.0 / 330,     854513.0 / 138,    -236364091.0 / 2730,
      8553103.0 / 6,     -23749461029.0 / 870, 8615841276005.0 / 14322};
  return b;
}

namespace detail {

// log Gamma for Re z >= 7 by Stirling with 12 correction terms
inline cplx lgamma_stirling(cplx z) {
  const auto& B = bernoulli_even();
  cplx r = (z - 0.5) * std::log(z) - z + 0.5 * std::log(2.0 * kPi);
  cplx zi = 1.0 / z, z2 = zi * zi, p = zi;
  for (int k = 1; k <= 12; ++k) {
    r += B[k - 1] / (2.0 * k * (2.0 * k - 1.0)) * p;
    p *= z2;
  }
  return r;
}

}  // namespace detail

// log Gamma(z), principal-ish branch (continuous in the right half-plane).
inline cplx lgamma_c(cplx z) {
  if (z.real() < 0.5) {
    // reflection: log Gamma(z) = log pi - log sin(pi z) - log Gamma(1-z)
    return std::log(kPi) - std::log(std::sin(kPi * z)) - lgamma_c(1.0 - z);
  }
  cplx shift = 0.0;
  while (z.real() < 7.0) {
    shift += std::log(z);
    z += 1.0;
  }
  return detail::lgamma_stirling(z) - shift;
}

inline cplx gamma_c(cplx z) {
  if (z.real() < 0.5) return kPi / (std::sin(kPi * z) * gamma_c(1.0 - z));
  cplx prod = 1.0;
  while (z.real() < 7.0) {
    prod *= z;
    z += 1.0;
  }
  return std::exp(detail::lgamma_stirling(z)) / prod;
}

// 1/Gamma(z): entire, exact zeros at the non-positive integers.
inline cplx rgamma_c(cplx z) {
  if (z.real() < 0.5) {
    double xr = std::round(z.real());
    if (z.imag() == 0.0 && z.real() == xr) return 0.0;
    return std::sin(kPi * z) * gamma_c(1.0 - z) / kPi;
  }
  return 1.0 / gamma_c(z);
}

inline cplx digamma_c(cplx z) {
  if (z.real() < 0.5) {
    return digamma_c(1.0 - z) - kPi / std::tan(kPi * z);
  }
  const auto& B = bernoulli_even();
  cplx acc = 0.0;
  while (z.real() < 10.0) {
    acc -= 1.0 / z;
    z += 1.0;
  }
  cplx r = std::log(z) - 0.5 / z;
  cplx z2 = 1.0 / (z * z), p = z2;
  for (int k = 1; k <= 10; ++k) {
    r -= B[k - 1] / (2.0 * k) * p;
    p *= z2;
  }
  return r + acc;
}

// ---- modified Bessel K_nu(x), x > 0, complex order ----
//
// K_nu(x) = int_0^inf exp(-x cosh t) cosh(nu t) dt by the trapezoid rule; the
// integrand decays double-exponentially so the rule converges geometrically.

namespace detail {

inline double k_step(double x) {
  double h = 0.125;
  double hx = 0.7 / std::sqrt(x);
  return std::min(h, hx);
}

inline double k_tmax(double x, double re_nu) {
  // first t with x cosh t - |Re nu| t > 750
  double t = 0.0;
  while (x * std::cosh(t) - std::abs(re_nu) * t <= 750.0) t += 0.25;
  return t;
}

}  // namespace detail

inline cplx bessel_k(cplx nu, double x) {
  if (!(x > 0.0)) throw domain_error("bessel_k: x must be positive");
  double h = detail::k_step(x);
  double tmax = detail::k_tmax(x, nu.real());
  cplx s = 0.5 * std::exp(-x);
  for (int k = 1;; ++k) {
    double t = k * h;
    if (t > tmax) break;
    s += std::exp(-x * std::cosh(t)) * std::cosh(nu * t);
  }
  return h * s;
}

// K_{iT}(x), real.
inline double bessel_k_imag_order(double T, double x) {
  if (!(x > 0.0)) throw domain_error("bessel_k_imag_order: x must be positive");
  if (x < 1e-2 && std::abs(T) > 0.05) {
    // K_{iT}(x) = -pi Im I_{iT}(x) / sinh(pi T), I from its power series
    cplx nu(0.0, T);
    cplx term = std::pow(cplx(x / 2.0), nu) * rgamma_c(nu + 1.0);
    cplx sum = term;
    double q = x * x / 4.0;
    for (int k = 1; k < 40; ++k) {
      term *= q / (static_cast<double>(k) * (static_cast<double>(k) + nu));
      sum += term;
      if (std::abs(term) < 1e-18 * std::abs(sum)) break;
    }
    return -kPi * sum.imag() / std::sinh(kPi * T);
  }
  double h = detail::k_step(x);
  double tmax = detail::k_tmax(x, 0.0);
  double s = 0.5 * std::exp(-x);
  for (int k = 1;; ++k) {
    double t = k * h;
    if (t > tmax) break;
    s += std::exp(-x * std::cosh(t)) * std::cos(T * t);
  }
  return h * s;
}

// K_nu(n x1) for n = 1..nmax in one pass: exp(-n x1 cosh t) is the n-th power of
// exp(-x1 cosh t).
inline std::vector<cplx> bessel_k_batch(cplx nu, double x1, int nmax) {
  if (!(x1 > 0.0)) throw domain_error("bessel_k_batch: x must be positive");
  double h = detail::k_step(x1);
  double tmax = detail::k_tmax(x1, nu.real());
  int K = static_cast<int>(tmax / h) + 1;
  std::vector<double> e(K), p(K);
  std::vector<cplx> w(K);
  for (int k = 0; k < K; ++k) {
    double t = k * h;
    e[k] = std::exp(-x1 * std::cosh(t));
    p[k] = 1.0;
    w[k] = (k == 0 ? 0.5 : 1.0) * std::cosh(nu * t);
  }
  std::vector<cplx> out(nmax);
  int active = K;
  for (int n = 1; n <= nmax; ++n) {
    cplx s = 0.0;
    int last = 0;
    for (int k = 0; k < active; ++k) {
      p[k] *= e[k];
      if (p[k] == 0.0) break;
      s += w[k] * p[k];
      last = k + 1;
    }
    active = last;
    out[n - 1] = h * s;
  }
  return out;
}

}  // namespace eisenlab
