#pragma once

#include <atomic>
#include <cmath>
#include <complex>
#include <functional>
#include <thread>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>

#include "cusps.hpp"
#include "special.hpp"

namespace eisenlab {

// ---- threading ----

namespace detail {
inline std::atomic<int>& thread_setting() {
  static std::atomic<int> n{0};
  return n;
}
}  // namespace detail

inline void set_threads(int n) { detail::thread_setting() = n < 0 ? 0 : n; }

inline int thread_count() {
  int n = detail::thread_setting();
  if (n > 0) return n;
  unsigned h = std::thread::hardware_concurrency();
  return h == 0 ? 1 : static_cast<int>(h);
}

// out[i] = fn(i); work split in contiguous blocks, so every out[i] is computed the same
// way regardless of the thread count.
template <class T, class Fn>
std::vector<T> parallel_map(int n, const Fn& fn) {
  std::vector<T> out(n);
  int nt = std::min(thread_count(), std::max(n, 1));
  if (nt <= 1) {
    for (int i = 0; i < n; ++i) out[i] = fn(i);
    return out;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errs(nt);
  for (int t = 0; t < nt; ++t)
    pool.emplace_back([&, t] {
      try {
        for (int i = t; i < n; i += nt) out[i] = fn(i);
      } catch (...) {
        errs[t] = std::current_exception();
      }
    });
  for (auto& th : pool) th.join();
  for (auto& e : errs)
    if (e) std::rethrow_exception(e);
  return out;
}

// Neumaier compensated sum.
template <class T>
struct CompensatedSum {
  T sum{}, comp{};
  void add(T v) {
    T t = sum + v;
    comp += (std::abs(sum) >= std::abs(v)) ? (sum - t) + v : (v - t) + sum;
    sum = t;
  }
  T value() const { return sum + comp; }
};

// ---- test functions ----

// b(t) = exp(1 - 1/(1 - t^2)) on |t| < 1
inline double bump_profile(double t) {
  if (std::abs(t) >= 1.0) return 0.0;
  return std::exp(1.0 - 1.0 / (1.0 - t * t));
}

struct Bump {
  double x0 = 0.0, w = 0.4, y1 = 1.5, y2 = 2.5;

  double operator()(cplx z) const {
    double tx = (z.real() - x0) / w;
    double ty = (2.0 * z.imag() - y1 - y2) / (y2 - y1);
    return bump_profile(tx) * bump_profile(ty);
  }
  // closed support inside the interior of D
  bool inside_D() const {
    if (w <= 0.0 || y2 <= y1) return false;
    if (std::abs(x0) + w >= 0.5) return false;
    double xa = x0 - w, xb = x0 + w;
    double xmin = (xa <= 0.0 && xb >= 0.0) ? 0.0 : std::min(std::abs(xa), std::abs(xb));
    return y1 > 0.0 && xmin * xmin + y1 * y1 > 1.0;
  }
};

class TestFunction {
 public:
  static constexpr int kAll = -1;

  TestFunction(Bump base, i64 M, int j) : base_(base), M_(M), j_(j) {
    if (!base_.inside_D()) throw domain_error("TestFunction: bump support must lie inside D");
    if (M < 1) throw domain_error("TestFunction: level must be positive");
    if (j != kAll && (j < 0 || j >= static_cast<int>(nu_index(M))))
      throw domain_error("TestFunction: coset index out of range");
  }

  static TestFunction phi0(Bump base = {}) { return TestFunction(base, 1, kAll); }

  const Bump& base() const { return base_; }
  i64 level() const { return M_; }
  int index() const { return j_; }

  double operator()(cplx z) const {
    auto r = reduce_to_D(z);
    double v = base_(r.z);
    if (v == 0.0 || j_ == kAll) return v;
    return coset_index(r.delta.inverse(), M_) == j_ ? v : 0.0;
  }

 private:
  Bump base_;
  i64 M_;
  int j_;
};

// Coset j whose translate of D is D itself.
inline int identity_coset(i64 M) { return coset_index(GL2Z{}, M); }

// ---- quadrature ----

struct QuadratureSpec {
  int resolution = 60;  // midpoint cells per axis on a bump support
  double y_max = 1e3;   // cutoff for integrals over the whole domain
  double target_rel_error = 1e-5;

  void validate() const {
    if (resolution < 16) throw domain_error("QuadratureSpec: resolution must be at least 16");
    if (y_max < 5.0) throw domain_error("QuadratureSpec: y_max must be at least 5");
  }
};

struct QuadResult {
  cplx value = 0.0;
  double error_estimate = 0.0;
};

namespace detail {

struct Rule1D {
  std::vector<double> x, w;  // on [-1, 1]
};

template <unsigned P>
inline const Rule1D& gauss_rule() {
  static const Rule1D rule = [] {
    using Q = boost::math::quadrature::gauss<double, P>;
    Rule1D r;
    const auto& a = Q::abscissa();
    const auto& w = Q::weights();
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (a[i] == 0.0) {
        r.x.push_back(0.0);
        r.w.push_back(w[i]);
        continue;
      }
      r.x.push_back(-a[i]);
      r.w.push_back(w[i]);
      r.x.push_back(a[i]);
      r.w.push_back(w[i]);
    }
    return r;
  }();
  return rule;
}

// Midpoint grid in (x, log y) over a bump rectangle, n cells per axis.
template <class H>
cplx midpoint_bump(const H& h, const Bump& b, int n) {
  const double xa = b.x0 - b.w, xb = b.x0 + b.w;
  const double ua = std::log(b.y1), ub = std::log(b.y2);
  const double dx = (xb - xa) / n, du = (ub - ua) / n;
  auto cols = parallel_map<cplx>(n, [&](int i) {
    double x = xa + (i + 0.5) * dx;
    CompensatedSum<cplx> acc;
    for (int k = 0; k < n; ++k) {
      double y = std::exp(ua + (k + 0.5) * du);
      cplx z{x, y};
      double wgt = b(z);
      if (wgt == 0.0) continue;
      acc.add(h(z) * (wgt / y));  // dx dy / y^2 = dx du / y
    }
    return acc.value();
  });
  CompensatedSum<cplx> tot;
  for (auto& c : cols) tot.add(c);
  return tot.value() * dx * du;
}

}  // namespace detail

// int_D h(z) base(z) dmu, with the n/3 sub-grid as error estimate.
template <class H>
QuadResult integrate_on_bump(const H& h, const Bump& b, const QuadratureSpec& spec = {}) {
  spec.validate();
  int n = spec.resolution - spec.resolution % 3;
  cplx fine = detail::midpoint_bump(h, b, n);
  cplx coarse = detail::midpoint_bump(h, b, n / 3);
  return {fine, std::abs(fine - coarse)};
}

// <F, phi>_L for F invariant under Gamma_0(L), phi a test function at level M | L.
template <class F>
QuadResult pair_with_test(const F& f, i64 L, const TestFunction& phi, const QuadratureSpec& spec = {}) {
  const i64 M = phi.level();
  if (L % M != 0) throw domain_error("pair_with_test: level of phi must divide L");
  std::vector<GL2Z> reps;
  for (auto& g : coset_reps(L))
    if (phi.index() == TestFunction::kAll || coset_index(g, M) == phi.index()) reps.push_back(g);
  auto h = [&](cplx z) {
    cplx v = 0.0;
    for (auto& g : reps) v += f(g.apply(z));
    return v;
  };
  return integrate_on_bump(h, phi.base(), spec);
}

// int over the truncated domain {gamma_k z : z in D, Im z <= y_max} at level L, Gauss-Legendre
// in x and in log y on unit panels.
template <class H>
QuadResult domain_integral(const H& h, i64 L, const QuadratureSpec& spec = {}, double y_max = -1.0) {
  spec.validate();
  if (y_max < 0.0) y_max = spec.y_max;
  auto reps = coset_reps(L);
  auto run = [&](const detail::Rule1D& rx, const detail::Rule1D& ru) {
    const int nx = static_cast<int>(rx.x.size());
    auto cols = parallel_map<cplx>(nx, [&](int i) {
      double x = 0.5 * rx.x[i];
      double ylo = std::sqrt(1.0 - x * x);
      double ua = std::log(ylo), ub = std::log(y_max);
      int panels = std::max(1, static_cast<int>(std::ceil(ub - ua)));
      double hu = (ub - ua) / panels;
      CompensatedSum<cplx> acc;
      for (int p = 0; p < panels; ++p)
        for (std::size_t k = 0; k < ru.x.size(); ++k) {
          double u = ua + hu * (p + 0.5 + 0.5 * ru.x[k]);
          double y = std::exp(u);
          cplx z{x, y};
          cplx v = 0.0;
          for (auto& g : reps) v += h(g.apply(z));
          acc.add(v * (ru.w[k] * 0.5 * hu / y));
        }
      return acc.value() * (0.5 * rx.w[i]);
    });
    CompensatedSum<cplx> tot;
    for (auto& c : cols) tot.add(c);
    return tot.value();
  };
  cplx fine = run(detail::gauss_rule<40>(), detail::gauss_rule<30>());
  cplx coarse = run(detail::gauss_rule<30>(), detail::gauss_rule<20>());
  return {fine, std::abs(fine - coarse)};
}

// <f, g>_L over the truncated domain.
template <class F, class G>
QuadResult inner_product(const F& f, const G& g, i64 L, const QuadratureSpec& spec = {}) {
  return domain_integral([&](cplx z) { return cplx(f(z)) * std::conj(cplx(g(z))); }, L, spec);
}

inline double volume(i64 M) { return static_cast<double>(nu_index(M)) * kPi / 3.0; }

// ---- Ford strip and the portion set ----

inline bool ford_membership(cplx z, i64 M) {
  double t = z.imag() * static_cast<double>(M);
  return t > 1.0 && t <= 20000.0;
}

struct PortionSet {
  i64 M = 0;
  std::vector<std::pair<i64, i64>> pairs;
  std::size_t count = 0;
  std::size_t brute_count = 0;
  double density = 0.0;        // count / M
  double predicted_density = 0.0;
  std::size_t samples_checked = 0;
  std::size_t samples_outside = 0;
  bool distinct = true;
  double min_im = 0.0, max_im = 0.0;  // of the image samples, times M
};

// 50 points on the boundary of D^c(100): the arc, the two sides and the top edge.
inline std::vector<cplx> dc_boundary_samples(int n = 50) {
  std::vector<cplx> pts;
  const double ytop = 100.0, yc = std::sqrt(3.0) / 2.0;
  int na = n / 5, ns = (3 * n) / 5, nt = n - na - 2 * (ns / 2);
  for (int i = 0; i < na; ++i) {
    double th = kPi / 3.0 + (kPi / 3.0) * (i + 0.5) / na;
    pts.push_back(std::polar(1.0, th));
  }
  for (int i = 0; i < ns / 2; ++i) {
    double y = yc + (ytop - yc) * i / (ns / 2 - 1);
    pts.push_back({-0.5, y});
    pts.push_back({0.5, y});
  }
  for (int i = 0; i < nt; ++i) pts.push_back({-0.5 + (i + 0.5) / nt, ytop});
  return pts;
}

inline PortionSet portion_set(i64 M) {
  if (M < 1) throw domain_error("portion_set: M must be positive");
  PortionSet r;
  r.M = M;
  // sqrt(M)/100 <= c <= sqrt(M)/20, 0 <= 4 d <= c, (c, d) = 1
  auto in_c = [M](i64 c) { return 10000 * c * c >= M && 400 * c * c <= M; };
  i64 c = 1;
  while (!in_c(c) && 400 * c * c <= M) ++c;
  for (; in_c(c); ++c)
    for (i64 d = 0; 4 * d <= c; ++d)
      if (gcd(c, d) == 1) r.pairs.push_back({c, d});
  r.count = r.pairs.size();

  const double sm = std::sqrt(static_cast<double>(M));
  i64 cmax = static_cast<i64>(sm) + 2;
  for (i64 cc = 0; cc <= cmax; ++cc)
    for (i64 d = 0; d <= cmax; ++d) {
      double cd = static_cast<double>(cc);
      if (cd < sm / 100.0 - 1e-12 || cd > sm / 20.0 + 1e-12) continue;
      if (4.0 * d > cd) continue;
      if (gcd(cc, d) != 1) continue;
      ++r.brute_count;
    }

  r.density = static_cast<double>(r.count) / static_cast<double>(M);
  r.predicted_density = 6.0 / (kPi * kPi) / 8.0 * (1.0 / 400.0 - 1.0 / 1e4);

  auto samples = dc_boundary_samples();
  r.min_im = 1e300;
  r.max_im = 0.0;
  for (auto& [cc, d] : r.pairs) {
    i64 x, y;
    ext_gcd(d, cc, x, y);  // d x + c y = 1 -> (x, -y; c, d)
    GL2Z g{x, -y, cc, d};
    for (auto& z : samples) {
      double im = g.im_apply(z);
      ++r.samples_checked;
      if (!ford_membership({0.0, im}, M)) ++r.samples_outside;
      r.min_im = std::min(r.min_im, im * M);
      r.max_im = std::max(r.max_im, im * M);
    }
  }
  for (std::size_t i = 0; i < r.pairs.size() && r.distinct; ++i)
    for (std::size_t k = i + 1; k < r.pairs.size(); ++k) {
      auto [c1, d1] = r.pairs[i];
      auto [c2, d2] = r.pairs[k];
      if (mod(c1 * d2 - c2 * d1, M) == 0) {
        r.distinct = false;
        break;
      }
    }
  return r;
}

}  // namespace eisenlab
