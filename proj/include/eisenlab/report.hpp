#pragma once

#include <json.hpp>

#include <sstream>
#include <string>
#include <vector>

#include "reg.hpp"

namespace eisenlab::report {

using json = nlohmann::ordered_json;

inline constexpr const char* kSchema = "eisenlab/1";

inline json complex_json(cplx z) { return json::array({z.real(), z.imag()}); }

inline json character_json(const DirichletCharacter& chi) {
  return {{"modulus", chi.modulus()},
          {"conductor", chi.conductor()},
          {"parity", chi.is_even() ? "even" : "odd"},
          {"exponents", chi.exponents()}};
}

inline json cusp_json(const Cusp& a) {
  return {{"cusp", std::to_string(a.u) + "/" + std::to_string(a.f)}, {"u", a.u}, {"f", a.f}, {"width", a.width()}};
}

// Character selector: trivial | primitive[:k] | conductor:q[:k] | index:k (into even characters mod N).
inline DirichletCharacter select_character(i64 N, const std::string& sel) {
  auto parts = [&] {
    std::vector<std::string> v;
    std::stringstream ss(sel);
    for (std::string t; std::getline(ss, t, ':');) v.push_back(t);
    return v;
  }();
  if (parts.empty()) throw domain_error("empty character selector");
  auto num = [&](std::size_t i, i64 def) -> i64 {
    if (i >= parts.size()) return def;
    std::size_t pos = 0;
    i64 v = std::stoll(parts[i], &pos);
    if (pos != parts[i].size()) throw domain_error("bad number in character selector: " + parts[i]);
    return v;
  };
  const std::string& kind = parts[0];
  auto evens = even_characters(N);
  auto pick = [&](i64 q, i64 k) {
    for (auto& c : evens)
      if (c.conductor() == q && k-- == 0) return c;
    throw domain_error("no even character mod " + std::to_string(N) + " of conductor " + std::to_string(q) +
                       " at that index");
  };
  if (kind == "trivial") return DirichletCharacter::trivial(N);
  if (kind == "primitive") return pick(N, num(1, 0));
  if (kind == "conductor") return pick(num(1, 1), num(2, 0));
  if (kind == "index") {
    i64 k = num(1, 0);
    if (k < 0 || k >= static_cast<i64>(evens.size())) throw domain_error("character index out of range");
    return evens[k];
  }
  throw domain_error("unknown character selector: " + sel);
}

inline Cusp parse_cusp(i64 N, const std::string& s) {
  auto slash = s.find('/');
  if (slash == std::string::npos) throw domain_error("cusp must be written u/f");
  i64 u = std::stoll(s.substr(0, slash)), f = std::stoll(s.substr(slash + 1));
  return reduce(P1Q{u, f}, N);
}

inline json header(const std::string& command, const std::string& anchor, const json& flags) {
  return {{"schema", kSchema}, {"command", command}, {"anchor", anchor}, {"flags", flags}};
}

// ---- individual reports, without header ----

inline json cusps_body(i64 N) {
  json rows = json::array();
  auto triv = DirichletCharacter::trivial(N);
  for (auto& a : cusp_set(N)) {
    json r = cusp_json(a);
    r["gcd_f"] = a.gcd_f();
    r["atkin_lehner"] = is_atkin_lehner(a);
    r["singular_trivial"] = is_singular(a, triv);
    rows.push_back(r);
  }
  return {{"N", N}, {"count", rows.size()}, {"rows", rows}};
}

inline json scattering_body(i64 N, const DirichletCharacter& chi, double T) {
  auto row = phi_infinity_row(N, chi, {0.5, T});
  json rows = json::array();
  for (std::size_t i = 0; i < row.cusps.size(); ++i) {
    json r = cusp_json(row.cusps[i]);
    r["phi_re"] = row.entries[i].real();
    r["phi_im"] = row.entries[i].imag();
    r["abs2"] = std::norm(row.entries[i]);
    rows.push_back(r);
  }
  return {{"N", N}, {"character", character_json(chi)}, {"T", T},
          {"unitarity_residual", row.unitarity_residual()}, {"rows", rows}};
}

inline json kernel_body(const RegKernel& K, i64 M, bool with_alpha, const QuadratureSpec& spec) {
  auto tf = traced_kernel(K, M);
  json j;
  j["N"] = K.N;
  j["M"] = M;
  j["q"] = K.chi.conductor();
  j["T"] = K.T;
  j["character"] = character_json(K.chi);
  j["kind"] = K.kind == RegKernel::Kind::Infinity ? "infinity" : "atkin_lehner";
  j["source"] = cusp_json(K.source);
  json terms = json::array();
  for (auto& t : K.terms)
    terms.push_back({{"cusp", cusp_json(t.cusp)}, {"eps", t.eps}, {"w0", complex_json(t.w0)}, {"w1", complex_json(t.w1)}});
  j["terms"] = terms;
  j["c0_exact"] = tf.c0.real();
  if (std::isnan(tf.c0_display)) {
    j["c0_paper_form"] = nullptr;
    j["discrepancy"] = nullptr;
  } else {
    j["c0_paper_form"] = tf.c0_display;
    j["discrepancy"] = tf.discrepancy();
  }
  json cg = json::array();
  for (auto& [g, c] : tf.cg) cg.push_back({{"g", g}, {"c_g", c}});
  j["rows"] = cg;
  json cgp = json::array();
  for (auto& [g, c] : tf.cg_prime) cgp.push_back({{"g", g}, {"c_g_prime", complex_json(c)}});
  j["cg_prime"] = cgp;
  j["pole_residual"] = tf.pole_residual;
  j["eta_residual"] = tf.eta_residual;
  j["log23_ratio"] = tf.log23_ratio();
  if (with_alpha) {
    json alphas = json::array();
    double total = 0.0;
    for (int c = 0; c < static_cast<int>(nu_index(M)); ++c) {
      auto a = alpha_phi(tf, TestFunction(Bump{}, M, c), spec);
      total += a.value;
      alphas.push_back({{"coset", c}, {"alpha", a.value}, {"main", a.main}, {"quad_error", a.quad_error}});
    }
    j["alpha_per_coset"] = alphas;
    j["alpha_sum"] = total;
    if (K.chi.is_primitive() && K.N > 1 && M > 1 && is_prime(M) && tf.cg_prime.empty()) {
      auto cs = consistency_sum(tf, Bump{}, K.chi.conductor(), spec);
      j["consistency"] = {{"route_a", cs.route_a},
                          {"route_b", cs.route_b},
                          {"predicted", cs.predicted},
                          {"g_coefficient", cs.g_coefficient},
                          {"log_coefficient_ratio", cs.log_coefficient_ratio}};
    }
  }
  return j;
}

inline json que_body(const RegKernel& K, i64 M, int coset, const QuadratureSpec& spec) {
  auto tf = traced_kernel(K, M);
  TestFunction phi(Bump{}, M, coset);
  auto E = K.series();
  auto lhs = pair_with_test([&E](cplx z) { return cplx(std::norm(E(z))); }, K.N, phi, spec);
  auto a = alpha_phi(tf, phi, spec);
  double residual = lhs.value.real() - a.main - a.value;
  return {{"N", K.N},
          {"M", M},
          {"T", K.T},
          {"character", character_json(K.chi)},
          {"coset", coset == TestFunction::kAll ? json("all") : json(coset)},
          {"lhs", lhs.value.real()},
          {"lhs_quad_error", lhs.error_estimate},
          {"main", a.main},
          {"alpha", a.value},
          {"mass", a.mass},
          {"residual", residual}};
}

inline json portion_body(i64 M) {
  auto p = portion_set(M);
  return {{"M", p.M},
          {"count", p.count},
          {"brute_count", p.brute_count},
          {"density", p.density},
          {"predicted_density", p.predicted_density},
          {"samples_checked", p.samples_checked},
          {"samples_outside", p.samples_outside},
          {"distinct", p.distinct},
          {"min_im_times_M", p.min_im},
          {"max_im_times_M", p.max_im}};
}

// Quick per-level checks over a range of levels.
inline json suite_body(i64 lo, i64 hi, double T) {
  json rows = json::array();
  bool all = true;
  for (i64 N = lo; N <= hi; ++N) {
    double unit = 0.0, wlog = 0.0, pole = 0.0, eta = 0.0;
    for (auto& chi : even_characters(N)) {
      unit = std::max(unit, phi_infinity_row(N, chi, {0.5, T}).unitarity_residual());
      wlog = std::max(wlog, hard_sums(N, chi, T).identity_residual());
      auto K = build_kernel(N, chi, T);
      for (i64 M : divisors(N)) {
        auto tf = traced_kernel(K, M);
        pole = std::max(pole, tf.pole_residual);
        eta = std::max(eta, tf.eta_residual);
      }
    }
    bool ok = unit <= 1e-9 && wlog <= 1e-9 && pole <= 1e-10 && eta <= 1e-10;
    all = all && ok;
    rows.push_back({{"N", N}, {"unitarity", unit}, {"weighted_log", wlog}, {"pole", pole}, {"eta", eta}, {"pass", ok}});
  }
  return {{"levels", json::array({lo, hi})}, {"T", T}, {"pass", all}, {"rows", rows}};
}

// ---- output ----

inline std::string dump(const json& j) { return j.dump(2) + "\n"; }

namespace detail {
inline std::string csv_cell(const json& v) {
  std::string raw = v.is_string() ? v.get<std::string>() : v.dump();
  std::string out;
  for (char c : raw) {
    if (c == '"') out += '"';
    out += c;
  }
  return out;
}
inline void flatten(const json& v, const std::string& prefix, std::vector<std::pair<std::string, std::string>>& out) {
  if (v.is_object() && !v.empty()) {
    for (auto it = v.begin(); it != v.end(); ++it) flatten(it.value(), prefix.empty() ? it.key() : prefix + "." + it.key(), out);
  } else {
    out.push_back({prefix, csv_cell(v)});
  }
}
}  // namespace detail

// CSV: the "rows" table if the body has one, otherwise key,value lines.
inline std::string to_csv(const json& body) {
  std::ostringstream os;
  if (body.contains("rows") && body["rows"].is_array() && !body["rows"].empty()) {
    std::vector<std::string> cols;
    std::vector<std::pair<std::string, std::string>> first;
    detail::flatten(body["rows"][0], "", first);
    for (auto& [k, v] : first) cols.push_back(k);
    for (std::size_t i = 0; i < cols.size(); ++i) os << (i ? "," : "") << cols[i];
    os << "\n";
    for (auto& r : body["rows"]) {
      std::vector<std::pair<std::string, std::string>> cells;
      detail::flatten(r, "", cells);
      for (std::size_t i = 0; i < cells.size(); ++i) os << (i ? "," : "") << '"' << cells[i].second << '"';
      os << "\n";
    }
    return os.str();
  }
  std::vector<std::pair<std::string, std::string>> kv;
  detail::flatten(body, "", kv);
  os << "key,value\n";
  for (auto& [k, v] : kv) os << k << ",\"" << v << "\"\n";
  return os.str();
}

}  // namespace eisenlab::report
