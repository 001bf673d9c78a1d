// eisenlab: command-line front end for the eisenlab headers.
#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <iostream>

#include "eisenlab/report.hpp"

using namespace eisenlab;
using report::json;

namespace {

struct usage_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Common {
  std::string format = "json";
  double tol = 0.0;
  int threads = 0;
  std::string output;
};

QuadratureSpec quad_spec(const Common& c) {
  QuadratureSpec q;
  if (c.tol > 0.0) {
    q.target_rel_error = c.tol;
    // midpoint error ~ h^2
    if (c.tol < 1e-5) q.resolution = static_cast<int>(std::ceil(q.resolution * std::sqrt(1e-5 / c.tol)));
  }
  return q;
}

json common_flags(const Common& c) {
  return {{"format", c.format}, {"tol", c.tol}, {"threads", c.threads}};
}

void emit(const Common& c, const std::string& command, const std::string& anchor, json flags, const json& body) {
  std::string text;
  if (c.format == "csv") {
    text = report::to_csv(body);
  } else {
    json out = report::header(command, anchor, flags);
    out["result"] = body;
    text = report::dump(out);
  }
  if (c.output.empty()) {
    std::cout << text;
  } else {
    std::ofstream f(c.output, std::ios::binary);
    if (!f) throw usage_error("cannot open output file " + c.output);
    f << text;
  }
}

void require_divides(i64 M, i64 N) {
  if (M < 1 || N < 1 || N % M != 0) throw usage_error("M must divide N");
}

void require_T(double T) {
  if (T == 0.0) throw usage_error("T must be nonzero");
}

RegKernel make_kernel(i64 N, const DirichletCharacter& chi, double T, const std::string& cusp) {
  if (cusp.empty()) return build_kernel(N, chi, T);
  return build_kernel_al(report::parse_cusp(N, cusp), chi, T);
}

int parse_coset(const std::string& s, i64 M) {
  if (s == "all") return TestFunction::kAll;
  std::size_t pos = 0;
  int j = std::stoi(s, &pos);
  if (pos != s.size() || j < 0 || j >= nu_index(M)) throw usage_error("coset must be 'all' or an index below nu(M)");
  return j;
}

json error_object(const std::string& kind, const std::string& what) {
  return {{"schema", report::kSchema}, {"error", {{"kind", kind}, {"message", what}}}};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"eisenlab: Eisenstein series, scattering data and regularized kernels for Gamma_0(N)"};
  app.require_subcommand(1);
  app.fallthrough();
  Common c;
  app.add_option("--format", c.format, "output format")->check(CLI::IsMember({"json", "csv"}));
  app.add_option("--tol", c.tol, "target relative quadrature error")->check(CLI::PositiveNumber);
  app.add_option("--threads", c.threads, "worker threads, 0 = hardware")->check(CLI::NonNegativeNumber);
  app.add_option("-o,--output", c.output, "write the report to a file instead of stdout");

  i64 N = 1, M = 1, lo = 1, hi = 12;
  double T = 1.0, x = 0.0, y = 1.0, sre = 2.0, sim = 0.0;
  std::string chi_sel = "trivial", cusp, coset = "all", series = "cusp";
  bool with_alpha = false;

  auto* cusps = app.add_subcommand("cusps", "cusps of Gamma_0(N) with widths");
  cusps->add_option("N", N)->required()->check(CLI::PositiveNumber);

  auto* scat = app.add_subcommand("scattering", "scattering row phi_{inf a}(1/2+iT, chi)");
  scat->add_option("N", N)->required()->check(CLI::PositiveNumber);
  scat->add_option("--chi", chi_sel, "trivial | primitive[:k] | conductor:q[:k] | index:k");
  scat->add_option("-T", T, "spectral parameter");

  auto* eval = app.add_subcommand("eval", "evaluate E_a(z, s, chi) or the Kronecker limit function");
  eval->add_option("N", N)->required()->check(CLI::PositiveNumber);
  eval->add_option("--series", series, "cusp | kronecker")->check(CLI::IsMember({"cusp", "kronecker"}));
  eval->add_option("--cusp", cusp, "cusp u/f (default infinity)");
  eval->add_option("--chi", chi_sel, "character selector");
  eval->add_option("-x", x, "Re z");
  eval->add_option("-y", y, "Im z")->check(CLI::PositiveNumber);
  eval->add_option("--s-re", sre, "Re s");
  eval->add_option("--s-im", sim, "Im s");

  auto* kern = app.add_subcommand("kernel", "traced regularizing kernel at level M");
  kern->add_option("N", N)->required()->check(CLI::PositiveNumber);
  kern->add_option("M", M)->required()->check(CLI::PositiveNumber);
  kern->add_option("--chi", chi_sel, "character selector");
  kern->add_option("-T", T, "spectral parameter");
  kern->add_option("--cusp", cusp, "Atkin-Lehner source cusp u/f (primitive chi)");
  kern->add_flag("--alpha", with_alpha, "also compute alpha_phi per coset");

  auto* que = app.add_subcommand("que", "<|E|^2, phi> against the main term and alpha_phi");
  que->add_option("N", N)->required()->check(CLI::PositiveNumber);
  que->add_option("M", M)->required()->check(CLI::PositiveNumber);
  que->add_option("--chi", chi_sel, "character selector");
  que->add_option("-T", T, "spectral parameter");
  que->add_option("--coset", coset, "coset index j or 'all'");
  que->add_option("--cusp", cusp, "Atkin-Lehner source cusp u/f (primitive chi)");

  auto* portion = app.add_subcommand("portion", "portion set of cosets in the strip B_M");
  portion->add_option("M", M)->required()->check(CLI::PositiveNumber);

  auto* suite = app.add_subcommand("suite", "per-level identity checks over a range of levels");
  suite->add_option("lo", lo)->required()->check(CLI::PositiveNumber);
  suite->add_option("hi", hi)->required()->check(CLI::PositiveNumber);
  suite->add_option("-T", T, "spectral parameter");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    set_threads(c.threads);
    json flags = common_flags(c);
    auto spec = quad_spec(c);
    if (*cusps) {
      flags["N"] = N;
      emit(c, "cusps", "cusps u/f, f | N, u mod (f, N/f); width N/(N, f^2)", flags, report::cusps_body(N));
    } else if (*scat) {
      require_T(T);
      flags["N"] = N;
      flags["chi"] = chi_sel;
      flags["T"] = T;
      emit(c, "scattering", "sum_a |phi_{inf a}(1/2+iT, chi)|^2 = 1", flags,
           report::scattering_body(N, report::select_character(N, chi_sel), T));
    } else if (*eval) {
      flags["N"] = N;
      flags["series"] = series;
      flags["x"] = x;
      flags["y"] = y;
      cplx z{x, y};
      json body{{"N", N}, {"z", report::complex_json(z)}};
      if (series == "kronecker") {
        body["value"] = eval_level1_G(z);
        emit(c, "eval", "G(z) = lim_{s->1} (E(z,s) - (3/pi)/(s-1))", flags, body);
      } else {
        flags["cusp"] = cusp.empty() ? "infinity" : cusp;
        flags["chi"] = chi_sel;
        flags["s"] = json::array({sre, sim});
        auto chi = report::select_character(N, chi_sel);
        Cusp a = cusp.empty() ? infinity_cusp(N) : report::parse_cusp(N, cusp);
        CuspEisenstein E(a, chi, {sre, sim});
        body["cusp"] = report::cusp_json(a);
        body["s"] = report::complex_json({sre, sim});
        body["value"] = report::complex_json(E(z));
        emit(c, "eval", "E_a(z,s,chi) = sum over Gamma_a \\ Gamma_0(N) of conj chi(gamma) Im(sigma_a^{-1} gamma z)^s",
             flags, body);
      }
    } else if (*kern) {
      require_divides(M, N);
      require_T(T);
      flags["N"] = N;
      flags["M"] = M;
      flags["chi"] = chi_sel;
      flags["T"] = T;
      flags["cusp"] = cusp;
      flags["alpha"] = with_alpha;
      auto K = make_kernel(N, report::select_character(N, chi_sel), T, cusp);
      emit(c, "kernel",
           "Tr^N_M E = c0 + sum_{g|M} c_g G|_g + sum_{g|M} c_g' E(., 1+2iT)|_g; "
           "c0 ~ log N^2/(M(M,N/q)) + 4 Re L'/L(1+2iT, conj psi)",
           flags, report::kernel_body(K, M, with_alpha, spec));
    } else if (*que) {
      require_divides(M, N);
      require_T(T);
      flags["N"] = N;
      flags["M"] = M;
      flags["chi"] = chi_sel;
      flags["T"] = T;
      flags["coset"] = coset;
      flags["cusp"] = cusp;
      int j = parse_coset(coset, M);
      auto K = make_kernel(N, report::select_character(N, chi_sel), T, cusp);
      emit(c, "que", "<|E|^2, phi>_N = c0 <1, phi>_M + alpha_phi + <|E|^2 - E_reg, phi>_N", flags,
           report::que_body(K, M, j, spec));
    } else if (*portion) {
      flags["M"] = M;
      emit(c, "portion", "gamma(D^c(100)) inside {1/M < y <= 20000/M}, sqrt(M)/100 <= c <= sqrt(M)/20", flags,
           report::portion_body(M));
    } else if (*suite) {
      if (hi < lo) throw usage_error("hi must be at least lo");
      require_T(T);
      flags["lo"] = lo;
      flags["hi"] = hi;
      flags["T"] = T;
      auto body = report::suite_body(lo, hi, T);
      emit(c, "suite", "unitarity, weighted-log identity, pole and eta cancellation per level", flags, body);
      return body["pass"].get<bool>() ? 0 : 1;
    }
  } catch (const usage_error& e) {
    std::cout << report::dump(error_object("usage", e.what()));
    std::cerr << "eisenlab: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cout << report::dump(error_object("usage", e.what()));
    std::cerr << "eisenlab: bad number: " << e.what() << "\n";
    return 2;
  } catch (const pole_error& e) {
    std::cout << report::dump(error_object("pole", e.what()));
    std::cerr << "eisenlab: " << e.what() << "\n";
    return 3;
  } catch (const accuracy_error& e) {
    std::cout << report::dump(error_object("accuracy", e.what()));
    std::cerr << "eisenlab: " << e.what() << "\n";
    return 3;
  } catch (const domain_error& e) {
    std::cout << report::dump(error_object("domain", e.what()));
    std::cerr << "eisenlab: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
