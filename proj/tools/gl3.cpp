// gl3: command-line front end.
//
//   gl3 [global flags] <command> [command flags]
//
// Global flags: --tol, --threads, --seed, --json | --csv, --out FILE,
// --coeff-table FILE, --budget-panels N, --config FILE.
//
// A config file is a JSON object with keys command, params, format, tol,
// threads, seed, out, coeff_table, budget_panels (a `records` key, as found
// in a report, is ignored).  `params` holds command
// flags by long name; every JSON report echoes the full `params` block, so
// feeding a report back as a config reproduces it.  Flags given on the
// command line win over the config file.
//
// Exit codes: 0 success, 1 suite or computation failure, 2 configuration
// error.
//
// CSV columns (header always written):
//   kloosterman   variant,n1,n2,m1,m2,D1,D2,value_re,value_im,exact_zero,exact_integer,terms,error_estimate
//   coeffs        m,n,value_re,value_im,error_estimate
//   testfn        t1,t2,h_re,h_im,spec_re,spec_im,error_estimate   (or weyl_integral,...)
//   kernel        which,y1,y2,t1,t2,sigma,value_re,value_im,error_estimate,panels
//   phi           y,T,M,value_re,value_im,error_estimate,panels     (w6: y1,y2,...)
//   weights       which,y,t1,t2,sigma,value_re,value_im,error_estimate,panels
//   mollifier     l,L,x,contour,deviation,error_estimate
//   trace-term    moment,term,value_re,value_im,error_estimate,panels,tuples,ratio_T3M2
//   verify        id,suite,pass,count,failures,max_deviation,seconds,detail
//   quad-selftest name,value_re,value_im,expected_re,expected_im,deviation,error_estimate,pass

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "gl3/eisenstein.hpp"
#include "gl3/kernels.hpp"
#include "gl3/kloosterman.hpp"
#include "gl3/moments.hpp"
#include "gl3/trace_terms.hpp"
#include "gl3/verify.hpp"

using json = nlohmann::ordered_json;
using namespace gl3;

namespace {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Globals {
  double tol = 1e-8;
  int threads = 1;
  std::uint64_t seed = 1;
  bool csv = false, json_flag = false;
  std::string out;
  std::vector<std::string> coeff_tables;
  long budget_panels = 0;
  std::string config;
};

json cval(cplx z) { return json::array({z.real(), z.imag()}); }

// Flattens [re, im] pairs into name_re, name_im.
void write_csv(std::ostream& os, const std::vector<json>& recs) {
  if (recs.empty()) return;
  auto cell = [](const json& v) {
    if (v.is_string()) {
      std::string s = v.get<std::string>();
      if (s.find_first_of(",\"\n") == std::string::npos) return s;
      std::string q = "\"";
      for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
      return q + "\"";
    }
    if (v.is_null()) return std::string();
    return v.dump();
  };
  bool first = true;
  for (auto& [k, v] : recs[0].items()) {
    if (v.is_array() && v.size() == 2)
      os << (first ? "" : ",") << k << "_re," << k << "_im";
    else
      os << (first ? "" : ",") << k;
    first = false;
  }
  os << "\n";
  for (auto& r : recs) {
    first = true;
    for (auto& [k, v] : r.items()) {
      if (v.is_array() && v.size() == 2)
        os << (first ? "" : ",") << cell(v[0]) << "," << cell(v[1]);
      else
        os << (first ? "" : ",") << cell(v);
      first = false;
    }
    os << "\n";
  }
}

// Every option of a subcommand with its value (given or default), by long name.
json params_block(const CLI::App* sub) {
  json p = json::object();
  for (const CLI::Option* o : sub->get_options()) {
    if (o->get_lnames().empty() || o->get_lnames()[0] == "help") continue;
    const std::string& name = o->get_lnames()[0];
    if (o->get_type_size() == 0) {
      p[name] = o->count() > 0;
      continue;
    }
    if (o->count() > 0) {
      const auto& res = o->results();
      if (o->get_expected_max() > 1) {
        json a = json::array();
        for (auto& r : res) a.push_back(r);
        p[name] = a;
      } else {
        p[name] = res.back();
      }
    } else if (!o->get_default_str().empty()) {
      p[name] = o->get_default_str();
    }
  }
  return p;
}

std::string token(const json& v) { return v.is_string() ? v.get<std::string>() : v.dump(); }

bool truthy(const json& v) {
  if (v.is_boolean()) return v.get<bool>();
  if (v.is_string()) return v == "true" || v == "1";
  if (v.is_number()) return v.get<double>() != 0.0;
  return false;
}

bool given(const std::vector<std::string>& argv, const std::string& flag) {
  for (auto& a : argv)
    if (a == flag || a.rfind(flag + "=", 0) == 0) return true;
  return false;
}

// Appends config-file values for flags not given on the command line.
void merge_config(const std::string& path, std::vector<std::string>& argv, CLI::App& app) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config: expected a JSON object");
  static const std::map<std::string, std::string> globals{{"tol", "--tol"},     {"threads", "--threads"},
                                                          {"seed", "--seed"},   {"out", "--out"},
                                                          {"budget_panels", "--budget-panels"}};
  std::vector<std::string> extra;
  std::string command;
  CLI::App* sub = nullptr;
  for (auto* s : app.get_subcommands([](CLI::App*) { return true; }))
    for (auto& a : argv)
      if (a == s->get_name()) sub = s;
  for (auto& [k, v] : j.items()) {
    if (k == "command") {
      if (!v.is_string()) throw ConfigError("config: command must be a string");
      command = v.get<std::string>();
    } else if (k == "format") {
      if (v != "json" && v != "csv") throw ConfigError("config: format must be json or csv");
      if (!given(argv, "--json") && !given(argv, "--csv")) extra.push_back("--" + v.get<std::string>());
    } else if (k == "coeff_table") {
      if (!given(argv, "--coeff-table"))
        for (auto& t : v.is_array() ? v : json::array({v})) extra.insert(extra.end(), {"--coeff-table", token(t)});
    } else if (k == "params" || k == "records") {
      // params: below, once the command is known; records: output of an earlier run
    } else if (auto g = globals.find(k); g != globals.end()) {
      if (!given(argv, g->second)) extra.insert(extra.end(), {g->second, token(v)});
    } else {
      throw ConfigError("config: unknown key '" + k + "'");
    }
  }
  if (!sub) {
    if (command.empty()) throw ConfigError("config: no command given");
    try {
      sub = app.get_subcommand(command);
    } catch (const CLI::OptionNotFound&) {
      throw ConfigError("config: unknown command '" + command + "'");
    }
    argv.push_back(command);
  } else if (!command.empty() && command != sub->get_name()) {
    throw ConfigError("config: command '" + command + "' conflicts with '" + sub->get_name() + "'");
  }
  if (j.contains("params")) {
    if (!j["params"].is_object()) throw ConfigError("config: params must be an object");
    for (auto& [k, v] : j["params"].items()) {
      const CLI::Option* o = nullptr;
      for (const CLI::Option* x : sub->get_options())
        if (!x->get_lnames().empty() && x->get_lnames()[0] == k) o = x;
      if (!o || k == "help") throw ConfigError("config: unknown parameter '" + k + "' for " + sub->get_name());
      std::string flag = "--" + k;
      if (given(argv, flag)) continue;
      if (o->get_type_size() == 0) {
        if (truthy(v)) extra.push_back(flag);
        continue;
      }
      extra.push_back(flag);
      for (auto& t : v.is_array() ? v : json::array({v})) extra.push_back(token(t));
    }
  }
  argv.insert(argv.end(), extra.begin(), extra.end());
}

std::vector<double> parse_grid(const std::string& g) {
  // log:a:b:n or lin:a:b:n
  std::vector<std::string> parts;
  std::stringstream ss(g);
  for (std::string s; std::getline(ss, s, ':');) parts.push_back(s);
  if (parts.size() != 4 || (parts[0] != "log" && parts[0] != "lin"))
    throw std::invalid_argument("grid must be log:a:b:n or lin:a:b:n");
  double a = std::stod(parts[1]), b = std::stod(parts[2]);
  int n = std::stoi(parts[3]);
  if (n < 1) throw std::invalid_argument("grid needs n >= 1");
  if (parts[0] == "log" && (a <= 0.0 || b <= 0.0)) throw std::invalid_argument("log grid needs positive ends");
  std::vector<double> v;
  for (int i = 0; i < n; ++i) {
    double t = n == 1 ? 0.0 : double(i) / (n - 1);
    v.push_back(parts[0] == "log" ? a * std::pow(b / a, t) : a + (b - a) * t);
  }
  return v;
}

struct TestOpts {
  double T = 16.0, theta = 0.7, M = 0.0, a = 3.0, b = 1.0;
  int poly_order = 4;
  void add(CLI::App* s) {
    s->add_option("--T", T, "spectral scale");
    s->add_option("--theta", theta, "M = T^theta");
    s->add_option("--M", M, "window (0: T^theta)");
    s->add_option("--a", a, "mu0 direction, first entry");
    s->add_option("--b", b, "mu0 direction, second entry");
    s->add_option("--poly-order", poly_order, "order A of the polynomial factor");
  }
  TestFunctionParams make() const {
    auto p = TestFunctionParams::make(T, theta, a, b, poly_order);
    p.M = M;
    p.validate();
    return p;
  }
};

std::vector<CoefficientSource> load_sources(const Globals& g) {
  std::vector<CoefficientSource> v;
  for (auto& f : g.coeff_tables) v.push_back(CoefficientSource::from_file(f));
  return v;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"GL(3) Kuznetsov geometric-side toolkit"};
  app.option_defaults()->always_capture_default();
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--tol", g.tol, "relative tolerance");
  app.add_option("--threads", g.threads, "worker threads")->check(CLI::PositiveNumber);
  app.add_option("--seed", g.seed, "seed for synthetic sources and random batteries");
  auto* fj = app.add_flag("--json", g.json_flag, "JSON output (default)");
  auto* fc = app.add_flag("--csv", g.csv, "CSV output");
  fj->excludes(fc);
  app.add_option("--out", g.out, "output file (default stdout)");
  app.add_option("--coeff-table", g.coeff_tables, "GL(2) coefficient table (repeatable)")->check(CLI::ExistingFile);
  app.add_option("--budget-panels", g.budget_panels, "panel budget per contour integral")->check(CLI::NonNegativeNumber);
  app.add_option("--config", g.config, "JSON config file");

  // kloosterman
  auto* k = app.add_subcommand("kloosterman", "GL(3) Kloosterman sums, exact");
  std::string k_variant = "tilde", k_policy = "unit-first";
  i64 kn1 = 1, kn2 = 1, km1 = 1, km2 = 1, kD1 = 1, kD2 = 1;
  bool k_naive = false;
  k->add_option("--variant", k_variant, "tilde | long")->check(CLI::IsMember({"tilde", "long"}));
  k->add_option("--n1", kn1);
  k->add_option("--n2", kn2);
  k->add_option("--m1", km1);
  k->add_option("--m2", km2);
  k->add_option("--D1", kD1)->check(CLI::PositiveNumber);
  k->add_option("--D2", kD2)->check(CLI::PositiveNumber);
  k->add_option("--policy", k_policy, "(Y,Z) choice for the long sum")
      ->check(CLI::IsMember({"unit-first", "extended-gcd", "search"}));
  k->add_flag("--naive", k_naive, "also report the naive loop value");

  // coeffs
  auto* c = app.add_subcommand("coeffs", "Eisenstein Fourier coefficients");
  std::string c_kind = "minimal";
  double ct1 = 1.0, ct2 = 2.0, c_mu = 1.0, c_mu_g = 0.0;
  i64 c_mmax = 10, c_nmax = 1, c_synth = 0;
  c->add_option("--kind", c_kind, "minimal | maximal")->check(CLI::IsMember({"minimal", "maximal"}));
  c->add_option("--t1", ct1, "minimal: mu = i(t1, t2, -t1-t2)");
  c->add_option("--t2", ct2);
  c->add_option("--mu", c_mu, "maximal: mu = i*value");
  c->add_option("--m-max", c_mmax)->check(CLI::PositiveNumber);
  c->add_option("--n-max", c_nmax)->check(CLI::PositiveNumber);
  c->add_option("--synthetic", c_synth, "maximal without table: synthetic source of this length");
  c->add_option("--mu-g", c_mu_g, "spectral parameter of the synthetic source (imaginary part)");

  // testfn
  auto* tf = app.add_subcommand("testfn", "test function h and the Weyl integral");
  TestOpts tfo;
  tfo.add(tf);
  std::vector<double> tf_t1{}, tf_t2{};
  bool tf_integral = false, tf_signed = false;
  tf->add_option("--t1", tf_t1, "evaluation points, mu = i(t1, t2, -t1-t2)");
  tf->add_option("--t2", tf_t2);
  tf->add_flag("--weyl-integral", tf_integral, "integral of h |spec| over the unitary axis");
  tf->add_flag("--signed", tf_signed, "use the signed density in the integral");

  // kernel
  auto* ke = app.add_subcommand("kernel", "Mellin-Barnes kernels K_w4, K_w6");
  std::string ke_which = "w4";
  double ke_y = 1.0, ke_y2 = 1.0, ke_t1 = 1.0, ke_t2 = 2.0, ke_sigma = -1.0;
  ke->add_option("--which", ke_which)->check(CLI::IsMember({"w4", "w6"}));
  ke->add_option("--y", ke_y);
  ke->add_option("--y2", ke_y2, "w6 only");
  ke->add_option("--t1", ke_t1);
  ke->add_option("--t2", ke_t2);
  ke->add_option("--sigma", ke_sigma, "contour abscissa (-1: default)");

  // phi
  auto* ph = app.add_subcommand("phi", "spectral transforms Phi_w4, Phi_w5, Phi_w6");
  TestOpts pho;
  pho.add(ph);
  std::string ph_which = "w4", ph_grid;
  std::vector<double> ph_y{};
  double ph_y2 = 0.0, ph_budget = 4e10;
  bool ph_diag = false;
  ph->add_option("--which", ph_which)->check(CLI::IsMember({"w4", "w5", "w6"}));
  ph->add_option("--y", ph_y, "argument(s)");
  ph->add_option("--y-grid", ph_grid, "log:a:b:n or lin:a:b:n");
  ph->add_option("--y2", ph_y2, "w6 second argument");
  ph->add_flag("--diagonal", ph_diag, "w6 with y2 = y");
  ph->add_option("--budget", ph_budget, "work budget per evaluation");

  // weights
  auto* we = app.add_subcommand("weights", "AFE and first-moment weights");
  std::string we_which = "W";
  double we_y = 1.0, we_t1 = 50.0, we_t2 = 20.0, we_sigma = 3.0, we_T0 = 10.0;
  int we_A = 8000, we_N = 3;
  we->add_option("--which", we_which)->check(CLI::IsMember({"W", "W_N", "script_W", "V", "V_j"}));
  we->add_option("--y", we_y);
  we->add_option("--t1", we_t1);
  we->add_option("--t2", we_t2);
  we->add_option("--sigma", we_sigma);
  we->add_option("--T0", we_T0);
  we->add_option("--A-G", we_A);
  we->add_option("--N", we_N);

  // mollifier
  auto* mo = app.add_subcommand("mollifier", "mollifier coefficients x_l");
  double mo_L = 16.0, mo_sigma = 3.0;
  mo->add_option("--L", mo_L);
  mo->add_option("--sigma", mo_sigma, "contour abscissa");

  // trace-term
  auto* tt = app.add_subcommand("trace-term", "one geometric-side term");
  TestOpts tto;
  tto.add(tt);
  std::string tt_moment = "first", tt_term = "Delta";
  i64 tl1 = 1, tl2 = 1, tm1 = 1, tm2 = 1, t_dmax = 64;
  long t_maxtuples = 64;
  i64 t_synth = 0;
  double t_budget = 4e10, t_eps = 0.1, t_mu_g = 3.0;
  tt->add_option("--moment", tt_moment)->check(CLI::IsMember({"first", "second"}));
  tt->add_option("--term", tt_term, "Delta, Sigma4, Sigma5, Sigma6, E_min, E_max");
  tt->add_option("--l1", tl1, "first moment: l");
  tt->add_option("--l2", tl2);
  tt->add_option("--m1", tm1);
  tt->add_option("--m2", tm2, "first moment: m");
  tt->add_option("--d-max", t_dmax);
  tt->add_option("--max-tuples", t_maxtuples);
  tt->add_option("--budget", t_budget);
  tt->add_option("--eps", t_eps);
  tt->add_option("--synthetic-gl2", t_synth, "E_max: add a synthetic source of this length");
  tt->add_option("--mu-g", t_mu_g, "spectral parameter of the synthetic source");

  // verify
  auto* ve = app.add_subcommand("verify", "property batteries");
  std::vector<std::string> ve_suites{};
  ve->add_option("--suite", ve_suites, "suite name(s), or all");

  // quad-selftest
  auto* qs = app.add_subcommand("quad-selftest", "contour quadrature against classical integrals");

  std::vector<std::string> args(argv + 1, argv + argc);
  bool json_mode = true;
  for (auto& a : args)
    if (a == "--csv") json_mode = false;
  auto fail = [&](int code, const std::string& type, const std::string& msg) {
    if (json_mode)
      std::cout << json{{"error", {{"type", type}, {"message", msg}}}}.dump() << "\n";
    else
      std::cerr << "error (" << type << "): " << msg << "\n";
    return code;
  };

  try {
    for (size_t i = 0; i + 1 < args.size(); ++i)
      if (args[i] == "--config" || args[i].rfind("--config=", 0) == 0) {
        std::string path = args[i] == "--config" ? args[i + 1] : args[i].substr(9);
        merge_config(path, args, app);
        break;
      }
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail(2, "config", e.what());
  } catch (const ConfigError& e) {
    return fail(2, "config", e.what());
  }
  json_mode = !g.csv;

  CLI::App* sub = app.get_subcommands().front();
  std::vector<json> recs;
  int status = 0;
  try {
    auto contour_budget = [&](ContourSpec cs) {
      if (g.budget_panels > 0) cs.max_panels = static_cast<int>(g.budget_panels);
      return cs;
    };
    if (sub == k) {
      KloostermanQuery q{kn1, kn2, km1, km2, kD1, kD2};
      YZPolicy pol = k_policy == "search"         ? YZPolicy::Search
                     : k_policy == "extended-gcd" ? YZPolicy::ExtendedGcd
                                                  : YZPolicy::UnitFirst;
      if (k_variant == "tilde" && kD2 % kD1 != 0) throw std::invalid_argument("tilde sum needs D1 | D2");
      ExactSum e = k_variant == "tilde" ? kloosterman_tilde(q) : kloosterman_long(q, pol);
      auto iv = e.as_integer();
      json r{{"variant", k_variant}, {"n1", kn1}, {"n2", kn2}, {"m1", km1}, {"m2", km2}, {"D1", kD1}, {"D2", kD2},
             {"value", cval(iv ? cplx(double(*iv), 0.0) : e.evaluate())}, {"exact_zero", e.is_zero()},
             {"exact_integer", iv ? json(*iv) : json(nullptr)}, {"terms", e.term_count()},
             // compensated sum of unit phases: rounding only
             {"error_estimate", 4e-16 * static_cast<double>(std::max<i64>(1, e.term_count()))}};
      if (k_naive)
        r["naive"] = cval(k_variant == "tilde" ? naive_kloosterman_tilde(q) : naive_kloosterman_long(q));
      recs.push_back(r);
    } else if (sub == c) {
      if (c_kind == "minimal") {
        auto mu = SpectralPoint::imaginary(ct1, ct2);
        for (i64 m = 1; m <= c_mmax; ++m)
          for (i64 n = 1; n <= c_nmax; ++n) {
            cplx v = coeff_minimal(mu, m, n);
            recs.push_back({{"m", m}, {"n", n}, {"value", cval(v)},
                            {"error_estimate", 1e-15 * double(tau3(m) * tau3(n))}});
          }
      } else {
        auto src = load_sources(g);
        if (src.empty() && c_synth > 0) src.push_back(CoefficientSource::synthetic(g.seed, c_synth, c_mu_g));
        if (src.empty()) throw InsufficientData("maximal coefficients need --coeff-table or --synthetic");
        for (i64 m = 1; m <= c_mmax; ++m)
          for (i64 n = 1; n <= c_nmax; ++n) {
            cplx v = coeff_maximal(cplx(0.0, c_mu), src[0], m, n);
            recs.push_back({{"m", m}, {"n", n}, {"value", cval(v)},
                            {"error_estimate", 1e-15 * double(divisors(m).size() * divisors(n).size())}});
          }
      }
    } else if (sub == tf) {
      auto p = tfo.make();
      if (tf_integral) {
        auto w = weyl_integral_h(p, g.tol, g.threads, tf_signed);
        double M = p.window();
        recs.push_back({{"T", p.T}, {"M", M}, {"weyl_integral", w.value}, {"error_estimate", w.error_estimate},
                        {"ratio_T3M2", w.value / (p.T * p.T * p.T * M * M)}, {"points", w.points},
                        {"converged", w.converged}});
      }
      if (tf_t1.size() != tf_t2.size()) throw std::invalid_argument("--t1 and --t2 need the same length");
      for (size_t i = 0; i < tf_t1.size(); ++i) {
        auto mu = SpectralPoint::imaginary(tf_t1[i], tf_t2[i]);
        cplx h = test_function_h(mu, p);
        cplx sp = spec_density(mu);
        recs.push_back({{"t1", tf_t1[i]}, {"t2", tf_t2[i]}, {"h", cval(h)}, {"spec", cval(sp)},
                        {"error_estimate", 1e-14 * std::abs(h)}});
      }
    } else if (sub == ke) {
      auto mu = SpectralPoint::imaginary(ke_t1, ke_t2);
      QuadratureResult q;
      double sigma = ke_sigma;
      if (ke_which == "w4") {
        if (sigma < 0.0) sigma = 0.0;
        q = kernel_w4(ke_y, mu, contour_budget(kernel_w4_contour(ke_y, mu, sigma, g.tol)));
      } else {
        if (sigma < 0.0) sigma = ke_y > 0 && ke_y2 > 0 ? 3.0 : 0.125;
        q = kernel_w6(ke_y, ke_y2, mu, contour_budget(ContourSpec::vertical(sigma, g.tol)));
      }
      recs.push_back({{"which", ke_which}, {"y1", ke_y}, {"y2", ke_which == "w4" ? json(nullptr) : json(ke_y2)},
                      {"t1", ke_t1}, {"t2", ke_t2}, {"sigma", sigma}, {"value", cval(q.value)},
                      {"error_estimate", q.error_estimate}, {"panels", q.panels_used}});
      if (!q.converged) status = 1;
    } else if (sub == ph) {
      auto p = pho.make();
      std::vector<double> ys = ph_y;
      if (!ph_grid.empty()) {
        auto gr = parse_grid(ph_grid);
        ys.insert(ys.end(), gr.begin(), gr.end());
      }
      if (ys.empty()) throw std::invalid_argument("phi needs --y or --y-grid");
      PhiOptions o;
      o.tol = g.tol;
      o.threads = g.threads;
      o.budget = ph_budget;
      if (g.budget_panels > 0) o.max_panels = static_cast<int>(g.budget_panels);
      PhiKind kind = ph_which == "w4" ? PhiKind::W4 : ph_which == "w5" ? PhiKind::W5 : PhiKind::W6;
      for (double y : ys) {
        double y2 = ph_diag ? y : ph_y2;
        auto r = phi_transform(kind, y, y2, p, o);
        json rec;
        if (kind == PhiKind::W6)
          rec["y1"] = y, rec["y2"] = y2;
        else
          rec["y"] = y;
        rec["T"] = p.T;
        rec["M"] = p.window();
        rec["value"] = cval(r.value);
        rec["error_estimate"] = r.error_estimate;
        rec["panels"] = r.panels_used;
        recs.push_back(rec);
        if (!r.converged) status = 1;
      }
    } else if (sub == we) {
      AfeParams a;
      a.A_G = we_A, a.T0 = we_T0, a.N = we_N;
      a.validate();
      auto mu = SpectralPoint::imaginary(we_t1, we_t2);
      auto cs = contour_budget(ContourSpec::vertical(we_sigma, 1e-300));
      cs.rel_tolerance = g.tol;
      QuadratureResult q;
      if (we_which == "W") q = afe_weight_W(we_y, mu, a, cs);
      else if (we_which == "W_N") q = afe_weight_W_N(we_y, mu, a, cs);
      else if (we_which == "script_W") q = script_W(we_y, mu, a, cs);
      else if (we_which == "V") q = first_moment_V(we_y, we_T0, a, cs);
      else q = first_moment_Vj(we_y, mu, we_T0, a, cs);
      recs.push_back({{"which", we_which}, {"y", we_y}, {"t1", we_t1}, {"t2", we_t2}, {"sigma", we_sigma},
                      {"value", cval(q.value)}, {"error_estimate", q.error_estimate}, {"panels", q.panels_used}});
      if (!q.converged) status = 1;
    } else if (sub == mo) {
      MollifierParams{mo_L, 0.1}.validate();
      for (i64 l = 1; l <= static_cast<i64>(std::floor(mo_L)); ++l) {
        double x = mollifier_x(l, mo_L);
        auto q = mollifier_x_contour(l, mo_L, contour_budget(ContourSpec::vertical(mo_sigma, std::min(g.tol, 1e-12))));
        recs.push_back({{"l", l}, {"L", mo_L}, {"x", x}, {"contour", q.value.real()},
                        {"deviation", std::abs(q.value - x)}, {"error_estimate", q.error_estimate}});
      }
    } else if (sub == tt) {
      auto p = tto.make();
      TraceTermRequest r = tt_moment == "first" ? TraceTermRequest::first(tl1, tm2, p)
                                                : TraceTermRequest::second(tl1, tl2, tm1, tm2, p);
      r.tol = g.tol;
      r.threads = g.threads;
      r.d_max = t_dmax;
      r.eps = t_eps;
      r.budget = t_budget;
      r.max_tuples = t_maxtuples;
      r.gl2 = load_sources(g);
      if (t_synth > 0) r.gl2.push_back(CoefficientSource::synthetic(g.seed, t_synth, t_mu_g));
      TermKind term = term_from_string(tt_term);
      auto res = trace_term(r, term);
      json rec{{"moment", to_string(r.moment)},
               {"term", to_string(term)},
               {"params", json::parse(p.to_json())},
               {"value", cval(res.value)},
               {"error_estimate", res.error_estimate},
               {"budget", {{"panels", res.panels}, {"tuples", res.tuples}}},
               {"ratio_T3M2", res.ratio_T3M2},
               {"log", res.log}};
      recs.push_back(rec);
    } else if (sub == ve) {
      std::vector<std::string> names = ve_suites;
      if (names.empty() || (names.size() == 1 && names[0] == "all")) names = suite_names();
      VerifyOptions vo;
      vo.threads = g.threads;
      vo.seed = g.seed;
      if (!json_mode) std::cerr << "suite          result  count  failures  max_dev  seconds\n";
      for (auto& n : names) {
        auto r = run_suite(n, vo);
        if (!r.pass) status = 1;
        recs.push_back({{"id", r.id}, {"suite", r.name}, {"pass", r.pass}, {"count", r.count},
                        {"failures", r.failures}, {"max_deviation", r.max_deviation},
                        {"error_estimate", r.max_deviation}, {"seconds", r.seconds}, {"detail", r.detail}});
        std::fprintf(stderr, "%-14s %-6s %6ld %9ld %9.2e %8.1f\n", r.name.c_str(), r.pass ? "PASS" : "FAIL", r.count,
                     r.failures, r.max_deviation, r.seconds);
      }
    } else if (sub == qs) {
      struct Case {
        std::string name;
        Integrand f;
        ContourSpec cs;
        cplx expected;
      };
      const double y = 1.5;
      std::vector<Case> cases{
          {"gamma(s) y^-s, sigma 2", [&](cplx s) { return gamma(s) * std::pow(y, -s); },
           ContourSpec::vertical(2.0, 1e-13), std::exp(-y)},
          {"gamma(s)^2 y^-s, sigma 1", [&](cplx s) { return gamma(s) * gamma(s) * std::pow(y, -s); },
           ContourSpec::vertical(1.0, 1e-13), 2.0 * std::cyl_bessel_k(0.0, 2.0 * std::sqrt(y))},
          {"pi/sin(pi s) y^-s, sigma 1/2", [&](cplx s) { return kPi / std::sin(kPi * s) * std::pow(y, -s); },
           ContourSpec::vertical(0.5, 1e-13), 1.0 / (1.0 + y)},
          {"e^(s^2) y^-s / s, keyhole", [&](cplx s) { return std::exp(s * s) * std::pow(y, -s) / s; },
           // the pole at 0 lies right of the keyhole: vertical value minus the residue 1
           ContourSpec::keyhole(0.1, 1e-13), 0.5 * std::erfc(std::log(y) / 2.0) - 1.0},
      };
      for (auto& cse : cases) {
        auto q = contour_integrate(cse.f, contour_budget(cse.cs));
        double dev = std::abs(q.value - cse.expected);
        bool ok = dev <= q.error_estimate + 1e-11;
        if (!ok) status = 1;
        recs.push_back({{"name", cse.name}, {"value", cval(q.value)}, {"expected", cval(cse.expected)},
                        {"deviation", dev}, {"error_estimate", q.error_estimate}, {"pass", ok}});
      }
      auto q = integrate_real([](double x) { return cplx(std::exp(-x * x)); }, 0.0, 3.0, 1e-14, 0.0, 1000);
      double ex = std::sqrt(kPi) / 2.0 * std::erf(3.0);
      double dev = std::abs(q.value - ex);
      bool ok = dev <= q.error_estimate + 1e-13;
      if (!ok) status = 1;
      recs.push_back({{"name", "exp(-x^2) on [0,3]"}, {"value", cval(q.value)}, {"expected", cval(ex)},
                      {"deviation", dev}, {"error_estimate", q.error_estimate}, {"pass", ok}});
    }
  } catch (const std::invalid_argument& e) {
    return fail(2, "config", e.what());
  } catch (const CostGuardError& e) {
    return fail(1, "cost-guard", e.what());
  } catch (const InsufficientData& e) {
    return fail(1, "insufficient-data", e.what());
  } catch (const std::exception& e) {
    return fail(1, "runtime", e.what());
  }

  std::ofstream file;
  if (!g.out.empty()) {
    file.open(g.out);
    if (!file) return fail(2, "config", "cannot write " + g.out);
  }
  std::ostream& os = g.out.empty() ? std::cout : file;
  if (json_mode) {
    json report{{"command", sub->get_name()}, {"params", params_block(sub)}, {"tol", g.tol},
                {"threads", g.threads},          {"seed", g.seed},               {"records", recs}};
    os << report.dump(2) << "\n";
  } else {
    write_csv(os, recs);
  }
  return status;
}
