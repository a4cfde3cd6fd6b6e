// latsum command-line front end.
//
// Subcommands: zeta (point and grid evaluation), sigma (Wigner limits),
// jump (boundary jump reports), count (lattice counting and the fitted
// exponent), verify (the identity battery), jump-scan (random-form search
// for small |V_Q'|).
//
// Exit codes: 0 success, 1 verification failure, 2 configuration error,
// 3 numerical failure, 4 strip violation.
//
// Precedence for every setting is flags > config file > defaults.  The
// WIGNER_THREADS environment variable caps the thread count.  Identical
// configuration produces byte-identical output.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>
#include <latsum.hpp>

namespace {

using latsum::cplx;
using ojson = nlohmann::ordered_json;

// Version of the embedded defaults below (lambda references, window
// bounds); bumped whenever a default changes so emitted reports stay
// attributable.
constexpr int kDefaultsVersion = 1;

struct LambdaRef {
  double value = 0.0;
  bool conditional = false;
};

// Reference counting exponents.  The conditional marker flags entries that
// rest on conjecture: the Euclidean lambda_2 = 0.5 and lambda_3 = 1; the
// d >= 4 Euclidean values and the sup-norm d - 1 are proven.
LambdaRef lambda_reference(int d, double p) {
  return {latsum::default_lambda(d, p), p == 2.0 && (d == 2 || d == 3)};
}

// ---------------------------------------------------------------------------
// Formatting.  CSV uses 17 significant digits; JSON is emitted with
// shortest round-trip numbers.  Both reparse to the exact double.

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

ojson cplx_json(cplx z) { return ojson{{"re", z.real()}, {"im", z.imag()}}; }

ojson form_json(const latsum::QuadForm& q) {
  ojson rows = ojson::array();
  for (const auto& row : q.matrix) rows.push_back(row);
  return ojson{{"dim", q.dim}, {"matrix", std::move(rows)}};
}

void emit(const std::string& out_path, const std::string& text) {
  if (out_path.empty()) {
    std::fwrite(text.data(), 1, text.size(), stdout);
    return;
  }
  std::ofstream f(out_path, std::ios::binary);
  if (!f) throw latsum::DomainError("cannot open output file " + out_path);
  f.write(text.data(), (std::streamsize)text.size());
}

// ---------------------------------------------------------------------------
// Config file layer.  CLI11 fills bound variables from flags; keys present
// in the config file overwrite only values whose flag was not given.

struct ConfigLayer {
  const CLI::App* cmd = nullptr;
  ojson file = ojson::object();

  template <typename T>
  void take(const std::string& flag, const std::string& key, T& slot) const {
    if (cmd->count(flag) > 0) return;
    if (!file.contains(key)) return;
    try {
      slot = file.at(key).get<T>();
    } catch (const ojson::exception&) {
      throw latsum::DomainError("config key '" + key + "' has the wrong type");
    }
  }

  bool given(const std::string& flag, const std::string& key) const {
    return cmd->count(flag) > 0 || file.contains(key);
  }
};

ojson load_json_file(const std::string& path, const char* what) {
  std::ifstream f(path);
  if (!f)
    throw latsum::DomainError(std::string("cannot open ") + what + " " + path);
  ojson j;
  try {
    f >> j;
  } catch (const ojson::exception& e) {
    throw latsum::DomainError(std::string(what) + " " + path +
                              " is not valid JSON: " + e.what());
  }
  return j;
}

ConfigLayer make_layer(const CLI::App* cmd, const std::string& config_path) {
  ConfigLayer layer;
  layer.cmd = cmd;
  if (!config_path.empty()) {
    layer.file = load_json_file(config_path, "config file");
    if (!layer.file.is_object())
      throw latsum::DomainError("config file must hold a JSON object");
  }
  return layer;
}

// ---------------------------------------------------------------------------
// Quadratic form selection: --cubic -d D for the identity form, --form for
// a JSON file {"dim": d, "matrix": [[...]]}; a config file may hold the
// form inline under "form" or a path string.

struct FormOpts {
  bool cubic = false;
  int dim = 0;
  std::string form_path;
};

void add_form_opts(CLI::App* cmd, FormOpts& o) {
  cmd->add_flag("--cubic", o.cubic, "use the identity form in dimension --dim");
  cmd->add_option("-d,--dim", o.dim, "dimension for --cubic");
  cmd->add_option("--form", o.form_path,
                  "path to a form file {\"dim\": d, \"matrix\": [[...]]}");
}

latsum::QuadForm form_from_json(const ojson& j) {
  if (!j.is_object() || !j.contains("dim") || !j.contains("matrix"))
    throw latsum::DomainError(
        "form must be a JSON object {\"dim\": d, \"matrix\": [[...]]}");
  int d = 0;
  latsum::Mat m;
  try {
    d = j.at("dim").get<int>();
    m = j.at("matrix").get<latsum::Mat>();
  } catch (const ojson::exception&) {
    throw latsum::DomainError("form: dim must be an integer, matrix an array "
                              "of number rows");
  }
  if ((int)m.size() != d)
    throw latsum::DomainError("form: matrix size does not match dim");
  return latsum::make_form(m);
}

struct ResolvedForm {
  latsum::QuadForm q;
  bool cubic = false;  // identity form requested via --cubic
};

ResolvedForm resolve_form(const ConfigLayer& cfg, FormOpts o) {
  cfg.take("--cubic", "cubic", o.cubic);
  cfg.take("--dim", "dim", o.dim);
  ojson inline_form;
  if (cfg.cmd->count("--form") == 0 && cfg.file.contains("form")) {
    const ojson& f = cfg.file.at("form");
    if (f.is_string())
      o.form_path = f.get<std::string>();
    else
      inline_form = f;
  }
  bool has_file = !o.form_path.empty() || !inline_form.is_null();
  if (has_file && o.cubic)
    throw latsum::DomainError("give either --cubic or --form, not both");
  if (!inline_form.is_null()) return {form_from_json(inline_form), false};
  if (!o.form_path.empty())
    return {form_from_json(load_json_file(o.form_path, "form file")), false};
  if (o.cubic) {
    if (o.dim < 2)
      throw latsum::DomainError("--cubic needs --dim >= 2");
    latsum::Mat m(o.dim, std::vector<double>(o.dim, 0.0));
    for (int i = 0; i < o.dim; ++i) m[i][i] = 1.0;
    return {latsum::make_form(m), true};
  }
  throw latsum::DomainError("no form given: use --cubic -d D or --form FILE");
}

// ---------------------------------------------------------------------------
// Surface cubature rule.  The default targets 1e-10; for d >= 6 that forces
// an order-48 pass over the 5-dimensional faces, so deep sweeps should pass
// a looser --surface-tol.

struct SurfaceOpts {
  int order = 12;
  int refine = 5;
  double tol = 1e-10;
};

void add_surface_opts(CLI::App* cmd, SurfaceOpts& o) {
  cmd->add_option("--surface-order", o.order,
                  "Gauss-Legendre points per axis per face (default 12)");
  cmd->add_option("--surface-refine", o.refine,
                  "order doublings before giving up (default 5)");
  cmd->add_option("--surface-tol", o.tol,
                  "cubature refinement target (default 1e-10)");
}

latsum::SurfaceRule resolve_surface(const ConfigLayer& cfg, SurfaceOpts o) {
  cfg.take("--surface-order", "surface_order", o.order);
  cfg.take("--surface-refine", "surface_refine", o.refine);
  cfg.take("--surface-tol", "surface_tol", o.tol);
  if (o.order < 2) throw latsum::DomainError("--surface-order must be >= 2");
  if (o.refine < 1) throw latsum::DomainError("--surface-refine must be >= 1");
  if (!(o.tol > 0.0)) throw latsum::DomainError("--surface-tol must be > 0");
  return {o.order, o.refine, o.tol};
}

int resolve_threads(const ConfigLayer& cfg, int flag_threads) {
  int t = flag_threads;
  cfg.take("--threads", "threads", t);
  if (t < 1) throw latsum::DomainError("--threads must be >= 1");
  if (const char* env = std::getenv("WIGNER_THREADS")) {
    char* end = nullptr;
    long cap = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || cap < 1)
      throw latsum::DomainError("WIGNER_THREADS must be a positive integer");
    t = (int)std::min<long>(t, cap);
  }
  return t;
}

double parse_p(const std::string& text) {
  if (text == "inf" || text == "sup") return std::numeric_limits<double>::infinity();
  char* end = nullptr;
  double p = std::strtod(text.c_str(), &end);
  if (end == text.c_str() || *end != '\0' || !(p > 0.0))
    throw latsum::DomainError("--p must be a positive number, 'inf', or 'sup'");
  return p;
}

std::vector<long> to_integer_n(const std::vector<double>& ns) {
  std::vector<long> out;
  out.reserve(ns.size());
  for (double v : ns) {
    long n = std::lround(v);
    if (!(v > 0.0) || std::abs(v - (double)n) > 1e-9)
      throw latsum::DomainError("cube-scheme N values must be positive integers");
    out.push_back(n);
  }
  return out;
}

// ---------------------------------------------------------------------------
// zeta: single point or real-s grid, CSV (re_s, im_s, re_Z, im_Z, abs_err).

struct ZetaOpts {
  FormOpts form;
  std::string method = "auto";
  double re = std::numeric_limits<double>::quiet_NaN();
  double im = 0.0;
  double re_min = std::numeric_limits<double>::quiet_NaN();
  double re_max = std::numeric_limits<double>::quiet_NaN();
  int steps = 0;
  std::string format = "csv";
  std::string output;
  std::string config;
};

latsum::SeriesResult eval_zeta(const ResolvedForm& rf, const std::string& method,
                               cplx s) {
  std::string m = method;
  if (m == "auto") m = rf.cubic ? "theta" : "epstein";
  if (m == "epstein") return latsum::z_epstein(rf.q, s);
  if (!rf.cubic)
    throw latsum::DomainError("method '" + m + "' needs --cubic");
  if (m == "theta") return latsum::z_cubic_theta(rf.q.dim, s);
  if (m == "bessel") return latsum::z_cubic_bessel(rf.q.dim, s);
  if (m == "closed") {
    cplx z = latsum::z_closed_form(rf.q.dim, s);
    latsum::SeriesResult r;
    r.value = z;
    r.abs_err_estimate = 1e-14 * (1.0 + std::abs(z));
    r.terms_used = 0;
    r.converged = true;
    return r;
  }
  throw latsum::DomainError("unknown method '" + method + "'");
}

int run_zeta(const CLI::App* cmd, ZetaOpts o) {
  ConfigLayer cfg = make_layer(cmd, o.config);
  ResolvedForm rf = resolve_form(cfg, o.form);
  cfg.take("--method", "method", o.method);
  cfg.take("--re", "re", o.re);
  cfg.take("--im", "im", o.im);
  cfg.take("--re-min", "re_min", o.re_min);
  cfg.take("--re-max", "re_max", o.re_max);
  cfg.take("--steps", "steps", o.steps);
  cfg.take("--format", "format", o.format);
  cfg.take("--output", "output", o.output);

  std::vector<cplx> grid;
  if (cfg.given("--steps", "steps")) {
    if (o.steps < 1) throw latsum::DomainError("--steps must be >= 1");
    if (std::isnan(o.re_min) || std::isnan(o.re_max))
      throw latsum::DomainError("grid mode needs --re-min and --re-max");
    for (int i = 0; i < o.steps; ++i) {
      double t = o.steps == 1 ? 0.0 : (double)i / (double)(o.steps - 1);
      grid.emplace_back(o.re_min + t * (o.re_max - o.re_min), o.im);
    }
  } else {
    if (std::isnan(o.re))
      throw latsum::DomainError("give --re, or --re-min/--re-max/--steps");
    grid.emplace_back(o.re, o.im);
  }

  std::vector<latsum::SeriesResult> vals;
  vals.reserve(grid.size());
  for (cplx s : grid) vals.push_back(eval_zeta(rf, o.method, s));

  std::string text;
  if (o.format == "json") {
    ojson rows = ojson::array();
    for (size_t i = 0; i < grid.size(); ++i)
      rows.push_back(ojson{{"re_s", grid[i].real()},
                           {"im_s", grid[i].imag()},
                           {"re_Z", vals[i].value.real()},
                           {"im_Z", vals[i].value.imag()},
                           {"abs_err", vals[i].abs_err_estimate}});
    ojson out{{"command", "zeta"},
              {"method", o.method},
              {"form", form_json(rf.q)},
              {"rows", std::move(rows)}};
    text = out.dump(2) + "\n";
  } else {
    text = "re_s,im_s,re_Z,im_Z,abs_err\n";
    for (size_t i = 0; i < grid.size(); ++i)
      text += fmt(grid[i].real()) + "," + fmt(grid[i].imag()) + "," +
              fmt(vals[i].value.real()) + "," + fmt(vals[i].value.imag()) +
              "," + fmt(vals[i].abs_err_estimate) + "\n";
  }
  emit(o.output, text);
  return 0;
}

// ---------------------------------------------------------------------------
// sigma: Wigner limit via sigma_limit (cubes) or sigma_hat_limit (p-balls),
// or a per-N sweep (cube scheme) as CSV (n, re_sigma, im_sigma, abs_err).

struct SigmaOpts {
  FormOpts form;
  SurfaceOpts surface;
  std::string scheme = "cube";
  std::string p_text = "2";
  double re = std::numeric_limits<double>::quiet_NaN();
  double im = 0.0;
  std::vector<double> n_list;
  double n_min = 0.0;
  double n_max = 0.0;
  double lambda = -1.0;
  bool sweep = false;
  int threads = 1;
  std::string format = "json";
  std::string output;
  std::string config;
};

int run_sigma(const CLI::App* cmd, SigmaOpts o) {
  ConfigLayer cfg = make_layer(cmd, o.config);
  ResolvedForm rf = resolve_form(cfg, o.form);
  cfg.take("--scheme", "scheme", o.scheme);
  cfg.take("--p", "p", o.p_text);
  cfg.take("--re", "re", o.re);
  cfg.take("--im", "im", o.im);
  cfg.take("--n-list", "n_list", o.n_list);
  cfg.take("--n-min", "n_min", o.n_min);
  cfg.take("--n-max", "n_max", o.n_max);
  cfg.take("--lambda", "lambda", o.lambda);
  cfg.take("--sweep", "sweep", o.sweep);
  cfg.take("--format", "format", o.format);
  cfg.take("--output", "output", o.output);
  latsum::SurfaceRule rule = resolve_surface(cfg, o.surface);
  int threads = resolve_threads(cfg, o.threads);
  if (std::isnan(o.re)) throw latsum::DomainError("sigma needs --re");
  cplx s(o.re, o.im);
  const latsum::QuadForm& q = rf.q;

  if (o.scheme == "cube") {
    std::vector<long> nl = o.n_list.empty()
                               ? std::vector<long>{10, 16, 22, 28, 34, 40}
                               : to_integer_n(o.n_list);
    if (o.sweep) {
      // Finite-N plot data; each row is exact up to quadrature and
      // roundoff, so no strip restriction applies here.
      latsum::AlphaAccumulator acc(q, s, threads);
      cplx b0 = latsum::beta_0(q, s, rule);
      std::string text = "n,re_sigma,im_sigma,abs_err\n";
      for (long n : nl) {
        acc.advance_to(n);
        cplx bn = std::exp(((double)q.dim - 2.0 * s) *
                           std::log((double)(2 * n + 1))) *
                  b0;
        cplx sig = acc.value() - bn;
        double err = rule.tol + 1e-13 * (1.0 + std::abs(sig));
        text += std::to_string(n) + "," + fmt(sig.real()) + "," +
                fmt(sig.imag()) + "," + fmt(err) + "\n";
      }
      emit(o.output, text);
      return 0;
    }
    latsum::LimitEstimate est = latsum::sigma_limit(q, s, rule, nl, threads);
    ojson out{{"command", "sigma"},
              {"scheme", "cube"},
              {"s", cplx_json(s)},
              {"value", cplx_json(est.value)},
              {"abs_err_estimate", est.abs_err_estimate},
              {"model",
               ojson{{"kind", est.model.kind == latsum::LimitModelKind::PowerTail
                                  ? "power_tail"
                                  : "richardson"},
                     {"exponents", est.model.exponents},
                     {"order", est.model.order}}},
              {"n_sequence", est.n_sequence},
              {"form", form_json(q)}};
    emit(o.output, out.dump(2) + "\n");
    return 0;
  }

  if (o.scheme != "pball")
    throw latsum::DomainError("--scheme must be cube or pball");
  if (o.sweep)
    throw latsum::DomainError("--sweep supports the cube scheme only");
  double p = parse_p(o.p_text);
  LambdaRef lref = lambda_reference(q.dim, p);
  double lam = o.lambda >= 0.0 ? o.lambda : lref.value;
  std::vector<double> window = o.n_list;
  if (window.empty()) {
    double lo = o.n_min, hi = o.n_max;
    if (lo <= 0.0 || hi <= 0.0) {
      // Defaults sized so the windowed mean resolves the oscillatory tail
      // at desk scale.
      if (q.dim == 2) {
        lo = 150.0;
        hi = 400.0;
      } else if (q.dim == 3) {
        lo = 40.0;
        hi = 120.0;
      } else {
        lo = 20.0;
        hi = 60.0;
      }
    }
    window = latsum::hat_window(lo, hi);
  }
  latsum::LimitEstimate est =
      latsum::sigma_hat_limit(q, p, s, rule, window, lam);
  ojson out{{"command", "sigma"},
            {"scheme", "pball"},
            {"p", p},
            {"s", cplx_json(s)},
            {"value", cplx_json(est.value)},
            {"abs_err_estimate", est.abs_err_estimate},
            {"lambda",
             ojson{{"value", lam},
                   {"reference", lref.value},
                   {"conditional", lref.conditional},
                   {"defaults_version", kDefaultsVersion}}},
            {"window", ojson{{"lo", window.front()},
                             {"hi", window.back()},
                             {"samples", (int)window.size()}}},
            {"form", form_json(q)}};
  emit(o.output, out.dump(2) + "\n");
  return 0;
}

// ---------------------------------------------------------------------------
// jump: boundary jump report.

struct JumpOpts {
  FormOpts form;
  SurfaceOpts surface;
  std::vector<double> n_list;
  std::vector<double> eps_list;
  int threads = 1;
  std::string output;
  std::string config;
};

int run_jump(const CLI::App* cmd, JumpOpts o) {
  ConfigLayer cfg = make_layer(cmd, o.config);
  ResolvedForm rf = resolve_form(cfg, o.form);
  cfg.take("--n-list", "n_list", o.n_list);
  cfg.take("--eps-list", "eps_list", o.eps_list);
  cfg.take("--output", "output", o.output);
  latsum::SurfaceRule rule = resolve_surface(cfg, o.surface);
  int threads = resolve_threads(cfg, o.threads);
  std::vector<long> nl = o.n_list.empty()
                             ? std::vector<long>{20, 30, 40, 50, 60, 70, 80}
                             : to_integer_n(o.n_list);
  latsum::JumpReport rep =
      latsum::jump_verify(rf.q, rule, nl, o.eps_list, threads);
  latsum::SeriesResult jg = latsum::jump_general(rf.q, rule);
  double thresh = std::max(10.0 * jg.abs_err_estimate, 1e-10);
  std::string sign = "zero";
  if (jg.value.real() > thresh) sign = "positive";
  else if (jg.value.real() < -thresh) sign = "negative";

  ojson out{{"command", "jump"},
            {"lhs", cplx_json(rep.lhs)},
            {"rhs", cplx_json(rep.rhs)},
            {"jump", cplx_json(rep.jump)},
            {"discrepancy", rep.discrepancy},
            {"sign", sign},
            {"jump_abs_err", jg.abs_err_estimate},
            {"s_boundary", rep.s_boundary},
            {"sigma_boundary", cplx_json(rep.sigma_boundary)},
            {"alpha_continuation", cplx_json(rep.alpha_continuation)},
            {"reference_gap", rep.reference_gap},
            {"eps_used", rep.eps_used},
            {"form", form_json(rf.q)}};
  emit(o.output, out.dump(2) + "\n");
  return 0;
}

// ---------------------------------------------------------------------------
// count: (N, count, volume, error) rows with error = count - volume - 1,
// plus the fitted counting exponent.

struct CountOpts {
  int dim = 0;
  std::string p_text = "2";
  int n_max = 256;
  std::string format = "csv";
  std::string output;
  std::string config;
};

int run_count(const CLI::App* cmd, CountOpts o) {
  ConfigLayer cfg = make_layer(cmd, o.config);
  cfg.take("--dim", "dim", o.dim);
  cfg.take("--p", "p", o.p_text);
  cfg.take("--n-max", "n_max", o.n_max);
  cfg.take("--format", "format", o.format);
  cfg.take("--output", "output", o.output);
  if (o.dim < 1) throw latsum::DomainError("count needs --dim >= 1");
  if (o.n_max < 1) throw latsum::DomainError("--n-max must be >= 1");
  double p = parse_p(o.p_text);

  std::vector<long> ns;
  for (long n = 1; n <= o.n_max; n *= 2) ns.push_back(n);
  if (ns.back() != o.n_max) ns.push_back(o.n_max);

  struct Row {
    long n;
    long long count;
    double volume;
    double error;
    double abs_err;
  };
  std::vector<Row> rows;
  rows.reserve(ns.size());
  for (long n : ns) {
    long long c = latsum::count_pball(o.dim, p, (double)n);
    double vol = latsum::pball_volume(o.dim, p, (double)n);
    double err = ((double)c - vol) - 1.0;
    double rnd = 4.0 * std::numeric_limits<double>::epsilon() *
                 (std::abs(vol) + (double)c);
    rows.push_back({n, c, vol, err, rnd});
  }
  double lam_hat = latsum::lambda_estimate(o.dim, p, o.n_max);
  LambdaRef lref = lambda_reference(o.dim, p);

  std::string text;
  if (o.format == "json") {
    ojson jrows = ojson::array();
    for (const Row& r : rows)
      jrows.push_back(ojson{{"n", r.n},
                            {"count", r.count},
                            {"volume", r.volume},
                            {"error", r.error},
                            {"abs_err", r.abs_err}});
    ojson out{{"command", "count"},
              {"dim", o.dim},
              {"p", p},
              {"rows", std::move(jrows)},
              {"lambda_estimate", lam_hat},
              {"lambda_reference",
               ojson{{"value", lref.value},
                     {"conditional", lref.conditional},
                     {"defaults_version", kDefaultsVersion}}}};
    text = out.dump(2) + "\n";
  } else {
    text = "n,count,volume,error,abs_err\n";
    for (const Row& r : rows) {
      char head[64];
      std::snprintf(head, sizeof head, "%ld,%lld,", r.n, r.count);
      text += std::string(head) + fmt(r.volume) + "," + fmt(r.error) + "," +
              fmt(r.abs_err) + "\n";
    }
    text += "# lambda_estimate " + fmt(lam_hat) + "\n";
    text += "# lambda_reference " + fmt(lref.value) +
            (lref.conditional ? " conditional=true" : " conditional=false") +
            " defaults_version=" + std::to_string(kDefaultsVersion) + "\n";
  }
  emit(o.output, text);
  return 0;
}

// ---------------------------------------------------------------------------
// verify: the identity battery, JUnit-style JSON summary.

struct VerifyOpts {
  std::vector<std::string> only;
  int trials = 25;
  std::uint64_t seed = 7;
  int threads = 1;
  std::string output;
  std::string config;
};

int run_verify(const CLI::App* cmd, VerifyOpts o) {
  ConfigLayer cfg = make_layer(cmd, o.config);
  cfg.take("--only", "only", o.only);
  cfg.take("--trials", "trials", o.trials);
  cfg.take("--seed", "seed", o.seed);
  cfg.take("--output", "output", o.output);
  if (o.trials < 1) throw latsum::DomainError("--trials must be >= 1");
  latsum::BatteryConfig bc;
  bc.trials = o.trials;
  bc.seed = o.seed;
  bc.threads = resolve_threads(cfg, o.threads);
  std::vector<latsum::BatteryCheck> res = latsum::run_battery(bc, o.only);

  int failures = 0;
  ojson checks = ojson::array();
  for (const latsum::BatteryCheck& c : res) {
    if (!c.pass) ++failures;
    checks.push_back(ojson{{"name", c.name},
                           {"pass", c.pass},
                           {"worst", c.worst},
                           {"tol", c.tol},
                           {"detail", c.detail}});
  }
  ojson out{{"command", "verify"},
            {"tests", (int)res.size()},
            {"failures", failures},
            {"trials", o.trials},
            {"seed", o.seed},
            {"checks", std::move(checks)}};
  emit(o.output, out.dump(2) + "\n");
  return failures == 0 ? 0 : 1;
}

// ---------------------------------------------------------------------------
// jump-scan: random-form search for small |V_Q'|.  Reports only; nothing
// is asserted about the sign question.

struct ScanOpts {
  int dim = 3;
  int trials = 16;
  std::uint64_t seed = 1;
  int top = 5;
  SurfaceOpts surface;
  std::string output;
  std::string config;
};

int run_jump_scan(const CLI::App* cmd, ScanOpts o) {
  ConfigLayer cfg = make_layer(cmd, o.config);
  cfg.take("--dim", "dim", o.dim);
  cfg.take("--trials", "trials", o.trials);
  cfg.take("--seed", "seed", o.seed);
  cfg.take("--top", "top", o.top);
  cfg.take("--output", "output", o.output);
  latsum::SurfaceRule rule = resolve_surface(cfg, o.surface);
  if (o.dim < 3)
    throw latsum::DomainError("jump-scan needs --dim >= 3 (the d = 2 jump "
                              "vanishes identically)");
  if (o.trials < 1) throw latsum::DomainError("--trials must be >= 1");
  if (o.top < 1) throw latsum::DomainError("--top must be >= 1");

  struct Hit {
    double vq_prime;
    double abs_err;
    cplx jump;
    latsum::QuadForm q;
  };
  std::mt19937_64 rng(o.seed);
  std::vector<Hit> hits;
  hits.reserve(o.trials);
  double fac = -(0.5 * o.dim - 1.0) / 24.0;
  for (int t = 0; t < o.trials; ++t) {
    latsum::QuadForm q =
        latsum::make_form(latsum::battery_detail::random_gram(rng, o.dim));
    latsum::SeriesResult vp = latsum::v_q_prime_boundary(q, rule);
    hits.push_back({vp.value.real(), vp.abs_err_estimate, fac * vp.value, q});
  }
  std::stable_sort(hits.begin(), hits.end(), [](const Hit& a, const Hit& b) {
    return std::abs(a.vq_prime) < std::abs(b.vq_prime);
  });
  if ((int)hits.size() > o.top) hits.resize(o.top);

  ojson results = ojson::array();
  for (const Hit& h : hits)
    results.push_back(ojson{{"vq_prime", h.vq_prime},
                            {"abs_err", h.abs_err},
                            {"jump", cplx_json(h.jump)},
                            {"form", form_json(h.q)}});
  ojson out{{"command", "jump-scan"},
            {"dim", o.dim},
            {"trials", o.trials},
            {"seed", o.seed},
            {"results", std::move(results)}};
  emit(o.output, out.dump(2) + "\n");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Epstein zeta functions and Wigner lattice limits"};
  app.require_subcommand(1);

  ZetaOpts zo;
  CLI::App* zeta = app.add_subcommand("zeta", "evaluate Z_Q at a point or on "
                                              "a real-s grid");
  add_form_opts(zeta, zo.form);
  zeta->add_option("--method", zo.method, "auto|epstein|theta|bessel|closed")
      ->check(CLI::IsMember({"auto", "epstein", "theta", "bessel", "closed"}));
  zeta->add_option("--re", zo.re, "Re s for a single evaluation");
  zeta->add_option("--im", zo.im, "Im s (default 0)");
  zeta->add_option("--re-min", zo.re_min, "grid start");
  zeta->add_option("--re-max", zo.re_max, "grid end (inclusive)");
  zeta->add_option("--steps", zo.steps, "number of grid rows");
  zeta->add_option("--format", zo.format, "csv|json (default csv)")
      ->check(CLI::IsMember({"csv", "json"}));
  zeta->add_option("-o,--output", zo.output, "output file (default stdout)");
  zeta->add_option("--config", zo.config, "JSON config file");

  SigmaOpts so;
  CLI::App* sigma = app.add_subcommand("sigma", "Wigner limit sigma(s), or a "
                                                "finite-N sweep");
  add_form_opts(sigma, so.form);
  sigma->add_option("--scheme", so.scheme, "cube|pball (default cube)")
      ->check(CLI::IsMember({"cube", "pball"}));
  sigma->add_option("--p", so.p_text, "p-ball exponent, a number or inf/sup");
  sigma->add_option("--re", so.re, "Re s");
  sigma->add_option("--im", so.im, "Im s (default 0)");
  sigma->add_option("--n-list", so.n_list, "comma-separated truncation radii")
      ->delimiter(',');
  sigma->add_option("--n-min", so.n_min, "p-ball window start");
  sigma->add_option("--n-max", so.n_max, "p-ball window end");
  sigma->add_option("--lambda", so.lambda,
                    "counting-exponent reference override (pball scheme)");
  sigma->add_flag("--sweep", so.sweep, "emit per-N CSV instead of the limit");
  sigma->add_option("--threads", so.threads, "worker threads (default 1)");
  add_surface_opts(sigma, so.surface);
  sigma->add_option("--format", so.format, "csv|json (default json)")
      ->check(CLI::IsMember({"csv", "json"}));
  sigma->add_option("-o,--output", so.output, "output file (default stdout)");
  sigma->add_option("--config", so.config, "JSON config file");

  JumpOpts jo;
  CLI::App* jump = app.add_subcommand("jump", "verify the jump relation at "
                                              "s = d/2 - 1");
  add_form_opts(jump, jo.form);
  jump->add_option("--n-list", jo.n_list, "truncation radii for sigma_limit")
      ->delimiter(',');
  jump->add_option("--eps-list", jo.eps_list,
                   "offsets for the one-sided limit (default 0.2,0.1,0.05,0.025)")
      ->delimiter(',');
  jump->add_option("--threads", jo.threads, "worker threads (default 1)");
  add_surface_opts(jump, jo.surface);
  jump->add_option("-o,--output", jo.output, "output file (default stdout)");
  jump->add_option("--config", jo.config, "JSON config file");

  CountOpts co;
  CLI::App* count = app.add_subcommand("count", "lattice counts vs volume and "
                                                "the fitted exponent");
  count->add_option("-d,--dim", co.dim, "dimension")->required();
  count->add_option("--p", co.p_text, "p-ball exponent, a number or inf/sup");
  count->add_option("--n-max", co.n_max, "largest radius (default 256)");
  count->add_option("--format", co.format, "csv|json (default csv)")
      ->check(CLI::IsMember({"csv", "json"}));
  count->add_option("-o,--output", co.output, "output file (default stdout)");
  count->add_option("--config", co.config, "JSON config file");

  VerifyOpts vo;
  CLI::App* verify = app.add_subcommand("verify", "run the identity battery");
  verify->add_option("--only", vo.only, "run only the named checks")
      ->delimiter(',');
  verify->add_option("--trials", vo.trials, "random trials per check "
                                            "(default 25)");
  verify->add_option("--seed", vo.seed, "random seed (default 7)");
  verify->add_option("--threads", vo.threads, "worker threads (default 1)");
  verify->add_option("-o,--output", vo.output, "output file (default stdout)");
  verify->add_option("--config", vo.config, "JSON config file");

  ScanOpts sco;
  CLI::App* scan = app.add_subcommand("jump-scan", "random-form search for "
                                                   "small |V_Q'|");
  scan->add_option("-d,--dim", sco.dim, "dimension (default 3)");
  scan->add_option("--trials", sco.trials, "forms to sample (default 16)");
  scan->add_option("--seed", sco.seed, "random seed (default 1)");
  scan->add_option("--top", sco.top, "results to keep (default 5)");
  add_surface_opts(scan, sco.surface);
  scan->add_option("-o,--output", sco.output, "output file (default stdout)");
  scan->add_option("--config", sco.config, "JSON config file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (zeta->parsed()) return run_zeta(zeta, zo);
    if (sigma->parsed()) return run_sigma(sigma, so);
    if (jump->parsed()) return run_jump(jump, jo);
    if (count->parsed()) return run_count(count, co);
    if (verify->parsed()) return run_verify(verify, vo);
    if (scan->parsed()) return run_jump_scan(scan, sco);
  } catch (const latsum::StripViolation& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 4;
  } catch (const latsum::DomainError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const latsum::NotPositiveDefinite& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const latsum::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 2;
}
