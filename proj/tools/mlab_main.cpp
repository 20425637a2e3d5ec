// Batch front-end over the shared-library C API. Subcommands:
//
//   check    validate the domain hypotheses, report the predicted exponent
//   markov   tabulate a Markov factor series and fit its growth exponent
//   witness  tabulate witness-polynomial ratio diagnostics
//   remez    tabulate Remez ratios over the truncated domain
//   fit      re-fit the exponent from a previously written factor CSV
//
// Runs are driven by a TOML config ([domain] [compute] [quad] [witness]
// [output] blocks); results go to an output directory as CSV (17 significant
// digits) plus a JSON summary, which is also printed to stdout. Exit codes:
// 0 success, 2 config/IO, 3 domain-hypothesis failure, 4 numeric or
// conditioning failure, 5 insufficient data.

#include <cinttypes>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "mlab/mlab.h"
#include "toml_lite.hpp"

using ordered_json = nlohmann::ordered_json;

namespace {

enum ExitCode {
  kOk = 0,
  kConfigError = 2,
  kHypothesisError = 3,
  kNumericError = 4,
  kInsufficientData = 5
};

int exit_code_of(mlab_status st) {
  switch (st) {
    case MLAB_OK:
      return kOk;
    case MLAB_ERR_PARAM:
      return kConfigError;
    case MLAB_ERR_HYPOTHESIS:
      return kHypothesisError;
    case MLAB_ERR_INSUFFICIENT_DATA:
      return kInsufficientData;
    case MLAB_ERR_CONDITIONING:
    case MLAB_ERR_QUADRATURE:
    case MLAB_ERR_INTERNAL:
      break;
  }
  return kNumericError;
}

[[noreturn]] void die(int code, const std::string& msg) {
  std::fprintf(stderr, "mlab: %s\n", msg.c_str());
  std::exit(code);
}

std::string sig17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

struct Domain {
  mlab_domain* d = nullptr;
  ~Domain() { mlab_domain_free(d); }
};

mlab_family family_of(const std::string& name) {
  if (name == "power") return MLAB_FAMILY_POWER;
  if (name == "loglog") return MLAB_FAMILY_LOGLOG;
  if (name == "neglog") return MLAB_FAMILY_NEGLOG;
  if (name == "logpower") return MLAB_FAMILY_LOGPOWER;
  die(kConfigError,
      "domain.family: expected power|loglog|neglog|logpower, got `" + name +
          "`");
}

void make_domain(const tomllite::Table& cfg, Domain& out) {
  double a = cfg.num("domain.a");
  auto k = int32_t(cfg.integer("domain.k"));
  mlab_family family = family_of(cfg.str("domain.family"));
  double r = cfg.num_or("domain.r", 2.0);
  double b = cfg.num_or("domain.b", 1.0);
  double c = cfg.num_or("domain.c", 1.0);
  mlab_status st = mlab_domain_create(a, k, family, r, b, c, &out.d);
  if (st != MLAB_OK)
    die(exit_code_of(st), std::string("domain: ") + mlab_last_error());
}

mlab_quad_opts quad_of(const tomllite::Table& cfg) {
  mlab_quad_opts q;
  mlab_quad_opts_default(&q);
  q.rel_tol = cfg.num_or("quad.rel_tol", q.rel_tol);
  q.graded_panels = int32_t(cfg.integer_or("quad.panels", q.graded_panels));
  q.grading_ratio = cfg.num_or("quad.grading", q.grading_ratio);
  return q;
}

ordered_json domain_json(const tomllite::Table& cfg) {
  ordered_json d;
  d["a"] = cfg.num("domain.a");
  d["k"] = cfg.integer("domain.k");
  d["family"] = cfg.str("domain.family");
  d["r"] = cfg.num_or("domain.r", 2.0);
  d["b"] = cfg.num_or("domain.b", 1.0);
  if (cfg.has("domain.c")) d["c"] = cfg.num("domain.c");
  return d;
}

std::string resolve_out_dir(const tomllite::Table& cfg,
                            const std::string& flag) {
  std::string dir = !flag.empty() ? flag : cfg.str_or("output.directory", ".");
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) die(kConfigError, "cannot create output directory " + dir);
  return dir;
}

bool wants_format(const tomllite::Table& cfg, const std::string& name) {
  std::string formats = cfg.str_or("output.formats", "csv,json");
  return formats.find(name) != std::string::npos;
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) die(kConfigError, "cannot write " + path);
  out << text;
}

void emit_summary(const tomllite::Table& cfg, const std::string& dir,
                  const std::string& name, const ordered_json& summary) {
  std::string text = summary.dump(2) + "\n";
  if (wants_format(cfg, "json")) write_file(dir + "/" + name, text);
  std::fputs(text.c_str(), stdout);
}

struct Window {
  int32_t lo = 0, hi = 0;  // 0,0 = no restriction
};

Window parse_window(const std::string& text) {
  if (text.empty()) return {};
  Window w;
  char tail = 0;
  if (std::sscanf(text.c_str(), "%" SCNd32 ":%" SCNd32 "%c", &w.lo, &w.hi,
                  &tail) != 2)
    die(kConfigError, "--window: expected A:B with integer bounds, got `" +
                          text + "`");
  return w;
}

ordered_json window_json(const Window& w) {
  ordered_json j;
  j["n_lo"] = w.lo;
  j["n_hi"] = w.hi;
  return j;
}

struct ComputeBlock {
  double p = 2.0;
  int32_t n_min = 0, n_max = 0;
  mlab_series_kind kind = MLAB_KIND_MARKOV_Y;
  mlab_method method = MLAB_METHOD_EXACT_EIGEN;
  uint64_t seed = 1;
  int64_t budget = 100000;
  double x_lo = -1.0;
};

ComputeBlock compute_of(const tomllite::Table& cfg, int32_t dflt_n_min,
                        int32_t dflt_n_max,
                        const std::optional<uint64_t>& seed_flag) {
  ComputeBlock cb;
  cb.p = cfg.num_or("compute.p", 2.0);
  cb.n_min = int32_t(cfg.integer_or("compute.n_min", dflt_n_min));
  cb.n_max = int32_t(cfg.integer_or("compute.n_max", dflt_n_max));
  std::string axis = cfg.str_or("compute.axis", "y");
  if (axis == "x")
    cb.kind = MLAB_KIND_MARKOV_X;
  else if (axis == "y")
    cb.kind = MLAB_KIND_MARKOV_Y;
  else
    die(kConfigError, "compute.axis: expected \"x\" or \"y\", got `" + axis +
                          "`");
  std::string method = cfg.str_or("compute.method", "eigen");
  if (method == "search")
    cb.method = MLAB_METHOD_SEARCH;
  else if (method != "eigen")
    die(kConfigError,
        "compute.method: expected \"eigen\" or \"search\", got `" + method +
            "`");
  cb.seed = seed_flag ? *seed_flag : uint64_t(cfg.integer_or("compute.seed", 1));
  cb.budget = cfg.integer_or("compute.budget", 100000);
  cb.x_lo = cfg.num_or("compute.x_lo", -1.0);
  return cb;
}

// shared by markov and remez: run the series, write the CSV (possibly
// partial), attach the fit, and return the command exit code
int run_series(const tomllite::Table& cfg, const std::string& dir,
               const ComputeBlock& cb, int32_t threads, const Window& win,
               bool remez) {
  Domain dom;
  make_domain(cfg, dom);
  mlab_quad_opts q = quad_of(cfg);

  int32_t cap = std::max(cb.n_max - cb.n_min + 1, 1);
  std::vector<int32_t> ns(static_cast<size_t>(cap));
  std::vector<double> vals(static_cast<size_t>(cap));
  int32_t count = 0;
  mlab_status st = mlab_factor_series(
      dom.d, remez ? MLAB_KIND_REMEZ : cb.kind, cb.p, cb.n_min, cb.n_max,
      cb.method, cb.budget, cb.seed, &q, remez ? cb.x_lo : -1.0, threads,
      ns.data(), vals.data(), cap, &count);

  std::string csv = remez ? "n,x_lo,ratio\n" : "n,factor,ln_n,ln_factor,method\n";
  for (int32_t i = 0; i < count; ++i) {
    if (remez) {
      double x_lo = cb.x_lo >= 0.0 ? cb.x_lo : 1.0 / (double(ns[i]) * ns[i]);
      csv += std::to_string(ns[i]) + "," + sig17(x_lo) + "," + sig17(vals[i]) +
             "\n";
    } else {
      csv += std::to_string(ns[i]) + "," + sig17(vals[i]) + "," +
             sig17(std::log(double(ns[i]))) + "," + sig17(std::log(vals[i])) +
             "," + (cb.method == MLAB_METHOD_SEARCH ? "search" : "eigen") +
             "\n";
    }
  }
  const char* base = remez ? "remez" : "markov";
  if (wants_format(cfg, "csv"))
    write_file(dir + "/" + base + ".csv", csv);

  ordered_json summary;
  summary["command"] = base;
  summary["domain"] = domain_json(cfg);
  summary["p"] = cb.p;
  if (!remez) {
    summary["axis"] = cb.kind == MLAB_KIND_MARKOV_X ? "x" : "y";
    summary["method"] = cb.method == MLAB_METHOD_SEARCH ? "search" : "eigen";
    if (cb.method == MLAB_METHOD_SEARCH) {
      summary["seed"] = cb.seed;
      summary["budget"] = cb.budget;
    }
  } else if (cb.x_lo >= 0.0) {
    summary["x_lo_override"] = cb.x_lo;
  }
  summary["n_min"] = cb.n_min;
  summary["n_max"] = cb.n_max;
  summary["points"] = count;
  if (st != MLAB_OK) summary["error"] = mlab_last_error();

  if (remez) {
    double min_ratio = 0.0, r7 = 0.0, r14 = 0.0;
    for (int32_t i = 0; i < count; ++i) {
      if (i == 0 || vals[i] < min_ratio) min_ratio = vals[i];
      if (ns[i] == 7) r7 = vals[i];
      if (ns[i] == 14) r14 = vals[i];
    }
    if (count > 0) summary["min_ratio"] = min_ratio;
    if (r7 > 0.0 && r14 > 0.0) summary["ratio_14_over_7"] = r14 / r7;
  } else if (count >= 2) {
    Window fw = win;
    if (fw.lo == 0 && fw.hi == 0) {
      // default to the last doubling window: the head of a short series is
      // preasymptotic and drags the slope away from the growth exponent
      fw.lo = std::max(cb.n_min, (cb.n_max + 1) / 2);
      fw.hi = cb.n_max;
    }
    double slope = 0.0, intercept = 0.0, rms = 0.0;
    mlab_status fst = mlab_fit_exponent(ns.data(), vals.data(), count, fw.lo,
                                        fw.hi, &slope, &intercept, &rms);
    if (fst == MLAB_OK) {
      ordered_json fit;
      fit["slope"] = slope;
      fit["intercept"] = intercept;
      fit["residual_rms"] = rms;
      fit["window"] = window_json(fw);
      summary["fit"] = fit;
    } else {
      summary["fit_error"] = mlab_last_error();
    }
  }

  emit_summary(cfg, dir, std::string(base) + "_summary.json", summary);
  return exit_code_of(st);
}

int cmd_check(const tomllite::Table& cfg, const std::string& dir) {
  Domain dom;
  make_domain(cfg, dom);

  mlab_validity_report rep;
  mlab_status st = mlab_domain_validate(dom.d, 0, &rep);
  if (st != MLAB_OK)
    die(exit_code_of(st), std::string("validate: ") + mlab_last_error());

  ordered_json report;
  report["command"] = "check";
  report["domain"] = domain_json(cfg);
  report["valid"] = rep.valid != 0;
  ordered_json checks = ordered_json::array();
  for (int32_t i = 0; i < rep.num_checks; ++i) {
    ordered_json c;
    c["name"] = rep.checks[i].name;
    c["pass"] = rep.checks[i].pass != 0;
    c["worst_x"] = rep.checks[i].worst_x;
    c["violation"] = rep.checks[i].violation;
    checks.push_back(c);
  }
  report["checks"] = checks;

  // extrapolated Markov exponent from the boundary derivative decay
  bool power = cfg.str("domain.family") == "power";
  mlab_exponent_model model =
      power ? MLAB_MODEL_INVLOG : MLAB_MODEL_INVLOG_LOGLOG;
  const int64_t n_max = int64_t(1) << 20;
  int64_t ns[32];
  double taus[32];
  int32_t count = 0;
  double extrapolated = 0.0, rms = 0.0;
  st = mlab_domain_predicted_exponent(dom.d, n_max, model, ns, taus, 32,
                                      &count, &extrapolated, &rms);
  if (st == MLAB_OK) {
    ordered_json pe;
    pe["model"] = power ? "inverse_log" : "inverse_log_plus_loglog";
    pe["n_max"] = n_max;
    pe["extrapolated"] = extrapolated;
    pe["residual_rms"] = rms;
    ordered_json seq = ordered_json::array();
    for (int32_t i = 0; i < count; ++i) {
      ordered_json row;
      row["n"] = ns[i];
      row["tau"] = taus[i];
      seq.push_back(row);
    }
    pe["sequence"] = seq;
    report["predicted_exponent"] = pe;
  } else {
    report["predicted_exponent_error"] = mlab_last_error();
  }

  emit_summary(cfg, dir, "check.json", report);
  return rep.valid ? kOk : kHypothesisError;
}

int cmd_witness(const tomllite::Table& cfg, const std::string& dir,
                int32_t threads) {
  (void)threads;  // witness degrees are cheap; the series runs serially
  Domain dom;
  make_domain(cfg, dom);
  mlab_quad_opts q = quad_of(cfg);

  double p = cfg.num_or("compute.p", 2.0);
  auto n_min = int32_t(cfg.integer_or("compute.n_min", 10));
  auto n_max = int32_t(cfg.integer_or("compute.n_max", 30));
  double sigma = cfg.num_or("witness.sigma", 0.0);
  auto k = int32_t(cfg.integer("domain.k"));

  double omega = 0.0;
  bool omega_auto = !cfg.has("witness.omega") ||
                    (cfg.is_string("witness.omega") &&
                     cfg.str("witness.omega") == "auto");
  if (omega_auto) {
    mlab_status st = mlab_auto_omega(p, k, &omega);
    if (st != MLAB_OK)
      die(exit_code_of(st), std::string("auto omega: ") + mlab_last_error());
  } else if (cfg.is_string("witness.omega")) {
    die(kConfigError, "witness.omega: expected a number or \"auto\"");
  } else {
    omega = cfg.num("witness.omega");
  }

  int32_t admissible = 0;
  mlab_status st = mlab_admissible(omega, p, k, &admissible);
  if (st != MLAB_OK)
    die(exit_code_of(st), std::string("admissible: ") + mlab_last_error());

  ordered_json summary;
  summary["command"] = "witness";
  summary["domain"] = domain_json(cfg);
  summary["omega"] = omega;
  summary["omega_auto"] = omega_auto;
  summary["sigma"] = sigma;
  summary["p"] = p;
  summary["n_min"] = n_min;
  summary["n_max"] = n_max;
  summary["admissible"] = admissible != 0;

  std::string csv = "n,rho,eta_prime,normalized\n";
  int exit_code = kOk;
  if (!admissible) {
    // the lower-bound construction does not apply; report and move on
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "weights (omega=%g, sigma=%g, p=%g) are not admissible for "
                  "k=%d; series skipped",
                  omega, sigma, p, int(k));
    summary["warnings"] = ordered_json::array({buf});
    summary["points"] = 0;
  } else {
    int32_t cap = std::max(n_max - n_min + 1, 1);
    std::vector<int32_t> ns(static_cast<size_t>(cap));
    std::vector<double> rho(static_cast<size_t>(cap));
    std::vector<double> eta(static_cast<size_t>(cap));
    std::vector<double> norm(static_cast<size_t>(cap));
    int32_t count = 0;
    st = mlab_witness_series(dom.d, omega, sigma, p, n_min, n_max, &q,
                             ns.data(), rho.data(), eta.data(), norm.data(),
                             cap, &count);
    for (int32_t i = 0; i < count; ++i)
      csv += std::to_string(ns[i]) + "," + sig17(rho[i]) + "," +
             sig17(eta[i]) + "," + sig17(norm[i]) + "\n";
    summary["points"] = count;
    if (count > 0) {
      double min_norm = norm[0];
      for (int32_t i = 1; i < count; ++i) min_norm = std::min(min_norm, norm[i]);
      summary["normalized_first"] = norm[0];
      summary["normalized_min"] = min_norm;
    }
    if (st != MLAB_OK) {
      summary["error"] = mlab_last_error();
      exit_code = exit_code_of(st);
    }
  }

  if (wants_format(cfg, "csv")) write_file(dir + "/witness.csv", csv);
  emit_summary(cfg, dir, "witness_summary.json", summary);
  return exit_code;
}

int cmd_fit(const std::string& csv_path, const std::string& dir,
            const Window& win) {
  std::ifstream in(csv_path);
  if (!in) die(kConfigError, "cannot read CSV " + csv_path);

  auto split = [](const std::string& line) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    return cells;
  };

  std::string header;
  if (!std::getline(in, header))
    die(kConfigError, "malformed CSV " + csv_path + ": empty file");
  auto cols = split(header);
  int n_col = -1, value_col = -1;
  for (size_t i = 0; i < cols.size(); ++i) {
    if (cols[i] == "n") n_col = int(i);
    if (cols[i] == "factor") value_col = int(i);
  }
  if (n_col < 0 || value_col < 0)
    die(kConfigError, "malformed CSV " + csv_path +
                          ": header must carry `n` and `factor` columns");

  std::vector<int32_t> ns;
  std::vector<double> vals;
  std::string line;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    auto cells = split(line);
    if (int(cells.size()) <= std::max(n_col, value_col))
      die(kConfigError, "malformed CSV " + csv_path + ":" +
                            std::to_string(lineno) + ": short row");
    char* end = nullptr;
    long n = std::strtol(cells[size_t(n_col)].c_str(), &end, 10);
    if (end != cells[size_t(n_col)].c_str() + cells[size_t(n_col)].size())
      die(kConfigError, "malformed CSV " + csv_path + ":" +
                            std::to_string(lineno) + ": bad n value");
    double v = std::strtod(cells[size_t(value_col)].c_str(), &end);
    if (end != cells[size_t(value_col)].c_str() + cells[size_t(value_col)].size())
      die(kConfigError, "malformed CSV " + csv_path + ":" +
                            std::to_string(lineno) + ": bad factor value");
    ns.push_back(int32_t(n));
    vals.push_back(v);
  }

  double slope = 0.0, intercept = 0.0, rms = 0.0;
  mlab_status st =
      mlab_fit_exponent(ns.data(), vals.data(), int32_t(ns.size()), win.lo,
                        win.hi, &slope, &intercept, &rms);
  if (st != MLAB_OK)
    die(exit_code_of(st), std::string("fit: ") + mlab_last_error());

  int32_t used = 0;
  for (size_t i = 0; i < ns.size(); ++i) {
    bool in_window = (win.lo == 0 || ns[i] >= win.lo) &&
                     (win.hi == 0 || ns[i] <= win.hi);
    if (in_window && vals[i] > 0.0) ++used;
  }

  ordered_json out;
  out["command"] = "fit";
  out["input"] = csv_path;
  out["window"] = window_json(win);
  out["points_total"] = ns.size();
  out["points_used"] = used;
  out["slope"] = slope;
  out["intercept"] = intercept;
  out["residual_rms"] = rms;

  std::string text = out.dump(2) + "\n";
  write_file(dir + "/fit.json", text);
  std::fputs(text.c_str(), stdout);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "mlab " + std::string(mlab_version()) +
      " - Markov factors, Remez ratios and witness diagnostics for "
      "polynomials on cuspidal planar domains"};
  app.require_subcommand(1);

  std::string config, out_flag, window_str, in_csv;
  std::optional<uint64_t> seed_flag;
  int32_t threads = 0;

  auto add_common = [&](CLI::App* sub, bool needs_config) {
    if (needs_config)
      sub->add_option("--config", config, "TOML run configuration")
          ->required();
    sub->add_option("--out", out_flag,
                    "output directory (overrides output.directory)");
    sub->add_option_function<uint64_t>(
        "--seed", [&](const uint64_t& v) { seed_flag = v; },
        "seed override for the search method");
    sub->add_option("--threads", threads,
                    "worker threads (0 = $MLAB_THREADS, else 1)");
    sub->add_option("--window", window_str, "exponent-fit window A:B");
  };

  CLI::App* c_check = app.add_subcommand(
      "check", "validate domain hypotheses, report the predicted exponent");
  add_common(c_check, true);
  CLI::App* c_markov =
      app.add_subcommand("markov", "tabulate a Markov factor series");
  add_common(c_markov, true);
  CLI::App* c_witness =
      app.add_subcommand("witness", "tabulate witness ratio diagnostics");
  add_common(c_witness, true);
  CLI::App* c_remez = app.add_subcommand(
      "remez", "tabulate Remez ratios over the truncated domain");
  add_common(c_remez, true);
  CLI::App* c_fit =
      app.add_subcommand("fit", "fit the growth exponent from a factor CSV");
  c_fit->add_option("csv", in_csv, "factor CSV produced by `mlab markov`");
  c_fit->add_option("--in", in_csv, "same as the positional CSV argument");
  add_common(c_fit, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? kOk : kConfigError;
  }

  try {
    Window win = parse_window(window_str);
    tomllite::Table cfg;
    if (!config.empty()) cfg = tomllite::Table::parse_file(config);

    if (c_fit->parsed()) {
      if (in_csv.empty())
        die(kConfigError, "fit: a CSV path is required (positional or --in)");
      std::string dir = !out_flag.empty() ? out_flag : ".";
      std::error_code ec;
      std::filesystem::create_directories(dir, ec);
      if (ec) die(kConfigError, "cannot create output directory " + dir);
      return cmd_fit(in_csv, dir, win);
    }

    std::string dir = resolve_out_dir(cfg, out_flag);
    if (c_check->parsed()) return cmd_check(cfg, dir);
    if (c_witness->parsed()) return cmd_witness(cfg, dir, threads);
    if (c_markov->parsed()) {
      ComputeBlock cb = compute_of(cfg, 2, 10, seed_flag);
      return run_series(cfg, dir, cb, threads, win, /*remez=*/false);
    }
    ComputeBlock cb = compute_of(cfg, 2, 14, seed_flag);
    return run_series(cfg, dir, cb, threads, win, /*remez=*/true);
  } catch (const tomllite::ParseError& e) {
    die(kConfigError, e.what());
  } catch (const std::exception& e) {
    die(kNumericError, e.what());
  }
}
