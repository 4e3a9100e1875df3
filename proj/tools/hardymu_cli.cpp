// Command-line front end: inequality verification, optimality sweeps,
// moment cross-checks and the 1-D p-Kolmogorov simulation, with CSV and
// plot-ready artifacts.  Exit codes: 0 all checks pass, 1 usage/config
// error, 2 at least one failed check.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "hardymu/errors.hpp"
#include "hardymu/functionals.hpp"
#include "hardymu/measure.hpp"
#include "hardymu/optimality.hpp"
#include "hardymu/pde.hpp"
#include "hardymu/quadrature.hpp"
#include "hardymu/report.hpp"

namespace fs = std::filesystem;
using namespace hardymu;

namespace {

std::vector<std::string> split(const std::string& s, const std::string& seps) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : s) {
    if (seps.find(ch) != std::string::npos) {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

Eigen::MatrixXd parse_matrix(int d, const std::string& text) {
  if (text == "identity" || text == "I") return Eigen::MatrixXd::Identity(d, d);
  if (text.rfind("diag:", 0) == 0) {
    const auto parts = split(text.substr(5), ", ");
    if (static_cast<int>(parts.size()) != d)
      throw Error("matrix diag: expected " + std::to_string(d) + " entries");
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(d, d);
    for (int i = 0; i < d; ++i) A(i, i) = std::stod(parts[i]);
    return A;
  }
  const auto parts = split(text, ",; ");
  if (static_cast<int>(parts.size()) != d * d)
    throw Error("matrix literal: expected " + std::to_string(d * d) +
                " row-major entries, got " + std::to_string(parts.size()));
  Eigen::MatrixXd A(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) A(i, j) = std::stod(parts[i * d + j]);
  return A;
}

struct OutputDir {
  fs::path root;
  explicit OutputDir(const std::string& dir) : root(dir) {
    std::error_code ec;
    fs::create_directories(root / "plot", ec);
    if (ec || !fs::is_directory(root / "plot"))
      throw Error("output directory not writable: " + dir);
  }
  fs::path file(const std::string& name) const { return root / name; }
};

struct Summary {
  std::ostringstream text;
  int checks = 0, failures = 0;
  void provenance(const std::string& cmd,
                  const std::vector<std::pair<std::string, std::string>>& kv) {
    text << "command: " << cmd << "\n";
    for (const auto& [k, v] : kv) text << k << " = " << v << "\n";
    text << "\n";
  }
  void line(const std::string& s) { text << s << "\n"; }
  void check(const std::string& name, bool pass) {
    ++checks;
    if (!pass) ++failures;
    text << (pass ? "[PASS] " : "[FAIL] ") << name << "\n";
  }
  int finish(const OutputDir& out) {
    text << "\nchecks: " << checks << "  failures: " << failures << "\n";
    std::ofstream f(out.file("summary.txt"), std::ios::binary);
    f << text.str();
    std::cout << text.str();
    return failures == 0 ? 0 : 2;
  }
};

std::string num(double v) { return format_double(v); }

// Common problem-parameter flags.
struct ParamFlags {
  int d = 1;
  double p = 2.0;
  std::string A = "identity";
  double c = 1.0;
  double tol = 0.0;  // 0 = module defaults
  std::string out = "out";
  int seed = 0;
  std::string corpus_file;

  void attach(CLI::App* cmd) {
    cmd->add_option("--d", d, "dimension (1..3)");
    cmd->add_option("--p", p, "exponent p > 1");
    cmd->add_option("--A", A, "matrix: identity | diag:a,b,... | row-major literal");
    cmd->add_option("--c", c, "density scale c > 0");
    cmd->add_option("--tol", tol, "quadrature relative tolerance (0 = defaults)");
    cmd->add_option("--out", out, "output directory");
    cmd->add_option("--seed", seed, "corpus shuffling seed");
    cmd->add_option("--corpus", corpus_file, "corpus manifest (default: built-in)");
  }
  ProblemParams make() const { return ProblemParams(d, p, parse_matrix(d, A), c); }
  std::vector<std::pair<std::string, std::string>> echo() const {
    return {{"d", std::to_string(d)}, {"p", num(p)},      {"A", A},
            {"c", num(c)},            {"tol", tol > 0 ? num(tol) : "module-defaults"},
            {"seed", std::to_string(seed)}};
  }
  FunctionalOptions fopts() const {
    FunctionalOptions o;
    o.rel_tol = tol;
    return o;
  }
};

std::vector<CorpusEntry> load_corpus(const ParamFlags& pf) {
  if (pf.corpus_file.empty()) return default_corpus();
  std::ifstream in(pf.corpus_file);
  if (!in) throw Error("cannot read corpus manifest: " + pf.corpus_file);
  return parse_corpus(in);
}

// Evaluation order may be shuffled by the seed; artifacts stay sorted by
// corpus index, so re-runs are byte-identical.
std::vector<std::size_t> work_order(std::size_t n, int seed) {
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = i;
  if (seed != 0) {
    std::mt19937 rng(static_cast<unsigned>(seed));
    std::shuffle(idx.begin(), idx.end(), rng);
  }
  return idx;
}

struct DeficitRow {
  std::size_t index = 0;
  std::string fn, note;
  HardyReport rep;
  bool evaluated = false;
  bool skipped = false;
};

std::vector<DeficitRow> run_deficits(
    const std::vector<CorpusEntry>& corpus, const ProblemParams& params, int seed,
    const std::function<HardyReport(const TestFunction&)>& functional,
    bool compact_only) {
  std::vector<DeficitRow> rows(corpus.size());
  for (std::size_t i : work_order(corpus.size(), seed)) {
    DeficitRow& row = rows[i];
    row.index = i;
    row.fn = corpus[i].line;
    try {
      const TestFunction u = realize_corpus_entry(corpus[i], params);
      if (compact_only && !u.compact_support()) {
        row.skipped = true;
        row.note = "skipped: needs compact support away from 0";
        continue;
      }
      row.rep = functional(u);
      row.evaluated = true;
    } catch (const PreconditionError& e) {
      row.skipped = true;
      row.note = std::string("skipped: ") + e.what();
    } catch (const Error& e) {
      row.note = e.what();
    }
  }
  return rows;
}

void emit_deficit_artifacts(const std::vector<DeficitRow>& rows, const OutputDir& out,
                            const std::string& csv_name, Summary& summary) {
  CsvFile csv(out.file(csv_name),
              {"index", "function", "gradient_term", "hardy_term", "drift_term",
               "constant", "sign", "deficit", "error_budget", "pass"});
  std::vector<std::pair<double, double>> plot;
  int evaluated = 0, failed = 0, skipped = 0;
  for (const auto& row : rows) {
    if (row.skipped) {
      ++skipped;
      continue;
    }
    if (!row.evaluated) {
      ++failed;
      csv.row({std::to_string(row.index), row.fn, "", "", "", "", "", "", "", "0"});
      summary.line("  evaluation error on '" + row.fn + "': " + row.note);
      continue;
    }
    ++evaluated;
    const bool pass = row.rep.deficit >= -row.rep.error_budget;
    if (!pass) ++failed;
    csv.row({std::to_string(row.index), row.fn, num(row.rep.gradient_term),
             num(row.rep.hardy_term), num(row.rep.drift_term), num(row.rep.constant),
             std::to_string(row.rep.sign), num(row.rep.deficit),
             num(row.rep.error_budget), pass ? "1" : "0"});
    plot.emplace_back(static_cast<double>(row.index), row.rep.deficit);
  }
  write_plot_data(out.file("plot/deficit.dat"), plot);
  summary.line("corpus entries: " + std::to_string(rows.size()) + "  evaluated: " +
               std::to_string(evaluated) + "  skipped: " + std::to_string(skipped));
  summary.check("all deficits nonnegative within error budgets", failed == 0);
}

// ---- subcommand drivers ------------------------------------------------

int cmd_verify_hardy(const ParamFlags& pf) {
  const ProblemParams params = pf.make();
  OutputDir out(pf.out);
  Summary summary;
  summary.provenance("verify-hardy", pf.echo());
  summary.line("hardy constant C(d,p) = " + num(hardy_constant(pf.d, pf.p)));
  const auto corpus = load_corpus(pf);
  const auto rows = run_deficits(
      corpus, params, pf.seed,
      [&](const TestFunction& u) { return hardy_deficit(u, params, pf.fopts()); }, false);
  emit_deficit_artifacts(rows, out, "deficits.csv", summary);
  return summary.finish(out);
}

int cmd_verify_ckn(const ParamFlags& pf, const std::vector<double>& a_values,
                   const std::vector<double>& beta_values) {
  const ProblemParams params = pf.make();
  OutputDir out(pf.out);
  Summary summary;
  auto kv = pf.echo();
  for (double a : a_values) kv.emplace_back("a", num(a));
  for (double b : beta_values) kv.emplace_back("beta", num(b));
  summary.provenance("verify-ckn", kv);

  const auto corpus = load_corpus(pf);
  CsvFile csv(out.file("ckn.csv"),
              {"family", "parameter", "index", "function", "gradient_term", "hardy_term",
               "drift_term", "constant", "sign", "deficit", "error_budget", "pass"});
  std::vector<std::pair<double, double>> plot;
  int failed = 0;
  long plot_index = 0;

  auto run_family = [&](const std::string& family, double value,
                        const std::function<HardyReport(const TestFunction&)>& fnl) {
    const auto rows = run_deficits(corpus, params, pf.seed, fnl, true);
    for (const auto& row : rows) {
      if (row.skipped) continue;
      if (!row.evaluated) {
        ++failed;
        summary.line("  evaluation error on '" + row.fn + "': " + row.note);
        continue;
      }
      const bool pass = row.rep.deficit >= -row.rep.error_budget;
      if (!pass) ++failed;
      csv.row({family, num(value), std::to_string(row.index), row.fn,
               num(row.rep.gradient_term), num(row.rep.hardy_term),
               num(row.rep.drift_term), num(row.rep.constant), std::to_string(row.rep.sign),
               num(row.rep.deficit), num(row.rep.error_budget), pass ? "1" : "0"});
      plot.emplace_back(static_cast<double>(plot_index++), row.rep.deficit);
    }
  };

  for (double a : a_values)
    run_family("a", a, [&](const TestFunction& u) { return ckn_a_deficit(u, params, a, pf.fopts()); });
  for (double b : beta_values)
    run_family("beta", b,
               [&](const TestFunction& u) { return ckn_beta_deficit(u, params, b, pf.fopts()); });
  write_plot_data(out.file("plot/deficit.dat"), plot);
  summary.check("all CKN deficits nonnegative within error budgets", failed == 0);

  // Reduction identities on the compactly supported corpus entries.
  CsvFile red(out.file("reductions.csv"),
              {"identity", "index", "function", "lhs_deficit", "rhs_deficit", "allowed",
               "pass"});
  int red_failed = 0;
  auto reduction = [&](const std::string& name, const HardyReport& lhs,
                       const HardyReport& rhs, std::size_t index, const std::string& fn) {
    const double allowed = 2.0 * (lhs.error_budget + rhs.error_budget);
    const bool pass = std::abs(lhs.deficit - rhs.deficit) <= allowed;
    if (!pass) ++red_failed;
    red.row({name, std::to_string(index), fn, num(lhs.deficit), num(rhs.deficit),
             num(allowed), pass ? "1" : "0"});
  };
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    TestFunction u = TestFunction::bump(1.0, 0.5);
    try {
      u = realize_corpus_entry(corpus[i], params);
    } catch (const Error&) {
      continue;
    }
    if (!u.compact_support()) continue;
    try {
      const HardyReport h = hardy_deficit(u, params, pf.fopts());
      reduction("a=0 vs hardy", ckn_a_deficit(u, params, 0.0, pf.fopts()), h, i,
                corpus[i].line);
      reduction("beta=0 vs hardy", ckn_beta_deficit(u, params, 0.0, pf.fopts()), h, i,
                corpus[i].line);
      for (double a : a_values)
        if (a != 0.0)
          reduction("beta=pa vs a", ckn_beta_deficit(u, params, params.p() * a, pf.fopts()),
                    ckn_a_deficit(u, params, a, pf.fopts()), i, corpus[i].line);
    } catch (const Error& e) {
      ++red_failed;
      summary.line(std::string("  reduction-identity evaluation error: ") + e.what());
    }
  }
  summary.check("CKN reduction identities hold within 2x combined budgets",
                red_failed == 0);
  return summary.finish(out);
}

int cmd_verify_poincare(const ParamFlags& pf) {
  if (!(pf.p > pf.d))
    throw Error("verify-poincare: precondition p > d violated");
  const ProblemParams params = pf.make();
  if (!params.positive_definite())
    throw Error("verify-poincare: A must be positive definite");
  OutputDir out(pf.out);
  Summary summary;
  summary.provenance("verify-poincare", pf.echo());
  const auto corpus = load_corpus(pf);

  CsvFile csv(out.file("poincare.csv"),
              {"index", "function", "gradient_term", "mass_term", "constant", "value",
               "error_budget", "pass"});
  std::vector<std::pair<double, double>> plot;
  int failed = 0;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    TestFunction u = TestFunction::bump(1.0, 0.5);
    try {
      u = realize_corpus_entry(corpus[i], params);
    } catch (const PreconditionError&) {
      continue;
    }
    try {
      const PoincareReport rep = poincare_deficit_detail(u, params, pf.fopts());
      const bool pass = rep.value >= -rep.error_budget;
      if (!pass) ++failed;
      csv.row({std::to_string(i), corpus[i].line, num(rep.gradient_term),
               num(rep.mass_term), num(rep.constant), num(rep.value),
               num(rep.error_budget), pass ? "1" : "0"});
      plot.emplace_back(static_cast<double>(i), rep.value);
    } catch (const Error& e) {
      ++failed;
      summary.line("  evaluation error on '" + corpus[i].line + "': " + e.what());
    }
  }
  write_plot_data(out.file("plot/poincare.dat"), plot);
  summary.check("all Poincare deficits nonnegative within error budgets", failed == 0);
  return summary.finish(out);
}

int cmd_check_moments(const ParamFlags& pf) {
  OutputDir out(pf.out);
  Summary summary;
  summary.provenance("check-moments", pf.echo());
  const double check_tol = pf.tol > 0.0 ? pf.tol : (pf.d == 1 ? 1e-8 : 1e-5);
  CsvFile csv(out.file("moments.csv"), {"d", "p", "beta", "alpha", "closed_form",
                                        "quadrature", "rel_err", "tol", "pass"});
  std::vector<std::pair<double, double>> plot;
  int failed = 0;
  long idx = 0;
  const double beta_lo = -static_cast<double>(pf.d) / pf.p + 0.1;
  for (double beta : {beta_lo, 0.0, 0.5, 1.0, 2.0}) {
    for (double alpha : {0.5, 1.0, 2.0}) {
      const double exact = closed_form_moment(pf.d, pf.p, beta, alpha);
      const ProblemParams iso(pf.d, pf.p,
                              alpha * Eigen::MatrixXd::Identity(pf.d, pf.d), 1.0);
      RadialOptions ropts;
      ropts.rel_tol = pf.d == 1 ? 1e-10 : 1e-8;
      ropts.power_shift = pf.p * beta;
      const IntegralResult quad =
          radial_integral([](double) { return 1.0; }, pf.d, iso, ropts);
      const double rel = std::abs(quad.value - exact) / std::abs(exact);
      const bool pass = rel <= check_tol;
      if (!pass) ++failed;
      csv.row({std::to_string(pf.d), num(pf.p), num(beta), num(alpha), num(exact),
               num(quad.value), num(rel), num(check_tol), pass ? "1" : "0"});
      plot.emplace_back(static_cast<double>(idx++), rel);
    }
  }
  write_plot_data(out.file("plot/moment_relerr.dat"), plot);
  summary.check("closed-form moments match radial quadrature", failed == 0);
  return summary.finish(out);
}

int cmd_sweep_optimality(const ParamFlags& pf, double lambda, int gamma_points, double big_m) {
  const ProblemParams params = pf.make();
  OutputDir out(pf.out);
  Summary summary;
  auto kv = pf.echo();
  kv.emplace_back("lambda", num(lambda));
  kv.emplace_back("gamma-points", std::to_string(gamma_points));
  kv.emplace_back("M", num(big_m));
  summary.provenance("sweep-optimality", kv);

  SweepOptions sopts;
  if (pf.tol > 0.0) sopts.rel_tol = pf.tol;
  const SweepResult res = optimality_sweep(lambda, params, gamma_points, big_m, sopts);
  {
    std::ofstream csv(out.file("sweep.csv"), std::ios::binary);
    write_sweep_csv(res, csv);
  }
  std::vector<std::pair<double, double>> plot;
  for (std::size_t i = 0; i < res.gamma_values.size(); ++i)
    plot.emplace_back(res.gamma_values[i], res.quotients[i]);
  write_plot_data(out.file("plot/quotient.dat"), plot);

  const double C = hardy_constant(pf.d, pf.p);
  summary.line("C(d,p) = " + num(C) + ", lambda = " + num(lambda) +
               (lambda > C ? " (supercritical)" : " (subcritical or critical)"));
  summary.line(std::string("diverged = ") + (res.diverged ? "true" : "false"));
  if (res.crossing_gamma)
    summary.line("crossing gamma = " + num(*res.crossing_gamma));
  if (res.n_failed > 0)
    summary.line("quadrature failures at " + std::to_string(res.n_failed) + " points");
  if (!res.breakdown_note.empty()) summary.line("breakdown: " + res.breakdown_note);
  summary.check("sweep completed", true);
  return summary.finish(out);
}

// PDE option bundle shared by simulate-pde and probe-nonexistence.
struct PdeFlags {
  double p = 1.5, lambda = 0.0, m = 1e4, delta = 1e-8, dt = 1e-4, T = 1.0, theta = 1.0;
  double xmin = 1e-3, xmax = 0.0, grading = 2.0, alpha = 1.0, c = 1.0;
  int nodes = 400, snapshot_stride = 0;
  std::string u0 = "bump:0.6,0.4", forcing = "zero", out = "out", config;
  std::string bc = "dirichlet-left";

  CLI::Option *o_p = nullptr, *o_lambda = nullptr, *o_m = nullptr, *o_delta = nullptr,
              *o_dt = nullptr, *o_T = nullptr, *o_theta = nullptr, *o_xmin = nullptr,
              *o_xmax = nullptr, *o_grading = nullptr, *o_alpha = nullptr,
              *o_nodes = nullptr, *o_stride = nullptr, *o_u0 = nullptr,
              *o_forcing = nullptr, *o_out = nullptr, *o_bc = nullptr;

  void attach(CLI::App* cmd) {
    cmd->add_option("--config", config, "key-value config file (flags win)");
    o_p = cmd->add_option("--p", p, "exponent p in (1, inf)");
    o_lambda = cmd->add_option("--lambda", lambda, "potential strength");
    o_m = cmd->add_option("--m", m, "potential truncation level");
    o_delta = cmd->add_option("--delta", delta, "gradient regularization");
    o_dt = cmd->add_option("--dt", dt, "time step");
    o_T = cmd->add_option("--T", T, "horizon");
    o_theta = cmd->add_option("--theta", theta, "implicitness in [0,1]");
    o_xmin = cmd->add_option("--xmin", xmin, "left domain truncation");
    o_xmax = cmd->add_option("--xmax", xmax, "right domain truncation (0 = tail rule)");
    o_grading = cmd->add_option("--grading", grading, "mesh grading exponent >= 1");
    o_alpha = cmd->add_option("--alpha", alpha, "measure matrix A = [alpha]");
    o_nodes = cmd->add_option("--nodes", nodes, "node count");
    o_stride = cmd->add_option("--snapshot-stride", snapshot_stride,
                               "state snapshot stride (0 = auto)");
    o_u0 = cmd->add_option("--u0", u0, "initial datum: zero | bump:r0,w[,amp]");
    o_forcing = cmd->add_option("--forcing", forcing,
                                "forcing: zero | const:v | bump:r0,w[,amp]");
    o_out = cmd->add_option("--out", out, "output directory");
    o_bc = cmd->add_option("--bc", bc, "boundary treatment: dirichlet-left | zero-flux");
  }

  // Config file supplies values for flags that were not passed on argv.
  void merge_config() {
    if (config.empty()) return;
    const auto kv = read_config_file(config);
    auto use = [&](CLI::Option* opt, const char* key, auto& slot) {
      const auto it = kv.find(key);
      if (it == kv.end() || (opt && opt->count() > 0)) return;
      std::istringstream is(it->second);
      is >> slot;
      if (is.fail()) throw Error(std::string("config: bad value for ") + key);
    };
    use(o_xmin, "grid.xmin", xmin);
    use(o_xmax, "grid.xmax", xmax);
    use(o_nodes, "grid.nodes", nodes);
    use(o_grading, "grid.grading", grading);
    use(o_p, "pde.p", p);
    use(o_lambda, "pde.lambda", lambda);
    use(o_m, "pde.m", m);
    use(o_delta, "pde.delta", delta);
    use(o_dt, "pde.dt", dt);
    use(o_T, "pde.T", T);
    use(o_theta, "pde.theta", theta);
    use(o_alpha, "pde.alpha", alpha);
    use(o_u0, "pde.u0", u0);
    use(o_bc, "pde.bc", bc);
    use(o_forcing, "forcing.expr", forcing);
    use(o_out, "output.dir", out);
    use(o_stride, "output.snapshot_stride", snapshot_stride);
  }

  ProblemParams measure_params() const {
    Eigen::MatrixXd A(1, 1);
    A(0, 0) = alpha;
    return ProblemParams(1, p, A, c);
  }
  PdeConfig config_struct() const {
    PdeConfig cfg;
    cfg.p = p;
    cfg.lambda = lambda;
    cfg.m = m;
    cfg.delta = delta;
    cfg.dt = dt;
    cfg.T = T;
    cfg.theta = theta;
    cfg.bc = bc;
    cfg.snapshot_stride = snapshot_stride > 0
                              ? snapshot_stride
                              : std::max(1, static_cast<int>(T / dt / 200.0));
    return cfg;
  }
  Grid1D grid(const ProblemParams& params) const {
    const double hi = xmax > 0.0 ? xmax : tail_radius(p, alpha);
    return make_graded_grid(params, xmin, hi, nodes, grading);
  }
  std::vector<std::pair<std::string, std::string>> echo() const {
    return {{"p", num(p)},         {"lambda", num(lambda)}, {"m", num(m)},
            {"delta", num(delta)}, {"dt", num(dt)},         {"T", num(T)},
            {"theta", num(theta)}, {"xmin", num(xmin)},     {"xmax", num(xmax)},
            {"nodes", std::to_string(nodes)},               {"grading", num(grading)},
            {"alpha", num(alpha)}, {"u0", u0},              {"forcing", forcing},
            {"bc", bc}};
  }
};

Eigen::VectorXd make_datum(const std::string& text, const Grid1D& grid) {
  Eigen::VectorXd u0 = Eigen::VectorXd::Zero(grid.size());
  if (text == "zero") return u0;
  if (text.rfind("bump:", 0) == 0) {
    const auto parts = split(text.substr(5), ",");
    if (parts.size() < 2 || parts.size() > 3) throw Error("u0 bump: expected r0,w[,amp]");
    const double r0 = std::stod(parts[0]), w = std::stod(parts[1]);
    const double amp = parts.size() == 3 ? std::stod(parts[2]) : 1.0;
    const TestFunction b = TestFunction::bump(r0, w).scaled(amp);
    for (int i = 0; i < grid.size(); ++i) u0(i) = b.value(grid.x(i));
    return u0;
  }
  throw Error("unknown initial datum: " + text);
}

ForcingFn make_forcing(const std::string& text) {
  if (text == "zero") return [](double, double) { return 0.0; };
  if (text.rfind("const:", 0) == 0) {
    const double v = std::stod(text.substr(6));
    if (v < 0.0) throw Error("forcing must be nonnegative");
    return [v](double, double) { return v; };
  }
  if (text.rfind("bump:", 0) == 0) {
    const auto parts = split(text.substr(5), ",");
    if (parts.size() < 2 || parts.size() > 3) throw Error("forcing bump: expected r0,w[,amp]");
    const double r0 = std::stod(parts[0]), w = std::stod(parts[1]);
    const double amp = parts.size() == 3 ? std::stod(parts[2]) : 1.0;
    if (amp < 0.0) throw Error("forcing must be nonnegative");
    const TestFunction b = TestFunction::bump(r0, w).scaled(amp);
    return [b](double x, double) { return b.value(x); };
  }
  throw Error("unknown forcing: " + text);
}

void emit_pde_artifacts(const SolveReport& report, const StateHistory& snaps,
                        const Grid1D& grid, const OutputDir& out) {
  CsvFile hist(out.file("history.csv"), {"t", "norm", "bound"});
  std::vector<std::pair<double, double>> tn, tb;
  for (std::size_t i = 0; i < report.history.size(); ++i) {
    const auto& [t, norm] = report.history[i];
    const double bound = report.bound_history[i].second;
    hist.row({num(t), num(norm), num(bound)});
    tn.emplace_back(t, norm);
    tb.emplace_back(t, bound);
  }
  write_plot_data(out.file("plot/t_norm.dat"), tn);
  write_plot_data(out.file("plot/t_bound.dat"), tb);

  CsvFile states(out.file("states.csv"), {"t", "x", "u"});
  for (std::size_t s = 0; s < snaps.times.size(); ++s)
    for (int i = 0; i < grid.size(); ++i)
      states.row({num(snaps.times[s]), num(grid.x(i)), num(snaps.states[s](i))});

  nlohmann::json j;
  j["history"] = report.history;
  j["bound_history"] = report.bound_history;
  j["blowup"] = report.blowup;
  if (report.blowup_time) j["blowup_time"] = *report.blowup_time;
  j["refinement_tag"] = report.refinement_tag;
  j["aborted"] = report.aborted;
  j["overflow"] = report.overflow;
  j["note"] = report.note;
  j["clipped_nodes"] = report.clipped_nodes;
  j["u0_norm"] = report.u0_norm;
  std::ofstream jf(out.file("report.json"), std::ios::binary);
  jf << j.dump(2) << '\n';
}

int cmd_simulate_pde(PdeFlags& pdef) {
  pdef.merge_config();
  const ProblemParams params = pdef.measure_params();
  const Grid1D grid = pdef.grid(params);
  const PdeConfig cfg = pdef.config_struct();
  cfg.validate();
  OutputDir out(pdef.out);
  Summary summary;
  summary.provenance("simulate-pde", pdef.echo());

  const Eigen::VectorXd u0 = make_datum(pdef.u0, grid);
  const ForcingFn f = make_forcing(pdef.forcing);
  StateHistory snaps;
  const SolveReport report = solve(cfg, grid, u0, f, &snaps);
  emit_pde_artifacts(report, snaps, grid, out);

  summary.line("note: " + report.note);
  summary.line("refinement: " + report.refinement_tag);
  summary.line(std::string("blowup = ") + (report.blowup ? "true" : "false"));
  if (report.blowup_time) summary.line("blowup_time = " + num(*report.blowup_time));
  if (report.aborted) summary.line("run aborted at the dt halving floor");

  const double C = hardy_constant(1, cfg.p);
  if (cfg.lambda <= 0.9 * C || cfg.lambda == 0.0) {
    // Subcritical runs must respect the norm growth bound.
    const double slack = 1.0 + 5.0 * grid.max_spacing();
    bool ok = !report.blowup && !report.aborted;
    for (std::size_t i = 0; i < report.history.size() && ok; ++i)
      ok = report.history[i].second <= slack * report.bound_history[i].second +
                                           1e-12 * report.u0_norm;
    summary.check("subcritical norm stays under the growth bound", ok);
  } else {
    summary.check("simulation completed", !report.aborted);
  }
  return summary.finish(out);
}

int cmd_probe_nonexistence(PdeFlags& pdef, std::vector<int> ks, const std::string& phi_text) {
  pdef.merge_config();
  if (!(pdef.p > 1.0 && pdef.p < 2.0))
    throw Error("probe-nonexistence: requires 1 < p < 2");
  const ProblemParams params = pdef.measure_params();
  const Grid1D grid = pdef.grid(params);
  PdeConfig cfg = pdef.config_struct();
  cfg.snapshot_stride = 1;
  cfg.validate();
  OutputDir out(pdef.out);
  Summary summary;
  auto kv = pdef.echo();
  kv.emplace_back("phi", phi_text);
  summary.provenance("probe-nonexistence", kv);

  TestFunction phi = TestFunction::bump(1.0, 0.6);
  if (phi_text.rfind("bump:", 0) == 0) {
    const auto parts = split(phi_text.substr(5), ",");
    if (parts.size() != 2) throw Error("phi bump: expected r0,w");
    phi = TestFunction::bump(std::stod(parts[0]), std::stod(parts[1]));
  } else if (phi_text != "default") {
    throw Error("unknown phi: " + phi_text);
  }

  const Eigen::VectorXd u0 = make_datum(pdef.u0, grid);
  const ForcingFn f = make_forcing(pdef.forcing);
  StateHistory snaps;
  const SolveReport report = solve(cfg, grid, u0, f, &snaps);
  emit_pde_artifacts(report, snaps, grid, out);

  if (ks.empty()) ks = {1, 4, 16};
  std::sort(ks.begin(), ks.end());
  CsvFile csv(out.file("probe.csv"),
              {"k", "t", "lhs_growth", "rhs_cap", "margin", "budget", "pass"});
  const double budget_scale = 5.0 * (grid.max_spacing() + cfg.dt);
  int failed = 0;
  std::vector<std::pair<double, double>> plot;
  const double t_final = snaps.times.back();
  for (double frac : {0.25, 0.5, 0.75, 1.0}) {
    const double t_req = frac * t_final;
    const auto it = std::lower_bound(snaps.times.begin(), snaps.times.end(), t_req);
    const double t = it == snaps.times.end() ? snaps.times.back() : *it;
    double prev_lhs = -1.0;
    for (int k : ks) {
      const GkProbe probe = gk_nonexistence_probe(snaps, cfg, grid, phi, k, t);
      const double budget =
          budget_scale * std::max({std::abs(probe.lhs_growth), std::abs(probe.rhs_cap), 1e-12});
      const bool pass = probe.lhs_growth <= probe.rhs_cap + budget &&
                        probe.lhs_growth >= prev_lhs - budget;
      if (!pass) ++failed;
      csv.row({std::to_string(k), num(t), num(probe.lhs_growth), num(probe.rhs_cap),
               num(probe.rhs_cap - probe.lhs_growth), num(budget), pass ? "1" : "0"});
      prev_lhs = probe.lhs_growth;
      if (k == ks.back()) plot.emplace_back(t, probe.lhs_growth / probe.rhs_cap);
    }
  }
  write_plot_data(out.file("plot/probe_ratio.dat"), plot);
  summary.check("g_k caps hold and lhs is monotone in k", failed == 0);
  return summary.finish(out);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"weighted Hardy/Poincare/CKN inequality toolkit and 1-D p-Kolmogorov solver"};
  app.require_subcommand(1);

  ParamFlags hardy_pf, ckn_pf, poincare_pf, moments_pf, sweep_pf;
  std::vector<double> a_values, beta_values;
  double lambda = 0.25, big_m = 10.0;
  int gamma_points = 20;
  PdeFlags sim_pdef, probe_pdef;
  std::vector<int> probe_ks;
  std::string phi_text = "default";

  auto* c_hardy = app.add_subcommand("verify-hardy", "Hardy deficits over the corpus");
  hardy_pf.attach(c_hardy);
  auto* c_ckn = app.add_subcommand("verify-ckn", "CKN deficits and reduction identities");
  ckn_pf.attach(c_ckn);
  c_ckn->add_option("--a", a_values, "CKN gradient-weight exponents a");
  c_ckn->add_option("--beta", beta_values, "CKN gradient-weight exponents beta");
  auto* c_poincare = app.add_subcommand("verify-poincare", "Poincare deficits (p > d)");
  poincare_pf.attach(c_poincare);
  auto* c_moments = app.add_subcommand("check-moments", "closed-form vs quadrature moments");
  moments_pf.attach(c_moments);
  auto* c_sweep = app.add_subcommand("sweep-optimality", "shifted-quotient sweep toward 1-d/p");
  sweep_pf.attach(c_sweep);
  c_sweep->add_option("--lambda", lambda, "shift strength");
  c_sweep->add_option("--gamma-points", gamma_points, "number of sweep points");
  c_sweep->add_option("--M", big_m, "divergence threshold");
  auto* c_sim = app.add_subcommand("simulate-pde", "1-D p-Kolmogorov IVP");
  sim_pdef.attach(c_sim);
  auto* c_probe = app.add_subcommand("probe-nonexistence", "g_k truncation-test probe");
  probe_pdef.attach(c_probe);
  c_probe->add_option("--k", probe_ks, "g_k levels (default 1 4 16)");
  c_probe->add_option("--phi", phi_text, "spatial test function: bump:r0,w");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (c_hardy->parsed()) return cmd_verify_hardy(hardy_pf);
    if (c_ckn->parsed()) {
      if (a_values.empty()) a_values = {0.0, 1.0};
      if (beta_values.empty()) beta_values = {0.0, 1.0};
      return cmd_verify_ckn(ckn_pf, a_values, beta_values);
    }
    if (c_poincare->parsed()) return cmd_verify_poincare(poincare_pf);
    if (c_moments->parsed()) return cmd_check_moments(moments_pf);
    if (c_sweep->parsed())
      return cmd_sweep_optimality(sweep_pf, lambda, gamma_points, big_m);
    if (c_sim->parsed()) return cmd_simulate_pde(sim_pdef);
    if (c_probe->parsed()) return cmd_probe_nonexistence(probe_pdef, probe_ks, phi_text);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
