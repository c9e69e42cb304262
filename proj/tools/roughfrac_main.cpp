// Batch front-end: evaluate operators and norms, check weight classes, run
// verification suites. Results go to standard output and optional files;
// diagnostics go to the error stream. Exit codes: 0 success, 1 a
// verification check failed, 2 configuration or hypothesis errors.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "roughfrac/errors.hpp"
#include "roughfrac/norms.hpp"
#include "roughfrac/operators.hpp"
#include "roughfrac/verify.hpp"
#include "roughfrac/weights.hpp"

namespace rf = roughfrac;
using ordered_json = nlohmann::ordered_json;

namespace {

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// Every flag has a config-file equivalent: JSON keys are the long flag
// names with underscores. Flags given on the command line override file
// values. Unknown keys are errors, as is a missing schema_version.
class OptionTable {
 public:
  OptionTable() = default;
  explicit OptionTable(CLI::App* cmd) : cmd_(cmd) {}

  template <typename T>
  void add(const std::string& key, T& var, const std::string& help) {
    std::string flag = "--" + key;
    for (auto& c : flag)
      if (c == '_') c = '-';
    CLI::Option* opt = cmd_->add_option(flag, var, help);
    entries_.push_back({key, opt, [&var](const nlohmann::json& j) { var = j.get<T>(); },
                        [&var] { return ordered_json(var); }});
  }

  void apply_file(const std::string& path, const std::string& command) const {
    if (path.empty()) return;
    std::ifstream in(path);
    if (!in) throw rf::ConfigError("config: cannot open \"" + path + "\"");
    nlohmann::json file;
    try {
      file = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
      throw rf::ConfigError(std::string("config: ") + e.what());
    }
    if (!file.is_object()) throw rf::ConfigError("config: top level must be a JSON object");
    if (!file.contains("schema_version") || !file["schema_version"].is_number_integer() ||
        file["schema_version"].get<int>() != 1)
      throw rf::ConfigError("config: schema_version 1 is required");
    if (file.contains("command") &&
        (!file["command"].is_string() || file["command"].get<std::string>() != command))
      throw rf::ConfigError("config: command field disagrees with the invoked subcommand");
    for (auto it = file.begin(); it != file.end(); ++it) {
      if (it.key() == "schema_version" || it.key() == "command") continue;
      const Entry* entry = nullptr;
      for (const auto& e : entries_)
        if (e.key == it.key()) entry = &e;
      if (!entry) throw rf::ConfigError("config: unknown key \"" + it.key() + "\"");
      if (entry->opt->count() > 0) continue;  // command line wins
      try {
        entry->from_json(it.value());
      } catch (const nlohmann::json::exception& e) {
        throw rf::ConfigError("config: field \"" + it.key() + "\": " + e.what());
      }
    }
  }

  // Effective values after the merge, in registration order.
  ordered_json echo(const std::string& command) const {
    ordered_json j;
    j["schema_version"] = 1;
    j["command"] = command;
    for (const auto& e : entries_) j[e.key] = e.echo();
    return j;
  }

 private:
  struct Entry {
    std::string key;
    CLI::Option* opt;
    std::function<void(const nlohmann::json&)> from_json;
    std::function<ordered_json()> echo;
  };
  CLI::App* cmd_ = nullptr;
  std::vector<Entry> entries_;
};

void emit_text(const std::string& text, const std::string& path) {
  std::cout << text;
  if (!path.empty()) {
    std::ofstream out(path, std::ios::binary);
    out << text;
    if (!out) throw rf::ConfigError("cannot write \"" + path + "\"");
  }
}

double parse_s_value(const std::string& s) {
  if (s == "inf" || s.empty()) return std::numeric_limits<double>::infinity();
  try {
    return std::stod(s);
  } catch (const std::exception&) {
    throw rf::ConfigError("--s expects a number or \"inf\"");
  }
}

rf::ShellRule parse_rule(const std::string& r) {
  if (r == "midpoint") return rf::ShellRule::midpoint_tensor;
  if (r == "mc" || r == "monte-carlo") return rf::ShellRule::monte_carlo;
  throw rf::ConfigError("--rule expects midpoint | mc");
}

struct ExponentFlags {
  int m = 1;
  int n = 1;
  double alpha = 0.5;
  std::string s = "inf";
  std::vector<double> p;

  void attach(OptionTable& t) {
    t.add("m", m, "number of factors");
    t.add("n", n, "dimension of each factor space");
    t.add("alpha", alpha, "fractional order, 0 < alpha < m*n");
    t.add("s", s, "kernel sphere integrability exponent, a number > 1 or inf");
    t.add("p", p, "input Lebesgue exponents, one per factor (default: midpoint of the valid range)");
  }

  rf::ExponentConfig build() const {
    const double sv = parse_s_value(s);
    std::vector<double> pv = p;
    if (pv.empty()) {
      // Center of the admissible interval s' < p_i < m*n/alpha in 1/p.
      const double sp = std::isinf(sv) ? 1.0 : sv / (sv - 1.0);
      const double inv = 0.5 * (alpha / (static_cast<double>(m) * n) + 1.0 / sp);
      pv.assign(static_cast<std::size_t>(m), 1.0 / inv);
    }
    return rf::derive_exponents(m, n, alpha, sv, pv);
  }
};

struct SettingsFlags {
  double quad_tol = 1e-3;
  int rho = 4;
  int octaves = 16;
  double r0 = 0.0;
  int k_min = 0;
  int k_max = 0;
  int points_per_shell = 64;
  std::string rule = "midpoint";
  std::uint64_t seed = 0;
  std::uint64_t max_evals = std::uint64_t{1} << 24;

  void attach(OptionTable& t) {
    t.add("quad_tol", quad_tol, "relative quadrature tolerance");
    t.add("rho", rho, "radii per octave in the maximal-operator grid");
    t.add("octaves", octaves, "octaves spanned below the support radius (automatic grid)");
    t.add("r0", r0, "explicit radial anchor; 0 selects the automatic grid");
    t.add("k_min", k_min, "lowest radial index for an explicit grid");
    t.add("k_max", k_max, "highest radial index for an explicit grid");
    t.add("points_per_shell", points_per_shell, "quadrature nodes per shell");
    t.add("rule", rule, "shell rule: midpoint | mc");
    t.add("seed", seed, "seed for monte-carlo shells");
    t.add("max_evals", max_evals, "integrand evaluation budget");
  }

  rf::EvalSettings build() const {
    rf::EvalSettings st;
    st.quad_tol = quad_tol;
    st.radii.rho = rho;
    st.radii.auto_octaves = octaves;
    st.radii.r0 = r0;
    st.radii.k_min = k_min;
    st.radii.k_max = k_max;
    st.points_per_shell = points_per_shell;
    st.rule = parse_rule(rule);
    st.seed = seed;
    st.budget.max_evals = max_evals;
    st.validate();
    return st;
  }
};

std::vector<rf::SampledFunction> parse_factors(const std::vector<std::string>& specs, int m,
                                               int n) {
  if (static_cast<int>(specs.size()) != m)
    throw rf::ConfigError("expected exactly m = " + std::to_string(m) + " --f generators, got " +
                          std::to_string(specs.size()));
  std::vector<rf::SampledFunction> out;
  out.reserve(specs.size());
  for (const auto& spec : specs) out.push_back(rf::parse_generator(spec, n));
  return out;
}

ordered_json class_report_json(const rf::ClassReport& r) {
  ordered_json j;
  j["sup_estimate"] = r.sup_estimate;
  j["divergence_flag"] = r.divergence_flag;
  j["any_non_integrable"] = r.any_non_integrable;
  j["argmax_cube"] = {{"lo", r.argmax_cube.lo}, {"side", r.argmax_cube.side}};
  j["level_min"] = r.level_min;
  j["per_level_sup"] = r.per_level_sup;
  j["random_sup"] = r.random_sup;
  return j;
}

// ---------------------------------------------------------------- eval ----

struct EvalCmd {
  CLI::App* cmd = nullptr;
  OptionTable table;
  std::string config_path;
  std::string op = "I";
  ExponentFlags exps;
  std::string kernel = "constant:1";
  std::vector<std::string> f;
  std::vector<double> x;
  SettingsFlags settings;
  std::string out;

  void attach(CLI::App& app) {
    cmd = app.add_subcommand("eval", "evaluate an operator at one point");
    table = OptionTable(cmd);
    table.add("op", op, "operator: I | M | I_smooth | M_smooth");
    exps.attach(table);
    table.add("kernel", kernel, "kernel spec: constant:c | power:gamma | sign:axis");
    table.add("f", f, "factor generators (chi:a:b, tent:a:b, pow:beta:a:b, randpc:k:seed, sfn:path)");
    table.add("x", x, "evaluation point, n coordinates");
    settings.attach(table);
    table.add("out", out, "also write the JSON result to this file");
    cmd->add_option("--config", config_path, "JSON config file; flags override its values");
  }

  int run() const {
    table.apply_file(config_path, "eval");
    const rf::ExponentConfig cfg = exps.build();
    const rf::EvalSettings st = settings.build();
    if (static_cast<int>(x.size()) != cfg.n)
      throw rf::ConfigError("--x expects exactly n = " + std::to_string(cfg.n) + " coordinates");
    const auto factors = parse_factors(f, cfg.m, cfg.n);
    const rf::OperatorId id = rf::parse_operator_id(op);
    const bool smooth = id == rf::OperatorId::integral_smooth || id == rf::OperatorId::maximal_smooth;
    const rf::KernelSpec k = smooth ? rf::KernelSpec::constant(cfg.m, cfg.n, 1.0)
                                    : rf::KernelSpec::parse(kernel, cfg.m, cfg.n);
    rf::OperatorValue v;
    if (id == rf::OperatorId::integral || id == rf::OperatorId::integral_smooth)
      v = rf::eval_integral_op(factors, k, cfg, x, st);
    else
      v = rf::eval_maximal_op(factors, k, cfg, x, st);

    ordered_json j = table.echo("eval");
    j["value"] = v.value;
    j["err_est"] = v.err_est;
    j["evals"] = v.evals;
    j["converged"] = v.converged;
    j["budget_exceeded"] = v.budget_exceeded;
    emit_text(j.dump(2) + "\n", out);
    return 0;
  }
};

// ---------------------------------------------------------------- norm ----

struct NormCmd {
  CLI::App* cmd = nullptr;
  OptionTable table;
  std::string config_path;
  int n = 1;
  std::string f;
  std::string kind = "strong";
  double p = 2.0;
  std::string weight;
  std::string out;

  void attach(CLI::App& app) {
    cmd = app.add_subcommand("norm", "compute a Lebesgue norm of a grid function");
    table = OptionTable(cmd);
    table.add("n", n, "dimension");
    table.add("f", f, "function generator or sfn:path");
    table.add("kind", kind, "strong | weak | weighted-multiplier | weighted-measure");
    table.add("p", p, "Lebesgue exponent (inf accepted via a large value only for strong)");
    table.add("weight", weight, "weight spec for the weighted kinds");
    table.add("out", out, "also write the JSON result to this file");
    cmd->add_option("--config", config_path, "JSON config file; flags override its values");
  }

  int run() const {
    table.apply_file(config_path, "norm");
    const rf::SampledFunction g = rf::parse_generator(f, n);
    rf::NormSpec spec = rf::NormSpec::strong(p);
    if (kind == "strong") {
      spec = rf::NormSpec::strong(p);
    } else if (kind == "weak") {
      spec = rf::NormSpec::weak(p);
    } else if (kind == "weighted-multiplier" || kind == "weighted-measure") {
      if (weight.empty()) throw rf::ConfigError("weighted norms require --weight");
      const rf::WeightSpec w = rf::WeightSpec::parse(weight, n);
      spec = kind == "weighted-multiplier" ? rf::NormSpec::weighted_multiplier(p, w)
                                           : rf::NormSpec::weighted_measure(p, w);
    } else {
      throw rf::ConfigError("--kind expects strong | weak | weighted-multiplier | weighted-measure");
    }
    const double value = rf::weighted_norm(g, spec);
    ordered_json j = table.echo("norm");
    j["value"] = value;
    emit_text(j.dump(2) + "\n", out);
    return 0;
  }
};

// ---------------------------------------------------------- weight-check --

struct WeightCheckCmd {
  CLI::App* cmd = nullptr;
  OptionTable table;
  std::string config_path;
  int n = 1;
  std::string cls = "ap";
  std::string weight;
  std::string u;
  std::string v;
  double p = 2.0;
  double q = 2.0;
  double p_i = 2.0;
  double q_i = 4.0;
  double p_out = 0.0;
  double r = 2.0;
  double alpha = 0.0;
  double s_prime = 1.0;
  int m = 1;
  std::vector<double> family_lo;
  double family_side = 8.0;
  int level_min = 0;
  int level_max = 5;
  int random_cubes = 8;
  std::uint64_t family_seed = 11;
  double quad_tol = 1e-3;
  std::string out;

  void attach(CLI::App& app) {
    cmd = app.add_subcommand("weight-check", "estimate weight-class constants over a cube family");
    table = OptionTable(cmd);
    table.add("n", n, "dimension");
    table.add("class", cls,
              "ap | apq | pair | bump-maximal | bump-integral | pair-implication");
    table.add("weight", weight, "weight spec for ap/apq");
    table.add("u", u, "left weight spec for pair and bump classes");
    table.add("v", v, "right weight spec for pair and bump classes");
    table.add("p", p, "first exponent (ap, apq, pair)");
    table.add("q", q, "second exponent (apq, pair)");
    table.add("p_i", p_i, "per-factor input exponent (bump classes)");
    table.add("q_i", q_i, "per-factor target exponent (bump-maximal, pair-implication)");
    table.add("p_out", p_out, "output exponent (bump-integral)");
    table.add("r", r, "bump exponent r_i > 1");
    table.add("alpha", alpha, "order offset (pair, bump classes)");
    table.add("s_prime", s_prime, "kernel conjugate exponent s'");
    table.add("m", m, "number of factors (bump classes)");
    table.add("family_lo", family_lo, "root cube low corner (default -3.9 per axis)");
    table.add("family_side", family_side, "root cube side");
    table.add("level_min", level_min, "coarsest dyadic level");
    table.add("level_max", level_max, "finest dyadic level");
    table.add("random_cubes", random_cubes, "seeded random cubes inside the root");
    table.add("family_seed", family_seed, "seed for the random cubes");
    table.add("quad_tol", quad_tol, "cube-average quadrature tolerance");
    table.add("out", out, "also write the JSON result to this file");
    cmd->add_option("--config", config_path, "JSON config file; flags override its values");
  }

  rf::CubeFamily build_family() const {
    rf::CubeFamily fam;
    fam.n = n;
    fam.root_lo = family_lo.empty() ? std::vector<double>(static_cast<std::size_t>(n), -3.9)
                                    : family_lo;
    fam.root_side = family_side;
    fam.level_min = level_min;
    fam.level_max = level_max;
    fam.random_count = random_cubes;
    fam.seed = family_seed;
    fam.validate();
    return fam;
  }

  int run() const {
    table.apply_file(config_path, "weight-check");
    const rf::CubeFamily fam = build_family();
    ordered_json j = table.echo("weight-check");
    auto need = [&](const std::string& spec, const char* flag) {
      if (spec.empty()) throw rf::ConfigError(std::string("class ") + cls + " requires " + flag);
      return rf::WeightSpec::parse(spec, n);
    };
    if (cls == "ap") {
      j["report"] = class_report_json(rf::ap_constant(need(weight, "--weight"), p, fam, quad_tol));
    } else if (cls == "apq") {
      j["report"] =
          class_report_json(rf::apq_constant(need(weight, "--weight"), p, q, fam, quad_tol));
    } else if (cls == "pair") {
      j["report"] = class_report_json(rf::pair_alpha_constant(
          need(u, "--u"), need(v, "--v"), p, q, alpha, fam, quad_tol));
    } else if (cls == "bump-maximal" || cls == "bump-integral" || cls == "pair-implication") {
      rf::BumpParams bp;
      bp.p_i = p_i;
      bp.q_i = q_i;
      bp.p = p_out;
      bp.r_i = r;
      bp.alpha = alpha;
      bp.s_prime = s_prime;
      bp.m = m;
      if (cls == "bump-maximal") {
        j["report"] = class_report_json(
            rf::maximal_bump_constant(need(u, "--u"), need(v, "--v"), bp, fam, quad_tol));
      } else if (cls == "bump-integral") {
        j["report"] = class_report_json(
            rf::integral_bump_constant(need(u, "--u"), need(v, "--v"), bp, fam, quad_tol));
      } else {
        const rf::BumpImplicationResult res =
            rf::bump_implies_pair_check(need(u, "--u"), need(v, "--v"), bp, fam, quad_tol);
        ordered_json rj;
        rj["precondition_ok"] = res.precondition_ok;
        rj["holds"] = res.holds;
        rj["margin"] = res.margin;
        rj["bump"] = class_report_json(res.bump);
        rj["pair"] = class_report_json(res.pair);
        j["report"] = rj;
      }
    } else {
      throw rf::ConfigError("--class expects ap | apq | pair | bump-maximal | bump-integral | "
                            "pair-implication");
    }
    emit_text(j.dump(2) + "\n", out);
    return 0;
  }
};

// -------------------------------------------------------------- verify ----

struct VerifyCmd {
  CLI::App* cmd = nullptr;
  OptionTable table;
  std::string config_path;
  std::string suite = "paper-core";
  std::uint64_t seed = 7;
  std::string out;
  std::string csv;

  void attach(CLI::App& app) {
    cmd = app.add_subcommand("verify", "run a bundled verification suite");
    table = OptionTable(cmd);
    table.add("suite", suite, "suite name: paper-core | weighted");
    table.add("seed", seed, "battery seed");
    table.add("out", out, "write the JSON summary to this file");
    table.add("csv", csv, "write the per-instance CSV report to this file");
    cmd->add_option("--config", config_path, "JSON config file; flags override its values");
  }

  int run() const {
    table.apply_file(config_path, "verify");
    rf::SuiteConfig sc;
    sc.suite = suite;
    sc.seed = seed;
    const rf::SuiteResult res = rf::run_suite(sc);
    for (const auto& rep : res.reports) {
      std::cerr << "[" << rep.check_id << "] "
                << (!rep.error.empty() ? "error" : (rep.passed ? "pass" : "FAIL"))
                << " empirical=" << fmt17(rep.empirical_constant);
      if (!rep.error.empty()) std::cerr << " (" << rep.error << ")";
      char tbuf[32];
      std::snprintf(tbuf, sizeof(tbuf), " %.2fs", rep.runtime_seconds);
      std::cerr << tbuf << "\n";
    }
    const std::string jtext = res.json();
    emit_text(jtext, out);
    if (!csv.empty()) {
      std::ofstream cf(csv, std::ios::binary);
      cf << res.csv();
      if (!cf) throw rf::ConfigError("cannot write \"" + csv + "\"");
    }
    return res.exit_code;
  }
};

// --------------------------------------------------------------- sweep ----

struct SweepCmd {
  CLI::App* cmd = nullptr;
  OptionTable table;
  std::string config_path;
  std::string op = "M";
  ExponentFlags exps;
  std::string kernel = "constant:1";
  std::vector<std::string> f;
  std::vector<double> lo;
  std::vector<double> hi;
  std::vector<int> cells;
  SettingsFlags settings;
  std::string out;
  std::string sfn_out;

  void attach(CLI::App& app) {
    cmd = app.add_subcommand("sweep", "tabulate an operator over a uniform grid (CSV)");
    table = OptionTable(cmd);
    table.add("op", op, "operator: I | M | I_smooth | M_smooth");
    exps.attach(table);
    table.add("kernel", kernel, "kernel spec");
    table.add("f", f, "factor generators, one per factor");
    table.add("lo", lo, "grid low corner, n coordinates");
    table.add("hi", hi, "grid high corner, n coordinates");
    table.add("cells", cells, "cells per axis");
    settings.attach(table);
    table.add("out", out, "also write the CSV to this file");
    table.add("sfn_out", sfn_out, "also write the field in SFN v1 format");
    cmd->add_option("--config", config_path, "JSON config file; flags override its values");
  }

  int run() const {
    table.apply_file(config_path, "sweep");
    const rf::ExponentConfig cfg = exps.build();
    rf::EvalSettings st = settings.build();
    if (static_cast<int>(lo.size()) != cfg.n || static_cast<int>(hi.size()) != cfg.n ||
        static_cast<int>(cells.size()) != cfg.n)
      throw rf::ConfigError("--lo, --hi and --cells each expect n values");
    st.x_grid = rf::make_grid_points(lo, hi, cells);
    const auto factors = parse_factors(f, cfg.m, cfg.n);
    const rf::OperatorId id = rf::parse_operator_id(op);
    const bool smooth = id == rf::OperatorId::integral_smooth || id == rf::OperatorId::maximal_smooth;
    const rf::KernelSpec k = smooth ? rf::KernelSpec::constant(cfg.m, cfg.n, 1.0)
                                    : rf::KernelSpec::parse(kernel, cfg.m, cfg.n);
    const rf::FieldResult fr = rf::eval_field(id, factors, k, cfg, st);

    std::string text = "# config=" + table.echo("sweep").dump() + "\n";
    for (int d = 0; d < cfg.n; ++d) text += "x" + std::to_string(d) + ",";
    text += "value\n";
    for (std::size_t flat = 0; flat < fr.field.cell_count(); ++flat) {
      const auto center = fr.field.cell_center(flat);
      for (double c : center) text += fmt17(c) + ",";
      text += fmt17(fr.field.values()[flat]) + "\n";
    }
    emit_text(text, out);
    if (!sfn_out.empty()) fr.field.write_sfn_file(sfn_out);
    if (!fr.converged)
      std::cerr << "warning: some grid points did not reach the quadrature tolerance\n";
    if (fr.budget_exceeded) std::cerr << "warning: evaluation budget exhausted\n";
    return 0;
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"numerical laboratory for rough multilinear fractional operators"};
  app.require_subcommand(1);

  EvalCmd eval_cmd;
  NormCmd norm_cmd;
  WeightCheckCmd weight_cmd;
  VerifyCmd verify_cmd;
  SweepCmd sweep_cmd;
  eval_cmd.attach(app);
  norm_cmd.attach(app);
  weight_cmd.attach(app);
  verify_cmd.attach(app);
  sweep_cmd.attach(app);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (eval_cmd.cmd->parsed()) return eval_cmd.run();
    if (norm_cmd.cmd->parsed()) return norm_cmd.run();
    if (weight_cmd.cmd->parsed()) return weight_cmd.run();
    if (verify_cmd.cmd->parsed()) return verify_cmd.run();
    if (sweep_cmd.cmd->parsed()) return sweep_cmd.run();
  } catch (const rf::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
