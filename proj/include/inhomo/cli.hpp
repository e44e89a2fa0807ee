#pragma once

// Command-line driver. run() parses arguments, executes one subcommand and
// writes a report (JSON with --json, "key: value" lines otherwise) to `out`.
// Exit codes: 0 success, 1 invalid input, 2 numerical failure.

#include "inhomo/inhomo.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <cmath>
#include <functional>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace inhomo::cli {

using nlohmann::json;

struct Options {
  std::string model_file;
  unsigned coloring = 0;
  std::vector<unsigned> friendship;
  unsigned n = 0;
  unsigned m = 0;
  double c = 0.0;
  bool json_output = false;
  unsigned threads = 1;
  int grid = 12;
  double c_max = 10.0;
  double c_from = 0.05;
  double c_to = 2.0;
  unsigned c_steps = 40;
  bool simple = false;
  bool forest = false;
  bool float_path = false;
  bool closed_form = false;
  bool dump_series = false;

  // which size options were given
  bool has_n = false, has_m = false, has_c = false;
};

namespace detail {

inline json rational_json(const Rational& x) {
  json j;
  j["value"] = to_string(x);
  j["decimal"] = to_decimal(x, 20);
  if (x > 0) j["log_value"] = log_of(x);
  return j;
}

inline json log_json(double log_value) {
  json j;
  j["log_value"] = log_value;
  if (std::isfinite(log_value) && log_value < 709.0)
    j["decimal"] = std::exp(log_value);
  else
    j["decimal"] = nullptr;
  return j;
}

inline json vector_json(const Eigen::VectorXd& v) {
  json j = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) j.push_back(v(i));
  return j;
}

inline json point_json(const CriticalPoint& p) {
  return {{"x", vector_json(p.x.vec())},
          {"phi", p.phi},
          {"gradient_norm", p.gradient_norm},
          {"hessian_det", p.hessian_det},
          {"is_minimum", p.is_minimum}};
}

inline json estimate_json(const AsymptoticEstimate& est) {
  json j = log_json(est.log_value);
  j["leading_factor_log"] = est.leading_factor_log;
  j["correction_log"] = est.correction_log;
  return j;
}

inline json estimate_diagnostics(const AsymptoticEstimate& est) {
  json d;
  d["minima"] = json::array();
  for (const auto& p : est.minima_used) d["minima"].push_back(point_json(p));
  d["warnings"] = est.warnings;
  return d;
}

inline json partition_json(const std::vector<std::vector<std::size_t>>& parts) {
  json j = json::array();
  for (const auto& part : parts) {
    json block = json::array();
    for (auto t : part) block.push_back(t + 1);
    j.push_back(block);
  }
  return j;
}

inline void print_text(std::ostream& out, const json& j, const std::string& prefix) {
  if (j.is_object()) {
    for (const auto& [key, value] : j.items()) print_text(out, value, prefix.empty() ? key : prefix + "." + key);
  } else if (j.is_array() && !j.empty() && (j.front().is_object() || j.front().is_array())) {
    for (std::size_t i = 0; i < j.size(); ++i) print_text(out, j[i], prefix + "[" + std::to_string(i) + "]");
  } else {
    out << prefix << ": " << (j.is_string() ? j.get<std::string>() : j.dump()) << '\n';
  }
}

struct Context {
  const Options& opt;
  ModelSpec spec;
  json inputs;
  json diagnostics = json::object();
};

inline ModelSpec load_model(const Options& opt, bool exact_required, json& inputs) {
  const int sources = !opt.model_file.empty() + (opt.coloring != 0) + !opt.friendship.empty();
  if (sources != 1)
    throw ModelError(ModelErrorKind::InvalidArgument, "give exactly one of --model, --coloring, --friendship");
  ModelSpec spec;
  if (!opt.model_file.empty()) {
    inputs["model_source"] = opt.model_file;
    spec = validate_model(raw_model_from_file(opt.model_file, exact_required));
  } else if (opt.coloring != 0) {
    inputs["model_source"] = "coloring " + std::to_string(opt.coloring);
    spec = coloring_model(opt.coloring);
  } else {
    if (opt.friendship.size() != 2)
      throw ModelError(ModelErrorKind::InvalidArgument, "--friendship takes two values T K");
    inputs["model_source"] =
        "friendship " + std::to_string(opt.friendship[0]) + " " + std::to_string(opt.friendship[1]);
    spec = friendship_model(opt.friendship[0], opt.friendship[1]).model;
  }
  inputs["model"] = to_json(spec);
  return spec;
}

// n and m from --n/--m, or m = round(c n) from --c/--n.
inline std::pair<unsigned, unsigned> size_of(Context& ctx) {
  const auto& o = ctx.opt;
  if (!o.has_n) throw ModelError(ModelErrorKind::InvalidArgument, "--n is required");
  unsigned m = o.m;
  if (!o.has_m) {
    if (!o.has_c) throw ModelError(ModelErrorKind::InvalidArgument, "give --m or --c");
    if (!(o.c >= 0.0)) throw ModelError(ModelErrorKind::InvalidArgument, "--c must be non-negative");
    m = static_cast<unsigned>(std::llround(o.c * o.n));
    if (std::abs(o.c * o.n - m) > 1e-9) ctx.diagnostics["warnings"].push_back("m rounded to " + std::to_string(m));
  }
  ctx.inputs["n"] = o.n;
  ctx.inputs["m"] = m;
  return {o.n, m};
}

inline double density_of(Context& ctx) {
  const auto& o = ctx.opt;
  double c = 0.0;
  if (o.has_c)
    c = o.c;
  else if (o.has_n && o.has_m && o.n > 0)
    c = static_cast<double>(o.m) / o.n;
  else
    throw ModelError(ModelErrorKind::InvalidArgument, "give --c, or --n and --m");
  if (!(c > 0.0)) throw ModelError(ModelErrorKind::InvalidArgument, "density must be positive");
  ctx.inputs["c"] = c;
  return c;
}

inline ExactOptions exact_options(const Context& ctx) { return ExactOptions{std::max(1u, ctx.opt.threads)}; }

inline GraphFilter forest_filter(bool on) {
  if (!on) return {};
  return [](unsigned n, const std::vector<Edge>& edges) { return components_at_most_unicyclic(n, edges); };
}

inline json cmd_validate(Context& ctx) {
  const auto sd = spectrum(ctx.spec);
  json r;
  r["valid"] = true;
  r["q"] = ctx.spec.q;
  r["exact"] = ctx.spec.exact;
  r["eigenvalues"] = sd.eigenvalues;
  r["one_is_eigenvector"] = sd.one_is_eigenvector;
  return r;
}

inline json cmd_exact(Context& ctx, bool simple) {
  auto [n, m] = size_of(ctx);
  ctx.diagnostics["method"] = ctx.opt.float_path ? "log-scale float" : "exact rational";
  if (ctx.opt.float_path)
    return log_json(simple ? log_count_simple(ctx.spec, n, m, exact_options(ctx))
                           : log_count_multigraphs(ctx.spec, n, m, exact_options(ctx)));
  return rational_json(simple ? count_simple(ctx.spec, n, m, exact_options(ctx))
                              : count_multigraphs(ctx.spec, n, m, exact_options(ctx)));
}

inline json cmd_oracle(Context& ctx) {
  auto [n, m] = size_of(ctx);
  ctx.inputs["simple"] = ctx.opt.simple;
  ctx.inputs["forest"] = ctx.opt.forest;
  auto keep = forest_filter(ctx.opt.forest);
  return rational_json(ctx.opt.simple ? oracle_count_simple(ctx.spec, n, m, keep)
                                      : oracle_count_multigraphs(ctx.spec, n, m, keep));
}

inline json cmd_asympt(Context& ctx, bool simple) {
  auto [n, m] = size_of(ctx);
  LaplaceOptions lo;
  lo.grid_resolution = ctx.opt.grid;
  ctx.inputs["grid"] = ctx.opt.grid;
  AsymptoticEstimate est;
  if (ctx.opt.closed_form) {
    if (simple) throw ModelError(ModelErrorKind::InvalidArgument, "--closed-form applies to multigraph counts only");
    est = regular_case_count(ctx.spec, n, m);
    ctx.diagnostics["method"] = "closed form (1 is an eigenvector of R)";
  } else {
    est = simple ? laplace_count_simple(ctx.spec, n, m, lo) : laplace_count(ctx.spec, n, m, lo);
    ctx.diagnostics["method"] = "Laplace sum over local minima";
  }
  auto d = estimate_diagnostics(est);
  ctx.diagnostics.update(d);
  return estimate_json(est);
}

inline json cmd_forest_exact(Context& ctx) {
  auto [n, m] = size_of(ctx);
  ctx.inputs["simple"] = ctx.opt.simple;
  if (ctx.opt.dump_series && n >= 1) {
    auto w = exact_weights(ctx.spec);
    auto tree = tree_series(w, n);
    json t = json::array();
    for (const auto& s : tree) t.push_back(to_json(s));
    ctx.diagnostics["series"] = {{"T", t},
                                 {"U", to_json(unrooted_tree_series(w, tree))},
                                 {"V", to_json(unicycle_series(w, tree, ctx.opt.simple))}};
  }
  if (ctx.opt.float_path) {
    ctx.diagnostics["method"] = "log-scale float";
    return log_json(log_count_trees_unicycles(ctx.spec, n, m, ctx.opt.simple));
  }
  ctx.diagnostics["method"] = "exact rational";
  return rational_json(count_trees_unicycles_exact(ctx.spec, n, m, ctx.opt.simple));
}

inline json singular_json(const SingularData& sd) {
  return {{"rho", sd.rho}, {"tau", vector_json(sd.tau)}, {"gamma", vector_json(sd.gamma)}, {"alpha", sd.alpha}};
}

inline void singular_residuals(Context& ctx, const SingularData& sd) {
  ctx.diagnostics["residuals"] = {{"fixed_point", sd.residual_fixed_point},
                                  {"kernel", sd.residual_kernel},
                                  {"normalization", sd.residual_normalization}};
}

inline json cmd_forest_asympt(Context& ctx) {
  auto [n, m] = size_of(ctx);
  const auto sd = singular_data(ctx.spec);
  singular_residuals(ctx, sd);
  auto est = asymptotic_trees_unicycles(ctx.spec, n, m, sd);
  auto sp = saddle_point(ctx.spec, static_cast<double>(m) / n, sd);
  json r = estimate_json(est);
  r["alpha"] = sd.alpha;
  r["zeta"] = sp.zeta;
  r["c_factor"] = c_factor(ctx.spec, static_cast<double>(m) / n, sp.phi);
  ctx.diagnostics.update(estimate_diagnostics(est));
  return r;
}

inline json cmd_singular(Context& ctx) {
  const auto sd = singular_data(ctx.spec);
  singular_residuals(ctx, sd);
  json r = singular_json(sd);
  r["c_factor_at_alpha"] = c_factor_critical(ctx.spec, sd);
  return r;
}

inline json cmd_saddle(Context& ctx) {
  const double c = density_of(ctx);
  const auto sd = singular_data(ctx.spec);
  auto sp = saddle_point(ctx.spec, c, sd);
  return {{"zeta", sp.zeta},
          {"phi", vector_json(sp.phi.vec())},
          {"tree_value", vector_json(sp.tree_value)},
          {"c_factor", c_factor(ctx.spec, c, sp.phi)},
          {"potential", phi(ctx.spec, c, sp.phi)}};
}

inline json cmd_minima(Context& ctx) {
  const double c = density_of(ctx);
  ctx.inputs["grid"] = ctx.opt.grid;
  auto search = find_local_minima(ctx.spec, c, ctx.opt.grid);
  ctx.diagnostics["seeds"] = search.seeds;
  ctx.diagnostics["non_converged"] = search.non_converged;
  ctx.diagnostics["non_minimal"] = search.non_minimal;
  json r;
  r["minima"] = json::array();
  for (const auto& p : search.minima) r["minima"].push_back(point_json(p));
  return r;
}

inline json cmd_beta(Context& ctx) {
  ctx.inputs["c_max"] = ctx.opt.c_max;
  ctx.inputs["grid"] = ctx.opt.grid;
  auto est = estimate_beta(ctx.spec, ctx.opt.c_max, ctx.opt.grid);
  json r = {{"beta", est.beta}, {"capped", est.capped}};
  try {
    r["alpha"] = singular_data(ctx.spec).alpha;
  } catch (const NumericalError& e) {
    ctx.diagnostics["warnings"].push_back(std::string("alpha unavailable: ") + e.what());
  }
  return r;
}

inline json cmd_census(Context& ctx) {
  const auto& o = ctx.opt;
  if (o.c_steps < 2 || !(o.c_from > 0.0) || !(o.c_to > o.c_from))
    throw ModelError(ModelErrorKind::InvalidArgument, "census needs 0 < --c-from < --c-to and --c-steps >= 2");
  ctx.inputs["c_from"] = o.c_from;
  ctx.inputs["c_to"] = o.c_to;
  ctx.inputs["c_steps"] = o.c_steps;
  ctx.inputs["grid"] = o.grid;
  std::vector<double> cs(o.c_steps);
  for (unsigned i = 0; i < o.c_steps; ++i) cs[i] = o.c_from + (o.c_to - o.c_from) * i / (o.c_steps - 1);
  auto census = minima_census(ctx.spec, cs, o.grid);
  json rows = json::array();
  for (const auto& row : census.rows) {
    json mins = json::array();
    for (const auto& p : row.minima) mins.push_back(point_json(p));
    rows.push_back({{"c", row.c}, {"count", row.minima.size()}, {"minima", mins}});
  }
  json r;
  r["count_transition"] = census.count_transition ? json(*census.count_transition) : json(nullptr);
  r["branch_degeneracy"] = census.branch_degeneracy ? json(*census.branch_degeneracy) : json(nullptr);
  r["rows"] = rows;
  return r;
}

inline json cmd_compare(Context& ctx) {
  auto [n, m] = size_of(ctx);
  ctx.inputs["simple"] = ctx.opt.simple;
  ctx.inputs["forest"] = ctx.opt.forest;
  LaplaceOptions lo;
  lo.grid_resolution = ctx.opt.grid;
  double exact_log = 0.0;
  AsymptoticEstimate est;
  if (ctx.opt.forest) {
    if (ctx.opt.simple) throw ModelError(ModelErrorKind::InvalidArgument, "compare --forest estimates multigraphs only");
    exact_log = log_count_trees_unicycles(ctx.spec, n, m, false);
    est = asymptotic_trees_unicycles(ctx.spec, n, m);
  } else if (ctx.opt.simple) {
    exact_log = log_count_simple(ctx.spec, n, m, exact_options(ctx));
    est = laplace_count_simple(ctx.spec, n, m, lo);
  } else {
    exact_log = log_count_multigraphs(ctx.spec, n, m, exact_options(ctx));
    est = laplace_count(ctx.spec, n, m, lo);
  }
  ctx.diagnostics.update(estimate_diagnostics(est));
  return {{"exact_log", exact_log},
          {"asymptotic_log", est.log_value},
          {"log_ratio", exact_log - est.log_value},
          {"ratio", std::exp(exact_log - est.log_value)}};
}

}  // namespace detail

/// Runs one command line (args excludes the program name) and returns the exit code.
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options opt;
  CLI::App app{"Counting graphs and multigraphs in inhomogeneous random graph models", "inhomo"};
  app.require_subcommand(1, 1);

  struct Command {
    const char* name;
    const char* help;
    bool exact_model;
  };
  const std::vector<Command> commands = {
      {"validate", "check a model and print its spectrum", false},
      {"exact", "exact multigraph count", false},
      {"simple-exact", "exact simple-graph count", false},
      {"oracle", "brute-force count (tiny sizes)", true},
      {"asympt", "asymptotic multigraph count", false},
      {"simple-asympt", "asymptotic simple-graph count", false},
      {"forest-exact", "exact count of graphs whose components are trees or unicycles", true},
      {"forest-asympt", "asymptotic count of graphs whose components are trees or unicycles", false},
      {"singular", "dominant singularity of the tree series", false},
      {"saddle", "saddle point for density c", false},
      {"minima", "local minima of the potential at density c", false},
      {"beta", "largest c for which the potential stays convex", false},
      {"census", "number of local minima across a range of densities", false},
      {"compare", "exact (log-scale) against asymptotic count", false},
  };

  for (const auto& cmd : commands) {
    auto* sub = app.add_subcommand(cmd.name, cmd.help);
    sub->add_option("--model", opt.model_file, "model JSON file")->check(CLI::ExistingFile);
    sub->add_option("--coloring", opt.coloring, "built-in q-coloring model");
    sub->add_option("--friendship", opt.friendship, "built-in friendship model T K")->expected(2);
    auto* on = sub->add_option("--n", opt.n, "number of vertices");
    auto* om = sub->add_option("--m", opt.m, "number of edges");
    auto* oc = sub->add_option("--c", opt.c, "density m/n");
    sub->add_flag("--json", opt.json_output, "emit the report as JSON");
    sub->add_option("--threads", opt.threads, "worker threads for exact sums")->check(CLI::PositiveNumber);
    sub->add_option("--grid", opt.grid, "grid resolution for minimum searches")->check(CLI::Range(4, 1000));
    sub->add_option("--c-max", opt.c_max, "scan cap for beta");
    sub->add_option("--c-from", opt.c_from, "census start");
    sub->add_option("--c-to", opt.c_to, "census end");
    sub->add_option("--c-steps", opt.c_steps, "census points");
    sub->add_flag("--simple", opt.simple, "simple graphs instead of multigraphs");
    sub->add_flag("--forest", opt.forest, "restrict to graphs whose components are trees or unicycles");
    sub->add_flag("--float", opt.float_path, "log-scale floating point instead of exact rationals");
    sub->add_flag("--closed-form", opt.closed_form, "use the closed form when 1 is an eigenvector of R");
    sub->add_flag("--series", opt.dump_series, "include T, U, V coefficients in the report");
    sub->callback([&opt, on, om, oc] {
      opt.has_n = on->count() > 0;
      opt.has_m = om->count() > 0;
      opt.has_c = oc->count() > 0;
    });
  }

  std::vector<std::string> argv_store{"inhomo"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& a : argv_store) argv.push_back(a.data());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    std::ostringstream o, e2;
    int code = app.exit(e, o, e2);
    out << o.str();
    err << e2.str();
    return code == 0 ? 0 : 1;
  }

  auto* sub = app.get_subcommands().front();
  const std::string name = sub->get_name();
  const bool exact_model =
      name == "oracle" || name == "forest-exact" || ((name == "exact" || name == "simple-exact") && !opt.float_path);

  json report;
  report["command"] = name;
  report["inputs"] = {{"argv", args}};
  int code = 0;
  detail::Context ctx{opt, {}, report["inputs"]};
  ctx.diagnostics["warnings"] = json::array();
  try {
    ctx.spec = detail::load_model(opt, exact_model, ctx.inputs);
    static const std::map<std::string, std::function<json(detail::Context&)>> handlers = {
        {"validate", detail::cmd_validate},
        {"exact", [](detail::Context& c) { return detail::cmd_exact(c, false); }},
        {"simple-exact", [](detail::Context& c) { return detail::cmd_exact(c, true); }},
        {"oracle", detail::cmd_oracle},
        {"asympt", [](detail::Context& c) { return detail::cmd_asympt(c, false); }},
        {"simple-asympt", [](detail::Context& c) { return detail::cmd_asympt(c, true); }},
        {"forest-exact", detail::cmd_forest_exact},
        {"forest-asympt", detail::cmd_forest_asympt},
        {"singular", detail::cmd_singular},
        {"saddle", detail::cmd_saddle},
        {"minima", detail::cmd_minima},
        {"beta", detail::cmd_beta},
        {"census", detail::cmd_census},
        {"compare", detail::cmd_compare},
    };
    report["result"] = handlers.at(name)(ctx);
    report["diagnostics"] = ctx.diagnostics;
  } catch (const ModelError& e) {
    code = 1;
    report["error"] = {{"kind", to_string(e.kind())}, {"message", e.what()}};
    if (!e.partition().empty()) report["error"]["partition"] = detail::partition_json(e.partition());
    err << "error: " << e.what() << '\n';
  } catch (const NumericalError& e) {
    code = 2;
    report["error"] = {{"kind", to_string(e.kind())}, {"message", e.what()}};
    err << "numerical failure: " << e.what() << '\n';
  } catch (const std::invalid_argument& e) {
    code = 1;
    report["error"] = {{"kind", "InvalidArgument"}, {"message", e.what()}};
    err << "error: " << e.what() << '\n';
  }

  report["inputs"] = ctx.inputs;
  if (opt.json_output)
    out << report.dump(2) << '\n';
  else if (code == 0)
    detail::print_text(out, report, "");
  return code;
}

}  // namespace inhomo::cli
