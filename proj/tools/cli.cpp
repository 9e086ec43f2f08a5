#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <memory>
#include <ostream>
#include <sstream>

#include <unistd.h>

#include "CLI11.hpp"
#include "json.hpp"

#include "cheng/expr/evaluate.hpp"
#include "cheng/expr/normalize.hpp"
#include "cheng/expr/parse.hpp"
#include "cheng/expr/zero_test.hpp"
#include "cheng/odesolve/abel.hpp"
#include "cheng/odesolve/closed_forms.hpp"
#include "cheng/odesolve/integrate.hpp"
#include "cheng/reduction/charts.hpp"
#include "cheng/reduction/reduction.hpp"
#include "cheng/reduction/space_dependent.hpp"
#include "cheng/solutions/report.hpp"
#include "cheng/symmetry/catalog.hpp"

namespace cheng::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;
using expr::Expr;

class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Flat JSON object of long option names; arrays give repeated inputs.
class JsonConfig : public CLI::Config {
 public:
  std::string to_config(const CLI::App*, bool, bool, std::string) const override { return "{}\n"; }

  std::vector<CLI::ConfigItem> from_config(std::istream& in) const override {
    json j;
    try {
      in >> j;
    } catch (const json::exception& e) {
      throw CLI::ConversionError(std::string("config: ") + e.what());
    }
    if (!j.is_object()) throw CLI::ConversionError("config: top level must be an object");
    std::vector<CLI::ConfigItem> items;
    for (const auto& [key, value] : j.items()) {
      CLI::ConfigItem item;
      item.name = key;
      if (value.is_array()) {
        for (const auto& e : value) item.inputs.push_back(scalar(key, e));
      } else {
        item.inputs.push_back(scalar(key, value));
      }
      items.push_back(std::move(item));
    }
    return items;
  }

 private:
  static std::string scalar(const std::string& key, const json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    if (v.is_number()) return v.dump();
    throw CLI::ConversionError("config: '" + key + "' must be a string, number, boolean or array of those");
  }
};

struct Outcome {
  int code = kOk;
  std::string stem;
  json report = json::object();
  std::string csv;
  std::vector<std::string> lines;
  std::vector<std::string> warnings;
};

Expr expression(const std::string& text, const char* option) {
  try {
    return expr::parse(text);
  } catch (const expr::ParseError& e) {
    throw UsageError(std::string(option) + ": " + e.what());
  }
}

double number(const std::string& text, const char* option) {
  const Expr e = expression(text, option);
  try {
    return expr::evaluate(e, {});
  } catch (const expr::EvaluationError&) {
    throw UsageError(std::string(option) + " must be a number here, got '" + text + "'");
  }
}

json strings(const std::vector<Expr>& es) {
  json out = json::array();
  for (const auto& e : es) out.push_back(expr::to_string(e));
  return out;
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(3);
  os << std::scientific << v;
  return os.str();
}

json to_json(const reduction::ReducedODE& ode) {
  json j = {{"id", ode.id},
            {"tag", reduction::to_string(ode.tag)},
            {"printed", ode.printed},
            {"independent", ode.system.independent},
            {"dependent", ode.system.dependent},
            {"residuals", strings(ode.system.residuals)}};
  if (ode.rhs) j["rhs"] = expr::to_string(*ode.rhs);
  return j;
}

json to_json(const reduction::VerificationReport& r) {
  json matches = json::array();
  for (const auto& m : r.matches) {
    json jm = {{"source", m.source}};
    if (m.target) {
      jm["target"] = *m.target;
      jm["multiplier"] = expr::to_string(m.multiplier);
    } else {
      jm["target"] = nullptr;
      jm["leftover"] = expr::to_string(m.leftover);
    }
    matches.push_back(jm);
  }
  return {{"transform", r.transform}, {"target", r.target}, {"passed", r.passed},
          {"message", r.message},     {"matches", matches}};
}

json to_json(const symmetry::SymmetryReport& r) {
  return {{"system", r.system},       {"field", r.field},     {"passed", r.passed},
          {"symbolic", r.symbolic},   {"max_abs", r.max_abs}, {"residuals", strings(r.residuals)}};
}

std::vector<std::string> equation_lines(const reduction::ReducedODE& ode) {
  std::vector<std::string> out;
  for (const auto& r : ode.system.residuals) out.push_back("  " + expr::to_string(r) + " = 0");
  return out;
}

std::string verdict(bool passed) { return passed ? "PASS" : "FAIL"; }

std::string multipliers(const reduction::VerificationReport& r) {
  std::string s;
  for (const auto& m : r.matches) {
    if (!s.empty()) s += ", ";
    s += m.target ? expr::to_string(m.multiplier) : "unmatched";
  }
  return "{" + s + "}";
}

expr::Substitution atom_bindings(const RunConfig& cfg) {
  expr::Substitution s;
  if (!cfg.g.empty()) s.bind_function("g", {"x"}, expression(cfg.g, "--g"));
  if (!cfg.h.empty()) s.bind_function("h", {"t"}, expression(cfg.h, "--h"));
  if (!cfg.lambda.empty()) s.bind_function("lambda", {"x"}, expression(cfg.lambda, "--lambda"));
  return s;
}

json parameters(const RunConfig& cfg) {
  return {{"a", cfg.a}, {"b", cfg.b}, {"c", cfg.c}, {"C0", cfg.C0}, {"C1", cfg.C1}, {"C2", cfg.C2}};
}

// ---------------------------------------------------------------- verify

Outcome verify_symmetries(const RunConfig& cfg) {
  Outcome o;
  o.stem = "verify-symmetries";
  std::vector<symmetry::CatalogField> fields;
  if (!cfg.field.empty()) {
    symmetry::VectorField vf;
    try {
      vf = symmetry::VectorField::parse(cfg.field, "custom");
    } catch (const expr::ParseError& e) {
      throw UsageError(std::string("--field: ") + e.what());
    }
    symmetry::catalog_system(cfg.system);
    fields.push_back({"custom", cfg.system, vf, ""});
  } else {
    for (const auto& f : symmetry::paper_fields()) {
      if (cfg.only.empty() || f.id == cfg.only) fields.push_back(f);
    }
    if (fields.empty()) throw symmetry::UnknownIdentifier("--only: unknown field '" + cfg.only + "'");
  }
  const auto atoms = atom_bindings(cfg);
  json results = json::array();
  bool all = true;
  for (const auto& f : fields) {
    const auto& sys = symmetry::catalog_system(f.system);
    const auto vf = f.field.substituted(atoms);
    const auto r = symmetry::check_symmetry(sys, vf, cfg.seed);
    json j = to_json(r);
    j["field"] = f.id;
    j["generator"] = vf.to_string();
    if (!f.note.empty()) j["note"] = f.note;
    std::string mark = verdict(r.passed);
    if (!r.passed && f.system == "space-dep-ode-as-printed") {
      mark = "WARN";
      o.warnings.push_back(f.id + " is not a symmetry of the second-order equation as printed");
    } else if (!r.passed) {
      all = false;
    }
    o.lines.push_back(mark + " " + f.id + " on " + f.system + ": " + vf.to_string() +
                      (r.passed ? "" : "  (max |residual| " + fmt(r.max_abs) + ")"));
    results.push_back(std::move(j));
  }
  o.report["results"] = std::move(results);
  o.report["passed"] = all;
  o.code = all ? kOk : kFailed;
  return o;
}

// ---------------------------------------------------------------- reduce

reduction::Reduction make_reduction(const RunConfig& cfg) {
  using namespace reduction;
  if (cfg.target == "case1") return reduce_travelling_wave(expression(cfg.c, "--c"), cfg.seed);
  if (cfg.target == "case2a") return reduce_scaling(ScalingVariant::A, cfg.seed);
  if (cfg.target == "case2b") return reduce_scaling(ScalingVariant::B, cfg.seed);
  const bool first = cfg.target == "general-I";
  const Expr h = expression(cfg.h.empty() ? (first ? "h(t)" : "1") : cfg.h, "--h");
  const Expr g = expression(cfg.g.empty() ? "g(x)" : cfg.g, "--g");
  return reduce_general(h, g, first ? GeneralVariant::I : GeneralVariant::II, cfg.seed);
}

Outcome reduce_chart(const RunConfig& cfg) {
  using namespace reduction;
  Outcome o;
  const ChartKind kind = cfg.chart == "canonical" ? ChartKind::Canonical : ChartKind::DifferentialInvariants;
  const CoordinateChart& working = chart(cfg.target, kind, cfg.generator);
  const CoordinateChart& ch = cfg.as_printed ? chart(working.id + "-as-printed") : working;
  o.stem = "reduce-" + ch.id;
  const auto& ode = symmetry::catalog_system(ch.system);
  const ChartCheck cc = check_chart(ode, ch, cfg.seed);
  json j = {{"chart", ch.id},
            {"kind", to_string(ch.kind)},
            {"system", ch.system},
            {"generator", ch.generator.to_string()},
            {ch.new_independent, expr::to_string(ch.n)},
            {ch.new_dependent, expr::to_string(ch.m)},
            {"corrected", ch.corrected},
            {"as_printed", ch.as_printed},
            {"checks",
             {{"generator_is_symmetry", cc.generator_is_symmetry},
              {"n_invariant", cc.n_invariant},
              {"m_invariant", cc.m_invariant},
              {"jacobian_nonsingular", cc.jacobian_nonsingular},
              {"inverse_consistent", cc.inverse_consistent}}}};
  if (!ch.note.empty()) j["note"] = ch.note;
  o.lines.push_back("chart " + ch.id + " on " + ch.system + " (" + ch.generator.to_string() + "): " +
                    ch.new_independent + " = " + expr::to_string(ch.n) + ", " + ch.new_dependent + " = " +
                    expr::to_string(ch.m));
  bool passed = false;
  try {
    const ReducedODE red = canonical_reduce(ode, ch.generator, ch, cfg.seed);
    expr::Substitution speed;
    speed.bind("c", expression(cfg.c, "--c"));
    const Expr rhs = expr::normalize(expr::substitute(*red.rhs, speed));
    const auto x = red.independent(), y = red.dependent();
    const auto derived = first_order(red.id, classify(rhs, x, y), x, y, rhs, false);
    j["reduced"] = to_json(derived);
    o.lines.push_back("  " + y + "' = " + expr::to_string(rhs) + "   [" + to_string(derived.tag) + "]");
    passed = derived.tag == ch.expected_tag;
    if (!ch.target.empty()) {
      const auto& target = reduced_target(ch.target);
      const Expr prhs = expr::normalize(expr::substitute(*target.rhs, speed));
      const auto printed = first_order(target.id, classify(prhs, x, y), x, y, prhs);
      const auto cmp = compare(derived, printed, cfg.seed);
      j["printed"] = to_json(printed);
      j["matches_printed"] = cmp.equal;
      if (!cmp.equal) j["difference"] = expr::to_string(cmp.difference);
      o.lines.push_back(std::string(cmp.equal ? "  matches" : "  differs from") + " the printed form " +
                        expr::to_string(prhs));
      passed = passed && cmp.equal;
    }
  } catch (const ReductionFailure& e) {
    j["failure"] = e.what();
    j["leftover"] = e.leftover();
    o.lines.push_back(std::string("  reduction fails: ") + e.what());
  }
  j["passed"] = passed;
  o.lines.push_back(verdict(passed) + " " + ch.id);
  o.report = std::move(j);
  if (!passed && ch.as_printed) {
    o.warnings.push_back(ch.id + ": the chart as printed does not reduce the equation");
  } else if (!passed) {
    o.code = kFailed;
  }
  return o;
}

Outcome reduce_space(const RunConfig& cfg) {
  using namespace reduction;
  Outcome o;
  o.stem = "reduce-space-dep";
  const auto r = reduce_space_dependent(expression(cfg.c, "--c"), expression(cfg.tau, "--tau"), cfg.seed);
  json fields = json::array();
  for (const auto& f : r.fields) fields.push_back(to_json(f));
  auto closure = [](const ClosureCheck& c) {
    return json{{"transform", c.transform}, {"closes", c.closes}, {"residual", expr::to_string(c.residual)}};
  };
  o.report = {{"system", strings(r.system.residuals)},
              {"elimination",
               {{"residual", expr::to_string(r.elimination.residual)},
                {"matches_ab", r.elimination.matches_ab},
                {"matches_b_over_a", r.elimination.matches_b_over_a}}},
              {"fields", fields},
              {"unit_transform", r.unit_transform.to_string()},
              {"as_printed", to_json(r.as_printed)},
              {"derived", to_json(r.derived)},
              {"printed_closure", closure(r.printed_closure)},
              {"weighted_closure", closure(r.weighted_closure)},
              {"notes", r.notes}};
  o.lines.push_back("system with c(x) = " + cfg.c + ":");
  for (const auto& e : r.system.residuals) o.lines.push_back("  " + expr::to_string(e) + " = 0");
  o.lines.push_back(std::string("elimination of v gives c = ") + (r.elimination.matches_ab ? "a*b" : "?") +
                    (r.elimination.matches_b_over_a ? " = b/a" : " (not b/a)"));
  if (!r.elimination.matches_b_over_a) o.warnings.push_back("the coefficient is a*b, not b/a as printed");
  for (std::size_t k = 0; k < r.fields.size(); ++k) {
    o.lines.push_back(verdict(r.fields[k].passed) + " field " + r.fields[k].field);
  }
  o.lines.push_back(verdict(r.as_printed.passed) + " " + r.unit_transform.id + " -> " + r.as_printed.target +
                    " " + multipliers(r.as_printed));
  o.lines.push_back(verdict(r.derived.passed) + " " + r.unit_transform.id + " -> " + r.derived.target + " " +
                    multipliers(r.derived));
  if (!r.as_printed.passed) o.warnings.push_back("the second-order equation as printed is not the reduction");
  o.lines.push_back(std::string("closure of ") + r.printed_closure.transform + ": " +
                    (r.printed_closure.closes ? "closes" : "does not close"));
  o.lines.push_back(std::string("closure of ") + r.weighted_closure.transform + ": " +
                    (r.weighted_closure.closes ? "closes" : "does not close"));
  const bool exactly_one = r.as_printed.passed != r.derived.passed;
  o.report["passed"] = exactly_one;
  o.code = exactly_one ? kOk : kFailed;
  return o;
}

Outcome reduce(const RunConfig& cfg) {
  if (cfg.target == "space-dep") return reduce_space(cfg);
  if (!cfg.chart.empty()) return reduce_chart(cfg);
  Outcome o;
  o.stem = "reduce-" + cfg.target;
  const auto r = make_reduction(cfg);
  o.report = {{"id", r.id},
              {"transform", r.transform.to_string()},
              {"system", to_json(r.system)},
              {"second_order", to_json(r.second_order)},
              {"system_check", to_json(r.system_check)},
              {"elimination_check", to_json(r.elimination_check)},
              {"notes", r.notes}};
  o.lines.push_back(r.transform.to_string());
  o.lines.push_back(r.system.id + ":");
  for (auto& l : equation_lines(r.system)) o.lines.push_back(l);
  o.lines.push_back(r.second_order.id + ":");
  for (auto& l : equation_lines(r.second_order)) o.lines.push_back(l);
  o.lines.push_back(verdict(r.system_check.passed) + " " + r.transform.id + " -> " + r.system.id + " " +
                    multipliers(r.system_check));
  o.lines.push_back(verdict(r.elimination_check.passed) + " elimination -> " + r.second_order.id);
  for (const auto& n : r.notes) o.lines.push_back("note: " + n);
  const bool passed = r.system_check.passed && r.elimination_check.passed;
  o.report["passed"] = passed;
  o.code = passed ? kOk : kFailed;
  return o;
}

// ---------------------------------------------------------------- solve

odesolve::IntegratorOptions integrator_options(double x0, double x1) {
  odesolve::IntegratorOptions opts;
  opts.max_step = std::abs(x1 - x0) / 100;
  return opts;
}

// Integrates y' = rhs and compares with the closed form at every accepted step.
Outcome closed_form_check(const RunConfig& cfg, const std::string& name, const odesolve::ClosedForm& closed,
                          const expr::Expr& rhs, const std::string& x, const std::string& y) {
  Outcome o;
  o.stem = "solve-" + name;
  const double x0 = cfg.x0.value_or(1.0), x1 = cfg.x1.value_or(5.0);
  const double tol = cfg.tolerance > 0 ? cfg.tolerance : 1e-8;
  expr::Environment env;
  env.set("a", cfg.a).set("b", cfg.b).set("c", number(cfg.c, "--c"));
  const expr::CompiledExpr f(rhs, {x, y}, env);
  const double y0 = closed(x0);
  const auto traj = odesolve::integrate(
      [&](double xv, double yv) {
        const double in[2] = {xv, yv};
        return f(in);
      },
      x0, y0, x1, integrator_options(x0, x1));
  double dev = 0.0;
  std::ostringstream csv;
  csv.precision(17);
  csv << x << "," << y << ",closed,deviation\n";
  for (std::size_t i = 0; i < traj.x.size(); ++i) {
    const double exact = closed(traj.x[i]);
    const double d = std::abs(traj.y[i][0] - exact);
    dev = std::max(dev, d);
    csv << traj.x[i] << "," << traj.y[i][0] << "," << exact << "," << d << "\n";
  }
  o.csv = csv.str();
  o.report = {{"equation", y + "' = " + expr::to_string(rhs)},
              {"closed_form", expr::to_string(closed.expression())},
              {"interval", {x0, x1}},
              {"initial_value", y0},
              {"status", odesolve::to_string(traj.status)},
              {"steps", traj.x.size()},
              {"max_deviation", dev},
              {"tolerance", tol}};
  o.lines.push_back(y + "' = " + expr::to_string(rhs));
  o.lines.push_back(y + " = " + expr::to_string(closed.expression()));
  o.lines.push_back("integrated " + x + " in [" + fmt(x0) + ", " + fmt(x1) + "]: " + odesolve::to_string(traj.status) +
                    ", " + std::to_string(traj.x.size()) + " steps, max deviation " + fmt(dev));
  if (traj.status != odesolve::Status::Completed) {
    o.report["message"] = traj.message;
    o.code = kIndeterminate;
    return o;
  }
  if (cfg.check) {
    const bool ok = dev < tol;
    o.report["passed"] = ok;
    o.lines.push_back(verdict(ok) + " deviation < " + fmt(tol));
    if (!ok) o.code = kFailed;
  }
  return o;
}

Outcome solve_riccati(const RunConfig& cfg) {
  const double c = number(cfg.c, "--c");
  const auto closed = odesolve::riccati_closed_form(cfg.a, cfg.b, c, cfg.C0);
  return closed_form_check(cfg, "riccati", closed, expr::parse("-a*b*n*m^2/c - m/n"), "n", "m");
}

Outcome solve_euler(const RunConfig& cfg) {
  const double c = number(cfg.c, "--c");
  const bool travelling = cfg.variant == "travelling";
  const auto which = travelling ? odesolve::EulerEquation::Travelling : odesolve::EulerEquation::Scaling;
  const auto closed = odesolve::euler_linear_closed_form(cfg.a, cfg.b, c, cfg.C2, which);
  auto o = travelling ? closed_form_check(cfg, "euler", closed, expr::parse("a*b*n/c + m/n"), "n", "m")
                      : closed_form_check(cfg, "euler", closed, expr::parse("-a*b*r + v/r"), "r", "v");
  o.stem = "solve-euler-" + cfg.variant;
  return o;
}

Outcome solve_abel(const RunConfig& cfg) {
  using odesolve::AbelEquation;
  Outcome o;
  o.stem = "solve-abel-" + cfg.equation;
  const std::map<std::string, AbelEquation> ids{{"travelling-canonical", AbelEquation::TravellingCanonical},
                                                {"travelling-invariant", AbelEquation::TravellingInvariant},
                                                {"scaling-canonical", AbelEquation::ScalingCanonical},
                                                {"scaling-invariant", AbelEquation::ScalingInvariant}};
  const auto which = ids.at(cfg.equation);
  const auto form = cfg.form == "paper" ? odesolve::EquationForm::AsPrinted : odesolve::EquationForm::Derived;
  const double x0 = cfg.x0.value_or(1.0), y0 = cfg.y0.value_or(0.5), x1 = cfg.x1.value_or(2.0);
  const auto traj = odesolve::abel_solve_numeric(which, {cfg.a, cfg.b, number(cfg.c, "--c")}, x0, y0, x1,
                                                 integrator_options(x0, x1), form);
  const std::string x = odesolve::independent_name(which), y = odesolve::dependent_name(which);
  const Expr rhs = odesolve::abel_rhs(which, form);
  o.csv = traj.to_csv();
  o.report = {{"equation", y + "' = " + expr::to_string(rhs)},
              {"kind", odesolve::kind_of(which) == odesolve::AbelKind::First ? "first" : "second"},
              {"form", cfg.form},
              {"interval", {x0, x1}},
              {"initial_value", y0},
              {"status", odesolve::to_string(traj.status)},
              {"steps", traj.x.size()},
              {"end", {traj.x.back(), traj.y.back()[0]}}};
  o.lines.push_back(y + "' = " + expr::to_string(rhs));
  o.lines.push_back(std::string(odesolve::to_string(traj.status)) + " at " + x + " = " + fmt(traj.x.back()) + ", " +
                    y + " = " + fmt(traj.y.back()[0]) + " after " + std::to_string(traj.x.size()) + " steps");
  if (traj.status != odesolve::Status::Completed) {
    o.report["message"] = traj.message;
    o.lines.push_back(traj.message);
    o.code = kIndeterminate;
  }
  return o;
}

solutions::Parameters solution_parameters(const RunConfig& cfg) {
  return {cfg.a, cfg.b, number(cfg.c, "--c"), cfg.C0, cfg.C1};
}

// Bases of negative powers, so user fields get masked near their poles.
void collect_denominators(const expr::Expr& e, std::vector<expr::Expr>& out) {
  if (e.kind() == expr::Kind::Power && e.value() < 0) {
    if (std::none_of(out.begin(), out.end(), [&](const expr::Expr& d) { return d == e.base(); })) out.push_back(e.base());
  }
  for (const auto& c : e.children()) collect_denominators(c, out);
}

solutions::ClosedFormSolution closed_form(const RunConfig& cfg, const std::string& target) {
  const auto form = solutions::parse_form(cfg.form);
  if (target == "travelling") return solutions::travelling_solution(solution_parameters(cfg), form);
  if (target == "general") {
    return solutions::general_solution(expression(cfg.h.empty() ? "1" : cfg.h, "--h"),
                                       expression(cfg.g.empty() ? "1" : cfg.g, "--g"), solution_parameters(cfg),
                                       form);
  }
  if (cfg.u.empty() || cfg.v.empty()) throw UsageError("report fields needs --u and --v");
  solutions::ClosedFormSolution s;
  s.id = "fields";
  s.parameters = solution_parameters(cfg);
  s.u = expression(cfg.u, "--u");
  s.v = expression(cfg.v, "--v");
  collect_denominators(s.u, s.singular);
  collect_denominators(s.v, s.singular);
  return s;
}

json to_json(const solutions::ClosedFormSolution& s) {
  json quadratures = json::array();
  for (const auto& q : s.quadratures) {
    quadratures.push_back({{"name", q.name}, {"variable", q.variable}, {"derivative", expr::to_string(q.integrand)}});
  }
  return {{"id", s.id},
          {"form", solutions::to_string(s.form)},
          {"parameters", solutions::to_json(s.parameters)},
          {"u", expr::to_string(s.u)},
          {"v", expr::to_string(s.v)},
          {"singular_locus", s.singular_locus},
          {"quadratures", quadratures},
          {"warnings", s.warnings}};
}

// Residual report of a closed form (optionally moved by a group flow).
Outcome residuals(const RunConfig& cfg, const std::string& target, const std::string& command) {
  Outcome o;
  o.stem = command + "-" + target;
  auto s = closed_form(cfg, target);
  const bool fd = cfg.method == "finite-difference";
  const double default_tol = fd ? 1e-5 : target == "travelling" ? 1e-10 : 1e-8;
  const double tol = cfg.tolerance > 0 ? cfg.tolerance : default_tol;
  const symmetry::VectorField* vf = nullptr;
  if (!cfg.flow.empty()) {
    vf = &symmetry::paper_field(cfg.flow, "cheng").field;
    o.report["flow"] = {{"field", cfg.flow}, {"generator", vf->to_string()}, {"eps", cfg.eps}};
    o.stem += "-" + cfg.flow;
  }
  // The finite-difference route flows sampled points instead.
  const auto original = s;
  if (vf && !fd) s = solutions::transport_exact(s, *vf, cfg.eps);
  o.report["solution"] = to_json(s);
  o.lines.push_back("u = " + expr::to_string(s.u));
  o.lines.push_back("v = " + expr::to_string(s.v));
  for (const auto& q : s.quadratures) {
    o.lines.push_back(q.name + "' = " + expr::to_string(q.integrand) + ", " + q.name + "(1) = 1");
  }
  for (const auto& w : s.warnings) o.warnings.push_back(w);
  if (command == "solve" && !cfg.report) return o;
  solutions::ResidualReport r;
  if (fd) {
    auto field = vf ? solutions::transport(original, *vf, cfg.eps, cfg.grid, cfg.margin)
                    : solutions::sample(s, cfg.grid, cfg.margin);
    r = solutions::residual_report(field, cfg.a, cfg.b, s.id);
    r.warnings = s.warnings;
  } else {
    r = solutions::residual_report(s, cfg.grid, cfg.margin);
    for (const auto& w : s.warnings) {
      if (std::find(r.warnings.begin(), r.warnings.end(), w) == r.warnings.end()) r.warnings.push_back(w);
    }
  }
  const bool ok = r.max < tol;
  if (!ok && s.form == solutions::Form::Paper && target != "fields") {
    r.warnings.push_back("the printed form does not satisfy the system: max residual " + fmt(r.max));
  }
  o.warnings = r.warnings;
  o.report["residuals"] = solutions::to_json(r);
  o.report["tolerance"] = tol;
  o.csv = solutions::to_csv(r);
  o.lines.push_back("residuals (" + r.method + ") on " + std::to_string(r.grid.nt) + "x" + std::to_string(r.grid.nx) +
                    ": max " + fmt(r.max) + ", rms " + fmt(r.rms) + ", " + std::to_string(r.masked) + " masked");
  if (s.form == solutions::Form::Paper && target != "fields") {
    o.lines.push_back(std::string(ok ? "PASS" : "WARN") + " max residual < " + fmt(tol) + " (printed form, reported)");
    o.report["passed"] = ok;
  } else {
    o.lines.push_back(verdict(ok) + " max residual < " + fmt(tol));
    o.report["passed"] = ok;
    if (!ok) o.code = kFailed;
  }
  return o;
}

Outcome solve(const RunConfig& cfg) {
  if (cfg.target == "riccati") return solve_riccati(cfg);
  if (cfg.target == "euler") return solve_euler(cfg);
  if (cfg.target == "abel") return solve_abel(cfg);
  return residuals(cfg, cfg.target, "solve");
}

// ---------------------------------------------------------------- output

void write_atomic(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    f << text;
    f.flush();
    if (!f) throw std::runtime_error("cannot write " + tmp.string());
  }
  fs::rename(tmp, path);
}

int finish(Outcome o, const RunConfig& cfg, std::ostream& out) {
  json& j = o.report;
  j["command"] = cfg.command;
  j["target"] = cfg.target;
  j["parameters"] = parameters(cfg);
  j["seed"] = cfg.seed;
  j["grid"] = solutions::to_json(cfg.grid);
  j["warnings"] = o.warnings;
  j["exit_code"] = o.code;
  for (const auto& l : o.lines) out << l << "\n";
  for (const auto& w : o.warnings) out << "warning: " << w << "\n";

  fs::path dir = cfg.out_dir;
  if (dir.empty()) {
    const char* env = std::getenv(kOutputDirVariable);
    dir = env && *env ? env : ".";
  }
  if (cfg.format != "csv") {
    const fs::path p = dir / (o.stem + ".json");
    write_atomic(p, j.dump(2) + "\n");
    out << "wrote " << p.string() << "\n";
  }
  if (cfg.format != "json" && !o.csv.empty()) {
    const fs::path p = dir / (o.stem + ".csv");
    write_atomic(p, o.csv);
    out << "wrote " << p.string() << "\n";
  }
  return o.code;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  CLI::App app{"Symmetry analysis of u_x + a u v = 0, v_t - b u_x = 0: symmetry checks, reductions, "
               "ODE solutions and residual reports.",
               "cheng"};
  app.set_help_flag("--help", "Print this help and exit");
  app.config_formatter(std::make_shared<JsonConfig>());
  app.set_config("--config", "", "JSON object of option values keyed by long option name");
  app.allow_config_extras(false);
  app.require_subcommand(1, 1);
  app.fallthrough();

  app.add_option("--a", cfg.a, "Parameter a")->capture_default_str();
  app.add_option("--b", cfg.b, "Parameter b")->capture_default_str();
  app.add_option("--c", cfg.c, "Wave speed c (an expression; c(x) for reduce space-dep)")->capture_default_str();
  app.add_option("--C0", cfg.C0, "Integration constant C0")->capture_default_str();
  app.add_option("--C1", cfg.C1, "Integration constant C1")->capture_default_str();
  app.add_option("--C2", cfg.C2, "Constant of the Euler-type solutions")->capture_default_str();
  app.add_option("--seed", cfg.seed, "Seed of the sampled zero tests")->capture_default_str();
  app.add_option("--g", cfg.g, "Instantiation of g(x)");
  app.add_option("--h", cfg.h, "Instantiation of h(t)");
  app.add_option("--tau", cfg.tau, "tau(t) for reduce space-dep")->capture_default_str();
  app.add_option("--lambda", cfg.lambda, "Instantiation of lambda(x)");
  app.add_option("--field", cfg.field, "Vector field to check instead of the catalog, e.g. \"d/du\"");
  app.add_option("--system", cfg.system, "System for --field")
      ->check(CLI::IsMember(symmetry::system_ids()))
      ->capture_default_str();
  app.add_option("--only", cfg.only, "Check one catalog field");
  app.add_option("--chart", cfg.chart, "Reduce order in a chart")->check(CLI::IsMember({"canonical", "invariants"}));
  app.add_option("--generator", cfg.generator, "Generator the chart is adapted to")
      ->check(CLI::Range(1, 2))
      ->capture_default_str();
  app.add_flag("--as-printed", cfg.as_printed, "Use the chart as printed");
  app.add_option("--form", cfg.form, "Closed form or Abel equation variant")
      ->check(CLI::IsMember({"paper", "derived"}))
      ->capture_default_str();
  app.add_flag("--check", cfg.check, "Compare the closed form with the integrator");
  app.add_flag("--report", cfg.report, "Residual report on the grid");
  app.add_option("--equation", cfg.equation, "Abel equation")
      ->check(CLI::IsMember(
          {"travelling-canonical", "travelling-invariant", "scaling-canonical", "scaling-invariant"}))
      ->capture_default_str();
  app.add_option("--variant", cfg.variant, "Euler-type equation")
      ->check(CLI::IsMember({"travelling", "scaling"}))
      ->capture_default_str();
  app.add_option("--x0", cfg.x0, "Start of the integration");
  app.add_option("--y0", cfg.y0, "Initial value (abel)");
  app.add_option("--x1", cfg.x1, "End of the integration");
  app.add_option("--u", cfg.u, "u(t, x) for report fields");
  app.add_option("--v", cfg.v, "v(t, x) for report fields");
  app.add_option("--flow", cfg.flow, "Move the solution by exp(eps X) for a catalog field X of the system");
  app.add_option("--eps", cfg.eps, "Group parameter of --flow")->capture_default_str();
  app.add_option("--method", cfg.method, "Residual method")
      ->check(CLI::IsMember({"symbolic", "finite-difference"}))
      ->capture_default_str();
  app.add_option("--t0", cfg.grid.t0, "Grid start in t")->capture_default_str();
  app.add_option("--t1", cfg.grid.t1, "Grid end in t")->capture_default_str();
  app.add_option("--nt", cfg.grid.nt, "Grid points in t")->capture_default_str();
  app.add_option("--x0-grid", cfg.grid.x0, "Grid start in x")->capture_default_str();
  app.add_option("--x1-grid", cfg.grid.x1, "Grid end in x")->capture_default_str();
  app.add_option("--nx", cfg.grid.nx, "Grid points in x")->capture_default_str();
  app.add_option("--margin", cfg.margin, "Mask points closer than this to a singular denominator")
      ->capture_default_str();
  app.add_option("--tol", cfg.tolerance, "Pass threshold (default per command)");
  app.add_option("--out", cfg.out_dir, std::string("Output directory (default $") + kOutputDirVariable + " or .)");
  app.add_option("--format", cfg.format, "Files to write")
      ->check(CLI::IsMember({"json", "csv", "both"}))
      ->capture_default_str();

  auto* verify = app.add_subcommand("verify-symmetries", "Check the catalog vector fields on their equations");
  auto* reduce_cmd = app.add_subcommand("reduce", "Similarity reduction or chart reduction");
  reduce_cmd->add_option("id", cfg.target, "Reduction")
      ->required()
      ->check(CLI::IsMember({"case1", "case2a", "case2b", "general-I", "general-II", "space-dep"}));
  auto* solve_cmd = app.add_subcommand("solve", "Closed forms, integrations and solutions");
  solve_cmd->add_option("target", cfg.target, "What to solve")
      ->required()
      ->check(CLI::IsMember({"riccati", "euler", "abel", "travelling", "general"}));
  auto* report_cmd = app.add_subcommand("report", "Residual report of a closed-form (u, v)");
  report_cmd->add_option("target", cfg.target, "Solution")
      ->required()
      ->check(CLI::IsMember({"travelling", "general", "fields"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    cfg.grid.validate();
    if (cfg.chart.empty() && (cfg.as_printed || app.count("--generator") > 0) && cfg.command != "verify-symmetries") {
      throw UsageError("--generator and --as-printed need --chart");
    }
    if (!cfg.chart.empty() && (cfg.target == "space-dep" || cfg.target.starts_with("general"))) {
      throw UsageError("no charts for " + cfg.target);
    }
    if (!cfg.flow.empty()) symmetry::paper_field(cfg.flow, "cheng");
    Outcome o;
    if (verify->parsed()) {
      cfg.command = "verify-symmetries";
      o = verify_symmetries(cfg);
    } else if (reduce_cmd->parsed()) {
      cfg.command = "reduce";
      o = reduce(cfg);
    } else if (solve_cmd->parsed()) {
      cfg.command = "solve";
      o = solve(cfg);
    } else if (report_cmd->parsed()) {
      cfg.command = "report";
      o = residuals(cfg, cfg.target, "report");
    }
    return finish(std::move(o), cfg, out);
  } catch (const expr::IndeterminateError& e) {
    err << "indeterminate: " << e.what() << "\n";
    return kIndeterminate;
  } catch (const solutions::EmptyReportError& e) {
    err << "numerical failure: " << e.what() << "\n";
    return kIndeterminate;
  } catch (const symmetry::FlowError& e) {
    err << "numerical failure: " << e.what() << "\n";
    return kIndeterminate;
  } catch (const expr::EvaluationError& e) {
    err << "numerical failure: " << e.what() << "\n";
    return kIndeterminate;
  } catch (const reduction::ReductionFailure& e) {
    err << "reduction failed: " << e.what() << "\n";
    return kFailed;
  } catch (const std::invalid_argument& e) {
    err << "usage: " << e.what() << "\n";
    return kUsage;
  } catch (const std::domain_error& e) {
    err << "usage: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kIndeterminate;
  }
}

}  // namespace cheng::cli
