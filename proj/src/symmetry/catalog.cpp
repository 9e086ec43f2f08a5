#include "cheng/symmetry/catalog.hpp"

#include <algorithm>
#include <map>

#include "cheng/expr/parse.hpp"

namespace cheng::symmetry {

namespace {

PDESystem make(std::string id, std::string description, std::vector<std::string> independent,
               std::vector<std::string> dependent, std::vector<const char*> residuals,
               std::vector<LeadingDerivative> leading, int order) {
  PDESystem s{std::move(id), std::move(description), std::move(independent), std::move(dependent), {},
              std::move(leading), order};
  for (const char* r : residuals) s.residuals.push_back(expr::parse(r));
  s.validate();
  return s;
}

std::map<std::string, PDESystem, std::less<>> build_systems() {
  std::map<std::string, PDESystem, std::less<>> m;
  auto add = [&m](PDESystem s) { m.emplace(s.id, std::move(s)); };
  add(make("cheng", "u_x = -a u v, v_t = b u_x", {"t", "x"}, {"u", "v"},
           {"D[u,0,1](t,x) + a*u(t,x)*v(t,x)", "D[v,1,0](t,x) - b*D[u,0,1](t,x)"},
           {{"u", {0, 1}}, {"v", {1, 0}}}, 1));
  add(make("travelling", "-c w'^2/(a w^2) + c w''/(a w) = b w'", {"f"}, {"w"},
           {"-c*w'(f)^2/(a*w(f)^2) + c*w''(f)/(a*w(f)) - b*w'(f)"}, {{"w", {2}}}, 2));
  add(make("scaling-a", "w'/(a w) + f w''/(a w) - f w'^2/(a w^2) + b w' = 0", {"f"}, {"w"},
           {"w'(f)/(a*w(f)) + f*w''(f)/(a*w(f)) - f*w'(f)^2/(a*w(f)^2) + b*w'(f)"}, {{"w", {2}}}, 2));
  add(make("scaling-b", "f w w'' + a b w^3 + w w' + a b f w^2 w' - f w'^2 = 0", {"f"}, {"w"},
           {"f*w(f)*w''(f) + a*b*w(f)^3 + w(f)*w'(f) + a*b*f*w(f)^2*w'(f) - f*w'(f)^2"}, {{"w", {2}}}, 2));
  add(make("space-dep", "(u_xt/u - u_x u_t/u^2) + c(x) u_x = 0", {"t", "x"}, {"u"},
           {"D[u,1,1](t,x)/u(t,x) - D[u,0,1](t,x)*D[u,1,0](t,x)/u(t,x)^2 + c(x)*D[u,0,1](t,x)"},
           {{"u", {1, 1}}}, 2));
  add(make("space-dep-const", "(u_xt/u - u_x u_t/u^2) + (b/a) u_x = 0", {"t", "x"}, {"u"},
           {"D[u,1,1](t,x)/u(t,x) - D[u,0,1](t,x)*D[u,1,0](t,x)/u(t,x)^2 + b/a*D[u,0,1](t,x)"},
           {{"u", {1, 1}}}, 2));
  add(make("space-dep-ode-as-printed", "w_a''/w_a = w_a'/w_a^2 + w_a'", {"f_a"}, {"w_a"},
           {"w_a''(f_a)/w_a(f_a) - w_a'(f_a)/w_a(f_a)^2 - w_a'(f_a)"}, {{"w_a", {2}}}, 2));
  add(make("space-dep-ode-derived", "w_a''/w_a = w_a'^2/w_a^2 + w_a'", {"f_a"}, {"w_a"},
           {"w_a''(f_a)/w_a(f_a) - w_a'(f_a)^2/w_a(f_a)^2 - w_a'(f_a)"}, {{"w_a", {2}}}, 2));
  return m;
}

const std::map<std::string, PDESystem, std::less<>>& systems() {
  static const auto m = build_systems();
  return m;
}

std::vector<CatalogField> build_fields() {
  std::vector<CatalogField> f;
  auto add = [&f](const char* id, const char* sys, const char* text, std::string note = {}) {
    f.push_back({id, sys, VectorField::parse(text, id), std::move(note)});
  };
  add("Gamma1", "cheng", "-v*g'(x) d/dv + g(x) d/dx");
  add("Gamma2", "cheng", "h(t) d/dt - u*h'(t) d/du");
  add("Gamma1A", "cheng", "d/dx");
  add("Gamma2A", "cheng", "d/dt");
  add("Gamma1B", "travelling", "d/df");
  add("Gamma2B", "travelling", "f d/df - w d/dw");
  add("Gamma1C", "cheng", "x d/dx - v d/dv");
  add("Gamma2C", "cheng", "t d/dt - u d/du");
  add("Gamma1D", "scaling-a", "d/df");
  add("Gamma2D", "scaling-a", "-f*log(f) d/df + w d/dw");
  add("Gamma1E", "scaling-b", "f d/df - w d/dw");
  add("Gamma2E", "scaling-b", "f*log(f) d/df - (log(f) + 1)*w d/dw");
  add("lambda", "space-dep-const", "lambda(x) d/dx");
  add("tau", "space-dep-const", "tau(t) d/dt - tau'(t)*u d/du");
  add("c-field", "space-dep", "c(x) d/dx - c'(x)*u d/du");
  add("tau", "space-dep", "tau(t) d/dt - tau'(t)*u d/du");
  for (const char* sys : {"space-dep-ode-derived", "space-dep-ode-as-printed"}) {
    const std::string note = std::string(sys) == "space-dep-ode-derived"
                                 ? "variant produced by the similarity transform"
                                 : "variant as printed";
    add("Gamma_a", sys, "d/df_a", note);
    add("Gamma_b", sys, "f_a d/df_a - w_a d/dw_a", note);
  }
  return f;
}

}  // namespace

const PDESystem& catalog_system(std::string_view id) {
  auto it = systems().find(id);
  if (it == systems().end()) throw UnknownIdentifier("unknown system '" + std::string(id) + "'");
  return it->second;
}

std::vector<std::string> system_ids() {
  std::vector<std::string> out;
  for (const auto& [k, v] : systems()) out.push_back(k);
  return out;
}

const std::vector<CatalogField>& paper_fields() {
  static const auto f = build_fields();
  return f;
}

const CatalogField& paper_field(std::string_view id, std::string_view sys) {
  const auto& all = paper_fields();
  auto it = std::find_if(all.begin(), all.end(), [&](const CatalogField& c) {
    return c.id == id && (sys.empty() || c.system == sys);
  });
  if (it == all.end()) throw UnknownIdentifier("unknown field '" + std::string(id) + "'");
  return *it;
}

}  // namespace cheng::symmetry
