#include "cheng/solutions/report.hpp"

#include <cstdio>

namespace cheng::solutions {

nlohmann::json to_json(const GridSpec& g) {
  return {{"t", {{"from", g.t0}, {"to", g.t1}, {"count", g.nt}}}, {"x", {{"from", g.x0}, {"to", g.x1}, {"count", g.nx}}}};
}

nlohmann::json to_json(const Parameters& p) {
  return {{"a", p.a}, {"b", p.b}, {"c", p.c}, {"C0", p.C0}, {"C1", p.C1}};
}

nlohmann::json to_json(const ResidualReport& r) {
  return {{"source", r.source},
          {"method", r.method},
          {"grid", to_json(r.grid)},
          {"a", r.a},
          {"b", r.b},
          {"max_residual_1", r.max_res1},
          {"max_residual_2", r.max_res2},
          {"max", r.max},
          {"rms", r.rms},
          {"points", r.points},
          {"masked", r.masked},
          {"warnings", r.warnings}};
}

std::string to_csv(const ResidualReport& r) {
  std::string out = "t,x,u,v,res1,res2\n";
  char line[192];
  for (std::size_t i = 0; i < r.grid.nt; ++i) {
    for (std::size_t j = 0; j < r.grid.nx; ++j) {
      const std::size_t k = r.grid.index(i, j);
      if (!r.field.valid[k]) continue;
      std::snprintf(line, sizeof line, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", r.grid.t(i), r.grid.x(j),
                    r.field.u[k], r.field.v[k], r.res1[k], r.res2[k]);
      out += line;
    }
  }
  return out;
}

}  // namespace cheng::solutions
