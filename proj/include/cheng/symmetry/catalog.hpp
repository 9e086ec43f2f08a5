#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "cheng/symmetry/system.hpp"
#include "cheng/symmetry/vector_field.hpp"

namespace cheng::symmetry {

class UnknownIdentifier : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Systems by identifier:
///   cheng                     u_x + a u v = 0,  v_t - b u_x = 0
///   travelling                second-order equation for w(f), f = x - c t
///   scaling-a, scaling-b      second-order equations of the two scaling reductions
///   space-dep                 (u_xt/u - u_x u_t/u^2) + c(x) u_x = 0
///   space-dep-const           the same with constant coefficient b/a
///   space-dep-ode-as-printed  w_a''/w_a = w_a'/w_a^2 + w_a'
///   space-dep-ode-derived     w_a''/w_a = w_a'^2/w_a^2 + w_a'
const PDESystem& catalog_system(std::string_view id);
std::vector<std::string> system_ids();

struct CatalogField {
  std::string id;
  std::string system;
  VectorField field;
  /// Which reading of the source the pairing follows, for reports.
  std::string note;
};

/// Every generator listed in the source, paired with its equation.  The
/// generators of the space-dependent second-order equation appear once per
/// printed/derived variant.
const std::vector<CatalogField>& paper_fields();
const CatalogField& paper_field(std::string_view id, std::string_view system = {});

}  // namespace cheng::symmetry
