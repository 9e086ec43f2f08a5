#pragma once

#include <string>

#include "json.hpp"

#include "cheng/solutions/grid.hpp"

namespace cheng::solutions {

nlohmann::json to_json(const GridSpec& grid);
nlohmann::json to_json(const Parameters& p);
/// Summary only: grid, method, statistics, warnings.  Keys sorted.
nlohmann::json to_json(const ResidualReport& r);

/// Columns t,x,u,v,res1,res2; masked points are left out.
std::string to_csv(const ResidualReport& r);

}  // namespace cheng::solutions
