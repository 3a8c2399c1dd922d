#pragma once

#include "json_support.hpp"
#include "sdpack/model.hpp"

namespace sdpack::json_support {

json packing_to_json(const PackingProblem& p);
PackingProblem packing_from_json(const json& j);
json solution_to_json(const Solution& s);
Solution solution_from_json(const json& j);

}  // namespace sdpack::json_support
