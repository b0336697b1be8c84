#pragma once

#include <string>

#include <json.hpp>

#include "ibp/system_model.hpp"

namespace ibp {

// Scenario file schema:
//   { "n_x", "N", "S",
//     "A": [per-step matrix], "Q": [per-step matrix],
//     "sensors": [ {"H": [per-step matrix], "R": [per-step matrix]}, ... ],
//     "C0": matrix, "x0_mean": vector, "W": [per-step matrix],
//     "cost_fn": "trace" | "determinant" | "max_eigenvalue" }
// Doubles round-trip exactly (shortest-representation serialization).
nlohmann::json scenario_to_json(const Scenario& sc);
Scenario scenario_from_json(const nlohmann::json& j);

void save_scenario(const Scenario& sc, const std::string& path);
Scenario load_scenario(const std::string& path);

}  // namespace ibp
