#pragma once

#include <string>

#include <nlohmann/json_fwd.hpp>

#include "robest/certifier.hpp"
#include "robest/harness.hpp"
#include "robest/model.hpp"
#include "robest/solver.hpp"

namespace robest {

// Scenario document: {"n", "sensors": [{"H", "cost"}], "p", "noise", "seed"}.
// Sensor indices on every external surface are 1-based.
Scenario scenario_from_json(const nlohmann::json& doc);
nlohmann::json scenario_to_json(const Scenario& scenario);
Scenario load_scenario(const std::string& path);
void save_scenario(const Scenario& scenario, const std::string& path);

nlohmann::json certificate_to_json(const Certificate& cert);
Certificate certificate_from_json(const nlohmann::json& doc);

nlohmann::json estimate_to_json(const EstimateResult& result);
EstimateResult estimate_from_json(const nlohmann::json& doc);

nlohmann::json sweep_summary_to_json(const std::vector<BreakdownEntry>& entries,
                                     std::uint64_t seed, int trials);

// Serialization used for all structured outputs; stable across runs.
std::string dump_json(const nlohmann::json& doc);
void write_text_file(const std::string& path, const std::string& content);

}  // namespace robest
