#pragma once

#include <string>

#include <json.hpp>

#include "vcontract/duality.hpp"
#include "vcontract/verify.hpp"

namespace vcontract {

// 12 significant digits, the fixed output precision of all artifacts.
std::string format_number(double v);
// v rounded to 12 significant digits; non-finite values become null.
nlohmann::json json_number(double v);

nlohmann::json to_json(const ModelSpec& model);
nlohmann::json to_json(const HamiltonianEval& h);
nlohmann::json to_json(const MCEstimate& e);
nlohmann::json to_json(const DualityReport& r);
nlohmann::json to_json(const BestResponseReport& r);
nlohmann::json to_json(const EquivalenceReport& r);
nlohmann::json to_json(const ExampleSolution& s);
nlohmann::json summary_json(const ModelSpec& model, const PathEnsemble& ens);

std::string duality_csv(const DualityReport& r);
std::string traces_csv(const PathEnsemble& ens);
std::string surface_csv(const std::vector<ScanCell>& cells, const std::string& param_name);

void write_text(const std::string& path, const std::string& text);

} // namespace vcontract
