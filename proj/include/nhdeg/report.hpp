#pragma once

#include <string>

#include <json.hpp>

#include "nhdeg/finder.hpp"
#include "nhdeg/symmetry.hpp"

namespace nhdeg {

// Shortest decimal text that reads back to the same double.
std::string format_double(double x);

// Non-finite numbers become JSON null.
nlohmann::json to_json(const DegeneracyRecord& rec);
nlohmann::json to_json(const ScanDiagnostics& diag);
nlohmann::json to_json(const ScanConfig& config);
nlohmann::json to_json(const SymmetryCheck& check);

}  // namespace nhdeg
