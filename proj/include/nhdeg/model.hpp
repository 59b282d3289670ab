#pragma once

#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "nhdeg/types.hpp"

namespace nhdeg {

enum class Trig { Sin, Cos, Const };

struct Factor {
  Trig fn = Trig::Const;
  int axis = 0;  // 0 = x, 1 = y, 2 = z
};

// coeff * prod(factors) * Upsilon^mu
struct Term {
  int mu = 0;
  cd coeff = 0.0;
  std::vector<Factor> factors;
};

struct ModelSpec {
  int n = 2;
  std::string name;
  std::vector<Term> terms;
  std::map<std::string, double> params;  // already substituted into coeffs
};

struct ZooEntry {
  std::string name;
  int bands = 2;
  std::map<std::string, double> defaults;
  bool from_paper = true;
  std::string summary;
};

CMatrix eval_bloch(const ModelSpec& model, const Momentum& k);

// Built-in models. Parameters not given take the listed defaults; unknown
// names or parameters throw std::invalid_argument.
ModelSpec zoo(const std::string& name, const std::map<std::string, double>& params = {});
const std::vector<ZooEntry>& zoo_entries();

// Throws std::invalid_argument on malformed input.
ModelSpec model_from_json(const nlohmann::json& j);
nlohmann::json model_to_json(const ModelSpec& model);
ModelSpec load_model_file(const std::string& path);

int axis_index(const std::string& axis);
const char* axis_name(int axis);

}  // namespace nhdeg
