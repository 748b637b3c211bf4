#pragma once

#include <string>

#include "fcnf/instance.hpp"
#include "json.hpp"

namespace fcnf {

class ParseError : public std::runtime_error {
 public:
  explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

// Instance JSON schema, version 1:
//   { "version": 1,
//     "nodes": [ {"id": 0, "requirement": 10.0}, ... ],
//     "arcs":  [ {"tail": 0, "head": 1, "variable_cost": 2.0,
//                 "fixed_cost": 100.0, "capacity": 10.0}, ... ] }
// Node ids must be exactly 0..n-1 (any order). Doubles round-trip bit-exactly.
nlohmann::json instance_to_json(const FCNFInstance& instance);
FCNFInstance instance_from_json(const nlohmann::json& j);

FCNFInstance load_instance(const std::string& path);
void save_instance(const FCNFInstance& instance, const std::string& path);

// DIMACS min-cost-flow reader, extended with per-arc fixed costs: a comment
// line of the form "c fixed <value>" immediately after an arc line sets that
// arc's fixed cost (default 0). Node ids are 1-based in the file. Lower
// bounds must be zero.
FCNFInstance load_dimacs(const std::string& path);

}  // namespace fcnf
