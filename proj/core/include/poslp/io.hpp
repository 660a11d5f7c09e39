#pragma once

#include <stdexcept>
#include <string>
#include <variant>

#include "poslp/instance.hpp"
#include "poslp/report.hpp"

namespace poslp {

struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

using AnyInstance = std::variant<MixedInstance, CoveringInstance, FacilityInstance>;

// Instance files are UTF-8 JSON, one object, 0-based indices:
//   {"type":"mpc","n":..,"packing":[{"rhs":..,"entries":[[col,coef],..]},..],"covering":[..]}
//   {"type":"cover","n":..,"costs":[..],"rows":[{"rhs":..,"entries":[..]},..]}
//   {"type":"fl","facilities":[{"open":..},..],"clients":..,"pairs":[[client,facility,cost],..]}
// Duplicate (col,coef) entries within a row are summed during parse.
AnyInstance parse_instance(const std::string& json_text);
AnyInstance read_instance_file(const std::string& path);

std::string instance_to_json(const MixedInstance& inst);
std::string instance_to_json(const CoveringInstance& inst);
std::string instance_to_json(const FacilityInstance& inst);

// Solution files: {"status":"..","x":[..],"y":[..]?,"certificate":{..},"counters":{..}}.
// For facility location, `fl` supplies the pair list so x can be written as
// sparse [client, facility, value] triples.
std::string solution_to_json(const SolveReport& report, const FacilityInstance* fl = nullptr);

// Parses a solution file back far enough to re-verify it (status, x, y,
// certificates).  Counter fields are ignored.
struct ParsedSolution {
  SolveStatus status = SolveStatus::Solved;
  std::vector<double> x;
  std::vector<double> y;
  std::optional<InfeasibilityCertificate> infeasibility;
  std::optional<BoundWitness> bound;
};
ParsedSolution parse_solution(const std::string& json_text, const FacilityInstance* fl = nullptr);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

}  // namespace poslp
