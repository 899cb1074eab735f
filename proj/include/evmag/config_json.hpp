#pragma once

// JSON mapping for every configurable type. Readers validate each field as it
// is read and report failures with a dotted field path, e.g.
// "solver.window: must be an odd integer >= 1".

#include <string>

#include <json.hpp>

#include "evmag/error.hpp"
#include "evmag/event_sim.hpp"
#include "evmag/magnifier.hpp"
#include "evmag/motion_solver.hpp"
#include "evmag/synthgen.hpp"

namespace evmag {

using Json = nlohmann::json;

class ConfigError : public InvalidArgument {
public:
    using InvalidArgument::InvalidArgument;
};

Json to_json(const SimConfig& c);
Json to_json(const SolverConfig& c);
Json to_json(const FilterSpec& c);
Json to_json(const Trajectory& t);
Json to_json(const DatasetConfig& c);
Json to_json(const Manifest& m);

// Each reader starts from `base` and overrides the fields present in `j`.
// `path` prefixes error messages.
SimConfig sim_config_from_json(const Json& j, SimConfig base = {}, const std::string& path = "sim");
SolverConfig solver_config_from_json(const Json& j, SolverConfig base = {}, const std::string& path = "solver");
FilterSpec filter_spec_from_json(const Json& j, FilterSpec base = {}, const std::string& path = "filter");
Trajectory trajectory_from_json(const Json& j, Trajectory base = {}, const std::string& path = "trajectory");
DatasetConfig dataset_config_from_json(const Json& j, DatasetConfig base = {}, const std::string& path = "dataset");

Json load_json_file(const std::string& path);
void save_json_file(const std::string& path, const Json& j);

}  // namespace evmag
