#pragma once

#include <filesystem>
#include <string>

#include <nlohmann/json.hpp>

#include "phaserelax/model.h"

namespace phaserelax {

// Instance file format (indices 1-based):
//
//   {"n": 3, "sense": "minimize",
//    "Q0": {"re": [[...]], "im": [[...]]},
//    "constraints": [{"Q": {...}, "b": 1.0, "rel": "<="}],
//    "bounds": [{"l": 1.0, "u": 4.0}],
//    "edges": [{"i": 1, "j": 2, "phase": {"type": "interval", "lo": ..., "hi": ...}}]}
//
// Optional keys: "objective_scale", "variable_phases" (list of phase objects
// or null), "modulus_levels", "ratio_objective" ([{"Q", "weight"}]),
// "homogenized_from". Phase objects are {"type": "interval", "lo", "hi"},
// {"type": "discrete", "angles": [...]} or {"type": "uniform", "M": m}.

nlohmann::json to_json(const HermitianMatrix& m);
HermitianMatrix hermitian_from_json(const nlohmann::json& j);

nlohmann::json to_json(const PhaseSet& p);
PhaseSet phase_set_from_json(const nlohmann::json& j);

nlohmann::json to_json(const Instance& inst);
/// Parses and normalizes phase sets. Throws Error on malformed input; use
/// validate_instance for semantic checks.
Instance instance_from_json(const nlohmann::json& j);

/// Canonical serialization: sorted keys, two-space indent, trailing newline.
std::string dump_canonical(const nlohmann::json& j);

void save_instance(const Instance& inst, const std::filesystem::path& path);
Instance load_instance(const std::filesystem::path& path);

nlohmann::json read_json_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace phaserelax
