#pragma once

#include <string>

#include "json.hpp"

#include "mdiq/certify.hpp"
#include "mdiq/randomness.hpp"

namespace mdiq::io {

using nlohmann::json;

// Behaviour schema: {"parties", "outcome_counts", "ensembles", "probs",
// "meta"}. Ensembles hold density matrices as arrays of [re, im] pairs,
// row-major. Probabilities round-trip losslessly.
json behaviour_to_json(const Behaviour& b);
Behaviour behaviour_from_json(const json& j);
void save_behaviour(const Behaviour& b, const std::string& path);
Behaviour load_behaviour(const std::string& path);

json witness_to_json(const WitnessCoefficients& w);
WitnessCoefficients witness_from_json(const json& j);

std::string sweep_to_csv(const std::vector<SweepRow>& rows);

struct RobustnessSweepRow {
  double w = 0.0;
  double value = 0.0;
  conic::SolveStatus status = conic::SolveStatus::Indeterminate;
  double runtime_ms = 0.0;
};
std::string robustness_sweep_to_csv(const std::vector<RobustnessSweepRow>& rows);

std::string status_name(conic::SolveStatus s);
std::string verdict_name(conic::Verdict v);

// Operator / measurement / ensemble file schemas used by the CLI.
QuantumState state_from_json(const json& j);
json state_to_json(const QuantumState& s);
Povm povm_from_json(const json& j);
InputEnsemble ensemble_from_json(const json& j);

json load_json_file(const std::string& path);
void save_json_file(const json& j, const std::string& path);

}  // namespace mdiq::io
