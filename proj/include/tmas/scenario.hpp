#pragma once

#include "tmas/synthesis.hpp"

#include <iosfwd>
#include <string>

namespace tmas {

inline constexpr const char* kScenarioFormat = "tmas-scenario/1";
inline constexpr const char* kPlanFormat = "tmas-plan/1";

/// INI-style scenario text. Lines starting with '#' or ';' are comments.
/// Unknown sections or keys raise ScenarioError.
Scenario parse_scenario(std::istream& in);
Scenario load_scenario(const std::string& path);

/// Deterministic re-serialization; parse_scenario(canonical_text(s)) == s.
std::string canonical_text(const Scenario& s);
/// FNV-1a of canonical_text, as 16 hex digits.
std::string fingerprint(const Scenario& s);

void write_plan_json(std::ostream& out, const Model& m, const Plan& p);
/// Throws PlanMismatch if the plan was produced for another scenario or
/// does not fit the model.
Plan read_plan_json(std::istream& in, const Model& m);

}  // namespace tmas
