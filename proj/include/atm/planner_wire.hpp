#pragma once

#include <json.hpp>

#include "atm/planner.hpp"

// JSON encoding of the planner protocol. Field names mirror PlanRequest and
// PlanResponse; numeric vectors are plain decimal arrays and `kind` is a
// lowercase string.
namespace atm::wire {

using nlohmann::json;

json to_json(const PlanRequest& request);
json to_json(const PlanResponse& response);

// Throws PlannerError(Schema) when the body does not match the protocol.
PlanRequest request_from_json(const json& body);
PlanResponse response_from_json(const json& body, PlanKind kind);

// Fixture tables:
// {"bucket_width": w,
//  "plans": [{"scenario": [..] | "env": [..], "goal": "g", "actions": [..], "expected_envs": [[..]]}],
//  "default_plan": {"actions": [..]},
//  "intuition": [{"scenario": [..], "action": "a"}], "default_intuition": "a"}
ScriptedPlanner scripted_planner_from_json(const json& table);

}  // namespace atm::wire
