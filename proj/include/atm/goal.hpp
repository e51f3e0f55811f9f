#pragma once

#include <string>
#include <vector>

#include "atm/common.hpp"

namespace atm {

enum class GoalKind { Explicit, Implicit };

struct Goal {
    std::string id;
    GoalKind kind = GoalKind::Explicit;
    Vec target_features;
    double tolerance = 1.0;
    // Indices into concat(env, sys) that the goal constrains; empty = all features.
    std::vector<std::size_t> projection;
};

}  // namespace atm
