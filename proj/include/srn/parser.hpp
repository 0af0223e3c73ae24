#pragma once

#include "srn/network.hpp"

#include <string>

namespace srn {

/// Parses the reaction-network DSL. One reaction per line:
///   REACTANT -> PRODUCT @ RATE [fast]
///   REACTANT <-> PRODUCT @ KF, KR [fast]
/// Complexes are `+`-separated `coeff*Species` or `Species` terms; `0` is the
/// empty complex. `param NAME = VALUE` binds rate symbols; `#` starts a comment.
ReactionNetwork parseNetwork(const std::string& text);

/// Emits DSL text that reparses to an identical network (mass-action only).
std::string renderNetwork(const ReactionNetwork& net);

/// Structural equality: same species order, reactions, rate constants, fast set.
bool sameNetwork(const ReactionNetwork& a, const ReactionNetwork& b);

}  // namespace srn
