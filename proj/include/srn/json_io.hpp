#pragma once

#include "srn/ctmc.hpp"
#include "srn/elimination.hpp"
#include "srn/network.hpp"
#include "srn/two_scale.hpp"

#include <nlohmann/json_fwd.hpp>

#include <string>

namespace srn {

inline constexpr const char* kSchemaTag = "srn-reduce/1";

nlohmann::json networkToJson(const ReactionNetwork& net);
ReactionNetwork networkFromJson(const nlohmann::json& j);

/// Species-count map {"A": 2, ...}; zero entries omitted.
nlohmann::json stateToJson(const SpeciesSet& sp, const StateVec& x);
nlohmann::json coreStateToJson(const ReactionNetwork& net, const SpeciesPartition& part,
                               const StateVec& z);

/// Arithmetic family of reduced reactions: member k has reactant
/// base_reactant + k*step_reactant and product base_product + k*step_product.
struct ReducedFamily {
  StateVec baseReactant, baseProduct;
  StateVec stepReactant, stepProduct;
  std::vector<int> members;  // indices into ReducedSRN::reactions()
};

/// Groups materialized reduced reactions into arithmetic chains along the
/// demand increments of elimination-graph cycles with nonzero net effect.
std::vector<ReducedFamily> detectFamilies(const ReducedSRN& red);

nlohmann::json reducedToJson(const ReducedSRN& red);
nlohmann::json assumption2ToJson(const ReactionNetwork& net, const Assumption2Report& rep);
nlohmann::json sweepToJson(const SweepReport& rep, const Assumption2Report& a2,
                           const ReactionNetwork& net);

std::string timelineToCsv(const DistributionTimeline& tl, const std::vector<std::string>& labels);
nlohmann::json timelineToJson(const DistributionTimeline& tl,
                              const std::vector<std::string>& labels);
std::string trajectoryToCsv(const Trajectory& tr, const SpeciesSet& sp);

}  // namespace srn
