#include "srn/json_io.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

namespace srn {

using nlohmann::json;

json networkToJson(const ReactionNetwork& net) {
  json j;
  j["schema"] = kSchemaTag;
  j["species"] = net.species.names();
  json rs = json::array();
  for (const auto& r : net.reactions) {
    json jr;
    jr["id"] = r.id;
    jr["reactant"] = stateToJson(net.species, r.reactant);
    jr["product"] = stateToJson(net.species, r.product);
    switch (r.rate.kind()) {
      case RateLaw::Kind::MassAction:
        jr["rate"] = {{"type", "mass-action"}, {"kappa", r.rate.kappa()}};
        break;
      case RateLaw::Kind::Tabulated:
        jr["rate"] = {{"type", "tabulated"}, {"label", r.rate.label()}};
        break;
      case RateLaw::Kind::TimeModulated:
        jr["rate"] = {{"type", "time-modulated"}, {"label", r.rate.label()}};
        break;
    }
    jr["fast"] = net.isFast(r.id);
    rs.push_back(jr);
  }
  j["reactions"] = rs;
  return j;
}

ReactionNetwork networkFromJson(const json& j) {
  ReactionNetwork net;
  net.species = SpeciesSet(j.at("species").get<std::vector<std::string>>());
  int n = net.dim();
  for (const auto& jr : j.at("reactions")) {
    Reaction r;
    r.id = jr.at("id").get<int>();
    r.reactant = StateVec::Zero(n);
    r.product = StateVec::Zero(n);
    for (const auto& [name, coeff] : jr.at("reactant").items()) {
      r.reactant[net.species.require(name)] = coeff.get<int>();
    }
    for (const auto& [name, coeff] : jr.at("product").items()) {
      r.product[net.species.require(name)] = coeff.get<int>();
    }
    const auto& rate = jr.at("rate");
    if (rate.at("type") != "mass-action") {
      throw ParseError("only mass-action rate laws can be imported");
    }
    r.rate = RateLaw::massAction(rate.at("kappa").get<double>());
    if (jr.value("fast", false)) net.fastSet.push_back(r.id);
    net.reactions.push_back(std::move(r));
  }
  net.validate();
  return net;
}

json stateToJson(const SpeciesSet& sp, const StateVec& x) {
  json j = json::object();
  for (int i = 0; i < sp.size(); ++i) {
    if (x.size() > i && x[i] != 0) j[sp.name(i)] = x[i];
  }
  return j;
}

json coreStateToJson(const ReactionNetwork& net, const SpeciesPartition& part,
                     const StateVec& z) {
  json j = json::object();
  for (int i = 0; i < part.coreDim(); ++i) {
    if (z[i] != 0) j[net.species.name(part.core[i])] = z[i];
  }
  return j;
}

namespace {

// Net core-effect vectors of simple cycles among the U vertices of the
// elimination graph (parallel edges included; cycles enumerated edge-wise).
std::vector<StateVec> cycleEffects(const EliminationGraph& g) {
  const ReactionNetwork& net = *g.net;
  std::set<std::vector<int>> seen;
  std::vector<StateVec> effects;
  int nv = g.vertexCount();
  std::vector<int> pathEdges;
  std::vector<bool> onPath(nv, false);

  std::function<void(int, int)> dfs = [&](int start, int v) {
    for (int e : g.outEdges[v]) {
      const auto& edge = g.edges[e];
      if (edge.target == EliminationGraph::kOut) continue;
      if (edge.target == start) {
        pathEdges.push_back(e);
        StateVec eff = StateVec::Zero(g.part.coreDim());
        std::vector<int> canon = pathEdges;
        std::rotate(canon.begin(), std::min_element(canon.begin(), canon.end()), canon.end());
        if (seen.insert(canon).second) {
          for (int pe : pathEdges) {
            const Reaction& r = net.reaction(g.edges[pe].reactionId);
            eff += g.part.projectCore(r.jump());
          }
          if (eff.cwiseAbs().sum() != 0) effects.push_back(eff);
        }
        pathEdges.pop_back();
      } else if (edge.target != start && !onPath[edge.target]) {
        onPath[edge.target] = true;
        pathEdges.push_back(e);
        dfs(start, edge.target);
        pathEdges.pop_back();
        onPath[edge.target] = false;
      }
    }
  };
  for (int j = 0; j < g.part.uDim(); ++j) {
    int v = g.vertexOfU(j);
    onPath[v] = true;
    dfs(v, v);
    onPath[v] = false;
  }
  return effects;
}

}  // namespace

std::vector<ReducedFamily> detectFamilies(const ReducedSRN& red) {
  std::vector<ReducedFamily> families;
  if (red.partition().uDim() == 0) return families;
  EliminationGraph g = buildEliminationGraph(red.base(), red.partition(), red.fast());
  std::vector<StateVec> effects = cycleEffects(g);
  // Steps: demand grows by the negative part, product by the positive part.
  std::vector<std::pair<StateVec, StateVec>> steps;
  for (const auto& eff : effects) {
    StateVec sReact = (-eff).cwiseMax(0);
    StateVec sProd = eff.cwiseMax(0);
    bool dup = false;
    for (const auto& [a, b] : steps) {
      if (a == sReact && b == sProd) dup = true;
    }
    if (!dup) steps.emplace_back(sReact, sProd);
  }
  const auto& rxns = red.reactions();
  std::map<std::pair<std::vector<int>, std::vector<int>>, int> byKey;
  auto keyOf = [](const StateVec& a, const StateVec& b) {
    return std::make_pair(std::vector<int>(a.data(), a.data() + a.size()),
                          std::vector<int>(b.data(), b.data() + b.size()));
  };
  for (int i = 0; i < static_cast<int>(rxns.size()); ++i) {
    byKey[keyOf(rxns[i].reactant, rxns[i].product)] = i;
  }
  std::vector<bool> used(rxns.size(), false);
  for (const auto& [sReact, sProd] : steps) {
    for (int i = 0; i < static_cast<int>(rxns.size()); ++i) {
      if (used[i]) continue;
      // Only chain heads: the predecessor must not exist.
      StateVec prevR = rxns[i].reactant - sReact;
      StateVec prevP = rxns[i].product - sProd;
      if (prevR.minCoeff() >= 0 && prevP.minCoeff() >= 0 &&
          byKey.count(keyOf(prevR, prevP))) {
        continue;
      }
      std::vector<int> chain{i};
      StateVec cr = rxns[i].reactant, cp = rxns[i].product;
      while (true) {
        cr += sReact;
        cp += sProd;
        auto it = byKey.find(keyOf(cr, cp));
        if (it == byKey.end() || used[it->second]) break;
        chain.push_back(it->second);
      }
      if (chain.size() >= 2) {
        for (int m : chain) used[m] = true;
        families.push_back({rxns[chain[0]].reactant, rxns[chain[0]].product, sReact, sProd,
                            chain});
      }
    }
  }
  return families;
}

json reducedToJson(const ReducedSRN& red) {
  const ReactionNetwork& net = red.base();
  const auto& part = red.partition();
  json j;
  j["schema"] = kSchemaTag;
  std::vector<std::string> coreNames, uNames;
  for (int ci : part.core) coreNames.push_back(net.species.name(ci));
  for (int ui : part.u) uNames.push_back(net.species.name(ui));
  j["species"] = coreNames;
  j["eliminated"] = uNames;
  j["fast"] = red.fast();
  json rs = json::array();
  for (const auto& r : red.reactions()) {
    json jr;
    jr["reactant"] = coreStateToJson(net, part, r.reactant);
    jr["product"] = coreStateToJson(net, part, r.product);
    jr["trivial"] = r.trivial;
    json origins = json::array();
    for (const auto& o : r.origins) {
      if (o.slowCopy) {
        origins.push_back({{"type", "slow-copy"}, {"reaction", o.reactionId}});
      } else {
        origins.push_back(
            {{"type", "walk-family"}, {"entry", o.entryReaction}, {"exit", o.exitReaction}});
      }
    }
    jr["origin"] = origins;
    rs.push_back(jr);
  }
  j["reactions"] = rs;
  json fams = json::array();
  for (const auto& f : detectFamilies(red)) {
    json jf;
    jf["base_reactant"] = coreStateToJson(net, part, f.baseReactant);
    jf["base_product"] = coreStateToJson(net, part, f.baseProduct);
    jf["step_reactant"] = coreStateToJson(net, part, f.stepReactant);
    jf["step_product"] = coreStateToJson(net, part, f.stepProduct);
    jf["members"] = f.members;
    jf["activity_bound"] =
        "member n active at z iff z >= base_reactant + n*step_reactant componentwise";
    fams.push_back(jf);
  }
  j["families"] = fams;
  return j;
}

json assumption2ToJson(const ReactionNetwork& net, const Assumption2Report& rep) {
  json j;
  switch (rep.status) {
    case ExcursionStatus::Ok:
      j["status"] = "ok";
      break;
    case ExcursionStatus::Blocked:
      j["status"] = "blocked";
      break;
    case ExcursionStatus::Trapped:
      j["status"] = "trapped";
      break;
  }
  j["states_checked"] = rep.statesChecked;
  j["max_identity_gap"] = rep.maxIdentityGap;
  j["domain_truncated"] = rep.domainTruncated;
  if (rep.status != ExcursionStatus::Ok) {
    j["entry_state"] = stateToJson(net.species, rep.entryState);
    j["stuck_state"] = stateToJson(net.species, rep.stuckState);
    if (!rep.trappedClass.empty()) {
      json cls = json::array();
      for (const auto& x : rep.trappedClass) cls.push_back(stateToJson(net.species, x));
      j["trapped_class"] = cls;
    }
  }
  return j;
}

json sweepToJson(const SweepReport& rep, const Assumption2Report& a2,
                 const ReactionNetwork& net) {
  json j;
  j["schema"] = kSchemaTag;
  j["epsilons"] = rep.epsilons;
  j["errors"] = rep.errors;
  if (rep.slopeDefined) {
    j["slope"] = rep.slope;
    j["intercept"] = rep.intercept;
    j["points_used_in_fit"] = rep.pointsUsedInFit;
  } else {
    j["slope"] = nullptr;
  }
  j["time_grid"] = {{"points", rep.gridPoints}, {"horizon", rep.horizon}};
  j["solver_floors"] = {{"poisson_tail", rep.solverFloor}};
  if (!rep.warning.empty()) j["warning"] = rep.warning;
  j["assumption2"] = assumption2ToJson(net, a2);
  return j;
}

std::string timelineToCsv(const DistributionTimeline& tl,
                          const std::vector<std::string>& labels) {
  std::ostringstream os;
  os.precision(17);
  os << "time";
  for (const auto& l : labels) os << "," << l;
  os << "\n";
  for (size_t k = 0; k < tl.times.size(); ++k) {
    os << tl.times[k];
    for (Eigen::Index i = 0; i < tl.dists[k].size(); ++i) os << "," << tl.dists[k][i];
    os << "\n";
  }
  return os.str();
}

json timelineToJson(const DistributionTimeline& tl, const std::vector<std::string>& labels) {
  json j;
  j["schema"] = kSchemaTag;
  j["states"] = labels;
  j["times"] = tl.times;
  json rows = json::array();
  for (const auto& d : tl.dists) {
    rows.push_back(std::vector<double>(d.data(), d.data() + d.size()));
  }
  j["distributions"] = rows;
  j["truncation_error"] = tl.truncationError;
  return j;
}

std::string trajectoryToCsv(const Trajectory& tr, const SpeciesSet& sp) {
  std::ostringstream os;
  os.precision(17);
  os << "t";
  for (const auto& n : sp.names()) os << "," << n;
  os << "\n";
  for (size_t k = 0; k < tr.times.size(); ++k) {
    os << tr.times[k];
    for (Eigen::Index i = 0; i < tr.states[k].size(); ++i) os << "," << tr.states[k][i];
    os << "\n";
  }
  return os.str();
}

}  // namespace srn
