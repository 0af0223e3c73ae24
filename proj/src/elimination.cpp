#include "srn/elimination.hpp"

#include "srn/graph.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <deque>
#include <functional>
#include <sstream>

namespace srn {

std::string EliminationGraph::vertexName(int v) const {
  if (v == kIn) return "*in";
  if (v == kOut) return "*out";
  return net->species.name(part.u[v - 2]);
}

EliminationGraph buildEliminationGraph(const ReactionNetwork& net,
                                       const SpeciesPartition& part,
                                       const std::vector<int>& fast) {
  InteractionWitness w;
  if (!isNonInteracting(net, part.u, &w)) {
    throw StructuralError("species set is not non-interacting (" + w.reason +
                          " in complex " + formatComplex(net.species, w.complex) + " of r" +
                          std::to_string(w.reactionId) + ")");
  }
  EliminationGraph g;
  g.net = &net;
  g.part = part;
  g.fast = fast;
  g.outEdges.assign(g.vertexCount(), {});

  auto uVertex = [&](const StateVec& c) -> int {
    for (int j = 0; j < part.uDim(); ++j) {
      if (c[part.u[j]] > 0) return g.vertexOfU(j);
    }
    return -1;
  };

  for (int id : fast) {
    const Reaction& r = net.reaction(id);
    if (uVertex(r.reactant) < 0) {
      throw StructuralError("fast reaction r" + std::to_string(id) +
                            " does not consume a non-interacting species");
    }
  }
  std::vector<bool> inFast(net.reactions.size() + 1, false);
  for (int id : fast) inFast[id] = true;
  for (const auto& r : net.reactions) {
    int src = uVertex(r.reactant);
    int dst = uVertex(r.product);
    if (src < 0 && dst >= 0) {
      g.edges.push_back({EliminationGraph::kIn, dst, r.id});
    } else if (src >= 0 && inFast[r.id]) {
      g.edges.push_back({src, dst >= 0 ? dst : EliminationGraph::kOut, r.id});
    }
  }
  for (int e = 0; e < static_cast<int>(g.edges.size()); ++e) {
    g.outEdges[g.edges[e].source].push_back(e);
  }
  return g;
}

PropernessReport checkProper(const EliminationGraph& g) {
  int nv = g.vertexCount();
  std::vector<bool> fromIn(nv, false), toOut(nv, false);
  std::deque<int> q;
  fromIn[EliminationGraph::kIn] = true;
  q.push_back(EliminationGraph::kIn);
  while (!q.empty()) {
    int v = q.front();
    q.pop_front();
    for (int e : g.outEdges[v]) {
      int t = g.edges[e].target;
      if (!fromIn[t]) {
        fromIn[t] = true;
        q.push_back(t);
      }
    }
  }
  std::vector<std::vector<int>> rev(nv);
  for (const auto& e : g.edges) rev[e.target].push_back(e.source);
  toOut[EliminationGraph::kOut] = true;
  q.push_back(EliminationGraph::kOut);
  while (!q.empty()) {
    int v = q.front();
    q.pop_front();
    for (int s : rev[v]) {
      if (!toOut[s]) {
        toOut[s] = true;
        q.push_back(s);
      }
    }
  }
  PropernessReport rep;
  for (int j = 0; j < g.part.uDim(); ++j) {
    int v = g.vertexOfU(j);
    if (!fromIn[v]) rep.unreachableFromIn.push_back(j);
    if (!toOut[v]) rep.cannotReachOut.push_back(j);
  }
  rep.proper = rep.unreachableFromIn.empty() && rep.cannotReachOut.empty();
  return rep;
}

PropernessReport checkProper(const ReactionNetwork& net, const SpeciesPartition& part,
                             const std::vector<int>& fast) {
  return checkProper(buildEliminationGraph(net, part, fast));
}

std::string PropernessReport::describe(const ReactionNetwork& net,
                                       const SpeciesPartition& part) const {
  if (proper) return "proper";
  std::ostringstream os;
  os << "fast set is not proper:";
  for (int j : unreachableFromIn) {
    os << " " << net.species.name(part.u[j]) << " is never created from a U-free reactant;";
  }
  for (int j : cannotReachOut) {
    os << " " << net.species.name(part.u[j]) << " has no fast chain to a U-free product;";
  }
  return os.str();
}

void validateWalk(const EliminationGraph& g, const Walk& w) {
  if (w.edgeIndices.size() < 2) throw StructuralError("walk needs at least two edges");
  if (g.edges[w.edgeIndices.front()].source != EliminationGraph::kIn) {
    throw StructuralError("walk must start at *in");
  }
  if (g.edges[w.edgeIndices.back()].target != EliminationGraph::kOut) {
    throw StructuralError("walk must end at *out");
  }
  for (size_t i = 0; i + 1 < w.edgeIndices.size(); ++i) {
    if (g.edges[w.edgeIndices[i]].target != g.edges[w.edgeIndices[i + 1]].source) {
      throw StructuralError("walk edges are not consecutive");
    }
  }
}

std::pair<StateVec, StateVec> contractWalk(const EliminationGraph& g, const Walk& w) {
  validateWalk(g, w);
  const ReactionNetwork& net = *g.net;
  int n = net.dim();
  StateVec consumedMinusProduced = StateVec::Zero(n);  // sum of y - y' over past edges
  StateVec demand = StateVec::Zero(n);
  bool first = true;
  for (int e : w.edgeIndices) {
    const Reaction& r = net.reaction(g.edges[e].reactionId);
    StateVec wi = r.reactant + consumedMinusProduced;
    demand = first ? wi : demand.cwiseMax(wi);
    first = false;
    consumedMinusProduced += r.reactant - r.product;
  }
  StateVec product = demand - consumedMinusProduced;
  for (int ui : g.part.u) {
    if (demand[ui] != 0 || product[ui] != 0) {
      throw StructuralError("walk contraction touches a non-interacting coordinate");
    }
  }
  return {g.part.projectCore(demand), g.part.projectCore(product)};
}

double walkIntensity(const EliminationGraph& g, const Walk& w, const StateVec& z, double t) {
  validateWalk(g, w);
  const ReactionNetwork& net = *g.net;
  StateVec x = g.part.embedCore(z, net.dim());
  double value = 0.0;
  bool first = true;
  for (int e : w.edgeIndices) {
    const Reaction& r = net.reaction(g.edges[e].reactionId);
    double num = net.intensity(r.id, x, t);
    if (num <= 0.0) return 0.0;
    if (first) {
      value = num;
      first = false;
    } else {
      double den = 0.0;
      for (int oe : g.outEdges[g.edges[e].source]) {
        den += net.intensity(g.edges[oe].reactionId, x, t);
      }
      value *= num / den;
    }
    x += r.jump();
  }
  return value;
}

bool coreFreeExitCertificate(const EliminationGraph& g) {
  // Reverse BFS from *out over edges whose reactions consume no core species.
  const ReactionNetwork& net = *g.net;
  auto coreFree = [&](int rid) {
    const Reaction& r = net.reaction(rid);
    for (int ci : g.part.core) {
      if (r.reactant[ci] != 0) return false;
    }
    return true;
  };
  int nv = g.vertexCount();
  std::vector<std::vector<int>> rev(nv);
  for (const auto& e : g.edges) {
    if (e.source != EliminationGraph::kIn && coreFree(e.reactionId)) {
      rev[e.target].push_back(e.source);
    }
  }
  std::vector<bool> ok(nv, false);
  std::deque<int> q{EliminationGraph::kOut};
  ok[EliminationGraph::kOut] = true;
  while (!q.empty()) {
    int v = q.front();
    q.pop_front();
    for (int s : rev[v]) {
      if (!ok[s]) {
        ok[s] = true;
        q.push_back(s);
      }
    }
  }
  for (int j = 0; j < g.part.uDim(); ++j) {
    if (!ok[g.vertexOfU(j)]) return false;
  }
  return true;
}

namespace {

// Fast-excursion jump chain entered from creating reactions at (z, 0),
// augmented with the running componentwise demand so that each absorption
// resolves to a unique contraction.
struct ExcursionChain {
  struct Node {
    StateVec x, dmin;        // state and running min of (state - reactant)
    double totalFast = 0.0;  // total fast intensity at x
    std::vector<std::pair<int, double>> moves;   // (node, prob)
    std::vector<std::pair<int, double>> absorbs; // (outcome, prob)
    bool stuck = false;  // no active fast reaction
    bool sunk = false;   // member of a closed excursion class
    int firstEntry = -1; // entry index that first reached this node
  };
  struct Outcome {
    int exitReaction = 0;
    StateVec reactant, product;  // core
  };
  struct Entry {
    int reactionId = 0;
    int node = -1;
    double rate = 0.0;  // creating intensity at (z,0)
    StateVec state;     // full entry state
  };

  std::vector<Node> nodes;
  std::vector<Outcome> outcomes;
  std::vector<Entry> entries;
  double creatingTotal = 0.0;
  bool anyStuck = false, anyTrapped = false;
  int stuckNode = -1;
  std::vector<int> trappedNodes;
};

ExcursionChain buildExcursionChain(const ReactionNetwork& net, const SpeciesPartition& part,
                                   const std::vector<int>& fast, const StateVec& z,
                                   double t) {
  ExcursionChain ch;
  int n = net.dim();
  StateVec x0 = part.embedCore(z, n);
  std::unordered_map<StateVec, int, StateHash, StateEq> nodeIndex;
  std::unordered_map<StateVec, int, StateHash, StateEq> outcomeIndex;

  auto nodeKey = [n](const StateVec& x, const StateVec& m) {
    StateVec k(2 * n);
    k.head(n) = x;
    k.tail(n) = m;
    return k;
  };
  auto getNode = [&](const StateVec& x, const StateVec& m, int entry) {
    StateVec k = nodeKey(x, m);
    auto it = nodeIndex.find(k);
    if (it != nodeIndex.end()) return it->second;
    int idx = static_cast<int>(ch.nodes.size());
    nodeIndex.emplace(std::move(k), idx);
    ExcursionChain::Node node;
    node.x = x;
    node.dmin = m;
    node.firstEntry = entry;
    ch.nodes.push_back(std::move(node));
    return idx;
  };
  auto getOutcome = [&](int exitRid, const StateVec& reactant, const StateVec& product) {
    StateVec k(2 * part.coreDim() + 1);
    k[0] = exitRid;
    k.segment(1, part.coreDim()) = reactant;
    k.tail(part.coreDim()) = product;
    auto it = outcomeIndex.find(k);
    if (it != outcomeIndex.end()) return it->second;
    int idx = static_cast<int>(ch.outcomes.size());
    outcomeIndex.emplace(std::move(k), idx);
    ch.outcomes.push_back({exitRid, reactant, product});
    return idx;
  };

  std::deque<int> queue;
  for (int rid : net.reactionsCreatingU(part)) {
    const Reaction& r = net.reaction(rid);
    double rate = net.intensity(rid, x0, t);
    if (rate <= 0.0) continue;
    ch.creatingTotal += rate;
    StateVec e = x0 + r.jump();
    StateVec m0 = x0 - r.reactant;
    int entryIdx = static_cast<int>(ch.entries.size());
    size_t before = ch.nodes.size();
    int node = getNode(e, m0, entryIdx);
    if (ch.nodes.size() > before) queue.push_back(node);
    ch.entries.push_back({rid, node, rate, e});
  }

  while (!queue.empty()) {
    int vi = queue.front();
    queue.pop_front();
    StateVec x = ch.nodes[vi].x;
    StateVec m = ch.nodes[vi].dmin;
    double total = 0.0;
    struct Step {
      int rid;
      double rate;
    };
    std::vector<Step> steps;
    for (int rid : fast) {
      double lam = net.intensity(rid, x, t);
      if (lam > 0.0) {
        steps.push_back({rid, lam});
        total += lam;
      }
    }
    ch.nodes[vi].totalFast = total;
    if (steps.empty()) {
      ch.nodes[vi].stuck = true;
      if (!ch.anyStuck) {
        ch.anyStuck = true;
        ch.stuckNode = vi;
      }
      continue;
    }
    for (const auto& s : steps) {
      const Reaction& r = net.reaction(s.rid);
      StateVec x2 = x + r.jump();
      StateVec m2 = m.cwiseMin(x - r.reactant);
      double prob = s.rate / total;
      if (part.inN0(x2)) {
        StateVec reactant = part.projectCore(x0 - m2);
        StateVec product = part.projectCore(x2 - m2);
        ch.nodes[vi].absorbs.emplace_back(getOutcome(s.rid, reactant, product), prob);
      } else {
        size_t before = ch.nodes.size();
        int ti = getNode(x2, m2, ch.nodes[vi].firstEntry);
        if (ch.nodes.size() > before) queue.push_back(ti);
        ch.nodes[vi].moves.emplace_back(ti, prob);
      }
    }
  }

  // Closed classes of the excursion digraph never absorb; mark them sunk.
  int nn = static_cast<int>(ch.nodes.size());
  std::vector<std::vector<int>> adj(nn);
  for (int i = 0; i < nn; ++i) {
    for (const auto& [j, p] : ch.nodes[i].moves) adj[i].push_back(j);
  }
  int ncomp = 0;
  std::vector<int> comp = stronglyConnectedComponents(adj, &ncomp);
  std::vector<bool> compLeaks(ncomp, false);
  for (int i = 0; i < nn; ++i) {
    if (!ch.nodes[i].absorbs.empty()) compLeaks[comp[i]] = true;
    for (const auto& [j, p] : ch.nodes[i].moves) {
      if (comp[j] != comp[i]) compLeaks[comp[i]] = true;
    }
  }
  for (int i = 0; i < nn; ++i) {
    if (!compLeaks[comp[i]]) {
      ch.nodes[i].sunk = true;
      if (!ch.nodes[i].stuck) {
        ch.anyTrapped = true;
        ch.trappedNodes.push_back(i);
      }
    }
  }
  return ch;
}

void fillStatus(const ExcursionChain& ch, StateIntensities& out) {
  if (ch.anyStuck) {
    out.status = ExcursionStatus::Blocked;
    const auto& node = ch.nodes[ch.stuckNode];
    out.stuckWitness = node.x;
    out.entryWitness = ch.entries[node.firstEntry >= 0 ? node.firstEntry : 0].state;
  } else if (ch.anyTrapped) {
    out.status = ExcursionStatus::Trapped;
    const auto& node = ch.nodes[ch.trappedNodes.front()];
    out.stuckWitness = node.x;
    out.entryWitness = ch.entries[node.firstEntry >= 0 ? node.firstEntry : 0].state;
    for (int i : ch.trappedNodes) out.trappedClass.push_back(ch.nodes[i].x);
  } else {
    out.status = ExcursionStatus::Ok;
  }
}

struct FamilyKeyLess {
  bool operator()(const WalkFamily& a, const WalkFamily& b) const {
    if (a.entryReaction != b.entryReaction) return a.entryReaction < b.entryReaction;
    if (a.exitReaction != b.exitReaction) return a.exitReaction < b.exitReaction;
    if (a.reactant != b.reactant) return lexLess(a.reactant, b.reactant);
    return lexLess(a.product, b.product);
  }
};

StateIntensities collectFamilies(
    const ExcursionChain& ch,
    const std::vector<std::vector<double>>& outcomeProbPerEntry) {
  StateIntensities out;
  out.creatingTotal = ch.creatingTotal;
  std::map<WalkFamily, double, FamilyKeyLess> acc;
  for (size_t e = 0; e < ch.entries.size(); ++e) {
    const auto& entry = ch.entries[e];
    for (size_t o = 0; o < ch.outcomes.size(); ++o) {
      double p = outcomeProbPerEntry[e][o];
      if (p <= 0.0) continue;
      const auto& oc = ch.outcomes[o];
      WalkFamily fam{entry.reactionId, oc.exitReaction, oc.reactant, oc.product};
      acc[fam] += entry.rate * p;
    }
  }
  for (auto& [fam, tau] : acc) {
    if (tau > 0.0) {
      out.families.push_back({fam, tau});
      out.walkTotal += tau;
    }
  }
  fillStatus(ch, out);
  return out;
}

}  // namespace

StateIntensities solveStateIntensities(const ReactionNetwork& net,
                                       const SpeciesPartition& part,
                                       const std::vector<int>& fast, const StateVec& z,
                                       double t) {
  ExcursionChain ch = buildExcursionChain(net, part, fast, z, t);
  int nn = static_cast<int>(ch.nodes.size());
  std::vector<int> keep;  // nodes entering the linear system
  std::vector<int> pos(nn, -1);
  for (int i = 0; i < nn; ++i) {
    if (!ch.nodes[i].sunk) {
      pos[i] = static_cast<int>(keep.size());
      keep.push_back(i);
    }
  }
  int k = static_cast<int>(keep.size());
  // Occupation measures per entry: solve (I - P)^T mu = delta_entry, then the
  // probability of each absorption outcome is sum_v mu_v P(v -> outcome).
  Eigen::MatrixXd M = Eigen::MatrixXd::Identity(k, k);
  for (int a = 0; a < k; ++a) {
    for (const auto& [j, p] : ch.nodes[keep[a]].moves) {
      if (pos[j] >= 0) M(pos[j], a) -= p;  // transposed
    }
  }
  Eigen::PartialPivLU<Eigen::MatrixXd> lu;
  if (k > 0) lu.compute(M);
  std::vector<std::vector<double>> probs(ch.entries.size(),
                                         std::vector<double>(ch.outcomes.size(), 0.0));
  for (size_t e = 0; e < ch.entries.size(); ++e) {
    int enode = ch.entries[e].node;
    if (pos[enode] < 0) continue;  // entry directly in a closed class
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(k);
    rhs[pos[enode]] = 1.0;
    Eigen::VectorXd mu = lu.solve(rhs);
    for (int a = 0; a < k; ++a) {
      double m = mu[a];
      if (m == 0.0) continue;
      for (const auto& [o, p] : ch.nodes[keep[a]].absorbs) probs[e][o] += m * p;
    }
  }
  return collectFamilies(ch, probs);
}

StateIntensities walkSumIntensities(const ReactionNetwork& net, const SpeciesPartition& part,
                                    const std::vector<int>& fast, const StateVec& z, double t,
                                    int maxDepth, double tol, WalkSumCertificate* cert) {
  ExcursionChain ch = buildExcursionChain(net, part, fast, z, t);
  int nn = static_cast<int>(ch.nodes.size());
  std::vector<std::vector<double>> probs(ch.entries.size(),
                                         std::vector<double>(ch.outcomes.size(), 0.0));
  WalkSumCertificate summary{0, 0.0, 0.0, true};
  for (size_t e = 0; e < ch.entries.size(); ++e) {
    std::vector<double> v(nn, 0.0), w(nn, 0.0);
    if (ch.nodes[ch.entries[e].node].sunk) continue;
    v[ch.entries[e].node] = 1.0;
    double mass = 1.0, prevMass = 1.0;
    int depth = 0;
    while (mass > tol && depth < maxDepth) {
      std::fill(w.begin(), w.end(), 0.0);
      for (int i = 0; i < nn; ++i) {
        double vi = v[i];
        if (vi == 0.0) continue;
        for (const auto& [o, p] : ch.nodes[i].absorbs) probs[e][o] += vi * p;
        for (const auto& [j, p] : ch.nodes[i].moves) {
          if (!ch.nodes[j].sunk) w[j] += vi * p;
        }
      }
      v.swap(w);
      prevMass = mass;
      mass = 0.0;
      for (double x : v) mass += x;
      ++depth;
    }
    summary.depth = std::max(summary.depth, depth);
    summary.tailBound = std::max(summary.tailBound, mass);
    if (prevMass > 0.0) summary.decayEstimate = std::max(summary.decayEstimate, mass / prevMass);
    if (mass > tol) summary.converged = false;
  }
  if (cert) *cert = summary;
  return collectFamilies(ch, probs);
}

std::vector<Walk> enumerateWalks(const EliminationGraph& g, int maxSteps) {
  std::vector<Walk> walks;
  std::vector<int> current;
  std::function<void(int)> dfs = [&](int vertex) {
    if (static_cast<int>(current.size()) > maxSteps) return;
    if (vertex == EliminationGraph::kOut) {
      walks.push_back({current});
      return;
    }
    for (int e : g.outEdges[vertex]) {
      current.push_back(e);
      dfs(g.edges[e].target);
      current.pop_back();
    }
  };
  for (int e : g.outEdges[EliminationGraph::kIn]) {
    current.push_back(e);
    dfs(g.edges[e].target);
    current.pop_back();
  }
  return walks;
}

ReducedSRN::ReducedSRN(const ReactionNetwork& net, SpeciesPartition part,
                       std::vector<int> fast)
    : net_(&net), part_(std::move(part)), fast_(std::move(fast)) {
  for (const auto& r : net.reactions) {
    bool touchesU = false;
    for (int ui : part_.u) {
      if (r.reactant[ui] != 0 || r.product[ui] != 0) {
        touchesU = true;
        break;
      }
    }
    if (!touchesU) slowCopies_.push_back(r.id);
  }
}

SpeciesSet ReducedSRN::coreSpecies() const {
  std::vector<std::string> names;
  for (int ci : part_.core) names.push_back(net_->species.name(ci));
  return SpeciesSet(names);
}

StateIntensities ReducedSRN::stateIntensities(const StateVec& z, double t) const {
  if (net_->timeDependent()) {
    return solveStateIntensities(*net_, part_, fast_, z, t);
  }
  {
    std::lock_guard<std::mutex> lock(cache_->mutex);
    auto it = cache_->map.find(z);
    if (it != cache_->map.end()) return it->second;
  }
  StateIntensities si = solveStateIntensities(*net_, part_, fast_, z, 0.0);
  std::lock_guard<std::mutex> lock(cache_->mutex);
  return cache_->map.emplace(z, std::move(si)).first->second;
}

std::vector<ActiveReducedEntry> ReducedSRN::active(const StateVec& z, double t) const {
  StateIntensities si = stateIntensities(z, t);
  struct PairLess {
    bool operator()(const std::pair<StateVec, StateVec>& a,
                    const std::pair<StateVec, StateVec>& b) const {
      if (a.first != b.first) return lexLess(a.first, b.first);
      return lexLess(a.second, b.second);
    }
  };
  std::map<std::pair<StateVec, StateVec>, ActiveReducedEntry, PairLess> acc;
  auto slot = [&](const StateVec& rc, const StateVec& pd) -> ActiveReducedEntry& {
    auto key = std::make_pair(rc, pd);
    auto it = acc.find(key);
    if (it == acc.end()) {
      ActiveReducedEntry e;
      e.reactant = rc;
      e.product = pd;
      e.trivial = (rc == pd);
      it = acc.emplace(key, std::move(e)).first;
    }
    return it->second;
  };
  for (const auto& fi : si.families) {
    auto& e = slot(fi.family.reactant, fi.family.product);
    e.tau += fi.tau;
    ReducedOrigin origin;
    origin.slowCopy = false;
    origin.entryReaction = fi.family.entryReaction;
    origin.exitReaction = fi.family.exitReaction;
    e.parts.push_back({origin, fi.tau});
  }
  StateVec x0 = part_.embedCore(z, net_->dim());
  for (int rid : slowCopies_) {
    double lam = net_->intensity(rid, x0, t);
    if (lam <= 0.0) continue;
    const Reaction& r = net_->reaction(rid);
    auto& e = slot(part_.projectCore(r.reactant), part_.projectCore(r.product));
    e.tau += lam;
    ReducedOrigin origin;
    origin.slowCopy = true;
    origin.reactionId = rid;
    e.parts.push_back({origin, lam});
  }
  std::vector<ActiveReducedEntry> out;
  for (auto& [key, e] : acc) out.push_back(std::move(e));
  return out;
}

void ReducedSRN::materialize(const std::vector<StateVec>& domain) {
  struct PairLess {
    bool operator()(const std::pair<StateVec, StateVec>& a,
                    const std::pair<StateVec, StateVec>& b) const {
      if (a.first != b.first) return lexLess(a.first, b.first);
      return lexLess(a.second, b.second);
    }
  };
  std::map<std::pair<StateVec, StateVec>, ReducedReaction, PairLess> acc;
  auto originLess = [](const ReducedOrigin& a, const ReducedOrigin& b) {
    return std::tie(a.slowCopy, a.reactionId, a.entryReaction, a.exitReaction) <
           std::tie(b.slowCopy, b.reactionId, b.entryReaction, b.exitReaction);
  };
  auto addOrigin = [&](ReducedReaction& r, const ReducedOrigin& o) {
    for (const auto& q : r.origins) {
      if (!originLess(q, o) && !originLess(o, q)) return;
    }
    r.origins.push_back(o);
  };
  auto slot = [&](const StateVec& rc, const StateVec& pd) -> ReducedReaction& {
    auto key = std::make_pair(rc, pd);
    auto it = acc.find(key);
    if (it == acc.end()) {
      ReducedReaction r;
      r.reactant = rc;
      r.product = pd;
      r.trivial = (rc == pd);
      it = acc.emplace(key, std::move(r)).first;
    }
    return it->second;
  };
  for (int rid : slowCopies_) {
    const Reaction& r = net_->reaction(rid);
    ReducedOrigin o;
    o.slowCopy = true;
    o.reactionId = rid;
    addOrigin(slot(part_.projectCore(r.reactant), part_.projectCore(r.product)), o);
  }
  for (const auto& z : domain) {
    StateIntensities si = stateIntensities(z);
    for (const auto& fi : si.families) {
      ReducedOrigin o;
      o.slowCopy = false;
      o.entryReaction = fi.family.entryReaction;
      o.exitReaction = fi.family.exitReaction;
      addOrigin(slot(fi.family.reactant, fi.family.product), o);
    }
  }
  reactions_.clear();
  for (auto& [key, r] : acc) {
    std::sort(r.origins.begin(), r.origins.end(), originLess);
    reactions_.push_back(std::move(r));
  }
}

ReducedSRN reduce(const ReactionNetwork& net, const SpeciesPartition& part,
                  const std::vector<int>& fast, const std::vector<StateVec>& domain) {
  EliminationGraph g = buildEliminationGraph(net, part, fast);
  PropernessReport prop = checkProper(g);
  if (!prop.proper) throw StructuralError(prop.describe(net, part));
  if (part.uDim() == 0 && !fast.empty()) {
    throw StructuralError("fast set must be empty when no species are eliminated");
  }
  ReducedSRN red(net, part, fast);
  red.materialize(domain);
  return red;
}

}  // namespace srn
