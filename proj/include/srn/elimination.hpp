#pragma once

#include "srn/network.hpp"

#include <map>
#include <mutex>
#include <vector>

namespace srn {

/// Labeled multi-digraph over {*in, *out} and the non-interacting species.
/// Edges from *in carry reactions creating a non-interacting species from a
/// U-free reactant; edges between U-vertices and into *out carry fast
/// reactions, labeled by reaction id.
struct EliminationGraph {
  static constexpr int kIn = 0;
  static constexpr int kOut = 1;

  struct Edge {
    int source = 0, target = 0;
    int reactionId = 0;
  };

  const ReactionNetwork* net = nullptr;
  SpeciesPartition part;
  std::vector<int> fast;
  std::vector<Edge> edges;
  std::vector<std::vector<int>> outEdges;  // vertex -> edge indices

  int vertexCount() const { return 2 + part.uDim(); }
  int vertexOfU(int uPos) const { return 2 + uPos; }
  std::string vertexName(int v) const;
};

/// Builds the elimination graph; throws StructuralError unless U is
/// non-interacting and F is a subset of the U-consuming reactions.
EliminationGraph buildEliminationGraph(const ReactionNetwork& net,
                                       const SpeciesPartition& part,
                                       const std::vector<int>& fast);

struct PropernessReport {
  bool proper = true;
  std::vector<int> unreachableFromIn;  // u positions not reachable from *in
  std::vector<int> cannotReachOut;     // u positions with no path to *out
  std::string describe(const ReactionNetwork& net, const SpeciesPartition& part) const;
};

/// Every U-vertex lies on a walk from *in to *out.
PropernessReport checkProper(const EliminationGraph& g);
PropernessReport checkProper(const ReactionNetwork& net, const SpeciesPartition& part,
                             const std::vector<int>& fast);

/// A walk *in -> ... -> *out given by consecutive edge indices.
struct Walk {
  std::vector<int> edgeIndices;
};

void validateWalk(const EliminationGraph& g, const Walk& w);

/// Contraction of a walk into a reduced reaction on core coordinates:
/// reactant = componentwise max of the running demands, product = reactant
/// plus the net gain of the walk. Both are nonnegative and U-free.
std::pair<StateVec, StateVec> contractWalk(const EliminationGraph& g, const Walk& w);

/// Intensity of one walk at core state z: the intensity of the first reaction
/// at (z,0) times, per subsequent edge, the probability that this edge's
/// reaction is chosen among all out-edges of its source vertex. 0/0 = 0.
double walkIntensity(const EliminationGraph& g, const Walk& w, const StateVec& z,
                     double t = 0.0);

/// Walks sharing (entry reaction, exit reaction, contraction) form a family;
/// their intensities are summed exactly by an absorption solve.
struct WalkFamily {
  int entryReaction = 0;
  int exitReaction = 0;
  StateVec reactant, product;  // core coordinates

  bool trivial() const { return reactant == product; }
};

struct FamilyIntensity {
  WalkFamily family;
  double tau = 0.0;
};

enum class ExcursionStatus { Ok, Blocked, Trapped };

/// Exact per-state walk intensities at core state z, via absorption
/// probabilities of the fast jump chain entered from each creating reaction.
/// The running componentwise demand is tracked alongside the state, so each
/// absorption resolves to a unique contraction.
struct StateIntensities {
  std::vector<FamilyIntensity> families;  // tau > 0, deterministic order
  double creatingTotal = 0.0;             // sum of creating intensities at (z,0)
  double walkTotal = 0.0;                 // sum over families
  ExcursionStatus status = ExcursionStatus::Ok;
  StateVec entryWitness, stuckWitness;    // full states, Blocked/Trapped only
  std::vector<StateVec> trappedClass;
};

StateIntensities solveStateIntensities(const ReactionNetwork& net,
                                       const SpeciesPartition& part,
                                       const std::vector<int>& fast, const StateVec& z,
                                       double t = 0.0);

/// Truncated walk-sum evaluator for the same quantities: depth-expanded sums
/// over walks with a rigorous tail bound (unabsorbed probability mass) and a
/// geometric decay estimate. Verification oracle for solveStateIntensities.
struct WalkSumCertificate {
  int depth = 0;
  double tailBound = 0.0;
  double decayEstimate = 0.0;
  bool converged = false;
};

StateIntensities walkSumIntensities(const ReactionNetwork& net, const SpeciesPartition& part,
                                    const std::vector<int>& fast, const StateVec& z,
                                    double t = 0.0, int maxDepth = 100000,
                                    double tol = 1e-12,
                                    WalkSumCertificate* cert = nullptr);

/// True when every U-vertex reaches *out through fast reactions whose
/// reactants contain no core species. Such chains are active in every state,
/// so no state can block or trap an excursion, for any closed set.
bool coreFreeExitCertificate(const EliminationGraph& g);

/// Nonzero net core effects of simple cycles among U-vertices that lie on
/// walks. Empty iff the reduced network has finitely many distinct reactions
/// (cycles with zero net effect only repeat existing contractions).
std::vector<StateVec> walkCycleEffects(const EliminationGraph& g);

struct ReducedOrigin {
  bool slowCopy = false;
  int reactionId = 0;     // slow copy
  int entryReaction = 0;  // walk family
  int exitReaction = 0;
};

struct ReducedReaction {
  StateVec reactant, product;  // core coordinates
  bool trivial = false;
  std::vector<ReducedOrigin> origins;
};

struct ActivePart {
  ReducedOrigin origin;
  double tau = 0.0;
};

struct ActiveReducedEntry {
  StateVec reactant, product;
  bool trivial = false;
  double tau = 0.0;               // merged intensity
  std::vector<ActivePart> parts;  // family / slow-copy decomposition
};

/// Reduced stochastic reaction network on the core species. Holds the finite
/// list of reactions seen on the construction domain plus an exact per-state
/// enumerator; states bound walk demands, so the enumerator is complete.
class ReducedSRN {
 public:
  ReducedSRN() = default;
  ReducedSRN(const ReactionNetwork& net, SpeciesPartition part, std::vector<int> fast);

  const ReactionNetwork& base() const { return *net_; }
  const SpeciesPartition& partition() const { return part_; }
  const std::vector<int>& fast() const { return fast_; }
  SpeciesSet coreSpecies() const;

  /// Materialized reactions (union over the construction domain), ordered
  /// lexicographically by (reactant, product).
  const std::vector<ReducedReaction>& reactions() const { return reactions_; }

  /// Exactly the reduced reactions with positive intensity at z, merged per
  /// (reactant, product) with slow copies, with family decomposition retained.
  std::vector<ActiveReducedEntry> active(const StateVec& z, double t = 0.0) const;

  /// Walk-excursion diagnosis at z (Ok / Blocked / Trapped with witnesses).
  StateIntensities stateIntensities(const StateVec& z, double t = 0.0) const;

  void materialize(const std::vector<StateVec>& domain);

 private:
  const ReactionNetwork* net_ = nullptr;
  SpeciesPartition part_;
  std::vector<int> fast_;
  std::vector<int> slowCopies_;  // reactions not touching U at all
  std::vector<ReducedReaction> reactions_;

  struct Cache {
    std::mutex mutex;
    std::unordered_map<StateVec, StateIntensities, StateHash, StateEq> map;
  };
  std::shared_ptr<Cache> cache_ = std::make_shared<Cache>();

  friend ReducedSRN reduce(const ReactionNetwork&, const SpeciesPartition&,
                           const std::vector<int>&, const std::vector<StateVec>&);
};

/// Synthesizes the reduced SRN; requires U non-interacting and F proper
/// (StructuralError otherwise). With U empty, F must be empty and the result
/// is the original network evaluated on core states.
ReducedSRN reduce(const ReactionNetwork& net, const SpeciesPartition& part,
                  const std::vector<int>& fast, const std::vector<StateVec>& domain);

/// Enumerates explicit walks of the elimination graph up to a step cap;
/// test oracle for small fixtures.
std::vector<Walk> enumerateWalks(const EliminationGraph& g, int maxSteps);

}  // namespace srn
