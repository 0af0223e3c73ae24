#pragma once

#include "srn/elimination.hpp"
#include "srn/network.hpp"

#include <Eigen/SparseCore>

#include <vector>

namespace srn {

using SpMat = Eigen::SparseMatrix<double>;

/// Anything that jumps on integer states: the original network, the reduced
/// network, or the surrogate with gated slow reactions.
class JumpProcess {
 public:
  struct Transition {
    StateVec target;
    double rate = 0.0;
    int label = 0;  // reaction id when applicable
  };

  virtual ~JumpProcess() = default;
  virtual int dim() const = 0;
  virtual void transitions(const StateVec& x, double t,
                           std::vector<Transition>& out) const = 0;
  virtual bool timeDependent() const { return false; }
};

/// The CTMC of a reaction network; a reaction-id subset may be selected and a
/// uniform scale applied (used for fast parts scaled by 1/epsilon).
class NetworkProcess : public JumpProcess {
 public:
  explicit NetworkProcess(const ReactionNetwork& net);
  NetworkProcess(const ReactionNetwork& net, std::vector<int> reactionIds, double scale = 1.0);

  int dim() const override { return net_->dim(); }
  void transitions(const StateVec& x, double t, std::vector<Transition>& out) const override;
  bool timeDependent() const override { return net_->timeDependent(); }

 private:
  const ReactionNetwork* net_;
  std::vector<int> ids_;
  double scale_ = 1.0;
};

/// Reduced-network CTMC on core states; trivial reactions are dynamically inert.
class ReducedProcess : public JumpProcess {
 public:
  explicit ReducedProcess(const ReducedSRN& red) : red_(&red) {}
  int dim() const override { return red_->partition().coreDim(); }
  void transitions(const StateVec& x, double t, std::vector<Transition>& out) const override;
  bool timeDependent() const override { return red_->base().timeDependent(); }

 private:
  const ReducedSRN* red_;
};

/// Surrogate dynamics: fast reactions always active, slow reactions only from
/// states with no molecules of non-interacting species.
class SurrogateProcess : public JumpProcess {
 public:
  SurrogateProcess(const ReactionNetwork& net, const SpeciesPartition& part,
                   std::vector<int> fast);
  int dim() const override { return net_->dim(); }
  void transitions(const StateVec& x, double t, std::vector<Transition>& out) const override;

 private:
  const ReactionNetwork* net_;
  SpeciesPartition part_;
  std::vector<bool> isFast_;
};

/// Indexed finite set of states, lexicographically ordered.
struct StateSpace {
  std::vector<StateVec> states;
  std::unordered_map<StateVec, int, StateHash, StateEq> index;
  bool closed = false;

  int size() const { return static_cast<int>(states.size()); }
  int indexOf(const StateVec& x) const;
  int requireIndex(const StateVec& x) const;

  static StateSpace fromStates(std::vector<StateVec> sts, bool closedFlag);
};

/// BFS closure under all positive-rate transitions; throws StructuralError
/// with a frontier witness when the cap is exceeded.
StateSpace reachableClosedSet(const JumpProcess& proc, const StateVec& x0,
                              int cap = 100000);

StateSpace surrogateReachable(const ReactionNetwork& net, const SpeciesPartition& part,
                              const std::vector<int>& fast, const StateVec& x0,
                              int cap = 100000);

/// Checks that no transition leaves the set (exhaustive).
bool verifyClosed(const JumpProcess& proc, const StateSpace& E, double t = 0.0);

/// Sparse generator on E: Q(x, x + xi) aggregates intensities per jump vector;
/// diagonal set to minus the off-diagonal row sum, so rows sum to zero exactly.
SpMat buildGenerator(const JumpProcess& proc, const StateSpace& E, double t = 0.0,
                     bool requireClosed = true);

struct DistributionTimeline {
  std::vector<double> times;
  std::vector<Eigen::VectorXd> dists;
  std::vector<double> truncationError;
};

/// Uniformization with rate Lambda = max |Q_ii|; Poisson tail truncated below
/// `tail` per time point, with the achieved bound recorded.
DistributionTimeline transientDistribution(const SpMat& Q, const Eigen::VectorXd& pi0,
                                           const std::vector<double>& times,
                                           double tail = 1e-12);

/// Probability of an event set over a time grid (scalar accumulation).
std::vector<double> transientEventProbability(const SpMat& Q, const Eigen::VectorXd& pi0,
                                              const std::vector<double>& times,
                                              const std::vector<char>& eventMask,
                                              double tail = 1e-12);

/// Forward-equation integration p' = p Q(t) with classic 4th-order steps and
/// step-halving error control; probability drift is recorded, never repaired.
struct TimedepOptions {
  double tol = 1e-10;
  double minStep = 1e-12;
};
DistributionTimeline transientDistributionTimedep(
    const std::function<SpMat(double)>& Qof, const Eigen::VectorXd& pi0,
    const std::vector<double>& times, const TimedepOptions& opts = {});

enum class StateClass { Absorbing, Transient, Recurrent };
struct Classification {
  std::vector<StateClass> label;
  std::vector<int> classOf;                      // recurrent class id or -1
  std::vector<std::vector<int>> recurrentClasses;  // state indices per class
};

/// Condensation-based classification: a state is recurrent iff its strongly
/// connected component has no outgoing edge; absorbing iff also a singleton
/// with zero rate row.
Classification classifyStates(const SpMat& Q);

/// Solves pi Q = 0, sum(pi) = 1 on an irreducible closed component
/// (StructuralError otherwise); residual checked against 1e-12.
Eigen::VectorXd stationaryDistribution(const SpMat& Q,
                                       const std::vector<int>& component = {});

/// Long-run distribution from an initial distribution: absorption
/// probabilities into each recurrent class times the class's stationary law.
Eigen::VectorXd limitingDistribution(const SpMat& Q, const Eigen::VectorXd& pi0);

struct Trajectory {
  std::vector<double> times;   // jump times, starting at 0
  std::vector<StateVec> states;
};

/// Exact-distribution next-reaction sampling, reproducible per (seed, replicate).
Trajectory ssaSimulate(const JumpProcess& proc, const StateVec& x0, double T,
                       std::uint64_t seed, std::uint64_t replicate = 0,
                       std::int64_t maxJumps = 1000000);

/// State at time t along a trajectory (right-continuous).
const StateVec& trajectoryStateAt(const Trajectory& tr, double t);

}  // namespace srn
