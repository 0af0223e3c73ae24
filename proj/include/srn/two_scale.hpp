#pragma once

#include "srn/ctmc.hpp"
#include "srn/elimination.hpp"
#include "srn/network.hpp"

#include <Eigen/Dense>

#include <functional>
#include <string>
#include <vector>

namespace srn {

/// Epsilon family Q = Qtilde/eps + Qhat on a finite closed set: Qtilde from
/// the fast reactions, Qhat from the rest.
struct TwoScaleSystem {
  const ReactionNetwork* net = nullptr;
  SpeciesPartition part;
  std::vector<int> fast;
  StateSpace E;
  SpMat Qtilde, Qhat;

  SpMat Qeps(double eps) const;
};

TwoScaleSystem assemble(const ReactionNetwork& net, const SpeciesPartition& part,
                        const std::vector<int>& fast, StateSpace E);

/// Block partition of E relative to the surrogate-reachable set M(x0):
/// s1 = M and no U molecules, f1 = M with exactly one U molecule,
/// s2 = remaining U-free states, f2 = the rest.
struct StatePartition {
  std::vector<int> s1, s2, f1, f2;  // indices into E.states
};

StatePartition partitionStates(const TwoScaleSystem& sys, const StateVec& x0);

/// Count of nonzeros violating the block structure forced by the partition
/// (slow rows of s1 into s2/f2, fast rows of s1/s2 anywhere, fast rows of f1
/// into s2/f2). Zero when the partition is consistent.
int zeroBlockViolations(const TwoScaleSystem& sys, const StatePartition& sp);

struct Assumption2Report {
  ExcursionStatus status = ExcursionStatus::Ok;
  StateVec failingCore;                 // core state where the excursion fails
  StateVec entryState, stuckState;      // full states (Blocked/Trapped)
  std::vector<StateVec> trappedClass;
  double maxIdentityGap = 0.0;          // max_z |sum of walk intensities - creating total|
  int statesChecked = 0;
  bool domainTruncated = false;         // scanned over a finite box, not a closed set
  bool ok() const { return status == ExcursionStatus::Ok; }
};

/// Structural check per core state: from every entry state, fast-only
/// reachability must neither dead-end with molecules of non-interacting
/// species left (Blocked) nor enter a closed fast class outside N0 (Trapped).
/// The intensity identity (walk total vs creating total) is evaluated
/// alongside and its largest gap recorded.
Assumption2Report checkAssumption2(const ReactionNetwork& net, const SpeciesPartition& part,
                                   const std::vector<int>& fast,
                                   const std::vector<StateVec>& coreStates);
Assumption2Report checkAssumption2(const TwoScaleSystem& sys);

struct SufficientConditions {
  bool a = false;  // fast set together with the creating reactions weakly reversible
  bool b = false;  // fast U-to-U part weakly reversible and every creating reaction reversed in F
  bool c = false;  // network weakly reversible and F = R_U
  bool subConservative = false;
  bool any() const { return a || b || c; }
};

SufficientConditions checkSufficientConditions(const ReactionNetwork& net,
                                               const SpeciesPartition& part,
                                               const std::vector<int>& fast);

/// How the intensity identity is certified for every core state at once.
enum class AllZCertificate {
  CoreFreeExits,        // every U vertex exits through reactions consuming no core species
  SufficientCondition,  // one of the structural conditions plus sub-conservativity
  IntermediateProper,   // U intermediate and F proper
  None,
};

AllZCertificate allZCertificate(const ReactionNetwork& net, const SpeciesPartition& part,
                                const std::vector<int>& fast);

/// Watched generator on s1: slow block plus slow-into-f1 times fast absorption
/// back into s1. Entries are entry rates times absorption probabilities, hence
/// nonnegative off-diagonal.
Eigen::MatrixXd watchedGenerator(const TwoScaleSystem& sys, const StatePartition& sp);

/// Zeroth-order limit generator on the absorbing states of the fast part plus
/// one collapsed state per closed irreducible fast class.
struct LimitGenerator {
  Eigen::MatrixXd Qstar;                    // (|A|+l) x (|A|+l)
  std::vector<int> aStates;                 // state indices for rows 0..|A|-1
  std::vector<std::vector<int>> wClasses;   // state indices per collapsed class
  std::vector<Eigen::VectorXd> nu;          // stationary law per class
  std::vector<int> tStates;                 // transient state indices
  Eigen::MatrixXd absorbT;                  // |T| x (|A|+l): absorption split

  /// Projects an initial distribution on the full space onto the reduced one.
  Eigen::VectorXd project(const Eigen::VectorXd& pi0) const;
};

LimitGenerator limitGeneratorGeneral(const SpMat& Qtilde, const SpMat& Qhat);

struct SweepReport {
  std::vector<double> epsilons;
  std::vector<double> errors;
  bool slopeDefined = false;
  double slope = 0.0, intercept = 0.0;
  int gridPoints = 0;
  double horizon = 0.0;
  double solverFloor = 0.0;
  int pointsUsedInFit = 0;
  std::string warning;
};

/// Sup over a uniform time grid of |P_pi(X_eps(t) in B) - P_pi0(X_0(t) in B0)|
/// per epsilon, with a log-log least-squares order fit. The reduced chain is
/// synthesized from the elimination of (U, F).
SweepReport epsilonSweep(const TwoScaleSystem& sys, const Eigen::VectorXd& piOnE,
                         const std::function<bool(const StateVec&)>& eventOnCore, double T,
                         const std::vector<double>& epsilons, int gridPoints = 201,
                         double solverTail = 1e-12);

struct TypeMismatch {
  StateVec state;  // full state (z, 0)
  std::string originalType, reducedType;
};

struct StationaryReport {
  bool hypothesesOk = true;
  std::string hypothesesDetail;
  std::vector<TypeMismatch> mismatches;
  bool irreducible = false;  // unique stationary law used; otherwise limiting law from x0
  std::vector<double> epsilons;
  std::vector<double> gaps;  // sup over E0 of |pi_eps((z,0)) - pi_0(z)|
};

/// Stationary (or long-run) comparison between the scaled chain on E and the
/// reduced chain on E0. State types are compared first; mismatches make the
/// comparison meaningless and are reported instead of gaps.
StationaryReport stationaryConvergence(const TwoScaleSystem& sys, const StateVec& x0,
                                       const std::vector<double>& epsilons);

/// Least-squares slope of log(err) vs log(eps), excluding points below
/// 100x the solver floor. Returns false if fewer than two points remain.
bool fitLogLogSlope(const std::vector<double>& eps, const std::vector<double>& err,
                    double floor, double* slope, double* intercept, int* used);

}  // namespace srn
