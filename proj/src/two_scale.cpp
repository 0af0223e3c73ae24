#include "srn/two_scale.hpp"

#include "srn/conservation.hpp"
#include "srn/graph.hpp"

#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace srn {

SpMat TwoScaleSystem::Qeps(double eps) const {
  if (!(eps > 0.0)) throw StructuralError("epsilon must be positive");
  return SpMat(Qtilde / eps) + Qhat;
}

TwoScaleSystem assemble(const ReactionNetwork& net, const SpeciesPartition& part,
                        const std::vector<int>& fast, StateSpace E) {
  PropernessReport prop = checkProper(net, part, fast);
  if (!prop.proper) throw StructuralError(prop.describe(net, part));
  TwoScaleSystem sys;
  sys.net = &net;
  sys.part = part;
  sys.fast = fast;
  sys.E = std::move(E);

  std::vector<int> slow;
  std::vector<bool> isFast(net.reactions.size() + 1, false);
  for (int id : fast) isFast[id] = true;
  for (const auto& r : net.reactions) {
    if (!isFast[r.id]) slow.push_back(r.id);
  }
  NetworkProcess fastProc(net, fast);
  NetworkProcess slowProc(net, slow);
  if (!verifyClosed(NetworkProcess(net), sys.E)) {
    throw StructuralError("state space is not closed under the network dynamics");
  }
  sys.Qtilde = buildGenerator(fastProc, sys.E);
  sys.Qhat = buildGenerator(slowProc, sys.E);
  return sys;
}

StatePartition partitionStates(const TwoScaleSystem& sys, const StateVec& x0) {
  const auto& part = sys.part;
  if (sys.E.indexOf(x0) < 0) throw StructuralError("initial state outside the closed set");
  if (!part.inN0(x0)) {
    throw StructuralError("initial state carries molecules of non-interacting species");
  }
  StateSpace M = surrogateReachable(*sys.net, part, sys.fast, x0);
  StatePartition sp;
  for (int i = 0; i < sys.E.size(); ++i) {
    const StateVec& x = sys.E.states[i];
    bool inM = M.indexOf(x) >= 0;
    int uc = part.uCount(x);
    if (inM && uc == 0) {
      sp.s1.push_back(i);
    } else if (uc == 0) {
      sp.s2.push_back(i);
    } else if (inM && uc == 1) {
      sp.f1.push_back(i);
    } else {
      sp.f2.push_back(i);
    }
  }
  if (zeroBlockViolations(sys, sp) != 0) {
    throw StructuralError("partition violates the two-scale block structure");
  }
  return sp;
}

int zeroBlockViolations(const TwoScaleSystem& sys, const StatePartition& sp) {
  int n = sys.E.size();
  enum Block { S1, S2, F1, F2 };
  std::vector<Block> blockOf(n, F2);
  for (int i : sp.s1) blockOf[i] = S1;
  for (int i : sp.s2) blockOf[i] = S2;
  for (int i : sp.f1) blockOf[i] = F1;
  for (int i : sp.f2) blockOf[i] = F2;
  int violations = 0;
  for (int k = 0; k < sys.Qhat.outerSize(); ++k) {
    for (SpMat::InnerIterator it(sys.Qhat, k); it; ++it) {
      if (it.row() == it.col() || it.value() == 0.0) continue;
      Block r = blockOf[it.row()], c = blockOf[it.col()];
      if (r == S1 && (c == S2 || c == F2)) ++violations;
    }
  }
  for (int k = 0; k < sys.Qtilde.outerSize(); ++k) {
    for (SpMat::InnerIterator it(sys.Qtilde, k); it; ++it) {
      if (it.row() == it.col() || it.value() == 0.0) continue;
      Block r = blockOf[it.row()], c = blockOf[it.col()];
      if (r == S1 || r == S2) ++violations;  // fast rows vanish without U molecules
      if (r == F1 && (c == S2 || c == F2)) ++violations;
    }
  }
  return violations;
}

Assumption2Report checkAssumption2(const ReactionNetwork& net, const SpeciesPartition& part,
                                   const std::vector<int>& fast,
                                   const std::vector<StateVec>& coreStates) {
  Assumption2Report rep;
  for (const auto& z : coreStates) {
    StateIntensities si = solveStateIntensities(net, part, fast, z);
    ++rep.statesChecked;
    rep.maxIdentityGap = std::max(rep.maxIdentityGap,
                                  std::abs(si.walkTotal - si.creatingTotal));
    if (si.status != ExcursionStatus::Ok && rep.status == ExcursionStatus::Ok) {
      rep.status = si.status;
      rep.failingCore = z;
      rep.entryState = si.entryWitness;
      rep.stuckState = si.stuckWitness;
      rep.trappedClass = si.trappedClass;
    }
  }
  return rep;
}

Assumption2Report checkAssumption2(const TwoScaleSystem& sys) {
  std::vector<StateVec> cores;
  for (const auto& x : sys.E.states) {
    if (sys.part.inN0(x)) cores.push_back(sys.part.projectCore(x));
  }
  return checkAssumption2(*sys.net, sys.part, sys.fast, cores);
}

SufficientConditions checkSufficientConditions(const ReactionNetwork& net,
                                               const SpeciesPartition& part,
                                               const std::vector<int>& fast) {
  SufficientConditions sc;
  std::vector<int> rU = net.reactionsConsumingU(part);
  std::vector<int> creating = net.reactionsCreatingU(part);
  auto contains = [](const std::vector<int>& v, int x) {
    return std::find(v.begin(), v.end(), x) != v.end();
  };

  std::vector<int> aSet = fast;
  for (int id : creating) aSet.push_back(id);
  sc.a = isWeaklyReversible(net, aSet);

  std::vector<int> bSet;  // fast reactions both consuming and producing U
  for (int id : fast) {
    const Reaction& r = net.reaction(id);
    if (part.projectU(r.product).sum() != 0) bSet.push_back(id);
  }
  bool reversedInF = true;
  for (int id : creating) {
    const Reaction& r = net.reaction(id);
    bool found = false;
    for (int f : fast) {
      const Reaction& q = net.reaction(f);
      if (q.reactant == r.product && q.product == r.reactant) {
        found = true;
        break;
      }
    }
    if (!found) {
      reversedInF = false;
      break;
    }
  }
  sc.b = reversedInF && isWeaklyReversible(net, bSet);

  std::vector<int> fSorted = fast, uSorted = rU;
  std::sort(fSorted.begin(), fSorted.end());
  std::sort(uSorted.begin(), uSorted.end());
  std::vector<int> all;
  for (const auto& r : net.reactions) all.push_back(r.id);
  sc.c = (fSorted == uSorted) && isWeaklyReversible(net, all);

  sc.subConservative =
      conservationClass(net).kind != ConservationKind::Neither;
  (void)contains;
  return sc;
}

AllZCertificate allZCertificate(const ReactionNetwork& net, const SpeciesPartition& part,
                                const std::vector<int>& fast) {
  EliminationGraph g = buildEliminationGraph(net, part, fast);
  if (!checkProper(g).proper) return AllZCertificate::None;
  if (coreFreeExitCertificate(g)) return AllZCertificate::CoreFreeExits;
  SufficientConditions sc = checkSufficientConditions(net, part, fast);
  if (sc.any() && sc.subConservative) return AllZCertificate::SufficientCondition;
  if (isIntermediateSet(net, part.u)) return AllZCertificate::IntermediateProper;
  return AllZCertificate::None;
}

namespace {

Eigen::MatrixXd denseBlock(const SpMat& Q, const std::vector<int>& rows,
                           const std::vector<int>& cols) {
  Eigen::MatrixXd B = Eigen::MatrixXd::Zero(rows.size(), cols.size());
  std::vector<int> rpos(Q.rows(), -1), cpos(Q.cols(), -1);
  for (size_t i = 0; i < rows.size(); ++i) rpos[rows[i]] = static_cast<int>(i);
  for (size_t j = 0; j < cols.size(); ++j) cpos[cols[j]] = static_cast<int>(j);
  for (int k = 0; k < Q.outerSize(); ++k) {
    for (SpMat::InnerIterator it(Q, k); it; ++it) {
      if (rpos[it.row()] >= 0 && cpos[it.col()] >= 0) {
        B(rpos[it.row()], cpos[it.col()]) = it.value();
      }
    }
  }
  return B;
}

void requireTransientFastBlock(const SpMat& Qt, const std::vector<int>& f1) {
  // Every f1 state must leak (directly or through f1) into the rest.
  std::vector<int> pos(Qt.rows(), -1);
  for (size_t i = 0; i < f1.size(); ++i) pos[f1[i]] = static_cast<int>(i);
  std::vector<std::vector<int>> adj(f1.size());
  std::vector<bool> exits(f1.size(), false);
  for (int k = 0; k < Qt.outerSize(); ++k) {
    for (SpMat::InnerIterator it(Qt, k); it; ++it) {
      if (it.row() == it.col() || it.value() <= 0.0) continue;
      int i = pos[it.row()];
      if (i < 0) continue;
      if (pos[it.col()] >= 0) {
        adj[i].push_back(pos[it.col()]);
      } else {
        exits[i] = true;
      }
    }
  }
  int ncomp = 0;
  std::vector<int> comp = stronglyConnectedComponents(adj, &ncomp);
  std::vector<bool> leaks(ncomp, false);
  for (size_t i = 0; i < f1.size(); ++i) {
    if (exits[i]) leaks[comp[i]] = true;
    for (int j : adj[i]) {
      if (comp[j] != comp[i]) leaks[comp[i]] = true;
    }
  }
  for (size_t i = 0; i < f1.size(); ++i) {
    if (!leaks[comp[i]]) {
      throw StructuralError(
          "fast block is singular: a class of states with non-interacting molecules "
          "cannot be degraded (first member index " + std::to_string(f1[i]) + ")");
    }
  }
}

}  // namespace

Eigen::MatrixXd watchedGenerator(const TwoScaleSystem& sys, const StatePartition& sp) {
  requireTransientFastBlock(sys.Qtilde, sp.f1);
  Eigen::MatrixXd Qh11 = denseBlock(sys.Qhat, sp.s1, sp.s1);
  Eigen::MatrixXd Qh1f = denseBlock(sys.Qhat, sp.s1, sp.f1);
  Eigen::MatrixXd Qtff = denseBlock(sys.Qtilde, sp.f1, sp.f1);
  Eigen::MatrixXd Qtf1 = denseBlock(sys.Qtilde, sp.f1, sp.s1);
  if (sp.f1.empty()) return Qh11;
  // Entry rates times absorption probabilities of the fast excursion.
  Eigen::MatrixXd absorb = (-Qtff).lu().solve(Qtf1);
  return Qh11 + Qh1f * absorb;
}

LimitGenerator limitGeneratorGeneral(const SpMat& Qtilde, const SpMat& Qhat) {
  LimitGenerator lg;
  Classification cls = classifyStates(Qtilde);
  int n = static_cast<int>(Qtilde.rows());
  for (int i = 0; i < n; ++i) {
    if (cls.label[i] == StateClass::Transient) lg.tStates.push_back(i);
  }
  for (const auto& rc : cls.recurrentClasses) {
    if (rc.size() == 1) {
      lg.aStates.push_back(rc.front());
    } else {
      lg.wClasses.push_back(rc);
    }
  }
  std::sort(lg.aStates.begin(), lg.aStates.end());
  int na = static_cast<int>(lg.aStates.size());
  int nw = static_cast<int>(lg.wClasses.size());
  for (const auto& wc : lg.wClasses) {
    Eigen::VectorXd nuFull = stationaryDistribution(Qtilde, wc);
    Eigen::VectorXd nuc(wc.size());
    for (size_t i = 0; i < wc.size(); ++i) nuc[i] = nuFull[wc[i]];
    lg.nu.push_back(nuc);
  }

  std::vector<int> aw = lg.aStates;  // A then W members, class by class
  for (const auto& wc : lg.wClasses) aw.insert(aw.end(), wc.begin(), wc.end());
  int naw = static_cast<int>(aw.size());

  Eigen::MatrixXd G = denseBlock(Qhat, aw, aw);
  if (!lg.tStates.empty()) {
    Eigen::MatrixXd QhT = denseBlock(Qhat, aw, lg.tStates);
    Eigen::MatrixXd QtTT = denseBlock(Qtilde, lg.tStates, lg.tStates);
    Eigen::MatrixXd QtTaw = denseBlock(Qtilde, lg.tStates, aw);
    Eigen::MatrixXd H = (-QtTT).lu().solve(QtTaw);  // absorption probabilities
    G += QhT * H;
    lg.absorbT.resize(lg.tStates.size(), na + nw);
    // Split absorption by target: plain states, then class sums.
    lg.absorbT.setZero();
    for (int t = 0; t < static_cast<int>(lg.tStates.size()); ++t) {
      for (int j = 0; j < naw; ++j) {
        int target;
        if (j < na) {
          target = j;
        } else {
          int off = j - na, cidx = 0;
          while (off >= static_cast<int>(lg.wClasses[cidx].size())) {
            off -= static_cast<int>(lg.wClasses[cidx].size());
            ++cidx;
          }
          target = na + cidx;
        }
        lg.absorbT(t, target) += H(t, j);
      }
    }
  } else {
    lg.absorbT.resize(0, na + nw);
  }

  // Aggregate: rows of a class are mixed by nu, columns summed over members.
  lg.Qstar.resize(na + nw, na + nw);
  lg.Qstar.setZero();
  auto rowWeight = [&](int reduced, int member) -> double {
    if (reduced < na) return 1.0;
    const auto& nu = lg.nu[reduced - na];
    return nu[member];
  };
  int rowOffset = 0;
  for (int r = 0; r < na + nw; ++r) {
    int count = r < na ? 1 : static_cast<int>(lg.wClasses[r - na].size());
    for (int m = 0; m < count; ++m) {
      double w = rowWeight(r, m);
      int colOffset = 0;
      for (int c = 0; c < na + nw; ++c) {
        int ccount = c < na ? 1 : static_cast<int>(lg.wClasses[c - na].size());
        double sum = 0.0;
        for (int mc = 0; mc < ccount; ++mc) sum += G(rowOffset + m, colOffset + mc);
        lg.Qstar(r, c) += w * sum;
        colOffset += ccount;
      }
    }
    rowOffset += count;
  }
  return lg;
}

Eigen::VectorXd LimitGenerator::project(const Eigen::VectorXd& pi0) const {
  int na = static_cast<int>(aStates.size());
  int nw = static_cast<int>(wClasses.size());
  Eigen::VectorXd out = Eigen::VectorXd::Zero(na + nw);
  for (int a = 0; a < na; ++a) out[a] += pi0[aStates[a]];
  for (int c = 0; c < nw; ++c) {
    for (int s : wClasses[c]) out[na + c] += pi0[s];
  }
  for (size_t t = 0; t < tStates.size(); ++t) {
    double w = pi0[tStates[t]];
    if (w == 0.0) continue;
    for (int j = 0; j < na + nw; ++j) out[j] += w * absorbT(static_cast<int>(t), j);
  }
  return out;
}

bool fitLogLogSlope(const std::vector<double>& eps, const std::vector<double>& err,
                    double floor, double* slope, double* intercept, int* used) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (size_t i = 0; i < eps.size(); ++i) {
    if (err[i] < floor) continue;
    double x = std::log(eps[i]), y = std::log(err[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++n;
  }
  if (used) *used = n;
  if (n < 2) return false;
  double det = n * sxx - sx * sx;
  if (det == 0.0) return false;
  *slope = (n * sxy - sx * sy) / det;
  *intercept = (sy * sxx - sx * sxy) / det;
  return true;
}

SweepReport epsilonSweep(const TwoScaleSystem& sys, const Eigen::VectorXd& piOnE,
                         const std::function<bool(const StateVec&)>& eventOnCore, double T,
                         const std::vector<double>& epsilons, int gridPoints,
                         double solverTail) {
  SweepReport rep;
  rep.epsilons = epsilons;
  rep.gridPoints = gridPoints;
  rep.horizon = T;
  rep.solverFloor = solverTail;

  const auto& part = sys.part;
  // pi must be supported on E cap N0.
  for (int i = 0; i < sys.E.size(); ++i) {
    if (piOnE[i] != 0.0 && !part.inN0(sys.E.states[i])) {
      throw StructuralError("initial distribution has mass on states with "
                            "non-interacting molecules");
    }
  }

  // Reduced chain on the projected core states.
  std::vector<StateVec> coreStates;
  for (const auto& x : sys.E.states) {
    if (part.inN0(x)) coreStates.push_back(part.projectCore(x));
  }
  ReducedSRN red = reduce(*sys.net, part, sys.fast, coreStates);
  StateSpace E0 = StateSpace::fromStates(coreStates, true);
  ReducedProcess redProc(red);
  if (!verifyClosed(redProc, E0)) {
    throw StructuralError("projected core set is not closed under the reduced dynamics");
  }
  SpMat Q0 = buildGenerator(redProc, E0);

  Eigen::VectorXd pi00 = Eigen::VectorXd::Zero(E0.size());
  std::vector<char> maskE(sys.E.size(), 0), maskE0(E0.size(), 0);
  for (int i = 0; i < sys.E.size(); ++i) {
    const StateVec& x = sys.E.states[i];
    if (!part.inN0(x)) continue;
    StateVec z = part.projectCore(x);
    int j = E0.requireIndex(z);
    pi00[j] += piOnE[i];
    bool inB = eventOnCore(z);
    maskE[i] = inB ? 1 : 0;
    maskE0[j] = inB ? 1 : 0;
  }

  std::vector<double> grid(gridPoints);
  for (int g = 0; g < gridPoints; ++g) {
    grid[g] = T * static_cast<double>(g) / (gridPoints - 1);
  }
  std::vector<double> reducedCurve =
      transientEventProbability(Q0, pi00, grid, maskE0, solverTail);

  for (double eps : epsilons) {
    SpMat Qe = sys.Qeps(eps);
    std::vector<double> curve = transientEventProbability(Qe, piOnE, grid, maskE, solverTail);
    double e = 0.0;
    for (int g = 0; g < gridPoints; ++g) e = std::max(e, std::abs(curve[g] - reducedCurve[g]));
    rep.errors.push_back(e);
  }
  if (epsilons.size() < 2) {
    rep.warning = "fewer than two epsilon values; no order fit";
    return rep;
  }
  rep.slopeDefined = fitLogLogSlope(rep.epsilons, rep.errors, 100.0 * solverTail, &rep.slope,
                                    &rep.intercept, &rep.pointsUsedInFit);
  if (!rep.slopeDefined) rep.warning = "errors at solver floor; no order fit";
  return rep;
}

StationaryReport stationaryConvergence(const TwoScaleSystem& sys, const StateVec& x0,
                                       const std::vector<double>& epsilons) {
  StationaryReport rep;
  const auto& part = sys.part;
  std::ostringstream detail;
  if (!isIntermediateSet(*sys.net, part.u)) {
    rep.hypothesesOk = false;
    detail << "non-interacting species are not intermediate; ";
  }
  std::vector<int> rU = sys.net->reactionsConsumingU(part);
  std::vector<int> fSorted = sys.fast, uSorted = rU;
  std::sort(fSorted.begin(), fSorted.end());
  std::sort(uSorted.begin(), uSorted.end());
  if (fSorted != uSorted) {
    rep.hypothesesOk = false;
    detail << "fast set differs from the full U-consuming set; ";
  }
  if (conservationClass(*sys.net).kind == ConservationKind::Neither) {
    rep.hypothesesOk = false;
    detail << "network is not sub-conservative; ";
  }
  rep.hypothesesDetail = detail.str();

  // Type comparison on the shared core states (connectivity is
  // epsilon-independent, so classify at epsilon = 1).
  SpMat Q1 = sys.Qeps(1.0);
  Classification clsO = classifyStates(Q1);

  std::vector<StateVec> coreStates;
  for (const auto& x : sys.E.states) {
    if (part.inN0(x)) coreStates.push_back(part.projectCore(x));
  }
  ReducedSRN red = reduce(*sys.net, part, sys.fast, coreStates);
  StateSpace E0 = StateSpace::fromStates(coreStates, true);
  ReducedProcess redProc(red);
  SpMat Q0 = buildGenerator(redProc, E0);
  Classification clsR = classifyStates(Q0);

  auto typeName = [](StateClass c) {
    switch (c) {
      case StateClass::Absorbing:
      case StateClass::Recurrent:
        return "recurrent";
      default:
        return "transient";
    }
  };
  for (int i = 0; i < sys.E.size(); ++i) {
    const StateVec& x = sys.E.states[i];
    if (!part.inN0(x)) continue;
    int j = E0.requireIndex(part.projectCore(x));
    bool recO = clsO.label[i] != StateClass::Transient;
    bool recR = clsR.label[j] != StateClass::Transient;
    if (recO != recR) {
      rep.mismatches.push_back({x, typeName(clsO.label[i]), typeName(clsR.label[j])});
    }
  }
  if (!rep.mismatches.empty()) return rep;

  // Unique stationary law when E is one closed class; otherwise the long-run
  // law from x0 (absorption-weighted mixture), which coincides with it when
  // irreducible.
  rep.irreducible = clsO.recurrentClasses.size() == 1 &&
                    static_cast<int>(clsO.recurrentClasses[0].size()) == sys.E.size();
  int i0 = sys.E.requireIndex(x0);
  int j0 = E0.requireIndex(part.projectCore(x0));
  Eigen::VectorXd pi0Red;
  if (rep.irreducible) {
    pi0Red = stationaryDistribution(Q0);
  } else {
    Eigen::VectorXd deltaR = Eigen::VectorXd::Zero(E0.size());
    deltaR[j0] = 1.0;
    pi0Red = limitingDistribution(Q0, deltaR);
  }
  for (double eps : epsilons) {
    SpMat Qe = sys.Qeps(eps);
    Eigen::VectorXd piE;
    if (rep.irreducible) {
      piE = stationaryDistribution(Qe);
    } else {
      Eigen::VectorXd delta = Eigen::VectorXd::Zero(sys.E.size());
      delta[i0] = 1.0;
      piE = limitingDistribution(Qe, delta);
    }
    double gap = 0.0;
    for (int i = 0; i < sys.E.size(); ++i) {
      const StateVec& x = sys.E.states[i];
      if (!part.inN0(x)) continue;
      int j = E0.requireIndex(part.projectCore(x));
      gap = std::max(gap, std::abs(piE[i] - pi0Red[j]));
    }
    rep.epsilons.push_back(eps);
    rep.gaps.push_back(gap);
  }
  return rep;
}

}  // namespace srn
