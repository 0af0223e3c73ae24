#include "srn/ctmc.hpp"

#include "srn/graph.hpp"

#include <Eigen/Dense>
#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <deque>
#include <random>

namespace srn {

NetworkProcess::NetworkProcess(const ReactionNetwork& net) : net_(&net) {
  for (const auto& r : net.reactions) ids_.push_back(r.id);
}

NetworkProcess::NetworkProcess(const ReactionNetwork& net, std::vector<int> reactionIds,
                               double scale)
    : net_(&net), ids_(std::move(reactionIds)), scale_(scale) {}

void NetworkProcess::transitions(const StateVec& x, double t,
                                 std::vector<Transition>& out) const {
  out.clear();
  for (int id : ids_) {
    const Reaction& r = net_->reaction(id);
    if (r.reactant == r.product) continue;  // dynamically inert
    double lam = net_->intensity(id, x, t);
    if (lam > 0.0) out.push_back({x + r.jump(), scale_ * lam, id});
  }
}

void ReducedProcess::transitions(const StateVec& x, double t,
                                 std::vector<Transition>& out) const {
  out.clear();
  for (const auto& e : red_->active(x, t)) {
    if (e.trivial) continue;
    out.push_back({x + (e.product - e.reactant), e.tau, 0});
  }
}

SurrogateProcess::SurrogateProcess(const ReactionNetwork& net, const SpeciesPartition& part,
                                   std::vector<int> fast)
    : net_(&net), part_(part) {
  isFast_.assign(net.reactions.size() + 1, false);
  for (int id : fast) isFast_[id] = true;
}

void SurrogateProcess::transitions(const StateVec& x, double t,
                                   std::vector<Transition>& out) const {
  out.clear();
  bool gateOpen = part_.inN0(x);
  for (const auto& r : net_->reactions) {
    if (r.reactant == r.product) continue;
    if (!isFast_[r.id] && !gateOpen) continue;
    double lam = net_->intensity(r.id, x, t);
    if (lam > 0.0) out.push_back({x + r.jump(), lam, r.id});
  }
}

int StateSpace::indexOf(const StateVec& x) const {
  auto it = index.find(x);
  return it == index.end() ? -1 : it->second;
}

int StateSpace::requireIndex(const StateVec& x) const {
  int i = indexOf(x);
  if (i < 0) throw StructuralError("state outside the state space");
  return i;
}

StateSpace StateSpace::fromStates(std::vector<StateVec> sts, bool closedFlag) {
  StateSpace E;
  std::sort(sts.begin(), sts.end(), lexLess);
  sts.erase(std::unique(sts.begin(), sts.end(),
                        [](const StateVec& a, const StateVec& b) { return a == b; }),
            sts.end());
  E.states = std::move(sts);
  for (int i = 0; i < E.size(); ++i) E.index.emplace(E.states[i], i);
  E.closed = closedFlag;
  return E;
}

StateSpace reachableClosedSet(const JumpProcess& proc, const StateVec& x0, int cap) {
  std::vector<StateVec> found{x0};
  std::unordered_map<StateVec, int, StateHash, StateEq> seen;
  seen.emplace(x0, 0);
  std::deque<int> queue{0};
  std::vector<JumpProcess::Transition> trans;
  while (!queue.empty()) {
    int i = queue.front();
    queue.pop_front();
    StateVec x = found[i];
    proc.transitions(x, 0.0, trans);
    for (const auto& tr : trans) {
      if (seen.count(tr.target)) continue;
      if (static_cast<int>(found.size()) >= cap) {
        std::string witness = "(";
        for (Eigen::Index c = 0; c < tr.target.size(); ++c) {
          if (c) witness += ",";
          witness += std::to_string(tr.target[c]);
        }
        witness += ")";
        throw StructuralError("reachable set exceeds cap of " + std::to_string(cap) +
                              " states; frontier witness " + witness +
                              " suggests an unbounded (non-sub-conservative) direction");
      }
      int idx = static_cast<int>(found.size());
      seen.emplace(tr.target, idx);
      found.push_back(tr.target);
      queue.push_back(idx);
    }
  }
  return StateSpace::fromStates(std::move(found), true);
}

StateSpace surrogateReachable(const ReactionNetwork& net, const SpeciesPartition& part,
                              const std::vector<int>& fast, const StateVec& x0, int cap) {
  if (!part.inN0(x0)) {
    throw StructuralError("surrogate reachability requires an initial state without "
                          "molecules of non-interacting species");
  }
  SurrogateProcess proc(net, part, fast);
  return reachableClosedSet(proc, x0, cap);
}

bool verifyClosed(const JumpProcess& proc, const StateSpace& E, double t) {
  std::vector<JumpProcess::Transition> trans;
  for (const auto& x : E.states) {
    proc.transitions(x, t, trans);
    for (const auto& tr : trans) {
      if (E.indexOf(tr.target) < 0) return false;
    }
  }
  return true;
}

SpMat buildGenerator(const JumpProcess& proc, const StateSpace& E, double t,
                     bool requireClosed) {
  int n = E.size();
  std::vector<Eigen::Triplet<double>> trip;
  std::vector<JumpProcess::Transition> trans;
  for (int i = 0; i < n; ++i) {
    proc.transitions(E.states[i], t, trans);
    double total = 0.0;
    std::unordered_map<int, double> row;
    for (const auto& tr : trans) {
      int j = E.indexOf(tr.target);
      if (j < 0) {
        if (requireClosed) {
          throw StructuralError("state space is not closed: transition leaves the set");
        }
        continue;
      }
      row[j] += tr.rate;
      total += tr.rate;
    }
    for (const auto& [j, rate] : row) trip.emplace_back(i, j, rate);
    trip.emplace_back(i, i, -total);
  }
  SpMat Q(n, n);
  Q.setFromTriplets(trip.begin(), trip.end());
  return Q;
}

namespace {

// Per-time Poisson weights are generated by the log-space recurrence
// log p_{k+1} = log p_k + log(m) - log(k+1), which stays finite for large m.
struct PoissonWeights {
  double m;
  double logp;
  int k = 0;
  double cum = 0.0;

  explicit PoissonWeights(double mean) : m(mean), logp(-mean) {}
  double current() const { return m == 0.0 ? (k == 0 ? 1.0 : 0.0) : std::exp(logp); }
  void advance() {
    if (m > 0.0) logp += std::log(m) - std::log(static_cast<double>(k + 1));
    ++k;
  }
};

}  // namespace

DistributionTimeline transientDistribution(const SpMat& Q, const Eigen::VectorXd& pi0,
                                           const std::vector<double>& times, double tail) {
  int n = static_cast<int>(Q.rows());
  double lambda = 0.0;
  for (int i = 0; i < n; ++i) lambda = std::max(lambda, -Q.coeff(i, i));
  DistributionTimeline out;
  out.times = times;
  out.dists.assign(times.size(), Eigen::VectorXd::Zero(n));
  out.truncationError.assign(times.size(), 0.0);
  if (lambda == 0.0) {
    for (size_t ti = 0; ti < times.size(); ++ti) out.dists[ti] = pi0;
    return out;
  }
  SpMat PT = (SpMat(Q.transpose()) / lambda);
  for (int i = 0; i < n; ++i) PT.coeffRef(i, i) += 1.0;
  PT.makeCompressed();

  std::vector<PoissonWeights> w;
  w.reserve(times.size());
  for (double t : times) w.emplace_back(lambda * t);

  Eigen::VectorXd v = pi0;
  bool allDone = false;
  int guard = 0;
  while (!allDone) {
    allDone = true;
    for (size_t ti = 0; ti < times.size(); ++ti) {
      if (w[ti].cum < 1.0 - tail) {
        double p = w[ti].current();
        out.dists[ti] += p * v;
        w[ti].cum += p;
        if (w[ti].cum < 1.0 - tail) allDone = false;
        w[ti].advance();
      }
    }
    if (allDone) break;
    Eigen::VectorXd v2 = PT * v;
    // Stationary inside the uniformized chain: remaining Poisson mass acts on v.
    if ((v2 - v).lpNorm<1>() < 1e-16) {
      for (size_t ti = 0; ti < times.size(); ++ti) {
        if (w[ti].cum < 1.0) out.dists[ti] += (1.0 - w[ti].cum) * v;
        w[ti].cum = 1.0;
      }
      break;
    }
    v.swap(v2);
    if (++guard > 300000000) throw NumericalError("uniformization did not terminate");
  }
  for (size_t ti = 0; ti < times.size(); ++ti) {
    out.truncationError[ti] = std::max(0.0, 1.0 - w[ti].cum);
  }
  return out;
}

std::vector<double> transientEventProbability(const SpMat& Q, const Eigen::VectorXd& pi0,
                                              const std::vector<double>& times,
                                              const std::vector<char>& eventMask,
                                              double tail) {
  int n = static_cast<int>(Q.rows());
  double lambda = 0.0;
  for (int i = 0; i < n; ++i) lambda = std::max(lambda, -Q.coeff(i, i));
  std::vector<double> out(times.size(), 0.0);
  auto maskDot = [&](const Eigen::VectorXd& v) {
    double s = 0.0;
    for (int i = 0; i < n; ++i) {
      if (eventMask[i]) s += v[i];
    }
    return s;
  };
  if (lambda == 0.0) {
    double s = maskDot(pi0);
    std::fill(out.begin(), out.end(), s);
    return out;
  }
  SpMat PT = (SpMat(Q.transpose()) / lambda);
  for (int i = 0; i < n; ++i) PT.coeffRef(i, i) += 1.0;
  PT.makeCompressed();
  std::vector<PoissonWeights> w;
  w.reserve(times.size());
  for (double t : times) w.emplace_back(lambda * t);
  Eigen::VectorXd v = pi0;
  bool allDone = false;
  while (!allDone) {
    allDone = true;
    double s = maskDot(v);
    for (size_t ti = 0; ti < times.size(); ++ti) {
      if (w[ti].cum < 1.0 - tail) {
        double p = w[ti].current();
        out[ti] += p * s;
        w[ti].cum += p;
        if (w[ti].cum < 1.0 - tail) allDone = false;
        w[ti].advance();
      }
    }
    if (allDone) break;
    Eigen::VectorXd v2 = PT * v;
    if ((v2 - v).lpNorm<1>() < 1e-16) {
      double sv = maskDot(v);
      for (size_t ti = 0; ti < times.size(); ++ti) {
        if (w[ti].cum < 1.0) out[ti] += (1.0 - w[ti].cum) * sv;
        w[ti].cum = 1.0;
      }
      break;
    }
    v.swap(v2);
  }
  return out;
}

DistributionTimeline transientDistributionTimedep(const std::function<SpMat(double)>& Qof,
                                                  const Eigen::VectorXd& pi0,
                                                  const std::vector<double>& times,
                                                  const TimedepOptions& opts) {
  DistributionTimeline out;
  out.times = times;
  auto deriv = [&](double t, const Eigen::VectorXd& p) -> Eigen::VectorXd {
    SpMat Q = Qof(t);
    return SpMat(Q.transpose()) * p;
  };
  auto rk4 = [&](double t, const Eigen::VectorXd& p, double h) -> Eigen::VectorXd {
    Eigen::VectorXd k1 = deriv(t, p);
    Eigen::VectorXd k2 = deriv(t + h / 2, p + (h / 2) * k1);
    Eigen::VectorXd k3 = deriv(t + h / 2, p + (h / 2) * k2);
    Eigen::VectorXd k4 = deriv(t + h, p + h * k3);
    return p + (h / 6) * (k1 + 2 * k2 + 2 * k3 + k4);
  };

  Eigen::VectorXd p = pi0;
  double t = 0.0;
  for (double target : times) {
    if (target < t) throw StructuralError("output times must be nondecreasing");
    double h = std::max((target - t) / 16.0, opts.minStep);
    while (t < target) {
      h = std::min(h, target - t);
      Eigen::VectorXd full = rk4(t, p, h);
      Eigen::VectorXd half = rk4(t + h / 2, rk4(t, p, h / 2), h / 2);
      double err = (full - half).lpNorm<Eigen::Infinity>();
      if (err > opts.tol && h > opts.minStep) {
        h /= 2;
        if (h < opts.minStep) throw NumericalError("step size underflow in forward equation");
        continue;
      }
      p = half;
      t += h;
      if (err < opts.tol / 32) h *= 2;
    }
    out.dists.push_back(p);
    out.truncationError.push_back(std::abs(p.sum() - 1.0));  // drift, logged not repaired
  }
  return out;
}

Classification classifyStates(const SpMat& Q) {
  int n = static_cast<int>(Q.rows());
  std::vector<std::vector<int>> adj(n);
  for (int kcol = 0; kcol < Q.outerSize(); ++kcol) {
    for (SpMat::InnerIterator it(Q, kcol); it; ++it) {
      if (it.row() != it.col() && it.value() > 0.0) {
        adj[it.row()].push_back(static_cast<int>(it.col()));
      }
    }
  }
  int ncomp = 0;
  std::vector<int> comp = stronglyConnectedComponents(adj, &ncomp);
  std::vector<bool> leaks(ncomp, false);
  std::vector<int> compSize(ncomp, 0);
  for (int i = 0; i < n; ++i) {
    ++compSize[comp[i]];
    for (int j : adj[i]) {
      if (comp[j] != comp[i]) leaks[comp[i]] = true;
    }
  }
  Classification cls;
  cls.label.assign(n, StateClass::Transient);
  cls.classOf.assign(n, -1);
  std::vector<int> classIdOfComp(ncomp, -1);
  for (int i = 0; i < n; ++i) {
    int c = comp[i];
    if (leaks[c]) continue;
    if (classIdOfComp[c] < 0) {
      classIdOfComp[c] = static_cast<int>(cls.recurrentClasses.size());
      cls.recurrentClasses.emplace_back();
    }
    int id = classIdOfComp[c];
    cls.classOf[i] = id;
    cls.recurrentClasses[id].push_back(i);
    cls.label[i] = (compSize[c] == 1) ? StateClass::Absorbing : StateClass::Recurrent;
  }
  return cls;
}

Eigen::VectorXd stationaryDistribution(const SpMat& Q, const std::vector<int>& component) {
  int n = static_cast<int>(Q.rows());
  std::vector<int> comp = component;
  if (comp.empty()) {
    comp.resize(n);
    for (int i = 0; i < n; ++i) comp[i] = i;
  }
  int m = static_cast<int>(comp.size());
  std::vector<int> pos(n, -1);
  for (int i = 0; i < m; ++i) pos[comp[i]] = i;

  // Closed and irreducible on the component.
  std::vector<std::vector<int>> adj(m);
  for (int kcol = 0; kcol < Q.outerSize(); ++kcol) {
    for (SpMat::InnerIterator it(Q, kcol); it; ++it) {
      if (it.row() == it.col() || it.value() <= 0.0) continue;
      int i = static_cast<int>(it.row()), j = static_cast<int>(it.col());
      if (pos[i] >= 0) {
        if (pos[j] < 0) throw StructuralError("component is not closed");
        adj[pos[i]].push_back(pos[j]);
      }
    }
  }
  int ncomp = 0;
  stronglyConnectedComponents(adj, &ncomp);
  if (ncomp != 1) throw StructuralError("component is not irreducible");

  // pi Q = 0 with one equation replaced by normalization.
  SpMat A(m, m);
  std::vector<Eigen::Triplet<double>> trip;
  for (int kcol = 0; kcol < Q.outerSize(); ++kcol) {
    for (SpMat::InnerIterator it(Q, kcol); it; ++it) {
      int i = static_cast<int>(it.row()), j = static_cast<int>(it.col());
      if (pos[i] < 0 || pos[j] < 0) continue;
      if (pos[j] == 0) continue;  // replaced by normalization row
      trip.emplace_back(pos[j], pos[i], it.value());  // A = Q^T restricted
    }
  }
  for (int i = 0; i < m; ++i) trip.emplace_back(0, i, 1.0);
  A.setFromTriplets(trip.begin(), trip.end());
  A.makeCompressed();
  Eigen::SparseLU<SpMat> lu(A);
  if (lu.info() != Eigen::Success) throw NumericalError("stationary solve failed");
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m);
  rhs[0] = 1.0;
  Eigen::VectorXd piC = lu.solve(rhs);
  // One step of iterative refinement.
  Eigen::VectorXd resid = A * piC - rhs;
  piC -= lu.solve(resid);

  Eigen::VectorXd pi = Eigen::VectorXd::Zero(n);
  for (int i = 0; i < m; ++i) pi[comp[i]] = piC[i];
  double res = (Eigen::RowVectorXd(pi.transpose()) * Q).lpNorm<Eigen::Infinity>();
  double scale = 1.0;
  for (int i = 0; i < n; ++i) scale = std::max(scale, -Q.coeff(i, i));
  if (res > 1e-12 * scale) {
    throw NumericalError("stationary residual " + std::to_string(res) + " exceeds tolerance");
  }
  return pi;
}

Eigen::VectorXd limitingDistribution(const SpMat& Q, const Eigen::VectorXd& pi0) {
  int n = static_cast<int>(Q.rows());
  Classification cls = classifyStates(Q);
  int nc = static_cast<int>(cls.recurrentClasses.size());
  std::vector<Eigen::VectorXd> nu(nc);
  for (int c = 0; c < nc; ++c) nu[c] = stationaryDistribution(Q, cls.recurrentClasses[c]);

  std::vector<int> trans;
  std::vector<int> pos(n, -1);
  for (int i = 0; i < n; ++i) {
    if (cls.classOf[i] < 0) {
      pos[i] = static_cast<int>(trans.size());
      trans.push_back(i);
    }
  }
  int m = static_cast<int>(trans.size());
  Eigen::VectorXd out = Eigen::VectorXd::Zero(n);
  for (int i = 0; i < n; ++i) {
    if (cls.classOf[i] >= 0) out += pi0[i] * nu[cls.classOf[i]];
  }
  if (m == 0) return out;

  // Absorption probabilities: (-Q_TT) H = Q_{T,C_k} 1 per recurrent class.
  SpMat M(m, m);
  std::vector<Eigen::Triplet<double>> trip;
  Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(m, nc);
  for (int kcol = 0; kcol < Q.outerSize(); ++kcol) {
    for (SpMat::InnerIterator it(Q, kcol); it; ++it) {
      int i = static_cast<int>(it.row()), j = static_cast<int>(it.col());
      if (pos[i] < 0) continue;
      if (pos[j] >= 0) {
        trip.emplace_back(pos[i], pos[j], -it.value());
      } else if (cls.classOf[j] >= 0 && i != j) {
        rhs(pos[i], cls.classOf[j]) += it.value();
      }
    }
  }
  M.setFromTriplets(trip.begin(), trip.end());
  M.makeCompressed();
  Eigen::SparseLU<SpMat> lu(M);
  if (lu.info() != Eigen::Success) throw NumericalError("absorption solve failed");
  Eigen::MatrixXd H = lu.solve(rhs);
  for (int a = 0; a < m; ++a) {
    double w = pi0[trans[a]];
    if (w == 0.0) continue;
    for (int c = 0; c < nc; ++c) out += w * H(a, c) * nu[c];
  }
  return out;
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

}  // namespace

Trajectory ssaSimulate(const JumpProcess& proc, const StateVec& x0, double T,
                       std::uint64_t seed, std::uint64_t replicate, std::int64_t maxJumps) {
  // Stream keyed by (seed, replicate): identical output regardless of how
  // replicates are scheduled.
  std::mt19937_64 rng(splitmix64(seed ^ splitmix64(replicate + 0x51ull)));
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  Trajectory tr;
  tr.times.push_back(0.0);
  tr.states.push_back(x0);
  StateVec x = x0;
  double t = 0.0;
  std::vector<JumpProcess::Transition> trans;
  std::int64_t jumps = 0;
  while (true) {
    proc.transitions(x, t, trans);
    double total = 0.0;
    for (const auto& tt : trans) total += tt.rate;
    if (total <= 0.0) break;  // constant from here on
    double u = unif(rng);
    double dt = -std::log(1.0 - u) / total;
    if (proc.timeDependent()) {
      // Time-dependent intensities would need thinning; out of scope for SSA.
      throw StructuralError("ssa requires time-homogeneous intensities");
    }
    t += dt;
    if (t > T) break;
    double pick = unif(rng) * total;
    double accum = 0.0;
    const JumpProcess::Transition* chosen = &trans.back();
    for (const auto& tt : trans) {
      accum += tt.rate;
      if (pick <= accum) {
        chosen = &tt;
        break;
      }
    }
    x = chosen->target;
    tr.times.push_back(t);
    tr.states.push_back(x);
    if (++jumps > maxJumps) {
      throw NumericalError("jump cap exceeded after " + std::to_string(maxJumps) + " jumps");
    }
  }
  return tr;
}

const StateVec& trajectoryStateAt(const Trajectory& tr, double t) {
  auto it = std::upper_bound(tr.times.begin(), tr.times.end(), t);
  size_t idx = static_cast<size_t>(it - tr.times.begin());
  if (idx == 0) return tr.states.front();
  return tr.states[idx - 1];
}

}  // namespace srn
