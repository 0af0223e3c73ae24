#include "srn/network.hpp"

#include <algorithm>
#include <sstream>

namespace srn {

SpeciesSet::SpeciesSet(std::vector<std::string> names) : names_(std::move(names)) {
  for (int i = 0; i < static_cast<int>(names_.size()); ++i) {
    if (!index_.emplace(names_[i], i).second) {
      throw StructuralError("duplicate species name: " + names_[i]);
    }
  }
}

int SpeciesSet::indexOf(const std::string& name) const {
  auto it = index_.find(name);
  return it == index_.end() ? -1 : it->second;
}

int SpeciesSet::require(const std::string& name) const {
  int i = indexOf(name);
  if (i < 0) throw StructuralError("unknown species: " + name);
  return i;
}

int SpeciesSet::addIfAbsent(const std::string& name) {
  int i = indexOf(name);
  if (i >= 0) return i;
  i = static_cast<int>(names_.size());
  names_.push_back(name);
  index_.emplace(name, i);
  return i;
}

StateVec SpeciesPartition::projectCore(const StateVec& x) const {
  StateVec z(coreDim());
  for (int i = 0; i < coreDim(); ++i) z[i] = x[core[i]];
  return z;
}

StateVec SpeciesPartition::projectU(const StateVec& x) const {
  StateVec v(uDim());
  for (int i = 0; i < uDim(); ++i) v[i] = x[u[i]];
  return v;
}

StateVec SpeciesPartition::embedCore(const StateVec& z, int fullDim) const {
  StateVec x = StateVec::Zero(fullDim);
  for (int i = 0; i < coreDim(); ++i) x[core[i]] = z[i];
  return x;
}

bool SpeciesPartition::inN0(const StateVec& x) const {
  for (int ui : u) {
    if (x[ui] != 0) return false;
  }
  return true;
}

int SpeciesPartition::uCount(const StateVec& x) const {
  int c = 0;
  for (int ui : u) c += x[ui];
  return c;
}

int SpeciesPartition::soleUSpecies(const StateVec& x) const {
  int found = -1;
  for (int i = 0; i < uDim(); ++i) {
    if (x[u[i]] > 0) {
      if (found >= 0 || x[u[i]] > 1) throw StructuralError("state is not in N1");
      found = i;
    }
  }
  if (found < 0) throw StructuralError("state is not in N1");
  return found;
}

RateLaw RateLaw::massAction(double kappa) {
  if (!(kappa > 0.0)) throw StructuralError("rate constant must be positive");
  RateLaw r;
  r.kind_ = Kind::MassAction;
  r.kappa_ = kappa;
  return r;
}

RateLaw RateLaw::tabulated(std::function<double(const StateVec&)> fn, std::string label) {
  RateLaw r;
  r.kind_ = Kind::Tabulated;
  r.table_ = std::move(fn);
  r.label_ = std::move(label);
  return r;
}

RateLaw RateLaw::timeModulated(RateLaw base, std::function<double(double)> modulator,
                               double derivLipschitz, std::string label) {
  RateLaw r;
  r.kind_ = Kind::TimeModulated;
  r.base_ = std::make_shared<RateLaw>(std::move(base));
  r.modulator_ = std::move(modulator);
  r.derivLipschitz_ = derivLipschitz;
  r.label_ = std::move(label);
  return r;
}

double RateLaw::kappa() const {
  if (kind_ != Kind::MassAction) throw StructuralError("rate law has no single rate constant");
  return kappa_;
}

double RateLaw::eval(const StateVec& x, const StateVec& reactant, double t) const {
  switch (kind_) {
    case Kind::MassAction:
      return massActionIntensity(kappa_, reactant, x);
    case Kind::Tabulated:
      return table_(x);
    case Kind::TimeModulated:
      return modulator_(t) * base_->eval(x, reactant, t);
  }
  return 0.0;
}

double massActionIntensity(double kappa, const StateVec& reactant, const StateVec& x) {
  double v = kappa;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    int y = reactant[i];
    if (x[i] < y) return 0.0;
    for (int k = 0; k < y; ++k) v *= static_cast<double>(x[i] - k);
  }
  return v;
}

const Reaction& ReactionNetwork::reaction(int id) const {
  for (const auto& r : reactions) {
    if (r.id == id) return r;
  }
  throw StructuralError("no reaction with id " + std::to_string(id));
}

bool ReactionNetwork::isFast(int id) const {
  return std::find(fastSet.begin(), fastSet.end(), id) != fastSet.end();
}

std::vector<int> ReactionNetwork::reactionsConsumingU(const SpeciesPartition& p) const {
  std::vector<int> out;
  for (const auto& r : reactions) {
    if (p.projectU(r.reactant).sum() != 0) out.push_back(r.id);
  }
  return out;
}

std::vector<int> ReactionNetwork::reactionsCreatingU(const SpeciesPartition& p) const {
  std::vector<int> out;
  for (const auto& r : reactions) {
    if (p.projectU(r.reactant).sum() == 0 && p.projectU(r.product).sum() != 0) {
      out.push_back(r.id);
    }
  }
  return out;
}

double ReactionNetwork::intensity(int id, const StateVec& x, double t) const {
  const Reaction& r = reaction(id);
  return r.rate.eval(x, r.reactant, t);
}

double ReactionNetwork::totalIntensity(const std::vector<int>& ids, const StateVec& x,
                                       double t) const {
  double s = 0.0;
  for (int id : ids) s += intensity(id, x, t);
  return s;
}

bool ReactionNetwork::timeDependent() const {
  for (const auto& r : reactions) {
    if (r.rate.timeDependent()) return true;
  }
  return false;
}

void ReactionNetwork::validate() const {
  std::vector<int> ids;
  for (const auto& r : reactions) {
    if (r.reactant.size() != dim() || r.product.size() != dim()) {
      throw StructuralError("complex dimension mismatch");
    }
    if (r.reactant.minCoeff() < 0 || r.product.minCoeff() < 0) {
      throw StructuralError("negative stoichiometric coefficient");
    }
    if (!r.trivialAllowed && r.reactant == r.product) {
      throw StructuralError("trivial reaction r" + std::to_string(r.id) +
                            " not allowed in a base network");
    }
    ids.push_back(r.id);
  }
  std::sort(ids.begin(), ids.end());
  if (std::adjacent_find(ids.begin(), ids.end()) != ids.end()) {
    throw StructuralError("duplicate reaction id");
  }
  for (int f : fastSet) {
    (void)reaction(f);
  }
}

SpeciesPartition makePartition(const ReactionNetwork& net,
                               const std::vector<std::string>& uNames) {
  SpeciesPartition p;
  std::vector<bool> inU(net.dim(), false);
  for (const auto& name : uNames) {
    int i = net.species.require(name);
    if (inU[i]) throw StructuralError("species listed twice in partition: " + name);
    inU[i] = true;
  }
  p.uPos.assign(net.dim(), -1);
  for (int i = 0; i < net.dim(); ++i) {
    if (inU[i]) {
      p.uPos[i] = static_cast<int>(p.u.size());
      p.u.push_back(i);
    } else {
      p.core.push_back(i);
    }
  }
  return p;
}

bool isNonInteracting(const ReactionNetwork& net, const std::vector<int>& uIdx,
                      InteractionWitness* witness) {
  std::vector<bool> inU(net.dim(), false);
  for (int i : uIdx) inU[i] = true;
  auto checkComplex = [&](const StateVec& c, int rid, bool productSide) {
    int count = 0;
    for (int i = 0; i < net.dim(); ++i) {
      if (!inU[i] || c[i] == 0) continue;
      if (c[i] >= 2) {
        if (witness) *witness = {rid, productSide, "coefficient", c};
        return false;
      }
      ++count;
    }
    if (count >= 2) {
      if (witness) *witness = {rid, productSide, "pair", c};
      return false;
    }
    return true;
  };
  for (const auto& r : net.reactions) {
    if (!checkComplex(r.reactant, r.id, false)) return false;
    if (!checkComplex(r.product, r.id, true)) return false;
  }
  return true;
}

namespace {

// Bron-Kerbosch with pivoting, enumerating maximal independent sets as
// maximal cliques of the complement graph.
void bronKerbosch(const std::vector<std::vector<bool>>& adj, std::vector<int>& R,
                  std::vector<int> P, std::vector<int> X,
                  std::vector<std::vector<int>>& out) {
  if (P.empty() && X.empty()) {
    out.push_back(R);
    return;
  }
  int pivot = P.empty() ? X.front() : P.front();
  std::vector<int> candidates;
  for (int v : P) {
    if (!adj[pivot][v]) candidates.push_back(v);
  }
  for (int v : candidates) {
    std::vector<int> P2, X2;
    for (int w : P) {
      if (adj[v][w]) P2.push_back(w);
    }
    for (int w : X) {
      if (adj[v][w]) X2.push_back(w);
    }
    R.push_back(v);
    bronKerbosch(adj, R, P2, X2, out);
    R.pop_back();
    P.erase(std::find(P.begin(), P.end(), v));
    X.push_back(v);
  }
}

}  // namespace

std::vector<std::vector<int>> findNonInteractingSets(const ReactionNetwork& net) {
  int n = net.dim();
  // Species ever appearing with coefficient >= 2 cannot be non-interacting.
  std::vector<bool> eligible(n, true);
  std::vector<std::vector<bool>> interact(n, std::vector<bool>(n, false));
  auto scan = [&](const StateVec& c) {
    std::vector<int> present;
    for (int i = 0; i < n; ++i) {
      if (c[i] >= 2) eligible[i] = false;
      if (c[i] >= 1) present.push_back(i);
    }
    for (size_t a = 0; a < present.size(); ++a) {
      for (size_t b = a + 1; b < present.size(); ++b) {
        interact[present[a]][present[b]] = interact[present[b]][present[a]] = true;
      }
    }
  };
  for (const auto& r : net.reactions) {
    scan(r.reactant);
    scan(r.product);
  }
  std::vector<int> verts;
  for (int i = 0; i < n; ++i) {
    if (eligible[i]) verts.push_back(i);
  }
  // Complement adjacency restricted to eligible vertices; cliques there are
  // independent sets of the interaction graph.
  std::vector<std::vector<bool>> comp(n, std::vector<bool>(n, false));
  for (int a : verts) {
    for (int b : verts) {
      if (a != b && !interact[a][b]) comp[a][b] = true;
    }
  }
  std::vector<std::vector<int>> out;
  std::vector<int> R;
  bronKerbosch(comp, R, verts, {}, out);
  for (auto& s : out) std::sort(s.begin(), s.end());
  std::sort(out.begin(), out.end());
  return out;
}

bool isIntermediateSet(const ReactionNetwork& net, const std::vector<int>& uIdx) {
  std::vector<bool> inU(net.dim(), false);
  for (int i : uIdx) inU[i] = true;
  auto ok = [&](const StateVec& c) {
    for (int i = 0; i < net.dim(); ++i) {
      if (!inU[i] || c[i] == 0) continue;
      if (c[i] != 1 || c.sum() != 1) return false;
    }
    return true;
  };
  for (const auto& r : net.reactions) {
    if (!ok(r.reactant) || !ok(r.product)) return false;
  }
  return true;
}

bool CompatibilityReport::allPass() const {
  for (const auto& e : entries) {
    if (!e.pass) return false;
  }
  return true;
}

CompatibilityReport validateCompatibility(const ReactionNetwork& net,
                                          const std::vector<StateVec>& domain, double t) {
  CompatibilityReport rep;
  for (const auto& r : net.reactions) {
    CompatibilityEntry e;
    e.reactionId = r.id;
    for (const auto& x : domain) {
      bool covered = (x.array() >= r.reactant.array()).all();
      double lam = r.rate.eval(x, r.reactant, t);
      if ((lam > 0.0) != covered) {
        e.pass = false;
        e.witness = x;
        e.detail = covered ? "zero intensity on covered state" : "positive intensity below reactant";
        break;
      }
    }
    rep.entries.push_back(std::move(e));
  }
  return rep;
}

std::string formatState(const SpeciesSet& sp, const StateVec& x) {
  std::ostringstream os;
  os << "(";
  for (int i = 0; i < sp.size(); ++i) {
    if (i) os << ", ";
    os << sp.name(i) << "=" << x[i];
  }
  os << ")";
  return os.str();
}

std::string formatComplex(const SpeciesSet& sp, const StateVec& c) {
  if (c.sum() == 0) return "0";
  std::ostringstream os;
  bool first = true;
  for (int i = 0; i < sp.size(); ++i) {
    if (c[i] == 0) continue;
    if (!first) os << " + ";
    first = false;
    if (c[i] != 1) os << c[i] << "*";
    os << sp.name(i);
  }
  return os.str();
}

}  // namespace srn
