#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace srn {

/// Molecule-count vector over the species of a network.
using StateVec = Eigen::VectorXi;

/// Errors carry the CLI exit-code contract: 1 parse/config, 2 structural, 3 numerical.
struct ParseError : std::runtime_error {
  int line = 0, column = 0;
  ParseError(const std::string& msg, int l = 0, int c = 0)
      : std::runtime_error(msg), line(l), column(c) {}
};
struct StructuralError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct StateHash {
  std::size_t operator()(const StateVec& v) const noexcept {
    std::size_t h = 0x9e3779b97f4a7c15ull ^ static_cast<std::size_t>(v.size());
    for (Eigen::Index i = 0; i < v.size(); ++i) {
      std::size_t x = static_cast<std::size_t>(static_cast<std::uint32_t>(v[i]));
      x *= 0xff51afd7ed558ccdull;
      x ^= x >> 33;
      h = (h ^ x) * 0xc4ceb9fe1a85ec53ull;
    }
    return h;
  }
};
struct StateEq {
  bool operator()(const StateVec& a, const StateVec& b) const noexcept {
    return a.size() == b.size() && a == b;
  }
};

inline bool lexLess(const StateVec& a, const StateVec& b) {
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    if (a[i] != b[i]) return a[i] < b[i];
  }
  return false;
}

/// Ordered species identifiers; indices into StateVec coordinates.
class SpeciesSet {
 public:
  SpeciesSet() = default;
  explicit SpeciesSet(std::vector<std::string> names);

  int size() const { return static_cast<int>(names_.size()); }
  const std::string& name(int i) const { return names_.at(i); }
  const std::vector<std::string>& names() const { return names_; }
  int indexOf(const std::string& name) const;           // -1 if absent
  int require(const std::string& name) const;           // throws StructuralError
  int addIfAbsent(const std::string& name);

 private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, int> index_;
};

/// Core / non-interacting split of a species set. Coordinates keep the
/// network's species order; projections are coordinate slices.
struct SpeciesPartition {
  std::vector<int> core;  // indices of core species, in species order
  std::vector<int> u;     // indices of non-interacting species, in species order
  std::vector<int> uPos;  // species index -> position in `u`, or -1

  int coreDim() const { return static_cast<int>(core.size()); }
  int uDim() const { return static_cast<int>(u.size()); }

  StateVec projectCore(const StateVec& x) const;
  StateVec projectU(const StateVec& x) const;
  /// Embed a core vector as a full state with zero non-interacting counts.
  StateVec embedCore(const StateVec& z, int fullDim) const;
  bool inN0(const StateVec& x) const;  // no molecules of non-interacting species
  int uCount(const StateVec& x) const;
  /// Position in `u` of the single non-interacting species in x (requires uCount==1).
  int soleUSpecies(const StateVec& x) const;
};

/// Transition intensity of one reaction. Mass-action is the common case;
/// tabulated laws support arbitrary intensities, and a time modulator turns
/// either into a time-dependent intensity.
class RateLaw {
 public:
  enum class Kind { MassAction, Tabulated, TimeModulated };

  static RateLaw massAction(double kappa);
  static RateLaw tabulated(std::function<double(const StateVec&)> fn,
                           std::string label = "tabulated");
  static RateLaw timeModulated(RateLaw base, std::function<double(double)> modulator,
                               double derivLipschitz, std::string label = "modulated");

  Kind kind() const { return kind_; }
  bool timeDependent() const { return kind_ == Kind::TimeModulated; }
  double kappa() const;  // mass-action only
  const std::string& label() const { return label_; }
  double derivLipschitz() const { return derivLipschitz_; }

  /// lambda_r(t, x); `reactant` is the reaction's reactant complex.
  double eval(const StateVec& x, const StateVec& reactant, double t) const;

 private:
  Kind kind_ = Kind::MassAction;
  double kappa_ = 0.0;
  std::function<double(const StateVec&)> table_;
  std::shared_ptr<RateLaw> base_;
  std::function<double(double)> modulator_;
  double derivLipschitz_ = 0.0;
  std::string label_;
};

/// kappa * x! / (x - y)! for x >= y, else 0.
double massActionIntensity(double kappa, const StateVec& reactant, const StateVec& x);

struct Reaction {
  int id = 0;            // 1-based, unique
  StateVec reactant;     // complex y
  StateVec product;      // complex y'
  RateLaw rate;
  bool trivialAllowed = false;  // y == y' permitted only for reduced networks

  StateVec jump() const { return product - reactant; }
};

class ReactionNetwork {
 public:
  SpeciesSet species;
  std::vector<Reaction> reactions;
  std::vector<int> fastSet;  // reaction ids marked fast
  std::unordered_map<std::string, double> params;  // named rate constants

  int dim() const { return species.size(); }
  const Reaction& reaction(int id) const;  // by 1-based id

  bool isFast(int id) const;
  std::vector<int> fastIds() const { return fastSet; }

  /// Reactions with a non-interacting species in the reactant (R_U) /
  /// in the product (R^U), for a given partition.
  std::vector<int> reactionsConsumingU(const SpeciesPartition& p) const;
  std::vector<int> reactionsCreatingU(const SpeciesPartition& p) const;  // R^U \ R_U

  double intensity(int id, const StateVec& x, double t = 0.0) const;
  /// Total intensity over a reaction-id subset.
  double totalIntensity(const std::vector<int>& ids, const StateVec& x, double t = 0.0) const;
  bool timeDependent() const;

  void validate() const;  // id uniqueness, dimensions, positivity of rate constants
};

/// Partition construction; throws StructuralError if a name is unknown or repeated.
SpeciesPartition makePartition(const ReactionNetwork& net,
                               const std::vector<std::string>& uNames);

struct InteractionWitness {
  int reactionId = 0;
  bool productSide = false;
  std::string reason;  // "pair" or "coefficient"
  StateVec complex;
};

/// True iff no complex contains two species of U or any U species with
/// coefficient >= 2.
bool isNonInteracting(const ReactionNetwork& net, const std::vector<int>& uIdx,
                      InteractionWitness* witness = nullptr);

/// All maximal non-interacting subsets, as sorted index lists.
std::vector<std::vector<int>> findNonInteractingSets(const ReactionNetwork& net);

/// True iff every species of U appears only as the bare singleton complex.
bool isIntermediateSet(const ReactionNetwork& net, const std::vector<int>& uIdx);

struct CompatibilityEntry {
  int reactionId = 0;
  bool pass = true;
  StateVec witness;     // state violating the equivalence
  std::string detail;
};
struct CompatibilityReport {
  std::vector<CompatibilityEntry> entries;
  bool allPass() const;
};

/// Checks lambda_r(x) > 0 <=> x >= y over a finite state domain.
CompatibilityReport validateCompatibility(const ReactionNetwork& net,
                                          const std::vector<StateVec>& domain,
                                          double t = 0.0);

std::string formatState(const SpeciesSet& sp, const StateVec& x);
std::string formatComplex(const SpeciesSet& sp, const StateVec& c);

}  // namespace srn
