#pragma once

#include "srn/network.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <vector>

namespace srn {

using Rational = boost::multiprecision::cpp_rational;

enum class ConservationKind { Conservative, SubConservative, Neither };

/// Result of the exact linear-feasibility search for a positive vector c with
/// <c, y'-y> = 0 (conservative) or <= 0 (sub-conservative) for all reactions.
struct ConservationResult {
  ConservationKind kind = ConservationKind::Neither;
  /// Strictly positive witness (empty for Neither); exact rationals.
  std::vector<Rational> witness;
  /// Farkas certificate for Neither, one multiplier per reaction in order:
  /// y >= 0, sum_r y_r (y'_r - y_r) >= 0 componentwise, with some entry of the
  /// combination strictly positive on a coordinate forced upward.
  std::vector<Rational> certificate;

  std::vector<double> witnessDouble() const;
};

ConservationResult conservationClass(const ReactionNetwork& net);

/// Exact check that a candidate c > 0 satisfies the defining (in)equalities.
bool verifyConservationWitness(const ReactionNetwork& net, ConservationKind kind,
                               const std::vector<Rational>& c);

}  // namespace srn
