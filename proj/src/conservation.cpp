#include "srn/conservation.hpp"

#include <vector>

namespace srn {

namespace {

// Phase-I simplex with Bland's rule in exact rational arithmetic.
// Rows: A x (+ slack) = b with x >= 0, b normalized nonnegative; artificial
// variables start in the basis and are driven to zero when feasible.
struct Simplex {
  int rows, nx, nslack;
  std::vector<std::vector<Rational>> T;  // rows x (nx+nslack+rows+1), last col = rhs
  std::vector<Rational> obj;             // reduced-cost row (phase-I)
  std::vector<int> basis;

  int totalCols() const { return nx + nslack + rows; }

  Simplex(const std::vector<std::vector<Rational>>& A, std::vector<Rational> b, int numSlack)
      : rows(static_cast<int>(A.size())), nx(A.empty() ? 0 : static_cast<int>(A[0].size())),
        nslack(numSlack) {
    T.assign(rows, std::vector<Rational>(totalCols() + 1, Rational(0)));
    basis.assign(rows, -1);
    for (int r = 0; r < rows; ++r) {
      for (int j = 0; j < nx + nslack; ++j) T[r][j] = A[r].size() > static_cast<size_t>(j)
                                                          ? A[r][j]
                                                          : Rational(0);
      T[r][nx + nslack + r] = 1;  // artificial
      T[r][totalCols()] = b[r];
      basis[r] = nx + nslack + r;
    }
    // Phase-I objective: minimize sum of artificials; reduced costs start as
    // -(sum of rows) on structural columns.
    obj.assign(totalCols() + 1, Rational(0));
    for (int r = 0; r < rows; ++r) {
      for (int j = 0; j <= totalCols(); ++j) obj[j] -= T[r][j];
    }
    for (int r = 0; r < rows; ++r) obj[nx + nslack + r] = 0;
  }

  void pivot(int pr, int pc) {
    Rational piv = T[pr][pc];
    for (int j = 0; j <= totalCols(); ++j) T[pr][j] /= piv;
    for (int r = 0; r < rows; ++r) {
      if (r == pr || T[r][pc] == 0) continue;
      Rational f = T[r][pc];
      for (int j = 0; j <= totalCols(); ++j) T[r][j] -= f * T[pr][j];
    }
    if (obj[pc] != 0) {
      Rational f = obj[pc];
      for (int j = 0; j <= totalCols(); ++j) obj[j] -= f * T[pr][j];
    }
    basis[pr] = pc;
  }

  // Returns true when the phase-I optimum is zero (feasible).
  bool run() {
    while (true) {
      int pc = -1;
      for (int j = 0; j < totalCols(); ++j) {
        if (obj[j] < 0) {
          pc = j;
          break;  // Bland: lowest index
        }
      }
      if (pc < 0) break;
      int pr = -1;
      Rational best;
      for (int r = 0; r < rows; ++r) {
        if (T[r][pc] <= 0) continue;
        Rational ratio = T[r][totalCols()] / T[r][pc];
        if (pr < 0 || ratio < best || (ratio == best && basis[r] < basis[pr])) {
          pr = r;
          best = ratio;
        }
      }
      if (pr < 0) throw NumericalError("phase-I simplex unbounded");
      pivot(pr, pc);
    }
    return -obj[totalCols()] == 0;
  }

  std::vector<Rational> solution() const {
    std::vector<Rational> x(nx, Rational(0));
    for (int r = 0; r < rows; ++r) {
      if (basis[r] < nx) x[basis[r]] = T[r][totalCols()];
    }
    return x;
  }

  // Phase-I dual values, one per row: y_r = 1 - redcost(artificial_r).
  std::vector<Rational> duals() const {
    std::vector<Rational> y(rows);
    for (int r = 0; r < rows; ++r) y[r] = Rational(1) + obj[nx + nslack + r];
    return y;
  }
};

// Feasibility of <c, xi_r> (= 0 | <= 0) for all r with c >= 1, via x = c - 1 >= 0.
// withSlack selects the sub-conservative (<=) variant.
struct FeasibilityOutcome {
  bool feasible;
  std::vector<Rational> c;
  std::vector<Rational> farkas;  // in original row orientation
};

FeasibilityOutcome solveFeasibility(const ReactionNetwork& net, bool withSlack) {
  int n = net.dim();
  int m = static_cast<int>(net.reactions.size());
  std::vector<std::vector<Rational>> A(m, std::vector<Rational>(n + (withSlack ? m : 0)));
  std::vector<Rational> b(m);
  std::vector<Rational> rowSign(m, Rational(1));
  for (int r = 0; r < m; ++r) {
    StateVec xi = net.reactions[r].jump();
    Rational rhs = 0;
    for (int i = 0; i < n; ++i) rhs -= xi[i];  // b_r = -<1, xi_r>
    Rational sign = (rhs < 0) ? Rational(-1) : Rational(1);
    rowSign[r] = sign;
    for (int i = 0; i < n; ++i) A[r][i] = sign * Rational(xi[i]);
    if (withSlack) A[r][n + r] = sign;  // slack becomes surplus on negated rows
    b[r] = sign * rhs;
  }
  Simplex sx(A, b, withSlack ? m : 0);
  FeasibilityOutcome out;
  out.feasible = sx.run();
  if (out.feasible) {
    auto x = sx.solution();
    out.c.assign(n, Rational(1));
    for (int i = 0; i < n; ++i) out.c[i] += x[i];
  } else {
    auto y = sx.duals();
    out.farkas.resize(m);
    // Certificate in original orientation: multipliers y'_r = sign_r * y_r
    // satisfy sum_r y'_r xi_r >= 0 componentwise with <y', b_orig> < 0.
    for (int r = 0; r < m; ++r) out.farkas[r] = -rowSign[r] * y[r];
  }
  return out;
}

}  // namespace

std::vector<double> ConservationResult::witnessDouble() const {
  std::vector<double> v;
  v.reserve(witness.size());
  for (const auto& q : witness) v.push_back(static_cast<double>(q));
  return v;
}

ConservationResult conservationClass(const ReactionNetwork& net) {
  ConservationResult res;
  if (net.reactions.empty()) {
    res.kind = ConservationKind::Conservative;
    res.witness.assign(net.dim(), Rational(1));
    return res;
  }
  auto eq = solveFeasibility(net, false);
  if (eq.feasible) {
    res.kind = ConservationKind::Conservative;
    res.witness = std::move(eq.c);
    return res;
  }
  auto le = solveFeasibility(net, true);
  if (le.feasible) {
    res.kind = ConservationKind::SubConservative;
    res.witness = std::move(le.c);
    return res;
  }
  res.kind = ConservationKind::Neither;
  res.certificate = std::move(le.farkas);
  return res;
}

bool verifyConservationWitness(const ReactionNetwork& net, ConservationKind kind,
                               const std::vector<Rational>& c) {
  if (static_cast<int>(c.size()) != net.dim()) return false;
  for (const auto& q : c) {
    if (q <= 0) return false;
  }
  for (const auto& r : net.reactions) {
    StateVec xi = r.jump();
    Rational dot = 0;
    for (int i = 0; i < net.dim(); ++i) dot += c[i] * Rational(xi[i]);
    if (kind == ConservationKind::Conservative && dot != 0) return false;
    if (kind == ConservationKind::SubConservative && dot > 0) return false;
  }
  return true;
}

}  // namespace srn
