#include "srn/parser.hpp"

#include <cctype>
#include <cmath>
#include <map>
#include <sstream>

namespace srn {

namespace {

struct Cursor {
  const std::string& s;
  int line;
  size_t pos = 0;

  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError(msg, line, static_cast<int>(pos) + 1);
  }
  void skipSpace() {
    while (pos < s.size() && (s[pos] == ' ' || s[pos] == '\t')) ++pos;
  }
  bool done() {
    skipSpace();
    return pos >= s.size();
  }
  bool consume(const std::string& tok) {
    skipSpace();
    if (s.compare(pos, tok.size(), tok) == 0) {
      pos += tok.size();
      return true;
    }
    return false;
  }
  bool peek(char c) {
    skipSpace();
    return pos < s.size() && s[pos] == c;
  }
  std::string identifier() {
    skipSpace();
    size_t start = pos;
    if (pos < s.size() && (std::isalpha(static_cast<unsigned char>(s[pos])) || s[pos] == '_')) {
      ++pos;
      while (pos < s.size() &&
             (std::isalnum(static_cast<unsigned char>(s[pos])) || s[pos] == '_')) {
        ++pos;
      }
    }
    if (pos == start) fail("expected identifier");
    return s.substr(start, pos - start);
  }
  double number() {
    skipSpace();
    size_t start = pos;
    while (pos < s.size() && (std::isdigit(static_cast<unsigned char>(s[pos])) ||
                              s[pos] == '.' || s[pos] == 'e' || s[pos] == 'E' ||
                              s[pos] == '+' || s[pos] == '-')) {
      ++pos;
    }
    if (pos == start) fail("expected number");
    try {
      size_t used = 0;
      double v = std::stod(s.substr(start, pos - start), &used);
      if (used != pos - start) fail("malformed number");
      return v;
    } catch (const std::exception&) {
      fail("malformed number");
    }
  }
};

struct Term {
  int coeff;
  std::string name;
};

std::vector<Term> parseComplex(Cursor& c) {
  std::vector<Term> terms;
  c.skipSpace();
  if (c.peek('0')) {
    ++c.pos;
    return terms;  // empty complex
  }
  while (true) {
    c.skipSpace();
    int coeff = 1;
    if (c.pos < c.s.size() && std::isdigit(static_cast<unsigned char>(c.s[c.pos]))) {
      size_t start = c.pos;
      while (c.pos < c.s.size() && std::isdigit(static_cast<unsigned char>(c.s[c.pos]))) ++c.pos;
      coeff = std::stoi(c.s.substr(start, c.pos - start));
      if (coeff <= 0) c.fail("stoichiometric coefficient must be positive");
      if (!c.consume("*")) c.fail("expected '*' after coefficient");
    }
    terms.push_back({coeff, c.identifier()});
    if (!c.consume("+")) break;
  }
  return terms;
}

double parseRate(Cursor& c, const std::unordered_map<std::string, double>& params) {
  c.skipSpace();
  if (c.pos < c.s.size() && (std::isalpha(static_cast<unsigned char>(c.s[c.pos])) ||
                             c.s[c.pos] == '_')) {
    std::string name = c.identifier();
    auto it = params.find(name);
    if (it == params.end()) c.fail("unbound rate parameter: " + name);
    return it->second;
  }
  return c.number();
}

}  // namespace

ReactionNetwork parseNetwork(const std::string& text) {
  ReactionNetwork net;
  struct PendingReaction {
    std::vector<Term> reactant, product;
    double rate;
    bool fast;
    int line;
  };
  std::vector<PendingReaction> pending;

  std::istringstream in(text);
  std::string rawLine;
  int lineNo = 0;
  while (std::getline(in, rawLine)) {
    ++lineNo;
    if (auto hash = rawLine.find('#'); hash != std::string::npos) {
      rawLine.erase(hash);
    }
    Cursor c{rawLine, lineNo};
    if (c.done()) continue;

    if (c.consume("param")) {
      std::string name = c.identifier();
      if (!c.consume("=")) c.fail("expected '=' in param binding");
      double v = c.number();
      if (!(v > 0.0)) c.fail("rate parameter must be positive: " + name);
      if (!net.params.emplace(name, v).second) c.fail("parameter bound twice: " + name);
      if (!c.done()) c.fail("trailing input after param binding");
      continue;
    }

    std::vector<Term> lhs = parseComplex(c);
    bool reversible = false;
    if (c.consume("<->")) {
      reversible = true;
    } else if (!c.consume("->")) {
      c.fail("expected '->' or '<->'");
    }
    std::vector<Term> rhs = parseComplex(c);
    if (!c.consume("@")) c.fail("expected '@' before rate");
    double kf = parseRate(c, net.params);
    double kr = 0.0;
    if (reversible) {
      if (!c.consume(",")) c.fail("reversible reaction needs two rates '@ kf, kr'");
      kr = parseRate(c, net.params);
    }
    bool fast = c.consume("fast");
    if (!c.done()) c.fail("trailing input after reaction");
    if (!(kf > 0.0) || (reversible && !(kr > 0.0))) {
      throw ParseError("rate constant must be positive", lineNo, 1);
    }
    pending.push_back({lhs, rhs, kf, fast, lineNo});
    if (reversible) pending.push_back({rhs, lhs, kr, fast, lineNo});
  }

  // Species in order of first appearance.
  for (const auto& p : pending) {
    for (const auto& t : p.reactant) net.species.addIfAbsent(t.name);
    for (const auto& t : p.product) net.species.addIfAbsent(t.name);
  }
  int n = net.dim();
  auto toVec = [&](const std::vector<Term>& terms, int line) {
    StateVec v = StateVec::Zero(n);
    for (const auto& t : terms) {
      int i = net.species.indexOf(t.name);
      if (v[i] != 0) throw ParseError("species repeated in a complex: " + t.name, line, 1);
      v[i] = t.coeff;
    }
    return v;
  };
  int id = 0;
  for (const auto& p : pending) {
    Reaction r;
    r.id = ++id;
    r.reactant = toVec(p.reactant, p.line);
    r.product = toVec(p.product, p.line);
    r.rate = RateLaw::massAction(p.rate);
    if (r.reactant == r.product) {
      throw ParseError("reactant equals product", p.line, 1);
    }
    for (const auto& q : net.reactions) {
      if (q.reactant == r.reactant && q.product == r.product) {
        throw ParseError("duplicate reaction (same reactant and product as r" +
                             std::to_string(q.id) + ")",
                         p.line, 1);
      }
    }
    if (p.fast) net.fastSet.push_back(r.id);
    net.reactions.push_back(std::move(r));
  }
  net.validate();
  return net;
}

std::string renderNetwork(const ReactionNetwork& net) {
  std::ostringstream os;
  os.precision(17);
  for (const auto& r : net.reactions) {
    os << formatComplex(net.species, r.reactant) << " -> "
       << formatComplex(net.species, r.product) << " @ " << r.rate.kappa();
    if (net.isFast(r.id)) os << " fast";
    os << "\n";
  }
  return os.str();
}

bool sameNetwork(const ReactionNetwork& a, const ReactionNetwork& b) {
  if (a.species.names() != b.species.names()) return false;
  if (a.reactions.size() != b.reactions.size()) return false;
  for (size_t i = 0; i < a.reactions.size(); ++i) {
    const auto& ra = a.reactions[i];
    const auto& rb = b.reactions[i];
    if (ra.id != rb.id || ra.reactant != rb.reactant || ra.product != rb.product) return false;
    if (ra.rate.kind() != rb.rate.kind()) return false;
    if (ra.rate.kind() == RateLaw::Kind::MassAction && ra.rate.kappa() != rb.rate.kappa()) {
      return false;
    }
  }
  auto fa = a.fastSet, fb = b.fastSet;
  std::sort(fa.begin(), fa.end());
  std::sort(fb.begin(), fb.end());
  return fa == fb;
}

}  // namespace srn
