#include "srn/graph.hpp"

#include <algorithm>

namespace srn {

std::vector<int> stronglyConnectedComponents(const std::vector<std::vector<int>>& adj,
                                             int* componentCount) {
  int n = static_cast<int>(adj.size());
  std::vector<int> index(n, -1), low(n, 0), comp(n, -1);
  std::vector<bool> onStack(n, false);
  std::vector<int> stack;
  int next = 0, ncomp = 0;

  // Iterative Tarjan; frame carries the position within the adjacency list.
  struct Frame {
    int v;
    size_t child;
  };
  std::vector<Frame> frames;
  for (int root = 0; root < n; ++root) {
    if (index[root] != -1) continue;
    frames.push_back({root, 0});
    while (!frames.empty()) {
      auto& f = frames.back();
      int v = f.v;
      if (f.child == 0) {
        index[v] = low[v] = next++;
        stack.push_back(v);
        onStack[v] = true;
      }
      bool descended = false;
      while (f.child < adj[v].size()) {
        int w = adj[v][f.child++];
        if (index[w] == -1) {
          frames.push_back({w, 0});
          descended = true;
          break;
        }
        if (onStack[w]) low[v] = std::min(low[v], index[w]);
      }
      if (descended) continue;
      if (low[v] == index[v]) {
        while (true) {
          int w = stack.back();
          stack.pop_back();
          onStack[w] = false;
          comp[w] = ncomp;
          if (w == v) break;
        }
        ++ncomp;
      }
      frames.pop_back();
      if (!frames.empty()) {
        int parent = frames.back().v;
        low[parent] = std::min(low[parent], low[v]);
      }
    }
  }
  if (componentCount) *componentCount = ncomp;
  return comp;
}

ComplexDigraph complexDigraph(const ReactionNetwork& net,
                              const std::vector<int>& reactionIds) {
  ComplexDigraph g;
  std::unordered_map<StateVec, int, StateHash, StateEq> vertexOf;
  auto vertex = [&](const StateVec& c) {
    auto it = vertexOf.find(c);
    if (it != vertexOf.end()) return it->second;
    int v = static_cast<int>(g.complexes.size());
    vertexOf.emplace(c, v);
    g.complexes.push_back(c);
    g.adjacency.emplace_back();
    return v;
  };
  for (int id : reactionIds) {
    const Reaction& r = net.reaction(id);
    int s = vertex(r.reactant);
    int t = vertex(r.product);
    g.edges.emplace_back(s, t);
    g.edgeReaction.push_back(id);
    g.adjacency[s].push_back(t);
  }
  return g;
}

bool isWeaklyReversible(const ReactionNetwork& net, const std::vector<int>& reactionIds) {
  ComplexDigraph g = complexDigraph(net, reactionIds);
  std::vector<int> comp = stronglyConnectedComponents(g.adjacency);
  for (const auto& [s, t] : g.edges) {
    if (comp[s] != comp[t]) return false;
  }
  return true;
}

}  // namespace srn
