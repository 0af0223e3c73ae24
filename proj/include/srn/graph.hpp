#pragma once

#include "srn/network.hpp"

#include <vector>

namespace srn {

/// Strongly connected components of a digraph given as adjacency lists.
/// Returns component index per vertex; components are numbered in reverse
/// topological order (an edge u->v across components has comp[u] > comp[v]).
std::vector<int> stronglyConnectedComponents(const std::vector<std::vector<int>>& adj,
                                             int* componentCount = nullptr);

/// Digraph on the distinct complexes touched by a reaction subset.
struct ComplexDigraph {
  std::vector<StateVec> complexes;          // vertex -> complex
  std::vector<std::pair<int, int>> edges;   // (source vertex, target vertex) per reaction
  std::vector<int> edgeReaction;            // reaction id per edge
  std::vector<std::vector<int>> adjacency;  // vertex -> successor vertices
};

ComplexDigraph complexDigraph(const ReactionNetwork& net, const std::vector<int>& reactionIds);

/// Every edge lies within a strongly connected component.
bool isWeaklyReversible(const ReactionNetwork& net, const std::vector<int>& reactionIds);

}  // namespace srn
