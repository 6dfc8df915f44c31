#pragma once

#include <map>
#include <string>
#include <vector>

#include "autfn/graph.hpp"
#include "autfn/morphism.hpp"

namespace autfn {

inline constexpr const char* kGeneratorVersion = "autfn-enum-1";

/// Isomorphism classes of connected graphs with first Betti number `rank`
/// and `leaves` labelled leaves, every other vertex of valence >= 3.
struct Catalog {
  int rank = 0;
  int leaves = 0;
  /// Canonical representatives sorted by canonical hex string.
  std::vector<AbstractGraph> graphs;
  std::string version = kGeneratorVersion;
  /// internal vertex count -> number of classes
  std::map<int, int> counts_by_internal_vertices;

  int size() const { return static_cast<int>(graphs.size()); }
};

/// Upper bound on the number of internal (non-leaf) vertices.
int max_internal_vertices(int rank, int leaves);

/// rank + leaves < 2: no graph qualifies and no spine is built.
bool excluded_range(int rank, int leaves);

/// Complete, duplicate-free catalog; empty in the excluded range. Throws
/// std::invalid_argument for negative input. The result does not depend on
/// `workers`.
Catalog enumerate_graphs(int rank, int leaves, int workers = 1);

/// Candidate forest edges: non-loop edges with no leaf endpoint.
std::vector<int> forest_candidate_edges(const AbstractGraph& g);

/// All nonempty forests, ordered by size then lexicographically.
std::vector<Forest> enumerate_forests(const AbstractGraph& g);

/// All strictly nested chains of nonempty forests of length 1..max_len,
/// ordered by length then by the forests lexicographically.
std::vector<ForestChain> enumerate_forest_chains(const AbstractGraph& g, int max_len);

}  // namespace autfn
