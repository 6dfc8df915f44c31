#pragma once

#include <string>
#include <vector>

#include "autfn/graph.hpp"

namespace autfn {

/// A set map between abstract graphs; cellular when it commutes with sigma
/// and t.
struct CellularMap {
  AbstractGraph domain;
  AbstractGraph codomain;
  std::vector<Element> f;

  bool operator==(const CellularMap&) const = default;
};

CellularMap identity_map(const AbstractGraph& g);
bool is_cellular(const CellularMap& m);

enum class EpiFailure {
  none,
  not_cellular,
  half_edge_preimage,
  vertex_preimage_not_tree,
  leaf_violation,
};

std::string to_string(EpiFailure f);

struct EpiCheck {
  EpiFailure reason = EpiFailure::none;
  /// Codomain element where the check failed, -1 when not applicable.
  Element witness = -1;

  bool ok() const { return reason == EpiFailure::none; }
  explicit operator bool() const { return ok(); }
};

/// Graph epimorphism: every half-edge of the codomain has exactly one
/// half-edge preimage, every vertex preimage is a tree, a tree with at least
/// one edge contains no leaf, and labelled leaves go to equally labelled
/// leaves.
EpiCheck is_graph_epimorphism(const CellularMap& m);

/// Edge ids (see AbstractGraph::edges) forming a forest. Sorted.
struct Forest {
  std::vector<int> edges;

  bool empty() const { return edges.empty(); }
  int size() const { return static_cast<int>(edges.size()); }
  bool operator==(const Forest&) const = default;
  auto operator<=>(const Forest&) const = default;
};

enum class ForestError { none, bad_edge_id, loop, leaf_edge, cycle };
std::string to_string(ForestError e);

/// Checks the forest invariants: no loops, no edge touching a leaf, no cycle.
ForestError check_forest(const AbstractGraph& g, const Forest& f);

bool is_subforest(const Forest& a, const Forest& b);

/// Strictly nested nonempty forests F1 < F2 < ... < Fk of one host graph.
struct ForestChain {
  std::vector<Forest> levels;

  int length() const { return static_cast<int>(levels.size()); }
  bool operator==(const ForestChain&) const = default;
};

bool is_valid_chain(const AbstractGraph& g, const ForestChain& c);

/// Per-edge level: least i (1-based) with the edge in F_i, 0 when in none.
std::vector<int> chain_levels(const AbstractGraph& g, const ForestChain& c);
ForestChain chain_from_levels(const std::vector<int>& levels);

struct Collapse {
  AbstractGraph quotient;
  CellularMap map;
};

/// Collapses each tree of the forest to a single vertex. The quotient keeps
/// the surviving elements in their original order; a collapsed tree becomes
/// its smallest vertex. Throws std::invalid_argument for an invalid forest.
Collapse collapse_forest(const AbstractGraph& g, const Forest& f);

/// Image of a forest of the domain under an epimorphism: edges whose
/// half-edges survive, as edge ids of the codomain.
Forest image_forest(const CellularMap& m, const Forest& f);

/// b after a. Requires a.codomain == b.domain; throws std::invalid_argument.
CellularMap compose(const CellularMap& a, const CellularMap& b);

struct Factorization {
  std::vector<CellularMap> collapses;
  CellularMap isomorphism;
};

/// Writes an epimorphism as elementary collapses (one edge each, in edge id
/// order of the original forest) followed by an isomorphism.
Factorization factor_as_collapses(const CellularMap& m);

/// Composes a factorization back into a single map.
CellularMap compose_all(const Factorization& fac);

}  // namespace autfn
