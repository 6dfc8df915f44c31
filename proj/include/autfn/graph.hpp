#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

namespace autfn {

using Element = int;

/// A finite abstract graph: a set {0, ..., m-1} with an involution sigma and
/// a retraction t onto the fixed points of sigma. Fixed points are vertices,
/// the other elements are half-edges, and t sends a half-edge to the vertex it
/// is attached to. Leaves (valence-1 vertices) carry labels 1..s.
struct AbstractGraph {
  std::vector<Element> sigma;
  std::vector<Element> t;
  std::map<Element, int> leaf_labels;

  int size() const { return static_cast<int>(sigma.size()); }
  bool is_vertex(Element x) const { return sigma[x] == x; }
  bool is_half_edge(Element x) const { return sigma[x] != x; }
  bool is_loop(Element h) const { return t[h] == t[sigma[h]]; }

  std::vector<Element> vertices() const;
  std::vector<Element> half_edges() const;
  /// Edge representatives min(h, sigma h) in ascending order. The position in
  /// this list is the edge id used by forests.
  std::vector<Element> edges() const;
  /// half-edge -> edge id, -1 for vertices.
  std::vector<int> edge_ids() const;
  /// Endpoint vertices of edge `e` (by id), first at the representative.
  std::pair<Element, Element> endpoints(Element representative) const {
    return {t[representative], t[sigma[representative]]};
  }
  int valence(Element v) const;
  bool is_leaf(Element v) const { return is_vertex(v) && valence(v) == 1; }
  /// Half-edges attached to each vertex, indexed by element id.
  std::vector<std::vector<Element>> incidence() const;

  bool operator==(const AbstractGraph&) const = default;
};

struct GraphInvariants {
  int num_vertices = 0;
  int num_edges = 0;
  int num_components = 0;
  int betti = 0;
  int leaf_count = 0;
};

enum class Violation {
  // structural
  sigma_out_of_range,
  sigma_not_involution,
  t_out_of_range,
  t_not_onto_fixed_points,
  t_moves_vertex,
  // combinatorial
  valence_zero,
  valence_two,
  unlabelled_leaf,
  label_on_non_leaf,
  label_out_of_range,
  duplicate_label,
  disconnected,
};

std::string to_string(Violation v);

struct ValidationIssue {
  Violation kind;
  Element element = -1;

  bool structural() const;
};

struct ValidationReport {
  std::vector<ValidationIssue> issues;

  bool ok() const { return issues.empty(); }
  bool structurally_sound() const;
  bool has(Violation v) const;
  std::string summary() const;
};

/// Checks every graph invariant. Structural problems (sigma or t malformed)
/// stop the check early since valences are meaningless without them.
ValidationReport validate(const AbstractGraph& g);

/// Like validate() but connectivity is not required.
ValidationReport validate_local(const AbstractGraph& g);

GraphInvariants invariants(const AbstractGraph& g);

/// True iff the edges (by id) span a nonempty connected subgraph with b1 = 0.
bool subgraph_is_tree(const AbstractGraph& g, const std::set<int>& edge_ids);

/// Builds a graph from a vertex/edge list. Vertices get ids 0..V-1, edge k
/// gets half-edges V+2k (at first endpoint) and V+2k+1 (at second endpoint).
/// `labels` maps vertex index -> leaf label.
AbstractGraph from_edge_list(int num_vertices,
                             const std::vector<std::pair<int, int>>& edges,
                             const std::map<int, int>& labels = {});

// A few named graphs used throughout the tests and docs.
AbstractGraph make_rose(int loops);
AbstractGraph make_theta();
AbstractGraph make_dumbbell();
AbstractGraph make_labelled_edge();

}  // namespace autfn
