#include "autfn/graph.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

namespace autfn {

namespace {

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  }
  bool unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    parent[std::max(a, b)] = std::min(a, b);
    return true;
  }
};

}  // namespace

std::vector<Element> AbstractGraph::vertices() const {
  std::vector<Element> out;
  for (Element x = 0; x < size(); ++x)
    if (is_vertex(x)) out.push_back(x);
  return out;
}

std::vector<Element> AbstractGraph::half_edges() const {
  std::vector<Element> out;
  for (Element x = 0; x < size(); ++x)
    if (is_half_edge(x)) out.push_back(x);
  return out;
}

std::vector<Element> AbstractGraph::edges() const {
  std::vector<Element> out;
  for (Element x = 0; x < size(); ++x)
    if (is_half_edge(x) && x < sigma[x]) out.push_back(x);
  return out;
}

std::vector<int> AbstractGraph::edge_ids() const {
  std::vector<int> ids(size(), -1);
  int next = 0;
  for (Element x = 0; x < size(); ++x)
    if (is_half_edge(x) && x < sigma[x]) {
      ids[x] = next;
      ids[sigma[x]] = next;
      ++next;
    }
  return ids;
}

int AbstractGraph::valence(Element v) const {
  int count = 0;
  for (Element x = 0; x < size(); ++x)
    if (x != v && t[x] == v) ++count;
  return count;
}

std::vector<std::vector<Element>> AbstractGraph::incidence() const {
  std::vector<std::vector<Element>> inc(size());
  for (Element x = 0; x < size(); ++x)
    if (is_half_edge(x)) inc[t[x]].push_back(x);
  return inc;
}

std::string to_string(Violation v) {
  switch (v) {
    case Violation::sigma_out_of_range: return "sigma_out_of_range";
    case Violation::sigma_not_involution: return "sigma_not_involution";
    case Violation::t_out_of_range: return "t_out_of_range";
    case Violation::t_not_onto_fixed_points: return "t_not_onto_fixed_points";
    case Violation::t_moves_vertex: return "t_moves_vertex";
    case Violation::valence_zero: return "valence_zero";
    case Violation::valence_two: return "valence_two";
    case Violation::unlabelled_leaf: return "unlabelled_leaf";
    case Violation::label_on_non_leaf: return "label_on_non_leaf";
    case Violation::label_out_of_range: return "label_out_of_range";
    case Violation::duplicate_label: return "duplicate_label";
    case Violation::disconnected: return "disconnected";
  }
  return "unknown";
}

bool ValidationIssue::structural() const {
  switch (kind) {
    case Violation::sigma_out_of_range:
    case Violation::sigma_not_involution:
    case Violation::t_out_of_range:
    case Violation::t_not_onto_fixed_points:
    case Violation::t_moves_vertex:
      return true;
    default:
      return false;
  }
}

bool ValidationReport::structurally_sound() const {
  return std::none_of(issues.begin(), issues.end(),
                      [](const ValidationIssue& i) { return i.structural(); });
}

bool ValidationReport::has(Violation v) const {
  return std::any_of(issues.begin(), issues.end(),
                     [v](const ValidationIssue& i) { return i.kind == v; });
}

std::string ValidationReport::summary() const {
  if (ok()) return "ok";
  std::ostringstream os;
  for (std::size_t i = 0; i < issues.size(); ++i) {
    if (i) os << "; ";
    os << to_string(issues[i].kind);
    if (issues[i].element >= 0) os << " at " << issues[i].element;
  }
  return os.str();
}

namespace {

ValidationReport validate_impl(const AbstractGraph& g, bool require_connected) {
  ValidationReport report;
  auto add = [&](Violation v, Element x) { report.issues.push_back({v, x}); };
  const int m = g.size();

  if (static_cast<int>(g.t.size()) != m) {
    add(Violation::t_out_of_range, -1);
    return report;
  }
  for (Element x = 0; x < m; ++x) {
    if (g.sigma[x] < 0 || g.sigma[x] >= m) add(Violation::sigma_out_of_range, x);
    if (g.t[x] < 0 || g.t[x] >= m) add(Violation::t_out_of_range, x);
  }
  if (!report.ok()) return report;
  for (Element x = 0; x < m; ++x) {
    if (g.sigma[g.sigma[x]] != x) add(Violation::sigma_not_involution, x);
    const Element v = g.t[x];
    if (g.sigma[v] != v) add(Violation::t_not_onto_fixed_points, x);
    if (g.sigma[x] == x && v != x) add(Violation::t_moves_vertex, x);
  }
  if (!report.ok()) return report;

  std::vector<int> valence(m, 0);
  for (Element x = 0; x < m; ++x)
    if (g.is_half_edge(x)) ++valence[g.t[x]];

  int leaves = 0;
  for (Element x = 0; x < m; ++x) {
    if (!g.is_vertex(x)) continue;
    if (valence[x] == 0) add(Violation::valence_zero, x);
    if (valence[x] == 2) add(Violation::valence_two, x);
    if (valence[x] == 1) {
      ++leaves;
      if (!g.leaf_labels.contains(x)) add(Violation::unlabelled_leaf, x);
    }
  }
  std::set<int> seen;
  for (const auto& [v, label] : g.leaf_labels) {
    if (v < 0 || v >= m || !g.is_vertex(v) || valence[v] != 1) {
      add(Violation::label_on_non_leaf, v);
      continue;
    }
    if (label < 1 || label > leaves) add(Violation::label_out_of_range, v);
    if (!seen.insert(label).second) add(Violation::duplicate_label, v);
  }

  if (require_connected && m > 0) {
    UnionFind uf(m);
    for (Element x = 0; x < m; ++x) {
      uf.unite(x, g.t[x]);
      uf.unite(x, g.sigma[x]);
    }
    for (Element x = 1; x < m; ++x)
      if (uf.find(x) != uf.find(0)) {
        add(Violation::disconnected, x);
        break;
      }
  }
  return report;
}

}  // namespace

ValidationReport validate(const AbstractGraph& g) { return validate_impl(g, true); }

ValidationReport validate_local(const AbstractGraph& g) { return validate_impl(g, false); }

GraphInvariants invariants(const AbstractGraph& g) {
  GraphInvariants inv;
  const int m = g.size();
  UnionFind uf(m);
  for (Element x = 0; x < m; ++x) {
    if (g.is_vertex(x)) {
      ++inv.num_vertices;
      if (g.valence(x) == 1) ++inv.leaf_count;
    } else {
      if (x < g.sigma[x]) ++inv.num_edges;
      uf.unite(x, g.t[x]);
      uf.unite(x, g.sigma[x]);
    }
  }
  for (Element x = 0; x < m; ++x)
    if (g.is_vertex(x) && uf.find(x) == x) ++inv.num_components;
  inv.betti = inv.num_edges - inv.num_vertices + inv.num_components;
  return inv;
}

bool subgraph_is_tree(const AbstractGraph& g, const std::set<int>& edge_ids) {
  if (edge_ids.empty()) return false;
  const auto reps = g.edges();
  UnionFind uf(g.size());
  std::set<Element> touched;
  for (int id : edge_ids) {
    const auto [a, b] = g.endpoints(reps.at(id));
    touched.insert(a);
    touched.insert(b);
    if (!uf.unite(a, b)) return false;  // closes a cycle (or is a loop)
  }
  const int root = uf.find(*touched.begin());
  return std::all_of(touched.begin(), touched.end(),
                     [&](Element v) { return uf.find(v) == root; });
}

AbstractGraph from_edge_list(int num_vertices, const std::vector<std::pair<int, int>>& edges,
                             const std::map<int, int>& labels) {
  const int m = num_vertices + 2 * static_cast<int>(edges.size());
  AbstractGraph g;
  g.sigma.resize(m);
  g.t.resize(m);
  for (int v = 0; v < num_vertices; ++v) g.sigma[v] = g.t[v] = v;
  for (std::size_t k = 0; k < edges.size(); ++k) {
    const int a = num_vertices + 2 * static_cast<int>(k);
    g.sigma[a] = a + 1;
    g.sigma[a + 1] = a;
    g.t[a] = edges[k].first;
    g.t[a + 1] = edges[k].second;
  }
  g.leaf_labels = labels;
  return g;
}

AbstractGraph make_rose(int loops) {
  return from_edge_list(1, std::vector<std::pair<int, int>>(loops, {0, 0}));
}

AbstractGraph make_theta() { return from_edge_list(2, {{0, 1}, {0, 1}, {0, 1}}); }

AbstractGraph make_dumbbell() { return from_edge_list(2, {{0, 0}, {0, 1}, {1, 1}}); }

AbstractGraph make_labelled_edge() { return from_edge_list(2, {{0, 1}}, {{0, 1}, {1, 2}}); }

}  // namespace autfn
