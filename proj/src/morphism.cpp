#include "autfn/morphism.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace autfn {

CellularMap identity_map(const AbstractGraph& g) {
  CellularMap m{g, g, std::vector<Element>(g.size())};
  std::iota(m.f.begin(), m.f.end(), 0);
  return m;
}

bool is_cellular(const CellularMap& m) {
  const auto& a = m.domain;
  const auto& b = m.codomain;
  if (static_cast<int>(m.f.size()) != a.size()) return false;
  for (Element x = 0; x < a.size(); ++x) {
    const Element y = m.f[x];
    if (y < 0 || y >= b.size()) return false;
    if (m.f[a.sigma[x]] != b.sigma[y]) return false;
    if (m.f[a.t[x]] != b.t[y]) return false;
  }
  return true;
}

std::string to_string(EpiFailure f) {
  switch (f) {
    case EpiFailure::none: return "none";
    case EpiFailure::not_cellular: return "not_cellular";
    case EpiFailure::half_edge_preimage: return "half_edge_preimage";
    case EpiFailure::vertex_preimage_not_tree: return "vertex_preimage_not_tree";
    case EpiFailure::leaf_violation: return "leaf_violation";
  }
  return "unknown";
}

EpiCheck is_graph_epimorphism(const CellularMap& m) {
  if (!is_cellular(m)) return {EpiFailure::not_cellular, -1};
  const auto& a = m.domain;
  const auto& b = m.codomain;

  std::vector<int> half_edge_preimages(b.size(), 0);
  std::vector<int> vertex_count(b.size(), 0);
  std::vector<int> collapsed_half_edges(b.size(), 0);
  for (Element x = 0; x < a.size(); ++x) {
    const Element y = m.f[x];
    if (b.is_half_edge(y)) {
      // cellularity forces x to be a half-edge too
      ++half_edge_preimages[y];
    } else if (a.is_vertex(x)) {
      ++vertex_count[y];
    } else {
      ++collapsed_half_edges[y];
    }
  }
  for (Element y = 0; y < b.size(); ++y)
    if (b.is_half_edge(y) && half_edge_preimages[y] != 1) return {EpiFailure::half_edge_preimage, y};

  // A vertex preimage is a subgraph; it is a tree iff it is nonempty,
  // connected and V - E = 1.
  std::vector<int> parent(a.size());
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (Element x = 0; x < a.size(); ++x)
    if (a.is_half_edge(x) && b.is_vertex(m.f[x])) parent[find(a.t[x])] = find(a.t[a.sigma[x]]);
  std::vector<int> roots(b.size(), -1);
  for (Element y = 0; y < b.size(); ++y) {
    if (!b.is_vertex(y)) continue;
    const int edges = collapsed_half_edges[y] / 2;
    if (vertex_count[y] == 0 || vertex_count[y] - edges != 1)
      return {EpiFailure::vertex_preimage_not_tree, y};
  }
  for (Element x = 0; x < a.size(); ++x) {
    if (!a.is_vertex(x)) continue;
    const Element y = m.f[x];
    const int r = find(x);
    if (roots[y] == -1) roots[y] = r;
    else if (roots[y] != r) return {EpiFailure::vertex_preimage_not_tree, y};
  }

  // Leaves: a tree with edges contains no leaf, labels carried over.
  for (Element x = 0; x < a.size(); ++x) {
    if (!a.is_vertex(x)) continue;
    const Element y = m.f[x];
    const bool leaf = a.leaf_labels.contains(x);
    if (leaf && collapsed_half_edges[y] > 0) return {EpiFailure::leaf_violation, y};
    if (leaf) {
      auto it = b.leaf_labels.find(y);
      if (it == b.leaf_labels.end() || it->second != a.leaf_labels.at(x))
        return {EpiFailure::leaf_violation, y};
    }
  }
  for (const auto& [y, label] : b.leaf_labels) {
    bool hit = false;
    for (Element x = 0; x < a.size() && !hit; ++x)
      hit = m.f[x] == y && a.leaf_labels.contains(x) && a.leaf_labels.at(x) == label;
    if (!hit) return {EpiFailure::leaf_violation, y};
  }
  return {};
}

std::string to_string(ForestError e) {
  switch (e) {
    case ForestError::none: return "none";
    case ForestError::bad_edge_id: return "bad_edge_id";
    case ForestError::loop: return "loop";
    case ForestError::leaf_edge: return "leaf_edge";
    case ForestError::cycle: return "cycle";
  }
  return "unknown";
}

ForestError check_forest(const AbstractGraph& g, const Forest& f) {
  const auto reps = g.edges();
  std::vector<int> parent(g.size());
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (std::size_t i = 0; i < f.edges.size(); ++i) {
    const int id = f.edges[i];
    if (id < 0 || id >= static_cast<int>(reps.size()) || (i > 0 && f.edges[i - 1] >= id))
      return ForestError::bad_edge_id;
    const auto [a, b] = g.endpoints(reps[id]);
    if (a == b) return ForestError::loop;
    if (g.leaf_labels.contains(a) || g.leaf_labels.contains(b) || g.valence(a) == 1 ||
        g.valence(b) == 1)
      return ForestError::leaf_edge;
    const int ra = find(a), rb = find(b);
    if (ra == rb) return ForestError::cycle;
    parent[ra] = rb;
  }
  return ForestError::none;
}

bool is_subforest(const Forest& a, const Forest& b) {
  return std::includes(b.edges.begin(), b.edges.end(), a.edges.begin(), a.edges.end());
}

bool is_valid_chain(const AbstractGraph& g, const ForestChain& c) {
  for (std::size_t i = 0; i < c.levels.size(); ++i) {
    if (c.levels[i].empty() || check_forest(g, c.levels[i]) != ForestError::none) return false;
    if (i > 0 && (!is_subforest(c.levels[i - 1], c.levels[i]) ||
                  c.levels[i - 1].size() == c.levels[i].size()))
      return false;
  }
  return true;
}

std::vector<int> chain_levels(const AbstractGraph& g, const ForestChain& c) {
  std::vector<int> levels(g.edges().size(), 0);
  for (int i = c.length() - 1; i >= 0; --i)
    for (int e : c.levels[i].edges) levels[e] = i + 1;
  return levels;
}

ForestChain chain_from_levels(const std::vector<int>& levels) {
  const int k = levels.empty() ? 0 : *std::max_element(levels.begin(), levels.end());
  ForestChain c;
  c.levels.resize(k);
  for (int i = 0; i < k; ++i)
    for (int e = 0; e < static_cast<int>(levels.size()); ++e)
      if (levels[e] != 0 && levels[e] <= i + 1) c.levels[i].edges.push_back(e);
  return c;
}

Collapse collapse_forest(const AbstractGraph& g, const Forest& f) {
  if (const auto err = check_forest(g, f); err != ForestError::none)
    throw std::invalid_argument("collapse_forest: invalid forest (" + to_string(err) + ")");
  const int m = g.size();
  const auto reps = g.edges();

  std::vector<int> parent(m);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  std::vector<char> removed(m, 0);
  for (int id : f.edges) {
    const Element h = reps[id];
    removed[h] = removed[g.sigma[h]] = 1;
    const int a = find(g.t[h]), b = find(g.t[g.sigma[h]]);
    parent[std::max(a, b)] = std::min(a, b);  // root = smallest vertex
  }
  // Surviving elements: half-edges not in f, and root vertices.
  std::vector<Element> new_id(m, -1);
  int next = 0;
  for (Element x = 0; x < m; ++x) {
    const bool keep = g.is_vertex(x) ? find(x) == x : !removed[x];
    if (keep) new_id[x] = next++;
  }
  AbstractGraph q;
  q.sigma.resize(next);
  q.t.resize(next);
  CellularMap map;
  map.f.resize(m);
  for (Element x = 0; x < m; ++x) {
    if (g.is_vertex(x)) map.f[x] = new_id[find(x)];
    else if (removed[x]) map.f[x] = new_id[find(g.t[x])];
    else map.f[x] = new_id[x];
  }
  for (Element x = 0; x < m; ++x) {
    if (new_id[x] < 0) continue;
    q.sigma[new_id[x]] = map.f[g.sigma[x]];
    q.t[new_id[x]] = map.f[g.t[x]];
  }
  for (const auto& [v, label] : g.leaf_labels) q.leaf_labels[map.f[v]] = label;
  map.domain = g;
  map.codomain = q;
  return {std::move(q), std::move(map)};
}

Forest image_forest(const CellularMap& m, const Forest& f) {
  const auto reps = m.domain.edges();
  const auto ids = m.codomain.edge_ids();
  Forest out;
  for (int e : f.edges) {
    const Element y = m.f[reps[e]];
    if (m.codomain.is_half_edge(y)) out.edges.push_back(ids[y]);
  }
  std::sort(out.edges.begin(), out.edges.end());
  return out;
}

CellularMap compose(const CellularMap& a, const CellularMap& b) {
  if (!(a.codomain == b.domain)) throw std::invalid_argument("compose: codomain/domain mismatch");
  CellularMap c{a.domain, b.codomain, std::vector<Element>(a.f.size())};
  for (std::size_t x = 0; x < a.f.size(); ++x) c.f[x] = b.f[a.f[x]];
  return c;
}

Factorization factor_as_collapses(const CellularMap& m) {
  Factorization out;
  const auto& g = m.domain;
  const auto reps = g.edges();
  std::vector<Element> collapsed;  // half-edge representatives sent to vertices
  for (Element h : reps)
    if (m.codomain.is_vertex(m.f[h])) collapsed.push_back(h);

  AbstractGraph current = g;
  std::vector<Element> to_current(g.size());  // domain element -> current element
  std::iota(to_current.begin(), to_current.end(), 0);
  for (Element h : collapsed) {
    const Element here = to_current[h];
    const int id = current.edge_ids()[here];
    Collapse c = collapse_forest(current, Forest{{id}});
    for (auto& x : to_current) x = c.map.f[x];
    current = c.quotient;
    out.collapses.push_back(std::move(c.map));
  }
  // Remaining map is a bijection current -> codomain.
  CellularMap iso{current, m.codomain, std::vector<Element>(current.size(), -1)};
  for (Element x = 0; x < g.size(); ++x) iso.f[to_current[x]] = m.f[x];
  out.isomorphism = std::move(iso);
  return out;
}

CellularMap compose_all(const Factorization& fac) {
  if (fac.collapses.empty()) return fac.isomorphism;
  CellularMap acc = fac.collapses.front();
  for (std::size_t i = 1; i < fac.collapses.size(); ++i) acc = compose(acc, fac.collapses[i]);
  return compose(acc, fac.isomorphism);
}

}  // namespace autfn
