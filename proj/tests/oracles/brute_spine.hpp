#pragma once

// Test-only oracle for spine cell counts: every chain of nested forests is
// listed from raw edge subsets and the chains are grouped into orbits under
// brute-force automorphisms.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <numeric>
#include <set>
#include <vector>

#include "brute_graph.hpp"

namespace oracle {

// Edge subset (bitmask over g.edges()) with no loop, no leaf endpoint and no
// cycle.
inline bool brute_is_forest(const AbstractGraph& g, std::uint32_t mask) {
  const auto reps = g.edges();
  std::vector<int> parent(g.size());
  std::iota(parent.begin(), parent.end(), 0);
  std::function<int(int)> find = [&](int x) { return parent[x] == x ? x : parent[x] = find(parent[x]); };
  for (std::size_t e = 0; e < reps.size(); ++e) {
    if (!(mask >> e & 1)) continue;
    const int a = g.t[reps[e]], b = g.t[g.sigma[reps[e]]];
    if (a == b || g.leaf_labels.contains(a) || g.leaf_labels.contains(b)) return false;
    const int ra = find(a), rb = find(b);
    if (ra == rb) return false;
    parent[ra] = rb;
  }
  return true;
}

// Number of Aut(g)-orbits of chains F1 < ... < Fk of nonempty forests, for
// k = 0, 1, ... (index 0 counts the graph itself).
inline std::vector<std::int64_t> brute_cell_orbits(const AbstractGraph& g) {
  const auto reps = g.edges();
  const int ne = static_cast<int>(reps.size());
  std::vector<std::uint32_t> forests;
  for (std::uint32_t m = 1; m < (1u << ne); ++m)
    if (brute_is_forest(g, m)) forests.push_back(m);

  // edge permutations induced by automorphisms
  std::vector<int> edge_of(g.size(), -1);
  for (int e = 0; e < ne; ++e) edge_of[reps[e]] = edge_of[g.sigma[reps[e]]] = e;
  std::vector<std::vector<int>> edge_perms;
  for (const auto& p : brute_automorphisms(g)) {
    std::vector<int> ep(ne);
    for (int e = 0; e < ne; ++e) ep[e] = edge_of[p[reps[e]]];
    edge_perms.push_back(ep);
  }
  auto image = [&](std::uint32_t m, const std::vector<int>& ep) {
    std::uint32_t out = 0;
    for (int e = 0; e < ne; ++e)
      if (m >> e & 1) out |= 1u << ep[e];
    return out;
  };

  std::vector<std::set<std::vector<std::uint32_t>>> orbits(1);
  orbits[0].insert(std::vector<std::uint32_t>{});
  std::vector<std::uint32_t> chain;
  std::function<void()> extend = [&]() {
    for (std::uint32_t f : forests) {
      if (!chain.empty() && ((chain.back() & f) != chain.back() || chain.back() == f)) continue;
      chain.push_back(f);
      std::vector<std::uint32_t> best;
      for (const auto& ep : edge_perms) {
        std::vector<std::uint32_t> img;
        for (std::uint32_t c : chain) img.push_back(image(c, ep));
        if (best.empty() || img < best) best = img;
      }
      if (orbits.size() <= chain.size()) orbits.resize(chain.size() + 1);
      orbits[chain.size()].insert(best);
      extend();
      chain.pop_back();
    }
  };
  extend();
  std::vector<std::int64_t> out;
  for (const auto& o : orbits) out.push_back(static_cast<std::int64_t>(o.size()));
  return out;
}

// Cell counts per dimension summed over a list of graph classes.
inline std::vector<std::int64_t> brute_spine_cells(const std::vector<AbstractGraph>& classes) {
  std::vector<std::int64_t> total;
  for (const auto& g : classes) {
    const auto c = brute_cell_orbits(g);
    if (total.size() < c.size()) total.resize(c.size(), 0);
    for (std::size_t k = 0; k < c.size(); ++k) total[k] += c[k];
  }
  return total;
}

}  // namespace oracle
