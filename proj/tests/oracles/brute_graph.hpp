#pragma once

// Test-only oracles that decide isomorphism and list automorphisms by plain
// backtracking over element bijections, and generate graph classes by
// matching half-edge slots. No canonical forms are involved.

#include <functional>
#include <map>
#include <vector>

#include "autfn/graph.hpp"

namespace oracle {

using autfn::AbstractGraph;
using Perm = std::vector<int>;

// Bijections p: a -> b with p(sigma x) = sigma p(x), p(t x) = t p(x), equal
// leaf labels and equal optional colors. Stops after `limit` results.
inline std::vector<Perm> brute_isomorphisms(const AbstractGraph& a, const AbstractGraph& b,
                                            std::size_t limit = SIZE_MAX,
                                            const std::vector<int>& colors_a = {},
                                            const std::vector<int>& colors_b = {}) {
  std::vector<Perm> out;
  const int n = a.size();
  if (b.size() != n || a.leaf_labels.size() != b.leaf_labels.size()) return out;
  auto label = [](const AbstractGraph& g, int x) {
    auto it = g.leaf_labels.find(x);
    return it == g.leaf_labels.end() ? 0 : it->second;
  };
  auto color = [](const std::vector<int>& c, int x) { return c.empty() ? 0 : c[x]; };
  Perm p(n, -1);
  std::vector<char> used(n, 0);
  auto consistent = [&](int x) {
    const int y = p[x];
    if ((a.sigma[x] == x) != (b.sigma[y] == y)) return false;
    if (label(a, x) != label(b, y) || color(colors_a, x) != color(colors_b, y)) return false;
    // every constraint between x and an already assigned element
    for (int z : {a.sigma[x], a.t[x]})
      if (p[z] >= 0 && ((z == a.sigma[x] && p[z] != b.sigma[y]) || (z == a.t[x] && p[z] != b.t[y]))) return false;
    for (int w = 0; w < n; ++w) {
      if (p[w] < 0 || w == x) continue;
      if (a.sigma[w] == x && b.sigma[p[w]] != y) return false;
      if (a.t[w] == x && b.t[p[w]] != y) return false;
    }
    return true;
  };
  std::function<void(int)> go = [&](int x) {
    if (out.size() >= limit) return;
    if (x == n) {
      out.push_back(p);
      return;
    }
    for (int y = 0; y < n; ++y) {
      if (used[y]) continue;
      p[x] = y;
      if (consistent(x)) {
        used[y] = 1;
        go(x + 1);
        used[y] = 0;
      }
      p[x] = -1;
    }
  };
  go(0);
  return out;
}

inline bool brute_isomorphic(const AbstractGraph& a, const AbstractGraph& b) {
  return !brute_isomorphisms(a, b, 1).empty();
}

inline std::vector<Perm> brute_automorphisms(const AbstractGraph& g) { return brute_isomorphisms(g, g); }

// All connected graphs with first Betti number n and s labelled leaves,
// internal vertices of valence >= 3, one representative per class. Internal
// vertex degrees range over all ordered assignments, half-edge slots over
// all perfect matchings; classes are separated by pairwise brute-force
// isomorphism tests.
inline std::vector<AbstractGraph> brute_catalog(int n, int s) {
  std::vector<AbstractGraph> classes;
  if (n + s < 2) return classes;
  auto add_class = [&](const AbstractGraph& g) {
    for (const auto& c : classes)
      if (brute_isomorphic(c, g)) return;
    classes.push_back(g);
  };
  for (int v = 0; v <= 2 * n + s - 2; ++v) {
    const int edges = v + s + n - 1;
    const int internal_slots = 2 * edges - s;
    if (v == 0 && internal_slots != 0) continue;
    // ordered degree assignments
    std::vector<std::vector<int>> degrees;
    std::vector<int> cur;
    std::function<void(int, int)> deg = [&](int i, int left) {
      if (i == v) {
        if (left == 0) degrees.push_back(cur);
        return;
      }
      for (int d = 3; d <= left; ++d) {
        cur.push_back(d);
        deg(i + 1, left - d);
        cur.pop_back();
      }
    };
    deg(0, internal_slots);
    for (const auto& dseq : degrees) {
      // slot owners: internal vertex i, then leaves v..v+s-1
      std::vector<int> owner;
      for (int i = 0; i < v; ++i)
        for (int k = 0; k < dseq[i]; ++k) owner.push_back(i);
      for (int l = 0; l < s; ++l) owner.push_back(v + l);
      const int slots = static_cast<int>(owner.size());
      std::vector<int> mate(slots, -1);
      std::function<void()> match = [&]() {
        int first = 0;
        while (first < slots && mate[first] >= 0) ++first;
        if (first == slots) {
          // elements: vertices 0..v+s-1, then one half-edge per slot
          const int nv = v + s;
          AbstractGraph g;
          g.sigma.resize(nv + slots);
          g.t.resize(nv + slots);
          for (int x = 0; x < nv; ++x) g.sigma[x] = g.t[x] = x;
          for (int k = 0; k < slots; ++k) {
            g.sigma[nv + k] = nv + mate[k];
            g.t[nv + k] = owner[k];
          }
          for (int l = 0; l < s; ++l) g.leaf_labels[v + l] = l + 1;
          if (autfn::validate(g).ok()) add_class(g);
          return;
        }
        for (int other = first + 1; other < slots; ++other) {
          if (mate[other] >= 0) continue;
          mate[first] = other;
          mate[other] = first;
          match();
          mate[first] = mate[other] = -1;
        }
      };
      match();
    }
  }
  return classes;
}

}  // namespace oracle
