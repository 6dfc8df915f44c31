#include "autfn/enumeration.hpp"

#include <algorithm>
#include <functional>
#include <numeric>
#include <stdexcept>

#include "autfn/canonical.hpp"
#include "autfn/parallel.hpp"

namespace autfn {

int max_internal_vertices(int rank, int leaves) { return std::max(0, 2 * rank + leaves - 2); }

bool excluded_range(int rank, int leaves) { return rank + leaves < 2; }

namespace {

using ClassMap = std::map<std::string, AbstractGraph>;

void degree_sequences(int parts, int total, int max_part, std::vector<int>& prefix,
                      std::vector<std::vector<int>>& out) {
  if (parts == 0) {
    if (total == 0) out.push_back(prefix);
    return;
  }
  for (int d = std::min(max_part, total - 3 * (parts - 1)); d >= 3; --d) {
    if (d * parts < total) break;
    prefix.push_back(d);
    degree_sequences(parts - 1, total - d, d, prefix, out);
    prefix.pop_back();
  }
}

// Enumerates symmetric multiplicity matrices (loops on the diagonal count
// twice) with prescribed residual degrees, by filling the upper triangle.
class MatrixFiller {
 public:
  MatrixFiller(int n, std::function<void(const std::vector<int>&, const std::vector<int>&)> emit)
      : n_(n), loops_(n, 0), mult_(n * n, 0), emit_(std::move(emit)) {}

  void run(std::vector<int> residual) {
    rem_ = std::move(residual);
    vertex(0);
  }

 private:
  void vertex(int i) {
    if (i == n_) {
      emit_(loops_, mult_);
      return;
    }
    for (int l = rem_[i] / 2; l >= 0; --l) {
      loops_[i] = l;
      rem_[i] -= 2 * l;
      pair(i, i + 1);
      rem_[i] += 2 * l;
    }
    loops_[i] = 0;
  }

  void pair(int i, int j) {
    if (j == n_) {
      if (rem_[i] == 0) vertex(i + 1);
      return;
    }
    // remaining capacity of later vertices must absorb rem_[i]
    int capacity = 0;
    for (int k = j; k < n_; ++k) capacity += rem_[k];
    if (capacity < rem_[i]) return;
    for (int c = std::min(rem_[i], rem_[j]); c >= 0; --c) {
      mult_[i * n_ + j] = c;
      rem_[i] -= c;
      rem_[j] -= c;
      pair(i, j + 1);
      rem_[i] += c;
      rem_[j] += c;
    }
    mult_[i * n_ + j] = 0;
  }

  int n_;
  std::vector<int> rem_;
  std::vector<int> loops_;
  std::vector<int> mult_;
  std::function<void(const std::vector<int>&, const std::vector<int>&)> emit_;
};

bool connected(int n, const std::vector<int>& mult) {
  std::vector<int> seen(n, 0);
  std::vector<int> stack{0};
  seen[0] = 1;
  while (!stack.empty()) {
    const int v = stack.back();
    stack.pop_back();
    for (int w = 0; w < n; ++w) {
      const int c = v < w ? mult[v * n + w] : mult[w * n + v];
      if (w != v && c > 0 && !seen[w]) {
        seen[w] = 1;
        stack.push_back(w);
      }
    }
  }
  return std::all_of(seen.begin(), seen.end(), [](int s) { return s != 0; });
}

void insert_class(ClassMap& classes, const AbstractGraph& g) {
  CanonicalForm cf = canonical_form(g);
  std::string key = cf.hex();
  if (!classes.contains(key)) classes.emplace(std::move(key), std::move(cf.graph));
}

ClassMap generate_stratum(int rank, int leaves, int internal) {
  ClassMap classes;
  if (internal == 0) {
    // Only the bare edge between two leaves is connected without internal
    // vertices.
    if (rank == 0 && leaves == 2) insert_class(classes, make_labelled_edge());
    return classes;
  }
  const int edges = internal + leaves + rank - 1;
  const int slots = 2 * edges - leaves;
  if (slots < 3 * internal) return classes;

  std::vector<std::vector<int>> sequences;
  std::vector<int> prefix;
  degree_sequences(internal, slots, slots, prefix, sequences);

  for (const auto& degrees : sequences) {
    // leaf l attaches to internal vertex attach[l]
    std::vector<int> attach(leaves, 0);
    while (true) {
      std::vector<int> residual = degrees;
      for (int a : attach) --residual[a];
      if (std::all_of(residual.begin(), residual.end(), [](int r) { return r >= 0; })) {
        MatrixFiller filler(internal, [&](const std::vector<int>& loops, const std::vector<int>& mult) {
          if (!connected(internal, mult)) return;
          std::vector<std::pair<int, int>> edge_list;
          std::map<int, int> labels;
          for (int l = 0; l < leaves; ++l) {
            edge_list.emplace_back(attach[l], internal + l);
            labels[internal + l] = l + 1;
          }
          for (int i = 0; i < internal; ++i) {
            for (int c = 0; c < loops[i]; ++c) edge_list.emplace_back(i, i);
            for (int j = i + 1; j < internal; ++j)
              for (int c = 0; c < mult[i * internal + j]; ++c) edge_list.emplace_back(i, j);
          }
          insert_class(classes, from_edge_list(internal + leaves, edge_list, labels));
        });
        filler.run(residual);
      }
      int pos = 0;
      while (pos < leaves && ++attach[pos] == internal) attach[pos++] = 0;
      if (pos == leaves) break;
    }
  }
  return classes;
}

}  // namespace

Catalog enumerate_graphs(int rank, int leaves, int workers) {
  if (rank < 0 || leaves < 0) throw std::invalid_argument("enumerate_graphs: negative rank or leaf count");
  if (excluded_range(rank, leaves)) {
    Catalog empty;
    empty.rank = rank;
    empty.leaves = leaves;
    return empty;
  }

  const int max_v = max_internal_vertices(rank, leaves);
  std::vector<ClassMap> strata(max_v + 1);
  parallel_for(max_v + 1, resolve_workers(workers),
               [&](int v) { strata[v] = generate_stratum(rank, leaves, v); });

  Catalog cat;
  cat.rank = rank;
  cat.leaves = leaves;
  ClassMap merged;
  for (int v = 0; v <= max_v; ++v) {
    if (!strata[v].empty()) cat.counts_by_internal_vertices[v] = static_cast<int>(strata[v].size());
    merged.merge(strata[v]);
  }
  for (auto& [key, g] : merged) cat.graphs.push_back(std::move(g));
  return cat;
}

std::vector<int> forest_candidate_edges(const AbstractGraph& g) {
  const auto reps = g.edges();
  std::vector<int> out;
  for (int id = 0; id < static_cast<int>(reps.size()); ++id) {
    const auto [a, b] = g.endpoints(reps[id]);
    if (a == b || g.valence(a) == 1 || g.valence(b) == 1) continue;
    out.push_back(id);
  }
  return out;
}

std::vector<Forest> enumerate_forests(const AbstractGraph& g) {
  const auto reps = g.edges();
  const auto candidates = forest_candidate_edges(g);
  std::vector<Forest> out;
  std::vector<int> parent(g.size());
  std::iota(parent.begin(), parent.end(), 0);
  std::vector<int> chosen;

  // Union-find without path compression so that unions can be undone.
  std::function<int(int)> find = [&](int x) { return parent[x] == x ? x : find(parent[x]); };
  std::function<void(std::size_t)> dfs = [&](std::size_t from) {
    for (std::size_t i = from; i < candidates.size(); ++i) {
      const auto [a, b] = g.endpoints(reps[candidates[i]]);
      const int ra = find(a), rb = find(b);
      if (ra == rb) continue;
      parent[ra] = rb;
      chosen.push_back(candidates[i]);
      out.push_back(Forest{chosen});
      dfs(i + 1);
      chosen.pop_back();
      parent[ra] = ra;
    }
  };
  dfs(0);
  std::sort(out.begin(), out.end(), [](const Forest& a, const Forest& b) {
    if (a.size() != b.size()) return a.size() < b.size();
    return a.edges < b.edges;
  });
  return out;
}

std::vector<ForestChain> enumerate_forest_chains(const AbstractGraph& g, int max_len) {
  std::vector<ForestChain> out;
  if (max_len <= 0) return out;
  const auto forests = enumerate_forests(g);
  std::vector<ForestChain> layer;
  for (const auto& f : forests) layer.push_back(ForestChain{{f}});
  for (int len = 1; len <= max_len && !layer.empty(); ++len) {
    out.insert(out.end(), layer.begin(), layer.end());
    if (len == max_len) break;
    std::vector<ForestChain> next;
    for (const auto& c : layer)
      for (const auto& f : forests)
        if (f.size() > c.levels.back().size() && is_subforest(c.levels.back(), f)) {
          ForestChain ext = c;
          ext.levels.push_back(f);
          next.push_back(std::move(ext));
        }
    layer = std::move(next);
  }
  return out;
}

}  // namespace autfn
