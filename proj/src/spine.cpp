#include "autfn/spine.hpp"

#include <algorithm>
#include <array>
#include <map>
#include <numeric>
#include <stdexcept>

#include "autfn/canonical.hpp"
#include "autfn/parallel.hpp"

namespace autfn {

// ---------------------------------------------------------------------------
// chain complex and ranks

bool SparseIntChainComplex::boundary_squared_zero() const {
  for (int k = 1; k + 1 < static_cast<int>(boundary.size()); ++k)
    if (boundary[k].multiply(boundary[k + 1]).nnz() != 0) return false;
  return true;
}

std::int64_t euler_characteristic(const SparseIntChainComplex& c) {
  std::int64_t chi = 0;
  for (std::size_t k = 0; k < c.cells.size(); ++k) chi += (k % 2 == 0 ? 1 : -1) * c.cells[k];
  return chi;
}

std::string to_string(RankMode m) {
  switch (m) {
    case RankMode::modular: return "modular";
    case RankMode::exact: return "exact";
    case RankMode::both: return "both";
  }
  return "unknown";
}

RankMode parse_rank_mode(const std::string& s) {
  if (s == "modular") return RankMode::modular;
  if (s == "exact") return RankMode::exact;
  if (s == "both") return RankMode::both;
  throw std::invalid_argument("unknown rank mode: " + s);
}

bool RankInfo::certified() const {
  if (!exact) return false;
  return !modular || modular->rank == *exact;
}

bool BettiResult::all_certified() const {
  return std::all_of(ranks.begin(), ranks.end(), [](const RankInfo& r) { return r.certified(); });
}

bool BettiResult::modular_consistent() const {
  return std::all_of(ranks.begin(), ranks.end(), [](const RankInfo& r) {
    if (!r.modular) return true;
    return r.modular->agreement && (!r.exact || *r.exact == r.modular->rank);
  });
}

// Ranks run from the top degree down. Rows of d_{k+1} that carried pivots
// index k-cells whose coordinates, together with im d_{k+1}, span C_k; as
// d_k vanishes on im d_{k+1}, those columns of d_k can be dropped without
// changing its rank. Every prime and the exact run keep their own pivots.
BettiResult betti_numbers(const SparseIntChainComplex& c, const RankOptions& opts) {
  if (!c.boundary_squared_zero()) throw std::logic_error("betti_numbers: boundary does not square to zero");
  const int top = c.top_dim();
  BettiResult out;
  out.ranks.resize(std::max(0, top + 1));
  const std::vector<std::uint64_t> primes =
      opts.mode == RankMode::exact ? std::vector<std::uint64_t>{} : random_primes(opts.primes, opts.seed);
  const int np = static_cast<int>(primes.size());
  // pivot rows of the previous (higher) boundary; index np is the exact run
  std::vector<std::vector<std::int64_t>> pivots(np + 1);
  bool exact_pivots = false;

  for (int k = top; k >= 0; --k) {
    const SparseIntMatrix& d = c.boundary[k];
    RankInfo& info = out.ranks[k];
    const bool want_exact = opts.mode == RankMode::exact ||
                            (opts.mode == RankMode::both && std::min(d.rows(), d.cols()) <= opts.exact_limit);
    // without exact pivots from above, the first prime's pivots are valid
    // over the rationals too (a nonzero minor mod p is nonzero)
    const std::vector<std::int64_t> exact_source = exact_pivots || np == 0 ? pivots[np] : pivots[0];
    std::vector<PivotedRank> results(np + 1);
    std::vector<std::int64_t> cleared(np + 1, 0);
    auto job = [&](int j) {
      if (d.nnz() == 0) return;
      const auto& source = j < np ? pivots[j] : exact_source;
      std::vector<char> drop(d.cols(), 0);
      for (auto r : source) drop[r] = 1;
      cleared[j] = static_cast<std::int64_t>(source.size());
      const SparseIntMatrix reduced = source.empty() ? d : d.drop_columns(drop);
      results[j] = j < np ? rank_mod_p_pivots(reduced, primes[j]) : rank_exact_pivots(reduced);
    };
    std::vector<int> jobs;
    for (int j = 0; j < np; ++j) jobs.push_back(j);
    if (want_exact) jobs.push_back(np);
    parallel_for(static_cast<int>(jobs.size()), std::max(1, opts.workers), [&](int i) { job(jobs[i]); });

    if (np > 0) {
      ModularRank m;
      m.primes = primes;
      for (int j = 0; j < np; ++j) m.ranks.push_back(results[j].rank);
      m.rank = *std::max_element(m.ranks.begin(), m.ranks.end());
      m.agreement = std::all_of(m.ranks.begin(), m.ranks.end(), [&](std::int64_t r) { return r == m.ranks[0]; });
      info.modular = m;
    }
    if (want_exact) info.exact = results[np].rank;
    info.rank = info.exact ? *info.exact : info.modular->rank;
    info.cleared_columns = cleared[want_exact ? np : 0];
    for (int j = 0; j <= np; ++j) pivots[j] = std::move(results[j].pivot_rows);
    exact_pivots = want_exact;
  }
  for (int k = 0; k <= top; ++k) {
    const std::int64_t next = k + 1 <= top ? out.ranks[k + 1].rank : 0;
    out.betti.push_back(c.cells[k] - out.ranks[k].rank - next);
  }
  return out;
}

// ---------------------------------------------------------------------------
// spine cells

namespace {

constexpr int kMaxEdges = 13;
constexpr int kLevelBits = 3;
constexpr int kGraphShift = 40;
using Levels = std::array<std::uint8_t, 16>;
using Key = std::uint64_t;

struct GraphData {
  int edges = 0;
  std::vector<std::array<std::uint8_t, 16>> aut_edges;  // edge permutations
  std::vector<std::uint32_t> forests;                   // bitmasks, ascending
  std::vector<int> collapse_target;                     // per forest
  std::vector<std::array<std::int8_t, 16>> collapse_edge_map;
};

Key pack(int graph, const Levels& levels, int edges) {
  Key k = static_cast<Key>(graph) << kGraphShift;
  for (int e = 0; e < edges; ++e) k |= static_cast<Key>(levels[e]) << (kLevelBits * e);
  return k;
}

int unpack(Key key, Levels& levels, const std::vector<GraphData>& data) {
  const int graph = static_cast<int>(key >> kGraphShift);
  levels.fill(0);
  for (int e = 0; e < data[graph].edges; ++e) levels[e] = (key >> (kLevelBits * e)) & 7;
  return graph;
}

Key canonical_key(int graph, const Levels& levels, const GraphData& d) {
  Key best = ~Key{0};
  for (const auto& perm : d.aut_edges) {
    Key k = 0;
    for (int e = 0; e < d.edges; ++e) k |= static_cast<Key>(levels[e]) << (kLevelBits * perm[e]);
    best = std::min(best, k);
  }
  return (static_cast<Key>(graph) << kGraphShift) | best;
}

std::vector<GraphData> prepare(const Catalog& cat, int workers) {
  std::map<std::vector<int>, int> index;
  for (int i = 0; i < cat.size(); ++i) index.emplace(canonical_form(cat.graphs[i]).code, i);

  std::vector<GraphData> data(cat.size());
  parallel_for(cat.size(), workers, [&](int gi) {
    const AbstractGraph& g = cat.graphs[gi];
    GraphData& d = data[gi];
    const auto reps = g.edges();
    const auto ids = g.edge_ids();
    d.edges = static_cast<int>(reps.size());
    if (d.edges > kMaxEdges) throw std::length_error("spine: graph has too many edges for the cell encoding");
    for (const auto& a : automorphism_group(g)) {
      std::array<std::uint8_t, 16> perm{};
      for (int e = 0; e < d.edges; ++e) perm[e] = static_cast<std::uint8_t>(ids[a[reps[e]]]);
      d.aut_edges.push_back(perm);
    }
    for (const auto& f : enumerate_forests(g)) {
      std::uint32_t mask = 0;
      for (int e : f.edges) mask |= 1u << e;
      d.forests.push_back(mask);
    }
    std::sort(d.forests.begin(), d.forests.end());
    for (std::uint32_t mask : d.forests) {
      Forest f;
      for (int e = 0; e < d.edges; ++e)
        if (mask >> e & 1) f.edges.push_back(e);
      const Collapse c = collapse_forest(g, f);
      const CanonicalForm cf = canonical_form(c.quotient);
      auto it = index.find(cf.code);
      if (it == index.end()) throw std::logic_error("spine: collapse left the catalog");
      const auto target_ids = cat.graphs[it->second].edge_ids();
      std::array<std::int8_t, 16> emap;
      emap.fill(-1);
      for (int e = 0; e < d.edges; ++e) {
        const Element y = c.map.f[reps[e]];
        if (c.quotient.is_half_edge(y)) emap[e] = static_cast<std::int8_t>(target_ids[cf.relabel[y]]);
      }
      d.collapse_target.push_back(it->second);
      d.collapse_edge_map.push_back(emap);
    }
  });
  return data;
}

int max_forest_size(const std::vector<GraphData>& data) {
  int best = 0;
  for (const auto& d : data)
    for (std::uint32_t f : d.forests) best = std::max(best, __builtin_popcount(f));
  return best;
}

// Canonical k-cells of one graph, k = 0..top, ascending keys.
std::vector<std::vector<Key>> graph_cells(int gi, const GraphData& d, int top) {
  std::vector<std::vector<Key>> out(top + 1);
  Levels levels{};
  out[0].push_back(pack(gi, levels, d.edges));
  std::array<int, 16> members{};
  for (std::uint32_t mask : d.forests) {
    int size = 0;
    for (int e = 0; e < d.edges; ++e)
      if (mask >> e & 1) members[size++] = e;
    for (int k = 1; k <= std::min(size, top); ++k) {
      // surjective level assignments members -> {1..k}
      std::array<int, 8> used{};
      int distinct = 0;
      auto assign = [&](auto&& self, int pos) -> void {
        if (pos == size) {
          if (distinct != k) return;
          const Key key = pack(gi, levels, d.edges);
          if (canonical_key(gi, levels, d) == key) out[k].push_back(key);
          return;
        }
        if (size - pos < k - distinct) return;
        for (int l = 1; l <= k; ++l) {
          levels[members[pos]] = static_cast<std::uint8_t>(l);
          if (used[l]++ == 0) ++distinct;
          self(self, pos + 1);
          if (--used[l] == 0) --distinct;
        }
        levels[members[pos]] = 0;
      };
      assign(assign, 0);
    }
  }
  for (auto& v : out) std::sort(v.begin(), v.end());
  return out;
}

int forest_index(const GraphData& d, std::uint32_t mask) {
  auto it = std::lower_bound(d.forests.begin(), d.forests.end(), mask);
  if (it == d.forests.end() || *it != mask) throw std::logic_error("spine: face forest not found");
  return static_cast<int>(it - d.forests.begin());
}

// Faces of a k-cell with their signs, as canonical keys.
void faces(Key key, int k, const std::vector<GraphData>& data, std::vector<std::pair<Key, int>>& out) {
  out.clear();
  Levels levels;
  const int gi = unpack(key, levels, data);
  const GraphData& d = data[gi];

  // face 0: collapse F1
  std::uint32_t f1 = 0;
  for (int e = 0; e < d.edges; ++e)
    if (levels[e] == 1) f1 |= 1u << e;
  const int fi = forest_index(d, f1);
  const int target = d.collapse_target[fi];
  const auto& emap = d.collapse_edge_map[fi];
  Levels image{};
  for (int e = 0; e < d.edges; ++e)
    if (levels[e] >= 2) image[emap[e]] = static_cast<std::uint8_t>(levels[e] - 1);
  out.emplace_back(canonical_key(target, image, data[target]), 1);

  for (int i = 1; i <= k; ++i) {
    Levels next = levels;
    for (int e = 0; e < d.edges; ++e) {
      if (i == k) {
        if (next[e] == k) next[e] = 0;
      } else if (next[e] > i) {
        --next[e];
      }
    }
    out.emplace_back(canonical_key(gi, next, d), i % 2 == 0 ? 1 : -1);
  }
}

SpineCell to_cell(Key key, const std::vector<GraphData>& data) {
  Levels levels;
  SpineCell c;
  c.graph = unpack(key, levels, data);
  c.levels.assign(levels.begin(), levels.begin() + data[c.graph].edges);
  return c;
}

}  // namespace

int SpineCell::dim() const { return levels.empty() ? 0 : *std::max_element(levels.begin(), levels.end()); }

int catalog_index(const Catalog& cat, const AbstractGraph& canonical) {
  for (int i = 0; i < cat.size(); ++i)
    if (cat.graphs[i] == canonical) return i;
  return -1;
}

std::vector<double> estimate_spine_size(const Catalog& cat) {
  std::vector<double> out(1, 0.0);
  for (const auto& g : cat.graphs) {
    const double weight = 1.0 / static_cast<double>(automorphism_group(g).size());
    out[0] += weight;
    for (const auto& f : enumerate_forests(g)) {
      const int m = f.size();
      if (static_cast<int>(out.size()) <= m) out.resize(m + 1, 0.0);
      // surjections m -> k by inclusion-exclusion
      for (int k = 1; k <= m; ++k) {
        double total = 0, binom = 1;
        for (int j = 0; j <= k; ++j) {
          if (j) binom = binom * (k - j + 1) / j;
          double p = 1;
          for (int i = 0; i < m; ++i) p *= (k - j);
          total += (j % 2 ? -1 : 1) * binom * p;
        }
        out[k] += total * weight;
      }
    }
  }
  return out;
}

SpineComplex build_spine_complex(const Catalog& cat, const SpineOptions& opts) {
  const int workers = std::max(1, opts.workers);
  const auto data = prepare(cat, workers);

  SpineComplex sc;
  sc.rank = cat.rank;
  sc.leaves = cat.leaves;
  sc.max_possible_dim = max_forest_size(data);
  if (max_forest_size(data) > 7) throw std::length_error("spine: forest too large for the cell encoding");
  sc.reported_dim = opts.max_dim < 0 ? sc.max_possible_dim : std::min(opts.max_dim, sc.max_possible_dim);
  sc.truncated = opts.max_dim > sc.max_possible_dim;
  const int top = cat.size() == 0 ? -1 : std::min(sc.reported_dim + 1, sc.max_possible_dim);

  std::vector<std::vector<Key>> keys(top + 1);
  {
    std::vector<std::vector<std::vector<Key>>> per_graph(cat.size());
    parallel_for(cat.size(), workers, [&](int gi) { per_graph[gi] = graph_cells(gi, data[gi], top); });
    for (int k = 0; k <= top; ++k)
      for (auto& pg : per_graph) {
        keys[k].insert(keys[k].end(), pg[k].begin(), pg[k].end());
        std::vector<Key>().swap(pg[k]);
      }
  }

  sc.complex.cells.resize(top + 1);
  sc.complex.boundary.resize(top + 1);
  sc.cells.resize(top + 1);
  for (int k = 0; k <= top; ++k) {
    sc.complex.cells[k] = static_cast<std::int64_t>(keys[k].size());
    sc.cells[k].reserve(keys[k].size());
    for (Key key : keys[k]) sc.cells[k].push_back(to_cell(key, data));
  }
  if (top >= 0) sc.complex.boundary[0] = SparseIntMatrix(0, sc.complex.cells[0]);

  for (int k = 1; k <= top; ++k) {
    const auto& cols = keys[k];
    const auto& rows = keys[k - 1];
    const int chunks = std::max(1, std::min<int>(workers * 8, static_cast<int>(cols.size() / 4096) + 1));
    std::vector<std::vector<Triplet>> parts(chunks);
    parallel_for(chunks, workers, [&](int ch) {
      const std::size_t lo = cols.size() * ch / chunks, hi = cols.size() * (ch + 1) / chunks;
      std::vector<std::pair<Key, int>> fs;
      auto& out = parts[ch];
      for (std::size_t j = lo; j < hi; ++j) {
        faces(cols[j], k, data, fs);
        std::sort(fs.begin(), fs.end());
        for (std::size_t a = 0; a < fs.size();) {
          int coef = 0;
          std::size_t b = a;
          for (; b < fs.size() && fs[b].first == fs[a].first; ++b) coef += fs[b].second;
          if (coef != 0) {
            auto it = std::lower_bound(rows.begin(), rows.end(), fs[a].first);
            if (it == rows.end() || *it != fs[a].first) throw std::logic_error("spine: face cell missing");
            out.push_back({it - rows.begin(), static_cast<std::int64_t>(j), coef});
          }
          a = b;
        }
      }
    });
    std::vector<Triplet> all;
    std::size_t total = 0;
    for (const auto& p : parts) total += p.size();
    all.reserve(total);
    for (auto& p : parts) {
      all.insert(all.end(), p.begin(), p.end());
      std::vector<Triplet>().swap(p);
    }
    sc.complex.boundary[k] = SparseIntMatrix::from_triplets(static_cast<std::int64_t>(rows.size()),
                                                            static_cast<std::int64_t>(cols.size()), std::move(all));
  }
  return sc;
}

// ---------------------------------------------------------------------------
// independent checks

namespace {

std::vector<int> colored_code(const AbstractGraph& g, const std::vector<int>& edge_levels) {
  const auto ids = g.edge_ids();
  std::vector<int> colors(g.size(), 0);
  for (Element x = 0; x < g.size(); ++x)
    if (g.is_half_edge(x)) colors[x] = edge_levels[ids[x]];
  return canonical_form(g, colors).code;
}

std::vector<int> levels_of(const AbstractGraph& g, const Forest& f, int level) {
  std::vector<int> lv(g.edges().size(), 0);
  for (int e : f.edges) lv[e] = level;
  return lv;
}

}  // namespace

FaceIdentityReport verify_face_identity(const Catalog& cat, const SpineComplex& sc) {
  FaceIdentityReport report;
  if (sc.cells.size() < 3) return report;
  const auto& d2 = sc.complex.boundary[2];
  for (std::size_t j = 0; j < sc.cells[2].size(); ++j) {
    const SpineCell& cell = sc.cells[2][j];
    const AbstractGraph& g = cat.graphs[cell.graph];
    const ForestChain chain = chain_from_levels(cell.levels);
    const Forest& f1 = chain.levels[0];
    const Forest& f2 = chain.levels[1];

    const Collapse c1 = collapse_forest(g, f1);
    const Forest f2_image = image_forest(c1.map, f2);
    const Collapse c2 = collapse_forest(c1.quotient, f2_image);
    const CellularMap composite = compose(c1.map, c2.map);
    const Collapse direct = collapse_forest(g, f2);

    std::string failure;
    if (!is_graph_epimorphism(composite).ok()) failure = "composite is not an epimorphism";
    else if (canonical_form(c2.quotient).code != canonical_form(direct.quotient).code)
      failure = "(G/F1)/(F2/F1) differs from G/F2";

    // expected faces with signs, keyed by colored canonical code
    std::map<std::vector<int>, int> expected;
    expected[colored_code(c1.quotient, levels_of(c1.quotient, f2_image, 1))] += 1;
    expected[colored_code(g, levels_of(g, f2, 1))] -= 1;
    expected[colored_code(g, levels_of(g, f1, 1))] += 1;
    std::erase_if(expected, [](const auto& kv) { return kv.second == 0; });

    std::map<std::vector<int>, int> actual;
    auto rows = d2.column_rows(static_cast<std::int64_t>(j));
    auto vals = d2.column_values(static_cast<std::int64_t>(j));
    for (std::size_t q = 0; q < rows.size(); ++q) {
      const SpineCell& face = sc.cells[1][rows[q]];
      actual[colored_code(cat.graphs[face.graph], face.levels)] += static_cast<int>(vals[q]);
    }
    if (failure.empty() && expected != actual) failure = "boundary column disagrees with composed faces";

    ++report.checked;
    if (!failure.empty()) {
      if (report.failures++ == 0) report.first_failure = "2-cell " + std::to_string(j) + ": " + failure;
    }
  }
  return report;
}

bool verify_orientation_safety(const Catalog& cat, const SpineComplex& sc) {
  for (std::size_t k = 1; k < sc.cells.size(); ++k) {
    for (const SpineCell& cell : sc.cells[k]) {
      const AbstractGraph& g = cat.graphs[cell.graph];
      const auto reps = g.edges();
      const auto ids = g.edge_ids();
      const ForestChain chain = chain_from_levels(cell.levels);
      std::vector<Forest> set = chain.levels;
      std::sort(set.begin(), set.end());
      for (const auto& a : automorphism_group(g)) {
        std::vector<Forest> images;
        for (const auto& f : chain.levels) {
          Forest img;
          for (int e : f.edges) img.edges.push_back(ids[a[reps[e]]]);
          std::sort(img.edges.begin(), img.edges.end());
          images.push_back(img);
        }
        std::vector<Forest> sorted = images;
        std::sort(sorted.begin(), sorted.end());
        if (sorted != set) continue;  // does not stabilize the simplex
        if (images != chain.levels) return false;
      }
    }
  }
  return true;
}

bool one_skeleton_connected(const SpineComplex& sc) {
  if (sc.complex.cells.empty() || sc.complex.cells[0] == 0) return false;
  const std::int64_t n = sc.complex.cells[0];
  std::vector<std::int64_t> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::int64_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  if (sc.complex.boundary.size() > 1) {
    const auto& d1 = sc.complex.boundary[1];
    for (std::int64_t c = 0; c < d1.cols(); ++c) {
      auto rows = d1.column_rows(c);
      for (std::size_t q = 1; q < rows.size(); ++q) parent[find(rows[q])] = find(rows[0]);
    }
  }
  for (std::int64_t v = 1; v < n; ++v)
    if (find(v) != find(0)) return false;
  return true;
}

}  // namespace autfn
