#include "autfn/io.hpp"

#include <cstdio>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

#include "autfn/canonical.hpp"

namespace autfn {

namespace {

const json& field(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw std::invalid_argument(std::string("missing field \"") + key + "\"");
  return j.at(key);
}

std::vector<int> int_array(const json& j, const char* what) {
  if (!j.is_array()) throw std::invalid_argument(std::string(what) + " must be an array");
  std::vector<int> out;
  for (const auto& x : j) {
    if (!x.is_number_integer()) throw std::invalid_argument(std::string(what) + " must hold integers");
    out.push_back(x.get<int>());
  }
  return out;
}

json point_json(const Point& p, int dim) {
  json a = json::array();
  for (int i = 0; i < dim; ++i) a.push_back(p[i]);
  return a;
}

Point point_from(const json& j, int dim) {
  if (!j.is_array() || static_cast<int>(j.size()) != dim) throw std::invalid_argument("point has the wrong dimension");
  Point p{0, 0, 0};
  for (int i = 0; i < dim; ++i) p[i] = j[i].get<double>();
  return p;
}

std::map<int, int> labels_from(const json& j) {
  std::map<int, int> out;
  if (!j.is_object()) throw std::invalid_argument("leaf_labels must be an object");
  for (const auto& [k, v] : j.items()) {
    std::size_t used = 0;
    int id = 0;
    try {
      id = std::stoi(k, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != k.size() || !v.is_number_integer()) throw std::invalid_argument("bad leaf label entry \"" + k + "\"");
    out[id] = v.get<int>();
  }
  return out;
}

json labels_json(const std::map<int, int>& labels) {
  json o = json::object();
  for (const auto& [v, l] : labels) o[std::to_string(v)] = l;
  return o;
}

}  // namespace

json to_json(const AbstractGraph& g) {
  return {{"m", g.size()}, {"sigma", g.sigma}, {"t", g.t}, {"leaf_labels", labels_json(g.leaf_labels)}};
}

AbstractGraph graph_from_json(const json& j) {
  AbstractGraph g;
  const json& m = field(j, "m");
  if (!m.is_number_integer() || m.get<int>() < 0) throw std::invalid_argument("m must be a nonnegative integer");
  g.sigma = int_array(field(j, "sigma"), "sigma");
  g.t = int_array(field(j, "t"), "t");
  if (static_cast<int>(g.sigma.size()) != m.get<int>() || static_cast<int>(g.t.size()) != m.get<int>())
    throw std::invalid_argument("sigma and t must have length m");
  g.leaf_labels = j.contains("leaf_labels") ? labels_from(j.at("leaf_labels")) : std::map<int, int>{};
  return g;
}

json to_json(const CellularMap& m) {
  return {{"domain", to_json(m.domain)}, {"codomain", to_json(m.codomain)}, {"f", m.f}};
}

CellularMap map_from_json(const json& j) {
  CellularMap m;
  m.domain = graph_from_json(field(j, "domain"));
  m.codomain = graph_from_json(field(j, "codomain"));
  m.f = int_array(field(j, "f"), "f");
  if (static_cast<int>(m.f.size()) != m.domain.size()) throw std::invalid_argument("f must have one entry per element");
  return m;
}

json to_json(const Forest& f) { return f.edges; }

Forest forest_from_json(const json& j) {
  Forest f{int_array(j, "forest")};
  if (!std::is_sorted(f.edges.begin(), f.edges.end())) throw std::invalid_argument("forest must be sorted");
  return f;
}

// ---------------------------------------------------------------------------
// catalogs

void write_catalog(std::ostream& os, const Catalog& cat) {
  json counts = json::object();
  for (const auto& [v, c] : cat.counts_by_internal_vertices) counts[std::to_string(v)] = c;
  json header = {{"n", cat.rank},       {"s", cat.leaves},
                 {"count", cat.size()}, {"version", cat.version},
                 {"counts_by_internal_vertices", counts}};
  os << header.dump() << '\n';
  for (const auto& g : cat.graphs) os << to_json(g).dump() << '\n';
}

Catalog read_catalog(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw std::runtime_error("catalog: empty file");
  Catalog cat;
  int count = 0;
  try {
    const json h = json::parse(line);
    cat.rank = field(h, "n").get<int>();
    cat.leaves = field(h, "s").get<int>();
    count = field(h, "count").get<int>();
    cat.version = field(h, "version").get<std::string>();
    if (h.contains("counts_by_internal_vertices"))
      for (const auto& [k, v] : h.at("counts_by_internal_vertices").items())
        cat.counts_by_internal_vertices[std::stoi(k)] = v.get<int>();
  } catch (const std::exception& e) {
    throw std::runtime_error(std::string("catalog: bad header: ") + e.what());
  }
  std::string prev_hex;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    AbstractGraph g;
    try {
      g = graph_from_json(json::parse(line));
    } catch (const std::exception& e) {
      throw std::runtime_error(std::string("catalog: bad entry: ") + e.what());
    }
    if (!validate(g).ok()) throw std::runtime_error("catalog: invalid graph entry");
    const CanonicalForm cf = canonical_form(g);
    if (!(cf.graph == g)) throw std::runtime_error("catalog: entry is not a canonical representative");
    const std::string hex = cf.hex();
    if (!prev_hex.empty() && !(prev_hex < hex)) throw std::runtime_error("catalog: entries out of order");
    prev_hex = hex;
    cat.graphs.push_back(std::move(g));
  }
  if (cat.size() != count) throw std::runtime_error("catalog: count does not match the header");
  return cat;
}

std::filesystem::path catalog_cache_path(const std::filesystem::path& dir, int rank, int leaves) {
  return dir / ("catalog_n" + std::to_string(rank) + "_s" + std::to_string(leaves) + "_" + kGeneratorVersion + ".jsonl");
}

Catalog load_or_build_catalog(const std::filesystem::path& dir, int rank, int leaves, int workers, bool* from_cache) {
  const auto path = catalog_cache_path(dir, rank, leaves);
  if (std::filesystem::exists(path)) {
    std::ifstream in(path);
    Catalog cat = read_catalog(in);
    if (cat.rank == rank && cat.leaves == leaves && cat.version == kGeneratorVersion) {
      if (from_cache) *from_cache = true;
      return cat;
    }
  }
  Catalog cat = enumerate_graphs(rank, leaves, workers);
  std::filesystem::create_directories(dir);
  // write then rename so a concurrent reader never sees a partial file
  const auto tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp);
    write_catalog(out, cat);
  }
  std::filesystem::rename(tmp, path);
  if (from_cache) *from_cache = false;
  return cat;
}

// ---------------------------------------------------------------------------
// reports

void export_chain_complex(const std::filesystem::path& dir, const SparseIntChainComplex& c) {
  std::filesystem::create_directories(dir);
  for (int k = 0; k <= c.top_dim(); ++k) {
    std::ofstream out(dir / ("d" + std::to_string(k) + ".txt"));
    write_triplets(out, k, c.boundary[k]);
  }
}

json betti_report(const SpineComplex& sc, const BettiResult& b, const RankOptions& opts) {
  const int shown = std::min<int>(sc.reported_dim, static_cast<int>(b.betti.size()) - 1);
  json betti = json::array(), ranks = json::array();
  std::int64_t alternating = 0;
  for (int k = 0; k <= shown; ++k) {
    betti.push_back(b.betti[k]);
    alternating += (k % 2 ? -1 : 1) * b.betti[k];
  }
  for (std::size_t k = 0; k < b.ranks.size(); ++k) {
    const RankInfo& r = b.ranks[k];
    json e = {{"k", k}, {"rank", r.rank}, {"certified", r.certified()}, {"cleared_columns", r.cleared_columns}};
    if (r.modular)
      e["modular"] = {{"rank", r.modular->rank},
                      {"agreement", r.modular->agreement},
                      {"primes", r.modular->primes},
                      {"ranks", r.modular->ranks}};
    e["exact"] = r.exact ? json(*r.exact) : json(nullptr);
    ranks.push_back(e);
  }
  const bool complete = sc.complex.top_dim() == sc.max_possible_dim;
  return {{"n", sc.rank},
          {"s", sc.leaves},
          {"betti", betti},
          {"cells", sc.complex.cells},
          {"euler", euler_characteristic(sc.complex)},
          {"complete", complete},
          {"euler_matches_betti", complete ? json(alternating == euler_characteristic(sc.complex)) : json(nullptr)},
          {"reported_dim", sc.reported_dim},
          {"max_possible_dim", sc.max_possible_dim},
          {"truncated", sc.truncated},
          {"rank_mode", to_string(opts.mode)},
          {"primes", opts.primes},
          {"exact_limit", opts.exact_limit},
          {"ranks", ranks},
          {"all_certified", b.all_certified()},
          {"modular_consistent", b.modular_consistent()},
          {"version", kGeneratorVersion}};
}

// ---------------------------------------------------------------------------
// embedded graphs and smallness

json to_json(const EmbeddedGraph& g) {
  json vertices = json::array(), edges = json::array();
  for (const auto& v : g.vertices) vertices.push_back(point_json(v, g.dim));
  for (const auto& e : g.edges) {
    json pts = json::array();
    for (const auto& p : e.points) pts.push_back(point_json(p, g.dim));
    edges.push_back({{"from", e.from}, {"to", e.to}, {"params", e.params}, {"points", pts}});
  }
  return {{"dim", g.dim}, {"vertices", vertices}, {"leaf_labels", labels_json(g.leaf_labels)}, {"edges", edges}};
}

EmbeddedGraph embedded_from_json(const json& j) {
  EmbeddedGraph g;
  try {
    g.dim = field(j, "dim").get<int>();
    if (g.dim != 2 && g.dim != 3) throw std::invalid_argument("dim must be 2 or 3");
    for (const auto& v : field(j, "vertices")) g.vertices.push_back(point_from(v, g.dim));
    if (j.contains("leaf_labels")) g.leaf_labels = labels_from(j.at("leaf_labels"));
    for (const auto& e : field(j, "edges")) {
      EmbeddedEdge edge;
      edge.from = field(e, "from").get<int>();
      edge.to = field(e, "to").get<int>();
      edge.params = field(e, "params").get<std::vector<double>>();
      for (const auto& p : field(e, "points")) edge.points.push_back(point_from(p, g.dim));
      g.edges.push_back(std::move(edge));
    }
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("embedded graph: ") + e.what());
  }
  return g;
}

TreeSelection tree_from_json(const json& j) {
  TreeSelection t;
  t.vertices = int_array(field(j, "vertices"), "tree vertices");
  t.edges = j.contains("edges") ? int_array(j.at("edges"), "tree edges") : std::vector<int>{};
  return t;
}

SmallnessSpec smallness_from_json(const json& j) {
  SmallnessSpec s;
  auto box = [](const json& b) {
    Box out;
    const auto lo = field(b, "lo").get<std::vector<double>>(), hi = field(b, "hi").get<std::vector<double>>();
    if (lo.size() != hi.size() || lo.size() < 2 || lo.size() > 3) throw std::invalid_argument("box corners must have 2 or 3 coordinates");
    for (std::size_t i = 0; i < lo.size(); ++i) {
      out.lo[i] = lo[i];
      out.hi[i] = hi[i];
    }
    return out;
  };
  try {
    s.epsilon = field(j, "epsilon").get<double>();
    s.K = box(field(j, "K"));
    if (j.contains("Q") && !j.at("Q").is_null()) s.Q = box(j.at("Q"));
    for (const auto& p : field(j, "correspondence")) {
      const auto v = int_array(p, "correspondence entry");
      if (v.size() != 4) throw std::invalid_argument("correspondence entries are [dom_edge, dom_index, cod_edge, cod_index]");
      s.correspondence.push_back({v[0], v[1], v[2], v[3]});
    }
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("smallness spec: ") + e.what());
  }
  return s;
}

json to_json(const SmallnessReport& r) {
  return {{"status", to_string(r.status)},
          {"small", r.small()},
          {"clauses",
           {{"image", r.image},
            {"containment", r.containment},
            {"pointwise", r.pointwise},
            {"derivative", r.derivative ? json(*r.derivative) : json(nullptr)}}},
          {"max_displacement", r.max_displacement},
          {"max_derivative_gap", r.max_derivative_gap},
          {"detail", r.detail}};
}

void write_frames_header(std::ostream& os, int dim) {
  os << "t,edge_id,sample_index,param,x,y" << (dim == 3 ? ",z" : "") << '\n';
}

void write_frame(std::ostream& os, double t, const EmbeddedGraph& g) {
  os << std::setprecision(17);
  for (std::size_t e = 0; e < g.edges.size(); ++e) {
    const auto& edge = g.edges[e];
    for (std::size_t i = 0; i < edge.points.size(); ++i) {
      os << t << ',' << e << ',' << i << ',' << edge.params[i];
      for (int c = 0; c < g.dim; ++c) os << ',' << edge.points[i][c];
      os << '\n';
    }
  }
}

std::string config_hash(const json& config) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : config.dump()) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

json read_json_file(const std::filesystem::path& p) {
  std::ifstream in(p);
  if (!in) throw std::invalid_argument("cannot open " + p.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw std::invalid_argument(p.string() + ": " + e.what());
  }
}

}  // namespace autfn
