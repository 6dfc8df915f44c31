#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include "json.hpp"

#include "autfn/enumeration.hpp"
#include "autfn/flow.hpp"
#include "autfn/morphism.hpp"
#include "autfn/spine.hpp"

namespace autfn {

using nlohmann::json;

/// {"m", "sigma", "t", "leaf_labels": {"<vertex id>": label}}
json to_json(const AbstractGraph& g);
/// Throws std::invalid_argument on schema errors (not on graph invariant
/// violations, which validate() reports).
AbstractGraph graph_from_json(const json& j);

json to_json(const CellularMap& m);
CellularMap map_from_json(const json& j);

json to_json(const Forest& f);
Forest forest_from_json(const json& j);

// Catalog files: a header line {"n", "s", "count", "version",
// "counts_by_internal_vertices"} followed by one graph per line.
void write_catalog(std::ostream& os, const Catalog& cat);
/// Throws std::runtime_error on malformed files or when an entry is not a
/// canonical representative.
Catalog read_catalog(std::istream& is);
std::filesystem::path catalog_cache_path(const std::filesystem::path& dir, int rank, int leaves);
/// Loads the cached catalog for (rank, leaves, generator version) or builds
/// and stores it. `from_cache` reports which happened.
Catalog load_or_build_catalog(const std::filesystem::path& dir, int rank, int leaves, int workers,
                              bool* from_cache = nullptr);

/// One triplet file per boundary matrix, named d<k>.txt.
void export_chain_complex(const std::filesystem::path& dir, const SparseIntChainComplex& c);

json betti_report(const SpineComplex& sc, const BettiResult& b, const RankOptions& opts);

/// {"dim", "vertices": [[x, y(, z)]...], "leaf_labels": {...},
///  "edges": [{"from", "to", "params": [...], "points": [[...]...]}]}
json to_json(const EmbeddedGraph& g);
EmbeddedGraph embedded_from_json(const json& j);

/// {"vertices": [...], "edges": [...]}
TreeSelection tree_from_json(const json& j);

/// {"epsilon", "K": {"lo", "hi"}, "Q"?: {...}, "correspondence":
///  [[dom_edge, dom_index, cod_edge, cod_index]...]}
SmallnessSpec smallness_from_json(const json& j);
json to_json(const SmallnessReport& r);

/// Header line `t,edge_id,sample_index,param,x,y[,z]`.
void write_frames_header(std::ostream& os, int dim);
void write_frame(std::ostream& os, double t, const EmbeddedGraph& g);

/// Short stable hash (FNV-1a, hex) of a canonical JSON dump.
std::string config_hash(const json& config);

json read_json_file(const std::filesystem::path& p);

}  // namespace autfn
