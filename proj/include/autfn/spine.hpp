#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "autfn/enumeration.hpp"
#include "autfn/linalg.hpp"

namespace autfn {

/// Graded boundary matrices; boundary[k] maps C_k -> C_{k-1} (rows are
/// (k-1)-cells). boundary[0] is the empty 0 x cells[0] map.
struct SparseIntChainComplex {
  std::vector<std::int64_t> cells;
  std::vector<SparseIntMatrix> boundary;

  int top_dim() const { return static_cast<int>(cells.size()) - 1; }
  /// d_{k} d_{k+1} = 0 for all k, in exact integer arithmetic.
  bool boundary_squared_zero() const;
};

std::int64_t euler_characteristic(const SparseIntChainComplex& c);

enum class RankMode { modular, exact, both };
std::string to_string(RankMode m);
RankMode parse_rank_mode(const std::string& s);

struct RankOptions {
  RankMode mode = RankMode::modular;
  int primes = 3;
  /// In `both` mode exact elimination runs when min(rows, cols) is at most
  /// this.
  std::int64_t exact_limit = 20000;
  std::uint64_t seed = 0x5eed;
  int workers = 1;
};

struct RankInfo {
  std::int64_t rank = 0;
  std::optional<ModularRank> modular;
  std::optional<std::int64_t> exact;
  /// Columns skipped because they carried pivots of the next boundary.
  std::int64_t cleared_columns = 0;

  /// Exact rank computed (and, if modular ran too, equal to it).
  bool certified() const;
};

struct BettiResult {
  std::vector<std::int64_t> betti;
  /// ranks[k] is the rank of boundary[k], k = 0..top_dim.
  std::vector<RankInfo> ranks;
  bool all_certified() const;
  bool modular_consistent() const;
};

/// b_k = dim C_k - rank d_k - rank d_{k+1}, with the top dimension treated
/// as the top of the complex. Throws std::logic_error if d*d != 0.
BettiResult betti_numbers(const SparseIntChainComplex& c, const RankOptions& opts = {});

/// A k-cell of the quotient spine: catalog graph plus per-edge chain level
/// (least i with the edge in F_i, 0 outside F_k), minimal over Aut(G).
struct SpineCell {
  int graph = 0;
  std::vector<int> levels;

  int dim() const;
  bool operator==(const SpineCell&) const = default;
};

struct SpineOptions {
  /// Largest dimension whose Betti number is wanted; -1 = all.
  int max_dim = -1;
  int workers = 1;
};

struct SpineComplex {
  int rank = 0;
  int leaves = 0;
  SparseIntChainComplex complex;
  /// cells[k][i] is basis vector i of C_k.
  std::vector<std::vector<SpineCell>> cells;
  /// Largest possible cell dimension (largest forest in the catalog).
  int max_possible_dim = 0;
  /// Dimension up to which Betti numbers are valid.
  int reported_dim = 0;
  /// Requested dimension exceeded what exists and was clamped.
  bool truncated = false;
};

/// Builds the rational chain complex on isomorphism classes of
/// (G, F1 < ... < Fk). The boundary is sum_i (-1)^i face_i where face_0
/// collapses F1 and the other faces drop F_i. Cells are built up to
/// reported_dim + 1 so that the reported Betti numbers are exact.
SpineComplex build_spine_complex(const Catalog& cat, const SpineOptions& opts = {});

/// Estimated cell counts per dimension, orbit-weighted (sum of 1/|Aut|).
std::vector<double> estimate_spine_size(const Catalog& cat);

/// Index of a canonical graph in the catalog, -1 if absent.
int catalog_index(const Catalog& cat, const AbstractGraph& canonical);

// Independent checks used by the tests and the acceptance suite.

struct FaceIdentityReport {
  std::int64_t checked = 0;
  std::int64_t failures = 0;
  std::string first_failure;
};

/// For each 2-cell G -> G/F1 -> G/F2, recomputes its three faces through
/// collapse_forest / compose and the generic colored canonical form and
/// compares them with the faces used in boundary[2].
FaceIdentityReport verify_face_identity(const Catalog& cat, const SpineComplex& sc);

/// Every automorphism of G that permutes {F1, ..., Fk} fixes each F_i.
bool verify_orientation_safety(const Catalog& cat, const SpineComplex& sc);

/// The 1-skeleton (0-cells joined by 1-cells) is connected.
bool one_skeleton_connected(const SpineComplex& sc);

}  // namespace autfn
