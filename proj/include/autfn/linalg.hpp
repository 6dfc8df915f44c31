#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

namespace autfn {

struct Triplet {
  std::int64_t row;
  std::int64_t col;
  std::int64_t value;

  bool operator==(const Triplet&) const = default;
};

/// Sparse integer matrix in compressed-column form. Entries are kept in
/// ascending (col, row) order with no duplicates and no zeros.
class SparseIntMatrix {
 public:
  SparseIntMatrix() = default;
  SparseIntMatrix(std::int64_t rows, std::int64_t cols);

  /// Sorts, sums duplicates and drops zeros. Throws std::out_of_range on a
  /// bad index.
  static SparseIntMatrix from_triplets(std::int64_t rows, std::int64_t cols,
                                       std::vector<Triplet> entries);
  static SparseIntMatrix identity(std::int64_t n);
  static SparseIntMatrix from_dense(const std::vector<std::vector<std::int64_t>>& dense);

  std::int64_t rows() const { return rows_; }
  std::int64_t cols() const { return cols_; }
  std::int64_t nnz() const { return static_cast<std::int64_t>(row_idx_.size()); }

  std::span<const std::int32_t> column_rows(std::int64_t c) const {
    return {row_idx_.data() + col_ptr_[c], row_idx_.data() + col_ptr_[c + 1]};
  }
  std::span<const std::int64_t> column_values(std::int64_t c) const {
    return {values_.data() + col_ptr_[c], values_.data() + col_ptr_[c + 1]};
  }

  std::vector<Triplet> triplets() const;
  SparseIntMatrix transpose() const;
  /// Entry (r, c) moves to (row_perm[r], col_perm[c]).
  SparseIntMatrix permuted(const std::vector<std::int64_t>& row_perm,
                           const std::vector<std::int64_t>& col_perm) const;
  /// Copy without the columns flagged in `drop` (one flag per column); the
  /// remaining columns keep their order.
  SparseIntMatrix drop_columns(const std::vector<char>& drop) const;
  /// this * other, exact in 64-bit (used for the d*d = 0 check).
  SparseIntMatrix multiply(const SparseIntMatrix& other) const;
  std::vector<std::vector<std::int64_t>> to_dense() const;

  bool operator==(const SparseIntMatrix&) const = default;

 private:
  std::int64_t rows_ = 0;
  std::int64_t cols_ = 0;
  std::vector<std::int64_t> col_ptr_{0};
  std::vector<std::int32_t> row_idx_;
  std::vector<std::int64_t> values_;
};

/// Rank over the rationals by fraction-free elimination with Markowitz-style
/// pivot choice. Runs in checked 64-bit arithmetic and restarts with
/// arbitrary precision on overflow.
std::int64_t rank_exact(const SparseIntMatrix& m);

/// Rank together with the rows that carried pivots. Those rows and some
/// `rank` columns form a nonsingular submatrix.
struct PivotedRank {
  std::int64_t rank = 0;
  std::vector<std::int64_t> pivot_rows;
};

PivotedRank rank_exact_pivots(const SparseIntMatrix& m);
PivotedRank rank_mod_p_pivots(const SparseIntMatrix& m, std::uint64_t p);

struct ModularRank {
  /// max over the primes; a lower bound for the rational rank
  std::int64_t rank = 0;
  bool agreement = true;
  std::vector<std::uint64_t> primes;
  std::vector<std::int64_t> ranks;
};

/// Rank modulo `primes` distinct random primes in (2^30, 2^31). The prime
/// choice is a deterministic function of `seed`.
ModularRank rank_modular(const SparseIntMatrix& m, int primes, std::uint64_t seed = 0x5eed);

/// Rank modulo one prime.
std::int64_t rank_mod_p(const SparseIntMatrix& m, std::uint64_t p);

bool is_prime(std::uint64_t n);
std::vector<std::uint64_t> random_primes(int count, std::uint64_t seed);

/// Chain-complex triplet text format: header "k rows cols nnz", then one
/// "row col value" line per entry, ascending (col, row).
void write_triplets(std::ostream& os, int degree, const SparseIntMatrix& m);
/// Returns the degree from the header. Throws std::runtime_error on
/// malformed input.
int read_triplets(std::istream& is, SparseIntMatrix& m);

}  // namespace autfn
