#include "autfn/linalg.hpp"

#include <algorithm>
#include <istream>
#include <numeric>
#include <ostream>
#include <queue>
#include <random>
#include <sstream>
#include <stdexcept>

#include <gmpxx.h>

namespace autfn {

SparseIntMatrix::SparseIntMatrix(std::int64_t rows, std::int64_t cols)
    : rows_(rows), cols_(cols), col_ptr_(cols + 1, 0) {}

SparseIntMatrix SparseIntMatrix::from_triplets(std::int64_t rows, std::int64_t cols,
                                               std::vector<Triplet> entries) {
  for (const auto& e : entries)
    if (e.row < 0 || e.row >= rows || e.col < 0 || e.col >= cols)
      throw std::out_of_range("SparseIntMatrix: entry index out of range");
  std::sort(entries.begin(), entries.end(), [](const Triplet& a, const Triplet& b) {
    return a.col != b.col ? a.col < b.col : a.row < b.row;
  });
  SparseIntMatrix m(rows, cols);
  m.row_idx_.reserve(entries.size());
  m.values_.reserve(entries.size());
  std::size_t i = 0;
  for (std::int64_t c = 0; c < cols; ++c) {
    while (i < entries.size() && entries[i].col == c) {
      const std::int64_t r = entries[i].row;
      std::int64_t v = 0;
      for (; i < entries.size() && entries[i].col == c && entries[i].row == r; ++i) v += entries[i].value;
      if (v != 0) {
        m.row_idx_.push_back(static_cast<std::int32_t>(r));
        m.values_.push_back(v);
      }
    }
    m.col_ptr_[c + 1] = static_cast<std::int64_t>(m.row_idx_.size());
  }
  return m;
}

SparseIntMatrix SparseIntMatrix::identity(std::int64_t n) {
  std::vector<Triplet> t;
  for (std::int64_t i = 0; i < n; ++i) t.push_back({i, i, 1});
  return from_triplets(n, n, std::move(t));
}

SparseIntMatrix SparseIntMatrix::from_dense(const std::vector<std::vector<std::int64_t>>& dense) {
  const std::int64_t rows = static_cast<std::int64_t>(dense.size());
  const std::int64_t cols = rows ? static_cast<std::int64_t>(dense[0].size()) : 0;
  std::vector<Triplet> t;
  for (std::int64_t r = 0; r < rows; ++r)
    for (std::int64_t c = 0; c < cols; ++c)
      if (dense[r][c] != 0) t.push_back({r, c, dense[r][c]});
  return from_triplets(rows, cols, std::move(t));
}

std::vector<Triplet> SparseIntMatrix::triplets() const {
  std::vector<Triplet> out;
  out.reserve(row_idx_.size());
  for (std::int64_t c = 0; c < cols_; ++c)
    for (std::int64_t k = col_ptr_[c]; k < col_ptr_[c + 1]; ++k) out.push_back({row_idx_[k], c, values_[k]});
  return out;
}

SparseIntMatrix SparseIntMatrix::transpose() const {
  auto t = triplets();
  for (auto& e : t) std::swap(e.row, e.col);
  return from_triplets(cols_, rows_, std::move(t));
}

SparseIntMatrix SparseIntMatrix::drop_columns(const std::vector<char>& drop) const {
  if (static_cast<std::int64_t>(drop.size()) != cols_) throw std::invalid_argument("drop_columns: one flag per column");
  SparseIntMatrix out(rows_, 0);
  for (std::int64_t c = 0; c < cols_; ++c) {
    if (drop[c]) continue;
    for (std::int64_t i = col_ptr_[c]; i < col_ptr_[c + 1]; ++i) {
      out.row_idx_.push_back(row_idx_[i]);
      out.values_.push_back(values_[i]);
    }
    out.col_ptr_.push_back(static_cast<std::int64_t>(out.row_idx_.size()));
    ++out.cols_;
  }
  return out;
}

SparseIntMatrix SparseIntMatrix::permuted(const std::vector<std::int64_t>& row_perm,
                                          const std::vector<std::int64_t>& col_perm) const {
  auto t = triplets();
  for (auto& e : t) {
    e.row = row_perm.at(e.row);
    e.col = col_perm.at(e.col);
  }
  return from_triplets(rows_, cols_, std::move(t));
}

SparseIntMatrix SparseIntMatrix::multiply(const SparseIntMatrix& other) const {
  if (cols_ != other.rows_) throw std::invalid_argument("SparseIntMatrix::multiply: shape mismatch");
  std::vector<Triplet> out;
  std::vector<std::int64_t> acc(rows_, 0);
  std::vector<std::int64_t> touched;
  std::vector<char> mark(rows_, 0);
  for (std::int64_t j = 0; j < other.cols_; ++j) {
    touched.clear();
    for (std::int64_t q = other.col_ptr_[j]; q < other.col_ptr_[j + 1]; ++q) {
      const std::int64_t k = other.row_idx_[q];
      const std::int64_t b = other.values_[q];
      for (std::int64_t p = col_ptr_[k]; p < col_ptr_[k + 1]; ++p) {
        const std::int64_t r = row_idx_[p];
        std::int64_t prod = 0;
        if (__builtin_mul_overflow(values_[p], b, &prod) || __builtin_add_overflow(acc[r], prod, &acc[r]))
          throw std::overflow_error("SparseIntMatrix::multiply: 64-bit overflow");
        if (!mark[r]) {
          mark[r] = 1;
          touched.push_back(r);
        }
      }
    }
    for (std::int64_t r : touched) {
      if (acc[r] != 0) out.push_back({r, j, acc[r]});
      acc[r] = 0;
      mark[r] = 0;
    }
  }
  return from_triplets(rows_, other.cols_, std::move(out));
}

std::vector<std::vector<std::int64_t>> SparseIntMatrix::to_dense() const {
  std::vector<std::vector<std::int64_t>> d(rows_, std::vector<std::int64_t>(cols_, 0));
  for (const auto& e : triplets()) d[e.row][e.col] = e.value;
  return d;
}

namespace {

struct Overflow {};

// Arithmetic policies for the eliminator. combine(alpha, y, beta, x) is
// alpha*y - beta*x; coefficients(a, b) picks alpha, beta so that the pivot
// column entry cancels.
struct ModRing {
  using Value = std::uint32_t;
  std::uint64_t p;

  Value from_int(std::int64_t v) const {
    const std::int64_t r = v % static_cast<std::int64_t>(p);
    return static_cast<Value>(r < 0 ? r + static_cast<std::int64_t>(p) : r);
  }
  static bool is_zero(Value v) { return v == 0; }
  static bool is_unit_magnitude(Value) { return true; }
  Value inv(Value a) const {
    std::uint64_t result = 1, base = a, e = p - 2;
    while (e) {
      if (e & 1) result = result * base % p;
      base = base * base % p;
      e >>= 1;
    }
    return static_cast<Value>(result);
  }
  std::pair<Value, Value> coefficients(Value a, Value b) const {
    return {1, static_cast<Value>(static_cast<std::uint64_t>(b) * inv(a) % p)};
  }
  Value combine(Value alpha, Value y, Value beta, Value x) const {
    const std::uint64_t lhs = static_cast<std::uint64_t>(alpha) * y % p;
    const std::uint64_t rhs = static_cast<std::uint64_t>(beta) * x % p;
    return static_cast<Value>((lhs + p - rhs) % p);
  }
  template <class Row>
  void normalize(Row&) const {}
};

struct CheckedInt {
  using Value = std::int64_t;
  static Value from_int(std::int64_t v) { return v; }
  static bool is_zero(Value v) { return v == 0; }
  static bool is_unit_magnitude(Value v) { return v == 1 || v == -1; }
  static std::pair<Value, Value> coefficients(Value a, Value b) {
    if (b % a == 0) return {1, b / a};
    const Value g = std::gcd(a, b);
    return {a / g, b / g};
  }
  static Value combine(Value alpha, Value y, Value beta, Value x) {
    Value l = 0, r = 0, out = 0;
    if (__builtin_mul_overflow(alpha, y, &l) || __builtin_mul_overflow(beta, x, &r) ||
        __builtin_sub_overflow(l, r, &out))
      throw Overflow{};
    return out;
  }
  template <class Row>
  static void normalize(Row& row) {
    Value g = 0;
    for (const auto& e : row) {
      g = std::gcd(g, e.val);
      if (g == 1) return;
    }
    if (g > 1)
      for (auto& e : row) e.val /= g;
  }
};

struct BigInt {
  using Value = mpz_class;
  static Value from_int(std::int64_t v) {
    mpz_class z;
    mpz_set_si(z.get_mpz_t(), static_cast<long>(v));
    return z;
  }
  static bool is_zero(const Value& v) { return sgn(v) == 0; }
  static bool is_unit_magnitude(const Value& v) { return mpz_cmpabs_ui(v.get_mpz_t(), 1) == 0; }
  static std::pair<Value, Value> coefficients(const Value& a, const Value& b) {
    if (mpz_divisible_p(b.get_mpz_t(), a.get_mpz_t())) return {Value(1), Value(b / a)};
    const Value g = gcd(a, b);
    return {Value(a / g), Value(b / g)};
  }
  static Value combine(const Value& alpha, const Value& y, const Value& beta, const Value& x) {
    return alpha * y - beta * x;
  }
  template <class Row>
  static void normalize(Row& row) {
    Value g = 0;
    for (const auto& e : row) {
      g = gcd(g, e.val);
      if (g == 1) return;
    }
    if (g > 1)
      for (auto& e : row) e.val /= g;
  }
};

// Sparse Gaussian elimination on the columns of the input (each column is a
// working row). Pivot column = fewest active entries; pivot row = shortest,
// preferring unit entries. All ties break on the smaller index, so the run
// is deterministic.
template <class Ring>
class Eliminator {
 public:
  using Value = typename Ring::Value;
  struct Entry {
    std::int32_t col;
    Value val;
  };
  using Row = std::vector<Entry>;

  Eliminator(const SparseIntMatrix& m, Ring ring) : ring_(std::move(ring)) {
    const std::int64_t nrows = m.cols();
    const std::int64_t ncols = m.rows();
    rows_.resize(nrows);
    active_.assign(nrows, 1);
    col_rows_.resize(ncols);
    col_count_.assign(ncols, 0);
    col_done_.assign(ncols, 0);
    stamp_.assign(nrows, -1);
    for (std::int64_t r = 0; r < nrows; ++r) {
      auto rs = m.column_rows(r);
      auto vs = m.column_values(r);
      Row& row = rows_[r];
      for (std::size_t k = 0; k < rs.size(); ++k) {
        Value v = ring_.from_int(vs[k]);
        if (Ring::is_zero(v)) continue;
        row.push_back({rs[k], std::move(v)});
        col_rows_[rs[k]].push_back(static_cast<std::int32_t>(r));
        ++col_count_[rs[k]];
      }
    }
    for (std::int64_t c = 0; c < ncols; ++c)
      if (col_count_[c] > 0) queue_.push({col_count_[c], static_cast<std::int32_t>(c)});
  }

  PivotedRank run() {
    PivotedRank out;
    std::int64_t& rank = out.rank;
    std::vector<std::int32_t> members;
    while (!queue_.empty()) {
      const auto [count, c] = queue_.top();
      queue_.pop();
      if (col_done_[c] || count != col_count_[c]) continue;
      col_done_[c] = 1;
      if (count == 0) continue;

      gather(c, members);
      std::int32_t pivot = -1;
      bool pivot_unit = false;
      for (std::int32_t r : members) {
        const bool unit = Ring::is_unit_magnitude(value_at(rows_[r], c));
        if (pivot < 0 || (unit && !pivot_unit) ||
            (unit == pivot_unit && rows_[r].size() < rows_[pivot].size())) {
          pivot = r;
          pivot_unit = unit;
        }
      }
      ++rank;
      out.pivot_rows.push_back(c);
      active_[pivot] = 0;
      for (const auto& e : rows_[pivot]) {
        if (--col_count_[e.col] >= 0 && !col_done_[e.col]) queue_.push({col_count_[e.col], e.col});
      }
      const Value a = value_at(rows_[pivot], c);
      for (std::int32_t r : members) {
        if (r == pivot) continue;
        eliminate(rows_[pivot], a, r, c);
      }
      Row().swap(rows_[pivot]);
    }
    std::sort(out.pivot_rows.begin(), out.pivot_rows.end());
    return out;
  }

 private:
  static const Value& value_at(const Row& row, std::int32_t c) {
    auto it = std::lower_bound(row.begin(), row.end(), c,
                               [](const Entry& e, std::int32_t col) { return e.col < col; });
    return it->val;
  }

  static bool contains(const Row& row, std::int32_t c) {
    auto it = std::lower_bound(row.begin(), row.end(), c,
                               [](const Entry& e, std::int32_t col) { return e.col < col; });
    return it != row.end() && it->col == c;
  }

  // Active rows containing column c, in ascending order; also compacts the
  // column's row list.
  void gather(std::int32_t c, std::vector<std::int32_t>& out) {
    out.clear();
    ++epoch_;
    for (std::int32_t r : col_rows_[c]) {
      if (!active_[r] || stamp_[r] == epoch_ || !contains(rows_[r], c)) continue;
      stamp_[r] = epoch_;
      out.push_back(r);
    }
    std::sort(out.begin(), out.end());
    col_rows_[c] = out;
  }

  void eliminate(const Row& pivot, const Value& a, std::int32_t r, std::int32_t c) {
    Row& row = rows_[r];
    const auto [alpha, beta] = ring_.coefficients(a, value_at(row, c));
    Row out;
    out.reserve(row.size() + pivot.size());
    std::size_t i = 0, j = 0;
    const Value zero = ring_.from_int(0);
    while (i < row.size() || j < pivot.size()) {
      if (j == pivot.size() || (i < row.size() && row[i].col < pivot[j].col)) {
        out.push_back({row[i].col, ring_.combine(alpha, row[i].val, beta, zero)});
        ++i;
      } else if (i == row.size() || pivot[j].col < row[i].col) {
        // new column in this row
        out.push_back({pivot[j].col, ring_.combine(alpha, zero, beta, pivot[j].val)});
        if (!col_done_[pivot[j].col]) {
          col_rows_[pivot[j].col].push_back(r);
          ++col_count_[pivot[j].col];
          queue_.push({col_count_[pivot[j].col], pivot[j].col});
        } else {
          ++col_count_[pivot[j].col];
        }
        ++j;
      } else {
        Value v = ring_.combine(alpha, row[i].val, beta, pivot[j].val);
        if (Ring::is_zero(v)) {
          --col_count_[row[i].col];
          if (!col_done_[row[i].col]) queue_.push({col_count_[row[i].col], row[i].col});
        } else {
          out.push_back({row[i].col, std::move(v)});
        }
        ++i;
        ++j;
      }
    }
    ring_.normalize(out);
    row = std::move(out);
  }

  Ring ring_;
  std::vector<Row> rows_;
  std::vector<char> active_;
  std::vector<std::vector<std::int32_t>> col_rows_;
  std::vector<std::int32_t> col_count_;
  std::vector<char> col_done_;
  std::vector<std::int64_t> stamp_;
  std::int64_t epoch_ = 0;
  std::priority_queue<std::pair<std::int32_t, std::int32_t>, std::vector<std::pair<std::int32_t, std::int32_t>>,
                      std::greater<>>
      queue_;
};

std::uint64_t mul_mod(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
  return static_cast<std::uint64_t>(static_cast<unsigned __int128>(a) * b % m);
}

std::uint64_t pow_mod(std::uint64_t b, std::uint64_t e, std::uint64_t m) {
  std::uint64_t r = 1;
  b %= m;
  while (e) {
    if (e & 1) r = mul_mod(r, b, m);
    b = mul_mod(b, b, m);
    e >>= 1;
  }
  return r;
}

}  // namespace

PivotedRank rank_exact_pivots(const SparseIntMatrix& m) {
  try {
    return Eliminator<CheckedInt>(m, CheckedInt{}).run();
  } catch (const Overflow&) {
    return Eliminator<BigInt>(m, BigInt{}).run();
  }
}

PivotedRank rank_mod_p_pivots(const SparseIntMatrix& m, std::uint64_t p) {
  if (p < 3 || p >= (1ull << 32) || !is_prime(p)) throw std::invalid_argument("rank_mod_p: need an odd prime < 2^32");
  return Eliminator<ModRing>(m, ModRing{p}).run();
}

std::int64_t rank_exact(const SparseIntMatrix& m) { return rank_exact_pivots(m).rank; }

std::int64_t rank_mod_p(const SparseIntMatrix& m, std::uint64_t p) { return rank_mod_p_pivots(m, p).rank; }

bool is_prime(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t q : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
    if (n % q == 0) return n == q;
  }
  std::uint64_t d = n - 1;
  int s = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++s;
  }
  // deterministic for 64-bit inputs
  for (std::uint64_t a : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
    std::uint64_t x = pow_mod(a, d, n);
    if (x == 1 || x == n - 1) continue;
    bool composite = true;
    for (int i = 1; i < s && composite; ++i) {
      x = mul_mod(x, x, n);
      if (x == n - 1) composite = false;
    }
    if (composite) return false;
  }
  return true;
}

std::vector<std::uint64_t> random_primes(int count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::uint64_t> dist((1ull << 30) + 1, (1ull << 31) - 1);
  std::vector<std::uint64_t> out;
  while (static_cast<int>(out.size()) < count) {
    const std::uint64_t candidate = dist(rng) | 1ull;
    if (is_prime(candidate) && std::find(out.begin(), out.end(), candidate) == out.end()) out.push_back(candidate);
  }
  return out;
}

ModularRank rank_modular(const SparseIntMatrix& m, int primes, std::uint64_t seed) {
  if (primes < 1) throw std::invalid_argument("rank_modular: need at least one prime");
  ModularRank out;
  out.primes = random_primes(primes, seed);
  for (std::uint64_t p : out.primes) out.ranks.push_back(rank_mod_p(m, p));
  out.rank = *std::max_element(out.ranks.begin(), out.ranks.end());
  out.agreement = std::all_of(out.ranks.begin(), out.ranks.end(), [&](std::int64_t r) { return r == out.ranks[0]; });
  return out;
}

void write_triplets(std::ostream& os, int degree, const SparseIntMatrix& m) {
  os << degree << ' ' << m.rows() << ' ' << m.cols() << ' ' << m.nnz() << '\n';
  for (const auto& e : m.triplets()) os << e.row << ' ' << e.col << ' ' << e.value << '\n';
}

int read_triplets(std::istream& is, SparseIntMatrix& m) {
  std::string line;
  if (!std::getline(is, line)) throw std::runtime_error("read_triplets: missing header");
  std::istringstream header(line);
  long long degree = 0, rows = 0, cols = 0, nnz = 0;
  if (!(header >> degree >> rows >> cols >> nnz) || rows < 0 || cols < 0 || nnz < 0)
    throw std::runtime_error("read_triplets: malformed header");
  std::vector<Triplet> entries;
  entries.reserve(static_cast<std::size_t>(nnz));
  for (long long i = 0; i < nnz; ++i) {
    Triplet t{};
    if (!(is >> t.row >> t.col >> t.value)) throw std::runtime_error("read_triplets: truncated entry list");
    entries.push_back(t);
  }
  try {
    m = SparseIntMatrix::from_triplets(rows, cols, std::move(entries));
  } catch (const std::out_of_range& e) {
    throw std::runtime_error(std::string("read_triplets: ") + e.what());
  }
  return static_cast<int>(degree);
}

}  // namespace autfn
