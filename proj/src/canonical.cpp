#include "autfn/canonical.hpp"

#include <algorithm>
#include <numeric>

namespace autfn {

namespace {

// Colors are cell start indices: an element's color is the number of
// elements in strictly smaller cells, so a discrete coloring is already a
// relabelling.
class Search {
 public:
  Search(const AbstractGraph& g, std::span<const int> user_colors)
      : g_(g), user_(user_colors), m_(g.size()), inc_(g.incidence()) {}

  void run() {
    std::vector<std::vector<int>> keys(m_);
    for (Element x = 0; x < m_; ++x) {
      const int user = user_.empty() ? 0 : user_[x];
      if (g_.is_vertex(x)) {
        auto it = g_.leaf_labels.find(x);
        keys[x] = {0, static_cast<int>(inc_[x].size()), it == g_.leaf_labels.end() ? 0 : it->second,
                   user};
      } else {
        keys[x] = {1, user};
      }
    }
    std::vector<int> colors = rank(keys);
    descend(colors);
  }

  CanonicalResult result() const {
    CanonicalResult out;
    out.form.relabel = best_perm_;
    out.form.code = best_code_;
    out.form.graph = relabel(g_, best_perm_);
    const Permutation best_inv = inverse(best_perm_);
    for (const auto& p : best_leaves_) {
      Permutation a(m_);
      for (Element x = 0; x < m_; ++x) a[x] = best_inv[p[x]];
      out.automorphisms.push_back(std::move(a));
    }
    std::sort(out.automorphisms.begin(), out.automorphisms.end());
    return out;
  }

 private:
  std::vector<int> rank(const std::vector<std::vector<int>>& keys) const {
    std::vector<int> order(m_);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) { return keys[a] < keys[b]; });
    std::vector<int> colors(m_);
    int start = 0;
    for (int i = 0; i < m_; ++i) {
      if (i > 0 && keys[order[i]] != keys[order[i - 1]]) start = i;
      colors[order[i]] = start;
    }
    return colors;
  }

  static int count_cells(const std::vector<int>& colors) {
    std::vector<int> sorted = colors;
    std::sort(sorted.begin(), sorted.end());
    return static_cast<int>(std::unique(sorted.begin(), sorted.end()) - sorted.begin());
  }

  void refine(std::vector<int>& colors) const {
    int cells = count_cells(colors);
    std::vector<std::vector<int>> keys(m_);
    while (cells < m_) {
      for (Element x = 0; x < m_; ++x) {
        auto& k = keys[x];
        k.clear();
        k.push_back(colors[x]);
        if (g_.is_vertex(x)) {
          for (Element h : inc_[x]) k.push_back(colors[h]);
          std::sort(k.begin() + 1, k.end());
        } else {
          k.push_back(colors[g_.sigma[x]]);
          k.push_back(colors[g_.t[x]]);
        }
      }
      colors = rank(keys);
      const int next = count_cells(colors);
      if (next == cells) break;
      cells = next;
    }
  }

  void descend(std::vector<int> colors) {
    refine(colors);
    // first non-singleton cell
    std::vector<int> size(m_, 0);
    for (int c : colors) ++size[c];
    int target = -1;
    for (int c = 0; c < m_; ++c)
      if (size[c] > 1) {
        target = c;
        break;
      }
    if (target < 0) {
      leaf(colors);
      return;
    }
    for (Element x = 0; x < m_; ++x) {
      if (colors[x] != target) continue;
      std::vector<int> next = colors;
      for (Element y = 0; y < m_; ++y)
        if (colors[y] == target && y != x) next[y] = target + 1;
      descend(std::move(next));
    }
  }

  void leaf(const std::vector<int>& perm) {
    const Permutation inv = inverse(perm);
    std::vector<int> code;
    code.reserve(4 * m_ + 1);
    code.push_back(m_);
    for (int p = 0; p < m_; ++p) code.push_back(perm[g_.sigma[inv[p]]]);
    for (int p = 0; p < m_; ++p) code.push_back(perm[g_.t[inv[p]]]);
    for (int p = 0; p < m_; ++p) {
      auto it = g_.leaf_labels.find(inv[p]);
      code.push_back(it == g_.leaf_labels.end() ? 0 : it->second);
    }
    if (!user_.empty())
      for (int p = 0; p < m_; ++p) code.push_back(user_[inv[p]]);

    if (best_leaves_.empty() || code < best_code_) {
      best_code_ = std::move(code);
      best_perm_ = perm;
      best_leaves_.assign(1, perm);
    } else if (code == best_code_) {
      best_leaves_.push_back(perm);
    }
  }

  const AbstractGraph& g_;
  std::span<const int> user_;
  int m_;
  std::vector<std::vector<Element>> inc_;
  std::vector<int> best_code_;
  Permutation best_perm_;
  std::vector<Permutation> best_leaves_;
};

}  // namespace

std::string CanonicalForm::hex() const {
  static constexpr char digits[] = "0123456789abcdef";
  std::string out;
  out.reserve(4 * code.size());
  for (int v : code) {
    const unsigned w = static_cast<unsigned>(v) & 0xffffu;
    for (int shift = 12; shift >= 0; shift -= 4) out.push_back(digits[(w >> shift) & 0xf]);
  }
  return out;
}

CanonicalResult canonicalize(const AbstractGraph& g, std::span<const int> colors) {
  Search s(g, colors);
  s.run();
  return s.result();
}

CanonicalForm canonical_form(const AbstractGraph& g) { return canonicalize(g).form; }

CanonicalForm canonical_form(const AbstractGraph& g, std::span<const int> colors) {
  return canonicalize(g, colors).form;
}

std::vector<Permutation> automorphism_group(const AbstractGraph& g) {
  return canonicalize(g).automorphisms;
}

std::vector<Permutation> automorphism_group(const AbstractGraph& g, std::span<const int> colors) {
  return canonicalize(g, colors).automorphisms;
}

AbstractGraph relabel(const AbstractGraph& g, const Permutation& perm) {
  const int m = g.size();
  AbstractGraph out;
  out.sigma.resize(m);
  out.t.resize(m);
  for (Element x = 0; x < m; ++x) {
    out.sigma[perm[x]] = perm[g.sigma[x]];
    out.t[perm[x]] = perm[g.t[x]];
  }
  for (const auto& [v, label] : g.leaf_labels) out.leaf_labels[perm[v]] = label;
  return out;
}

Permutation inverse(const Permutation& p) {
  Permutation inv(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) inv[p[i]] = static_cast<Element>(i);
  return inv;
}

Permutation then(const Permutation& a, const Permutation& b) {
  Permutation out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = b[a[i]];
  return out;
}

bool isomorphic(const AbstractGraph& a, const AbstractGraph& b) {
  if (a.size() != b.size()) return false;
  return canonical_form(a).code == canonical_form(b).code;
}

}  // namespace autfn
