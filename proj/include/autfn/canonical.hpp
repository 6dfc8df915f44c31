#pragma once

#include <span>
#include <string>
#include <vector>

#include "autfn/graph.hpp"

namespace autfn {

/// A bijection of elements, perm[x] = image of x.
using Permutation = std::vector<Element>;

struct CanonicalForm {
  /// relabel[x] = position of x in the canonical representative.
  Permutation relabel;
  AbstractGraph graph;
  /// Serialized (m, sigma, t, labels[, colors]) of the representative; the
  /// comparison key for isomorphism.
  std::vector<int> code;

  /// Lowercase hex of the code, 16-bit big-endian words.
  std::string hex() const;
};

/// Canonical labelling by individualization/refinement. Two graphs get equal
/// codes iff an element bijection commutes with sigma and t and preserves
/// leaf labels (and the optional per-element colors).
CanonicalForm canonical_form(const AbstractGraph& g);
CanonicalForm canonical_form(const AbstractGraph& g, std::span<const int> colors);

/// All element bijections commuting with sigma and t that fix the labelled
/// leaves (and preserve colors). The identity comes first.
std::vector<Permutation> automorphism_group(const AbstractGraph& g);
std::vector<Permutation> automorphism_group(const AbstractGraph& g, std::span<const int> colors);

/// Canonical form together with the automorphism group, from one search.
struct CanonicalResult {
  CanonicalForm form;
  /// Automorphisms of the input graph.
  std::vector<Permutation> automorphisms;
};
CanonicalResult canonicalize(const AbstractGraph& g, std::span<const int> colors = {});

/// Applies a relabelling to a graph: element x of g becomes perm[x].
AbstractGraph relabel(const AbstractGraph& g, const Permutation& perm);

Permutation inverse(const Permutation& p);
/// (a then b)[x] = b[a[x]].
Permutation then(const Permutation& a, const Permutation& b);

bool isomorphic(const AbstractGraph& a, const AbstractGraph& b);

}  // namespace autfn
