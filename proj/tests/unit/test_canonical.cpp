#include "doctest.h"

#include <algorithm>
#include <numeric>
#include <random>
#include <set>

#include "../oracles/brute_graph.hpp"
#include "autfn/canonical.hpp"
#include "autfn/enumeration.hpp"

using namespace autfn;

namespace {

AbstractGraph shuffled(const AbstractGraph& g, std::uint64_t seed) {
  Permutation p(g.size());
  std::iota(p.begin(), p.end(), 0);
  std::mt19937_64 rng(seed);
  std::shuffle(p.begin(), p.end(), rng);
  return relabel(g, p);
}

}  // namespace

TEST_CASE("canonical form is invariant under relabelling") {
  for (const auto& g : {make_theta(), make_rose(2), make_dumbbell(), make_labelled_edge(), make_rose(3)}) {
    const auto code = canonical_form(g).code;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) CHECK(canonical_form(shuffled(g, seed)).code == code);
  }
}

TEST_CASE("theta and dumbbell differ") {
  CHECK(canonical_form(make_theta()).code != canonical_form(make_dumbbell()).code);
  CHECK_FALSE(isomorphic(make_theta(), make_dumbbell()));
}

TEST_CASE("rose-2 with its loops swapped is the same class") {
  const auto g = make_rose(2);
  // swap the two loops: elements 1,2 <-> 3,4
  const Permutation swap{0, 3, 4, 1, 2};
  const auto h = relabel(g, swap);
  CHECK(oracle::brute_isomorphic(g, h));
  CHECK(canonical_form(g).code == canonical_form(h).code);
}

TEST_CASE("relabel maps the graph onto its canonical representative") {
  for (const auto& g : {make_theta(), make_dumbbell(), make_labelled_edge()}) {
    const auto cf = canonical_form(shuffled(g, 7));
    CHECK(relabel(shuffled(g, 7), cf.relabel) == cf.graph);
    CHECK(validate(cf.graph).ok());
  }
}

TEST_CASE("canonical form is idempotent") {
  for (const auto& g : enumerate_graphs(2, 1).graphs) {
    const auto cf = canonical_form(g);
    CHECK(cf.graph == g);
    CHECK(canonical_form(cf.graph).graph == cf.graph);
  }
}

TEST_CASE("automorphism group orders") {
  CHECK(automorphism_group(make_rose(2)).size() == 8);
  CHECK(automorphism_group(make_theta()).size() == 12);
  CHECK(automorphism_group(make_labelled_edge()).size() == 1);
  CHECK(automorphism_group(make_dumbbell()).size() == 8);
}

TEST_CASE("automorphism group matches brute force and is a group") {
  for (const auto& g : {make_rose(2), make_theta(), make_dumbbell(), make_rose(3)}) {
    auto ours = automorphism_group(g);
    auto brute = oracle::brute_automorphisms(g);
    std::set<Permutation> a(ours.begin(), ours.end()), b(brute.begin(), brute.end());
    CHECK(a == b);
    Permutation id(g.size());
    std::iota(id.begin(), id.end(), 0);
    CHECK(ours.front() == id);
    for (const auto& p : ours) {
      CHECK(a.contains(inverse(p)));
      for (const auto& q : ours) CHECK(a.contains(then(p, q)));
    }
  }
}

TEST_CASE("colors refine the canonical form") {
  const auto g = make_theta();
  std::vector<int> c1(g.size(), 0), c2(g.size(), 0);
  c1[2] = c1[3] = 1;  // edge 0 colored
  c2[6] = c2[7] = 1;  // edge 2 colored
  CHECK(canonical_form(g, c1).code == canonical_form(g, c2).code);
  CHECK(canonical_form(g, c1).code != canonical_form(g).code);
  CHECK(automorphism_group(g, c1).size() == 4);
}

TEST_CASE("canonical forms agree with brute isomorphism on catalog pairs") {
  std::vector<AbstractGraph> gs;
  for (auto [n, s] : {std::pair{2, 0}, {1, 1}, {2, 1}, {0, 3}}) {
    for (const auto& g : enumerate_graphs(n, s).graphs) {
      gs.push_back(g);
      gs.push_back(shuffled(g, 3));
    }
  }
  for (std::size_t i = 0; i < gs.size(); ++i)
    for (std::size_t j = i; j < gs.size(); ++j)
      CHECK((canonical_form(gs[i]).code == canonical_form(gs[j]).code) == oracle::brute_isomorphic(gs[i], gs[j]));
}
