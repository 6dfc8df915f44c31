#include "doctest.h"

#include <stdexcept>

#include "autfn/canonical.hpp"
#include "autfn/enumeration.hpp"
#include "autfn/morphism.hpp"

using namespace autfn;

namespace {

bool same_class(const AbstractGraph& a, const AbstractGraph& b) {
  return canonical_form(a).code == canonical_form(b).code;
}

std::vector<AbstractGraph> small_graphs() {
  std::vector<AbstractGraph> out;
  for (auto [n, s] : {std::pair{2, 0}, {2, 1}, {3, 0}, {1, 2}, {0, 3}, {3, 1}})
    for (const auto& g : enumerate_graphs(n, s).graphs) out.push_back(g);
  return out;
}

}  // namespace

TEST_CASE("theta collapsed along one edge is rose-2") {
  const auto c = collapse_forest(make_theta(), Forest{{0}});
  CHECK(same_class(c.quotient, make_rose(2)));
  CHECK(is_graph_epimorphism(c.map).ok());
}

TEST_CASE("dumbbell collapsed along its bridge is rose-2") {
  const auto g = make_dumbbell();
  REQUIRE(enumerate_forests(g).size() == 1);
  const auto c = collapse_forest(g, enumerate_forests(g)[0]);
  CHECK(same_class(c.quotient, make_rose(2)));
  CHECK(is_graph_epimorphism(c.map).ok());
}

TEST_CASE("collapsing the empty forest is the identity") {
  const auto g = make_theta();
  const auto c = collapse_forest(g, Forest{});
  CHECK(c.quotient == g);
  CHECK(c.map == identity_map(g));
}

TEST_CASE("identity is an epimorphism") {
  for (const auto& g : {make_theta(), make_rose(2), make_labelled_edge()})
    CHECK(is_graph_epimorphism(identity_map(g)).ok());
}

TEST_CASE("folding two theta edges onto one loop is not an epimorphism") {
  CellularMap m{make_theta(), make_rose(2), {0, 0, 1, 2, 1, 2, 3, 4}};
  REQUIRE(is_cellular(m));
  const auto r = is_graph_epimorphism(m);
  CHECK_FALSE(r.ok());
  CHECK(r.reason == EpiFailure::half_edge_preimage);
}

TEST_CASE("non-cellular maps are rejected with their own reason") {
  CellularMap m{make_theta(), make_rose(2), {0, 0, 1, 1, 2, 2, 3, 4}};
  CHECK(is_graph_epimorphism(m).reason == EpiFailure::not_cellular);
}

TEST_CASE("collapse rejects loops, leaf edges and cycles") {
  CHECK_THROWS_AS(collapse_forest(make_rose(2), Forest{{0}}), std::invalid_argument);
  CHECK_THROWS_AS(collapse_forest(make_labelled_edge(), Forest{{0}}), std::invalid_argument);
  CHECK_THROWS_AS(collapse_forest(make_theta(), Forest{{0, 1}}), std::invalid_argument);
  CHECK(check_forest(make_rose(2), Forest{{0}}) == ForestError::loop);
  CHECK(check_forest(make_labelled_edge(), Forest{{0}}) == ForestError::leaf_edge);
  CHECK(check_forest(make_theta(), Forest{{0, 1}}) == ForestError::cycle);
  CHECK(check_forest(make_theta(), Forest{{5}}) == ForestError::bad_edge_id);
}

TEST_CASE("collapse preserves rank and leaves and drops |F| edges") {
  for (const auto& g : small_graphs()) {
    const auto inv = invariants(g);
    for (const auto& f : enumerate_forests(g)) {
      const auto c = collapse_forest(g, f);
      const auto q = invariants(c.quotient);
      CHECK(q.betti == inv.betti);
      CHECK(q.num_edges == inv.num_edges - f.size());
      CHECK(q.leaf_count == inv.leaf_count);
      CHECK(is_graph_epimorphism(c.map).ok());
      // labels travel with their leaves
      for (auto [v, label] : g.leaf_labels) CHECK(c.quotient.leaf_labels.at(c.map.f[v]) == label);
    }
  }
}

TEST_CASE("compose with the identity") {
  const auto c = collapse_forest(make_theta(), Forest{{1}});
  CHECK(compose(identity_map(make_theta()), c.map) == c.map);
  CHECK(compose(c.map, identity_map(c.quotient)) == c.map);
  CHECK_THROWS_AS(compose(c.map, c.map), std::invalid_argument);
}

TEST_CASE("compose with an isomorphism relabels the codomain") {
  const auto c = collapse_forest(make_theta(), Forest{{0}});
  const auto cf = canonical_form(c.quotient);
  CellularMap iso{c.quotient, cf.graph, cf.relabel};
  const auto m = compose(c.map, iso);
  CHECK(is_graph_epimorphism(m).ok());
  CHECK(m.codomain == cf.graph);
}

TEST_CASE("successive collapses equal the one-shot collapse") {
  for (const auto& g : small_graphs()) {
    for (const auto& f : enumerate_forests(g)) {
      if (f.size() < 2) continue;
      const auto first = collapse_forest(g, Forest{{f.edges[0]}});
      Forest rest{std::vector<int>(f.edges.begin() + 1, f.edges.end())};
      const auto image = image_forest(first.map, rest);
      CHECK(image.size() == rest.size());
      const auto second = collapse_forest(first.quotient, image);
      const auto both = compose(first.map, second.map);
      CHECK(is_graph_epimorphism(both).ok());
      CHECK(same_class(second.quotient, collapse_forest(g, f).quotient));
    }
  }
}

TEST_CASE("nested quotients agree: (G/F1)/(F2/F1) = G/F2") {
  for (const auto& g : small_graphs()) {
    const auto forests = enumerate_forests(g);
    for (const auto& f1 : forests)
      for (const auto& f2 : forests) {
        if (f1 == f2 || !is_subforest(f1, f2)) continue;
        const auto c1 = collapse_forest(g, f1);
        const auto c2 = collapse_forest(c1.quotient, image_forest(c1.map, f2));
        CHECK(same_class(c2.quotient, collapse_forest(g, f2).quotient));
      }
  }
}

TEST_CASE("factor_as_collapses round-trips") {
  SUBCASE("identity") {
    const auto fac = factor_as_collapses(identity_map(make_theta()));
    CHECK(fac.collapses.empty());
    CHECK(compose_all(fac) == identity_map(make_theta()));
  }
  SUBCASE("one theta edge") {
    const auto m = collapse_forest(make_theta(), Forest{{2}}).map;
    const auto fac = factor_as_collapses(m);
    CHECK(fac.collapses.size() == 1);
    CHECK(compose_all(fac) == m);
  }
  SUBCASE("every forest of the small catalogs, followed by canonicalization") {
    for (const auto& g : small_graphs())
      for (const auto& f : enumerate_forests(g)) {
        const auto c = collapse_forest(g, f);
        const auto cf = canonical_form(c.quotient);
        const auto m = compose(c.map, CellularMap{c.quotient, cf.graph, cf.relabel});
        const auto fac = factor_as_collapses(m);
        CHECK(static_cast<int>(fac.collapses.size()) == f.size());
        CHECK(compose_all(fac) == m);
      }
  }
}

TEST_CASE("chain levels round-trip") {
  const auto g = enumerate_graphs(3, 0).graphs.back();
  for (const auto& c : enumerate_forest_chains(g, 4)) {
    CHECK(is_valid_chain(g, c));
    CHECK(chain_from_levels(chain_levels(g, c)) == c);
  }
}
