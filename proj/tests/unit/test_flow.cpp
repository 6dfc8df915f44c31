#include "doctest.h"

#include <cmath>
#include <stdexcept>

#include "autfn/canonical.hpp"
#include "autfn/flow.hpp"
#include "autfn/morphism.hpp"

using namespace autfn;

namespace {

// A single edge from the origin straight out to |x| = 4, unlabelled inner
// vertex at the origin.
EmbeddedGraph radial_edge() {
  EmbeddedGraph g;
  g.vertices = {{0, 0, 0}, {4, 0, 0}};
  g.edges.push_back(straight_edge(0, 1, g.vertices[0], g.vertices[1], 33));
  g.leaf_labels[1] = 1;
  return g;
}

EmbeddedGraph translated(const EmbeddedGraph& g, const Point& v) {
  EmbeddedGraph h = g;
  for (auto& p : h.vertices)
    for (int i = 0; i < 3; ++i) p[i] += v[i];
  for (auto& e : h.edges)
    for (auto& p : e.points)
      for (int i = 0; i < 3; ++i) p[i] += v[i];
  return h;
}

SmallnessSpec identity_spec(const EmbeddedGraph& g, double eps, Box K) {
  SmallnessSpec s;
  s.epsilon = eps;
  s.K = K;
  for (int e = 0; e < static_cast<int>(g.edges.size()); ++e)
    for (int i = 0; i < static_cast<int>(g.edges[e].points.size()); ++i) s.correspondence.push_back({e, i, e, i});
  return s;
}

const Box kUnitBox{{-1, -1, 0}, {1, 1, 0}};

}  // namespace

TEST_CASE("profile values") {
  CHECK(lambda_third(1.0) == doctest::Approx(1.5).epsilon(1e-15));
  CHECK(lambda_third(1.3) == doctest::Approx(1.95));
  CHECK(lambda_third(1.4) == doctest::Approx(2.0));
  CHECK(lambda_third(1.9) == doctest::Approx(2.0));
  CHECK(lambda_third(3.0) == doctest::Approx(3.0));
  for (double r : {0.0, 0.5, 1.0, 2.0, 3.7}) CHECK(lambda_t(0, r) == doctest::Approx(r));
}

TEST_CASE("plateau at t = 1/2 starts at 2.1(1 - t)") {
  REQUIRE(plateau_start(0.5).has_value());
  CHECK(*plateau_start(0.5) == doctest::Approx(1.05));
  CHECK_FALSE(plateau_start(0.2).has_value());
  for (double r : {1.05, 1.5, 1.9}) CHECK(lambda_t(0.5, r) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(lambda_t(0.5, 1.0) < 2.0);
  const Point x{0.6, 0.8, 0};
  CHECK(norm(phi_t({0.5}, {1.5 * 0.6, 1.5 * 0.8, 0})) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(norm(phi_t({0.5}, x)) == doctest::Approx(lambda_t(0.5, 1.0)));
}

TEST_CASE("lambda_t is continuous in r at the breakpoints") {
  for (double t : {0.0, 0.2, 1.0 / 3, 0.5, 0.8, 0.99})
    for (double r : {1.3, 1.4, 1.9, 2.5}) CHECK(std::abs(lambda_t(t, r - 1e-9) - lambda_t(t, r + 1e-9)) < 1e-7);
  for (double t : {0.4, 0.5, 0.8}) {
    const double a = *plateau_start(t);
    CHECK(std::abs(lambda_t(t, a - 1e-9) - lambda_t(t, a + 1e-9)) < 1e-7);
  }
}

TEST_CASE("lambda_t domain errors") {
  CHECK_THROWS_AS(lambda_t(1, 0), std::domain_error);
  CHECK_THROWS_AS(lambda_t(1.5, 1), std::domain_error);
  CHECK_THROWS_AS(phi_t({1}, {0, 0, 0}), std::domain_error);
}

TEST_CASE("phi_0 is the identity") {
  for (const Point& x : {Point{0, 0, 0}, Point{0.3, -2, 1}, Point{3.5, 0.1, 0}}) {
    const auto y = phi_t({0}, x);
    CHECK(distance(x, y) < 1e-15);
  }
}

TEST_CASE("profile compliance") {
  const auto r = check_profile(10000, 3.0);
  CHECK(r.ok());
  CHECK(r.samples == 10000);
  CHECK(r.worst_bound_excess <= 1e-12);
}

TEST_CASE("lambda_preimage inverts lambda_t") {
  for (double t : {0.0, 0.2, 0.5, 0.9})
    for (double y : {0.3, 1.0, 1.7, 2.2, 3.1}) {
      const auto pre = lambda_preimage(t, y);
      REQUIRE(pre.has_value());
      CHECK(lambda_t(t, pre->first) == doctest::Approx(y).epsilon(1e-10));
    }
  const auto plateau = lambda_preimage(0.5, 2.0);
  REQUIRE(plateau.has_value());
  CHECK(plateau->first == doctest::Approx(1.05));
  CHECK(plateau->second == doctest::Approx(1.9));
  CHECK_FALSE(lambda_preimage(1.0, 1.0).has_value());
}

TEST_CASE("phi grid error") { CHECK(phi_grid_error(101, 401, 4.0) < 1e-9); }

TEST_CASE("sampling helpers obey the parametrization law") {
  const auto e = straight_edge(0, 1, {0, 0, 0}, {2, 0, 0}, 9);
  REQUIRE(e.params.size() == 9);
  CHECK(e.params.front() == -1);
  CHECK(e.params.back() == 1);
  for (std::size_t i = 0; i < e.params.size(); ++i) CHECK(e.points[i][0] == doctest::Approx(1 + e.params[i]));
  EmbeddedGraph g;
  g.vertices = {{0, 0, 0}, {2, 0, 0}};
  g.edges = {straight_edge(0, 1, g.vertices[0], g.vertices[1], 5)};
  CHECK_FALSE(validate(g).empty());  // too few samples
}

TEST_CASE("radial edge from the origin is collapsible") {
  const auto chk = check_collapsible(radial_edge(), {{0}, {}});
  CHECK(chk.ok());
  REQUIRE(chk.scene.has_value());
  CHECK(chk.scene->incident.size() == 1);
}

TEST_CASE("inward-pointing segment in the shell fails the inner-product clause") {
  EmbeddedGraph g;
  g.vertices = {{0, 0, 0}, {4, 0, 0}};
  g.edges.push_back(polyline_edge(0, 1, {{0, 0, 0}, {2.5, 0, 0}, {1.5, 0.5, 0}, {2.5, 1, 0}, {4, 0, 0}}, 41));
  g.leaf_labels[1] = 1;
  const auto chk = check_collapsible(g, {{0}, {}});
  CHECK_FALSE(chk.ok());
  bool found = false;
  for (const auto& v : chk.violations) found |= v.clause == "inner_product";
  CHECK(found);
}

TEST_CASE("tree touching the unit sphere fails") {
  EmbeddedGraph g;
  g.vertices = {{1, 0, 0}, {4, 0, 0}};
  g.edges.push_back(straight_edge(0, 1, g.vertices[0], g.vertices[1], 17));
  g.leaf_labels[1] = 1;
  const auto chk = check_collapsible(g, {{0}, {}});
  CHECK_FALSE(chk.ok());
  bool found = false;
  for (const auto& v : chk.violations) found |= v.clause == "unit_ball";
  CHECK(found);
}

TEST_CASE("tree selections must be trees") {
  auto [g, tree] = demo_scene("bar");
  tree.vertices = {0};  // edge 0 without its second endpoint
  CHECK_FALSE(check_collapsible(g, tree).ok());
  CHECK_THROWS_AS(demo_scene("spiral"), std::invalid_argument);
}

TEST_CASE("collapse flow on the demo scenes") {
  for (const char* name : {"star", "bar"}) {
    CAPTURE(name);
    const auto [g, tree] = demo_scene(name);
    const auto chk = check_collapsible(g, tree);
    REQUIRE(chk.ok());
    std::vector<EmbeddedGraph> frames;
    const auto rep = run_flow_suite(*chk.scene, 10, &frames);
    CHECK(rep.ok());
    CHECK(rep.frames == 11);
    CHECK(frames.size() == 11);
    CHECK(rep.sampling_ok);
    CHECK(rep.identity_error <= kIdentityTol);
    CHECK(rep.radial_error < kRadialTol);
    CHECK(rep.min_slope > 0);
    REQUIRE(rep.combinatorial.has_value());
    CHECK(*rep.combinatorial);
    // regression bound on the sampled Hausdorff rate (measured 0.33 to 0.38)
    CHECK(rep.hausdorff_rate < 1.0);
  }
}

TEST_CASE("flow endpoints") {
  const auto [g, tree] = demo_scene("bar");
  const auto scene = *check_collapsible(g, tree).scene;
  const auto f0 = collapse_flow(scene, 0);
  REQUIRE(f0.edges.size() == g.edges.size());
  for (std::size_t e = 0; e < g.edges.size(); ++e) {
    REQUIRE(f0.edges[e].points.size() == g.edges[e].points.size());
    for (std::size_t i = 0; i < g.edges[e].points.size(); ++i)
      CHECK(distance(f0.edges[e].points[i], g.edges[e].points[i]) < 1e-9);
  }
  const auto f1 = collapse_flow(scene, 1);
  CHECK(radial_deviation(f1, 2) < 1e-6);
  const auto q = collapse_forest(underlying_graph(g), Forest{tree.edges});
  CHECK(canonical_form(q.quotient).code == canonical_form(underlying_graph(f1)).code);
  CHECK_THROWS_AS(collapse_flow(scene, 1.2), std::domain_error);
}

TEST_CASE("zero steps gives one frame equal to the input") {
  const auto [g, tree] = demo_scene("star");
  const auto rep = run_flow_suite(*check_collapsible(g, tree).scene, 0);
  CHECK(rep.frames == 1);
  CHECK(rep.identity_error <= kIdentityTol);
}

TEST_CASE("smallness of the identity") {
  const auto [g, tree] = demo_scene("star");
  for (double eps : {0.01, 0.5}) {
    for (const Box& K : {kUnitBox, Box{{-3, -3, 0}, {3, 3, 0}}}) {
      const auto r = check_smallness(g, g, identity_spec(g, eps, K));
      CHECK(r.small());
      CHECK(r.max_displacement == 0);
    }
  }
}

TEST_CASE("translation is small iff its length is below epsilon") {
  const auto [g, tree] = demo_scene("star");
  for (double delta : {0.05, 0.2}) {
    const auto gp = translated(g, {delta * 0.6, delta * 0.8, 0});
    const auto spec = identity_spec(g, 0.1, Box{{-2, -2, 0}, {2, 2, 0}});
    const auto r = check_smallness(g, gp, spec);
    CHECK(r.max_displacement == doctest::Approx(delta));
    CHECK(r.pointwise == (delta < 0.1));
    CHECK(r.small() == (delta < 0.1));
  }
}

TEST_CASE("empty codomain: small iff the eroded box misses G'") {
  const EmbeddedGraph empty;
  const auto [g, tree] = demo_scene("star");
  SmallnessSpec spec;
  spec.epsilon = 0.1;
  spec.K = Box{{-0.5, -0.5, 0}, {0.5, 0.5, 0}};
  CHECK_FALSE(check_smallness(empty, g, spec).small());  // the origin lies in K^eps
  const auto far = translated(g, {20, 20, 0});
  CHECK(check_smallness(empty, far, spec).small());
}

TEST_CASE("derivative clause needs a sampled neighborhood") {
  const auto [g, tree] = demo_scene("star");
  auto spec = identity_spec(g, 0.5, Box{{-3, -3, 0}, {3, 3, 0}});
  spec.Q = Box{{1.7, 0.4, 0}, {2.1, 0.8, 0}};  // around radius 2 on the first arm
  const auto ok = check_smallness(g, g, spec);
  CHECK(ok.small());
  REQUIRE(ok.derivative.has_value());
  CHECK(*ok.derivative);

  // drop every pair, so phi^-1 is not sampled around Q
  auto sparse = spec;
  sparse.correspondence.clear();
  sparse.K = Box{{10, 10, 0}, {11, 11, 0}};
  CHECK(check_smallness(g, g, sparse).status == SmallnessStatus::undefined);

  auto bad = spec;
  bad.Q = Box{{-0.2, -0.2, 0}, {0.2, 0.2, 0}};  // contains the centre vertex
  CHECK_THROWS_AS(check_smallness(g, g, bad), std::invalid_argument);
}

TEST_CASE("smallness input errors") {
  const auto [g, tree] = demo_scene("star");
  auto spec = identity_spec(g, 0.1, kUnitBox);
  spec.correspondence.push_back({99, 0, 0, 0});
  CHECK_THROWS_AS(check_smallness(g, g, spec), std::invalid_argument);
  EmbeddedGraph g3 = g;
  g3.dim = 3;
  CHECK_THROWS_AS(check_smallness(g, g3, identity_spec(g, 0.1, kUnitBox)), std::invalid_argument);
}
