#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "autfn/graph.hpp"

namespace autfn {

using Point = std::array<double, 3>;

double norm(const Point& p);
double dot(const Point& a, const Point& b);
double distance(const Point& a, const Point& b);

// ---------------------------------------------------------------------------
// radial profile

/// The fixed profile at t = 1/3: 3r/2 up to 1.3, a cubic Hermite blend on
/// [1.3, 1.4], 2 on [1.4, 1.9], r + 0.1 (1 - (r-1.9)/0.6)^6 up to 2.5 and
/// r beyond.
double lambda_third(double r);
double lambda_third_derivative(double r);

/// lambda_t(r) for t in [0, 1]; for t >= 1/3 the plateau is
/// [2.1(1-t), 1.9]. Throws std::domain_error at (t, r) = (1, 0) or t
/// outside [0, 1].
double lambda_t(double t, double r);
/// r / lambda_t(r), with g_t(0) = 1 - t.
double g_t(double t, double r);
/// Start of the plateau lambda_t = 2, or nullopt when t < 1/3.
std::optional<double> plateau_start(double t);
inline constexpr double kPlateauEnd = 1.9;
inline constexpr double kPlateauValue = 2.0;

/// Radii r with lambda_t(r) = y: one radius, or the plateau interval when
/// y = 2 and t >= 1/3. Empty (nullopt) when y has no preimage (t = 1 and
/// 0 < y < 2). Linear pieces are inverted in closed form, the rest by
/// bisection to 1e-12.
std::optional<std::pair<double, double>> lambda_preimage(double t, double y);

struct FlowParams {
  double t = 0;

  double lambda(double r) const { return lambda_t(t, r); }
  double g(double r) const { return g_t(t, r); }
};

/// x / g_t(|x|). Throws std::domain_error for t = 1, x = 0.
Point phi_t(const FlowParams& p, const Point& x);

struct ProfileReport {
  int samples = 0;
  bool monotone = true;
  bool positive_off_plateau = true;
  bool derivative_bound = true;
  double worst_bound_excess = 0;  // max of lambda' - lambda/r
  bool ok() const { return monotone && positive_off_plateau && derivative_bound; }
};

/// Samples the t = 1/3 profile on (0, r_max] at `samples` points.
ProfileReport check_profile(int samples = 10000, double r_max = 3.0);

// ---------------------------------------------------------------------------
// embedded graphs

/// A polyline-sampled edge. params ascend in [-1, 1]; the sample at -1 is
/// vertex `from`, the one at +1 is vertex `to`.
struct EmbeddedEdge {
  int from = 0;
  int to = 0;
  std::vector<double> params;
  std::vector<Point> points;
};

struct EmbeddedGraph {
  int dim = 2;
  std::vector<Point> vertices;
  std::vector<EmbeddedEdge> edges;
  /// vertex -> leaf label
  std::map<int, int> leaf_labels;
};

inline constexpr int kMinSamplesPerEdge = 9;

/// Human-readable violations of the sampling invariants (>= 9 samples,
/// strictly increasing params with ends at -1 and 1, endpoints on their
/// vertices, distinct consecutive samples). With `check_valence`, vertices
/// other than labelled leaves must have valence >= 3.
std::vector<std::string> validate(const EmbeddedGraph& g, bool check_valence = false);

/// Underlying abstract graph: vertex i is element i, edge k has half-edges
/// V + 2k (at `from`) and V + 2k + 1.
AbstractGraph underlying_graph(const EmbeddedGraph& g);

/// Straight edge with `samples` samples obeying the parametrization law
/// l(gamma(p)) = p^2: the point at p is at relative position (1 + p) / 2.
EmbeddedEdge straight_edge(int from, int to, const Point& a, const Point& b, int samples = 17);
/// Polyline through `waypoints` (first and last are the vertices). Every
/// waypoint is a sample; params are uniform in [-1, 1].
EmbeddedEdge polyline_edge(int from, int to, const std::vector<Point>& waypoints, int samples = 17);

// ---------------------------------------------------------------------------
// collapsible position and the collapse flow

struct TreeSelection {
  std::vector<int> vertices;
  std::vector<int> edges;
};

struct IncidentEdge {
  int edge = 0;
  /// true when the tree end is at param +1
  bool reversed = false;
  /// distance-to-tree value at the first sample outside B(0, 3)
  double tau = 0;
};

struct CollapseScene {
  EmbeddedGraph graph;
  TreeSelection tree;
  std::vector<IncidentEdge> incident;
  /// Distance to the tree per edge sample; empty for edges that are
  /// neither in the tree nor incident, 0 on tree edges.
  std::vector<std::vector<double>> d;
};

struct SceneViolation {
  std::string clause;
  int edge = -1;
  int sample = -1;
  int vertex = -1;
  std::string detail;
};

struct CollapsibleCheck {
  std::optional<CollapseScene> scene;
  std::vector<SceneViolation> violations;
  bool ok() const { return violations.empty(); }
};

/// Clauses: "sampling", "tree" (selection is not a tree), "unit_ball"
/// (tree leaves the open unit ball), "coverage" (a sample in B(0,3) is
/// neither on the tree nor on an incident edge before it exits), "exit"
/// (an incident edge never reaches |x| > 3 with d < 2), "inner_product"
/// (<gamma, gamma'> < 0 with |gamma| in [1, 3]).
CollapsibleCheck check_collapsible(const EmbeddedGraph& g, const TreeSelection& tree);

/// Built-in scenes in collapsible position, 2-dimensional:
///  "star": one tree vertex at the origin with 4 straight arms to |x| = 4;
///  "bar":  a tree edge from (-0.3, 0) to (0.3, 0) with two arms at each
///          end that run straight to the unit circle and then radially out.
/// Arm ends are labelled leaves. Throws std::invalid_argument for other
/// names.
std::pair<EmbeddedGraph, TreeSelection> demo_scene(const std::string& name);

/// Sampled G_t = phi_t^{-1}(G), plus the point 0 at t = 1. Incident edges
/// are reparametrized so that the param equals d_t - 1 measured from the
/// tree end; the plateau preimage is inserted as a radial segment. At
/// t = 1 the tree is replaced by one vertex at the origin, numbered as its
/// smallest vertex; the other vertices keep their relative order.
/// Throws std::domain_error for t outside [0, 1].
EmbeddedGraph collapse_flow(const CollapseScene& scene, double t);

/// d_t recomputed on the samples of a flow frame from its definition
/// g_t(|x|) d(phi_t(x)), per incident edge ordered outwards from the tree.
/// Entries are empty for other edges.
std::vector<std::vector<double>> distance_along_flow(const CollapseScene& scene, double t,
                                                     const EmbeddedGraph& frame);

/// Smallest finite-difference slope of d_t (per unit arc length) over
/// interior samples of all incident edges of the frame.
double min_distance_slope(const CollapseScene& scene, double t, const EmbeddedGraph& frame);

/// Largest distance of a sample with 0 < |x| < radius from the line through
/// 0 and the outermost such sample of its edge.
double radial_deviation(const EmbeddedGraph& g, double radius);

/// Symmetric Hausdorff distance between the sample sets inside B(0, radius).
double sampled_hausdorff(const EmbeddedGraph& a, const EmbeddedGraph& b, double radius);

/// max | |phi_t(x)| - lambda_t(|x|) | over a grid of nt times in [0, 1] and
/// nr radii in [0, r_max], skipping (1, 0).
double phi_grid_error(int nt = 101, int nr = 401, double r_max = 4.0);

struct FlowSuiteReport {
  int frames = 0;
  bool sampling_ok = true;        // every frame passes validate()
  double identity_error = 0;      // frame t = 0 against the input
  double radial_error = 0;        // frame t = 1 inside B(0, 2)
  double min_slope = 0;           // d_t slope over all frames
  double hausdorff_rate = 0;      // max H(G_t, G_t') / |t - t'| on B(0, 3)
  std::optional<bool> combinatorial;  // frame t = 1 vs collapse_forest
  std::string failure;

  bool ok() const;
};

inline constexpr double kIdentityTol = 1e-12;
inline constexpr double kRadialTol = 1e-6;

/// Frames at t = i / steps, i = 0..steps (just t = 0 when steps = 0), with
/// the invariant checks. `frames_out` receives the frames when non-null.
FlowSuiteReport run_flow_suite(const CollapseScene& scene, int steps,
                               std::vector<EmbeddedGraph>* frames_out = nullptr);

// ---------------------------------------------------------------------------
// smallness

struct Box {
  Point lo{};
  Point hi{};

  bool contains(const Point& p, int dim) const;
  /// The box shrunk by eps on every side; empty when eps is too large.
  std::optional<Box> eroded(double eps, int dim) const;
};

/// Sample (edge, index) of G' paired with a sample of G.
struct SamplePair {
  int dom_edge = 0;
  int dom_index = 0;
  int cod_edge = 0;
  int cod_index = 0;
};

struct SmallnessSpec {
  double epsilon = 0;
  Box K;
  std::optional<Box> Q;
  std::vector<SamplePair> correspondence;
};

enum class SmallnessStatus { small, not_small, undefined };
std::string to_string(SmallnessStatus s);

struct SmallnessReport {
  SmallnessStatus status = SmallnessStatus::small;
  bool image = true;        // K n G inside the image
  bool containment = true;  // K^eps n G' maps into K
  bool pointwise = true;    // |k - phi(k)| < eps
  std::optional<bool> derivative;
  double max_displacement = 0;
  double max_derivative_gap = 0;
  std::string detail;
  bool small() const { return status == SmallnessStatus::small; }
};

/// Checks the supplied correspondence phi: G' -> G. Throws
/// std::invalid_argument when a pair references a missing sample or the
/// two graphs differ in dimension.
SmallnessReport check_smallness(const EmbeddedGraph& g, const EmbeddedGraph& gprime, const SmallnessSpec& spec);

}  // namespace autfn
