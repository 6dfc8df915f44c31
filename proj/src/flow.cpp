#include "autfn/flow.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>

#include "autfn/canonical.hpp"
#include "autfn/morphism.hpp"

namespace autfn {

double norm(const Point& p) { return std::sqrt(dot(p, p)); }
double dot(const Point& a, const Point& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
double distance(const Point& a, const Point& b) {
  return norm({a[0] - b[0], a[1] - b[1], a[2] - b[2]});
}

namespace {

Point scale(const Point& p, double s) { return {p[0] * s, p[1] * s, p[2] * s}; }
Point sub(const Point& a, const Point& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }
Point add(const Point& a, const Point& b) { return {a[0] + b[0], a[1] + b[1], a[2] + b[2]}; }
Point lerp(const Point& a, const Point& b, double u) { return add(a, scale(sub(b, a), u)); }
// fixed generic direction for radial grids
Point dim_unit() { return {0.6, 0.8, 0.0}; }

constexpr double kThird = 1.0 / 3.0;
constexpr double kBisectTol = 1e-13;

// Hermite blend on [1.3, 1.4] from (1.95, slope 1.5) to (2, slope 0)
constexpr double kBlendLo = 1.3, kBlendHi = 1.4;
// sixth-power blend on [1.9, 2.5]
constexpr double kTailLo = 1.9, kTailHi = 2.5;

double bisect(double lo, double hi, double y, double (*f)(double, double), double t) {
  for (int it = 0; it < 200 && hi - lo > kBisectTol; ++it) {
    const double mid = 0.5 * (lo + hi);
    (f(t, mid) < y ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double third_as_t(double, double r) { return lambda_third(r); }

// Inverse of lambda_third away from the plateau value.
double inverse_third(double y) {
  if (y <= 1.5 * kBlendLo) return y / 1.5;
  if (y < kPlateauValue) return bisect(kBlendLo, kBlendHi, y, third_as_t, 0);
  if (y >= kTailHi) return y;
  return bisect(kTailLo, kTailHi, y, third_as_t, 0);
}

void check_time(double t) {
  if (!(t >= 0 && t <= 1)) throw std::domain_error("flow time outside [0, 1]");
}

}  // namespace

double lambda_third(double r) {
  if (r <= kBlendLo) return 1.5 * r;
  if (r < kBlendHi) {
    const double h = kBlendHi - kBlendLo, u = (r - kBlendLo) / h;
    const double h00 = 2 * u * u * u - 3 * u * u + 1, h10 = u * u * u - 2 * u * u + u;
    const double h01 = -2 * u * u * u + 3 * u * u;
    return h00 * 1.95 + h10 * h * 1.5 + h01 * 2.0;
  }
  if (r <= kTailLo) return kPlateauValue;
  if (r < kTailHi) {
    const double u = (r - kTailLo) / (kTailHi - kTailLo);
    return r + 0.1 * std::pow(1 - u, 6);
  }
  return r;
}

double lambda_third_derivative(double r) {
  if (r <= kBlendLo) return 1.5;
  if (r < kBlendHi) {
    const double u = (r - kBlendLo) / (kBlendHi - kBlendLo);
    return 1.5 * (1 - u) * (1 - u);
  }
  if (r <= kTailLo) return 0;
  if (r < kTailHi) {
    const double u = (r - kTailLo) / (kTailHi - kTailLo);
    return 1 - std::pow(1 - u, 5);
  }
  return 1;
}

std::optional<double> plateau_start(double t) {
  if (t < kThird) return std::nullopt;
  return 2.1 * (1 - t);
}

double lambda_t(double t, double r) {
  check_time(t);
  if (r < 0) throw std::domain_error("negative radius");
  if (t <= kThird) return (1 - 3 * t) * r + 3 * t * lambda_third(r);
  if (t == 1 && r == 0) throw std::domain_error("lambda_1 is undefined at 0");
  const double start = 2.1 * (1 - t);
  if (r <= start) return lambda_third(r / (1.5 * (1 - t)));
  if (r <= kPlateauEnd) return kPlateauValue;
  return lambda_third(r);
}

double g_t(double t, double r) {
  check_time(t);
  if (r == 0) return 1 - t;
  return r / lambda_t(t, r);
}

std::optional<std::pair<double, double>> lambda_preimage(double t, double y) {
  check_time(t);
  if (y < 0) return std::nullopt;
  if (y == 0) {
    if (t == 1) return std::nullopt;
    return std::make_pair(0.0, 0.0);
  }
  auto single = [](double r) { return std::make_optional(std::make_pair(r, r)); };
  if (t < kThird) {
    if (y >= kTailHi) return single(y);
    const double inner = y / (1 + 1.5 * t);
    if (inner <= kBlendLo) return single(inner);
    const double mid = (y - 6 * t) / (1 - 3 * t);
    if (mid >= kBlendHi && mid <= kTailLo) return single(mid);
    return single(bisect(0, kTailHi, y, lambda_t, t));
  }
  const double start = 2.1 * (1 - t);
  if (y == kPlateauValue) return std::make_pair(start, kPlateauEnd);
  if (y < kPlateauValue) {
    if (t == 1) return std::nullopt;
    return single(1.5 * (1 - t) * inverse_third(y));
  }
  return single(inverse_third(y));
}

Point phi_t(const FlowParams& p, const Point& x) {
  const double r = norm(x);
  if (r == 0) {
    check_time(p.t);
    if (p.t == 1) throw std::domain_error("phi_1 is undefined at 0");
    return x;
  }
  return scale(x, p.lambda(r) / r);
}

ProfileReport check_profile(int samples, double r_max) {
  ProfileReport rep;
  rep.samples = samples;
  double prev = 0;
  for (int i = 1; i <= samples; ++i) {
    const double r = r_max * i / samples;
    const double v = lambda_third(r), dv = lambda_third_derivative(r);
    if (v < prev) rep.monotone = false;
    if (std::abs(v - kPlateauValue) > 1e-12 && dv <= 0) rep.positive_off_plateau = false;
    const double excess = dv - v / r;
    rep.worst_bound_excess = std::max(rep.worst_bound_excess, excess);
    if (excess > 1e-12) rep.derivative_bound = false;
    prev = v;
  }
  return rep;
}

// ---------------------------------------------------------------------------
// embedded graphs

std::vector<std::string> validate(const EmbeddedGraph& g, bool check_valence) {
  std::vector<std::string> out;
  if (g.dim != 2 && g.dim != 3) out.push_back("dimension must be 2 or 3");
  const int nv = static_cast<int>(g.vertices.size());
  std::vector<int> valence(nv, 0);
  for (std::size_t k = 0; k < g.edges.size(); ++k) {
    const auto& e = g.edges[k];
    const std::string tag = "edge " + std::to_string(k) + ": ";
    if (e.from < 0 || e.from >= nv || e.to < 0 || e.to >= nv) {
      out.push_back(tag + "endpoint out of range");
      continue;
    }
    ++valence[e.from];
    ++valence[e.to];
    if (e.params.size() != e.points.size()) {
      out.push_back(tag + "params and points differ in length");
      continue;
    }
    if (static_cast<int>(e.params.size()) < kMinSamplesPerEdge) {
      out.push_back(tag + "fewer than " + std::to_string(kMinSamplesPerEdge) + " samples");
      continue;
    }
    if (std::abs(e.params.front() + 1) > 1e-12 || std::abs(e.params.back() - 1) > 1e-12)
      out.push_back(tag + "params must run from -1 to 1");
    for (std::size_t i = 1; i < e.params.size(); ++i) {
      if (!(e.params[i] > e.params[i - 1])) out.push_back(tag + "params not strictly increasing");
      if (distance(e.points[i], e.points[i - 1]) <= 1e-12) out.push_back(tag + "repeated sample");
    }
    if (distance(e.points.front(), g.vertices[e.from]) > 1e-9) out.push_back(tag + "start is off its vertex");
    if (distance(e.points.back(), g.vertices[e.to]) > 1e-9) out.push_back(tag + "end is off its vertex");
  }
  for (const auto& [v, label] : g.leaf_labels)
    if (v < 0 || v >= nv) out.push_back("leaf label on missing vertex " + std::to_string(v));
  if (check_valence) {
    for (int v = 0; v < nv; ++v) {
      const bool leaf = g.leaf_labels.contains(v);
      if (leaf && valence[v] != 1) out.push_back("labelled vertex " + std::to_string(v) + " is not a leaf");
      if (!leaf && valence[v] < 3) out.push_back("vertex " + std::to_string(v) + " has valence below 3");
    }
  }
  return out;
}

AbstractGraph underlying_graph(const EmbeddedGraph& g) {
  std::vector<std::pair<int, int>> edges;
  for (const auto& e : g.edges) edges.emplace_back(e.from, e.to);
  return from_edge_list(static_cast<int>(g.vertices.size()), edges, g.leaf_labels);
}

EmbeddedEdge straight_edge(int from, int to, const Point& a, const Point& b, int samples) {
  return polyline_edge(from, to, {a, b}, samples);
}

EmbeddedEdge polyline_edge(int from, int to, const std::vector<Point>& waypoints, int samples) {
  if (waypoints.size() < 2) throw std::invalid_argument("polyline needs two waypoints");
  const int segments = static_cast<int>(waypoints.size()) - 1;
  samples = std::max(samples, segments + 1);
  std::vector<double> length(segments);
  double total = 0;
  for (int s = 0; s < segments; ++s) total += length[s] = distance(waypoints[s], waypoints[s + 1]);
  // intervals per segment, at least one each, roughly proportional to length
  std::vector<int> parts(segments, 1);
  int left = samples - 1 - segments;
  for (int s = 0; s < segments && left > 0; ++s) {
    const int extra = std::min(left, static_cast<int>(std::floor((samples - 1 - segments) * length[s] / total)));
    parts[s] += extra;
    left -= extra;
  }
  parts[std::max_element(length.begin(), length.end()) - length.begin()] += left;

  EmbeddedEdge e;
  e.from = from;
  e.to = to;
  for (int s = 0; s < segments; ++s)
    for (int j = 0; j < parts[s]; ++j) e.points.push_back(lerp(waypoints[s], waypoints[s + 1], double(j) / parts[s]));
  e.points.push_back(waypoints.back());
  const int n = static_cast<int>(e.points.size());
  for (int i = 0; i < n; ++i) e.params.push_back(i == n - 1 ? 1.0 : -1.0 + 2.0 * i / (n - 1));
  return e;
}

// ---------------------------------------------------------------------------
// collapsible position

CollapsibleCheck check_collapsible(const EmbeddedGraph& g, const TreeSelection& tree) {
  CollapsibleCheck out;
  auto fail = [&](std::string clause, int edge, int sample, int vertex, std::string detail) {
    out.violations.push_back({std::move(clause), edge, sample, vertex, std::move(detail)});
  };
  for (const auto& msg : validate(g)) fail("sampling", -1, -1, -1, msg);
  if (!out.ok()) return out;

  const int nv = static_cast<int>(g.vertices.size()), ne = static_cast<int>(g.edges.size());
  std::set<int> tv(tree.vertices.begin(), tree.vertices.end()), te(tree.edges.begin(), tree.edges.end());
  bool ids_ok = !tv.empty();
  for (int v : tv) ids_ok = ids_ok && v >= 0 && v < nv;
  for (int e : te) ids_ok = ids_ok && e >= 0 && e < ne;
  if (!ids_ok || tv.size() != tree.vertices.size() || te.size() != tree.edges.size()) {
    fail("tree", -1, -1, -1, "selection has missing, repeated or no elements");
    return out;
  }
  {
    // connected and acyclic on the selected vertices
    std::vector<int> parent(nv);
    for (int v = 0; v < nv; ++v) parent[v] = v;
    auto find = [&](int x) {
      while (parent[x] != x) x = parent[x] = parent[parent[x]];
      return x;
    };
    bool ok = te.size() + 1 == tv.size();
    for (int e : te) {
      const auto& edge = g.edges[e];
      if (!tv.contains(edge.from) || !tv.contains(edge.to)) {
        ok = false;
        break;
      }
      const int a = find(edge.from), b = find(edge.to);
      if (a == b) ok = false;
      parent[a] = b;
    }
    if (ok)
      for (int v : tv) ok = ok && find(v) == find(*tv.begin());
    if (!ok) {
      fail("tree", -1, -1, -1, "selection is not a tree");
      return out;
    }
  }
  for (int v : tv)
    if (norm(g.vertices[v]) >= 1) fail("unit_ball", -1, -1, v, "tree vertex outside the open unit ball");
  for (int e : te)
    for (std::size_t i = 0; i < g.edges[e].points.size(); ++i)
      if (norm(g.edges[e].points[i]) >= 1)
        fail("unit_ball", e, static_cast<int>(i), -1, "tree edge outside the open unit ball");
  for (int v = 0; v < nv; ++v)
    if (!tv.contains(v) && norm(g.vertices[v]) < 3) fail("coverage", -1, -1, v, "vertex inside B(0,3) off the tree");

  CollapseScene scene;
  scene.graph = g;
  scene.tree = tree;
  scene.d.assign(ne, {});
  for (int k = 0; k < ne; ++k) {
    const auto& e = g.edges[k];
    const int n = static_cast<int>(e.points.size());
    if (te.contains(k)) {
      scene.d[k].assign(n, 0.0);
      continue;
    }
    const bool at_from = tv.contains(e.from), at_to = tv.contains(e.to);
    if (at_from && at_to) {
      fail("coverage", k, -1, -1, "edge leaves and re-enters the tree");
      continue;
    }
    if (!at_from && !at_to) {
      for (int i = 0; i < n; ++i)
        if (norm(e.points[i]) < 3) {
          fail("coverage", k, i, -1, "sample inside B(0,3) on an edge away from the tree");
          break;
        }
      continue;
    }
    IncidentEdge inc;
    inc.edge = k;
    inc.reversed = at_to;
    auto& d = scene.d[k];
    d.resize(n);
    for (int i = 0; i < n; ++i) d[i] = inc.reversed ? 1 - e.params[i] : e.params[i] + 1;
    // samples in order of increasing distance to the tree
    auto at = [&](int j) { return inc.reversed ? n - 1 - j : j; };
    int exit = -1;
    for (int j = 0; j < n; ++j)
      if (norm(e.points[at(j)]) > 3) {
        exit = j;
        break;
      }
    if (exit < 0 || d[at(exit)] >= 2) {
      fail("exit", k, -1, -1, "incident edge does not leave B(0,3) before d = 2");
      continue;
    }
    inc.tau = d[at(exit)];
    for (int j = exit + 1; j < n; ++j)
      if (norm(e.points[at(j)]) < 3) {
        fail("coverage", k, at(j), -1, "incident edge returns into B(0,3)");
        break;
      }
    for (int j = 1; j <= exit; ++j) {
      const Point& x = e.points[at(j)];
      const double r = norm(x);
      if (r < 1 || r > 3) continue;
      const int lo = j - 1, hi = std::min(j + 1, n - 1);
      const Point dx = scale(sub(e.points[at(hi)], e.points[at(lo)]), 1.0 / (d[at(hi)] - d[at(lo)]));
      if (dot(x, dx) < -1e-12) fail("inner_product", k, at(j), -1, "edge moves inwards in the shell 1 <= |x| <= 3");
    }
    scene.incident.push_back(inc);
  }
  if (out.ok()) out.scene = std::move(scene);
  return out;
}

std::pair<EmbeddedGraph, TreeSelection> demo_scene(const std::string& name) {
  EmbeddedGraph g;
  g.dim = 2;
  TreeSelection tree;
  auto arm = [&](int root, double angle, bool kinked) {
    const Point unit{std::cos(angle), std::sin(angle), 0};
    const int leaf = static_cast<int>(g.vertices.size());
    g.vertices.push_back(scale(unit, 4));
    g.leaf_labels[leaf] = static_cast<int>(g.leaf_labels.size()) + 1;
    std::vector<Point> way{g.vertices[root]};
    if (kinked) way.push_back(unit);
    way.push_back(g.vertices[leaf]);
    g.edges.push_back(polyline_edge(root, leaf, way, 41));
  };
  if (name == "star") {
    g.vertices.push_back({0, 0, 0});
    tree.vertices = {0};
    for (int i = 0; i < 4; ++i) arm(0, 0.3 + i * std::acos(-1.0) / 2, false);
  } else if (name == "bar") {
    g.vertices = {{-0.3, 0, 0}, {0.3, 0, 0}};
    g.edges.push_back(straight_edge(0, 1, g.vertices[0], g.vertices[1], 9));
    tree.vertices = {0, 1};
    tree.edges = {0};
    for (double a : {2.4, 3.9}) arm(0, a, true);
    for (double a : {0.7, -0.7}) arm(1, a, true);
  } else {
    throw std::invalid_argument("unknown demo scene: " + name);
  }
  return {g, tree};
}

// ---------------------------------------------------------------------------
// the flow

namespace {

constexpr int kPlateauSamples = 8;

Point pull_back(double t, const Point& x) {
  const double y = norm(x);
  if (y == 0) return x;
  const auto pre = lambda_preimage(t, y);
  if (!pre) throw std::logic_error("sample has no preimage under phi_t");
  return scale(x, pre->second / y);
}

struct PulledEdge {
  std::vector<Point> points;  // outwards from the tree
  std::vector<double> dt;
};

PulledEdge pull_incident(const CollapseScene& scene, const IncidentEdge& inc, double t) {
  const auto& e = scene.graph.edges[inc.edge];
  const auto& d = scene.d[inc.edge];
  const int n = static_cast<int>(e.points.size());
  auto at = [&](int j) { return inc.reversed ? n - 1 - j : j; };
  PulledEdge out;
  const auto start = plateau_start(t);
  bool crossed = false;
  for (int j = 0; j < n; ++j) {
    const Point& x = e.points[at(j)];
    const double r = norm(x);
    if (start && !crossed && r >= kPlateauValue) {
      // crossing of radius 2 between samples j-1 and j
      const Point& a = e.points[at(j - 1)];
      const Point ab = sub(x, a);
      const double qa = dot(ab, ab), qb = 2 * dot(a, ab), qc = dot(a, a) - kPlateauValue * kPlateauValue;
      const double u = std::clamp((-qb + std::sqrt(std::max(0.0, qb * qb - 4 * qa * qc))) / (2 * qa), 0.0, 1.0);
      const Point cross = lerp(a, x, u);
      const double dstar = d[at(j - 1)] + u * (d[at(j)] - d[at(j - 1)]);
      const Point dir = scale(cross, 1.0 / norm(cross));
      for (int q = 0; q < kPlateauSamples; ++q) {
        const double rho = *start + (kPlateauEnd - *start) * q / (kPlateauSamples - 1);
        out.points.push_back(scale(dir, rho));
        out.dt.push_back(rho / kPlateauValue * dstar);
      }
      crossed = true;
      if (u >= 1 - 1e-12) continue;  // the sample is the crossing point
    }
    if (start && !crossed && t == 1) continue;  // no preimage below radius 2
    const Point y = pull_back(t, x);
    out.points.push_back(y);
    out.dt.push_back(g_t(t, norm(y)) * d[at(j)]);
  }
  return out;
}

}  // namespace

EmbeddedGraph collapse_flow(const CollapseScene& scene, double t) {
  check_time(t);
  const EmbeddedGraph& g = scene.graph;
  if (t == 0) return g;
  const std::set<int> tv(scene.tree.vertices.begin(), scene.tree.vertices.end());
  const std::set<int> te(scene.tree.edges.begin(), scene.tree.edges.end());
  const int nv = static_cast<int>(g.vertices.size());

  EmbeddedGraph out;
  out.dim = g.dim;
  std::vector<int> vmap(nv);
  if (t < 1) {
    for (int v = 0; v < nv; ++v) {
      vmap[v] = v;
      out.vertices.push_back(pull_back(t, g.vertices[v]));
    }
  } else {
    const int root = *tv.begin();
    for (int v = 0; v < nv; ++v) {
      if (tv.contains(v) && v != root) continue;
      vmap[v] = static_cast<int>(out.vertices.size());
      out.vertices.push_back(v == root ? Point{0, 0, 0} : g.vertices[v]);
    }
    for (int v : tv) vmap[v] = vmap[root];
  }
  for (const auto& [v, label] : g.leaf_labels) out.leaf_labels[vmap[v]] = label;

  std::vector<const IncidentEdge*> incident(g.edges.size(), nullptr);
  for (const auto& inc : scene.incident) incident[inc.edge] = &inc;

  for (std::size_t k = 0; k < g.edges.size(); ++k) {
    const auto& e = g.edges[k];
    if (te.contains(static_cast<int>(k))) {
      if (t == 1) continue;
      EmbeddedEdge pe = e;
      for (auto& p : pe.points) p = pull_back(t, p);
      out.edges.push_back(std::move(pe));
      continue;
    }
    EmbeddedEdge pe;
    pe.from = vmap[e.from];
    pe.to = vmap[e.to];
    if (!incident[k]) {
      pe.params = e.params;
      pe.points = e.points;
      out.edges.push_back(std::move(pe));
      continue;
    }
    const PulledEdge pulled = pull_incident(scene, *incident[k], t);
    const int n = static_cast<int>(pulled.points.size());
    for (int j = 0; j < n; ++j) {
      const int src = incident[k]->reversed ? n - 1 - j : j;
      pe.points.push_back(pulled.points[src]);
      pe.params.push_back(incident[k]->reversed ? 1 - pulled.dt[src] : pulled.dt[src] - 1);
    }
    out.edges.push_back(std::move(pe));
  }
  return out;
}

namespace {

// d at the point of the original edge polyline closest to x.
double distance_on_edge(const EmbeddedEdge& e, const std::vector<double>& d, const Point& x) {
  double best = std::numeric_limits<double>::infinity(), value = 0;
  for (std::size_t i = 0; i + 1 < e.points.size(); ++i) {
    const Point ab = sub(e.points[i + 1], e.points[i]);
    const double u = std::clamp(dot(sub(x, e.points[i]), ab) / dot(ab, ab), 0.0, 1.0);
    const double dist = distance(x, lerp(e.points[i], e.points[i + 1], u));
    if (dist < best) {
      best = dist;
      value = d[i] + u * (d[i + 1] - d[i]);
    }
  }
  return value;
}

std::vector<int> frame_edge_index(const CollapseScene& scene, double t) {
  std::set<int> te(scene.tree.edges.begin(), scene.tree.edges.end());
  std::vector<int> idx(scene.graph.edges.size(), -1);
  int next = 0;
  for (std::size_t k = 0; k < idx.size(); ++k)
    if (t < 1 || !te.contains(static_cast<int>(k))) idx[k] = next++;
  return idx;
}

}  // namespace

std::vector<std::vector<double>> distance_along_flow(const CollapseScene& scene, double t,
                                                     const EmbeddedGraph& frame) {
  check_time(t);
  const auto idx = frame_edge_index(scene, t);
  std::vector<std::vector<double>> out(frame.edges.size());
  const FlowParams fp{t};
  for (const auto& inc : scene.incident) {
    const auto& fe = frame.edges.at(idx[inc.edge]);
    const auto& orig = scene.graph.edges[inc.edge];
    const int n = static_cast<int>(fe.points.size());
    std::vector<double> dt(n);
    for (int j = 0; j < n; ++j) {
      const int i = inc.reversed ? n - 1 - j : j;
      const Point& y = fe.points[i];
      if (norm(y) == 0) {
        dt[j] = 0;
        continue;
      }
      const Point x = phi_t(fp, y);
      dt[j] = g_t(t, norm(y)) * distance_on_edge(orig, scene.d[inc.edge], x);
    }
    out[idx[inc.edge]] = std::move(dt);
  }
  return out;
}

double min_distance_slope(const CollapseScene& scene, double t, const EmbeddedGraph& frame) {
  const auto dts = distance_along_flow(scene, t, frame);
  const auto idx = frame_edge_index(scene, t);
  double best = std::numeric_limits<double>::infinity();
  for (const auto& inc : scene.incident) {
    const auto& dt = dts[idx[inc.edge]];
    const auto& pts = frame.edges[idx[inc.edge]].points;
    const int n = static_cast<int>(dt.size());
    // dt runs outwards from the tree
    auto pt = [&](int j) -> const Point& { return pts[inc.reversed ? n - 1 - j : j]; };
    for (int j = 1; j + 1 < n; ++j) {
      const double arc = distance(pt(j - 1), pt(j)) + distance(pt(j), pt(j + 1));
      best = std::min(best, (dt[j + 1] - dt[j - 1]) / arc);
    }
  }
  return best;
}

double radial_deviation(const EmbeddedGraph& g, double radius) {
  double worst = 0;
  for (const auto& e : g.edges) {
    const Point* outer = nullptr;
    for (const auto& p : e.points) {
      const double r = norm(p);
      if (r > 1e-12 && r < radius && (!outer || r > norm(*outer))) outer = &p;
    }
    if (!outer) continue;
    const Point u = scale(*outer, 1.0 / norm(*outer));
    for (const auto& p : e.points) {
      const double r = norm(p);
      if (r <= 1e-12 || r >= radius) continue;
      worst = std::max(worst, norm(sub(p, scale(u, dot(p, u)))));
    }
  }
  return worst;
}

namespace {

double point_to_graph(const Point& x, const EmbeddedGraph& g) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& v : g.vertices) best = std::min(best, distance(x, v));
  for (const auto& e : g.edges)
    for (std::size_t i = 0; i + 1 < e.points.size(); ++i) {
      const Point ab = sub(e.points[i + 1], e.points[i]);
      const double u = std::clamp(dot(sub(x, e.points[i]), ab) / dot(ab, ab), 0.0, 1.0);
      best = std::min(best, distance(x, lerp(e.points[i], e.points[i + 1], u)));
    }
  return best;
}

double directed_hausdorff(const EmbeddedGraph& a, const EmbeddedGraph& b, double radius) {
  double worst = 0;
  for (const auto& e : a.edges)
    for (const auto& p : e.points)
      if (norm(p) < radius) worst = std::max(worst, point_to_graph(p, b));
  for (const auto& v : a.vertices)
    if (norm(v) < radius) worst = std::max(worst, point_to_graph(v, b));
  return worst;
}

}  // namespace

double sampled_hausdorff(const EmbeddedGraph& a, const EmbeddedGraph& b, double radius) {
  return std::max(directed_hausdorff(a, b, radius), directed_hausdorff(b, a, radius));
}

double phi_grid_error(int nt, int nr, double r_max) {
  double worst = 0;
  const Point dir = dim_unit();
  for (int a = 0; a < nt; ++a) {
    const double t = nt == 1 ? 0.0 : double(a) / (nt - 1);
    for (int b = 0; b < nr; ++b) {
      const double r = nr == 1 ? 0.0 : r_max * b / (nr - 1);
      if (t == 1 && r == 0) continue;
      const Point x = scale(dir, r);
      worst = std::max(worst, std::abs(norm(phi_t({t}, x)) - lambda_t(t, r)));
    }
  }
  return worst;
}

bool FlowSuiteReport::ok() const {
  return sampling_ok && identity_error < kIdentityTol && radial_error < kRadialTol && min_slope > 0 &&
         combinatorial.value_or(true);
}

FlowSuiteReport run_flow_suite(const CollapseScene& scene, int steps, std::vector<EmbeddedGraph>* frames_out) {
  if (steps < 0) throw std::invalid_argument("steps must be nonnegative");
  FlowSuiteReport rep;
  rep.min_slope = std::numeric_limits<double>::infinity();
  EmbeddedGraph prev;
  double prev_t = 0;
  for (int i = 0; i <= steps; ++i) {
    const double t = steps == 0 ? 0.0 : double(i) / steps;
    EmbeddedGraph frame = collapse_flow(scene, t);
    ++rep.frames;
    const auto issues = validate(frame);
    if (!issues.empty()) {
      rep.sampling_ok = false;
      if (rep.failure.empty()) rep.failure = "t = " + std::to_string(t) + ": " + issues.front();
    }
    if (i == 0) {
      for (std::size_t k = 0; k < frame.edges.size(); ++k)
        for (std::size_t j = 0; j < frame.edges[k].points.size(); ++j)
          rep.identity_error =
              std::max(rep.identity_error, distance(frame.edges[k].points[j], scene.graph.edges[k].points[j]));
    }
    rep.min_slope = std::min(rep.min_slope, min_distance_slope(scene, t, frame));
    if (i > 0) rep.hausdorff_rate = std::max(rep.hausdorff_rate, sampled_hausdorff(prev, frame, 3) / (t - prev_t));
    if (t == 1) {
      rep.radial_error = radial_deviation(frame, 2);
      Forest f{std::vector<int>(scene.tree.edges.begin(), scene.tree.edges.end())};
      std::sort(f.edges.begin(), f.edges.end());
      const AbstractGraph collapsed = collapse_forest(underlying_graph(scene.graph), f).quotient;
      rep.combinatorial = canonical_form(collapsed).code == canonical_form(underlying_graph(frame)).code;
    }
    prev = frame;
    prev_t = t;
    if (frames_out) frames_out->push_back(std::move(frame));
  }
  if (rep.failure.empty() && !rep.ok()) {
    if (rep.identity_error >= kIdentityTol) rep.failure = "frame t = 0 differs from the input";
    else if (rep.radial_error >= kRadialTol) rep.failure = "G_1 is not radial inside B(0,2)";
    else if (!(rep.min_slope > 0)) rep.failure = "d_t is not increasing along an incident edge";
    else rep.failure = "G_1 does not match the collapsed graph";
  }
  return rep;
}

// ---------------------------------------------------------------------------
// smallness

bool Box::contains(const Point& p, int dim) const {
  for (int i = 0; i < dim; ++i)
    if (p[i] < lo[i] || p[i] > hi[i]) return false;
  return true;
}

std::optional<Box> Box::eroded(double eps, int dim) const {
  Box b = *this;
  for (int i = 0; i < dim; ++i) {
    b.lo[i] += eps;
    b.hi[i] -= eps;
    if (b.lo[i] > b.hi[i]) return std::nullopt;
  }
  return b;
}

std::string to_string(SmallnessStatus s) {
  switch (s) {
    case SmallnessStatus::small: return "small";
    case SmallnessStatus::not_small: return "not_small";
    case SmallnessStatus::undefined: return "undefined";
  }
  return "unknown";
}

SmallnessReport check_smallness(const EmbeddedGraph& g, const EmbeddedGraph& gprime, const SmallnessSpec& spec) {
  const bool g_empty = g.vertices.empty() && g.edges.empty();
  if (!g_empty && g.dim != gprime.dim) throw std::invalid_argument("graphs differ in dimension");
  if (!(spec.epsilon > 0)) throw std::invalid_argument("epsilon must be positive");
  const int dim = gprime.dim;
  auto sample = [](const EmbeddedGraph& h, int e, int i, const char* which) -> const Point& {
    if (e < 0 || e >= static_cast<int>(h.edges.size()) || i < 0 ||
        i >= static_cast<int>(h.edges[e].points.size()))
      throw std::invalid_argument(std::string("correspondence references a missing ") + which + " sample");
    return h.edges[e].points[i];
  };
  if (spec.Q) {
    for (const auto& v : g.vertices)
      if (spec.Q->contains(v, dim)) throw std::invalid_argument("Q contains a vertex of G");
  }

  SmallnessReport rep;
  std::map<std::pair<int, int>, const SamplePair*> by_dom, by_cod;
  for (const auto& p : spec.correspondence) {
    sample(gprime, p.dom_edge, p.dom_index, "domain");
    sample(g, p.cod_edge, p.cod_index, "codomain");
    by_dom.emplace(std::make_pair(p.dom_edge, p.dom_index), &p);
    by_cod.emplace(std::make_pair(p.cod_edge, p.cod_index), &p);
  }
  auto note = [&](const std::string& msg) {
    if (rep.detail.empty()) rep.detail = msg;
  };

  // K n G inside the image
  for (std::size_t e = 0; e < g.edges.size(); ++e)
    for (std::size_t i = 0; i < g.edges[e].points.size(); ++i)
      if (spec.K.contains(g.edges[e].points[i], dim) && !by_cod.contains({int(e), int(i)})) {
        rep.image = false;
        note("sample " + std::to_string(i) + " of edge " + std::to_string(e) + " of G is not in the image");
      }
  for (const auto& v : g.vertices)
    if (g.edges.empty() && spec.K.contains(v, dim)) {
      rep.image = false;
      note("isolated vertex of G in K");
    }

  // K^eps n G' maps into K
  const auto inner = spec.K.eroded(spec.epsilon, dim);
  if (inner) {
    for (std::size_t e = 0; e < gprime.edges.size(); ++e)
      for (std::size_t i = 0; i < gprime.edges[e].points.size(); ++i) {
        if (!inner->contains(gprime.edges[e].points[i], dim)) continue;
        auto it = by_dom.find({int(e), int(i)});
        if (it == by_dom.end() ||
            !spec.K.contains(g.edges[it->second->cod_edge].points[it->second->cod_index], dim)) {
          rep.containment = false;
          note("sample " + std::to_string(i) + " of edge " + std::to_string(e) + " of G' in K^eps does not map into K");
        }
      }
    for (const auto& v : gprime.vertices)
      if (gprime.edges.empty() && inner->contains(v, dim)) {
        rep.containment = false;
        note("isolated vertex of G' in K^eps");
      }
  }

  // |k - phi(k)| < eps on phi^{-1}(K)
  for (const auto& p : spec.correspondence) {
    const Point& target = g.edges[p.cod_edge].points[p.cod_index];
    if (!spec.K.contains(target, dim)) continue;
    const double disp = distance(gprime.edges[p.dom_edge].points[p.dom_index], target);
    rep.max_displacement = std::max(rep.max_displacement, disp);
    if (!(disp < spec.epsilon)) {
      rep.pointwise = false;
      note("displacement " + std::to_string(disp) + " is not below epsilon");
    }
  }

  bool undefined = false;
  if (spec.Q) {
    bool ok = true;
    for (std::size_t e = 0; e < g.edges.size(); ++e) {
      const auto& edge = g.edges[e];
      for (std::size_t i = 0; i < edge.points.size(); ++i) {
        if (!spec.Q->contains(edge.points[i], dim)) continue;
        if (i == 0 || i + 1 == edge.points.size()) continue;  // vertex samples
        auto lo = by_cod.find({int(e), int(i - 1)}), hi = by_cod.find({int(e), int(i + 1)});
        if (lo == by_cod.end() || hi == by_cod.end()) {
          undefined = true;
          note("phi^-1 is not sampled around sample " + std::to_string(i) + " of edge " + std::to_string(e));
          continue;
        }
        const double dt = edge.params[i + 1] - edge.params[i - 1];
        const Point& a = gprime.edges[lo->second->dom_edge].points[lo->second->dom_index];
        const Point& b = gprime.edges[hi->second->dom_edge].points[hi->second->dom_index];
        const Point pulled = scale(sub(b, a), 1.0 / dt);
        const Point direct = scale(sub(edge.points[i + 1], edge.points[i - 1]), 1.0 / dt);
        const double gap = distance(pulled, direct);
        rep.max_derivative_gap = std::max(rep.max_derivative_gap, gap);
        if (!(gap < spec.epsilon)) {
          ok = false;
          note("derivative gap " + std::to_string(gap) + " is not below epsilon");
        }
      }
    }
    rep.derivative = ok;
  }

  const bool clauses = rep.image && rep.containment && rep.pointwise && rep.derivative.value_or(true);
  rep.status = undefined ? SmallnessStatus::undefined : clauses ? SmallnessStatus::small : SmallnessStatus::not_small;
  return rep;
}

}  // namespace autfn
