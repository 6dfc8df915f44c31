// autfn: command-line front end for graph catalogs, spine homology, the
// collapse flow and smallness checks.
//
// Exit codes: 0 success, 1 a check failed, 2 bad input.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "autfn/io.hpp"
#include "autfn/parallel.hpp"

using namespace autfn;

namespace {

constexpr int kOk = 0, kCheckFailed = 1, kInputError = 2;

struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void write_json(const std::string& path, const json& j) {
  if (path.empty() || path == "-") {
    std::cout << j.dump(2) << '\n';
    return;
  }
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path);
  out << j.dump(2) << '\n';
}

// Config file: "key = value" lines mirroring the long flags, '#' comments.
// The pairs are spliced in front of the command-line arguments so that
// explicit flags win.
std::vector<std::string> expand_config(std::vector<std::string> args) {
  auto it = std::find(args.begin(), args.end(), "--config");
  if (it == args.end()) return args;
  if (it + 1 == args.end()) throw InputError("--config needs a file");
  const std::string path = *(it + 1);
  args.erase(it, it + 2);
  std::ifstream in(path);
  if (!in) throw InputError("cannot open config " + path);

  std::string command;
  std::vector<std::string> extra;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    auto trim = [](std::string s) {
      const auto a = s.find_first_not_of(" \t\r"), b = s.find_last_not_of(" \t\r");
      return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
    };
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw InputError(path + ":" + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
    if (key == "command") {
      command = value;
    } else if (value == "true") {
      extra.push_back("--" + key);
    } else if (value != "false") {
      extra.push_back("--" + key);
      extra.push_back(value);
    }
  }
  std::size_t pos = 1;
  if (args.size() > 1 && !args[1].empty() && args[1][0] != '-') {
    pos = 2;
  } else if (!command.empty()) {
    args.insert(args.begin() + 1, command);
    pos = 2;
  }
  args.insert(args.begin() + static_cast<std::ptrdiff_t>(std::min(pos, args.size())), extra.begin(), extra.end());
  return args;
}

// ---------------------------------------------------------------------------

struct EnumerateArgs {
  int rank = 2, leaves = 0, workers = 0;
  std::string out, cache;
};

int cmd_enumerate(const EnumerateArgs& a) {
  if (a.rank < 0 || a.leaves < 0 || a.rank > 4 || a.leaves > 2)
    throw InputError("supported range is 0 <= rank <= 4, 0 <= leaves <= 2");
  if (excluded_range(a.rank, a.leaves)) {
    std::cerr << "excluded range: rank + leaves < 2\n";
    std::cout << "0 classes\n";
    return kInputError;
  }
  const auto t0 = std::chrono::steady_clock::now();
  const int workers = resolve_workers(a.workers);
  bool cached = false;
  Catalog cat = a.cache.empty() ? enumerate_graphs(a.rank, a.leaves, workers)
                                : load_or_build_catalog(a.cache, a.rank, a.leaves, workers, &cached);
  std::printf("catalog (rank %d, leaves %d)%s\n", a.rank, a.leaves, cached ? " [cached]" : "");
  std::printf("  %-18s %s\n", "internal vertices", "classes");
  for (const auto& [v, c] : cat.counts_by_internal_vertices) std::printf("  %-18d %d\n", v, c);
  std::printf("%d %s  (%.2fs)\n", cat.size(), cat.size() == 1 ? "class" : "classes", seconds_since(t0));
  if (!a.out.empty()) {
    std::ofstream out(a.out);
    if (!out) throw InputError("cannot write " + a.out);
    write_catalog(out, cat);
  }
  return kOk;
}

// ---------------------------------------------------------------------------

struct SpineArgs {
  int rank = 2, leaves = 0, max_dim = -1, primes = 3, workers = 0;
  std::int64_t exact_limit = 20000;
  std::uint64_t seed = 0x5eed;
  std::string rank_mode = "both", out, export_dir, cache;
  bool allow_large = false, skip_face_check = false;
  double large_threshold = 1e6;
};

int cmd_spine(const SpineArgs& a, const json& config) {
  if (a.rank < 0 || a.leaves < 0 || a.rank > 4 || a.leaves > 2)
    throw InputError("supported range is 0 <= rank <= 4, 0 <= leaves <= 2");
  if (excluded_range(a.rank, a.leaves)) throw InputError("excluded range: rank + leaves < 2");
  if (a.primes < 1) throw InputError("--primes must be at least 1");
  RankOptions ro;
  try {
    ro.mode = parse_rank_mode(a.rank_mode);
  } catch (const std::invalid_argument& e) {
    throw InputError(e.what());
  }
  ro.primes = a.primes;
  ro.exact_limit = a.exact_limit;
  ro.seed = a.seed;
  ro.workers = resolve_workers(a.workers);

  const auto t0 = std::chrono::steady_clock::now();
  Catalog cat = a.cache.empty() ? enumerate_graphs(a.rank, a.leaves, ro.workers)
                                : load_or_build_catalog(a.cache, a.rank, a.leaves, ro.workers);
  std::printf("catalog: %d graphs (%.2fs)\n", cat.size(), seconds_since(t0));
  if (cat.size() == 0) {
    std::printf("empty catalog, nothing to build\n");
    return kOk;
  }

  const auto estimate = estimate_spine_size(cat);
  double total = 0;
  for (double c : estimate) total += c;
  if (total > a.large_threshold && !a.allow_large) {
    std::fprintf(stderr, "refusing to build about %.0f cells (", total);
    for (std::size_t k = 0; k < estimate.size(); ++k) std::fprintf(stderr, "%s%.0f", k ? ", " : "", estimate[k]);
    std::fprintf(stderr, " per dimension); pass --allow-large to proceed\n");
    return kInputError;
  }

  SpineOptions so;
  so.max_dim = a.max_dim;
  so.workers = ro.workers;
  const SpineComplex sc = build_spine_complex(cat, so);
  const double build_time = seconds_since(t0);
  std::printf("complex built (%.2fs)\n", build_time);
  if (!a.export_dir.empty()) export_chain_complex(a.export_dir, sc.complex);

  const BettiResult b = betti_numbers(sc.complex, ro);
  const double rank_time = seconds_since(t0) - build_time;

  // structural checks
  std::vector<std::string> failures;
  const bool complete = sc.complex.top_dim() == sc.max_possible_dim;
  if (!sc.complex.boundary_squared_zero()) failures.push_back("boundary does not square to zero");
  if (b.betti.empty() || b.betti[0] != 1) failures.push_back("b0 != 1");
  if (complete) {
    std::int64_t alt = 0;
    for (std::size_t k = 0; k < b.betti.size(); ++k) alt += (k % 2 ? -1 : 1) * b.betti[k];
    if (alt != euler_characteristic(sc.complex)) failures.push_back("Euler characteristic mismatch");
  }
  if (!b.modular_consistent()) failures.push_back("modular ranks disagree");
  if (a.leaves == 1)
    for (int k = 1; k <= sc.reported_dim && k < static_cast<int>(b.betti.size()); ++k)
      if (a.rank > 2 * k + 1 && b.betti[k] != 0) failures.push_back("stable-range vanishing fails at k = " + std::to_string(k));
  json face = nullptr;
  if (!a.skip_face_check) {
    const auto fr = verify_face_identity(cat, sc);
    face = {{"checked", fr.checked}, {"failures", fr.failures}};
    if (fr.failures) failures.push_back("face identity: " + fr.first_failure);
  }

  std::printf("\n  %-3s %10s %10s %6s  %s\n", "k", "cells", "rank d_k", "b_k", "certified");
  for (int k = 0; k <= sc.reported_dim && k < static_cast<int>(b.betti.size()); ++k)
    std::printf("  %-3d %10lld %10lld %6lld  %s\n", k, static_cast<long long>(sc.complex.cells[k]),
                static_cast<long long>(b.ranks[k].rank), static_cast<long long>(b.betti[k]),
                b.ranks[k].certified() ? "exact" : "modular");
  std::printf("\nbetti [");
  for (int k = 0; k <= sc.reported_dim && k < static_cast<int>(b.betti.size()); ++k)
    std::printf("%s%lld", k ? ", " : "", static_cast<long long>(b.betti[k]));
  std::printf("]\n");
  std::printf("euler %lld   build %.2fs   ranks %.2fs\n", static_cast<long long>(euler_characteristic(sc.complex)),
              build_time, rank_time);
  for (const auto& f : failures) std::printf("CHECK FAILED: %s\n", f.c_str());

  json report = betti_report(sc, b, ro);
  report["config"] = config;
  report["config_hash"] = config_hash(config);
  report["face_identity"] = face;
  report["checks_passed"] = failures.empty();
  report["seconds"] = {{"build", build_time}, {"ranks", rank_time}};
  if (!a.out.empty()) write_json(a.out, report);
  return failures.empty() ? kOk : kCheckFailed;
}

// ---------------------------------------------------------------------------

struct FlowArgs {
  std::string graph, tree, demo, out, frames_dir;
  std::vector<int> tree_vertices, tree_edges;
  int steps = 10;
};

int cmd_flow(const FlowArgs& a) {
  if (a.steps < 0) throw InputError("--steps must be nonnegative");
  EmbeddedGraph g;
  TreeSelection tree;
  if (!a.demo.empty()) {
    try {
      std::tie(g, tree) = demo_scene(a.demo);
    } catch (const std::invalid_argument& e) {
      throw InputError(e.what());
    }
  } else {
    if (a.graph.empty()) throw InputError("need --graph or --demo");
    g = embedded_from_json(read_json_file(a.graph));
    if (!a.tree.empty()) tree = tree_from_json(read_json_file(a.tree));
    else tree = {a.tree_vertices, a.tree_edges};
  }
  const CollapsibleCheck check = check_collapsible(g, tree);
  if (!check.ok()) {
    for (const auto& v : check.violations) {
      std::fprintf(stderr, "violation [%s]", v.clause.c_str());
      if (v.edge >= 0) std::fprintf(stderr, " edge %d", v.edge);
      if (v.sample >= 0) std::fprintf(stderr, " sample %d", v.sample);
      if (v.vertex >= 0) std::fprintf(stderr, " vertex %d", v.vertex);
      std::fprintf(stderr, ": %s\n", v.detail.c_str());
    }
    return kInputError;
  }
  std::vector<EmbeddedGraph> frames;
  const FlowSuiteReport rep = run_flow_suite(*check.scene, a.steps, &frames);
  if (!a.out.empty()) {
    std::ofstream out(a.out);
    if (!out) throw InputError("cannot write " + a.out);
    write_frames_header(out, g.dim);
    for (std::size_t i = 0; i < frames.size(); ++i)
      write_frame(out, a.steps == 0 ? 0.0 : double(i) / a.steps, frames[i]);
  }
  if (!a.frames_dir.empty()) {
    std::filesystem::create_directories(a.frames_dir);
    for (std::size_t i = 0; i < frames.size(); ++i)
      write_json(a.frames_dir + "/frame_" + std::to_string(i) + ".json", to_json(frames[i]));
  }
  std::printf("%d %s\n", rep.frames, rep.frames == 1 ? "frame" : "frames");
  std::printf("  t=0 identity error   %.3g\n", rep.identity_error);
  if (rep.combinatorial) {
    std::printf("  t=1 radial error     %.3g\n", rep.radial_error);
    std::printf("  t=1 combinatorics    %s\n", *rep.combinatorial ? "match" : "MISMATCH");
  }
  std::printf("  min d_t slope        %.4g\n", rep.min_slope);
  std::printf("  Hausdorff rate       %.4g\n", rep.hausdorff_rate);
  std::printf("invariants %s%s%s\n", rep.ok() ? "pass" : "FAIL", rep.ok() ? "" : ": ", rep.failure.c_str());
  return rep.ok() ? kOk : kCheckFailed;
}

// ---------------------------------------------------------------------------

struct SmallnessArgs {
  std::string g, gprime, spec, out;
  double epsilon = -1;
};

int cmd_check_smallness(const SmallnessArgs& a) {
  const EmbeddedGraph g = embedded_from_json(read_json_file(a.g));
  const EmbeddedGraph gp = embedded_from_json(read_json_file(a.gprime));
  SmallnessSpec spec = smallness_from_json(read_json_file(a.spec));
  if (a.epsilon > 0) spec.epsilon = a.epsilon;
  SmallnessReport rep;
  try {
    rep = check_smallness(g, gp, spec);
  } catch (const std::invalid_argument& e) {
    throw InputError(e.what());
  }
  json verdict = to_json(rep);
  verdict["epsilon"] = spec.epsilon;
  write_json(a.out, verdict);
  if (!a.out.empty() && a.out != "-")
    std::printf("%s%s%s\n", to_string(rep.status).c_str(), rep.detail.empty() ? "" : ": ", rep.detail.c_str());
  return rep.small() ? kOk : kCheckFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Graph catalogs, spine homology and the collapse flow"};
  app.require_subcommand(1);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  json config;

  EnumerateArgs ea;
  auto* en = app.add_subcommand("enumerate", "Catalog of graphs with given rank and leaf count");
  en->add_option("--rank", ea.rank, "First Betti number n")->required();
  en->add_option("--leaves", ea.leaves, "Number of labelled leaves s");
  en->add_option("--out", ea.out, "Write the catalog (JSON lines)");
  en->add_option("--cache", ea.cache, "Catalog cache directory");
  en->add_option("--workers", ea.workers, "Worker threads (default: $AUTFN_WORKERS or all cores)");

  SpineArgs sa;
  auto* sp = app.add_subcommand("spine", "Rational homology of the quotient spine");
  sp->add_option("--rank", sa.rank, "First Betti number n")->required();
  sp->add_option("--leaves", sa.leaves, "Number of labelled leaves s");
  sp->add_option("--max-dim", sa.max_dim, "Highest Betti number wanted (-1: all)");
  sp->add_option("--rank-mode", sa.rank_mode, "modular | exact | both")->capture_default_str();
  sp->add_option("--primes", sa.primes, "Primes for modular rank")->capture_default_str();
  sp->add_option("--exact-limit", sa.exact_limit, "Largest matrix side certified exactly in 'both' mode")
      ->capture_default_str();
  sp->add_option("--seed", sa.seed, "Seed for the prime choice");
  sp->add_option("--workers", sa.workers, "Worker threads (default: $AUTFN_WORKERS or all cores)");
  sp->add_option("--out", sa.out, "Write the JSON report here ('-' for stdout)");
  sp->add_option("--export-dir", sa.export_dir, "Write boundary matrices as triplet files");
  sp->add_option("--cache", sa.cache, "Catalog cache directory");
  sp->add_option("--large-threshold", sa.large_threshold, "Estimated cell count needing --allow-large");
  sp->add_flag("--allow-large", sa.allow_large, "Build large complexes such as (4,1)");
  sp->add_flag("--skip-face-check", sa.skip_face_check, "Skip the face identity cross-check");

  FlowArgs fa;
  auto* fl = app.add_subcommand("flow", "Collapse a tree in collapsible position");
  fl->add_option("--graph", fa.graph, "Embedded graph JSON");
  fl->add_option("--tree", fa.tree, "Tree selection JSON {\"vertices\", \"edges\"}");
  fl->add_option("--tree-vertices", fa.tree_vertices, "Tree vertex ids")->expected(1, -1);
  fl->add_option("--tree-edges", fa.tree_edges, "Tree edge ids")->expected(0, -1);
  fl->add_option("--demo", fa.demo, "Built-in scene: star | bar");
  fl->add_option("--steps", fa.steps, "Number of time steps")->capture_default_str();
  fl->add_option("--out", fa.out, "Frames CSV");
  fl->add_option("--frames-dir", fa.frames_dir, "Also write each frame as embedded graph JSON");

  SmallnessArgs ma;
  auto* sm = app.add_subcommand("check-smallness", "Check a sampled correspondence G' -> G");
  sm->add_option("--g", ma.g, "Codomain embedded graph JSON")->required();
  sm->add_option("--gprime", ma.gprime, "Domain embedded graph JSON")->required();
  sm->add_option("--spec", ma.spec, "epsilon, K, Q and correspondence JSON")->required();
  sm->add_option("--epsilon", ma.epsilon, "Override epsilon");
  sm->add_option("--out", ma.out, "Verdict JSON (default stdout)");

  try {
    std::vector<std::string> args(argv, argv + argc);
    args = expand_config(args);
    std::vector<std::string> rev(args.rbegin(), args.rend() - 1);
    app.parse(rev);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kInputError;
  } catch (const InputError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kInputError;
  }

  try {
    if (*en) return cmd_enumerate(ea);
    if (*sp) {
      config = {{"command", "spine"},     {"rank", sa.rank},          {"leaves", sa.leaves},
                {"max_dim", sa.max_dim},  {"rank_mode", sa.rank_mode}, {"primes", sa.primes},
                {"exact_limit", sa.exact_limit}, {"seed", sa.seed},   {"allow_large", sa.allow_large}};
      return cmd_spine(sa, config);
    }
    if (*fl) return cmd_flow(fa);
    if (*sm) return cmd_check_smallness(ma);
  } catch (const InputError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kInputError;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kInputError;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "internal error: %s\n", e.what());
    return kCheckFailed;
  }
  return kOk;
}
