#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "autfn/canonical.hpp"
#include "autfn/io.hpp"

using namespace autfn;

namespace {

std::filesystem::path fresh_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("autfn_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("graph JSON round-trip") {
  for (const auto& g : {make_theta(), make_labelled_edge(), make_rose(3)}) {
    const auto j = to_json(g);
    CHECK(j["m"] == g.size());
    CHECK(graph_from_json(j) == g);
    CHECK(graph_from_json(json::parse(j.dump())) == g);
  }
  CHECK(to_json(make_labelled_edge())["leaf_labels"] == json{{"0", 1}, {"1", 2}});
}

TEST_CASE("graph JSON schema errors") {
  CHECK_THROWS_AS(graph_from_json(json{{"m", 2}, {"sigma", {0, 1}}}), std::invalid_argument);
  CHECK_THROWS_AS(graph_from_json(json{{"m", 2}, {"sigma", {0}}, {"t", {0, 1}}, {"leaf_labels", json::object()}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(graph_from_json(json{{"m", 1}, {"sigma", {0}}, {"t", {0}}, {"leaf_labels", {{"x", 1}}}}),
                  std::invalid_argument);
  // invariant violations are left to validate()
  const auto loop = graph_from_json(to_json(make_rose(1)));
  CHECK_FALSE(validate(loop).ok());
}

TEST_CASE("map and forest JSON round-trip") {
  const auto c = collapse_forest(make_theta(), Forest{{1}});
  CHECK(map_from_json(to_json(c.map)) == c.map);
  CHECK(forest_from_json(to_json(Forest{{0, 2}})) == Forest{{0, 2}});
  CHECK_THROWS_AS(forest_from_json(json{{"edges", {2, 0}}}), std::invalid_argument);
}

TEST_CASE("catalog file round-trip and tamper checks") {
  const auto cat = enumerate_graphs(2, 1);
  std::stringstream ss;
  write_catalog(ss, cat);
  const std::string text = ss.str();
  const auto back = read_catalog(ss);
  CHECK(back.graphs == cat.graphs);
  CHECK(back.counts_by_internal_vertices == cat.counts_by_internal_vertices);

  // drop the last entry: header count no longer matches
  std::string cut = text.substr(0, text.rfind('\n', text.size() - 2) + 1);
  std::stringstream short_file(cut);
  CHECK_THROWS_AS(read_catalog(short_file), std::runtime_error);

  // a non-canonical entry
  std::istringstream lines(text);
  std::string header, first;
  std::getline(lines, header);
  std::getline(lines, first);
  auto g = graph_from_json(json::parse(first));
  Permutation p(g.size());
  for (int i = 0; i < g.size(); ++i) p[i] = g.size() - 1 - i;
  std::stringstream relabelled;
  json h = json::parse(header);
  h["count"] = 1;
  relabelled << h.dump() << '\n' << to_json(relabel(g, p)).dump() << '\n';
  CHECK_THROWS_AS(read_catalog(relabelled), std::runtime_error);

  std::stringstream empty;
  CHECK_THROWS_AS(read_catalog(empty), std::runtime_error);
}

TEST_CASE("catalog cache") {
  const auto dir = fresh_dir("cache");
  bool cached = true;
  const auto a = load_or_build_catalog(dir, 2, 1, 1, &cached);
  CHECK_FALSE(cached);
  CHECK(std::filesystem::exists(catalog_cache_path(dir, 2, 1)));
  const auto b = load_or_build_catalog(dir, 2, 1, 1, &cached);
  CHECK(cached);
  CHECK(a.graphs == b.graphs);
  CHECK(catalog_cache_path(dir, 3, 0).filename() == "catalog_n3_s0_autfn-enum-1.jsonl");
  std::filesystem::remove_all(dir);
}

TEST_CASE("chain complex export") {
  const auto dir = fresh_dir("export");
  const auto sc = build_spine_complex(enumerate_graphs(2, 0));
  export_chain_complex(dir, sc.complex);
  std::ifstream in(dir / "d1.txt");
  SparseIntMatrix m;
  CHECK(read_triplets(in, m) == 1);
  CHECK(m == sc.complex.boundary[1]);
  std::filesystem::remove_all(dir);
}

TEST_CASE("betti report fields") {
  const auto sc = build_spine_complex(enumerate_graphs(2, 0));
  RankOptions ro;
  ro.mode = RankMode::both;
  const auto b = betti_numbers(sc.complex, ro);
  const auto r = betti_report(sc, b, ro);
  CHECK(r["betti"] == json{1, 0});
  CHECK(r["cells"] == json{3, 2});
  CHECK(r["euler"] == 1);
  CHECK(r["complete"] == true);
  CHECK(r["euler_matches_betti"] == true);
  CHECK(r["all_certified"] == true);
  CHECK(r["rank_mode"] == "both");
  CHECK(r["ranks"][1]["exact"] == 2);
  CHECK(r["version"] == kGeneratorVersion);
}

TEST_CASE("embedded graph JSON round-trip") {
  const auto [g, tree] = demo_scene("bar");
  const auto back = embedded_from_json(to_json(g));
  CHECK(back.dim == g.dim);
  CHECK(back.vertices == g.vertices);
  CHECK(back.leaf_labels == g.leaf_labels);
  REQUIRE(back.edges.size() == g.edges.size());
  for (std::size_t e = 0; e < g.edges.size(); ++e) {
    CHECK(back.edges[e].params == g.edges[e].params);
    CHECK(back.edges[e].points == g.edges[e].points);
  }
  json bad = to_json(g);
  bad["dim"] = 4;
  CHECK_THROWS_AS(embedded_from_json(bad), std::invalid_argument);
}

TEST_CASE("tree and smallness spec parsing") {
  const auto t = tree_from_json(json{{"vertices", {0, 1}}, {"edges", {0}}});
  CHECK(t.vertices == std::vector<int>{0, 1});
  CHECK(t.edges == std::vector<int>{0});
  const auto s = smallness_from_json(json{{"epsilon", 0.1},
                                          {"K", {{"lo", {-1, -1}}, {"hi", {1, 1}}}},
                                          {"correspondence", {{0, 1, 0, 2}}}});
  CHECK(s.epsilon == 0.1);
  CHECK(s.K.hi[1] == 1);
  CHECK_FALSE(s.Q.has_value());
  REQUIRE(s.correspondence.size() == 1);
  CHECK(s.correspondence[0].cod_index == 2);
  CHECK_THROWS_AS(smallness_from_json(json{{"epsilon", 0.1},
                                           {"K", {{"lo", {-1, -1}}, {"hi", {1, 1}}}},
                                           {"correspondence", {{0, 1, 0}}}}),
                  std::invalid_argument);
}

TEST_CASE("frames CSV") {
  const auto [g, tree] = demo_scene("star");
  std::stringstream ss;
  write_frames_header(ss, 2);
  write_frame(ss, 0.5, g);
  std::string line;
  std::getline(ss, line);
  CHECK(line == "t,edge_id,sample_index,param,x,y");
  std::size_t rows = 0;
  while (std::getline(ss, line)) ++rows;
  std::size_t samples = 0;
  for (const auto& e : g.edges) samples += e.points.size();
  CHECK(rows == samples);
}

TEST_CASE("config hash is stable and key-order independent") {
  const json a = json::parse(R"({"rank": 2, "leaves": 1, "mode": "both"})");
  const json b = json::parse(R"({"mode": "both", "leaves": 1, "rank": 2})");
  CHECK(config_hash(a) == config_hash(b));
  CHECK(config_hash(a).size() == 16);
  CHECK(config_hash(a) != config_hash(json{{"rank", 3}}));
}

TEST_CASE("read_json_file errors") {
  CHECK_THROWS_AS(read_json_file("/nonexistent/file.json"), std::invalid_argument);
  const auto dir = fresh_dir("json");
  std::ofstream(dir / "bad.json") << "{not json";
  CHECK_THROWS_AS(read_json_file(dir / "bad.json"), std::invalid_argument);
  std::filesystem::remove_all(dir);
}
