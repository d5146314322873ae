#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "hardytree/hardy_operator.hpp"
#include "hardytree/io.hpp"
#include "hardytree/random.hpp"
#include "hardytree/version.hpp"
#include "json.hpp"
#include "test_support.hpp"

using namespace hardytree;
namespace ts = test_support;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

}  // namespace

TEST_CASE("problem files round-trip byte for byte") {
  for (const Fixture& fx : all_fixtures()) {
    std::string p1 = "rt1_" + fx.name + ".json";
    std::string p2 = "rt2_" + fx.name + ".json";
    save_problem(p1, fx.tree, fx.u, fx.v, fx.root);
    LoadedProblem lp = load_problem(p1);
    CHECK(lp.tree.edge_count() == fx.tree.edge_count());
    CHECK(lp.tree.vertex_count() == fx.tree.vertex_count());
    CHECK(lp.tree.total_length() == doctest::Approx(fx.tree.total_length()).epsilon(1e-12));
    CHECK(lp.root.edge == fx.root.edge);
    CHECK(lp.root.offset == doctest::Approx(fx.root.offset));
    save_problem(p2, lp.tree, lp.u, lp.v, lp.root);
    CHECK(slurp(p1) == slurp(p2));
    std::remove(p1.c_str());
    std::remove(p2.c_str());
  }
}

TEST_CASE("the bundled problem files match the in-memory instances") {
  for (const Fixture& fx : all_fixtures()) {
    LoadedProblem lp = load_problem(std::string(FIXTURES_DIR) + "/" + fx.name + ".json");
    RootedTree rt = RootedTree::root_at(lp.tree, lp.root);
    StepWeight u = split_weight(lp.u, rt.split());
    StepWeight v = split_weight(lp.v, rt.split());
    CHECK(product_integral(rt, u, v, whole_tree(rt)) ==
          doctest::Approx(fx.uv_integral).epsilon(1e-12));
  }
}

TEST_CASE("malformed problem text is rejected with context") {
  CHECK_THROWS_AS(parse_problem("{"), input_error);
  CHECK_THROWS_AS(parse_problem("[]"), input_error);

  Fixture iv = fixture_interval();
  save_problem("bad_w.json", iv.tree, iv.u, iv.v, iv.root);
  nlohmann::json doc = nlohmann::json::parse(slurp("bad_w.json"));
  doc["edges"][0]["u"][0]["len"] = 0.75;  // no longer sums to the edge length
  bool threw = false;
  try {
    parse_problem(doc.dump());
  } catch (const input_error& e) {
    threw = true;
    CHECK(std::string(e.what()).find("edge") != std::string::npos);
  }
  CHECK(threw);

  doc["edges"][0]["u"][0]["len"] = 1.0;
  doc["root"]["edge"] = 9;
  CHECK_THROWS(parse_problem(doc.dump()));
  std::remove("bad_w.json");
}

TEST_CASE("artifact tables carry the header block and reproduce exactly") {
  ArtifactHeader h;
  h.config = "demo input=fixture:interval p=2";
  h.grid = 64;
  h.seed = 7;
  Table tb;
  tb.columns = {"name", "value"};
  tb.rows.push_back({"plain", "1"});
  tb.rows.push_back({"with,comma", "2"});

  write_table_csv("hdr.csv", h, tb);
  std::string csv = slurp("hdr.csv");
  CHECK(csv.rfind("# config_hash 0x", 0) == 0);
  CHECK(csv.find("# grid 64\n") != std::string::npos);
  CHECK(csv.find("# seed 7\n") != std::string::npos);
  CHECK(csv.find(std::string("# version ") + version_string) != std::string::npos);
  CHECK(csv.find("\"with,comma\"") != std::string::npos);

  write_table_csv("hdr2.csv", h, tb);
  CHECK(slurp("hdr2.csv") == csv);

  write_table_json("hdr.json", h, tb);
  nlohmann::json doc = nlohmann::json::parse(slurp("hdr.json"));
  CHECK(doc["header"]["grid"] == 64);
  CHECK(doc["header"]["seed"] == 7);
  CHECK(doc["columns"].size() == 2);
  CHECK(doc["rows"].size() == 2);
  std::remove("hdr.csv");
  std::remove("hdr2.csv");
  std::remove("hdr.json");
}

TEST_CASE("plots only render positive data") {
  ArtifactHeader h;
  h.config = "plot";
  std::vector<std::pair<double, double>> pts{{0.2, 0.4}, {0.1, 0.38}};
  CHECK(write_plot_svg("plot.svg", h, pts, 1.0 / ts::kPi, "eps", "eps*N"));
  std::string svg = slurp("plot.svg");
  CHECK(svg.find("<svg") != std::string::npos);
  CHECK_FALSE(write_plot_svg("plot_none.svg", h, {}, 0.5, "x", "y"));
  std::remove("plot.svg");
  std::remove("plot_none.svg");
}

TEST_CASE("numeric formatting is stable and canonical") {
  CHECK(num(1.0) == "1");
  CHECK(num(0.25) == "0.25");
  CHECK(num(1.0 / 3.0) == "0.333333333333");
  CHECK(num(-0.0) == "0");
  CHECK(num(2.0 / ts::kPi) == "0.636619772368");

  CHECK(fnv1a("") == 0xcbf29ce484222325ull);
  CHECK(fnv1a("a") == 0xaf63dc4c8601ec8cull);
  CHECK(fnv1a("demo p=2") != fnv1a("demo p=3"));
}

TEST_CASE("random streams are reproducible and respect their bounds") {
  RandomStream a(42), b(42);
  for (int i = 0; i < 5; ++i) CHECK(a.uniform() == b.uniform());
  RandomStream c(43);
  int distinct = 0;
  double last = -1.0;
  for (int i = 0; i < 200; ++i) {
    double x = c.uniform(2.0, 3.0);
    CHECK(x >= 2.0);
    CHECK(x < 3.0);
    if (x != last) ++distinct;
    last = x;
  }
  CHECK(distinct > 100);
  for (int i = 0; i < 200; ++i) {
    long long k = c.uniform_int(1, 6);
    CHECK(k >= 1);
    CHECK(k <= 6);
  }
}
