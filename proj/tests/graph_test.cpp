#include "cqforge/graph.hpp"

#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "cqforge/error.hpp"
#include "doctest.h"
#include "helpers.hpp"

using namespace cqforge;
using namespace cqforge::testing;

namespace {

std::string write_temp(const std::string& contents) {
  static int counter = 0;
  std::string path = "graph_test_tmp_" + std::to_string(counter++) + ".tsv";
  std::ofstream out(path);
  out << contents;
  return path;
}

}  // namespace

TEST_CASE("minimal graph: one record, two nodes") {
  auto g = KnowledgeGraph::from_records({{"A", Relation::xWant, "B", 1.0}});
  CHECK(g.node_count() == 2);
  CHECK(g.triple_count() == 1);
  CHECK(g.node_text(0) == "A");
  CHECK(g.node_text(1) == "B");
  CHECK(g.has_edge(0, Relation::xWant, 1));
}

TEST_CASE("duplicate records collapse to one triple") {
  auto g = KnowledgeGraph::from_records({{"A", Relation::xWant, "B", 0.9},
                                         {"A", Relation::xWant, "B", 0.2}});
  CHECK(g.node_count() == 2);
  CHECK(g.triple_count() == 1);
  // first occurrence wins
  CHECK(g.edge_plausibility(0, Relation::xWant, 1) == 0.9);
}

TEST_CASE("loading rejects malformed input with line numbers") {
  SUBCASE("unknown relation") {
    auto path = write_temp("A\txWant\tB\nA\tnotarel\tB\n");
    CHECK_THROWS_WITH_AS(KnowledgeGraph::load(path),
                         doctest::Contains("line 2"), ParseError);
    std::remove(path.c_str());
  }
  SUBCASE("missing field") {
    auto path = write_temp("A\txWant\n");
    CHECK_THROWS_AS(KnowledgeGraph::load(path), ParseError);
    std::remove(path.c_str());
  }
  SUBCASE("empty tail") {
    auto path = write_temp("A\txWant\t \n");
    CHECK_THROWS_AS(KnowledgeGraph::load(path), ParseError);
    std::remove(path.c_str());
  }
  SUBCASE("score out of range") {
    auto path = write_temp("A\txWant\tB\t1.5\n");
    CHECK_THROWS_AS(KnowledgeGraph::load(path), ParseError);
    std::remove(path.c_str());
  }
  SUBCASE("comments and blank lines are skipped") {
    auto path = write_temp("# header\n\nA\txWant\tB\t0.7\n");
    auto g = KnowledgeGraph::load(path);
    CHECK(g.triple_count() == 1);
    CHECK(g.edge_plausibility(0, Relation::xWant, 1) == 0.7);
    std::remove(path.c_str());
  }
}

TEST_CASE("counts on a large random file match an independent pass") {
  DetRng rng(42);
  auto records = random_records(rng, 120, 1000);
  std::ostringstream file;
  for (const auto& r : records) {
    file << r.head << '\t' << relation_name(r.rel) << '\t' << r.tail << '\n';
  }
  auto path = write_temp(file.str());

  // independent recount: hash sets over the raw lines
  std::set<std::string> texts;
  std::set<std::string> distinct;
  std::ifstream in(path);
  std::string line;
  while (std::getline(in, line)) {
    auto tab1 = line.find('\t');
    auto tab2 = line.find('\t', tab1 + 1);
    texts.insert(line.substr(0, tab1));
    texts.insert(line.substr(tab2 + 1));
    distinct.insert(line);
  }

  auto g = KnowledgeGraph::load(path);
  CHECK(g.node_count() == texts.size());
  CHECK(g.triple_count() == distinct.size());
  std::remove(path.c_str());
}

TEST_CASE("load determinism: same file, same ids") {
  DetRng rng(7);
  auto records = random_records(rng, 40, 300);
  std::ostringstream file;
  for (const auto& r : records) {
    file << r.head << '\t' << relation_name(r.rel) << '\t' << r.tail << '\t'
         << r.plausibility << '\n';
  }
  auto path = write_temp(file.str());
  auto g1 = KnowledgeGraph::load(path);
  auto g2 = KnowledgeGraph::load(path);
  REQUIRE(g1.node_count() == g2.node_count());
  REQUIRE(g1.triple_count() == g2.triple_count());
  for (NodeId i = 0; i < g1.node_count(); ++i) {
    CHECK(g1.node_text(i) == g2.node_text(i));
  }
  for (size_t i = 0; i < g1.triple_count(); ++i) {
    CHECK(g1.triples()[i].head == g2.triples()[i].head);
    CHECK(g1.triples()[i].rel == g2.triples()[i].rel);
    CHECK(g1.triples()[i].tail == g2.triples()[i].tail);
  }
  std::remove(path.c_str());
}

TEST_CASE("save then load round-trips") {
  DetRng rng(11);
  auto g1 = random_graph(rng, 30, 200);
  auto path = write_temp("");
  g1.save(path);
  auto g2 = KnowledgeGraph::load(path);
  REQUIRE(g1.node_count() == g2.node_count());
  REQUIRE(g1.triple_count() == g2.triple_count());
  for (const StoredTriple& t : g1.triples()) {
    auto h = g2.find_node(g1.node_text(t.head));
    auto tl = g2.find_node(g1.node_text(t.tail));
    REQUIRE(h.has_value());
    REQUIRE(tl.has_value());
    CHECK(g2.edge_plausibility(*h, t.rel, *tl) == t.plausibility);
  }
  std::remove(path.c_str());
}

TEST_CASE("successors") {
  SUBCASE("no outgoing edges for the relation") {
    auto g = KnowledgeGraph::from_records({{"A", Relation::xWant, "B", 1.0}});
    CHECK(g.successors(0, Relation::xNeed).empty());
    CHECK(g.successors(1, Relation::xWant).empty());
  }
  SUBCASE("direct readback") {
    auto g = KnowledgeGraph::from_records({{"A", Relation::xWant, "B", 1.0},
                                           {"A", Relation::xWant, "C", 1.0}});
    auto s = g.successors(0, Relation::xWant);
    REQUIRE(s.size() == 2);
    CHECK(s[0].tail == 1);
    CHECK(s[1].tail == 2);
  }
  SUBCASE("matches a table scan on random graphs") {
    DetRng rng(3);
    for (int trial = 0; trial < 20; ++trial) {
      auto g = random_graph(rng, 60, 500);
      for (NodeId h = 0; h < g.node_count(); ++h) {
        for (Relation r : kAllRelations) {
          auto fast = g.successors(h, r);
          auto slow = scan_successors(g, h, r);
          REQUIRE(fast.size() == slow.size());
          for (size_t i = 0; i < slow.size(); ++i) REQUIRE(fast[i].tail == slow[i]);
        }
      }
    }
  }
}

TEST_CASE("predecessors") {
  SUBCASE("source node has none") {
    auto g = KnowledgeGraph::from_records({{"A", Relation::xWant, "B", 1.0}});
    CHECK(g.predecessors(0).empty());
  }
  SUBCASE("collects all incoming pairs") {
    auto g = KnowledgeGraph::from_records({{"A", Relation::xEffect, "C", 1.0},
                                           {"B", Relation::xIntent, "C", 1.0}});
    auto p = g.predecessors(*g.find_node("C"));
    REQUIRE(p.size() == 2);
    CHECK(g.node_text(p[0].head) == "A");
    CHECK(p[0].rel == Relation::xEffect);
    CHECK(g.node_text(p[1].head) == "B");
    CHECK(p[1].rel == Relation::xIntent);
  }
  SUBCASE("ordered by plausibility desc, then head, then relation") {
    auto g = KnowledgeGraph::from_records({{"A", Relation::xWant, "Z", 0.3},
                                           {"B", Relation::xWant, "Z", 0.9},
                                           {"C", Relation::xWant, "Z", 0.9},
                                           {"C", Relation::xNeed, "Z", 0.3}});
    auto z = *g.find_node("Z");
    auto p = g.predecessors(z);
    REQUIRE(p.size() == 4);
    CHECK(g.node_text(p[0].head) == "B");
    CHECK(g.node_text(p[1].head) == "C");
    CHECK(p[1].rel == Relation::xWant);
    CHECK(g.node_text(p[2].head) == "A");
    CHECK(g.node_text(p[3].head) == "C");
    CHECK(p[3].rel == Relation::xNeed);
  }
  SUBCASE("matches a table scan on random graphs") {
    DetRng rng(5);
    for (int trial = 0; trial < 20; ++trial) {
      auto g = random_graph(rng, 60, 500);
      for (NodeId n = 0; n < g.node_count(); ++n) {
        auto fast = g.predecessors(n);
        std::vector<std::tuple<NodeId, Relation>> got;
        for (const InEdge& e : fast) got.emplace_back(e.head, e.rel);
        std::sort(got.begin(), got.end());
        REQUIRE(got == scan_predecessors(g, n));
      }
    }
  }
}

TEST_CASE("index inversion: forward and reverse agree") {
  DetRng rng(13);
  for (int trial = 0; trial < 25; ++trial) {
    auto g = random_graph(rng, 50, 400);
    for (const StoredTriple& t : g.triples()) {
      bool found = false;
      for (const InEdge& e : g.predecessors(t.tail)) {
        if (e.head == t.head && e.rel == t.rel) found = true;
      }
      REQUIRE(found);
    }
    size_t via_reverse = 0;
    for (NodeId n = 0; n < g.node_count(); ++n) via_reverse += g.predecessors(n).size();
    REQUIRE(via_reverse == g.triple_count());
  }
}

TEST_CASE("stale node ids are rejected") {
  auto g = KnowledgeGraph::from_records({{"A", Relation::xWant, "B", 1.0}});
  CHECK_THROWS_AS(g.node_text(2), Error);
  CHECK_THROWS_AS(g.successors(99, Relation::xWant), Error);
  CHECK_THROWS_AS(g.predecessors(99), Error);
}

TEST_CASE("answerable pool is exactly the in-degree>=1 nodes") {
  auto g = KnowledgeGraph::from_records({{"A", Relation::xWant, "B", 1.0},
                                         {"A", Relation::xNeed, "C", 1.0},
                                         {"D", Relation::isAfter, "B", 1.0}});
  auto pool = g.answerable_nodes();
  std::vector<NodeId> expect = {*g.find_node("B"), *g.find_node("C")};
  std::sort(expect.begin(), expect.end());
  CHECK(pool == expect);
}

TEST_CASE("graph stats") {
  SUBCASE("empty graph is all zeros") {
    auto g = KnowledgeGraph::from_records({});
    auto s = g.stats();
    CHECK(s.node_count == 0);
    CHECK(s.triple_count == 0);
    CHECK(s.mean_degree_undirected == 0.0);
    CHECK(s.degree_histogram.empty());
  }
  SUBCASE("two nodes, one triple") {
    auto g = KnowledgeGraph::from_records({{"A", Relation::xWant, "B", 1.0}});
    auto s = g.stats();
    CHECK(s.mean_degree_undirected == doctest::Approx(1.0));
    CHECK(s.mean_degree_directed == doctest::Approx(0.5));
  }
  SUBCASE("six-node seven-edge fixture, hand-counted histogram") {
    auto g = KnowledgeGraph::from_records({
        {"A", Relation::xWant, "B", 1.0},
        {"A", Relation::xEffect, "C", 1.0},
        {"B", Relation::xIntent, "C", 1.0},
        {"C", Relation::isAfter, "D", 1.0},
        {"D", Relation::xAttr, "E", 1.0},
        {"E", Relation::oWant, "F", 1.0},
        {"A", Relation::HinderedBy, "F", 1.0},
    });
    auto s = g.stats();
    CHECK(s.node_count == 6);
    CHECK(s.triple_count == 7);
    // degrees: A=3 B=2 C=3 D=2 E=2 F=2
    REQUIRE(s.degree_histogram.size() == 4);
    CHECK(s.degree_histogram[0] == 0);
    CHECK(s.degree_histogram[1] == 0);
    CHECK(s.degree_histogram[2] == 4);
    CHECK(s.degree_histogram[3] == 2);
    CHECK(s.mean_degree_undirected == doctest::Approx(14.0 / 6.0));
  }
}
