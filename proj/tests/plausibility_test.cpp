#include "cqforge/plausibility.hpp"

#include <cstdio>
#include <fstream>
#include <set>

#include "cqforge/error.hpp"
#include "cqforge/text.hpp"
#include "doctest.h"
#include "helpers.hpp"

using namespace cqforge;
using namespace cqforge::testing;

namespace {

std::string write_temp(const std::string& contents) {
  static int counter = 0;
  std::string path = "plaus_test_tmp_" + std::to_string(counter++) + ".tsv";
  std::ofstream out(path);
  out << contents;
  return path;
}

std::set<std::tuple<std::string, Relation, std::string>> triple_texts(
    const KnowledgeGraph& g) {
  std::set<std::tuple<std::string, Relation, std::string>> out;
  for (const StoredTriple& t : g.triples()) {
    out.emplace(g.node_text(t.head), t.rel, g.node_text(t.tail));
  }
  return out;
}

}  // namespace

TEST_CASE("statement rendering matches the frozen golden file") {
  const std::string head = "PersonX asks PersonY for help";
  std::ifstream in(std::string(CQFORGE_TEST_DIR) + "/golden/statements.tsv");
  REQUIRE(in.good());
  std::string line;
  size_t rows = 0;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    auto t1 = line.find('\t');
    auto t2 = line.find('\t', t1 + 1);
    REQUIRE(t2 != std::string::npos);
    auto rel = parse_relation(line.substr(0, t1));
    REQUIRE(rel.has_value());
    std::string tail = line.substr(t1 + 1, t2 - t1 - 1);
    std::string expected = line.substr(t2 + 1);
    CHECK(triple_to_statement(head, *rel, tail) == expected);
    ++rows;
  }
  CHECK(rows == kRelationCount);
}

TEST_CASE("attribute statement renders the canonical example") {
  CHECK(triple_to_statement("PersonX repels PersonY's attack", Relation::xAttr,
                            "brave") ==
        "If PersonX repels PersonY's attack, then PersonX is seen as brave");
}

TEST_CASE("statements with the same tail still differ by head and relation") {
  auto a = triple_to_statement("A", Relation::xAttr, "A-trait");
  auto b = triple_to_statement("B", Relation::xAttr, "A-trait");
  CHECK(a != b);
  std::set<std::string> across_relations;
  for (Relation r : kAllRelations) {
    across_relations.insert(triple_to_statement("A", r, "T"));
  }
  CHECK(across_relations.size() == kRelationCount);
}

TEST_CASE("constant providers hit the trivial filter bounds") {
  DetRng rng(61);
  auto g = random_graph(rng, 20, 80);
  SUBCASE("constant 1 removes nothing") {
    ConstantPlausibility one(1.0);
    auto [out, report] = filter_by_plausibility(g, one, 0.5);
    CHECK(report.triples_removed == 0);
    CHECK(report.removed_fraction == 0.0);
    CHECK(out.triple_count() == g.triple_count());
  }
  SUBCASE("constant 0 removes everything") {
    ConstantPlausibility zero(0.0);
    auto [out, report] = filter_by_plausibility(g, zero, 0.5);
    CHECK(report.triples_removed == g.triple_count());
    CHECK(report.removed_fraction == doctest::Approx(1.0));
    CHECK(out.triple_count() == 0);
    CHECK(out.node_count() == 0);
  }
}

TEST_CASE("score table fixture: 3 of 10 triples fall below 0.5") {
  std::vector<RawTriple> records;
  std::string table;
  for (int i = 0; i < 10; ++i) {
    std::string head = "head " + std::to_string(i);
    std::string tail = "tail " + std::to_string(i);
    records.push_back({head, Relation::xWant, tail, 1.0});
    double score = i < 3 ? 0.2 : 0.8;
    table += head + "\txWant\t" + tail + "\t" + format_double(score) + "\n";
  }
  auto g = KnowledgeGraph::from_records(records);
  auto path = write_temp(table);
  FileScoreTable provider(path);
  auto [out, report] = filter_by_plausibility(g, provider, 0.5);
  CHECK(report.triples_before == 10);
  CHECK(report.triples_removed == 3);
  CHECK(report.removed_fraction == doctest::Approx(0.30));
  CHECK(out.triple_count() == 7);
  // the dropped triples took their now-isolated endpoints with them
  CHECK(report.nodes_removed == 6);
  // surviving triples carry the provider's score
  for (const StoredTriple& t : out.triples()) CHECK(t.plausibility == 0.8);
  std::remove(path.c_str());
}

TEST_CASE("filtering is monotone in the threshold") {
  DetRng rng(67);
  auto g = random_graph(rng, 25, 150);
  GraphScores provider(g);
  std::vector<double> thresholds = {0.1, 0.3, 0.5, 0.7, 0.9};
  std::vector<std::set<std::tuple<std::string, Relation, std::string>>> survivors;
  for (double th : thresholds) {
    auto [out, report] = filter_by_plausibility(g, provider, th);
    survivors.push_back(triple_texts(out));
  }
  for (size_t i = 1; i < survivors.size(); ++i) {
    for (const auto& t : survivors[i]) {
      CHECK(survivors[i - 1].count(t) == 1);
    }
  }
}

TEST_CASE("filtering twice at one threshold is a no-op") {
  DetRng rng(71);
  auto g = random_graph(rng, 25, 150);
  GraphScores p1(g);
  auto [once, r1] = filter_by_plausibility(g, p1, 0.5);
  GraphScores p2(once);
  auto [twice, r2] = filter_by_plausibility(once, p2, 0.5);
  CHECK(r2.triples_removed == 0);
  CHECK(triple_texts(once) == triple_texts(twice));
}

TEST_CASE("every survivor scores at least the threshold") {
  DetRng rng(73);
  auto g = random_graph(rng, 25, 150);
  GraphScores provider(g);
  for (double th : {0.2, 0.6, 0.9}) {
    auto [out, report] = filter_by_plausibility(g, provider, th);
    for (const StoredTriple& t : out.triples()) CHECK(t.plausibility >= th);
  }
}

TEST_CASE("score table lookup misses fall back to the default") {
  auto path = write_temp("known head\txWant\tknown tail\t0.4\n");
  FileScoreTable provider(path, 0.95);
  CHECK(provider.score("known head", Relation::xWant, "known tail") == 0.4);
  CHECK(provider.score("unknown", Relation::xWant, "unknown") == 0.95);
  CHECK(provider.score("known head", Relation::xNeed, "known tail") == 0.95);
  std::remove(path.c_str());
}

TEST_CASE("malformed score files are rejected") {
  SUBCASE("wrong field count") {
    auto path = write_temp("a\txWant\tb\n");
    CHECK_THROWS_AS(FileScoreTable{path}, ProviderError);
    std::remove(path.c_str());
  }
  SUBCASE("score out of range") {
    auto path = write_temp("a\txWant\tb\t1.7\n");
    CHECK_THROWS_AS(FileScoreTable{path}, ProviderError);
    std::remove(path.c_str());
  }
  SUBCASE("unknown relation") {
    auto path = write_temp("a\tnope\tb\t0.5\n");
    CHECK_THROWS_AS(FileScoreTable{path}, ProviderError);
    std::remove(path.c_str());
  }
}

TEST_CASE("attached scores read the plausibility column") {
  auto g = KnowledgeGraph::from_records({{"A", Relation::xWant, "B", 0.35}});
  GraphScores provider(g);
  CHECK(provider.score("A", Relation::xWant, "B") == 0.35);
  CHECK_THROWS_AS(provider.score("A", Relation::xNeed, "B"), ProviderError);
}

TEST_CASE("provider failures name the offending triple") {
  auto g = KnowledgeGraph::from_records({{"odd head", Relation::xWant, "odd tail", 1.0}});
  KnowledgeGraph other;  // empty, so every lookup fails
  GraphScores provider(other);
  CHECK_THROWS_WITH_AS(filter_by_plausibility(g, provider, 0.5),
                       doctest::Contains("odd head"), ProviderError);
}

TEST_CASE("threshold outside [0,1] is rejected") {
  auto g = KnowledgeGraph::from_records({{"A", Relation::xWant, "B", 1.0}});
  ConstantPlausibility one(1.0);
  CHECK_THROWS_AS(filter_by_plausibility(g, one, -0.1), Error);
  CHECK_THROWS_AS(filter_by_plausibility(g, one, 1.1), Error);
  CHECK_THROWS_AS(ConstantPlausibility{1.2}, Error);
}
