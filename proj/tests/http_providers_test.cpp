#include <atomic>
#include <string>
#include <thread>
#include <vector>

#include "cqforge/error.hpp"
#include "cqforge/graph.hpp"
#include "cqforge/normalize.hpp"
#include "cqforge/plausibility.hpp"
#include "cqforge/similarity.hpp"
#include "cqforge/verbalize.hpp"
#include "doctest.h"
#include "httplib.h"
#include "json.hpp"

using namespace cqforge;
using nlohmann::json;

namespace {

// In-process endpoint stub. Every handler parses the request like a real
// provider would so the tests exercise the wire format, not just transport.
struct StubServer {
  httplib::Server srv;
  int port = 0;
  std::thread worker;
  std::atomic<int> embed_calls{0};
  std::atomic<int> score_calls{0};
  json last_narrate_request;

  StubServer() {
    srv.Post("/embed", [this](const httplib::Request& req,
                              httplib::Response& res) {
      ++embed_calls;
      auto body = json::parse(req.body);
      json vectors = json::array();
      for (const auto& t : body["texts"]) {
        std::string text = t.get<std::string>();
        // alpha-texts share a direction, everything else is orthogonal
        if (text.find("alpha") != std::string::npos) {
          vectors.push_back({1.0, 0.0});
        } else {
          vectors.push_back({0.0, 1.0});
        }
      }
      res.set_content(json{{"vectors", vectors}}.dump(), "application/json");
    });

    srv.Post("/score", [this](const httplib::Request& req,
                              httplib::Response& res) {
      ++score_calls;
      auto body = json::parse(req.body);
      json scores = json::array();
      for (const auto& s : body["statements"]) {
        auto statement = s.get<std::string>();
        scores.push_back(statement.find("solid") != std::string::npos ? 0.9
                                                                      : 0.2);
      }
      res.set_content(json{{"scores", scores}}.dump(), "application/json");
    });

    srv.Post("/score-bad",
             [](const httplib::Request&, httplib::Response& res) {
               res.set_content(json{{"scores", {1.7}}}.dump(),
                               "application/json");
             });

    srv.Post("/narrate", [this](const httplib::Request& req,
                                httplib::Response& res) {
      last_narrate_request = json::parse(req.body);
      auto a1 = last_narrate_request["anchors"][0].get<std::string>();
      auto a2 = last_narrate_request["anchors"][1].get<std::string>();
      if (last_narrate_request["kind"].get<std::string>() == "2i-neg") {
        a2 = negate_event(a2);
      }
      std::string text = "It began when <E1>" + a1 +
                         "</E1> and soon after <E2>" + a2 + "</E2>.";
      res.set_content(json{{"text", text}}.dump(), "application/json");
    });

    srv.Post("/narrate-literal", [](const httplib::Request& req,
                                    httplib::Response& res) {
      // never negates, so negation requests come back mis-tagged
      auto body = json::parse(req.body);
      std::string text = "<E1>" + body["anchors"][0].get<std::string>() +
                         "</E1> <E2>" + body["anchors"][1].get<std::string>() +
                         "</E2>";
      res.set_content(json{{"text", text}}.dump(), "application/json");
    });

    srv.Post("/narrate-na", [](const httplib::Request&, httplib::Response& res) {
      res.set_content(json{{"text", "NA"}}.dump(), "application/json");
    });

    srv.Post("/junk", [](const httplib::Request&, httplib::Response& res) {
      res.set_content("this is not json", "text/plain");
    });

    port = srv.bind_to_any_port("127.0.0.1");
    REQUIRE(port > 0);
    worker = std::thread([this] { srv.listen_after_bind(); });
    srv.wait_until_ready();
  }

  ~StubServer() {
    srv.stop();
    worker.join();
  }

  std::string url(const std::string& path) const {
    return "http://127.0.0.1:" + std::to_string(port) + path;
  }
};

QueryInstance two_anchor_query(KnowledgeGraph& g, QueryKind kind,
                               const std::string& a1, const std::string& a2) {
  g = KnowledgeGraph::from_records({{a1, Relation::xWant, "the shared sink"},
                                    {a2, kind == QueryKind::TwoINeg
                                             ? Relation::HinderedBy
                                             : Relation::xWant,
                                     "the shared sink"}});
  QueryInstance q;
  q.kind = kind;
  q.relations = {Relation::xWant, kind == QueryKind::TwoINeg
                                      ? Relation::HinderedBy
                                      : Relation::xWant};
  q.anchors = {g.find_node(a1).value(), g.find_node(a2).value()};
  q.seed_answer = g.find_node("the shared sink").value();
  return q;
}

}  // namespace

TEST_CASE("embedding endpoint powers node merging") {
  StubServer server;
  HttpEmbeddingSimilarity sim(server.url("/embed"));

  auto g = KnowledgeGraph::from_records(
      {{"alpha one", Relation::xWant, "gamma sink"},
       {"alpha two", Relation::xWant, "gamma sink"}});
  auto [merged, mm] = merge_nodes(g, sim, {.tau = 0.95});

  CHECK(mm.merged_count == 1);
  CHECK(merged.node_count() == 2);
  CHECK(merged.triple_count() == 1);
  CHECK(merged.find_node("alpha one").has_value());
  CHECK_FALSE(merged.find_node("alpha two").has_value());
  // prime() batches the whole vocabulary into a single request
  CHECK(server.embed_calls == 1);
}

TEST_CASE("scoring endpoint drives the filter and caches statements") {
  StubServer server;
  HttpPlausibility provider(server.url("/score"));

  auto g = KnowledgeGraph::from_records(
      {{"a solid plan", Relation::xEffect, "a good outcome", 0.5},
       {"a shaky plan", Relation::xEffect, "a bad outcome", 0.5}});
  auto [kept, report] = filter_by_plausibility(g, provider, 0.5);

  CHECK(report.triples_before == 2);
  CHECK(report.triples_removed == 1);
  CHECK(kept.triple_count() == 1);
  auto h = kept.find_node("a solid plan");
  auto t = kept.find_node("a good outcome");
  REQUIRE(h.has_value());
  REQUIRE(t.has_value());
  // survivors carry the endpoint's score, not the input value
  CHECK(kept.edge_plausibility(*h, Relation::xEffect, *t) == 0.9);

  int calls_after_filter = server.score_calls;
  CHECK(provider.score("a solid plan", Relation::xEffect, "a good outcome") ==
        0.9);
  CHECK(server.score_calls == calls_after_filter);  // cache hit, no request
}

TEST_CASE("out-of-range scores are refused") {
  StubServer server;
  HttpPlausibility provider(server.url("/score-bad"));
  CHECK_THROWS_AS(provider.score("x", Relation::xWant, "y"), ProviderError);
}

TEST_CASE("narration endpoint round-trips tagged events") {
  StubServer server;
  HttpLlmClient client(server.url("/narrate"));
  auto prompts = LlmPromptSet::load(CQFORGE_DATA_DIR);

  KnowledgeGraph g;
  auto q = two_anchor_query(g, QueryKind::TwoI, "PersonX files a claim",
                            "PersonX waits in line");
  NameAssignment names;
  names.x = "Quinn";

  auto out = verbalize_context_llm(g, q, names, client, prompts);
  CHECK(out.outcome == LlmOutcome::kAccepted);
  CHECK(out.text ==
        "It began when Quinn files a claim and soon after Quinn waits in "
        "line.");
  CHECK(out.text.find("<E1>") == std::string::npos);

  // the request carried the instruction block, exemplars, and the kind
  CHECK(server.last_narrate_request["system"].get<std::string>() ==
        prompts.system_intersection);
  CHECK(server.last_narrate_request["exemplars"].size() ==
        prompts.exemplars.size());
  CHECK(server.last_narrate_request["kind"].get<std::string>() == "2i");
}

TEST_CASE("negation requests expect the negated second event") {
  StubServer server;
  auto prompts = LlmPromptSet::load(CQFORGE_DATA_DIR);
  NameAssignment names;

  KnowledgeGraph g;
  auto q = two_anchor_query(g, QueryKind::TwoINeg, "PersonX wins the raffle",
                            "PersonX loses the ticket");

  HttpLlmClient negating(server.url("/narrate"));
  auto ok = verbalize_context_llm(g, q, names, negating, prompts);
  CHECK(ok.outcome == LlmOutcome::kAccepted);
  CHECK(server.last_narrate_request["system"].get<std::string>() ==
        prompts.system_negation);

  HttpLlmClient literal(server.url("/narrate-literal"));
  auto bad = verbalize_context_llm(g, q, names, literal, prompts);
  CHECK(bad.outcome == LlmOutcome::kInvalid);
}

TEST_CASE("refusals and transport failures are surfaced") {
  StubServer server;
  auto prompts = LlmPromptSet::load(CQFORGE_DATA_DIR);
  NameAssignment names;

  KnowledgeGraph g;
  auto q = two_anchor_query(g, QueryKind::TwoI, "PersonX hears a noise",
                            "PersonX checks the door");

  HttpLlmClient refusing(server.url("/narrate-na"));
  auto na = verbalize_context_llm(g, q, names, refusing, prompts);
  CHECK(na.outcome == LlmOutcome::kNa);

  HttpLlmClient garbled(server.url("/junk"));
  CHECK_THROWS_AS(verbalize_context_llm(g, q, names, garbled, prompts),
                  ProviderError);

  HttpEmbeddingSimilarity unreachable("http://127.0.0.1:9/embed");
  std::vector<std::string> texts = {"anything"};
  CHECK_THROWS_AS(unreachable.prime(texts), ProviderError);
}
