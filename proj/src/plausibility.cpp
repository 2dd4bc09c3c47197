#include "cqforge/plausibility.hpp"

#include <array>
#include <fstream>

#include "httplib.h"
#include "json.hpp"

#include "cqforge/error.hpp"
#include "cqforge/text.hpp"

namespace cqforge {

namespace {

// gloss inserted between "then" and the tail, indexed by relation ordinal
constexpr std::array<std::string_view, kRelationCount> kStatementGloss = {
    "PersonX intended",           // xIntent
    "PersonX needed",             // xNeed
    "PersonX wants",              // xWant
    "the effect on PersonX is",   // xEffect
    "PersonX feels",              // xReact
    "PersonX is seen as",         // xAttr
    "the effect on PersonY is",   // oEffect
    "PersonY feels",              // oReact
    "PersonY wants",              // oWant
    "it is hindered by",          // HinderedBy
    "it happens after",           // isAfter
    "it happens before",          // isBefore
};

std::string table_key(std::string_view head, Relation rel, std::string_view tail) {
  std::string key(head);
  key.push_back('\t');
  key.append(relation_name(rel));
  key.push_back('\t');
  key.append(tail);
  return key;
}

}  // namespace

std::string triple_to_statement(std::string_view head, Relation rel,
                                std::string_view tail) {
  std::string out = "If ";
  out.append(head);
  out.append(", then ");
  out.append(kStatementGloss[static_cast<size_t>(rel)]);
  out.push_back(' ');
  out.append(tail);
  return out;
}

ConstantPlausibility::ConstantPlausibility(double value) : value_(value) {
  if (value < 0.0 || value > 1.0) {
    throw Error("constant plausibility must be in [0,1], got " + format_double(value));
  }
}

FileScoreTable::FileScoreTable(const std::string& path, double default_score)
    : default_score_(default_score) {
  std::ifstream in(path);
  if (!in) throw ProviderError("cannot open score file: " + path);
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty() || line[0] == '#') continue;
    // head <TAB> relation <TAB> tail <TAB> score
    size_t t1 = line.find('\t');
    size_t t2 = t1 == std::string::npos ? t1 : line.find('\t', t1 + 1);
    size_t t3 = t2 == std::string::npos ? t2 : line.find('\t', t2 + 1);
    if (t3 == std::string::npos || line.find('\t', t3 + 1) != std::string::npos) {
      throw ProviderError("score file line " + std::to_string(lineno) +
                          ": expected 4 tab-separated fields");
    }
    auto rel = parse_relation(trim(line.substr(t1 + 1, t2 - t1 - 1)));
    if (!rel) {
      throw ProviderError("score file line " + std::to_string(lineno) +
                          ": unknown relation");
    }
    double score;
    if (!parse_double(std::string_view(line).substr(t3 + 1), score) || score < 0.0 ||
        score > 1.0) {
      throw ProviderError("score file line " + std::to_string(lineno) +
                          ": malformed score");
    }
    std::string head(trim(line.substr(0, t1)));
    std::string tail(trim(line.substr(t2 + 1, t3 - t2 - 1)));
    table_[table_key(head, *rel, tail)] = score;
  }
}

double FileScoreTable::score(const std::string& head, Relation rel,
                             const std::string& tail) {
  auto it = table_.find(table_key(head, rel, tail));
  return it == table_.end() ? default_score_ : it->second;
}

double GraphScores::score(const std::string& head, Relation rel,
                          const std::string& tail) {
  auto h = g_.find_node(head);
  auto t = g_.find_node(tail);
  if (h && t) {
    if (auto p = g_.edge_plausibility(*h, rel, *t)) return *p;
  }
  throw ProviderError("no attached score for triple: " + table_key(head, rel, tail));
}

HttpPlausibility::HttpPlausibility(std::string url) : url_(std::move(url)) {}

double HttpPlausibility::score(const std::string& head, Relation rel,
                               const std::string& tail) {
  std::string statement = triple_to_statement(head, rel, tail);
  if (auto it = cache_.find(statement); it != cache_.end()) return it->second;

  auto scheme_end = url_.find("://");
  if (scheme_end == std::string::npos) {
    throw ProviderError("scoring endpoint url must include scheme: " + url_);
  }
  auto path_start = url_.find('/', scheme_end + 3);
  std::string host = path_start == std::string::npos ? url_ : url_.substr(0, path_start);
  std::string path = path_start == std::string::npos ? "/" : url_.substr(path_start);

  nlohmann::json req;
  req["statements"] = {statement};
  httplib::Client client(host);
  client.set_read_timeout(30, 0);
  auto res = client.Post(path, req.dump(), "application/json");
  if (!res) throw ProviderError("scoring endpoint unreachable: " + url_);
  if (res->status != 200) {
    throw ProviderError("scoring endpoint returned status " + std::to_string(res->status));
  }
  nlohmann::json body = nlohmann::json::parse(res->body, nullptr, false);
  if (body.is_discarded() || !body.contains("scores") || !body["scores"].is_array() ||
      body["scores"].size() != 1 || !body["scores"][0].is_number()) {
    throw ProviderError("scoring endpoint returned malformed body");
  }
  double s = body["scores"][0].get<double>();
  if (s < 0.0 || s > 1.0) {
    throw ProviderError("scoring endpoint returned out-of-range score " +
                        format_double(s));
  }
  cache_[statement] = s;
  return s;
}

std::pair<KnowledgeGraph, FilterReport> filter_by_plausibility(
    const KnowledgeGraph& g, PlausibilityProvider& provider, double threshold) {
  if (threshold < 0.0 || threshold > 1.0) {
    throw Error("plausibility threshold must be in [0,1], got " +
                format_double(threshold));
  }
  FilterReport report;
  report.triples_before = g.triple_count();
  std::vector<RawTriple> kept;
  kept.reserve(g.triple_count());
  for (const StoredTriple& t : g.triples()) {
    const std::string& head = g.node_text(t.head);
    const std::string& tail = g.node_text(t.tail);
    double s;
    try {
      s = provider.score(head, t.rel, tail);
    } catch (const ProviderError& e) {
      throw ProviderError(std::string(e.what()) + " (while scoring " +
                          table_key(head, t.rel, tail) + ")");
    }
    if (s < threshold) {
      ++report.triples_removed;
      continue;
    }
    kept.push_back({head, t.rel, tail, s});
  }
  KnowledgeGraph out = KnowledgeGraph::from_records(kept);
  report.nodes_removed = g.node_count() - out.node_count();
  report.removed_fraction =
      report.triples_before
          ? static_cast<double>(report.triples_removed) /
                static_cast<double>(report.triples_before)
          : 0.0;
  return {std::move(out), report};
}

}  // namespace cqforge
