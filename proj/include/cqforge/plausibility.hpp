#pragma once

#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>

#include "cqforge/graph.hpp"

namespace cqforge {

// Declarative rendering of one triple, the unit a scorer consumes. One fixed
// template per relation; distinct relations never render identically.
std::string triple_to_statement(std::string_view head, Relation rel,
                                std::string_view tail);

// Scores one triple's commonsense plausibility in [0,1]. Deterministic for a
// fixed input within a run.
class PlausibilityProvider {
 public:
  virtual ~PlausibilityProvider() = default;
  virtual double score(const std::string& head, Relation rel,
                       const std::string& tail) = 0;
};

class ConstantPlausibility : public PlausibilityProvider {
 public:
  explicit ConstantPlausibility(double value);
  double score(const std::string&, Relation, const std::string&) override {
    return value_;
  }

 private:
  double value_;
};

// Precomputed score table, one `head<TAB>relation<TAB>tail<TAB>score` row per
// line. Lookups miss to `default_score` so partial tables stay usable.
class FileScoreTable : public PlausibilityProvider {
 public:
  explicit FileScoreTable(const std::string& path, double default_score = 1.0);
  double score(const std::string& head, Relation rel,
               const std::string& tail) override;

 private:
  std::unordered_map<std::string, double> table_;
  double default_score_;
};

// Reads the plausibility column already attached to a graph's triples.
class GraphScores : public PlausibilityProvider {
 public:
  explicit GraphScores(const KnowledgeGraph& g) : g_(g) {}
  double score(const std::string& head, Relation rel,
               const std::string& tail) override;

 private:
  const KnowledgeGraph& g_;
};

// Remote scorer: POST {"statements": [...]} and expect {"scores": [...]} of
// equal length, each in [0,1]. Responses are cached per statement.
class HttpPlausibility : public PlausibilityProvider {
 public:
  explicit HttpPlausibility(std::string url);
  double score(const std::string& head, Relation rel,
               const std::string& tail) override;

 private:
  std::string url_;
  std::unordered_map<std::string, double> cache_;
};

struct FilterReport {
  size_t triples_before = 0;
  size_t triples_removed = 0;
  size_t nodes_removed = 0;
  double removed_fraction = 0.0;
};

// Drops triples scoring below `threshold`, attaches the scores to surviving
// triples, and prunes nodes left without any edge.
std::pair<KnowledgeGraph, FilterReport> filter_by_plausibility(
    const KnowledgeGraph& g, PlausibilityProvider& provider,
    double threshold = 0.5);

}  // namespace cqforge
