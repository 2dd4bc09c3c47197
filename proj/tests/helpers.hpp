#pragma once

#include <algorithm>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "cqforge/graph.hpp"
#include "cqforge/rng.hpp"

namespace cqforge::testing {

// Random triple soup over synthetic node texts. Duplicates are allowed so
// dedup paths get exercised; plausibility is drawn from {0.1, 0.2, ..., 1.0}.
inline std::vector<RawTriple> random_records(DetRng& rng, size_t max_nodes,
                                             size_t n_records) {
  size_t n_nodes = 2 + rng.uniform_below(max_nodes > 2 ? max_nodes - 1 : 1);
  std::vector<RawTriple> out;
  out.reserve(n_records);
  for (size_t i = 0; i < n_records; ++i) {
    RawTriple t;
    t.head = "event " + std::to_string(rng.uniform_below(n_nodes));
    t.tail = "event " + std::to_string(rng.uniform_below(n_nodes));
    t.rel = kAllRelations[rng.uniform_below(kRelationCount)];
    t.plausibility = 0.1 * static_cast<double>(1 + rng.uniform_below(10));
    out.push_back(std::move(t));
  }
  return out;
}

inline KnowledgeGraph random_graph(DetRng& rng, size_t max_nodes, size_t n_records) {
  return KnowledgeGraph::from_records(random_records(rng, max_nodes, n_records));
}

// Same soup, but every node text is made of tokens unique to that node, so
// keyword-overlap filters never collide on shared words.
inline std::vector<RawTriple> random_records_distinct_texts(DetRng& rng,
                                                            size_t max_nodes,
                                                            size_t n_records) {
  size_t n_nodes = 4 + rng.uniform_below(max_nodes > 4 ? max_nodes - 3 : 1);
  auto text = [](size_t i) {
    return "ev" + std::to_string(i) + "a ev" + std::to_string(i) + "b";
  };
  std::vector<RawTriple> out;
  out.reserve(n_records);
  for (size_t i = 0; i < n_records; ++i) {
    RawTriple t;
    t.head = text(rng.uniform_below(n_nodes));
    t.tail = text(rng.uniform_below(n_nodes));
    t.rel = kAllRelations[rng.uniform_below(kRelationCount)];
    t.plausibility = 0.1 * static_cast<double>(1 + rng.uniform_below(10));
    out.push_back(std::move(t));
  }
  return out;
}

// Linear scan over the triple table; the reference for index readbacks.
inline std::vector<NodeId> scan_successors(const KnowledgeGraph& g, NodeId h,
                                           Relation r) {
  std::vector<NodeId> out;
  for (const StoredTriple& t : g.triples()) {
    if (t.head == h && t.rel == r) out.push_back(t.tail);
  }
  std::sort(out.begin(), out.end());
  return out;
}

inline std::vector<std::tuple<NodeId, Relation>> scan_predecessors(
    const KnowledgeGraph& g, NodeId tail) {
  std::vector<std::tuple<NodeId, Relation>> out;
  for (const StoredTriple& t : g.triples()) {
    if (t.tail == tail) out.emplace_back(t.head, t.rel);
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace cqforge::testing
