#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "cqforge/relation.hpp"

namespace cqforge {

using NodeId = uint32_t;

// One input record before interning. Plausibility defaults to 1.0 so the
// pipeline runs without any scorer attached.
struct RawTriple {
  std::string head;
  Relation rel{};
  std::string tail;
  double plausibility = 1.0;
};

struct OutEdge {
  Relation rel{};
  NodeId tail = 0;
  double plausibility = 1.0;
};

// Reverse-index entry. The containing list is ordered by descending
// plausibility, then head id, then relation ordinal, which is exactly the
// order the query sampler consumes.
struct InEdge {
  NodeId head = 0;
  Relation rel{};
  double plausibility = 1.0;
};

struct StoredTriple {
  NodeId head = 0;
  Relation rel{};
  NodeId tail = 0;
  double plausibility = 1.0;
};

struct GraphStats {
  size_t node_count = 0;
  size_t triple_count = 0;
  // 2|E|/|V| (each triple touches two endpoints).
  double mean_degree_undirected = 0.0;
  // |E|/|V|; equals both the mean out-degree and the mean in-degree.
  double mean_degree_directed = 0.0;
  // histogram[d] = number of nodes with undirected degree d.
  std::vector<size_t> degree_histogram;
  std::array<size_t, kRelationCount> triples_per_relation{};
};

// Immutable indexed triple store. Construction interns node texts in first
// appearance order, deduplicates (head, rel, tail) keeping the first record,
// and builds forward and reverse adjacency. All reads are const and safe to
// share across threads.
class KnowledgeGraph {
 public:
  KnowledgeGraph() = default;

  static KnowledgeGraph from_records(const std::vector<RawTriple>& records);
  static KnowledgeGraph load(const std::string& path);
  void save(const std::string& path) const;

  size_t node_count() const { return texts_.size(); }
  size_t triple_count() const { return triples_.size(); }

  const std::string& node_text(NodeId id) const;
  std::optional<NodeId> find_node(std::string_view text) const;

  // All outgoing edges, ordered by (relation ordinal, tail id).
  std::span<const OutEdge> out_edges(NodeId id) const;
  // The contiguous slice of out_edges for one relation; tails ascend.
  std::span<const OutEdge> successors(NodeId id, Relation rel) const;
  // All incoming edges, ordered by (plausibility desc, head id, relation).
  std::span<const InEdge> predecessors(NodeId id) const;

  bool has_edge(NodeId head, Relation rel, NodeId tail) const;
  std::optional<double> edge_plausibility(NodeId head, Relation rel,
                                          NodeId tail) const;

  // Every triple, ordered by (head, relation ordinal, tail).
  std::span<const StoredTriple> triples() const { return triples_; }

  // Node ids with at least one incoming edge, ascending. This is the pool
  // answer sampling draws from.
  const std::vector<NodeId>& answerable_nodes() const {
    return answerable_;
  }

  GraphStats stats() const;

  size_t in_degree(NodeId id) const;
  size_t out_degree(NodeId id) const;
  // in + out, the undirected convention.
  size_t degree(NodeId id) const { return in_degree(id) + out_degree(id); }

 private:
  void check_node(NodeId id) const;
  void build_indices();

  std::vector<std::string> texts_;
  std::unordered_map<std::string, NodeId> text_to_id_;
  std::vector<StoredTriple> triples_;

  std::vector<OutEdge> out_edges_;
  std::vector<size_t> out_offsets_;
  std::vector<InEdge> in_edges_;
  std::vector<size_t> in_offsets_;
  std::vector<NodeId> answerable_;
};

// Parses one `head<TAB>relation<TAB>tail[<TAB>score]` line. Returns nothing
// for blank and `#` comment lines. Throws ParseError naming `lineno`.
std::optional<RawTriple> parse_triple_line(std::string_view line, size_t lineno);

}  // namespace cqforge
