#pragma once

#include <limits>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cqforge/graph.hpp"
#include "cqforge/similarity.hpp"

namespace cqforge {

inline constexpr NodeId kNoNode = std::numeric_limits<NodeId>::max();

// Rewrites a bare tail phrase into a full sentence by mechanical rule; no
// verb conjugation is attempted. `subject` defaults to the person implied by
// the relation; event-to-event relations return the tail untouched, as do
// tails that already start with a PersonX/PersonY token.
std::string normalize_tail(std::string_view tail, Relation rel,
                           std::string_view subject = {});

// Applies normalize_tail to every triple's tail and rebuilds the graph.
// Tails that normalize to the same text collapse into one node.
KnowledgeGraph normalize_graph(const KnowledgeGraph& g);

enum class MissingEmbeddingPolicy { kError, kSkip };

struct MergeOptions {
  double tau = 0.95;
  MissingEmbeddingPolicy missing = MissingEmbeddingPolicy::kError;
  // Exact pairwise comparison up to this many nodes; larger graphs switch to
  // shared-content-token candidate blocking.
  size_t exact_pairwise_limit = 50000;
  bool force_blocking = false;
};

struct MergeMap {
  // old node id -> old node id of its canonical representative; idempotent.
  std::vector<NodeId> representative;
  // old node id -> id in the merged graph, or kNoNode if every edge of the
  // merged node became a dropped self-loop.
  std::vector<NodeId> new_id;
  size_t merged_count = 0;      // nodes absorbed into another representative
  double merged_fraction = 0.0; // merged_count / original node count
  double mean_degree_before = 0.0;
  double mean_degree_after = 0.0;
};

// Union-find over all node pairs with similarity >= tau. The representative
// of each cluster is its highest-degree member (ties to the smallest id);
// edges are re-pointed, merge-created self-loops dropped, and duplicate
// edges collapsed keeping the highest plausibility.
std::pair<KnowledgeGraph, MergeMap> merge_nodes(const KnowledgeGraph& g,
                                                SimilarityProvider& sim,
                                                const MergeOptions& opts = {});

}  // namespace cqforge
