#pragma once

#include <array>
#include <map>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "cqforge/graph.hpp"
#include "cqforge/rng.hpp"

namespace cqforge {

// The seven conjunctive query shapes. Every shape has one answer variable;
// 2p/ip/pi route through one existential intermediate.
enum class QueryKind : uint8_t { OneP, TwoP, TwoI, TwoINeg, ThreeI, IP, PI };

inline constexpr size_t kQueryKindCount = 7;

inline constexpr std::array<QueryKind, kQueryKindCount> kAllQueryKinds = {
    QueryKind::OneP, QueryKind::TwoP, QueryKind::TwoI,  QueryKind::TwoINeg,
    QueryKind::ThreeI, QueryKind::IP, QueryKind::PI,
};

std::string_view query_kind_name(QueryKind k);
std::optional<QueryKind> parse_query_kind(std::string_view name);

size_t query_anchor_count(QueryKind k);
size_t query_relation_count(QueryKind k);
size_t query_existential_count(QueryKind k);

// A grounded query. Relation storage order walks each branch anchor-side
// first:
//   1p  [r0]          r0(a0, V?)
//   2p  [r0, r1]      r0(a0, V1), r1(V1, V?)
//   2i  [r0, r1]      r0(a0, V?), r1(a1, V?)
//   3i  [r0, r1, r2]  one edge per anchor into V?
//   ip  [r0, r1, r2]  r0(a0, V1), r1(a1, V1), r2(V1, V?)
//   pi  [r0, r1, r2]  r0(a0, V1), r1(V1, V?), r2(a1, V?)
// 2i-neg is a 2i whose second branch relation is HinderedBy.
// witnesses hold the sampled existential bindings, for provenance only; the
// answer set quantifies over all of them.
struct QueryInstance {
  QueryKind kind{};
  std::vector<NodeId> anchors;
  std::vector<Relation> relations;
  NodeId seed_answer = 0;
  std::vector<NodeId> witnesses;
};

// Sorted unique node ids.
using AnswerSet = std::vector<NodeId>;

struct SampledQuery {
  QueryInstance query;
  AnswerSet answers;
};

// Walks the shape backward from a uniformly chosen answer entity, sampling
// each predecessor uniformly from the top-`cutoff` candidates ranked by
// plausibility (ties by id). Returns nothing when any step dead-ends; the
// caller retries with the same rng stream.
std::optional<QueryInstance> sample_query(const KnowledgeGraph& g, QueryKind kind,
                                          DetRng& rng, size_t cutoff = 10);

// Post-order set evaluation: projection = union of successors over the input
// set, intersection = set intersection. A HinderedBy branch is evaluated as
// an ordinary edge.
AnswerSet answer_query(const KnowledgeGraph& g, const QueryInstance& q);

// Definitional enumeration over every assignment of the answer variable and
// existentials; test oracle only. Guarded at |nodes|^(1+existentials) <= 1e8.
AnswerSet brute_force_answers(const KnowledgeGraph& g, const QueryInstance& q);

struct BatchOptions {
  size_t cutoff = 10;
  size_t retries = 20;  // sampling attempts per requested instance
  size_t workers = 1;
};

// Samples mix[kind] instances per kind, each from an independently derived
// seed, attaches answer sets, and drops duplicate (kind, anchors, relations)
// groundings keeping the first. Output is identical for any worker count.
std::vector<SampledQuery> batch_sample(const KnowledgeGraph& g,
                                       const std::map<QueryKind, size_t>& mix,
                                       uint64_t seed,
                                       const BatchOptions& opts = {});

struct KindStats {
  size_t count = 0;
  double mean_answers = 0.0;
  double median_answers = 0.0;
};

std::map<QueryKind, KindStats> answer_stats(std::span<const SampledQuery> items);

// The grounded edges the sampler walked, anchors outward, existentials bound
// to the recorded witnesses. Every edge is checked against the graph.
std::vector<StoredTriple> provenance_triples(const KnowledgeGraph& g,
                                             const QueryInstance& q);

}  // namespace cqforge
