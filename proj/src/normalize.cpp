#include "cqforge/normalize.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <unordered_map>

#include "cqforge/error.hpp"
#include "cqforge/stopwords.hpp"
#include "cqforge/text.hpp"

namespace cqforge {

std::string normalize_tail(std::string_view tail, Relation rel,
                           std::string_view subject) {
  std::string text(trim(tail));
  if (!relation_is_social(rel)) return text;
  if (starts_with_token(text, "PersonX") || starts_with_token(text, "PersonY")) {
    return text;
  }
  if (subject.empty()) subject = relation_subject(rel);

  switch (rel) {
    case Relation::xWant:
    case Relation::oWant:
    case Relation::xIntent:
    case Relation::xNeed: {
      // one leading "to " is an infinitive marker, not content
      if (text.size() > 3 && text.compare(0, 3, "to ") == 0) {
        text.erase(0, 3);
      }
      return std::string(subject) + " " + text;
    }
    case Relation::xEffect:
    case Relation::oEffect:
      return std::string(subject) + " " + text;
    case Relation::xReact:
    case Relation::oReact:
    case Relation::xAttr:
      return std::string(subject) + " is " + text;
    default:
      return text;
  }
}

KnowledgeGraph normalize_graph(const KnowledgeGraph& g) {
  std::vector<RawTriple> records;
  records.reserve(g.triple_count());
  for (const StoredTriple& t : g.triples()) {
    records.push_back({g.node_text(t.head), t.rel,
                       normalize_tail(g.node_text(t.tail), t.rel),
                       t.plausibility});
  }
  return KnowledgeGraph::from_records(records);
}

namespace {

class UnionFind {
 public:
  explicit UnionFind(size_t n) : parent_(n) {
    for (size_t i = 0; i < n; ++i) parent_[i] = static_cast<NodeId>(i);
  }
  NodeId find(NodeId x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }
  void unite(NodeId a, NodeId b) {
    a = find(a);
    b = find(b);
    if (a != b) parent_[std::max(a, b)] = std::min(a, b);
  }

 private:
  std::vector<NodeId> parent_;
};

}  // namespace

std::pair<KnowledgeGraph, MergeMap> merge_nodes(const KnowledgeGraph& g,
                                                SimilarityProvider& sim,
                                                const MergeOptions& opts) {
  if (opts.tau <= 0.0 || opts.tau > 1.0) {
    throw Error("merge tau must be in (0,1], got " + format_double(opts.tau));
  }
  const size_t n = g.node_count();

  std::vector<std::string> texts;
  texts.reserve(n);
  for (NodeId i = 0; i < n; ++i) texts.push_back(g.node_text(i));
  sim.prime(texts);

  std::vector<bool> usable(n, true);
  for (NodeId i = 0; i < n; ++i) {
    if (sim.covers(texts[i])) continue;
    if (opts.missing == MissingEmbeddingPolicy::kError) {
      throw ProviderError("no embedding for node text: '" + texts[i] + "'");
    }
    usable[i] = false;
  }

  UnionFind uf(n);
  bool use_blocking = opts.force_blocking || n > opts.exact_pairwise_limit;
  if (!use_blocking) {
    for (NodeId i = 0; i < n; ++i) {
      if (!usable[i]) continue;
      for (NodeId j = i + 1; j < n; ++j) {
        if (!usable[j]) continue;
        if (sim.similarity(texts[i], texts[j]) >= opts.tau) uf.unite(i, j);
      }
    }
  } else {
    // candidate generation: nodes sharing any content token
    std::unordered_map<std::string, std::vector<NodeId>> buckets;
    for (NodeId i = 0; i < n; ++i) {
      if (!usable[i]) continue;
      for (const auto& tok : content_tokens(texts[i], builtin_stopwords())) {
        buckets[tok].push_back(i);
      }
    }
    std::set<std::pair<NodeId, NodeId>> tested;
    for (const auto& [tok, members] : buckets) {
      for (size_t a = 0; a < members.size(); ++a) {
        for (size_t b = a + 1; b < members.size(); ++b) {
          auto key = std::minmax(members[a], members[b]);
          if (!tested.insert(key).second) continue;
          if (sim.similarity(texts[key.first], texts[key.second]) >= opts.tau) {
            uf.unite(key.first, key.second);
          }
        }
      }
    }
  }

  // canonical member per cluster: highest degree, ties to smallest id
  std::unordered_map<NodeId, NodeId> canonical;
  for (NodeId i = 0; i < n; ++i) {
    NodeId root = uf.find(i);
    auto it = canonical.find(root);
    if (it == canonical.end()) {
      canonical[root] = i;
    } else {
      NodeId best = it->second;
      if (g.degree(i) > g.degree(best) ||
          (g.degree(i) == g.degree(best) && i < best)) {
        it->second = i;
      }
    }
  }

  MergeMap mm;
  mm.representative.resize(n);
  for (NodeId i = 0; i < n; ++i) {
    mm.representative[i] = canonical[uf.find(i)];
    if (mm.representative[i] != i) ++mm.merged_count;
  }
  mm.merged_fraction = n ? static_cast<double>(mm.merged_count) / static_cast<double>(n) : 0.0;
  mm.mean_degree_before = g.stats().mean_degree_undirected;

  // re-point edges; duplicates keep the max plausibility seen
  std::map<std::tuple<NodeId, Relation, NodeId>, double> best_score;
  for (const StoredTriple& t : g.triples()) {
    NodeId h = mm.representative[t.head];
    NodeId tl = mm.representative[t.tail];
    if (h == tl) continue;
    auto key = std::make_tuple(h, t.rel, tl);
    auto [it, fresh] = best_score.emplace(key, t.plausibility);
    if (!fresh) it->second = std::max(it->second, t.plausibility);
  }
  std::vector<RawTriple> records;
  records.reserve(best_score.size());
  std::set<std::tuple<NodeId, Relation, NodeId>> emitted;
  for (const StoredTriple& t : g.triples()) {
    NodeId h = mm.representative[t.head];
    NodeId tl = mm.representative[t.tail];
    if (h == tl) continue;
    auto key = std::make_tuple(h, t.rel, tl);
    if (!emitted.insert(key).second) continue;
    records.push_back({g.node_text(h), t.rel, g.node_text(tl), best_score.at(key)});
  }

  KnowledgeGraph merged = KnowledgeGraph::from_records(records);
  mm.mean_degree_after = merged.stats().mean_degree_undirected;
  mm.new_id.assign(n, kNoNode);
  for (NodeId i = 0; i < n; ++i) {
    auto id = merged.find_node(g.node_text(mm.representative[i]));
    if (id) mm.new_id[i] = *id;
  }
  return {std::move(merged), std::move(mm)};
}

}  // namespace cqforge
