#include "cqforge/query.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

#include "cqforge/error.hpp"
#include "cqforge/parallel.hpp"

namespace cqforge {

namespace {

constexpr std::array<std::string_view, kQueryKindCount> kKindNames = {
    "1p", "2p", "2i", "2i-neg", "3i", "ip", "pi",
};

struct Pick {
  Relation rel{};
  NodeId node = 0;
};

// Uniform draw from the top-`cutoff` predecessors that pass `keep`. The
// cutoff window is fixed before filtering, so exclusions narrow the window
// rather than reaching deeper into the ranking.
template <typename Keep>
std::optional<Pick> pick_predecessor(const KnowledgeGraph& g, NodeId node,
                                     size_t cutoff, DetRng& rng, Keep keep) {
  auto preds = g.predecessors(node);
  size_t window = std::min(cutoff, preds.size());
  std::vector<Pick> candidates;
  candidates.reserve(window);
  for (size_t i = 0; i < window; ++i) {
    if (keep(preds[i])) candidates.push_back({preds[i].rel, preds[i].head});
  }
  if (candidates.empty()) return std::nullopt;
  return candidates[rng.uniform_below(candidates.size())];
}

bool same_pick(const Pick& p, Relation rel, NodeId node) {
  return p.rel == rel && p.node == node;
}

// sorted unique union of successors over a sorted unique source set
AnswerSet project(const KnowledgeGraph& g, const AnswerSet& sources, Relation rel) {
  AnswerSet out;
  for (NodeId v : sources) {
    for (const OutEdge& e : g.successors(v, rel)) out.push_back(e.tail);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

AnswerSet intersect(const AnswerSet& a, const AnswerSet& b) {
  AnswerSet out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(),
                        std::back_inserter(out));
  return out;
}

void check_shape(const QueryInstance& q) {
  if (q.anchors.size() != query_anchor_count(q.kind) ||
      q.relations.size() != query_relation_count(q.kind)) {
    throw Error("query instance shape mismatch for kind " +
                std::string(query_kind_name(q.kind)));
  }
  if (q.kind == QueryKind::TwoINeg) {
    size_t hb = 0;
    for (Relation r : q.relations) hb += r == Relation::HinderedBy;
    if (hb != 1) throw Error("2i-neg requires exactly one HinderedBy relation");
  }
}

}  // namespace

std::string_view query_kind_name(QueryKind k) {
  return kKindNames[static_cast<size_t>(k)];
}

std::optional<QueryKind> parse_query_kind(std::string_view name) {
  for (size_t i = 0; i < kQueryKindCount; ++i) {
    if (kKindNames[i] == name) return static_cast<QueryKind>(i);
  }
  return std::nullopt;
}

size_t query_anchor_count(QueryKind k) {
  switch (k) {
    case QueryKind::OneP:
    case QueryKind::TwoP:
      return 1;
    case QueryKind::TwoI:
    case QueryKind::TwoINeg:
    case QueryKind::IP:
    case QueryKind::PI:
      return 2;
    case QueryKind::ThreeI:
      return 3;
  }
  return 0;
}

size_t query_relation_count(QueryKind k) {
  switch (k) {
    case QueryKind::OneP:
      return 1;
    case QueryKind::TwoP:
    case QueryKind::TwoI:
    case QueryKind::TwoINeg:
      return 2;
    case QueryKind::ThreeI:
    case QueryKind::IP:
    case QueryKind::PI:
      return 3;
  }
  return 0;
}

size_t query_existential_count(QueryKind k) {
  switch (k) {
    case QueryKind::TwoP:
    case QueryKind::IP:
    case QueryKind::PI:
      return 1;
    default:
      return 0;
  }
}

std::optional<QueryInstance> sample_query(const KnowledgeGraph& g, QueryKind kind,
                                          DetRng& rng, size_t cutoff) {
  if (cutoff < 1) throw Error("sampling cutoff must be at least 1");
  const auto& pool = g.answerable_nodes();
  if (pool.empty()) return std::nullopt;
  NodeId seed = pool[rng.uniform_below(pool.size())];

  auto any = [](const InEdge&) { return true; };

  QueryInstance q;
  q.kind = kind;
  q.seed_answer = seed;

  switch (kind) {
    case QueryKind::OneP: {
      auto p = pick_predecessor(g, seed, cutoff, rng, any);
      if (!p) return std::nullopt;
      q.anchors = {p->node};
      q.relations = {p->rel};
      break;
    }
    case QueryKind::TwoP: {
      auto mid = pick_predecessor(g, seed, cutoff, rng, any);
      if (!mid) return std::nullopt;
      NodeId v1 = mid->node;
      auto anchor = pick_predecessor(g, v1, cutoff, rng, [&](const InEdge& e) {
        return e.head != v1 && e.head != seed;
      });
      if (!anchor) return std::nullopt;
      q.anchors = {anchor->node};
      q.relations = {anchor->rel, mid->rel};
      q.witnesses = {v1};
      break;
    }
    case QueryKind::TwoI: {
      // a 2i containing HinderedBy is a 2i-neg by definition, so plain 2i
      // never samples that relation
      auto no_hb = [](const InEdge& e) { return e.rel != Relation::HinderedBy; };
      auto b0 = pick_predecessor(g, seed, cutoff, rng, no_hb);
      if (!b0) return std::nullopt;
      auto b1 = pick_predecessor(g, seed, cutoff, rng, [&](const InEdge& e) {
        return e.rel != Relation::HinderedBy && !same_pick(*b0, e.rel, e.head);
      });
      if (!b1) return std::nullopt;
      std::array<Pick, 2> branches = {*b0, *b1};
      std::sort(branches.begin(), branches.end(), [](const Pick& a, const Pick& b) {
        if (a.rel != b.rel) return a.rel < b.rel;
        return a.node < b.node;
      });
      q.anchors = {branches[0].node, branches[1].node};
      q.relations = {branches[0].rel, branches[1].rel};
      break;
    }
    case QueryKind::TwoINeg: {
      auto plain = pick_predecessor(g, seed, cutoff, rng, [](const InEdge& e) {
        return e.rel != Relation::HinderedBy;
      });
      if (!plain) return std::nullopt;
      auto hb = pick_predecessor(g, seed, cutoff, rng, [](const InEdge& e) {
        return e.rel == Relation::HinderedBy;
      });
      if (!hb) return std::nullopt;
      q.anchors = {plain->node, hb->node};
      q.relations = {plain->rel, Relation::HinderedBy};
      break;
    }
    case QueryKind::ThreeI: {
      std::vector<Pick> picked;
      for (int branch = 0; branch < 3; ++branch) {
        auto p = pick_predecessor(g, seed, cutoff, rng, [&](const InEdge& e) {
          for (const Pick& prior : picked) {
            if (same_pick(prior, e.rel, e.head)) return false;
          }
          return true;
        });
        if (!p) return std::nullopt;
        picked.push_back(*p);
      }
      std::sort(picked.begin(), picked.end(), [](const Pick& a, const Pick& b) {
        if (a.rel != b.rel) return a.rel < b.rel;
        return a.node < b.node;
      });
      for (const Pick& p : picked) {
        q.anchors.push_back(p.node);
        q.relations.push_back(p.rel);
      }
      break;
    }
    case QueryKind::IP: {
      auto hop = pick_predecessor(g, seed, cutoff, rng, any);
      if (!hop) return std::nullopt;
      NodeId v1 = hop->node;
      auto b0 = pick_predecessor(g, v1, cutoff, rng, any);
      if (!b0) return std::nullopt;
      auto b1 = pick_predecessor(g, v1, cutoff, rng, [&](const InEdge& e) {
        return !same_pick(*b0, e.rel, e.head);
      });
      if (!b1) return std::nullopt;
      std::array<Pick, 2> branches = {*b0, *b1};
      std::sort(branches.begin(), branches.end(), [](const Pick& a, const Pick& b) {
        if (a.rel != b.rel) return a.rel < b.rel;
        return a.node < b.node;
      });
      q.anchors = {branches[0].node, branches[1].node};
      q.relations = {branches[0].rel, branches[1].rel, hop->rel};
      q.witnesses = {v1};
      break;
    }
    case QueryKind::PI: {
      auto hop = pick_predecessor(g, seed, cutoff, rng, any);
      if (!hop) return std::nullopt;
      NodeId v1 = hop->node;
      auto chain = pick_predecessor(g, v1, cutoff, rng, [&](const InEdge& e) {
        return e.head != v1 && e.head != seed;
      });
      if (!chain) return std::nullopt;
      auto direct = pick_predecessor(g, seed, cutoff, rng, [&](const InEdge& e) {
        return !same_pick(*hop, e.rel, e.head);
      });
      if (!direct) return std::nullopt;
      q.anchors = {chain->node, direct->node};
      q.relations = {chain->rel, hop->rel, direct->rel};
      q.witnesses = {v1};
      break;
    }
  }
  return q;
}

AnswerSet answer_query(const KnowledgeGraph& g, const QueryInstance& q) {
  check_shape(q);
  const auto& a = q.anchors;
  const auto& r = q.relations;
  switch (q.kind) {
    case QueryKind::OneP:
      return project(g, AnswerSet{a[0]}, r[0]);
    case QueryKind::TwoP: {
      AnswerSet mid = project(g, AnswerSet{a[0]}, r[0]);
      return project(g, mid, r[1]);
    }
    case QueryKind::TwoI:
    case QueryKind::TwoINeg:
      return intersect(project(g, AnswerSet{a[0]}, r[0]), project(g, AnswerSet{a[1]}, r[1]));
    case QueryKind::ThreeI:
      return intersect(intersect(project(g, AnswerSet{a[0]}, r[0]),
                                 project(g, AnswerSet{a[1]}, r[1])),
                       project(g, AnswerSet{a[2]}, r[2]));
    case QueryKind::IP: {
      AnswerSet mid =
          intersect(project(g, AnswerSet{a[0]}, r[0]), project(g, AnswerSet{a[1]}, r[1]));
      return project(g, mid, r[2]);
    }
    case QueryKind::PI: {
      AnswerSet chain = project(g, project(g, AnswerSet{a[0]}, r[0]), r[1]);
      return intersect(chain, project(g, AnswerSet{a[1]}, r[2]));
    }
  }
  return {};
}

AnswerSet brute_force_answers(const KnowledgeGraph& g, const QueryInstance& q) {
  check_shape(q);
  const size_t n = g.node_count();
  double states = std::pow(static_cast<double>(n),
                           1.0 + static_cast<double>(query_existential_count(q.kind)));
  if (states > 1e8) {
    throw Error("brute force enumeration guard exceeded: " +
                std::to_string(static_cast<uint64_t>(states)) + " assignments");
  }
  const auto& a = q.anchors;
  const auto& r = q.relations;
  AnswerSet out;
  for (NodeId v = 0; v < n; ++v) {
    bool holds = false;
    switch (q.kind) {
      case QueryKind::OneP:
        holds = g.has_edge(a[0], r[0], v);
        break;
      case QueryKind::TwoP:
        for (NodeId v1 = 0; v1 < n && !holds; ++v1) {
          holds = g.has_edge(a[0], r[0], v1) && g.has_edge(v1, r[1], v);
        }
        break;
      case QueryKind::TwoI:
      case QueryKind::TwoINeg:
        holds = g.has_edge(a[0], r[0], v) && g.has_edge(a[1], r[1], v);
        break;
      case QueryKind::ThreeI:
        holds = g.has_edge(a[0], r[0], v) && g.has_edge(a[1], r[1], v) &&
                g.has_edge(a[2], r[2], v);
        break;
      case QueryKind::IP:
        for (NodeId v1 = 0; v1 < n && !holds; ++v1) {
          holds = g.has_edge(a[0], r[0], v1) && g.has_edge(a[1], r[1], v1) &&
                  g.has_edge(v1, r[2], v);
        }
        break;
      case QueryKind::PI:
        for (NodeId v1 = 0; v1 < n && !holds; ++v1) {
          holds = g.has_edge(a[0], r[0], v1) && g.has_edge(v1, r[1], v) &&
                  g.has_edge(a[1], r[2], v);
        }
        break;
    }
    if (holds) out.push_back(v);
  }
  return out;
}

std::vector<SampledQuery> batch_sample(const KnowledgeGraph& g,
                                       const std::map<QueryKind, size_t>& mix,
                                       uint64_t seed, const BatchOptions& opts) {
  struct Request {
    QueryKind kind;
    uint64_t index;
  };
  std::vector<Request> requests;
  for (QueryKind kind : kAllQueryKinds) {
    auto it = mix.find(kind);
    if (it == mix.end()) continue;
    for (size_t i = 0; i < it->second; ++i) requests.push_back({kind, i});
  }

  std::vector<std::optional<SampledQuery>> slots(requests.size());
  parallel_for(requests.size(), opts.workers, [&](size_t i) {
    const Request& req = requests[i];
    std::string tag = "sample/" + std::string(query_kind_name(req.kind));
    DetRng rng(derive_seed(seed, tag, req.index));
    for (size_t attempt = 0; attempt < opts.retries; ++attempt) {
      auto q = sample_query(g, req.kind, rng, opts.cutoff);
      if (!q) continue;
      AnswerSet answers = answer_query(g, *q);
      if (!std::binary_search(answers.begin(), answers.end(), q->seed_answer)) {
        throw Error("sampled query does not contain its own seed answer");
      }
      slots[i] = SampledQuery{std::move(*q), std::move(answers)};
      return;
    }
  });

  std::vector<SampledQuery> out;
  std::set<std::tuple<QueryKind, std::vector<NodeId>, std::vector<Relation>>> seen;
  for (auto& slot : slots) {
    if (!slot) continue;
    auto key = std::make_tuple(slot->query.kind, slot->query.anchors,
                               slot->query.relations);
    if (!seen.insert(std::move(key)).second) continue;
    out.push_back(std::move(*slot));
  }
  return out;
}

std::map<QueryKind, KindStats> answer_stats(std::span<const SampledQuery> items) {
  std::map<QueryKind, std::vector<size_t>> sizes;
  for (const SampledQuery& s : items) {
    sizes[s.query.kind].push_back(s.answers.size());
  }
  std::map<QueryKind, KindStats> out;
  for (auto& [kind, v] : sizes) {
    std::sort(v.begin(), v.end());
    KindStats ks;
    ks.count = v.size();
    size_t total = 0;
    for (size_t s : v) total += s;
    ks.mean_answers = static_cast<double>(total) / static_cast<double>(v.size());
    if (v.size() % 2 == 1) {
      ks.median_answers = static_cast<double>(v[v.size() / 2]);
    } else {
      ks.median_answers =
          (static_cast<double>(v[v.size() / 2 - 1]) +
           static_cast<double>(v[v.size() / 2])) /
          2.0;
    }
    out[kind] = ks;
  }
  return out;
}

std::vector<StoredTriple> provenance_triples(const KnowledgeGraph& g,
                                             const QueryInstance& q) {
  check_shape(q);
  auto edge = [&](NodeId h, Relation r, NodeId t) -> StoredTriple {
    auto p = g.edge_plausibility(h, r, t);
    if (!p) {
      throw Error("provenance edge missing from graph: " + g.node_text(h) + " -" +
                  std::string(relation_name(r)) + "-> " + g.node_text(t));
    }
    return {h, r, t, *p};
  };
  const auto& a = q.anchors;
  const auto& r = q.relations;
  switch (q.kind) {
    case QueryKind::OneP:
      return {edge(a[0], r[0], q.seed_answer)};
    case QueryKind::TwoP:
      return {edge(a[0], r[0], q.witnesses.at(0)),
              edge(q.witnesses.at(0), r[1], q.seed_answer)};
    case QueryKind::TwoI:
    case QueryKind::TwoINeg:
      return {edge(a[0], r[0], q.seed_answer), edge(a[1], r[1], q.seed_answer)};
    case QueryKind::ThreeI:
      return {edge(a[0], r[0], q.seed_answer), edge(a[1], r[1], q.seed_answer),
              edge(a[2], r[2], q.seed_answer)};
    case QueryKind::IP:
      return {edge(a[0], r[0], q.witnesses.at(0)),
              edge(a[1], r[1], q.witnesses.at(0)),
              edge(q.witnesses.at(0), r[2], q.seed_answer)};
    case QueryKind::PI:
      return {edge(a[0], r[0], q.witnesses.at(0)),
              edge(q.witnesses.at(0), r[1], q.seed_answer),
              edge(a[1], r[2], q.seed_answer)};
  }
  return {};
}

}  // namespace cqforge
