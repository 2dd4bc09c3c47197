#include "cqforge/distractors.hpp"

#include <algorithm>

#include "cqforge/error.hpp"
#include "cqforge/stopwords.hpp"

namespace cqforge {

std::string_view distractor_source_name(DistractorSource s) {
  switch (s) {
    case DistractorSource::kAdversarial:
      return "adversarial";
    case DistractorSource::kRandom:
      return "random";
    case DistractorSource::kBackfill:
      return "backfill";
  }
  return "";
}

bool keyword_overlap_reject(std::string_view candidate, std::string_view gold,
                            const std::set<std::string>& stopwords) {
  if (candidate == gold) return true;
  auto ct = content_tokens(candidate, stopwords);
  auto gt = content_tokens(gold, stopwords);
  for (const auto& t : ct) {
    if (gt.count(t)) return true;
  }
  return false;
}

DistractorSet sample_distractors(const KnowledgeGraph& g, const QueryInstance& q,
                                 const AnswerSet& answers, DetRng& rng,
                                 const std::set<std::string>& stopwords,
                                 const DistractorOptions& opts) {
  const size_t needed = opts.random_count + opts.adversarial_count;
  if (g.node_count() < answers.size() + needed) {
    throw DistractorShortage("graph has fewer than " + std::to_string(needed) +
                             " nodes outside the answer set");
  }

  auto in_answers = [&](NodeId v) {
    return std::binary_search(answers.begin(), answers.end(), v);
  };
  const std::string& gold = g.node_text(q.seed_answer);
  std::set<std::string> answer_texts;
  for (NodeId v : answers) answer_texts.insert(g.node_text(v));
  // the seed is screened even when the caller passes a partial answer set
  answer_texts.insert(gold);

  DistractorSet out;
  std::set<NodeId> chosen;

  // adversarial pool: every successor of every anchor, any relation, in
  // (anchor index, relation ordinal, tail id) order, first occurrence kept
  std::vector<Distractor> pool;
  std::set<NodeId> pooled;
  for (size_t ai = 0; ai < q.anchors.size(); ++ai) {
    for (const OutEdge& e : g.out_edges(q.anchors[ai])) {
      if (e.tail == q.seed_answer) continue;
      if (answer_texts.count(g.node_text(e.tail))) continue;
      if (in_answers(e.tail)) continue;
      if (!pooled.insert(e.tail).second) continue;
      pool.push_back({e.tail, DistractorSource::kAdversarial, ai, e.rel});
    }
  }
  size_t take = std::min(opts.adversarial_count, pool.size());
  if (take > 0) {
    for (size_t idx : rng.sample_indices(pool.size(), take)) {
      out.items.push_back(pool[idx]);
      chosen.insert(pool[idx].node);
    }
  }
  out.adversarial_count = take;
  size_t backfill = opts.adversarial_count - take;

  // randoms: uniform over live nodes behind the keyword filter; backfill
  // slots are drawn the same way but flagged
  size_t random_needed = opts.random_count + backfill;
  size_t attempt_budget = 500 * (random_needed + 1);
  std::vector<NodeId> randoms;
  while (randoms.size() < random_needed && attempt_budget-- > 0) {
    NodeId v = static_cast<NodeId>(rng.uniform_below(g.node_count()));
    if (chosen.count(v) || v == q.seed_answer) continue;
    const std::string& text = g.node_text(v);
    if (answer_texts.count(text)) continue;
    if (in_answers(v)) continue;
    if (keyword_overlap_reject(text, gold, stopwords)) continue;
    chosen.insert(v);
    randoms.push_back(v);
  }
  if (randoms.size() < random_needed) {
    throw DistractorShortage(
        "could not draw " + std::to_string(random_needed) +
        " random negatives (keyword filter and answer set too restrictive)");
  }
  for (size_t i = 0; i < randoms.size(); ++i) {
    bool is_backfill = i >= opts.random_count;
    out.items.push_back({randoms[i],
                         is_backfill ? DistractorSource::kBackfill
                                     : DistractorSource::kRandom});
    if (is_backfill) {
      ++out.backfill_count;
    } else {
      ++out.random_count;
    }
  }
  return out;
}

}  // namespace cqforge
