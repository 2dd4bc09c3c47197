#pragma once

#include <set>
#include <string>
#include <vector>

#include "cqforge/graph.hpp"
#include "cqforge/query.hpp"
#include "cqforge/rng.hpp"

namespace cqforge {

enum class DistractorSource : uint8_t {
  kAdversarial,  // non-answer successor of an anchor
  kRandom,       // uniform over live nodes, keyword-filtered
  kBackfill,     // random pick standing in for a missing adversarial slot
};

std::string_view distractor_source_name(DistractorSource s);

struct Distractor {
  NodeId node = 0;
  DistractorSource source{};
  // adversarial picks record the edge that supplied them
  size_t anchor_index = 0;
  Relation via_rel{};
};

// Items are ordered adversarial picks first, then randoms, then backfills.
struct DistractorSet {
  std::vector<Distractor> items;
  size_t adversarial_count = 0;
  size_t random_count = 0;
  size_t backfill_count = 0;
};

struct DistractorOptions {
  size_t random_count = 2;
  size_t adversarial_count = 2;
};

// True iff the candidate must be rejected as a possible unlabeled answer:
// exact match with the gold text, or any shared content token after
// lowercasing and dropping punctuation, person placeholders, and stopwords.
bool keyword_overlap_reject(std::string_view candidate, std::string_view gold,
                            const std::set<std::string>& stopwords);

// Draws adversarial negatives from the anchors' successors and random
// negatives from the whole graph. The keyword filter guards random picks
// against near-miss answers; adversarial picks are near misses by intent and
// are only screened against the answer set. Throws DistractorShortage when
// the full count cannot be assembled.
DistractorSet sample_distractors(const KnowledgeGraph& g, const QueryInstance& q,
                                 const AnswerSet& answers, DetRng& rng,
                                 const std::set<std::string>& stopwords,
                                 const DistractorOptions& opts = {});

}  // namespace cqforge
