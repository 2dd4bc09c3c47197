#pragma once

#include <cstdint>
#include <set>
#include <span>
#include <string>
#include <vector>

namespace cqforge {

// Candidate view for the diversity pass: an ordinal id (ties break toward
// the smaller one), the gold answer's node text as the grouping key, and the
// verbalized context the 1-grams come from.
struct DiversityItem {
  uint64_t id = 0;
  std::string answer_key;
  std::string context;
};

// Lowercased alphanumeric tokens of a context, as a set.
std::set<std::string> context_grams(std::string_view context);

struct SelectionStep {
  uint64_t item_id = 0;
  size_t gain = 0;              // unique 1-grams this pick added
  size_t vocabulary_after = 0;  // group vocabulary size once added
};

// Greedy record for one answer group, in selection order.
struct GroupTrace {
  std::string answer_key;
  std::vector<SelectionStep> steps;
};

struct DiversityResult {
  // selected ids in input order
  std::vector<uint64_t> selected;
  // one trace per group, groups in first-appearance order
  std::vector<GroupTrace> traces;
};

struct DiversityOptions {
  size_t k = 20;
  size_t workers = 1;
};

// Per answer group, repeatedly picks the candidate whose context adds the
// most unseen 1-grams to the group vocabulary (ties by ascending id) until
// k picks or no candidates remain. Zero-gain candidates stay eligible; they
// only lose to positive gain, so duplicates can fill leftover slots.
DiversityResult diversity_filter(std::span<const DiversityItem> items,
                                 const DiversityOptions& opts = {});

}  // namespace cqforge
