#include "cqforge/curation.hpp"

#include <algorithm>
#include <map>
#include <unordered_set>

#include "cqforge/error.hpp"
#include "cqforge/parallel.hpp"
#include "cqforge/text.hpp"

namespace cqforge {

std::set<std::string> context_grams(std::string_view context) {
  auto tokens = tokenize(context);
  return {tokens.begin(), tokens.end()};
}

DiversityResult diversity_filter(std::span<const DiversityItem> items,
                                 const DiversityOptions& opts) {
  if (opts.k == 0) throw Error("diversity cap must be at least 1");

  std::unordered_set<uint64_t> ids;
  for (const auto& item : items) {
    if (!ids.insert(item.id).second) {
      throw Error("duplicate diversity item id " + std::to_string(item.id));
    }
  }

  // groups in first-appearance order
  std::vector<std::vector<size_t>> groups;
  std::map<std::string, size_t> group_of;
  for (size_t i = 0; i < items.size(); ++i) {
    auto [it, fresh] = group_of.try_emplace(items[i].answer_key, groups.size());
    if (fresh) groups.emplace_back();
    groups[it->second].push_back(i);
  }

  std::vector<std::set<std::string>> grams(items.size());
  for (size_t i = 0; i < items.size(); ++i) {
    grams[i] = context_grams(items[i].context);
  }

  DiversityResult result;
  result.traces.resize(groups.size());
  parallel_for(groups.size(), opts.workers, [&](size_t gi) {
    auto& trace = result.traces[gi];
    std::vector<size_t> remaining = groups[gi];
    trace.answer_key = items[remaining.front()].answer_key;

    std::set<std::string> vocab;
    while (trace.steps.size() < opts.k && !remaining.empty()) {
      size_t best_pos = 0;
      size_t best_gain = 0;
      bool have_best = false;
      for (size_t pos = 0; pos < remaining.size(); ++pos) {
        const auto& g = grams[remaining[pos]];
        size_t gain = 0;
        for (const auto& t : g) gain += vocab.count(t) == 0;
        uint64_t id = items[remaining[pos]].id;
        if (!have_best || gain > best_gain ||
            (gain == best_gain && id < items[remaining[best_pos]].id)) {
          best_pos = pos;
          best_gain = gain;
          have_best = true;
        }
      }
      size_t chosen = remaining[best_pos];
      vocab.insert(grams[chosen].begin(), grams[chosen].end());
      trace.steps.push_back({items[chosen].id, best_gain, vocab.size()});
      remaining.erase(remaining.begin() + best_pos);
    }
  });

  std::unordered_set<uint64_t> kept;
  for (const auto& trace : result.traces) {
    for (const auto& step : trace.steps) kept.insert(step.item_id);
  }
  for (const auto& item : items) {
    if (kept.count(item.id)) result.selected.push_back(item.id);
  }
  return result;
}

}  // namespace cqforge
