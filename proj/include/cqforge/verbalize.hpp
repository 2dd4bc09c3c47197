#pragma once

#include <array>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cqforge/graph.hpp"
#include "cqforge/query.hpp"
#include "cqforge/rng.hpp"

namespace cqforge {

// Question fragment for one relation, spliced verbatim into the per-kind
// question skeletons ("the intention of PersonX before", ...).
std::string_view relation_fragment(Relation r);

// Where a relation's anchor sits on the timeline relative to the answer:
// the anchor precedes it, follows from it, or merely describes it.
enum class ChronologyClass : uint8_t { kEffectSide, kAttribute, kCauseSide };

std::string_view chronology_class_name(ChronologyClass c);
std::optional<ChronologyClass> parse_chronology_class(std::string_view name);

using ChronologyTable = std::array<ChronologyClass, kRelationCount>;

// Fixed assignment: cause side = {xIntent, xNeed, isAfter, HinderedBy},
// attribute = {xAttr}, everything else effect side.
const ChronologyTable& builtin_chronology();

// `relation<TAB>class` rows; must cover the vocabulary exactly once. The
// file form exists so the ordering policy can be edited without a rebuild.
ChronologyTable load_chronology(const std::string& path);

// Shallow event negation: auxiliaries flip in place ("is" -> "isn't"),
// anything else gets "doesn't" plus a de-conjugated verb ("goes" -> "go").
// Grammar is best-effort; items rendered through it carry a flag.
std::string negate_event(const std::string& event);

// Joins a query's anchors into one context sentence. Intersections with at
// least one effect-side and one cause-side branch are reordered (effect,
// attribute, cause) and rendered "After V1, V2" / "After V1, V2 and V3";
// everything else joins with " and ". 1p/2p contexts are the anchor alone.
// A HinderedBy branch of a 2i-neg renders negated.
std::string verbalize_context_rule(
    const KnowledgeGraph& g, const QueryInstance& q,
    const ChronologyTable& chrono = builtin_chronology());

// Fills the kind's question skeleton with relation fragments and anchor
// texts. Person slots stay symbolic; name substitution happens per item.
std::string verbalize_question(const KnowledgeGraph& g, const QueryInstance& q);

struct Verbalization {
  std::string context;
  std::string question;
  // set when the context went through negate_event
  bool heuristic_negation = false;
};

Verbalization verbalize_rule(const KnowledgeGraph& g, const QueryInstance& q,
                             const ChronologyTable& chrono = builtin_chronology());

// -- person names ------------------------------------------------------

struct NameAssignment {
  std::string x = "PersonX";
  std::string y = "PersonY";
  std::string z = "PersonZ";
};

// `name<TAB>frequency` rows. Draws are uniform; the frequency column is
// informational only.
class NameRegistry {
 public:
  static NameRegistry load(const std::string& path);

  size_t size() const { return names_.size(); }
  const std::string& name_at(size_t i) const { return names_[i]; }
  bool contains(std::string_view name) const;

  // Three distinct names for PersonX/Y/Z. One assignment is applied across
  // every string of one item.
  NameAssignment assign(DetRng& rng) const;

 private:
  std::vector<std::string> names_;
  std::vector<double> frequencies_;
};

// Replaces the PersonX/PersonY/PersonZ tokens, boundary-aware, so
// "PersonX's" gains the possessive ("Ezra's") and "PersonXish" is left alone.
std::string substitute_names(std::string_view text, const NameAssignment& names);

// -- model-written contexts --------------------------------------------

struct LlmExemplar {
  std::string anchor1;
  std::string anchor2;
  std::string reply;
};

// The fixed instruction pair plus the shared exemplar list, loaded from a
// data directory (llm_system_intersection.txt, llm_system_negation.txt,
// llm_exemplars.tsv).
struct LlmPromptSet {
  std::string system_intersection;  // 2i / ip / pi
  std::string system_negation;      // 2i-neg
  std::vector<LlmExemplar> exemplars;

  static LlmPromptSet load(const std::string& dir);
};

struct LlmRequest {
  std::string system;
  std::vector<LlmExemplar> exemplars;
  std::array<std::string, 2> anchors;
  QueryKind kind{};
};

class LlmClient {
 public:
  virtual ~LlmClient() = default;
  // Raw model text. Throws ProviderError on transport failure.
  virtual std::string generate(const LlmRequest& req) = 0;
};

// POSTs {"system", "exemplars", "anchors", "kind"}, expects {"text": ...}.
class HttpLlmClient : public LlmClient {
 public:
  // url like "http://host:port/verbalize"
  explicit HttpLlmClient(std::string url);
  std::string generate(const LlmRequest& req) override;

 private:
  std::string url_;
};

// Canned responses returned in order; every request is recorded for
// inspection. Offline stand-in for a live endpoint; safe to share across
// request threads.
class ReplayLlmClient : public LlmClient {
 public:
  explicit ReplayLlmClient(std::vector<std::string> responses);
  std::string generate(const LlmRequest& req) override;
  const std::vector<LlmRequest>& requests() const { return requests_; }

 private:
  std::mutex mu_;
  std::vector<std::string> responses_;
  size_t next_ = 0;
  std::vector<LlmRequest> requests_;
};

enum class LlmOutcome : uint8_t { kAccepted, kNa, kInvalid };

std::string_view llm_outcome_name(LlmOutcome o);

struct LlmContext {
  LlmOutcome outcome = LlmOutcome::kInvalid;
  std::string text;  // marker-free narrative; empty unless accepted
  std::string raw;   // response exactly as returned
};

// Sends the kind's instruction, the exemplars, and the name-substituted
// anchor pair. "NA" replies and replies whose <E1>/<E2> spans disagree with
// the anchors (second anchor negated for 2i-neg) are rejected, not errors.
// Only the two-anchor kinds (2i, 2i-neg, ip, pi) are supported.
LlmContext verbalize_context_llm(const KnowledgeGraph& g, const QueryInstance& q,
                                 const NameAssignment& names, LlmClient& client,
                                 const LlmPromptSet& prompts);

}  // namespace cqforge
