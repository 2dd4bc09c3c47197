#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cqforge/distractors.hpp"
#include "cqforge/graph.hpp"
#include "cqforge/query.hpp"
#include "cqforge/rng.hpp"
#include "cqforge/verbalize.hpp"

namespace cqforge {

inline constexpr std::string_view kNoneOption =
    "None of the answers are correct";
inline constexpr int kSchemaVersion = 1;

// Everything a reader needs to rebuild and re-check one record against the
// source graph: the grounded edges the sampler walked, the query structure
// by node text, and the per-item randomness. Texts are pre-substitution.
struct ProvenanceBlock {
  std::vector<std::array<std::string, 3>> triples;  // head, relation, tail
  std::string kind;
  std::vector<std::string> anchors;
  std::vector<std::string> relations;
  std::string gold;
  uint64_t seed = 0;
  std::string name_x = "PersonX";
  std::string name_y = "PersonY";
  std::string name_z = "PersonZ";
  bool heuristic_negation = false;

  bool operator==(const ProvenanceBlock&) const = default;
};

// Content hash over (provenance triples, kind, seed); 16 hex digits. Stable
// across runs, so re-emitted duplicates share an id.
std::string record_id(const ProvenanceBlock& p);

struct MCQARecord {
  std::string id;
  std::string kind;
  std::string context;
  std::string question;
  // A-D are the shuffled gold plus three distractors; E is the fixed
  // sentinel. The machine-built gold is never E.
  std::array<std::string, 5> options;
  int label = 0;  // index of the gold option, always 0..3 here
  ProvenanceBlock provenance;

  bool operator==(const MCQARecord&) const = default;
};

struct GenerativeRecord {
  std::string id;
  std::string kind;
  std::string mode;  // "compact" or "verbalized"
  std::string input;
  std::vector<std::string> references;
  ProvenanceBlock provenance;

  bool operator==(const GenerativeRecord&) const = default;
};

// One sampled query carried through distractor sampling, verbalization, and
// naming, ready for emission. Context/question/option texts already carry
// the person names; answer_texts and the provenance block stay symbolic.
struct VerbalizedItem {
  QueryInstance query;
  AnswerSet answers;
  std::string context;
  std::string question;
  std::string gold_text;                       // pre-substitution
  std::vector<std::string> distractor_texts;   // post-substitution, ordered
  ProvenanceBlock provenance;
};

// Places the gold uniformly among A-D from the item's rng stream, fills the
// rest with the first three distractors, and appends the sentinel. Throws
// DistractorShortage below three distractors and Error when any two options
// collide.
MCQARecord emit_mcqa(const VerbalizedItem& item, DetRng& rng);

// `anchors... relations... [GEN]` with texts and relation names verbatim,
// space-joined. Only 1p/2p/2i/3i have a compact grammar.
GenerativeRecord emit_generative_compact(const KnowledgeGraph& g,
                                         const VerbalizedItem& item);

// `context question [GEN]` with names substituted; references are the
// name-substituted answer texts. Available for every kind.
GenerativeRecord emit_generative_verbalized(const KnowledgeGraph& g,
                                            const VerbalizedItem& item);

bool compact_grammar_supported(QueryKind kind);

// -- serialization -------------------------------------------------------

std::string mcqa_to_json_line(const MCQARecord& r);
MCQARecord mcqa_from_json_line(std::string_view line);
std::string generative_to_json_line(const GenerativeRecord& r);
GenerativeRecord generative_from_json_line(std::string_view line);

void write_mcqa_jsonl(const std::string& path,
                      std::span<const MCQARecord> records);
std::vector<MCQARecord> read_mcqa_jsonl(const std::string& path);
void write_generative_jsonl(const std::string& path,
                            std::span<const GenerativeRecord> records);
std::vector<GenerativeRecord> read_generative_jsonl(const std::string& path);

}  // namespace cqforge
