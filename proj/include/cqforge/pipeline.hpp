#pragma once

#include <array>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "cqforge/emit.hpp"
#include "cqforge/graph.hpp"
#include "cqforge/normalize.hpp"
#include "cqforge/plausibility.hpp"
#include "cqforge/query.hpp"
#include "cqforge/similarity.hpp"
#include "cqforge/verbalize.hpp"

namespace cqforge {

// Every run-shaping knob, addressable by a dotted key ("merge.tau"). One key
// resolves from four layers, strongest last: built-in default, config file,
// CQFORGE_* environment variable, command-line flag.
struct RunConfig {
  std::string input;
  std::string output_dir = "out";
  uint64_t seed = 2024;
  size_t workers = 1;

  bool normalize_enabled = true;

  bool merge_enabled = true;
  double merge_tau = 0.95;
  // token-jaccard | exact | file:<path> | http:<url>
  std::string merge_similarity = "token-jaccard";
  // error | skip
  std::string merge_missing = "error";

  bool plausibility_enabled = true;
  double plausibility_threshold = 0.5;
  // attached | constant:<v> | file:<path> | http:<url>
  std::string plausibility_provider = "attached";

  // instances requested per kind, indexed by kind ordinal
  std::array<size_t, kQueryKindCount> mix{};
  size_t sample_cutoff = 10;
  size_t sample_retries = 20;

  size_t distractors_random = 2;
  size_t distractors_adversarial = 2;
  std::string stopwords;  // builtin list when empty

  // rule | llm | llm-with-rule-fallback
  std::string verbalize_mode = "rule";
  std::string verbalize_endpoint;
  size_t verbalize_max_inflight = 4;
  std::string names;       // name registry tsv, required once items exist
  std::string chronology;  // optional override table
  std::string prompts_dir; // required by the llm modes

  bool curation_enabled = true;
  size_t curation_k = 20;

  bool emit_mcqa_enabled = true;
  bool emit_compact_enabled = true;
  bool emit_verbalized_enabled = false;
  bool emit_items_enabled = false;  // pre-curation item dump
};

// All dotted keys, in declaration order.
std::vector<std::string> run_config_keys();

// Sets one knob from its string form; throws Error on unknown keys and
// ParseError on bad values.
void apply_key_value(RunConfig& c, std::string_view key, std::string_view value);

// Reads a nested JSON document whose paths mirror the dotted keys
// ({"merge": {"tau": 0.9}}). Unknown paths are errors.
void apply_config_file(RunConfig& c, const std::string& path);

// CQFORGE_MERGE_TAU and friends.
std::string run_config_env_name(std::string_view key);
void apply_env_overrides(RunConfig& c);

// Nested JSON of the fully resolved config, with native value types.
std::string resolved_config_json(const RunConfig& c);

std::unique_ptr<SimilarityProvider> make_similarity_provider(const RunConfig& c);
std::unique_ptr<PlausibilityProvider> make_plausibility_provider(
    const RunConfig& c, const KnowledgeGraph& g);

struct RunReport {
  GraphStats input_stats;
  GraphStats final_stats;

  bool merged = false;
  MergeMap merge;

  bool filtered = false;
  FilterReport filter;

  size_t requested = 0;
  size_t sampled = 0;
  std::map<std::string, KindStats> answer_stats;

  size_t dropped_na = 0;
  size_t dropped_invalid = 0;
  size_t verbalized = 0;

  size_t curation_groups = 0;
  size_t selected = 0;

  size_t mcqa_records = 0;
  size_t compact_records = 0;
  size_t verbalized_records = 0;

  // "success" when every requested instance made it into the outputs,
  // "partial" when sampling or narrative screening dropped some
  std::string status = "success";
  std::vector<std::string> outputs;  // file paths written
  std::string config_json;           // resolved config snapshot

  std::string json() const;  // the report exactly as written to disk
};

// The graph stages alone: load, then normalize, merge, and plausibility
// filter per their enabled flags. `report`, when given, receives the stage
// stats.
KnowledgeGraph prepare_graph(const RunConfig& c, RunReport* report = nullptr);

// Executes load -> normalize -> merge -> filter -> sample -> distractors ->
// verbalize -> names -> curation -> emit per the config, writing datasets,
// the processed graph, and report.json under output_dir. Dataset bytes
// depend only on (inputs, config minus workers). `llm` overrides the
// endpoint-constructed client in the llm modes.
RunReport run_pipeline(const RunConfig& c, LlmClient* llm = nullptr);

struct VerifyReport {
  size_t mcqa_checked = 0;
  size_t generative_checked = 0;
  std::vector<std::string> failures;
  bool ok() const { return failures.empty(); }
};

// Re-derives every record from its provenance against the graph: edges must
// exist, the gold answer must be entailed, options must be screened, ids and
// serialized inputs must match.
VerifyReport verify_dataset(const KnowledgeGraph& g,
                            std::span<const MCQARecord> mcqa,
                            std::span<const GenerativeRecord> generative);

// One JSON line per sampled query (texts, not ids), for inspection.
void write_queries_jsonl(const std::string& path, const KnowledgeGraph& g,
                         std::span<const SampledQuery> items);

}  // namespace cqforge
