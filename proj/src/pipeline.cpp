#include "cqforge/pipeline.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <type_traits>

#include "json.hpp"

#include "cqforge/curation.hpp"
#include "cqforge/distractors.hpp"
#include "cqforge/error.hpp"
#include "cqforge/parallel.hpp"
#include "cqforge/rng.hpp"
#include "cqforge/stopwords.hpp"
#include "cqforge/text.hpp"

namespace cqforge {

namespace {

// Single source of truth for the knob surface: every other config entry
// point (keys list, setter, file loader, env loader, resolved dump) walks
// this visitor, so a new field added here is automatically reachable from
// all four layers.
template <typename V>
void visit_knobs(RunConfig& c, V&& v) {
  v("input", c.input);
  v("output-dir", c.output_dir);
  v("seed", c.seed);
  v("workers", c.workers);
  v("normalize.enabled", c.normalize_enabled);
  v("merge.enabled", c.merge_enabled);
  v("merge.tau", c.merge_tau);
  v("merge.similarity", c.merge_similarity);
  v("merge.missing", c.merge_missing);
  v("plausibility.enabled", c.plausibility_enabled);
  v("plausibility.threshold", c.plausibility_threshold);
  v("plausibility.provider", c.plausibility_provider);
  for (size_t i = 0; i < kQueryKindCount; ++i) {
    v("mix." + std::string(query_kind_name(kAllQueryKinds[i])), c.mix[i]);
  }
  v("sample.cutoff", c.sample_cutoff);
  v("sample.retries", c.sample_retries);
  v("distractors.random", c.distractors_random);
  v("distractors.adversarial", c.distractors_adversarial);
  v("stopwords", c.stopwords);
  v("verbalize.mode", c.verbalize_mode);
  v("verbalize.endpoint", c.verbalize_endpoint);
  v("verbalize.max-inflight", c.verbalize_max_inflight);
  v("names", c.names);
  v("chronology", c.chronology);
  v("prompts-dir", c.prompts_dir);
  v("curation.enabled", c.curation_enabled);
  v("curation.k", c.curation_k);
  v("emit.mcqa", c.emit_mcqa_enabled);
  v("emit.compact", c.emit_compact_enabled);
  v("emit.verbalized", c.emit_verbalized_enabled);
  v("emit.items", c.emit_items_enabled);
}

bool parse_bool_knob(const std::string& key, std::string_view value) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  throw ParseError("key '" + key + "': expected true/false/1/0, got '" +
                   std::string(value) + "'");
}

uint64_t parse_unsigned_knob(const std::string& key, std::string_view value) {
  uint64_t out = 0;
  const char* first = value.data();
  const char* last = value.data() + value.size();
  auto [p, ec] = std::from_chars(first, last, out);
  if (value.empty() || ec != std::errc() || p != last) {
    throw ParseError("key '" + key +
                     "': expected a non-negative integer, got '" +
                     std::string(value) + "'");
  }
  return out;
}

template <typename T>
void set_knob(const std::string& key, T& ref, std::string_view value) {
  if constexpr (std::is_same_v<T, std::string>) {
    ref = std::string(value);
  } else if constexpr (std::is_same_v<T, bool>) {
    ref = parse_bool_knob(key, value);
  } else if constexpr (std::is_same_v<T, double>) {
    double d = 0;
    if (!parse_double(value, d)) {
      throw ParseError("key '" + key + "': expected a number, got '" +
                       std::string(value) + "'");
    }
    ref = d;
  } else {
    static_assert(std::is_unsigned_v<T>);
    ref = static_cast<T>(parse_unsigned_knob(key, value));
  }
}

void flatten_json(const nlohmann::json& j, const std::string& prefix,
                  std::vector<std::pair<std::string, nlohmann::json>>& out) {
  if (j.is_object()) {
    for (auto it = j.begin(); it != j.end(); ++it) {
      std::string key = prefix.empty() ? it.key() : prefix + "." + it.key();
      flatten_json(it.value(), key, out);
    }
  } else {
    out.emplace_back(prefix, j);
  }
}

}  // namespace

std::vector<std::string> run_config_keys() {
  RunConfig c;
  std::vector<std::string> keys;
  visit_knobs(c, [&](const std::string& key, auto&) { keys.push_back(key); });
  return keys;
}

void apply_key_value(RunConfig& c, std::string_view key,
                     std::string_view value) {
  bool found = false;
  visit_knobs(c, [&](const std::string& k, auto& ref) {
    if (found || k != key) return;
    found = true;
    set_knob(k, ref, value);
  });
  if (!found) {
    throw Error("unknown config key '" + std::string(key) + "'");
  }
}

void apply_config_file(RunConfig& c, const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read config file " + path);
  nlohmann::json j = nlohmann::json::parse(in, nullptr, false);
  if (j.is_discarded() || !j.is_object()) {
    throw ParseError("config file " + path + " is not a JSON object");
  }
  std::vector<std::pair<std::string, nlohmann::json>> leaves;
  flatten_json(j, "", leaves);
  for (const auto& [key, value] : leaves) {
    if (!value.is_primitive() || value.is_null()) {
      throw ParseError("config file " + path + ": key '" + key +
                       "' must be a scalar");
    }
    std::string text =
        value.is_string() ? value.get<std::string>() : value.dump();
    try {
      apply_key_value(c, key, text);
    } catch (const ParseError& e) {
      throw ParseError("config file " + path + ": " + e.what());
    } catch (const Error& e) {
      throw Error("config file " + path + ": " + e.what());
    }
  }
}

std::string run_config_env_name(std::string_view key) {
  std::string name = "CQFORGE_";
  for (char ch : key) {
    if (ch == '.' || ch == '-') {
      name += '_';
    } else {
      name += static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
    }
  }
  return name;
}

void apply_env_overrides(RunConfig& c) {
  for (const std::string& key : run_config_keys()) {
    const char* value = std::getenv(run_config_env_name(key).c_str());
    if (value != nullptr) {
      apply_key_value(c, key, value);
    }
  }
}

std::string resolved_config_json(const RunConfig& c) {
  RunConfig copy = c;
  nlohmann::json root = nlohmann::json::object();
  visit_knobs(copy, [&](const std::string& key, auto& ref) {
    nlohmann::json* node = &root;
    size_t pos = 0;
    for (size_t dot = key.find('.'); dot != std::string::npos;
         dot = key.find('.', pos)) {
      node = &(*node)[key.substr(pos, dot - pos)];
      pos = dot + 1;
    }
    (*node)[key.substr(pos)] = ref;
  });
  return root.dump(2);
}

std::unique_ptr<SimilarityProvider> make_similarity_provider(
    const RunConfig& c) {
  const std::string& s = c.merge_similarity;
  if (s == "token-jaccard") return std::make_unique<TokenJaccardSimilarity>();
  if (s == "exact") return std::make_unique<ExactMatchSimilarity>();
  if (s.rfind("file:", 0) == 0) {
    return std::make_unique<FileEmbeddingSimilarity>(s.substr(5));
  }
  if (s.rfind("http://", 0) == 0 || s.rfind("https://", 0) == 0) {
    return std::make_unique<HttpEmbeddingSimilarity>(s);
  }
  throw Error("unknown merge.similarity '" + s + "'");
}

std::unique_ptr<PlausibilityProvider> make_plausibility_provider(
    const RunConfig& c, const KnowledgeGraph& g) {
  const std::string& s = c.plausibility_provider;
  if (s == "attached") return std::make_unique<GraphScores>(g);
  if (s.rfind("constant:", 0) == 0) {
    double v = 0;
    if (!parse_double(s.substr(9), v) || v < 0.0 || v > 1.0) {
      throw Error("plausibility.provider constant must be in [0,1], got '" +
                  s + "'");
    }
    return std::make_unique<ConstantPlausibility>(v);
  }
  if (s.rfind("file:", 0) == 0) {
    return std::make_unique<FileScoreTable>(s.substr(5));
  }
  if (s.rfind("http://", 0) == 0 || s.rfind("https://", 0) == 0) {
    return std::make_unique<HttpPlausibility>(s);
  }
  throw Error("unknown plausibility.provider '" + s + "'");
}

namespace {

// Prefixes stage names onto failures without erasing the error type, so a
// caller can still distinguish a distractor shortage from a bad file.
template <typename F>
auto run_stage(const std::string& name, F&& f) {
  try {
    return f();
  } catch (const DistractorShortage& e) {
    throw DistractorShortage(name + ": " + e.what());
  } catch (const ProviderError& e) {
    throw ProviderError(name + ": " + e.what());
  } catch (const ParseError& e) {
    throw ParseError(name + ": " + e.what());
  } catch (const Error& e) {
    throw Error(name + ": " + e.what());
  }
}

NameAssignment names_from(const ProvenanceBlock& p) {
  NameAssignment names;
  names.x = p.name_x;
  names.y = p.name_y;
  names.z = p.name_z;
  return names;
}

nlohmann::json provenance_json(const ProvenanceBlock& p) {
  nlohmann::json j;
  j["triples"] = p.triples;
  j["kind"] = p.kind;
  j["anchors"] = p.anchors;
  j["relations"] = p.relations;
  j["gold"] = p.gold;
  j["seed"] = p.seed;
  j["names"] = {{"x", p.name_x}, {"y", p.name_y}, {"z", p.name_z}};
  j["heuristic_negation"] = p.heuristic_negation;
  return j;
}

nlohmann::json stats_json(const GraphStats& s) {
  nlohmann::json per_relation = nlohmann::json::object();
  for (size_t i = 0; i < kRelationCount; ++i) {
    per_relation[std::string(relation_name(kAllRelations[i]))] =
        s.triples_per_relation[i];
  }
  return {
      {"nodes", s.node_count},
      {"triples", s.triple_count},
      {"mean_degree_undirected", s.mean_degree_undirected},
      {"mean_degree_directed", s.mean_degree_directed},
      {"triples_per_relation", per_relation},
  };
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  out << content;
  if (!out) throw Error("short write to " + path);
}

}  // namespace

std::string RunReport::json() const {
  nlohmann::json j;
  j["config"] = config_json.empty() ? nlohmann::json::object()
                                    : nlohmann::json::parse(config_json);
  j["graph"] = {{"input", stats_json(input_stats)},
                {"final", stats_json(final_stats)}};
  if (merged) {
    j["merge"] = {{"merged_count", merge.merged_count},
                  {"merged_fraction", merge.merged_fraction},
                  {"mean_degree_before", merge.mean_degree_before},
                  {"mean_degree_after", merge.mean_degree_after}};
  }
  if (filtered) {
    j["filter"] = {{"triples_before", filter.triples_before},
                   {"triples_removed", filter.triples_removed},
                   {"nodes_removed", filter.nodes_removed},
                   {"removed_fraction", filter.removed_fraction}};
  }
  nlohmann::json per_kind = nlohmann::json::object();
  for (const auto& [kind, st] : answer_stats) {
    per_kind[kind] = {{"count", st.count},
                      {"mean_answers", st.mean_answers},
                      {"median_answers", st.median_answers}};
  }
  j["sampling"] = {{"requested", requested},
                   {"sampled", sampled},
                   {"answers", per_kind}};
  j["verbalize"] = {{"verbalized", verbalized},
                    {"dropped_na", dropped_na},
                    {"dropped_invalid", dropped_invalid}};
  j["curation"] = {{"groups", curation_groups}, {"selected", selected}};
  j["emit"] = {{"mcqa", mcqa_records},
               {"compact", compact_records},
               {"verbalized", verbalized_records}};
  j["status"] = status;
  j["outputs"] = outputs;
  return j.dump(2);
}

KnowledgeGraph prepare_graph(const RunConfig& c, RunReport* report) {
  if (c.input.empty()) throw Error("config: input is required");
  KnowledgeGraph g =
      run_stage("load", [&] { return KnowledgeGraph::load(c.input); });
  if (report) report->input_stats = g.stats();

  if (c.normalize_enabled) {
    g = run_stage("normalize", [&] { return normalize_graph(g); });
  }
  if (c.merge_enabled) {
    run_stage("merge", [&] {
      auto sim = make_similarity_provider(c);
      MergeOptions mo;
      mo.tau = c.merge_tau;
      if (c.merge_missing == "error") {
        mo.missing = MissingEmbeddingPolicy::kError;
      } else if (c.merge_missing == "skip") {
        mo.missing = MissingEmbeddingPolicy::kSkip;
      } else {
        throw Error("unknown merge.missing '" + c.merge_missing + "'");
      }
      auto [merged, map] = merge_nodes(g, *sim, mo);
      g = std::move(merged);
      if (report) {
        report->merge = std::move(map);
        report->merged = true;
      }
      return 0;
    });
  }
  if (c.plausibility_enabled) {
    run_stage("filter", [&] {
      auto provider = make_plausibility_provider(c, g);
      auto [kept, filter_report] =
          filter_by_plausibility(g, *provider, c.plausibility_threshold);
      g = std::move(kept);
      if (report) {
        report->filter = filter_report;
        report->filtered = true;
      }
      return 0;
    });
  }
  if (report) report->final_stats = g.stats();
  return g;
}

RunReport run_pipeline(const RunConfig& c, LlmClient* llm) {
  if (c.input.empty()) throw Error("config: input is required");
  if (c.output_dir.empty()) throw Error("config: output-dir is required");
  const std::string& mode = c.verbalize_mode;
  if (mode != "rule" && mode != "llm" && mode != "llm-with-rule-fallback") {
    throw Error("config: unknown verbalize.mode '" + mode + "'");
  }
  const bool llm_mode = mode != "rule";
  const bool rule_fallback = mode == "llm-with-rule-fallback";
  if (c.emit_mcqa_enabled &&
      c.distractors_random + c.distractors_adversarial < 3) {
    throw Error("config: mcqa emission needs at least 3 distractors per item");
  }
  if (c.curation_enabled && c.curation_k == 0) {
    throw Error("config: curation.k must be positive");
  }

  RunReport report;
  report.config_json = resolved_config_json(c);

  KnowledgeGraph g = prepare_graph(c, &report);

  std::map<QueryKind, size_t> mix;
  for (size_t i = 0; i < kQueryKindCount; ++i) {
    report.requested += c.mix[i];
    if (c.mix[i] > 0) mix[kAllQueryKinds[i]] = c.mix[i];
  }
  BatchOptions batch;
  batch.cutoff = c.sample_cutoff;
  batch.retries = c.sample_retries;
  batch.workers = std::max<size_t>(c.workers, 1);
  std::vector<SampledQuery> sampled =
      run_stage("sample", [&] { return batch_sample(g, mix, c.seed, batch); });
  report.sampled = sampled.size();
  for (const auto& [kind, st] : answer_stats(sampled)) {
    report.answer_stats[std::string(query_kind_name(kind))] = st;
  }

  const size_t n = sampled.size();
  std::vector<std::optional<VerbalizedItem>> slots(n);
  std::vector<uint8_t> drops(n, 0);  // 1 = NA reply, 2 = rejected reply

  if (n > 0) {
    run_stage("verbalize", [&] {
      if (c.names.empty()) {
        throw Error("names registry path is required once items exist");
      }
      const NameRegistry registry = NameRegistry::load(c.names);
      const ChronologyTable chrono = c.chronology.empty()
                                         ? builtin_chronology()
                                         : load_chronology(c.chronology);
      const std::set<std::string> stops = c.stopwords.empty()
                                              ? builtin_stopwords()
                                              : load_stopwords(c.stopwords);
      LlmPromptSet prompts;
      std::unique_ptr<LlmClient> owned;
      LlmClient* client = llm;
      if (llm_mode) {
        if (c.prompts_dir.empty()) {
          throw Error("prompts-dir is required by the llm modes");
        }
        prompts = LlmPromptSet::load(c.prompts_dir);
        if (client == nullptr) {
          if (c.verbalize_endpoint.empty()) {
            throw Error("verbalize.endpoint is required by the llm modes");
          }
          owned = std::make_unique<HttpLlmClient>(c.verbalize_endpoint);
          client = owned.get();
        }
      }
      DistractorOptions dopts;
      dopts.random_count = c.distractors_random;
      dopts.adversarial_count = c.distractors_adversarial;
      // llm calls block on the network, so their width is a separate knob
      const size_t width = llm_mode ? std::max<size_t>(c.verbalize_max_inflight, 1)
                                    : std::max<size_t>(c.workers, 1);
      parallel_for(n, width, [&](size_t i) {
        const SampledQuery& sq = sampled[i];
        const QueryInstance& q = sq.query;
        const std::string label = "item " + std::to_string(i) + " (" +
                                  std::string(query_kind_name(q.kind)) + ")";
        try {
          VerbalizedItem item;
          item.query = q;
          item.answers = sq.answers;

          ProvenanceBlock prov;
          for (const StoredTriple& t : provenance_triples(g, q)) {
            prov.triples.push_back({g.node_text(t.head),
                                    std::string(relation_name(t.rel)),
                                    g.node_text(t.tail)});
          }
          prov.kind = std::string(query_kind_name(q.kind));
          for (NodeId a : q.anchors) prov.anchors.push_back(g.node_text(a));
          for (Relation r : q.relations) {
            prov.relations.push_back(std::string(relation_name(r)));
          }
          prov.gold = g.node_text(q.seed_answer);
          prov.seed = c.seed;
          DetRng name_rng(derive_seed(c.seed, "names", i));
          const NameAssignment names = registry.assign(name_rng);
          prov.name_x = names.x;
          prov.name_y = names.y;
          prov.name_z = names.z;
          prov.heuristic_negation = q.kind == QueryKind::TwoINeg;

          DetRng distractor_rng(derive_seed(c.seed, "distractors", i));
          DistractorSet dset =
              sample_distractors(g, q, sq.answers, distractor_rng, stops, dopts);
          for (const Distractor& d : dset.items) {
            item.distractor_texts.push_back(
                substitute_names(g.node_text(d.node), names));
          }

          const Verbalization v = verbalize_rule(g, q, chrono);
          std::string context = substitute_names(v.context, names);
          // narratives exist only for the two-anchor kinds; the rest keep
          // the rule context in every mode
          if (llm_mode && query_anchor_count(q.kind) == 2) {
            LlmContext out = verbalize_context_llm(g, q, names, *client, prompts);
            if (out.outcome == LlmOutcome::kAccepted) {
              context = out.text;
            } else if (!rule_fallback) {
              drops[i] = out.outcome == LlmOutcome::kNa ? 1 : 2;
              return;
            }
          }
          item.context = std::move(context);
          item.question = substitute_names(v.question, names);
          item.gold_text = prov.gold;
          item.provenance = std::move(prov);
          slots[i] = std::move(item);
        } catch (const DistractorShortage& e) {
          throw DistractorShortage(label + ": " + e.what());
        } catch (const ProviderError& e) {
          throw ProviderError(label + ": " + e.what());
        } catch (const Error& e) {
          throw Error(label + ": " + e.what());
        }
      });
      return 0;
    });
  }

  std::vector<VerbalizedItem> items;
  std::vector<size_t> ordinals;  // pre-drop position, keys per-item emit rng
  for (size_t i = 0; i < n; ++i) {
    if (drops[i] == 1) {
      ++report.dropped_na;
    } else if (drops[i] == 2) {
      ++report.dropped_invalid;
    } else if (slots[i].has_value()) {
      ordinals.push_back(i);
      items.push_back(std::move(*slots[i]));
    }
  }
  report.verbalized = items.size();

  std::vector<size_t> kept;
  if (c.curation_enabled && !items.empty()) {
    run_stage("curation", [&] {
      std::vector<DiversityItem> candidates;
      candidates.reserve(items.size());
      for (size_t i = 0; i < items.size(); ++i) {
        candidates.push_back({static_cast<uint64_t>(i),
                              items[i].provenance.gold, items[i].context});
      }
      DiversityOptions opts;
      opts.k = c.curation_k;
      opts.workers = std::max<size_t>(c.workers, 1);
      DiversityResult result = diversity_filter(candidates, opts);
      report.curation_groups = result.traces.size();
      for (uint64_t id : result.selected) kept.push_back(static_cast<size_t>(id));
      return 0;
    });
  } else {
    for (size_t i = 0; i < items.size(); ++i) kept.push_back(i);
  }
  report.selected = kept.size();

  std::vector<MCQARecord> mcqa;
  std::vector<GenerativeRecord> compact;
  std::vector<GenerativeRecord> verbalized;
  run_stage("emit", [&] {
    for (size_t idx : kept) {
      const VerbalizedItem& item = items[idx];
      if (c.emit_mcqa_enabled) {
        DetRng emit_rng(derive_seed(c.seed, "emit/mcqa", ordinals[idx]));
        mcqa.push_back(emit_mcqa(item, emit_rng));
      }
      if (c.emit_compact_enabled && compact_grammar_supported(item.query.kind)) {
        compact.push_back(emit_generative_compact(g, item));
      }
      if (c.emit_verbalized_enabled) {
        verbalized.push_back(emit_generative_verbalized(g, item));
      }
    }
    return 0;
  });
  report.mcqa_records = mcqa.size();
  report.compact_records = compact.size();
  report.verbalized_records = verbalized.size();

  run_stage("write", [&] {
    std::filesystem::create_directories(c.output_dir);
    const std::string graph_path = c.output_dir + "/graph.tsv";
    g.save(graph_path);
    report.outputs.push_back(graph_path);
    if (c.emit_mcqa_enabled) {
      const std::string path = c.output_dir + "/mcqa.jsonl";
      write_mcqa_jsonl(path, mcqa);
      report.outputs.push_back(path);
    }
    if (c.emit_compact_enabled) {
      const std::string path = c.output_dir + "/generative_compact.jsonl";
      write_generative_jsonl(path, compact);
      report.outputs.push_back(path);
    }
    if (c.emit_verbalized_enabled) {
      const std::string path = c.output_dir + "/generative_verbalized.jsonl";
      write_generative_jsonl(path, verbalized);
      report.outputs.push_back(path);
    }
    if (c.emit_items_enabled) {
      const std::string path = c.output_dir + "/items.jsonl";
      std::string body;
      for (const VerbalizedItem& item : items) {
        nlohmann::json j;
        j["schema_version"] = kSchemaVersion;
        j["id"] = record_id(item.provenance);
        j["kind"] = item.provenance.kind;
        j["context"] = item.context;
        j["question"] = item.question;
        j["gold"] = substitute_names(item.gold_text, names_from(item.provenance));
        j["distractors"] = item.distractor_texts;
        std::vector<std::string> answer_texts;
        for (NodeId a : item.answers) answer_texts.push_back(g.node_text(a));
        std::sort(answer_texts.begin(), answer_texts.end());
        j["answers"] = answer_texts;
        j["provenance"] = provenance_json(item.provenance);
        body += j.dump();
        body += '\n';
      }
      write_text_file(path, body);
      report.outputs.push_back(path);
    }
    return 0;
  });

  report.status = (report.sampled < report.requested ||
                   report.dropped_na + report.dropped_invalid > 0)
                      ? "partial"
                      : "success";
  const std::string report_path = c.output_dir + "/report.json";
  report.outputs.push_back(report_path);
  run_stage("write",
            [&] { write_text_file(report_path, report.json() + "\n"); return 0; });
  return report;
}

namespace {

struct RebuiltQuery {
  QueryInstance query;
  AnswerSet answers;
};

// Reconstructs the query from the provenance texts and re-derives its answer
// set. Every structural defect lands in `failures`; a defect that leaves the
// query unusable returns nothing and skips the dependent checks.
std::optional<RebuiltQuery> rebuild_query(const KnowledgeGraph& g,
                                          const ProvenanceBlock& p,
                                          const std::string& id,
                                          const std::string& kind_field,
                                          std::vector<std::string>& failures) {
  auto fail = [&](const std::string& msg) {
    failures.push_back("record " + id + ": " + msg);
  };
  if (record_id(p) != id) fail("id does not match its provenance hash");
  auto kind = parse_query_kind(p.kind);
  if (!kind) {
    fail("unknown kind '" + p.kind + "'");
    return std::nullopt;
  }
  if (kind_field != p.kind) fail("kind field disagrees with provenance");
  if (p.anchors.size() != query_anchor_count(*kind) ||
      p.relations.size() != query_relation_count(*kind)) {
    fail("anchor or relation count does not fit the kind");
    return std::nullopt;
  }
  QueryInstance q;
  q.kind = *kind;
  for (const std::string& a : p.anchors) {
    auto node = g.find_node(a);
    if (!node) {
      fail("anchor '" + a + "' is not in the graph");
      return std::nullopt;
    }
    q.anchors.push_back(*node);
  }
  for (const std::string& r : p.relations) {
    auto rel = parse_relation(r);
    if (!rel) {
      fail("unknown relation '" + r + "'");
      return std::nullopt;
    }
    q.relations.push_back(*rel);
  }
  if (q.kind == QueryKind::TwoINeg &&
      q.relations[1] != Relation::HinderedBy) {
    fail("second relation of a 2i-neg must be HinderedBy");
  }
  auto gold = g.find_node(p.gold);
  if (!gold) {
    fail("gold '" + p.gold + "' is not in the graph");
    return std::nullopt;
  }
  q.seed_answer = *gold;
  for (const auto& t : p.triples) {
    auto head = g.find_node(t[0]);
    auto rel = parse_relation(t[1]);
    auto tail = g.find_node(t[2]);
    if (!head || !rel || !tail || !g.has_edge(*head, *rel, *tail)) {
      fail("provenance edge '" + t[0] + " | " + t[1] + " | " + t[2] +
           "' is not in the graph");
    }
  }
  RebuiltQuery out;
  out.answers = answer_query(g, q);
  if (!std::binary_search(out.answers.begin(), out.answers.end(), *gold)) {
    fail("gold answer is not entailed by the query");
  }
  out.query = std::move(q);
  return out;
}

}  // namespace

VerifyReport verify_dataset(const KnowledgeGraph& g,
                            std::span<const MCQARecord> mcqa,
                            std::span<const GenerativeRecord> generative) {
  VerifyReport report;
  for (const MCQARecord& r : mcqa) {
    ++report.mcqa_checked;
    auto fail = [&](const std::string& msg) {
      report.failures.push_back("record " + r.id + ": " + msg);
    };
    auto rebuilt = rebuild_query(g, r.provenance, r.id, r.kind, report.failures);
    if (r.label < 0 || r.label > 3) {
      fail("label " + std::to_string(r.label) + " is out of range");
      continue;
    }
    if (r.options[4] != kNoneOption) fail("option E is not the sentinel");
    std::set<std::string_view> unique(r.options.begin(), r.options.end());
    if (unique.size() != r.options.size()) {
      fail("options are not pairwise distinct");
    }
    const NameAssignment names = names_from(r.provenance);
    if (r.options[static_cast<size_t>(r.label)] !=
        substitute_names(r.provenance.gold, names)) {
      fail("gold option does not match provenance");
    }
    if (rebuilt) {
      std::set<std::string> answer_texts;
      for (NodeId a : rebuilt->answers) {
        answer_texts.insert(substitute_names(g.node_text(a), names));
      }
      for (int slot = 0; slot < 4; ++slot) {
        if (slot == r.label) continue;
        if (answer_texts.count(r.options[static_cast<size_t>(slot)]) > 0) {
          fail("option " + std::string(1, static_cast<char>('A' + slot)) +
               " is an unlabeled answer");
        }
      }
    }
  }
  for (const GenerativeRecord& r : generative) {
    ++report.generative_checked;
    auto fail = [&](const std::string& msg) {
      report.failures.push_back("record " + r.id + ": " + msg);
    };
    auto rebuilt = rebuild_query(g, r.provenance, r.id, r.kind, report.failures);
    if (!rebuilt) continue;
    if (r.mode == "compact") {
      if (!compact_grammar_supported(rebuilt->query.kind)) {
        fail("kind has no compact grammar");
        continue;
      }
      VerbalizedItem shell;
      shell.query = rebuilt->query;
      shell.answers = rebuilt->answers;
      shell.provenance = r.provenance;
      const GenerativeRecord expected = emit_generative_compact(g, shell);
      if (expected.input != r.input) fail("input does not match its grammar");
      if (expected.references != r.references) {
        fail("references do not match the answer set");
      }
    } else if (r.mode == "verbalized") {
      if (!r.input.ends_with(" [GEN]")) fail("input is missing the [GEN] mark");
      const NameAssignment names = names_from(r.provenance);
      std::vector<std::string> expected;
      for (NodeId a : rebuilt->answers) {
        expected.push_back(substitute_names(g.node_text(a), names));
      }
      std::sort(expected.begin(), expected.end());
      if (expected != r.references) {
        fail("references do not match the answer set");
      }
    } else {
      fail("unknown mode '" + r.mode + "'");
    }
  }
  return report;
}

void write_queries_jsonl(const std::string& path, const KnowledgeGraph& g,
                         std::span<const SampledQuery> items) {
  std::string body;
  for (const SampledQuery& sq : items) {
    nlohmann::json j;
    j["kind"] = std::string(query_kind_name(sq.query.kind));
    std::vector<std::string> texts;
    for (NodeId a : sq.query.anchors) texts.push_back(g.node_text(a));
    j["anchors"] = texts;
    std::vector<std::string> relations;
    for (Relation r : sq.query.relations) {
      relations.push_back(std::string(relation_name(r)));
    }
    j["relations"] = relations;
    j["gold"] = g.node_text(sq.query.seed_answer);
    texts.clear();
    for (NodeId w : sq.query.witnesses) texts.push_back(g.node_text(w));
    j["witnesses"] = texts;
    texts.clear();
    for (NodeId a : sq.answers) texts.push_back(g.node_text(a));
    std::sort(texts.begin(), texts.end());
    j["answers"] = texts;
    body += j.dump();
    body += '\n';
  }
  write_text_file(path, body);
}

}  // namespace cqforge
