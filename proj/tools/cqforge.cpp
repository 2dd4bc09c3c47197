#include <filesystem>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "cqforge/error.hpp"
#include "cqforge/graph.hpp"
#include "cqforge/pipeline.hpp"
#include "cqforge/query.hpp"

using namespace cqforge;

namespace {

std::string knob_help(const std::string& key) {
  static const std::map<std::string, std::string> help = {
      {"input", "input graph tsv"},
      {"output-dir", "directory the outputs land in"},
      {"seed", "master seed; every derived stream hangs off it"},
      {"workers", "worker threads for the parallel stages"},
      {"normalize.enabled", "rewrite bare tails into full sentences"},
      {"merge.enabled", "merge near-duplicate nodes"},
      {"merge.tau", "similarity threshold for merging"},
      {"merge.similarity", "token-jaccard | exact | file:<path> | http(s)://<url>"},
      {"merge.missing", "error | skip when a text cannot be embedded"},
      {"plausibility.enabled", "drop low-scoring triples"},
      {"plausibility.threshold", "minimum triple score kept"},
      {"plausibility.provider",
       "attached | constant:<v> | file:<path> | http(s)://<url>"},
      {"sample.cutoff", "predecessor window: top-k by plausibility"},
      {"sample.retries", "sampling attempts per requested instance"},
      {"distractors.random", "random distractors per item"},
      {"distractors.adversarial", "adversarial distractors per item"},
      {"stopwords", "stopword list path (builtin when empty)"},
      {"verbalize.mode", "rule | llm | llm-with-rule-fallback"},
      {"verbalize.endpoint", "narrative generation endpoint"},
      {"verbalize.max-inflight", "parallel narrative requests"},
      {"names", "person name registry tsv"},
      {"chronology", "relation chronology table tsv"},
      {"prompts-dir", "directory with narrative instructions and exemplars"},
      {"curation.enabled", "greedy context-diversity filter"},
      {"curation.k", "max items kept per answer"},
      {"emit.mcqa", "write mcqa.jsonl"},
      {"emit.compact", "write generative_compact.jsonl"},
      {"emit.verbalized", "write generative_verbalized.jsonl"},
      {"emit.items", "write items.jsonl (pre-curation item dump)"},
  };
  auto it = help.find(key);
  if (it != help.end()) return it->second;
  if (key.rfind("mix.", 0) == 0) {
    return "instances to sample for kind " + key.substr(4);
  }
  return "";
}

struct FlagCapture {
  std::string key;
  std::string value;
  CLI::Option* opt = nullptr;
};

struct SubState {
  CLI::App* sub = nullptr;
  std::string config_path;
  std::string positional_input;
  CLI::Option* positional = nullptr;
  std::vector<FlagCapture> captures;
};

void attach_knobs(SubState& st) {
  st.sub->add_option("--config", st.config_path,
                     "JSON config file; flags and CQFORGE_* variables win over it");
  st.positional =
      st.sub->add_option("graph", st.positional_input, "shorthand for --input");
  for (const std::string& key : run_config_keys()) {
    st.captures.push_back({key, "", nullptr});
  }
  // bind only once the capture vector has its final size, the options hold
  // references into it
  for (FlagCapture& cap : st.captures) {
    std::string flag = "--" + cap.key;
    for (char& ch : flag) {
      if (ch == '.') ch = '-';
    }
    cap.opt = st.sub->add_option(flag, cap.value, knob_help(cap.key))
                  ->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  }
}

// defaults, then the config file, then the environment, then the flags
RunConfig build_config(const SubState& st) {
  RunConfig c;
  if (!st.config_path.empty()) apply_config_file(c, st.config_path);
  apply_env_overrides(c);
  for (const FlagCapture& cap : st.captures) {
    if (cap.opt->count() > 0) apply_key_value(c, cap.key, cap.value);
  }
  if (st.positional->count() > 0) c.input = st.positional_input;
  return c;
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

int cmd_load_stats(const RunConfig& c) {
  if (c.input.empty()) throw Error("config: input is required");
  KnowledgeGraph g = KnowledgeGraph::load(c.input);
  std::cout << stats_json(g.stats()).dump(2) << "\n";
  return 0;
}

std::string save_processed(const RunConfig& c, const KnowledgeGraph& g) {
  std::filesystem::create_directories(c.output_dir);
  std::string path = c.output_dir + "/graph.tsv";
  g.save(path);
  return path;
}

int cmd_normalize(RunConfig c) {
  c.plausibility_enabled = false;
  c.mix.fill(0);
  RunReport report;
  KnowledgeGraph g = prepare_graph(c, &report);
  std::string path = save_processed(c, g);
  std::cout << "nodes " << report.input_stats.node_count << " -> "
            << report.final_stats.node_count << ", triples "
            << report.input_stats.triple_count << " -> "
            << report.final_stats.triple_count << "\n";
  if (report.merged) {
    std::cout << "merged " << report.merge.merged_count << " nodes ("
              << report.merge.merged_fraction << " of the graph)\n";
  }
  std::cout << "wrote " << path << "\n";
  return 0;
}

int cmd_filter(RunConfig c) {
  c.normalize_enabled = false;
  c.merge_enabled = false;
  c.plausibility_enabled = true;
  c.mix.fill(0);
  RunReport report;
  KnowledgeGraph g = prepare_graph(c, &report);
  std::string path = save_processed(c, g);
  std::cout << "removed " << report.filter.triples_removed << " of "
            << report.filter.triples_before << " triples and "
            << report.filter.nodes_removed << " stranded nodes\n";
  std::cout << "wrote " << path << "\n";
  return 0;
}

int cmd_sample(const RunConfig& c) {
  KnowledgeGraph g = prepare_graph(c);
  std::map<QueryKind, size_t> mix;
  size_t requested = 0;
  for (size_t i = 0; i < kQueryKindCount; ++i) {
    requested += c.mix[i];
    if (c.mix[i] > 0) mix[kAllQueryKinds[i]] = c.mix[i];
  }
  BatchOptions opts;
  opts.cutoff = c.sample_cutoff;
  opts.retries = c.sample_retries;
  opts.workers = std::max<size_t>(c.workers, 1);
  std::vector<SampledQuery> sampled = batch_sample(g, mix, c.seed, opts);
  std::filesystem::create_directories(c.output_dir);
  std::string path = c.output_dir + "/queries.jsonl";
  write_queries_jsonl(path, g, sampled);
  std::cout << "sampled " << sampled.size() << " of " << requested
            << " requested\n";
  for (const auto& [kind, st] : answer_stats(sampled)) {
    std::cout << "  " << query_kind_name(kind) << ": " << st.count
              << " instances, mean answers " << st.mean_answers
              << ", median " << st.median_answers << "\n";
  }
  std::cout << "wrote " << path << "\n";
  return sampled.size() < requested ? 2 : 0;
}

int finish_run(const RunReport& report) {
  std::cout << "status: " << report.status << "\n";
  std::cout << "graph: " << report.final_stats.node_count << " nodes, "
            << report.final_stats.triple_count << " triples after processing\n";
  std::cout << "sampled " << report.sampled << " of " << report.requested
            << ", verbalized " << report.verbalized << " (dropped "
            << report.dropped_na << " na + " << report.dropped_invalid
            << " rejected), selected " << report.selected << "\n";
  std::cout << "records: " << report.mcqa_records << " mcqa, "
            << report.compact_records << " compact, "
            << report.verbalized_records << " verbalized\n";
  for (const std::string& path : report.outputs) {
    std::cout << "wrote " << path << "\n";
  }
  return report.status == "success" ? 0 : 2;
}

int cmd_run(const RunConfig& c) { return finish_run(run_pipeline(c)); }

int cmd_verbalize(RunConfig c) {
  // operates on an already-processed graph; dumps items instead of datasets
  c.normalize_enabled = false;
  c.merge_enabled = false;
  c.plausibility_enabled = false;
  c.curation_enabled = false;
  c.emit_mcqa_enabled = false;
  c.emit_compact_enabled = false;
  c.emit_verbalized_enabled = false;
  c.emit_items_enabled = true;
  return finish_run(run_pipeline(c));
}

int cmd_emit(RunConfig c) {
  // datasets from an already-processed graph
  c.normalize_enabled = false;
  c.merge_enabled = false;
  c.plausibility_enabled = false;
  return finish_run(run_pipeline(c));
}

int cmd_verify(const RunConfig& c) {
  const std::string graph_path = c.output_dir + "/graph.tsv";
  if (!std::filesystem::exists(graph_path)) {
    throw Error("verify needs the processed graph at " + graph_path);
  }
  KnowledgeGraph g = KnowledgeGraph::load(graph_path);
  std::vector<MCQARecord> mcqa;
  const std::string mcqa_path = c.output_dir + "/mcqa.jsonl";
  if (std::filesystem::exists(mcqa_path)) mcqa = read_mcqa_jsonl(mcqa_path);
  std::vector<GenerativeRecord> generative;
  for (const char* name : {"generative_compact.jsonl",
                           "generative_verbalized.jsonl"}) {
    const std::string path = c.output_dir + "/" + name;
    if (!std::filesystem::exists(path)) continue;
    for (GenerativeRecord& r : read_generative_jsonl(path)) {
      generative.push_back(std::move(r));
    }
  }
  VerifyReport report = verify_dataset(g, mcqa, generative);
  std::cout << "checked " << report.mcqa_checked << " mcqa and "
            << report.generative_checked << " generative records\n";
  for (const std::string& failure : report.failures) {
    std::cout << "FAIL " << failure << "\n";
  }
  if (report.ok()) {
    std::cout << "all records check out\n";
    return 0;
  }
  std::cout << report.failures.size() << " failures\n";
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"forges multi-hop commonsense QA datasets from a knowledge graph"};
  app.require_subcommand(1);

  std::map<std::string, SubState> subs;
  const std::vector<std::pair<std::string, std::string>> commands = {
      {"load-stats", "print statistics for a graph file"},
      {"normalize", "rewrite tails and merge near-duplicate nodes"},
      {"filter", "drop triples below the plausibility threshold"},
      {"sample", "sample conjunctive queries with their answer sets"},
      {"verbalize", "build verbalized items from a processed graph"},
      {"emit", "emit datasets from a processed graph"},
      {"run", "run the whole pipeline"},
      {"verify", "re-derive emitted records against the processed graph"},
  };
  for (const auto& [name, description] : commands) {
    SubState st;
    st.sub = app.add_subcommand(name, description);
    attach_knobs(subs.emplace(name, std::move(st)).first->second);
  }

  CLI11_PARSE(app, argc, argv);

  try {
    for (const auto& [name, st] : subs) {
      if (!st.sub->parsed()) continue;
      RunConfig c = build_config(st);
      if (name == "load-stats") return cmd_load_stats(c);
      if (name == "normalize") return cmd_normalize(c);
      if (name == "filter") return cmd_filter(c);
      if (name == "sample") return cmd_sample(c);
      if (name == "verbalize") return cmd_verbalize(c);
      if (name == "emit") return cmd_emit(c);
      if (name == "run") return cmd_run(c);
      if (name == "verify") return cmd_verify(c);
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  std::cerr << "error: no subcommand\n";
  return 1;
}
