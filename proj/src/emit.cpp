#include "cqforge/emit.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <set>

#include "json.hpp"

#include "cqforge/error.hpp"

namespace cqforge {

namespace {

uint64_t fnv1a64(std::string_view data, uint64_t h = 1469598103934665603ull) {
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

NameAssignment names_of(const ProvenanceBlock& p) {
  NameAssignment names;
  names.x = p.name_x;
  names.y = p.name_y;
  names.z = p.name_z;
  return names;
}

}  // namespace

std::string record_id(const ProvenanceBlock& p) {
  // field and record separators keep adjacent texts from colliding
  std::string blob = p.kind;
  blob += '\x1f';
  blob += std::to_string(p.seed);
  for (const auto& t : p.triples) {
    blob += '\x1f';
    blob += t[0];
    blob += '\x1e';
    blob += t[1];
    blob += '\x1e';
    blob += t[2];
  }
  uint64_t h = fnv1a64(blob);
  char buf[17];
  auto [end, ec] = std::to_chars(buf, buf + 16, h, 16);
  std::string hex(buf, end);
  return std::string(16 - hex.size(), '0') + hex;
}

MCQARecord emit_mcqa(const VerbalizedItem& item, DetRng& rng) {
  if (item.distractor_texts.size() < 3) {
    throw DistractorShortage("mcqa record needs 3 distractors, have " +
                             std::to_string(item.distractor_texts.size()));
  }
  MCQARecord r;
  r.kind = item.provenance.kind;
  r.context = item.context;
  r.question = item.question;
  r.provenance = item.provenance;
  r.id = record_id(item.provenance);

  std::string gold = substitute_names(item.gold_text, names_of(item.provenance));
  r.label = static_cast<int>(rng.uniform_below(4));
  size_t d = 0;
  for (int slot = 0; slot < 4; ++slot) {
    r.options[slot] = slot == r.label ? gold : item.distractor_texts[d++];
  }
  r.options[4] = std::string(kNoneOption);

  std::set<std::string_view> unique(r.options.begin(), r.options.end());
  if (unique.size() != r.options.size()) {
    throw Error("options are not pairwise distinct for record " + r.id);
  }
  return r;
}

bool compact_grammar_supported(QueryKind kind) {
  return kind == QueryKind::OneP || kind == QueryKind::TwoP ||
         kind == QueryKind::TwoI || kind == QueryKind::ThreeI;
}

GenerativeRecord emit_generative_compact(const KnowledgeGraph& g,
                                         const VerbalizedItem& item) {
  if (!compact_grammar_supported(item.query.kind)) {
    throw Error(std::string("no compact grammar for kind ") +
                std::string(query_kind_name(item.query.kind)));
  }
  GenerativeRecord r;
  r.kind = item.provenance.kind;
  r.mode = "compact";
  r.provenance = item.provenance;
  r.id = record_id(item.provenance);

  for (NodeId a : item.query.anchors) {
    r.input += g.node_text(a);
    r.input += ' ';
  }
  for (Relation rel : item.query.relations) {
    r.input += relation_name(rel);
    r.input += ' ';
  }
  r.input += "[GEN]";

  for (NodeId ans : item.answers) {
    r.references.push_back(g.node_text(ans));
  }
  // text order, not id order: ids shift when the graph is saved and reloaded
  std::sort(r.references.begin(), r.references.end());
  return r;
}

GenerativeRecord emit_generative_verbalized(const KnowledgeGraph& g,
                                            const VerbalizedItem& item) {
  GenerativeRecord r;
  r.kind = item.provenance.kind;
  r.mode = "verbalized";
  r.provenance = item.provenance;
  r.id = record_id(item.provenance);
  r.input = item.context + " " + item.question + " [GEN]";
  NameAssignment names = names_of(item.provenance);
  for (NodeId ans : item.answers) {
    r.references.push_back(substitute_names(g.node_text(ans), names));
  }
  std::sort(r.references.begin(), r.references.end());
  return r;
}

namespace {

nlohmann::json provenance_to_json(const ProvenanceBlock& p) {
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

ProvenanceBlock provenance_from_json(const nlohmann::json& j) {
  ProvenanceBlock p;
  p.triples = j.at("triples").get<std::vector<std::array<std::string, 3>>>();
  p.kind = j.at("kind").get<std::string>();
  p.anchors = j.at("anchors").get<std::vector<std::string>>();
  p.relations = j.at("relations").get<std::vector<std::string>>();
  p.gold = j.at("gold").get<std::string>();
  p.seed = j.at("seed").get<uint64_t>();
  p.name_x = j.at("names").at("x").get<std::string>();
  p.name_y = j.at("names").at("y").get<std::string>();
  p.name_z = j.at("names").at("z").get<std::string>();
  p.heuristic_negation = j.at("heuristic_negation").get<bool>();
  return p;
}

nlohmann::json parse_line(std::string_view line) {
  nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
  if (j.is_discarded() || !j.is_object()) {
    throw ParseError("record line is not a JSON object");
  }
  if (j.at("schema_version").get<int>() != kSchemaVersion) {
    throw ParseError("unsupported schema_version");
  }
  return j;
}

}  // namespace

std::string mcqa_to_json_line(const MCQARecord& r) {
  nlohmann::json j;
  j["schema_version"] = kSchemaVersion;
  j["id"] = r.id;
  j["kind"] = r.kind;
  j["context"] = r.context;
  j["question"] = r.question;
  j["options"] = r.options;
  j["label"] = r.label;
  j["provenance"] = provenance_to_json(r.provenance);
  return j.dump();
}

MCQARecord mcqa_from_json_line(std::string_view line) {
  nlohmann::json j = parse_line(line);
  MCQARecord r;
  r.id = j.at("id").get<std::string>();
  r.kind = j.at("kind").get<std::string>();
  r.context = j.at("context").get<std::string>();
  r.question = j.at("question").get<std::string>();
  r.options = j.at("options").get<std::array<std::string, 5>>();
  r.label = j.at("label").get<int>();
  r.provenance = provenance_from_json(j.at("provenance"));
  return r;
}

std::string generative_to_json_line(const GenerativeRecord& r) {
  nlohmann::json j;
  j["schema_version"] = kSchemaVersion;
  j["id"] = r.id;
  j["kind"] = r.kind;
  j["mode"] = r.mode;
  j["input"] = r.input;
  j["references"] = r.references;
  j["provenance"] = provenance_to_json(r.provenance);
  return j.dump();
}

GenerativeRecord generative_from_json_line(std::string_view line) {
  nlohmann::json j = parse_line(line);
  GenerativeRecord r;
  r.id = j.at("id").get<std::string>();
  r.kind = j.at("kind").get<std::string>();
  r.mode = j.at("mode").get<std::string>();
  r.input = j.at("input").get<std::string>();
  r.references = j.at("references").get<std::vector<std::string>>();
  r.provenance = provenance_from_json(j.at("provenance"));
  return r;
}

namespace {

template <typename Record, typename ToLine>
void write_jsonl(const std::string& path, std::span<const Record> records,
                 ToLine to_line) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  for (const auto& r : records) {
    out << to_line(r) << '\n';
  }
  if (!out) throw Error("short write to " + path);
}

template <typename Record, typename FromLine>
std::vector<Record> read_jsonl(const std::string& path, FromLine from_line) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path);
  std::vector<Record> records;
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      records.push_back(from_line(line));
    } catch (const Error& e) {
      throw ParseError(path + " line " + std::to_string(lineno) + ": " +
                       e.what());
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(path + " line " + std::to_string(lineno) + ": " +
                       e.what());
    }
  }
  return records;
}

}  // namespace

void write_mcqa_jsonl(const std::string& path,
                      std::span<const MCQARecord> records) {
  write_jsonl(path, records, mcqa_to_json_line);
}

std::vector<MCQARecord> read_mcqa_jsonl(const std::string& path) {
  return read_jsonl<MCQARecord>(path, [](const std::string& l) {
    return mcqa_from_json_line(l);
  });
}

void write_generative_jsonl(const std::string& path,
                            std::span<const GenerativeRecord> records) {
  write_jsonl(path, records, generative_to_json_line);
}

std::vector<GenerativeRecord> read_generative_jsonl(const std::string& path) {
  return read_jsonl<GenerativeRecord>(path, [](const std::string& l) {
    return generative_from_json_line(l);
  });
}

}  // namespace cqforge
