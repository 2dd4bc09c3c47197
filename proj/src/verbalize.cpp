#include "cqforge/verbalize.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

#include "httplib.h"
#include "json.hpp"

#include "cqforge/error.hpp"
#include "cqforge/text.hpp"

namespace cqforge {

std::string_view relation_fragment(Relation r) {
  switch (r) {
    case Relation::xIntent: return "the intention of PersonX before";
    case Relation::xNeed: return "what PersonX needed to do before";
    case Relation::xWant: return "what PersonX wants to do after";
    case Relation::xEffect: return "the effect on PersonX after";
    case Relation::xReact: return "what PersonX feels after";
    case Relation::xAttr: return "what PersonX is seen as given";
    case Relation::oEffect: return "the effect on PersonY after";
    case Relation::oReact: return "what PersonY feels after";
    case Relation::oWant: return "what PersonY wants to do after";
    case Relation::HinderedBy: return "what hindered";
    case Relation::isAfter: return "what happens before";
    case Relation::isBefore: return "what happens after";
  }
  throw Error("unknown relation in fragment table");
}

std::string_view chronology_class_name(ChronologyClass c) {
  switch (c) {
    case ChronologyClass::kEffectSide: return "effect-side";
    case ChronologyClass::kAttribute: return "attribute";
    case ChronologyClass::kCauseSide: return "cause-side";
  }
  throw Error("unknown chronology class");
}

std::optional<ChronologyClass> parse_chronology_class(std::string_view name) {
  if (name == "effect-side") return ChronologyClass::kEffectSide;
  if (name == "attribute") return ChronologyClass::kAttribute;
  if (name == "cause-side") return ChronologyClass::kCauseSide;
  return std::nullopt;
}

const ChronologyTable& builtin_chronology() {
  static const ChronologyTable table = [] {
    ChronologyTable t{};
    for (Relation r : kAllRelations) {
      ChronologyClass c = ChronologyClass::kEffectSide;
      if (r == Relation::xIntent || r == Relation::xNeed ||
          r == Relation::isAfter || r == Relation::HinderedBy) {
        c = ChronologyClass::kCauseSide;
      } else if (r == Relation::xAttr) {
        c = ChronologyClass::kAttribute;
      }
      t[static_cast<size_t>(r)] = c;
    }
    return t;
  }();
  return table;
}

ChronologyTable load_chronology(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open chronology table: " + path);
  ChronologyTable table{};
  std::array<bool, kRelationCount> seen{};
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view s = trim(line);
    if (s.empty() || s.front() == '#') continue;
    size_t tab = s.find('\t');
    if (tab == std::string_view::npos) {
      throw ParseError("chronology line " + std::to_string(lineno) +
                       ": expected relation<TAB>class");
    }
    auto rel = parse_relation(trim(s.substr(0, tab)));
    if (!rel) {
      throw ParseError("chronology line " + std::to_string(lineno) +
                       ": unknown relation");
    }
    auto cls = parse_chronology_class(trim(s.substr(tab + 1)));
    if (!cls) {
      throw ParseError("chronology line " + std::to_string(lineno) +
                       ": unknown class");
    }
    size_t idx = static_cast<size_t>(*rel);
    if (seen[idx]) {
      throw ParseError("chronology line " + std::to_string(lineno) +
                       ": duplicate relation");
    }
    seen[idx] = true;
    table[idx] = *cls;
  }
  for (Relation r : kAllRelations) {
    if (!seen[static_cast<size_t>(r)]) {
      throw ParseError("chronology table missing " +
                       std::string(relation_name(r)));
    }
  }
  return table;
}

std::string negate_event(const std::string& event) {
  size_t subj_end = event.find(' ');
  if (subj_end == std::string::npos) return "not " + event;
  size_t verb_start = subj_end + 1;
  size_t verb_end = event.find(' ', verb_start);
  std::string verb = event.substr(
      verb_start,
      verb_end == std::string::npos ? std::string::npos : verb_end - verb_start);

  static const std::map<std::string_view, std::string_view> kAux = {
      {"is", "isn't"},       {"are", "aren't"},     {"was", "wasn't"},
      {"were", "weren't"},   {"will", "won't"},     {"would", "wouldn't"},
      {"can", "can't"},      {"could", "couldn't"}, {"should", "shouldn't"},
      {"must", "mustn't"},   {"may", "may not"},    {"does", "doesn't"},
      {"do", "don't"},       {"did", "didn't"},     {"has", "doesn't have"},
      {"have", "don't have"}, {"had", "didn't have"},
  };

  std::string replacement;
  auto aux = kAux.find(verb);
  if (aux != kAux.end()) {
    replacement = std::string(aux->second);
  } else {
    // third-person-singular de-conjugation, shallow on purpose
    std::string base = verb;
    std::string_view b = base;
    if (b.size() > 3 && b.ends_with("ies")) {
      base = base.substr(0, base.size() - 3) + "y";
    } else if (b.ends_with("oes") || b.ends_with("sses") || b.ends_with("xes") ||
               b.ends_with("zes") || b.ends_with("ches") || b.ends_with("shes")) {
      base.resize(base.size() - 2);
    } else if (b.size() > 1 && b.back() == 's' && !b.ends_with("ss")) {
      base.pop_back();
    }
    replacement = "doesn't " + base;
  }
  std::string out = event.substr(0, verb_start);
  out += replacement;
  if (verb_end != std::string::npos) out += event.substr(verb_end);
  return out;
}

namespace {

// one rendered anchor of an intersection-like query
struct ContextBranch {
  std::string text;
  ChronologyClass cls;
};

std::string join_branches(std::vector<ContextBranch> branches) {
  bool has_effect = false;
  bool has_cause = false;
  for (const auto& b : branches) {
    has_effect |= b.cls == ChronologyClass::kEffectSide;
    has_cause |= b.cls == ChronologyClass::kCauseSide;
  }
  if (has_effect && has_cause) {
    // the answer follows the effect-side anchors and precedes the cause-side
    // ones, so lay the events out in time order
    std::stable_sort(branches.begin(), branches.end(),
                     [](const ContextBranch& a, const ContextBranch& b) {
                       return static_cast<int>(a.cls) < static_cast<int>(b.cls);
                     });
    std::string out = "After " + branches[0].text + ", " + branches[1].text;
    for (size_t i = 2; i < branches.size(); ++i) {
      out += " and " + branches[i].text;
    }
    return out;
  }
  std::string out = branches[0].text;
  for (size_t i = 1; i < branches.size(); ++i) {
    out += " and " + branches[i].text;
  }
  return out;
}

}  // namespace

std::string verbalize_context_rule(const KnowledgeGraph& g,
                                   const QueryInstance& q,
                                   const ChronologyTable& chrono) {
  auto cls = [&](Relation r) { return chrono[static_cast<size_t>(r)]; };
  auto text = [&](size_t i) { return g.node_text(q.anchors.at(i)); };

  std::vector<ContextBranch> branches;
  switch (q.kind) {
    case QueryKind::OneP:
    case QueryKind::TwoP:
      return text(0);
    case QueryKind::TwoI:
      branches = {{text(0), cls(q.relations.at(0))},
                  {text(1), cls(q.relations.at(1))}};
      break;
    case QueryKind::TwoINeg:
      branches = {{text(0), cls(q.relations.at(0))},
                  {negate_event(text(1)), cls(q.relations.at(1))}};
      break;
    case QueryKind::ThreeI:
      branches = {{text(0), cls(q.relations.at(0))},
                  {text(1), cls(q.relations.at(1))},
                  {text(2), cls(q.relations.at(2))}};
      break;
    case QueryKind::IP:
      branches = {{text(0), cls(q.relations.at(0))},
                  {text(1), cls(q.relations.at(1))}};
      break;
    case QueryKind::PI:
      // the chain anchor reads through r0, the direct branch through r2
      branches = {{text(0), cls(q.relations.at(0))},
                  {text(1), cls(q.relations.at(2))}};
      break;
  }
  return join_branches(std::move(branches));
}

std::string verbalize_question(const KnowledgeGraph& g, const QueryInstance& q) {
  auto f = [&](size_t i) {
    return std::string(relation_fragment(q.relations.at(i)));
  };
  auto v = [&](size_t i) { return g.node_text(q.anchors.at(i)); };

  std::string out = "What event or state is ";
  switch (q.kind) {
    case QueryKind::OneP:
      out += f(0) + " " + v(0);
      break;
    case QueryKind::TwoP:
      // outermost fragment is the hop next to the answer
      out += f(1) + " " + f(0) + " " + v(0);
      break;
    case QueryKind::TwoI:
    case QueryKind::TwoINeg:
      out += "both " + f(0) + " " + v(0) + " and also " + f(1) + " " + v(1);
      break;
    case QueryKind::ThreeI:
      out += "both " + f(0) + " " + v(0) + ", " + f(1) + " " + v(1) +
             ", and also " + f(2) + " " + v(2);
      break;
    case QueryKind::IP:
      out += f(2) + " the event that is both " + f(0) + " " + v(0) +
             ", and also " + f(1) + " " + v(1);
      break;
    case QueryKind::PI:
      out += "both " + f(1) + " " + f(0) + " " + v(0) + ", and also " + f(2) +
             " " + v(1);
      break;
  }
  out += "?";
  return out;
}

Verbalization verbalize_rule(const KnowledgeGraph& g, const QueryInstance& q,
                             const ChronologyTable& chrono) {
  Verbalization v;
  v.context = verbalize_context_rule(g, q, chrono);
  v.question = verbalize_question(g, q);
  v.heuristic_negation = q.kind == QueryKind::TwoINeg;
  return v;
}

NameRegistry NameRegistry::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open name registry: " + path);
  NameRegistry reg;
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view s = trim(line);
    if (s.empty() || s.front() == '#') continue;
    size_t tab = s.find('\t');
    if (tab == std::string_view::npos) {
      throw ParseError("name registry line " + std::to_string(lineno) +
                       ": expected name<TAB>frequency");
    }
    std::string name(trim(s.substr(0, tab)));
    double freq = 0.0;
    if (name.empty() || !parse_double(trim(s.substr(tab + 1)), freq) ||
        freq < 0.0) {
      throw ParseError("name registry line " + std::to_string(lineno) +
                       ": bad entry");
    }
    if (std::find(reg.names_.begin(), reg.names_.end(), name) !=
        reg.names_.end()) {
      throw ParseError("name registry line " + std::to_string(lineno) +
                       ": duplicate name " + name);
    }
    reg.names_.push_back(std::move(name));
    reg.frequencies_.push_back(freq);
  }
  if (reg.names_.size() < 3) {
    throw Error("name registry needs at least 3 names: " + path);
  }
  return reg;
}

bool NameRegistry::contains(std::string_view name) const {
  return std::find(names_.begin(), names_.end(), name) != names_.end();
}

NameAssignment NameRegistry::assign(DetRng& rng) const {
  auto picks = rng.sample_indices(names_.size(), 3);
  NameAssignment a;
  a.x = names_[picks[0]];
  a.y = names_[picks[1]];
  a.z = names_[picks[2]];
  return a;
}

std::string substitute_names(std::string_view text, const NameAssignment& names) {
  std::string out = replace_token(text, "PersonX", names.x);
  out = replace_token(out, "PersonY", names.y);
  out = replace_token(out, "PersonZ", names.z);
  return out;
}

namespace {

std::string read_text_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open prompt file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return std::string(trim(buf.str()));
}

}  // namespace

LlmPromptSet LlmPromptSet::load(const std::string& dir) {
  LlmPromptSet set;
  set.system_intersection = read_text_file(dir + "/llm_system_intersection.txt");
  set.system_negation = read_text_file(dir + "/llm_system_negation.txt");

  std::string path = dir + "/llm_exemplars.tsv";
  std::ifstream in(path);
  if (!in) throw Error("cannot open exemplar file: " + path);
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view s = trim(line);
    if (s.empty() || s.front() == '#') continue;
    size_t t1 = s.find('\t');
    size_t t2 = t1 == std::string_view::npos ? t1 : s.find('\t', t1 + 1);
    if (t2 == std::string_view::npos) {
      throw ParseError("exemplar line " + std::to_string(lineno) +
                       ": expected anchor<TAB>anchor<TAB>reply");
    }
    LlmExemplar ex;
    ex.anchor1 = std::string(trim(s.substr(0, t1)));
    ex.anchor2 = std::string(trim(s.substr(t1 + 1, t2 - t1 - 1)));
    ex.reply = std::string(trim(s.substr(t2 + 1)));
    if (ex.anchor1.empty() || ex.anchor2.empty() || ex.reply.empty()) {
      throw ParseError("exemplar line " + std::to_string(lineno) +
                       ": empty field");
    }
    set.exemplars.push_back(std::move(ex));
  }
  if (set.exemplars.empty()) throw Error("exemplar file is empty: " + path);
  return set;
}

HttpLlmClient::HttpLlmClient(std::string url) : url_(std::move(url)) {}

std::string HttpLlmClient::generate(const LlmRequest& req) {
  size_t scheme_end = url_.find("://");
  if (scheme_end == std::string::npos) {
    throw ProviderError("bad endpoint url: " + url_);
  }
  size_t path_start = url_.find('/', scheme_end + 3);
  std::string host =
      path_start == std::string::npos ? url_ : url_.substr(0, path_start);
  std::string path =
      path_start == std::string::npos ? "/" : url_.substr(path_start);

  nlohmann::json body;
  body["system"] = req.system;
  body["exemplars"] = nlohmann::json::array();
  for (const auto& ex : req.exemplars) {
    body["exemplars"].push_back(
        {{"anchors", {ex.anchor1, ex.anchor2}}, {"reply", ex.reply}});
  }
  body["anchors"] = {req.anchors[0], req.anchors[1]};
  body["kind"] = std::string(query_kind_name(req.kind));

  httplib::Client client(host);
  client.set_read_timeout(60, 0);
  auto res = client.Post(path, body.dump(), "application/json");
  if (!res) {
    throw ProviderError("verbalization endpoint unreachable: " + url_);
  }
  if (res->status != 200) {
    throw ProviderError("verbalization endpoint returned status " +
                        std::to_string(res->status));
  }
  nlohmann::json parsed = nlohmann::json::parse(res->body, nullptr, false);
  if (parsed.is_discarded() || !parsed.contains("text") ||
      !parsed["text"].is_string()) {
    throw ProviderError("verbalization endpoint sent malformed response");
  }
  return parsed["text"].get<std::string>();
}

ReplayLlmClient::ReplayLlmClient(std::vector<std::string> responses)
    : responses_(std::move(responses)) {}

std::string ReplayLlmClient::generate(const LlmRequest& req) {
  std::lock_guard<std::mutex> lock(mu_);
  requests_.push_back(req);
  if (next_ >= responses_.size()) {
    throw ProviderError("replay client exhausted after " +
                        std::to_string(responses_.size()) + " responses");
  }
  return responses_[next_++];
}

std::string_view llm_outcome_name(LlmOutcome o) {
  switch (o) {
    case LlmOutcome::kAccepted: return "accepted";
    case LlmOutcome::kNa: return "na";
    case LlmOutcome::kInvalid: return "invalid";
  }
  throw Error("unknown outcome");
}

namespace {

std::optional<std::string> tag_span(const std::string& text,
                                    std::string_view open,
                                    std::string_view close) {
  size_t b = text.find(open);
  if (b == std::string::npos) return std::nullopt;
  size_t s = b + open.size();
  size_t e = text.find(close, s);
  if (e == std::string::npos) return std::nullopt;
  return text.substr(s, e - s);
}

std::string strip_all(std::string text, std::string_view needle) {
  size_t pos = 0;
  while ((pos = text.find(needle, pos)) != std::string::npos) {
    text.erase(pos, needle.size());
  }
  return text;
}

}  // namespace

LlmContext verbalize_context_llm(const KnowledgeGraph& g, const QueryInstance& q,
                                 const NameAssignment& names, LlmClient& client,
                                 const LlmPromptSet& prompts) {
  bool negated = q.kind == QueryKind::TwoINeg;
  if (q.kind != QueryKind::TwoI && q.kind != QueryKind::IP &&
      q.kind != QueryKind::PI && !negated) {
    throw Error(std::string("no narrative prompt for kind ") +
                std::string(query_kind_name(q.kind)));
  }

  std::string a1 = substitute_names(g.node_text(q.anchors.at(0)), names);
  std::string a2 = substitute_names(g.node_text(q.anchors.at(1)), names);

  LlmRequest req;
  req.system = negated ? prompts.system_negation : prompts.system_intersection;
  req.exemplars = prompts.exemplars;
  req.anchors = {a1, a2};  // event 2 is sent plain; the model negates it
  req.kind = q.kind;

  LlmContext out;
  out.raw = client.generate(req);

  std::string body(trim(out.raw));
  if (body == "NA") {
    out.outcome = LlmOutcome::kNa;
    return out;
  }
  auto span1 = tag_span(body, "<E1>", "</E1>");
  auto span2 = tag_span(body, "<E2>", "</E2>");
  std::string want2 = negated ? negate_event(a2) : a2;
  if (!span1 || !span2 || *span1 != a1 || *span2 != want2) {
    out.outcome = LlmOutcome::kInvalid;
    return out;
  }
  out.outcome = LlmOutcome::kAccepted;
  out.text = strip_all(strip_all(strip_all(strip_all(std::move(body), "<E1>"),
                                           "</E1>"),
                                 "<E2>"),
                       "</E2>");
  return out;
}

}  // namespace cqforge
