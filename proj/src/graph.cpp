#include "cqforge/graph.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "cqforge/error.hpp"
#include "cqforge/text.hpp"

namespace cqforge {

namespace {

// Splits on single tab characters; fields keep interior whitespace.
std::vector<std::string_view> split_tabs(std::string_view line) {
  std::vector<std::string_view> fields;
  size_t start = 0;
  while (true) {
    size_t tab = line.find('\t', start);
    if (tab == std::string_view::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, tab - start));
    start = tab + 1;
  }
}

}  // namespace

std::optional<RawTriple> parse_triple_line(std::string_view line, size_t lineno) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  std::string_view trimmed = trim(line);
  if (trimmed.empty() || trimmed.front() == '#') return std::nullopt;

  auto fields = split_tabs(line);
  if (fields.size() < 3 || fields.size() > 4) {
    throw ParseError("line " + std::to_string(lineno) + ": expected 3 or 4 tab-separated fields, got " +
                     std::to_string(fields.size()));
  }
  RawTriple t;
  t.head = std::string(trim(fields[0]));
  t.tail = std::string(trim(fields[2]));
  if (t.head.empty() || t.tail.empty()) {
    throw ParseError("line " + std::to_string(lineno) + ": empty head or tail text");
  }
  auto rel = parse_relation(trim(fields[1]));
  if (!rel) {
    throw ParseError("line " + std::to_string(lineno) + ": unknown relation '" +
                     std::string(trim(fields[1])) + "'");
  }
  t.rel = *rel;
  if (fields.size() == 4) {
    double score;
    if (!parse_double(fields[3], score)) {
      throw ParseError("line " + std::to_string(lineno) + ": malformed score '" +
                       std::string(fields[3]) + "'");
    }
    if (score < 0.0 || score > 1.0) {
      throw ParseError("line " + std::to_string(lineno) + ": score " +
                       format_double(score) + " outside [0,1]");
    }
    t.plausibility = score;
  }
  return t;
}

KnowledgeGraph KnowledgeGraph::from_records(const std::vector<RawTriple>& records) {
  KnowledgeGraph g;
  auto intern = [&g](const std::string& text) -> NodeId {
    auto it = g.text_to_id_.find(text);
    if (it != g.text_to_id_.end()) return it->second;
    NodeId id = static_cast<NodeId>(g.texts_.size());
    g.texts_.push_back(text);
    g.text_to_id_.emplace(text, id);
    return id;
  };

  std::set<std::tuple<NodeId, Relation, NodeId>> seen;
  for (const RawTriple& r : records) {
    std::string head(trim(r.head));
    std::string tail(trim(r.tail));
    if (head.empty() || tail.empty()) {
      throw ParseError("record with empty head or tail text");
    }
    NodeId h = intern(head);
    NodeId t = intern(tail);
    if (!seen.emplace(h, r.rel, t).second) continue;
    g.triples_.push_back({h, r.rel, t, r.plausibility});
  }
  g.build_indices();
  return g;
}

KnowledgeGraph KnowledgeGraph::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open triple file: " + path);
  std::vector<RawTriple> records;
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto t = parse_triple_line(line, lineno)) records.push_back(std::move(*t));
  }
  return from_records(records);
}

void KnowledgeGraph::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw Error("cannot write triple file: " + path);
  for (const StoredTriple& t : triples_) {
    out << texts_[t.head] << '\t' << relation_name(t.rel) << '\t'
        << texts_[t.tail] << '\t' << format_double(t.plausibility) << '\n';
  }
  if (!out) throw Error("write failed: " + path);
}

void KnowledgeGraph::build_indices() {
  std::sort(triples_.begin(), triples_.end(),
            [](const StoredTriple& a, const StoredTriple& b) {
              if (a.head != b.head) return a.head < b.head;
              if (a.rel != b.rel) return a.rel < b.rel;
              return a.tail < b.tail;
            });

  const size_t n = texts_.size();
  out_offsets_.assign(n + 1, 0);
  in_offsets_.assign(n + 1, 0);
  for (const StoredTriple& t : triples_) {
    ++out_offsets_[t.head + 1];
    ++in_offsets_[t.tail + 1];
  }
  for (size_t i = 1; i <= n; ++i) {
    out_offsets_[i] += out_offsets_[i - 1];
    in_offsets_[i] += in_offsets_[i - 1];
  }

  out_edges_.resize(triples_.size());
  {
    std::vector<size_t> cursor(out_offsets_.begin(), out_offsets_.end() - 1);
    for (const StoredTriple& t : triples_) {
      out_edges_[cursor[t.head]++] = {t.rel, t.tail, t.plausibility};
    }
  }

  in_edges_.resize(triples_.size());
  {
    std::vector<size_t> cursor(in_offsets_.begin(), in_offsets_.end() - 1);
    for (const StoredTriple& t : triples_) {
      in_edges_[cursor[t.tail]++] = {t.head, t.rel, t.plausibility};
    }
    for (size_t i = 0; i < n; ++i) {
      std::sort(in_edges_.begin() + static_cast<ptrdiff_t>(in_offsets_[i]),
                in_edges_.begin() + static_cast<ptrdiff_t>(in_offsets_[i + 1]),
                [](const InEdge& a, const InEdge& b) {
                  if (a.plausibility != b.plausibility)
                    return a.plausibility > b.plausibility;
                  if (a.head != b.head) return a.head < b.head;
                  return a.rel < b.rel;
                });
    }
  }

  answerable_.clear();
  for (size_t i = 0; i < n; ++i) {
    if (in_offsets_[i + 1] > in_offsets_[i])
      answerable_.push_back(static_cast<NodeId>(i));
  }
}

const std::string& KnowledgeGraph::node_text(NodeId id) const {
  check_node(id);
  return texts_[id];
}

std::optional<NodeId> KnowledgeGraph::find_node(std::string_view text) const {
  auto it = text_to_id_.find(std::string(text));
  if (it == text_to_id_.end()) return std::nullopt;
  return it->second;
}

std::span<const OutEdge> KnowledgeGraph::out_edges(NodeId id) const {
  check_node(id);
  return {out_edges_.data() + out_offsets_[id],
          out_offsets_[id + 1] - out_offsets_[id]};
}

std::span<const OutEdge> KnowledgeGraph::successors(NodeId id, Relation rel) const {
  auto all = out_edges(id);
  auto lo = std::lower_bound(all.begin(), all.end(), rel,
                             [](const OutEdge& e, Relation r) { return e.rel < r; });
  auto hi = std::upper_bound(lo, all.end(), rel,
                             [](Relation r, const OutEdge& e) { return r < e.rel; });
  return {lo, hi};
}

std::span<const InEdge> KnowledgeGraph::predecessors(NodeId id) const {
  check_node(id);
  return {in_edges_.data() + in_offsets_[id],
          in_offsets_[id + 1] - in_offsets_[id]};
}

bool KnowledgeGraph::has_edge(NodeId head, Relation rel, NodeId tail) const {
  return edge_plausibility(head, rel, tail).has_value();
}

std::optional<double> KnowledgeGraph::edge_plausibility(NodeId head, Relation rel,
                                                        NodeId tail) const {
  auto s = successors(head, rel);
  auto it = std::lower_bound(s.begin(), s.end(), tail,
                             [](const OutEdge& e, NodeId t) { return e.tail < t; });
  if (it == s.end() || it->tail != tail) return std::nullopt;
  return it->plausibility;
}

size_t KnowledgeGraph::in_degree(NodeId id) const {
  check_node(id);
  return in_offsets_[id + 1] - in_offsets_[id];
}

size_t KnowledgeGraph::out_degree(NodeId id) const {
  check_node(id);
  return out_offsets_[id + 1] - out_offsets_[id];
}

GraphStats KnowledgeGraph::stats() const {
  GraphStats s;
  s.node_count = texts_.size();
  s.triple_count = triples_.size();
  if (s.node_count > 0) {
    s.mean_degree_undirected =
        2.0 * static_cast<double>(s.triple_count) / static_cast<double>(s.node_count);
    s.mean_degree_directed =
        static_cast<double>(s.triple_count) / static_cast<double>(s.node_count);
  }
  for (const StoredTriple& t : triples_) {
    ++s.triples_per_relation[static_cast<size_t>(t.rel)];
  }
  for (size_t i = 0; i < s.node_count; ++i) {
    size_t d = degree(static_cast<NodeId>(i));
    if (d >= s.degree_histogram.size()) s.degree_histogram.resize(d + 1, 0);
    ++s.degree_histogram[d];
  }
  return s;
}

void KnowledgeGraph::check_node(NodeId id) const {
  if (id >= texts_.size()) {
    throw Error("node id " + std::to_string(id) + " out of range (graph has " +
                std::to_string(texts_.size()) + " nodes)");
  }
}

}  // namespace cqforge
