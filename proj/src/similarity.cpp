#include "cqforge/similarity.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

#include "httplib.h"
#include "json.hpp"

#include "cqforge/error.hpp"
#include "cqforge/text.hpp"

namespace cqforge {

void SimilarityProvider::prime(std::span<const std::string>) {}

bool SimilarityProvider::covers(const std::string&) const { return true; }

double TokenJaccardSimilarity::similarity(const std::string& a, const std::string& b) {
  auto ta = tokenize(a);
  auto tb = tokenize(b);
  std::set<std::string> sa(ta.begin(), ta.end());
  std::set<std::string> sb(tb.begin(), tb.end());
  if (sa.empty() && sb.empty()) return 1.0;
  if (sa.empty() || sb.empty()) return 0.0;
  size_t inter = 0;
  for (const auto& t : sa) inter += sb.count(t);
  size_t uni = sa.size() + sb.size() - inter;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

double ExactMatchSimilarity::similarity(const std::string& a, const std::string& b) {
  return a == b ? 1.0 : 0.0;
}

double cosine_similarity(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw ProviderError("embedding dimension mismatch: " + std::to_string(a.size()) +
                        " vs " + std::to_string(b.size()));
  }
  double dot = 0, na = 0, nb = 0;
  for (size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 || nb == 0.0) {
    throw ProviderError("zero-norm embedding vector");
  }
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

FileEmbeddingSimilarity::FileEmbeddingSimilarity(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ProviderError("cannot open embedding file: " + path);
  std::string line;
  size_t lineno = 0;
  size_t dim = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty() || line[0] == '#') continue;
    size_t tab = line.find('\t');
    if (tab == std::string::npos) {
      throw ProviderError("embedding file line " + std::to_string(lineno) +
                          ": missing tab separator");
    }
    std::string text = line.substr(0, tab);
    std::vector<double> vec;
    std::string_view rest = std::string_view(line).substr(tab + 1);
    size_t start = 0;
    while (start <= rest.size()) {
      size_t comma = rest.find(',', start);
      auto field = comma == std::string_view::npos ? rest.substr(start)
                                                   : rest.substr(start, comma - start);
      double v;
      if (!parse_double(field, v)) {
        throw ProviderError("embedding file line " + std::to_string(lineno) +
                            ": malformed float '" + std::string(field) + "'");
      }
      vec.push_back(v);
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    if (dim == 0) dim = vec.size();
    if (vec.size() != dim) {
      throw ProviderError("embedding file line " + std::to_string(lineno) +
                          ": dimension " + std::to_string(vec.size()) +
                          " differs from " + std::to_string(dim));
    }
    double norm = 0;
    for (double v : vec) norm += v * v;
    if (norm == 0.0) {
      throw ProviderError("embedding file line " + std::to_string(lineno) +
                          ": zero-norm vector for '" + text + "'");
    }
    table_[text] = std::move(vec);
  }
}

bool FileEmbeddingSimilarity::covers(const std::string& text) const {
  return table_.count(text) > 0;
}

const std::vector<double>& FileEmbeddingSimilarity::vector_for(
    const std::string& text) const {
  auto it = table_.find(text);
  if (it == table_.end()) {
    throw ProviderError("no embedding for text: '" + text + "'");
  }
  return it->second;
}

double FileEmbeddingSimilarity::similarity(const std::string& a, const std::string& b) {
  return cosine_similarity(vector_for(a), vector_for(b));
}

HttpEmbeddingSimilarity::HttpEmbeddingSimilarity(std::string url) : url_(std::move(url)) {}

void HttpEmbeddingSimilarity::prime(std::span<const std::string> texts) {
  std::vector<std::string> missing;
  for (const auto& t : texts) {
    if (!cache_.count(t)) missing.push_back(t);
  }
  if (!missing.empty()) fetch(missing);
}

void HttpEmbeddingSimilarity::fetch(const std::vector<std::string>& texts) {
  auto scheme_end = url_.find("://");
  if (scheme_end == std::string::npos) {
    throw ProviderError("embedding endpoint url must include scheme: " + url_);
  }
  auto path_start = url_.find('/', scheme_end + 3);
  std::string host = path_start == std::string::npos ? url_ : url_.substr(0, path_start);
  std::string path = path_start == std::string::npos ? "/" : url_.substr(path_start);

  nlohmann::json req;
  req["texts"] = texts;
  httplib::Client client(host);
  client.set_read_timeout(30, 0);
  auto res = client.Post(path, req.dump(), "application/json");
  if (!res) {
    throw ProviderError("embedding endpoint unreachable: " + url_);
  }
  if (res->status != 200) {
    throw ProviderError("embedding endpoint returned status " +
                        std::to_string(res->status));
  }
  nlohmann::json body = nlohmann::json::parse(res->body, nullptr, false);
  if (body.is_discarded() || !body.contains("vectors") || !body["vectors"].is_array()) {
    throw ProviderError("embedding endpoint returned malformed body");
  }
  const auto& vectors = body["vectors"];
  if (vectors.size() != texts.size()) {
    throw ProviderError("embedding endpoint returned " + std::to_string(vectors.size()) +
                        " vectors for " + std::to_string(texts.size()) + " texts");
  }
  for (size_t i = 0; i < texts.size(); ++i) {
    std::vector<double> vec;
    for (const auto& v : vectors[i]) {
      if (!v.is_number()) throw ProviderError("non-numeric embedding component");
      vec.push_back(v.get<double>());
    }
    cache_[texts[i]] = std::move(vec);
  }
}

bool HttpEmbeddingSimilarity::covers(const std::string& text) const {
  return cache_.count(text) > 0;
}

double HttpEmbeddingSimilarity::similarity(const std::string& a, const std::string& b) {
  if (!cache_.count(a)) fetch({a});
  if (!cache_.count(b)) fetch({b});
  return cosine_similarity(cache_.at(a), cache_.at(b));
}

}  // namespace cqforge
