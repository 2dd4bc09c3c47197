#pragma once

#include <memory>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace cqforge {

// Text pair similarity in [0,1]. Implementations must be symmetric and give
// similarity(x, x) = 1 within 1e-6.
class SimilarityProvider {
 public:
  virtual ~SimilarityProvider() = default;

  // Batch warm-up with every text the caller will ask about. Embedding
  // providers fetch vectors here; the default is a no-op.
  virtual void prime(std::span<const std::string> texts);

  // Whether the provider can score this text at all. Texts it cannot cover
  // are either skipped or reported as errors by the caller.
  virtual bool covers(const std::string& text) const;

  virtual double similarity(const std::string& a, const std::string& b) = 0;
};

// Deterministic offline stub: Jaccard overlap of lowercased alphanumeric
// token sets, so "PersonX buys a ticket" and "PersonX buys a ticket ." score
// exactly 1.
class TokenJaccardSimilarity : public SimilarityProvider {
 public:
  double similarity(const std::string& a, const std::string& b) override;
};

// 1 iff the strings are equal. Injective, so no two distinct live nodes can
// ever reach a merge threshold; used to disable merging semantically.
class ExactMatchSimilarity : public SimilarityProvider {
 public:
  double similarity(const std::string& a, const std::string& b) override;
};

// Precomputed embedding table: one `text<TAB>comma-separated floats` row per
// line. All vectors must share one dimension and have nonzero norm.
class FileEmbeddingSimilarity : public SimilarityProvider {
 public:
  explicit FileEmbeddingSimilarity(const std::string& path);

  bool covers(const std::string& text) const override;
  double similarity(const std::string& a, const std::string& b) override;

 private:
  const std::vector<double>& vector_for(const std::string& text) const;
  std::unordered_map<std::string, std::vector<double>> table_;
};

// Remote embedding endpoint. prime() POSTs {"texts": [...]} and expects
// {"vectors": [[...], ...]} of equal length; similarities are computed from
// the cached vectors.
class HttpEmbeddingSimilarity : public SimilarityProvider {
 public:
  // url like "http://host:port/embed"
  explicit HttpEmbeddingSimilarity(std::string url);

  void prime(std::span<const std::string> texts) override;
  bool covers(const std::string& text) const override;
  double similarity(const std::string& a, const std::string& b) override;

 private:
  void fetch(const std::vector<std::string>& texts);
  std::string url_;
  std::unordered_map<std::string, std::vector<double>> cache_;
};

double cosine_similarity(std::span<const double> a, std::span<const double> b);

}  // namespace cqforge
