#include "cqforge/stopwords.hpp"

#include <fstream>

#include "cqforge/error.hpp"
#include "cqforge/text.hpp"

namespace cqforge {

const std::set<std::string>& builtin_stopwords() {
  static const std::set<std::string> kWords = {
      "a",    "about", "after",  "again", "all",   "also",  "an",    "and",
      "any",  "are",   "as",     "at",    "be",    "been",  "being", "before",
      "but",  "by",    "can",    "could", "did",   "do",    "does",  "doing",
      "down", "for",   "from",   "had",   "has",   "have",  "having","he",
      "her",  "hers",  "him",    "his",   "how",   "i",     "if",    "in",
      "into", "is",    "it",     "its",   "just",  "may",   "me",    "might",
      "more", "most",  "must",   "my",    "no",    "not",   "now",   "of",
      "off",  "on",    "once",   "only",  "or",    "other", "our",   "out",
      "over", "own",   "shall",  "she",   "should","so",    "some",  "such",
      "than", "that",  "the",    "their", "them",  "then",  "there", "these",
      "they", "this",  "those",  "to",    "too",   "under", "until", "up",
      "very", "was",   "we",     "were",  "what",  "when",  "where", "which",
      "while","who",   "whom",   "why",   "will",  "with",  "would", "you",
      "your",
  };
  return kWords;
}

std::set<std::string> load_stopwords(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open stopword file: " + path);
  std::set<std::string> words;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    auto t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    words.insert(to_lower(t));
  }
  return words;
}

std::set<std::string> content_tokens(std::string_view text,
                                     const std::set<std::string>& stopwords) {
  std::set<std::string> out;
  for (auto& tok : tokenize(text)) {
    if (tok == "personx" || tok == "persony" || tok == "personz") continue;
    if (stopwords.count(tok)) continue;
    out.insert(std::move(tok));
  }
  return out;
}

}  // namespace cqforge
