#pragma once

#include <stdexcept>
#include <string>

namespace cqforge {

// Base error for all pipeline failures.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Malformed input file (carries a line number in the message).
class ParseError : public Error {
 public:
  using Error::Error;
};

// A similarity / plausibility / LLM provider failed (I/O, missing key,
// transport, malformed response).
class ProviderError : public Error {
 public:
  using Error::Error;
};

// The graph cannot supply the required number of valid distractors.
class DistractorShortage : public Error {
 public:
  using Error::Error;
};

}  // namespace cqforge
