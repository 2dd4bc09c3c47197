#include "cqforge/relation.hpp"

namespace cqforge {

namespace {

constexpr std::array<std::string_view, kRelationCount> kNames = {
    "xIntent", "xNeed", "xWant",      "xEffect", "xReact",  "xAttr",
    "oEffect", "oReact", "oWant", "HinderedBy", "isAfter", "isBefore",
};

}  // namespace

std::string_view relation_name(Relation r) {
  return kNames[static_cast<size_t>(r)];
}

std::optional<Relation> parse_relation(std::string_view name) {
  for (size_t i = 0; i < kRelationCount; ++i) {
    if (kNames[i] == name) return static_cast<Relation>(i);
  }
  return std::nullopt;
}

std::string_view relation_subject(Relation r) {
  switch (r) {
    case Relation::xIntent:
    case Relation::xNeed:
    case Relation::xWant:
    case Relation::xEffect:
    case Relation::xReact:
    case Relation::xAttr:
      return "PersonX";
    case Relation::oEffect:
    case Relation::oReact:
    case Relation::oWant:
      return "PersonY";
    default:
      return {};
  }
}

bool relation_is_social(Relation r) {
  return !relation_subject(r).empty();
}

}  // namespace cqforge
