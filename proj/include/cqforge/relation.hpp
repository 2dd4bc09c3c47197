#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>

namespace cqforge {

// Closed relation vocabulary. Ordinal order is load-bearing: it breaks ties
// in samplers and orders serialized output, so it must never be reshuffled.
enum class Relation : uint8_t {
  xIntent,
  xNeed,
  xWant,
  xEffect,
  xReact,
  xAttr,
  oEffect,
  oReact,
  oWant,
  HinderedBy,
  isAfter,
  isBefore,
};

inline constexpr size_t kRelationCount = 12;

inline constexpr std::array<Relation, kRelationCount> kAllRelations = {
    Relation::xIntent, Relation::xNeed,      Relation::xWant,
    Relation::xEffect, Relation::xReact,     Relation::xAttr,
    Relation::oEffect, Relation::oReact,     Relation::oWant,
    Relation::HinderedBy, Relation::isAfter, Relation::isBefore,
};

std::string_view relation_name(Relation r);

std::optional<Relation> parse_relation(std::string_view name);

// "PersonX" for x-prefixed relations, "PersonY" for o-prefixed ones,
// nothing for the event-to-event relations.
std::string_view relation_subject(Relation r);

// Whether the tail describes the head's subject or the interaction partner
// (x*/o*) rather than a free-standing event (HinderedBy, isAfter, isBefore).
bool relation_is_social(Relation r);

}  // namespace cqforge
