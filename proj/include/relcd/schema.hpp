#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace relcd {

/// Raised when a random generator gives up after its retry budget.
class GenerationExhausted : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Cardinality { One, Many };

std::string to_string(Cardinality c);
Cardinality cardinality_from_string(const std::string& s);

struct Participant {
  std::string entity;
  Cardinality cardinality = Cardinality::Many;

  bool operator==(const Participant&) const = default;
};

struct RelationshipClass {
  std::string id;
  std::vector<Participant> participants;

  bool operator==(const RelationshipClass&) const = default;
};

struct AttributeClass {
  std::string id;
  std::string owner;

  bool operator==(const AttributeClass&) const = default;
};

/// Entity, relationship and attribute classes with cardinality constraints.
///
/// All class lists are kept sorted by id, so equality is structural and
/// iteration order never depends on insertion order.
class Schema {
 public:
  Schema() = default;
  Schema(std::vector<std::string> entities, std::vector<RelationshipClass> relationships,
         std::vector<AttributeClass> attributes);

  const std::vector<std::string>& entities() const { return entities_; }
  const std::vector<RelationshipClass>& relationships() const { return relationships_; }
  const std::vector<AttributeClass>& attributes() const { return attributes_; }

  bool is_entity(const std::string& cls) const;
  bool is_relationship(const std::string& cls) const;
  bool is_item_class(const std::string& cls) const { return is_entity(cls) || is_relationship(cls); }
  bool has_attribute(const std::string& attr) const;

  const RelationshipClass& relationship(const std::string& id) const;
  /// Owning item class of an attribute. Throws std::out_of_range if unknown.
  const std::string& owner(const std::string& attr) const;
  std::vector<std::string> attributes_of(const std::string& item_class) const;

  /// Cardinality with which `entity` participates in `relationship`, if it does.
  std::optional<Cardinality> participation(const std::string& entity,
                                           const std::string& relationship) const;
  /// Item classes one participation hop away, sorted.
  std::vector<std::string> neighbors(const std::string& item_class) const;
  /// All item classes (entities then relationships), each list sorted.
  std::vector<std::string> item_classes() const;

  bool operator==(const Schema&) const = default;

 private:
  std::vector<std::string> entities_;
  std::vector<RelationshipClass> relationships_;
  std::vector<AttributeClass> attributes_;
};

/// Every violated invariant as a human-readable line; empty means valid.
std::vector<std::string> validate_schema(const Schema& s);

struct SchemaGenConfig {
  std::vector<double> entity_count_weights = {0.5, 0.25, 0.25};  // for 3, 4, 5 entities
  int min_entities = 3;
  int min_relationships = 2;
  int max_relationships = 5;
  double ternary_probability = 0.25;
  int min_entity_attributes = 1;
  int max_entity_attributes = 3;
  int max_relationship_attributes = 1;
  int max_total_attributes = 8;
  int max_retries = 1000;
};

/// Random schema following the benchmark protocol. The entity count is drawn
/// once; the rest is redrawn until the connectivity and attribute-budget
/// rules hold.
Schema random_schema(std::uint64_t seed, const SchemaGenConfig& cfg = {});

}  // namespace relcd
