#include "relcd/schema.hpp"

#include <algorithm>
#include <map>
#include <queue>
#include <random>
#include <set>

namespace relcd {

std::string to_string(Cardinality c) { return c == Cardinality::One ? "one" : "many"; }

Cardinality cardinality_from_string(const std::string& s) {
  if (s == "one") return Cardinality::One;
  if (s == "many") return Cardinality::Many;
  throw std::invalid_argument("unknown cardinality '" + s + "'");
}

Schema::Schema(std::vector<std::string> entities, std::vector<RelationshipClass> relationships,
               std::vector<AttributeClass> attributes)
    : entities_(std::move(entities)),
      relationships_(std::move(relationships)),
      attributes_(std::move(attributes)) {
  std::sort(entities_.begin(), entities_.end());
  std::sort(relationships_.begin(), relationships_.end(),
            [](const auto& a, const auto& b) { return a.id < b.id; });
  std::sort(attributes_.begin(), attributes_.end(),
            [](const auto& a, const auto& b) { return a.id < b.id; });
}

bool Schema::is_entity(const std::string& cls) const {
  return std::binary_search(entities_.begin(), entities_.end(), cls);
}

bool Schema::is_relationship(const std::string& cls) const {
  auto it = std::lower_bound(relationships_.begin(), relationships_.end(), cls,
                             [](const RelationshipClass& r, const std::string& id) { return r.id < id; });
  return it != relationships_.end() && it->id == cls;
}

bool Schema::has_attribute(const std::string& attr) const {
  auto it = std::lower_bound(attributes_.begin(), attributes_.end(), attr,
                             [](const AttributeClass& a, const std::string& id) { return a.id < id; });
  return it != attributes_.end() && it->id == attr;
}

const RelationshipClass& Schema::relationship(const std::string& id) const {
  auto it = std::lower_bound(relationships_.begin(), relationships_.end(), id,
                             [](const RelationshipClass& r, const std::string& k) { return r.id < k; });
  if (it == relationships_.end() || it->id != id) throw std::out_of_range("unknown relationship class " + id);
  return *it;
}

const std::string& Schema::owner(const std::string& attr) const {
  auto it = std::lower_bound(attributes_.begin(), attributes_.end(), attr,
                             [](const AttributeClass& a, const std::string& id) { return a.id < id; });
  if (it == attributes_.end() || it->id != attr) throw std::out_of_range("unknown attribute class " + attr);
  return it->owner;
}

std::vector<std::string> Schema::attributes_of(const std::string& item_class) const {
  std::vector<std::string> out;
  for (const auto& a : attributes_)
    if (a.owner == item_class) out.push_back(a.id);
  return out;
}

std::optional<Cardinality> Schema::participation(const std::string& entity,
                                                 const std::string& relationship) const {
  if (!is_relationship(relationship)) return std::nullopt;
  for (const auto& p : this->relationship(relationship).participants)
    if (p.entity == entity) return p.cardinality;
  return std::nullopt;
}

std::vector<std::string> Schema::neighbors(const std::string& item_class) const {
  std::set<std::string> out;
  if (is_relationship(item_class)) {
    for (const auto& p : relationship(item_class).participants) out.insert(p.entity);
  } else {
    for (const auto& r : relationships_)
      for (const auto& p : r.participants)
        if (p.entity == item_class) out.insert(r.id);
  }
  return {out.begin(), out.end()};
}

std::vector<std::string> Schema::item_classes() const {
  std::vector<std::string> out = entities_;
  for (const auto& r : relationships_) out.push_back(r.id);
  return out;
}

std::vector<std::string> validate_schema(const Schema& s) {
  std::vector<std::string> v;
  std::set<std::string> ents(s.entities().begin(), s.entities().end());
  if (ents.size() != s.entities().size()) v.push_back("duplicate entity class id");
  std::set<std::string> rels;
  for (const auto& r : s.relationships()) {
    if (!rels.insert(r.id).second) v.push_back("duplicate relationship class id " + r.id);
    if (ents.count(r.id)) v.push_back("class id " + r.id + " is both an entity and a relationship");
    if (r.participants.size() < 2) v.push_back("relationship " + r.id + " has fewer than two participants");
    std::set<std::string> seen;
    for (const auto& p : r.participants) {
      if (!ents.count(p.entity))
        v.push_back("relationship " + r.id + " references unknown entity class " + p.entity);
      if (!seen.insert(p.entity).second)
        v.push_back("relationship " + r.id + " lists entity class " + p.entity + " more than once");
    }
  }
  std::set<std::string> attrs;
  for (const auto& a : s.attributes()) {
    if (!attrs.insert(a.id).second) v.push_back("duplicate attribute class id " + a.id);
    if (!ents.count(a.owner) && !rels.count(a.owner))
      v.push_back("attribute " + a.id + " owned by unknown item class " + a.owner);
    if (ents.count(a.id) || rels.count(a.id)) v.push_back("attribute id " + a.id + " collides with an item class");
  }
  return v;
}

namespace {

bool item_graph_connected(const Schema& s) {
  auto classes = s.item_classes();
  if (classes.empty()) return false;
  std::set<std::string> seen{classes.front()};
  std::queue<std::string> q;
  q.push(classes.front());
  while (!q.empty()) {
    auto c = q.front();
    q.pop();
    for (const auto& n : s.neighbors(c))
      if (seen.insert(n).second) q.push(n);
  }
  return seen.size() == classes.size();
}

}  // namespace

Schema random_schema(std::uint64_t seed, const SchemaGenConfig& cfg) {
  std::mt19937_64 rng(seed);
  std::discrete_distribution<int> entity_count(cfg.entity_count_weights.begin(), cfg.entity_count_weights.end());
  const int n_entities = cfg.min_entities + entity_count(rng);

  std::vector<std::string> entities;
  for (int e = 0; e < n_entities; ++e) entities.push_back("E" + std::to_string(e));

  std::uniform_int_distribution<int> rel_count(cfg.min_relationships, cfg.max_relationships);
  std::uniform_int_distribution<int> ent_attrs(cfg.min_entity_attributes, cfg.max_entity_attributes);
  std::uniform_int_distribution<int> rel_attrs(0, cfg.max_relationship_attributes);
  std::bernoulli_distribution ternary(cfg.ternary_probability);
  std::bernoulli_distribution many(0.5);

  for (int attempt = 0; attempt < cfg.max_retries; ++attempt) {
    std::vector<RelationshipClass> rels;
    const int n_rels = rel_count(rng);
    for (int r = 0; r < n_rels; ++r) {
      RelationshipClass rc;
      rc.id = "R" + std::to_string(r);
      int arity = (ternary(rng) && n_entities >= 3) ? 3 : 2;
      std::vector<std::string> pool = entities;
      std::shuffle(pool.begin(), pool.end(), rng);
      pool.resize(static_cast<std::size_t>(arity));
      std::sort(pool.begin(), pool.end());
      for (auto& e : pool) rc.participants.push_back({e, many(rng) ? Cardinality::Many : Cardinality::One});
      rels.push_back(std::move(rc));
    }
    std::vector<AttributeClass> attrs;
    int next = 0;
    auto add_attrs = [&](const std::string& owner, int count) {
      for (int k = 0; k < count; ++k) attrs.push_back({"X" + std::to_string(next++), owner});
    };
    for (const auto& e : entities) add_attrs(e, ent_attrs(rng));
    for (const auto& r : rels) add_attrs(r.id, rel_attrs(rng));

    if (static_cast<int>(attrs.size()) > cfg.max_total_attributes) continue;
    Schema s(entities, std::move(rels), std::move(attrs));
    if (!item_graph_connected(s)) continue;
    return s;
  }
  throw GenerationExhausted("random_schema: no admissible schema after " + std::to_string(cfg.max_retries) +
                            " attempts");
}

}  // namespace relcd
