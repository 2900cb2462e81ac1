#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "relcd/path.hpp"
#include "relcd/schema.hpp"

namespace relcd {

using ItemIndex = std::int32_t;

struct Item {
  std::string id;
  std::string cls;
};

/// A concrete instantiation of a schema: entity items, relationship items and
/// the participation edges between them.
///
/// Items are re-indexed in sorted-id order when the skeleton is built, so
/// indices (and everything derived from them) do not depend on the order in
/// which items were added.
class Skeleton {
 public:
  class Builder {
   public:
    explicit Builder(Schema schema) : schema_(std::move(schema)) {}
    Builder& add_entity(std::string id, std::string cls);
    /// Participants are item ids listed in the relationship class's slot order.
    Builder& add_relationship(std::string id, std::string cls, std::vector<std::string> participants);
    /// Throws std::invalid_argument on duplicate ids, unknown classes or
    /// dangling participant references. Cardinality is not checked here; see
    /// validate_skeleton.
    Skeleton build() &&;

   private:
    Schema schema_;
    std::vector<Item> items_;
    std::vector<std::vector<std::string>> participants_;
  };

  Skeleton() = default;

  const Schema& schema() const { return schema_; }
  std::size_t size() const { return items_.size(); }
  const Item& item(ItemIndex i) const { return items_[static_cast<std::size_t>(i)]; }
  const std::string& id(ItemIndex i) const { return item(i).id; }
  int class_index(ItemIndex i) const { return item_class_[static_cast<std::size_t>(i)]; }
  std::optional<ItemIndex> find(const std::string& id) const;
  ItemIndex at(const std::string& id) const;

  /// Items of a class in sorted-id order (empty for unknown classes).
  const std::vector<ItemIndex>& items_of(const std::string& cls) const;
  /// Adjacent items across participation edges, sorted.
  const std::vector<ItemIndex>& neighbors(ItemIndex i) const { return adjacency_[static_cast<std::size_t>(i)]; }
  /// Participant items of a relationship item, in slot order.
  const std::vector<ItemIndex>& participants(ItemIndex rel) const {
    return participants_[static_cast<std::size_t>(rel)];
  }

  /// Integer id of an item class (position in schema().item_classes()), -1 if unknown.
  int class_id(const std::string& cls) const;

 private:
  Schema schema_;
  std::vector<Item> items_;
  std::vector<int> item_class_;
  std::vector<std::vector<ItemIndex>> adjacency_;
  std::vector<std::vector<ItemIndex>> participants_;
  std::unordered_map<std::string, ItemIndex> by_id_;
  std::vector<std::string> class_names_;
  std::vector<std::vector<ItemIndex>> by_class_;
};

/// Every invariant violation (slot mismatch, repeated participants,
/// cardinality overflow); empty means valid.
std::vector<std::string> validate_skeleton(const Schema& s, const Skeleton& sk);

/// Items of the path's terminal class reachable from `base` along an
/// instance of `path` whose items are pairwise distinct. Sorted, no repeats.
/// Throws std::invalid_argument if `base` is not of the path's base class.
std::vector<ItemIndex> terminal_set(const Skeleton& sk, const RelationalPath& path, ItemIndex base);

/// Caches terminal sets keyed by (path, base item). Not thread-safe; use one
/// per thread.
class TerminalSetCache {
 public:
  explicit TerminalSetCache(const Skeleton& sk) : sk_(&sk) {}
  const std::vector<ItemIndex>& get(const RelationalPath& path, ItemIndex base);
  const Skeleton& skeleton() const { return *sk_; }

 private:
  const Skeleton* sk_;
  std::map<RelationalPath, std::vector<std::vector<ItemIndex>>> cache_;
};

/// Per-item attribute values, indexed by the skeleton's item indices.
class AttrData {
 public:
  AttrData() = default;
  explicit AttrData(const Skeleton& sk);

  double get(ItemIndex item, const std::string& attr) const;
  void set(ItemIndex item, const std::string& attr, double value);
  const std::vector<double>& column(const std::string& attr) const;
  std::vector<std::string> attributes() const;
  bool operator==(const AttrData& o) const;

 private:
  std::map<std::string, std::vector<double>> values_;
};

struct SkeletonGenConfig {
  int max_retries = 1000;
};

/// Random skeleton with base size n: 2n items per all-MANY relationship
/// class, n otherwise; floor(1.2^k n) entities per entity class where k
/// counts incident all-ONE relationship classes.
Skeleton random_skeleton(const Schema& s, int n, std::uint64_t seed, const SkeletonGenConfig& cfg = {});

/// Number of items random_skeleton creates for an item class.
int skeleton_class_size(const Schema& s, const std::string& cls, int n);

}  // namespace relcd
