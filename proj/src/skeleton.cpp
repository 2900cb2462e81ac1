#include "relcd/skeleton.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <random>
#include <set>
#include <stdexcept>

namespace relcd {

std::string RelationalPath::to_string() const {
  std::string s = "[";
  for (std::size_t k = 0; k < classes.size(); ++k) {
    if (k) s += ",";
    s += classes[k];
  }
  return s + "]";
}

std::strong_ordering RelationalPath::operator<=>(const RelationalPath& o) const {
  if (auto c = classes.size() <=> o.classes.size(); c != 0) return c;
  return classes <=> o.classes;
}

Skeleton::Builder& Skeleton::Builder::add_entity(std::string id, std::string cls) {
  items_.push_back({std::move(id), std::move(cls)});
  participants_.emplace_back();
  return *this;
}

Skeleton::Builder& Skeleton::Builder::add_relationship(std::string id, std::string cls,
                                                       std::vector<std::string> participants) {
  items_.push_back({std::move(id), std::move(cls)});
  participants_.push_back(std::move(participants));
  return *this;
}

Skeleton Skeleton::Builder::build() && {
  Skeleton sk;
  sk.schema_ = std::move(schema_);
  sk.class_names_ = sk.schema_.item_classes();
  sk.by_class_.resize(sk.class_names_.size());

  std::vector<std::size_t> order(items_.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return items_[a].id < items_[b].id; });

  const auto n = items_.size();
  sk.items_.reserve(n);
  sk.item_class_.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    const Item& it = items_[order[k]];
    if (!sk.by_id_.emplace(it.id, static_cast<ItemIndex>(k)).second)
      throw std::invalid_argument("duplicate item id " + it.id);
    int cid = sk.class_id(it.cls);
    if (cid < 0) throw std::invalid_argument("item " + it.id + " has unknown class " + it.cls);
    const bool is_rel = sk.schema_.is_relationship(it.cls);
    if (!is_rel && !participants_[order[k]].empty())
      throw std::invalid_argument("entity item " + it.id + " cannot list participants");
    sk.items_.push_back(it);
    sk.item_class_.push_back(cid);
    sk.by_class_[static_cast<std::size_t>(cid)].push_back(static_cast<ItemIndex>(k));
  }
  sk.adjacency_.assign(n, {});
  sk.participants_.assign(n, {});
  for (std::size_t k = 0; k < n; ++k) {
    for (const auto& pid : participants_[order[k]]) {
      auto it = sk.by_id_.find(pid);
      if (it == sk.by_id_.end())
        throw std::invalid_argument("relationship " + sk.items_[k].id + " references unknown item " + pid);
      if (!sk.schema_.is_entity(sk.items_[static_cast<std::size_t>(it->second)].cls))
        throw std::invalid_argument("relationship " + sk.items_[k].id + " references non-entity item " + pid);
      sk.participants_[k].push_back(it->second);
      sk.adjacency_[k].push_back(it->second);
      sk.adjacency_[static_cast<std::size_t>(it->second)].push_back(static_cast<ItemIndex>(k));
    }
  }
  for (auto& adj : sk.adjacency_) {
    std::sort(adj.begin(), adj.end());
    adj.erase(std::unique(adj.begin(), adj.end()), adj.end());
  }
  return sk;
}

std::optional<ItemIndex> Skeleton::find(const std::string& id) const {
  auto it = by_id_.find(id);
  if (it == by_id_.end()) return std::nullopt;
  return it->second;
}

ItemIndex Skeleton::at(const std::string& id) const {
  auto it = by_id_.find(id);
  if (it == by_id_.end()) throw std::out_of_range("unknown item id " + id);
  return it->second;
}

int Skeleton::class_id(const std::string& cls) const {
  auto it = std::find(class_names_.begin(), class_names_.end(), cls);
  return it == class_names_.end() ? -1 : static_cast<int>(it - class_names_.begin());
}

const std::vector<ItemIndex>& Skeleton::items_of(const std::string& cls) const {
  static const std::vector<ItemIndex> empty;
  int cid = class_id(cls);
  return cid < 0 ? empty : by_class_[static_cast<std::size_t>(cid)];
}

std::vector<std::string> validate_skeleton(const Schema& s, const Skeleton& sk) {
  std::vector<std::string> v;
  if (!(s == sk.schema())) v.push_back("skeleton was built against a different schema");
  // (entity item, relationship class) -> number of attached relationship items
  std::map<std::pair<ItemIndex, std::string>, int> load;
  for (ItemIndex i = 0; i < static_cast<ItemIndex>(sk.size()); ++i) {
    const Item& it = sk.item(i);
    if (!s.is_relationship(it.cls)) continue;
    const auto& slots = s.relationship(it.cls).participants;
    const auto& parts = sk.participants(i);
    if (parts.size() != slots.size()) {
      v.push_back("relationship item " + it.id + " has " + std::to_string(parts.size()) + " participants, class " +
                  it.cls + " declares " + std::to_string(slots.size()));
      continue;
    }
    std::set<ItemIndex> distinct(parts.begin(), parts.end());
    if (distinct.size() != parts.size()) v.push_back("relationship item " + it.id + " repeats a participant");
    for (std::size_t k = 0; k < slots.size(); ++k) {
      const Item& p = sk.item(parts[k]);
      if (p.cls != slots[k].entity)
        v.push_back("relationship item " + it.id + " slot " + std::to_string(k) + " expects " + slots[k].entity +
                    ", got " + p.id + " of class " + p.cls);
      ++load[{parts[k], it.cls}];
    }
  }
  for (const auto& [key, count] : load) {
    const auto& [entity, rel] = key;
    auto card = s.participation(sk.item(entity).cls, rel);
    if (card == Cardinality::One && count > 1)
      v.push_back("cardinality violation: " + sk.id(entity) + " participates in " + std::to_string(count) +
                  " items of " + rel + " (cardinality one)");
  }
  return v;
}

namespace {

struct PathWalker {
  const Skeleton& sk;
  std::vector<int> cls;
  std::vector<ItemIndex> stack;
  std::vector<ItemIndex> out;

  void walk(std::size_t depth) {
    const ItemIndex cur = stack.back();
    if (depth + 1 == cls.size()) {
      out.push_back(cur);
      return;
    }
    const int want = cls[depth + 1];
    for (ItemIndex nb : sk.neighbors(cur)) {
      if (sk.class_index(nb) != want) continue;
      if (std::find(stack.begin(), stack.end(), nb) != stack.end()) continue;
      stack.push_back(nb);
      walk(depth + 1);
      stack.pop_back();
    }
  }
};

}  // namespace

std::vector<ItemIndex> terminal_set(const Skeleton& sk, const RelationalPath& path, ItemIndex base) {
  if (path.classes.empty()) throw std::invalid_argument("terminal_set: empty path");
  if (sk.item(base).cls != path.base())
    throw std::invalid_argument("terminal_set: item " + sk.id(base) + " is not of base class " + path.base());
  PathWalker w{sk, {}, {base}, {}};
  w.cls.reserve(path.classes.size());
  for (const auto& c : path.classes) {
    int id = sk.class_id(c);
    if (id < 0) return {};
    w.cls.push_back(id);
  }
  w.walk(0);
  std::sort(w.out.begin(), w.out.end());
  w.out.erase(std::unique(w.out.begin(), w.out.end()), w.out.end());
  return w.out;
}

const std::vector<ItemIndex>& TerminalSetCache::get(const RelationalPath& path, ItemIndex base) {
  auto& per_item = cache_[path];
  if (per_item.empty()) {
    per_item.resize(sk_->size());
    for (ItemIndex i : sk_->items_of(path.base())) per_item[static_cast<std::size_t>(i)] = terminal_set(*sk_, path, i);
  }
  return per_item[static_cast<std::size_t>(base)];
}

AttrData::AttrData(const Skeleton& sk) {
  for (const auto& a : sk.schema().attributes())
    values_[a.id].assign(sk.size(), std::numeric_limits<double>::quiet_NaN());
}

double AttrData::get(ItemIndex item, const std::string& attr) const {
  return column(attr)[static_cast<std::size_t>(item)];
}

void AttrData::set(ItemIndex item, const std::string& attr, double value) {
  auto it = values_.find(attr);
  if (it == values_.end()) throw std::out_of_range("unknown attribute " + attr);
  it->second.at(static_cast<std::size_t>(item)) = value;
}

const std::vector<double>& AttrData::column(const std::string& attr) const {
  auto it = values_.find(attr);
  if (it == values_.end()) throw std::out_of_range("unknown attribute " + attr);
  return it->second;
}

std::vector<std::string> AttrData::attributes() const {
  std::vector<std::string> out;
  for (const auto& [k, _] : values_) out.push_back(k);
  return out;
}

bool AttrData::operator==(const AttrData& o) const {
  if (values_.size() != o.values_.size()) return false;
  for (const auto& [k, col] : values_) {
    auto it = o.values_.find(k);
    if (it == o.values_.end() || it->second.size() != col.size()) return false;
    for (std::size_t i = 0; i < col.size(); ++i) {
      const double a = col[i], b = it->second[i];
      if (std::isnan(a) != std::isnan(b)) return false;
      if (!std::isnan(a) && a != b) return false;
    }
  }
  return true;
}

int skeleton_class_size(const Schema& s, const std::string& cls, int n) {
  auto all_card = [&](const RelationshipClass& r, Cardinality c) {
    return std::all_of(r.participants.begin(), r.participants.end(),
                       [&](const Participant& p) { return p.cardinality == c; });
  };
  if (s.is_relationship(cls)) return all_card(s.relationship(cls), Cardinality::Many) ? 2 * n : n;
  int k = 0;
  for (const auto& r : s.relationships()) {
    bool incident = std::any_of(r.participants.begin(), r.participants.end(),
                                [&](const Participant& p) { return p.entity == cls; });
    if (incident && all_card(r, Cardinality::One)) ++k;
  }
  return static_cast<int>(std::floor(std::pow(1.2, k) * n));
}

namespace {

std::string padded(const std::string& cls, int k) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%06d", k);
  return cls + "_" + buf;
}

}  // namespace

Skeleton random_skeleton(const Schema& s, int n, std::uint64_t seed, const SkeletonGenConfig& cfg) {
  if (n < 1) throw std::invalid_argument("random_skeleton: base size must be >= 1");
  std::mt19937_64 rng(seed);
  Skeleton::Builder b(s);
  std::map<std::string, std::vector<std::string>> entity_ids;
  for (const auto& e : s.entities()) {
    const int count = skeleton_class_size(s, e, n);
    for (int k = 0; k < count; ++k) {
      entity_ids[e].push_back(padded(e, k));
      b.add_entity(entity_ids[e].back(), e);
    }
  }
  for (const auto& r : s.relationships()) {
    const int count = skeleton_class_size(s, r.id, n);
    // remaining capacity per slot; MANY slots never run out
    std::vector<std::vector<int>> capacity;
    for (const auto& p : r.participants)
      capacity.emplace_back(entity_ids[p.entity].size(),
                            p.cardinality == Cardinality::One ? 1 : std::numeric_limits<int>::max());
    std::set<std::vector<int>> used;
    for (int k = 0; k < count; ++k) {
      std::vector<int> tuple;
      bool placed = false;
      for (int attempt = 0; attempt < cfg.max_retries && !placed; ++attempt) {
        tuple.clear();
        bool ok = true;
        for (std::size_t slot = 0; slot < r.participants.size(); ++slot) {
          std::vector<int> open;
          for (int e = 0; e < static_cast<int>(capacity[slot].size()); ++e)
            if (capacity[slot][static_cast<std::size_t>(e)] > 0) open.push_back(e);
          if (open.empty()) {
            ok = false;
            break;
          }
          std::uniform_int_distribution<std::size_t> pick(0, open.size() - 1);
          tuple.push_back(open[pick(rng)]);
        }
        if (!ok) break;
        placed = used.insert(tuple).second;
      }
      if (!placed)
        throw GenerationExhausted("random_skeleton: cannot place item " + std::to_string(k) + " of " + r.id);
      std::vector<std::string> parts;
      for (std::size_t slot = 0; slot < tuple.size(); ++slot) {
        --capacity[slot][static_cast<std::size_t>(tuple[slot])];
        parts.push_back(entity_ids[r.participants[slot].entity][static_cast<std::size_t>(tuple[slot])]);
      }
      b.add_relationship(padded(r.id, k), r.id, std::move(parts));
    }
  }
  return std::move(b).build();
}

}  // namespace relcd
