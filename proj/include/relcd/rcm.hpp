#pragma once

#include <array>
#include <compare>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "relcd/path.hpp"
#include "relcd/schema.hpp"

namespace relcd {

/// P.X: an attribute reached from the path's base class.
struct RelationalVariable {
  RelationalPath path;
  std::string attr;

  const std::string& base() const { return path.base(); }
  bool canonical() const { return path.canonical(); }
  std::string to_string() const { return path.to_string() + "." + attr; }

  bool operator==(const RelationalVariable&) const = default;
  std::strong_ordering operator<=>(const RelationalVariable& o) const {
    if (auto c = path <=> o.path; c != 0) return c;
    return attr <=> o.attr;
  }
};

inline RelationalVariable canonical_variable(const Schema& s, const std::string& attr) {
  return {RelationalPath{s.owner(attr)}, attr};
}

/// cause -> [I_Y].effect, or cause - [I_Y].effect when undirected. The
/// effect's item class is the cause path's base class.
struct RelationalDependency {
  RelationalVariable cause;
  std::string effect;
  bool directed = true;

  const std::string& effect_class() const { return cause.base(); }
  RelationalVariable effect_variable() const { return {RelationalPath{cause.base()}, effect}; }
  /// The same adjacency seen from the cause's class: P~.Y - [I_X].X.
  RelationalDependency reversed() const { return {{cause.path.reversed(), effect}, cause.attr, directed}; }
  /// Undirected form, picking the smaller of the two perspectives.
  RelationalDependency undirected_key() const;
  std::string to_string() const;

  bool operator==(const RelationalDependency&) const = default;
  std::strong_ordering operator<=>(const RelationalDependency& o) const {
    if (auto c = effect <=> o.effect; c != 0) return c;
    if (auto c = cause <=> o.cause; c != 0) return c;
    return directed <=> o.directed;
  }
};

/// Alternation, participation and the cardinality-gated repeat rule.
bool valid_path(const Schema& s, const std::vector<std::string>& classes);
inline bool valid_path(const Schema& s, const RelationalPath& p) { return valid_path(s, p.classes); }

/// ONE when every entity-to-relationship step has cardinality one, so each
/// base item reaches at most one terminal item.
Cardinality path_cardinality(const Schema& s, const RelationalPath& p);

/// All valid paths from `base` with at most `max_hops` hops, ordered.
std::vector<RelationalPath> enumerate_paths(const Schema& s, const std::string& base, int max_hops);

/// Every undirected candidate P.X - [I_Y].Y with X != Y, in undirected_key
/// form, sorted.
std::vector<RelationalDependency> enumerate_candidate_deps(const Schema& s, int max_hops);

using AttrTriple = std::array<std::string, 3>;

/// Attribute-class graph: each adjacent pair is undirected or directed.
class AttributeGraph {
 public:
  AttributeGraph() = default;
  explicit AttributeGraph(std::vector<std::string> nodes) : nodes_(std::move(nodes)) {}

  const std::vector<std::string>& nodes() const { return nodes_; }
  void add_undirected(const std::string& a, const std::string& b);
  bool adjacent(const std::string& a, const std::string& b) const;
  bool has_directed(const std::string& from, const std::string& to) const;
  bool has_undirected(const std::string& a, const std::string& b) const;
  /// Sets from -> to; returns false if the pair is not adjacent.
  bool orient(const std::string& from, const std::string& to);
  void unorient(const std::string& a, const std::string& b);

  std::vector<std::string> parents(const std::string& x) const;
  std::vector<std::string> children(const std::string& x) const;
  std::vector<std::string> undirected_neighbors(const std::string& x) const;
  std::vector<std::string> adjacents(const std::string& x) const;
  /// Sorted (a, b) pairs with a < b.
  std::vector<std::pair<std::string, std::string>> edges() const;
  bool directed_acyclic() const;
  std::size_t directed_count() const;

  bool operator==(const AttributeGraph&) const = default;

 private:
  enum class Mark { Undirected, Forward, Backward };  // Forward: first -> second
  std::vector<std::string> nodes_;
  std::map<std::pair<std::string, std::string>, Mark> edges_;
};

/// An RCM or a partially directed RCM. Adjacencies are stored in undirected
/// form; directions live on the attribute-class graph and are lifted to
/// dependencies on demand.
class Model {
 public:
  Model() = default;
  explicit Model(Schema schema, int hop_threshold = 0);

  /// Builds a model whose directions come from `deps`. Undirected members
  /// stay undirected. Throws std::invalid_argument on direction conflicts
  /// or malformed dependencies.
  static Model from_dependencies(Schema schema, const std::vector<RelationalDependency>& deps,
                                 int hop_threshold = 0);

  const Schema& schema() const { return schema_; }
  int hop_threshold() const { return hop_threshold_; }
  void set_hop_threshold(int h) { hop_threshold_ = h; }

  void add_adjacency(const RelationalDependency& dep);
  void remove_adjacency(const RelationalDependency& dep);
  bool has_adjacency(const RelationalDependency& dep) const;
  const std::set<RelationalDependency>& adjacencies() const { return adjacencies_; }

  AttributeGraph& graph() { return h_; }
  const AttributeGraph& graph() const { return h_; }
  std::set<AttrTriple>& non_colliders() { return n_; }
  const std::set<AttrTriple>& non_colliders() const { return n_; }
  /// Drop every orientation and non-collider record, keeping adjacencies.
  void clear_orientations();

  /// Adjacencies lifted through the attribute graph's directions.
  std::vector<RelationalDependency> dependencies() const;
  /// Relational variables adjacent to [I_X].X, i.e. ne([I_X].X).
  std::vector<RelationalVariable> neighbors(const std::string& attr) const;
  /// Relational variables P.Y with P.Y -> [I_X].X.
  std::vector<RelationalVariable> parents(const std::string& attr) const;
  /// All adjacencies between attributes a and b, in the a-effect perspective.
  std::vector<RelationalDependency> adjacencies_between(const std::string& effect, const std::string& cause) const;

  bool fully_directed() const;
  bool acyclic() const { return h_.directed_acyclic(); }
  /// The directed dependencies only.
  std::vector<RelationalDependency> directed_dependencies() const;

  bool operator==(const Model& o) const {
    return schema_ == o.schema_ && adjacencies_ == o.adjacencies_ && h_ == o.h_ && n_ == o.n_;
  }

 private:
  Schema schema_;
  int hop_threshold_ = 0;
  std::set<RelationalDependency> adjacencies_;
  AttributeGraph h_;
  std::set<AttrTriple> n_;
};

}  // namespace relcd
