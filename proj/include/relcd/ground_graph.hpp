#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "relcd/rcm.hpp"
#include "relcd/skeleton.hpp"

namespace relcd {

using NodeIndex = std::int32_t;

struct GroundNode {
  ItemIndex item;
  int attr;  // position in schema().attributes()
};

/// Plain DAG with parent/child lists. Used both for ground graphs and for
/// standalone d-separation checks.
class Dag {
 public:
  Dag() = default;
  explicit Dag(std::size_t n) : parents_(n), children_(n) {}

  std::size_t size() const { return parents_.size(); }
  void add_edge(NodeIndex from, NodeIndex to);
  const std::vector<NodeIndex>& parents(NodeIndex v) const { return parents_[static_cast<std::size_t>(v)]; }
  const std::vector<NodeIndex>& children(NodeIndex v) const { return children_[static_cast<std::size_t>(v)]; }
  std::size_t edge_count() const;
  /// Empty when the graph has a cycle.
  std::vector<NodeIndex> topological_order() const;
  bool acyclic() const { return topological_order().size() == size(); }

 private:
  std::vector<std::vector<NodeIndex>> parents_;
  std::vector<std::vector<NodeIndex>> children_;
};

/// Instantiation of an RCM on a skeleton: one node per item attribute and an
/// edge j.X -> i.Y for every P.X -> [I_Y].Y and j in P|_i.
class GroundGraph {
 public:
  /// Throws std::invalid_argument if the model is not fully directed or the
  /// schemas differ, std::logic_error if the result is cyclic.
  static GroundGraph build(const Model& rcm, const Skeleton& sk);

  const Dag& dag() const { return dag_; }
  std::size_t size() const { return nodes_.size(); }
  const GroundNode& node(NodeIndex v) const { return nodes_[static_cast<std::size_t>(v)]; }
  std::optional<NodeIndex> find(ItemIndex item, const std::string& attr) const;
  std::optional<NodeIndex> find(ItemIndex item, int attr) const;
  const std::vector<std::string>& attribute_names() const { return attrs_; }
  std::string label(const Skeleton& sk, NodeIndex v) const;
  /// (src, dst) pairs sorted by node index.
  std::vector<std::pair<NodeIndex, NodeIndex>> edges() const;

 private:
  Dag dag_;
  std::vector<GroundNode> nodes_;
  std::vector<std::string> attrs_;
  std::vector<std::vector<NodeIndex>> lookup_;  // [attr][item] -> node or -1
};

/// Reusable d-separation engine over one DAG (Bayes-ball reachability).
/// Not thread-safe; keep one per thread.
class DSeparation {
 public:
  explicit DSeparation(const Dag& dag);

  /// Marks every node d-connected to some source given `given`. Sources in
  /// `given` are ignored. Results are valid until the next call.
  void run(std::span<const NodeIndex> sources, std::span<const NodeIndex> given);
  bool reachable(NodeIndex v) const { return reach_[static_cast<std::size_t>(v)] == stamp_; }

  bool separated(NodeIndex x, NodeIndex y, std::span<const NodeIndex> given);
  /// True if any of `targets` outside `given` is d-connected to `source`.
  bool any_connected(NodeIndex source, std::span<const NodeIndex> targets, std::span<const NodeIndex> given);

 private:
  const Dag* dag_;
  std::uint32_t stamp_ = 0;
  std::vector<std::uint32_t> in_given_, ancestor_, reach_, seen_up_, seen_down_;
  std::vector<NodeIndex> work_;
};

/// d_separated(x, y | Z) on a DAG. Throws std::out_of_range on unknown nodes
/// and std::invalid_argument if x == y or either lies in Z.
bool d_separated(const Dag& g, NodeIndex x, NodeIndex y, std::span<const NodeIndex> given);

}  // namespace relcd
