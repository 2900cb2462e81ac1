#pragma once

#include <map>
#include <memory>
#include <span>
#include <tuple>
#include <vector>

#include "relcd/ground_graph.hpp"
#include "relcd/rcm.hpp"
#include "relcd/skeleton.hpp"

namespace relcd {

/// Answers RCI queries exactly by d-separation on the ground graphs of a
/// fixed list of skeletons. The quantifier over all skeletons is
/// approximated by that list, so errors can only go towards "independent".
class RciOracle {
 public:
  RciOracle(const Model& rcm, std::vector<std::shared_ptr<const Skeleton>> skeletons);

  /// U _||_ V | W. V must be canonical; all share one base class, else
  /// std::invalid_argument.
  bool independent(const RelationalVariable& u, const RelationalVariable& v,
                   std::span<const RelationalVariable> w);

  const std::vector<std::shared_ptr<const Skeleton>>& skeletons() const { return skeletons_; }
  std::size_t queries() const { return queries_; }

 private:
  struct PerSkeleton {
    std::shared_ptr<const Skeleton> sk;
    GroundGraph gg;
    TerminalSetCache paths;
    DSeparation ds;
    PerSkeleton(std::shared_ptr<const Skeleton> s, const Model& m);
  };
  Model rcm_;
  std::vector<std::shared_ptr<const Skeleton>> skeletons_;
  std::vector<std::unique_ptr<PerSkeleton>> state_;
  std::map<std::tuple<RelationalVariable, RelationalVariable, std::vector<RelationalVariable>>, bool> memo_;
  std::size_t queries_ = 0;
};

/// One-shot convenience wrapper around RciOracle.
bool rci_oracle(const Model& rcm, const RelationalVariable& u, const RelationalVariable& v,
                std::span<const RelationalVariable> w, std::vector<std::shared_ptr<const Skeleton>> skeletons);

/// Canonical unshielded triple <[I_X].X, {P.Y...}, R.Z>.
struct Cut {
  RelationalVariable vx;
  std::vector<RelationalVariable> pys;  // sorted
  RelationalVariable rz;

  bool operator==(const Cut&) const = default;
  auto operator<=>(const Cut&) const = default;
  std::string to_string() const;
};

/// CUTs realizable on `sk` for the adjacencies of `m` (directions ignored).
/// Paths in pys and rz are capped at `max_hop` hops.
std::vector<Cut> enumerate_cuts(const Model& m, const Skeleton& sk, int max_hop);

}  // namespace relcd
