#pragma once

#include <algorithm>
#include <memory>
#include <string>
#include <vector>

#include "relcd/rcm.hpp"
#include "relcd/schema.hpp"
#include "relcd/skeleton.hpp"

namespace relcd::fixtures {

/// Employees develop products; units fund products, each product by at most
/// one unit.
inline Schema fig1_schema() {
  using C = Cardinality;
  return Schema({"B", "E", "P"},
                {{"D", {{"E", C::Many}, {"P", C::Many}}}, {"F", {{"P", C::One}, {"B", C::Many}}}},
                {{"Competence", "E"}, {"Salary", "E"}, {"Success", "P"}, {"Revenue", "B"}, {"Budget", "B"}});
}

inline Skeleton fig1_skeleton() {
  Skeleton::Builder b(fig1_schema());
  for (int i = 1; i <= 5; ++i) b.add_entity("e" + std::to_string(i), "E");
  for (int i = 1; i <= 5; ++i) b.add_entity("p" + std::to_string(i), "P");
  b.add_entity("b1", "B").add_entity("b2", "B");
  for (auto [e, p] : std::vector<std::pair<int, int>>{{1, 1}, {2, 1}, {2, 2}, {2, 3}, {3, 3}, {4, 3}, {4, 4}, {5, 4}, {5, 5}}) {
    const std::string ei = "e" + std::to_string(e), pi = "p" + std::to_string(p);
    b.add_relationship("d_" + ei + pi, "D", {ei, pi});
  }
  for (auto [p, u] : std::vector<std::pair<int, int>>{{1, 1}, {2, 1}, {3, 2}, {4, 2}, {5, 2}}) {
    const std::string pi = "p" + std::to_string(p), bi = "b" + std::to_string(u);
    b.add_relationship("f_" + pi + bi, "F", {pi, bi});
  }
  return std::move(b).build();
}

inline RelationalVariable var(std::vector<std::string> path, std::string attr) {
  return {RelationalPath(std::move(path)), std::move(attr)};
}

inline RelationalDependency dep(std::vector<std::string> path, std::string cause, std::string effect) {
  return {var(std::move(path), std::move(cause)), std::move(effect), true};
}

/// Competence -> Salary, Competence -> Success, Success -> Revenue,
/// Revenue -> Budget, Budget -> Salary.
inline Model fig1_model() {
  return Model::from_dependencies(fig1_schema(),
                                  {dep({"E"}, "Competence", "Salary"), dep({"P", "D", "E"}, "Competence", "Success"),
                                   dep({"B", "F", "P"}, "Success", "Revenue"), dep({"B"}, "Revenue", "Budget"),
                                   dep({"E", "D", "P", "F", "B"}, "Budget", "Salary")},
                                  4);
}

inline std::shared_ptr<const Skeleton> shared(Skeleton sk) { return std::make_shared<const Skeleton>(std::move(sk)); }

/// Every item attribute holds its item index, so cells decode to item ids.
inline AttrData index_data(const Skeleton& sk) {
  AttrData d(sk);
  for (const auto& a : sk.schema().attributes())
    for (ItemIndex i : sk.items_of(a.owner)) d.set(i, a.id, static_cast<double>(i));
  return d;
}

inline std::vector<std::string> decode(const Skeleton& sk, const std::vector<double>& cell) {
  std::vector<std::string> out;
  for (double v : cell) out.push_back(sk.id(static_cast<ItemIndex>(v)));
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace relcd::fixtures
