#include <doctest.h>

#include <map>
#include <random>

#include "brute.hpp"
#include "fixtures.hpp"
#include "relcd/ground_graph.hpp"

using namespace relcd;
using namespace relcd::fixtures;

namespace {

bool participates(const Schema& s, const std::string& e, const std::string& r, Cardinality* card) {
  for (const auto& rel : s.relationships()) {
    if (rel.id != r) continue;
    for (const auto& p : rel.participants)
      if (p.entity == e) {
        if (card) *card = p.cardinality;
        return true;
      }
  }
  return false;
}

/// Counts ordered (Y, path, X) triples by trying every class sequence.
long brute_candidate_count(const Schema& s, int h) {
  const auto classes = s.item_classes();
  auto is_entity = [&](const std::string& c) {
    return std::find(s.entities().begin(), s.entities().end(), c) != s.entities().end();
  };
  auto step_ok = [&](const std::string& a, const std::string& b) {
    if (is_entity(a) == is_entity(b)) return false;
    return is_entity(a) ? participates(s, a, b, nullptr) : participates(s, b, a, nullptr);
  };
  long count = 0;
  std::vector<std::string> seq;
  std::function<void()> rec = [&] {
    const std::size_t n = seq.size();
    if (n >= 3 && seq[n - 3] == seq[n - 1]) {
      Cardinality c{};
      if (!is_entity(seq[n - 2]) || !participates(s, seq[n - 2], seq[n - 1], &c) || c != Cardinality::Many) return;
    }
    for (const auto& y : s.attributes())
      if (y.owner == seq.front())
        for (const auto& x : s.attributes())
          if (x.owner == seq.back() && x.id != y.id) ++count;
    if (static_cast<int>(n) - 1 >= h) return;
    for (const auto& c : classes)
      if (step_ok(seq.back(), c)) {
        seq.push_back(c);
        rec();
        seq.pop_back();
      }
  };
  for (const auto& c : classes) {
    seq = {c};
    rec();
  }
  return count;
}

}  // namespace

TEST_SUITE("rcm") {
  TEST_CASE("path validity on the worked example") {
    const Schema s = fig1_schema();
    CHECK(valid_path(s, RelationalPath{"E", "D", "P", "F", "B"}));
    CHECK_FALSE(valid_path(s, RelationalPath{"B", "F", "P", "F", "B"}));
    CHECK(valid_path(s, RelationalPath{"E", "D", "P", "D", "E"}));
    CHECK_FALSE(valid_path(s, RelationalPath{"E", "P"}));
    CHECK(path_cardinality(s, {"P", "F", "B"}) == Cardinality::One);
    CHECK(path_cardinality(s, {"P", "D", "E"}) == Cardinality::Many);
  }

  TEST_CASE("candidate dependencies") {
    const Schema s = fig1_schema();
    const auto c = enumerate_candidate_deps(s, 4);
    auto has = [&](RelationalDependency d) {
      d.directed = false;
      const auto k = d.undirected_key();
      return std::find(c.begin(), c.end(), k) != c.end();
    };
    CHECK(has(dep({"P", "D", "E"}, "Competence", "Success")));
    CHECK(has(dep({"E", "D", "P", "F", "B"}, "Budget", "Salary")));
    for (int h = 0; h <= 5; ++h) CHECK(static_cast<long>(enumerate_candidate_deps(s, h).size()) * 2 == brute_candidate_count(s, h));
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      const Schema r = random_schema(seed);
      CHECK(static_cast<long>(enumerate_candidate_deps(r, 3).size()) * 2 == brute_candidate_count(r, 3));
    }
  }

  TEST_CASE("model lifts directions to dependencies") {
    const Model m = fig1_model();
    CHECK(m.fully_directed());
    CHECK(m.acyclic());
    CHECK(m.directed_dependencies().size() == 5);
    Model u = m;
    u.clear_orientations();
    CHECK(u.directed_dependencies().empty());
    CHECK(u.adjacencies() == m.adjacencies());
  }
}

TEST_SUITE("ground_graph") {
  TEST_CASE("worked example ground graph") {
    const Skeleton sk = fig1_skeleton();
    const GroundGraph gg = GroundGraph::build(fig1_model(), sk);
    std::map<std::pair<std::string, std::string>, int> kinds;
    for (auto [a, b] : gg.edges())
      kinds[{gg.attribute_names()[static_cast<std::size_t>(gg.node(a).attr)],
             gg.attribute_names()[static_cast<std::size_t>(gg.node(b).attr)]}]++;
    CHECK(kinds[{"Competence", "Success"}] == 9);
    CHECK(kinds[{"Success", "Revenue"}] == 5);
    CHECK(kinds[{"Revenue", "Budget"}] == 2);
    CHECK(kinds[{"Competence", "Salary"}] == 5);
    CHECK(kinds[{"Budget", "Salary"}] == 6);
    CHECK(gg.edges().size() == 27);
    const auto b2 = *gg.find(sk.at("b2"), "Budget");
    const auto e2 = *gg.find(sk.at("e2"), "Salary");
    const auto& pa = gg.dag().parents(e2);
    CHECK(std::find(pa.begin(), pa.end(), b2) != pa.end());
  }

  TEST_CASE("collider path through a conditioned product") {
    const Skeleton sk = fig1_skeleton();
    const GroundGraph gg = GroundGraph::build(fig1_model(), sk);
    const NodeIndex e1 = *gg.find(sk.at("e1"), "Competence"), b1 = *gg.find(sk.at("b1"), "Budget");
    const NodeIndex p1 = *gg.find(sk.at("p1"), "Success");
    CHECK_FALSE(d_separated(gg.dag(), e1, b1, std::vector<NodeIndex>{p1}));
    CHECK_FALSE(d_separated(gg.dag(), e1, b1, {}));
  }

  TEST_CASE("d-separation matches path enumeration on random DAGs") {
    std::mt19937_64 rng(12345);
    for (int trial = 0; trial < 500; ++trial) {
      const int n = 3 + static_cast<int>(rng() % 10);
      const double density = std::uniform_real_distribution<>(0.1, 0.5)(rng);
      Dag g(static_cast<std::size_t>(n));
      for (int a = 0; a < n; ++a)
        for (int b = a + 1; b < n; ++b)
          if (std::uniform_real_distribution<>(0, 1)(rng) < density) g.add_edge(a, b);
      std::vector<NodeIndex> perm(static_cast<std::size_t>(n));
      std::iota(perm.begin(), perm.end(), 0);
      std::shuffle(perm.begin(), perm.end(), rng);
      const NodeIndex x = perm[0], y = perm[1];
      std::vector<NodeIndex> z;
      for (int k = 2; k < n; ++k)
        if (rng() % 3 == 0) z.push_back(perm[static_cast<std::size_t>(k)]);
      REQUIRE(d_separated(g, x, y, z) == brute::d_separated(g, x, y, z));
      CHECK(d_separated(g, x, y, z) == d_separated(g, y, x, z));
    }
  }

  TEST_CASE("d-separation input errors") {
    Dag g(3);
    g.add_edge(0, 1);
    CHECK_THROWS_AS(d_separated(g, 0, 0, {}), std::invalid_argument);
    CHECK_THROWS_AS(d_separated(g, 0, 1, std::vector<NodeIndex>{1}), std::invalid_argument);
    CHECK_THROWS_AS(d_separated(g, 0, 7, {}), std::out_of_range);
  }
}
