#include <doctest.h>

#include <cmath>
#include <map>
#include <numbers>

#include "fixtures.hpp"
#include "relcd/datagen.hpp"

using namespace relcd;
using namespace relcd::fixtures;

namespace {

double variance(const std::vector<double>& v) {
  double mean = 0, sq = 0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  for (double x : v) sq += (x - mean) * (x - mean);
  return sq / static_cast<double>(v.size() - 1);
}

}  // namespace

TEST_SUITE("datagen") {
  TEST_CASE("coefficients are one plus a half-normal") {
    const Model m = fig1_model();
    double sum = 0;
    int count = 0;
    for (std::uint64_t seed = 0; seed < 2000; ++seed)
      for (const auto& [d, b] : parametrize(m, seed).beta) {
        CHECK(b >= 1.0);
        sum += b;
        ++count;
      }
    CHECK(sum / count == doctest::Approx(1 + 0.1 * std::sqrt(2 / std::numbers::pi)).epsilon(0.003));
  }

  TEST_CASE("root attributes have the noise variance") {
    const Model m = fig1_model();
    const Skeleton sk = random_skeleton(m.schema(), 10000, 3);
    const AttrData d = generate_data(m, parametrize(m, 1), sk, 2);
    std::vector<double> c;
    for (ItemIndex i : sk.items_of("E")) c.push_back(d.get(i, "Competence"));
    CHECK(variance(c) == doctest::Approx(0.01).epsilon(0.1));
  }

  TEST_CASE("child variance follows the averaged parents") {
    const Model m = fig1_model();
    const auto params = parametrize(m, 1);
    const double beta = params.beta.at(dep({"P", "D", "E"}, "Competence", "Success"));
    const Skeleton sk = random_skeleton(m.schema(), 5000, 3);
    const AttrData d = generate_data(m, params, sk, 2);
    TerminalSetCache ts(sk);
    std::map<std::size_t, std::vector<double>> by_m;
    for (ItemIndex p : sk.items_of("P")) by_m[ts.get({"P", "D", "E"}, p).size()].push_back(d.get(p, "Success"));
    int checked = 0;
    for (const auto& [k, v] : by_m) {
      if (k == 0 || v.size() < 500) continue;
      CHECK(variance(v) == doctest::Approx(beta * beta * 0.01 / static_cast<double>(k) + 0.01).epsilon(0.1));
      ++checked;
    }
    CHECK(checked >= 2);
  }

  TEST_CASE("generation is deterministic") {
    const Model m = fig1_model();
    const Skeleton sk = random_skeleton(m.schema(), 50, 3);
    CHECK(generate_data(m, parametrize(m, 1), sk, 2) == generate_data(m, parametrize(m, 1), sk, 2));
    CHECK_FALSE(generate_data(m, parametrize(m, 1), sk, 2) == generate_data(m, parametrize(m, 1), sk, 3));
  }

  TEST_CASE("random models follow the protocol") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      const Schema s = random_schema(seed);
      const Model m = random_rcm(s, seed);
      CHECK(m.fully_directed());
      CHECK(m.acyclic());
      CHECK(m.dependencies().size() == s.attributes().size() * 3 / 2);
      for (const auto& a : s.attributes()) CHECK(!m.neighbors(a.id).empty());
      CHECK(m == random_rcm(s, seed));
    }
  }
}
