#include <doctest.h>

#include "fixtures.hpp"
#include "relcd/bench.hpp"
#include "relcd/datagen.hpp"

using namespace relcd;
using namespace relcd::fixtures;

namespace {

/// fig1 without Budget -> Salary, plus a spurious Success -> Salary.
Model fig1_one_wrong() {
  return Model::from_dependencies(fig1_schema(),
                                  {dep({"E"}, "Competence", "Salary"), dep({"P", "D", "E"}, "Competence", "Success"),
                                   dep({"B", "F", "P"}, "Success", "Revenue"), dep({"B"}, "Revenue", "Budget"),
                                   dep({"E", "D", "P"}, "Success", "Salary")},
                                  4);
}

}  // namespace

TEST_SUITE("bench") {
  TEST_CASE("four correct and one spurious dependency") {
    const Evaluation e = evaluate(fig1_one_wrong(), fig1_model(), fig1_model());
    for (const Counts& c : {e.phase1, e.phase2}) {
      CHECK(c.tp == 4);
      CHECK(c.fp == 1);
      CHECK(c.fn == 1);
      const Metrics m = metrics_from_counts(c);
      CHECK(m.precision == doctest::Approx(0.8));
      CHECK(m.recall == doctest::Approx(0.8));
      CHECK(m.f_measure == doctest::Approx(0.8));
    }
  }

  TEST_CASE("exact recovery scores one") {
    const Evaluation e = evaluate(fig1_model(), fig1_model(), fig1_model());
    for (const Counts& c : {e.phase1, e.phase2}) {
      const Metrics m = metrics_from_counts(c);
      CHECK(m.precision == 1.0);
      CHECK(m.recall == 1.0);
      CHECK(m.f_measure == 1.0);
    }
  }

  TEST_CASE("undirected output has no phase II predictions") {
    Model und = fig1_model();
    und.clear_orientations();
    const Evaluation e = evaluate(und, fig1_model(), fig1_model());
    CHECK(metrics_from_counts(e.phase1).precision == 1.0);
    const Metrics m = metrics_from_counts(e.phase2);
    CHECK(m.recall == 0.0);
    CHECK(m.precision == 0.0);
    CHECK(m.precision_undefined);
    CHECK_FALSE(m.recall_undefined);
  }

  TEST_CASE("schema mismatch") {
    CHECK_THROWS_AS(evaluate(fig1_model(), random_rcm(random_schema(1), 1), fig1_model()), std::invalid_argument);
  }

  TEST_CASE("micro and macro averages") {
    const std::vector<Counts> equal{{4, 1, 1}, {4, 1, 1}};
    CHECK(micro_average(equal).precision == doctest::Approx(macro_average(equal).precision));
    const std::vector<Counts> mixed{{1, 0, 0}, {1, 3, 3}};
    CHECK(micro_average(mixed).precision == doctest::Approx(2.0 / 5));
    CHECK(macro_average(mixed).precision == doctest::Approx((1.0 + 0.25) / 2));
    CHECK(macro_average({}).precision_undefined);
  }

  TEST_CASE("verdict accuracy") {
    const Model truth = fig1_model();
    const auto any = [](const Verdict&) { return true; };
    std::vector<Verdict> vs{
        {{"Competence", "Salary", "Budget"}, VerdictKind::Collider, "non-rbo", {}, "", true},
        {{"Competence", "Success", "Competence"}, VerdictKind::NonCollider, "split-rbo", {}, "", true},
        {{"Success", "Revenue", "Success"}, VerdictKind::Weak, "pair-rbo", {}, "", true},
        {{"Revenue", "Budget", "Revenue"}, VerdictKind::NonCollider, "split-rbo", {}, "", false},
    };
    const VerdictAccuracy skip = verdict_accuracy(vs, truth, any, false);
    CHECK(skip.collider_total == 2);
    CHECK(skip.collider_correct == 1);
    CHECK(skip.non_collider_total == 0);
    CHECK(skip.overall() == doctest::Approx(0.5));
    const VerdictAccuracy weak = verdict_accuracy(vs, truth, any, true);
    CHECK(weak.collider_total == 3);
    CHECK(weak.collider_correct == 2);
  }

  TEST_CASE("config parsing and variants") {
    const BenchConfig c =
        parse_bench_config("models = 4\nsizes = 100, 300\nvariants = robust,no_detection\nbench_seed = 9\nn_perm = 50\nh = 3\n");
    CHECK(c.models == 4);
    CHECK(c.sizes == std::vector<int>{100, 300});
    CHECK(c.variants == std::vector<std::string>{"robust", "no_detection"});
    CHECK(c.seed == 9);
    CHECK(c.learner.ci.n_perm == 50);
    CHECK(c.learner.h == 3);
    CHECK(to_text(parse_bench_config(to_text(c))) == to_text(c));
    CHECK_THROWS_AS(parse_bench_config("speed = 11"), std::invalid_argument);
    CHECK_FALSE(variant_config("no_detection", c.learner).detection);
    CHECK(variant_config("baseline_cut", c.learner).mode == Mode::BaselineCut);
    CHECK_THROWS_AS(variant_config("fastest", c.learner), std::invalid_argument);
  }
}
