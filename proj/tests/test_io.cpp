#include <doctest.h>

#include <charconv>
#include <sstream>

#include "fixtures.hpp"
#include "relcd/datagen.hpp"
#include "relcd/io.hpp"

using namespace relcd;
using namespace relcd::fixtures;

TEST_SUITE("io") {
  TEST_CASE("schema round trip is byte exact") {
    for (std::uint64_t seed : {1u, 2u, 3u}) {
      const Schema s = random_schema(seed);
      const auto j = io::to_json(s);
      CHECK(io::schema_from_json(j) == s);
      CHECK(io::to_json(io::schema_from_json(io::json::parse(j.dump()))).dump() == j.dump());
    }
    CHECK(io::schema_from_json(io::to_json(fig1_schema())) == fig1_schema());
  }

  TEST_CASE("skeleton and data round trip") {
    const Model m = fig1_model();
    const Skeleton sk = random_skeleton(m.schema(), 30, 4);
    const Skeleton back = io::skeleton_from_json(m.schema(), io::to_json(sk));
    CHECK(io::to_json(back).dump() == io::to_json(sk).dump());
    const AttrData data = generate_data(m, parametrize(m, 5), sk, 6);
    std::ostringstream out;
    io::write_data_csv(out, sk, data);
    std::istringstream in(out.str());
    CHECK(io::read_data_csv(in, back) == data);
  }

  TEST_CASE("model and params round trip") {
    Model m = fig1_model();
    CHECK(io::model_from_json(m.schema(), io::to_json(m)) == m);
    Model p = m;
    p.clear_orientations();
    p.graph().orient("Competence", "Salary");
    p.non_colliders().insert({"Success", "Revenue", "Budget"});
    CHECK(io::model_from_json(p.schema(), io::to_json(p)) == p);
    const auto params = parametrize(m, 9);
    CHECK(io::params_from_json(io::to_json(params)) == params);
  }

  TEST_CASE("format errors") {
    CHECK_THROWS_AS(io::schema_from_json(io::json::parse(R"({"entities": 3})")), io::FormatError);
    std::istringstream bad("item_id,attribute,value\nnope,Salary,1\n");
    CHECK_THROWS_AS(io::read_data_csv(bad, fig1_skeleton()), io::FormatError);
    auto j = io::to_json(fig1_model());
    j["deps"][0]["cause_attr"] = "Unknown";
    CHECK_THROWS_AS(io::model_from_json(fig1_schema(), j), io::FormatError);
  }

  TEST_CASE("doubles survive formatting") {
    for (double v : {0.1, -1e-300, 1.0 / 3.0, 123456789.123456789, 5e-324})
    {
      const std::string t = io::format_double(v);
      double back = 0;
      std::from_chars(t.data(), t.data() + t.size(), back);
      CHECK(back == v);
    }
  }

  TEST_CASE("report round trip") {
    RunReport r;
    r.queries.push_back({"[E].Competence", "[E].Salary", {"[E,D,P].Success"}, 0.25, true, true, false, 1, "phase1", ""});
    r.sepsets.push_back({var({"E"}, "Competence"), var({"E"}, "Salary"), {var({"E", "D", "P"}, "Success")}, 1});
    r.verdicts.push_back({{"Success", "Revenue", "Success"}, VerdictKind::Weak, "split-rbo", {}, "ctx", true});
    r.log.push_back("line");
    r.timings["phase1"] = 0.5;
    const RunReport b = io::report_from_json(io::json::parse(io::to_json(r).dump()));
    CHECK(io::to_json(b).dump() == io::to_json(r).dump());
  }
}
