#include <sstream>

#include "doctest.h"
#include "ktlab/experiment.hpp"

using namespace ktlab;

namespace {

GraphSpec spec(Family f, std::size_t n, double p = 0.0) {
  GraphSpec s;
  s.family = f;
  s.n = n;
  s.p = p;
  return s;
}

ExperimentConfig small_grid() {
  ExperimentConfig c;
  c.graphs = {spec(Family::Path, 16), spec(Family::Cycle, 20), spec(Family::ErdosRenyi, 32, 0.2)};
  c.deltas = {0.0, 0.25, 0.5};
  c.seeds = {1, 2, 3, 4, 5};
  c.threads = 3;
  return c;
}

}  // namespace

TEST_CASE("experiment: empty delta list") {
  ExperimentConfig c = small_grid();
  c.deltas.clear();
  CHECK(run_experiment(c).empty());
}

TEST_CASE("experiment: single cell") {
  ExperimentConfig c;
  c.graphs = {spec(Family::Path, 16)};
  c.deltas = {0.0};
  c.seeds = {1};
  auto rs = run_experiment(c);
  REQUIRE(rs.size() == 1);
  CHECK(rs[0].error.empty());
  CHECK(rs[0].m == 15);
  CHECK(rs[0].diameter == 15);
  CHECK(rs[0].components_ok);
  CHECK(rs[0].h_edges == 15);
  CHECK(rs[0].rounds == rs[0].phase1_rounds + rs[0].phase2_rounds + rs[0].merge_rounds);
}

TEST_CASE("experiment: grid order and determinism") {
  const ExperimentConfig c = small_grid();
  auto a = run_experiment(c);
  REQUIRE(a.size() == 45);
  std::size_t k = 0;
  for (const GraphSpec& g : c.graphs)
    for (double d : c.deltas)
      for (std::uint64_t s : c.seeds) {
        CHECK(a[k].family == to_string(g.family));
        CHECK(a[k].delta == d);
        CHECK(a[k].seed == s);
        CHECK(a[k].error.empty());
        ++k;
      }
  ExperimentConfig serial = c;
  serial.threads = 1;
  std::ostringstream x, y;
  write_records(x, a, Format::Csv);
  write_records(y, run_experiment(serial), Format::Csv);
  CHECK(x.str() == y.str());
  CHECK(verify(a).pass);
}

TEST_CASE("experiment: validation") {
  ExperimentConfig c = small_grid();
  c.deltas = {0.7};
  CHECK_THROWS_AS(run_experiment(c), ParameterError);
  c = small_grid();
  c.rho = 1;
  CHECK_THROWS_AS(c.validate(), ParameterError);
  c = small_grid();
  c.c_findany = 0;
  CHECK_THROWS_AS(c.validate(), ParameterError);
  CHECK_THROWS_AS(format_from_string("xml"), ParameterError);
}

TEST_CASE("records round trip through CSV and JSON") {
  ExperimentConfig c = small_grid();
  c.seeds = {7};
  auto rs = run_experiment(c);
  rs[0].error = "odd, \"quoted\" text";
  for (Format f : {Format::Csv, Format::Json}) {
    std::stringstream a;
    write_records(a, rs, f);
    const std::string first = a.str();
    auto back = read_records(a, f);
    REQUIRE(back.size() == rs.size());
    CHECK(back[0].error == rs[0].error);
    std::ostringstream b;
    write_records(b, back, f);
    CHECK(b.str() == first);
  }
}

TEST_CASE("malformed records") {
  std::stringstream bad_header("family,n\npath,3\n");
  CHECK_THROWS_AS(read_records(bad_header, Format::Csv), SchemaError);
  std::stringstream bad_json("{\"family\": 3}\n");
  CHECK_THROWS_AS(read_records(bad_json, Format::Json), SchemaError);
  std::stringstream not_json("{oops\n");
  CHECK_THROWS_AS(read_records(not_json, Format::Json), SchemaError);

  std::stringstream good;
  write_records(good, {RunRecord{}}, Format::Csv);
  std::string text = good.str();
  text.replace(text.rfind("0,0,0"), 1, "x");
  std::stringstream broken(text);
  CHECK_THROWS_AS(read_records(broken, Format::Csv), SchemaError);
}

TEST_CASE("verify") {
  auto empty = verify({});
  CHECK(empty.pass);
  CHECK(empty.warnings.size() == 1);

  ExperimentConfig c = small_grid();
  c.seeds = {3};
  auto rs = run_experiment(c);
  CHECK(verify(rs).pass);
  rs[4].components_ok = false;
  auto rep = verify(rs);
  CHECK_FALSE(rep.pass);
  REQUIRE(rep.failures.size() == 1);
  CHECK(rep.failures[0].find("cycle n=20 delta=0.25 seed=3") != std::string::npos);

  std::ostringstream text, json;
  write_report(text, rep, false);
  write_report(json, rep, true);
  CHECK(text.str().rfind("FAIL", 0) == 0);
  CHECK(json.str().find("\"pass\": false") != std::string::npos);
}
