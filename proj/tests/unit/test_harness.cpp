#include <doctest.h>

#include <atomic>
#include <cmath>
#include <filesystem>
#include <stdexcept>

#include "qflow/harness/suites.hpp"

using namespace qflow;
using namespace qflow::harness;
using nlohmann::json;

namespace {

json base_scenario() {
  return json::parse(R"({
    "schema": "qflow.scenario/1",
    "id": "unit",
    "d": 1,
    "hamiltonian": [[1, 0], [0, -1]],
    "tau": 0.3,
    "k_list": [16, 32, 64],
    "offsets": [{"tag": "origin"}, {"tag": "normal", "w": [1.0, 0.5], "norm": 1.0}]
  })");
}

std::vector<SweepRecord> sample_records() {
  return {make_record("b", 64, "kernel.origin", {1.0 / 3.0, -2e-300}, {0.3333, 0.1}),
          make_record("a", 32, "kernel.origin", {1, 0}, {1, 0}, "tail"),
          make_record("a", 16, "kernel.origin", {0.1, 0.2}, {0.0, 0.0})};
}

}  // namespace

TEST_SUITE("harness") {

TEST_CASE("scenario parsing builds normal offsets orthogonal to the graph") {
  const Scenario sc = parse_scenario(base_scenario());
  REQUIRE(sc.offsets.size() == 2);
  const Offset& n = sc.offsets[1];
  CHECK(std::sqrt(n.u.squaredNorm() + n.w.squaredNorm()) == doctest::Approx(1.0));
  const Matrix a = sc.flow().differential.matrix();
  // (u, w) orthogonal to every (x, A x)
  CHECK((n.u + a.transpose() * n.w).norm() < 1e-12);
}

TEST_CASE("scenario validation errors") {
  json j = base_scenario();
  j["k_list"] = {32, 16};
  CHECK_THROWS_AS(parse_scenario(j), InputError);
  j = base_scenario();
  j["offsets"] = json::parse(R"([{"tag": "origin"}, {"tag": "origin"}])");
  CHECK_THROWS_AS(parse_scenario(j), InputError);
  j = base_scenario();
  j["offsets"] = json::parse(R"([{"tag": "normal", "u": [1, 0], "w": [1, 0]}])");
  CHECK_THROWS_AS(parse_scenario(j), InputError);
  j = base_scenario();
  j["rho_mode"] = "sometimes";
  CHECK_THROWS_AS(parse_scenario(j), InputError);
  j = base_scenario();
  j["schema"] = "qflow.scenario/0";
  CHECK_THROWS_AS(parse_scenario(j), InputError);
  j = base_scenario();
  j["hamiltonian"] = json::parse("[[1, 0, 0], [0, 1, 0], [0, 0, 1]]");
  CHECK_THROWS_AS(parse_scenario(j), DimensionMismatch);
}

TEST_CASE("thresholds are grouped per suite") {
  json j = base_scenario();
  j["thresholds"] = json::parse(R"({"kernel-sweep": {"slope.origin": [-1.3, null]}})");
  const Scenario sc = parse_scenario(j);
  const auto t = sc.thresholds_for("kernel-sweep");
  REQUIRE(t.count("slope.origin") == 1);
  CHECK(t.at("slope.origin").lower == -1.3);
  CHECK(std::isinf(t.at("slope.origin").upper));
  CHECK(sc.thresholds_for("trace-sweep").empty());
}

TEST_CASE("relative error uses the documented floor") {
  CHECK(relative_error({1e-15, 0}, {0, 0}) == doctest::Approx(0.1));
  CHECK(relative_error({2, 0}, {1, 0}) == doctest::Approx(1.0));
}

TEST_CASE("CSV round trip is lossless and emission is deterministic") {
  std::vector<SweepRecord> records = sample_records();
  sort_records(records);
  CHECK(records[0].k == 16);
  CHECK(records[2].scenario == "b");
  const std::string csv = records_to_csv(records);
  CHECK(csv == records_to_csv(records));
  const std::vector<SweepRecord> back = parse_records_csv(csv);
  REQUIRE(back.size() == records.size());
  for (std::size_t i = 0; i < back.size(); ++i) {
    CHECK(back[i].model == records[i].model);
    CHECK(back[i].predicted == records[i].predicted);
    CHECK(back[i].rel_err == records[i].rel_err);
    CHECK(back[i].gate == records[i].gate);
  }
  CHECK(records_to_csv(back) == csv);
}

TEST_CASE("empty record sets and malformed CSV are input errors") {
  CHECK_THROWS_AS(records_to_csv({}), InputError);
  CHECK_THROWS_AS(parse_records_csv("not,a,header\n"), InputError);
}

TEST_CASE("file output reports the offending path") {
  const auto dir = std::filesystem::temp_directory_path() / "qflow-unit-out";
  write_records_csv(dir / "nested" / "r.csv", sample_records());
  CHECK(load_records_csv(dir / "nested" / "r.csv").size() == 3);
  try {
    load_records_csv(dir / "missing.csv");
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("missing.csv") != std::string::npos);
  }
  std::filesystem::remove_all(dir);
}

TEST_CASE("SVG plots are deterministic and carry fitted slopes") {
  PlotSeries s{"err", {32, 64, 128}, {1e-2, 5e-3, 2.5e-3}, true};
  const std::string a = loglog_svg("t", {s});
  CHECK(a == loglog_svg("t", {s}));
  CHECK(a.find("slope -1.00") != std::string::npos);
}

TEST_CASE("thresholds: unknown names are rejected, bounds are inclusive") {
  SuiteReport r;
  r.suite = "x";
  r.quantities["a"] = 1.0;
  apply_thresholds(r, {{"a", Bound{1.0, 1.0}}});
  CHECK(r.passed());
  apply_thresholds(r, {{"a", Bound{-INFINITY, 0.5}}});
  CHECK_FALSE(r.passed());
  CHECK_THROWS_AS(apply_thresholds(r, {{"b", Bound{}}}), InputError);
}

TEST_CASE("identity suite: zero samples rejected, fixed seed reproducible") {
  CHECK_THROWS_AS(run_identity_suite(1, 0), InputError);
  SuiteReport a = run_identity_suite(5, 30), b = run_identity_suite(5, 30);
  apply_thresholds(a, identity_suite_thresholds());
  apply_thresholds(b, identity_suite_thresholds());
  CHECK(report_to_csv(a) == report_to_csv(b));
  CHECK(a.passed());
}

TEST_CASE("worker pool runs every task and rethrows the lowest failing index") {
  std::atomic<int> count{0};
  parallel_for(20, 3, [&](int) { ++count; });
  CHECK(count == 20);
  try {
    parallel_for(10, 4, [](int i) {
      if (i == 7 || i == 3) throw std::runtime_error(std::to_string(i));
    });
    FAIL("expected an exception");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()) == "3");
  }
}

TEST_CASE("zero-time kernel sweep reproduces the Szego kernel") {
  json j = base_scenario();
  j["tau"] = 0.0;
  const SuiteReport r = run_kernel_sweep(parse_scenario(j), 2);
  for (const SweepRecord& rec : r.records) CHECK(rec.rel_err < 1e-10);
}

TEST_CASE("trace sweep rejects a degenerate fixed point") {
  json j = base_scenario();
  j["tau"] = 0.0;
  CHECK_THROWS_AS(run_trace_sweep(parse_scenario(j), 1), DegenerateFixedPoint);
}

TEST_CASE("sweep output does not depend on the worker count") {
  json j = base_scenario();
  j["symbol"] = json::parse(R"({"phase_gradient": 1.0})");
  const Scenario sc = parse_scenario(j);
  CHECK(records_to_csv(run_unitarity_sweep(sc, 1).records) ==
        records_to_csv(run_unitarity_sweep(sc, 3).records));
}

}  // TEST_SUITE
