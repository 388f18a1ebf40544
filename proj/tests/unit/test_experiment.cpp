#include "doctest.h"

#include "ssc/experiment.hpp"
#include "ssc/io.hpp"
#include "test_support.hpp"

#include <cmath>
#include <filesystem>
#include <sstream>

using namespace ssc;
using namespace ssc::experiment;
namespace fs = std::filesystem;

namespace {

ExperimentGrid small_grid() {
  ExperimentGrid g;
  g.base = sim::ModelSpec::uniform(sim::ModelKind::fully_random, 12, 2, 2, 4.0);
  g.axis = Axis::sigma;
  g.axis_values = {0.0, 0.3};
  g.seeds = 2;
  g.master_seed = 17;
  g.lambdas = default_lambdas(12, 5);
  return g;
}

std::string read(const fs::path& p) { return io::read_text(p); }

}  // namespace

TEST_SUITE("experiment") {

TEST_CASE("default lambda axis") {
  const auto l = default_lambdas(100);
  REQUIRE(l.size() == 25);
  CHECK(l.front() == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(l.back() == doctest::Approx(1e4).epsilon(1e-12));
  for (std::size_t i = 1; i < l.size(); ++i) CHECK(l[i] / l[i - 1] == doctest::Approx(std::pow(1e5, 1.0 / 24)));
  const auto three = default_lambdas(16, 3);
  REQUIRE(three.size() == 3);
  CHECK(three[0] == doctest::Approx(0.04).epsilon(1e-12));
  CHECK(three[1] == doctest::Approx(4.0 * std::sqrt(10.0)).epsilon(1e-12));
  CHECK(three[2] == doctest::Approx(4000.0).epsilon(1e-12));
}

TEST_CASE("verdict rule") {
  CHECK(classify(1, 0.0) == Verdict::trivial);
  CHECK(classify(3, 0.5) == Verdict::trivial);
  CHECK(classify(0, 0.0) == Verdict::white);
  CHECK(classify(0, 1e-12) == Verdict::gray);
  CHECK(classify(0, 0.5) == Verdict::gray);
  CHECK(parse_verdict(to_string(Verdict::gray)) == Verdict::gray);
  CHECK(parse_axis("L") == Axis::L);
  CHECK_THROWS_AS(parse_axis("kappa"), Error);
}

TEST_CASE("grid validation and json") {
  auto g = small_grid();
  CHECK(g.num_cells() == 2 * 2 * 5);
  const auto back = parse_grid(to_json(g));
  CHECK(to_json(back) == to_json(g));
  CHECK(back.resolved_lambdas() == g.resolved_lambdas());

  auto bad = g;
  bad.axis_values.clear();
  CHECK_THROWS_AS(bad.validate(), Error);
  bad = g;
  bad.axis = Axis::d;
  bad.axis_values = {2.5};
  CHECK_THROWS_AS(bad.validate(), Error);
  bad = g;
  bad.axis = Axis::d;
  bad.axis_values = {12.0};
  CHECK_THROWS_AS(bad.validate(), Error);

  const auto parsed = parse_grid(R"({"model": {"n": 100, "d": 4, "L": 3, "kappa": 5},
                                     "axis": "sigma", "values": [0, 0.5], "lambda_count": 7})");
  CHECK(parsed.resolved_lambdas().size() == 7);
  CHECK(parsed.cell_model(1).noise.kind == sim::NoiseKind::gaussian);
  CHECK(parsed.cell_model(1).noise.sigma == 0.5);
  CHECK(parsed.cell_model(0).noise.kind == sim::NoiseKind::none);
  CHECK_THROWS_AS(parse_grid("{"), Error);
}

TEST_CASE("axis overrides") {
  auto g = small_grid();
  g.axis = Axis::d;
  g.axis_values = {1, 3};
  CHECK(g.cell_model(1).dims == std::vector<int>{3, 3});
  g.axis = Axis::L;
  g.axis_values = {4};
  CHECK(g.cell_model(0).dims == std::vector<int>{2, 2, 2, 2});
  CHECK(g.dataset_rng(1, 0).key() != g.dataset_rng(0, 1).key());
  CHECK(g.cluster_rng(0, 0, 1).key() != g.cluster_rng(0, 0, 2).key());
}

TEST_CASE("results do not depend on the worker count") {
  const auto g = small_grid();
  const auto d1 = testing::scratch_dir("exp1");
  const auto d8 = testing::scratch_dir("exp8");
  const auto r1 = run_grid(g, {d1.string(), 1});
  const auto r8 = run_grid(g, {d8.string(), 8});
  CHECK_FALSE(r1.interrupted);
  CHECK(r1.cells.size() == g.num_cells());
  CHECK(read(d1 / "results.csv") == read(d8 / "results.csv"));
  CHECK(read(d1 / "grid.json") == read(d8 / "grid.json"));
  for (std::size_t i = 0; i < r1.cells.size(); ++i) CHECK(r1.cells[i].index == i);

  const auto parsed = parse_results_csv(read(d1 / "results.csv"));
  REQUIRE(parsed.size() == r1.cells.size());
  for (std::size_t i = 0; i < parsed.size(); ++i) {
    CHECK(parsed[i].verdict == r1.cells[i].verdict);
    CHECK(parsed[i].lambda == r1.cells[i].lambda);
    CHECK(parsed[i].trivial_columns == r1.cells[i].trivial_columns);
  }
  CHECK(fs::exists(d1 / "timings.csv"));
  fs::remove_all(d1);
  fs::remove_all(d8);
}

TEST_CASE("verdicts can be recomputed from stored coefficients") {
  auto g = small_grid();
  g.seeds = 1;
  const auto dir = testing::scratch_dir("keep");
  RunOptions opts{dir.string()};
  opts.keep_coefficients = true;
  const auto res = run_grid(g, opts);
  for (const auto& c : res.cells) {
    const fs::path unit = dir / "cells" / ("a" + std::to_string(c.axis_index) + "_s" + std::to_string(c.seed));
    const auto labels = io::read_labels(unit / "labels.txt");
    const Matrix coef = io::read_matrix_csv(unit / ("l" + std::to_string(c.lambda_index) + "_C.csv"));
    CHECK(recompute_verdict(CoefficientMatrix(coef), labels, g.solve.support_rel) == c.verdict);
  }
  // The small-lambda end is trivial and the noiseless large-lambda end is white.
  CHECK(res.cells.front().verdict == Verdict::trivial);
  CHECK(res.cells[4].verdict == Verdict::white);
  fs::remove_all(dir);
}

TEST_CASE("resume after interruption reproduces a clean run") {
  const auto g = small_grid();
  const auto full_dir = testing::scratch_dir("full");
  run_grid(g, {full_dir.string(), 1});

  const auto dir = testing::scratch_dir("resume");
  RunOptions opts{dir.string(), 1};
  int seen = 0;
  opts.on_cell = [&](const GridCellResult&) {
    if (++seen == 7) request_stop();
  };
  const auto partial = run_grid(g, opts);
  clear_stop();
  CHECK(partial.interrupted);
  CHECK(partial.cells.size() == 7);

  RunOptions again{dir.string(), 1};
  again.resume = true;
  const auto resumed = run_grid(g, again);
  CHECK_FALSE(resumed.interrupted);
  // One complete unit (5 lambdas) is reused; the partly done one is redone.
  CHECK(resumed.resumed_cells == 5);
  CHECK(read(dir / "results.csv") == read(full_dir / "results.csv"));

  auto other = g;
  other.master_seed = 18;
  CHECK_THROWS_AS(run_grid(other, again), Error);
  fs::remove_all(full_dir);
  fs::remove_all(dir);
}

TEST_CASE("results csv parsing rejects malformed rows") {
  CHECK_THROWS_AS(parse_results_csv("header\n1,2,3\n"), Error);
  CHECK(parse_results_csv("header\n").empty());
}

}  // TEST_SUITE
