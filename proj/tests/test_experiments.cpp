#include <catch_amalgamated.hpp>

#include <cmath>
#include <cstdlib>

#include "sensikit/error.hpp"
#include "sensikit/experiments.hpp"

using namespace sensikit;
using Catch::Matchers::WithinAbs;

namespace {

ExperimentConfig gfunction_config(Study study) {
  ExperimentConfig c;
  c.study = study;
  c.model.kind = "gfunction";
  c.model.a = {1, 2, 3, 4, 5, 6};
  c.seed = 1;
  return c;
}

}  // namespace

TEST_CASE("config validation", "[experiments]") {
  auto c = gfunction_config(Study::convergence);
  c.sizes = {100, 100};
  CHECK_THROWS_AS(c.validate(), InvalidArgument);
  c.sizes = {100, 200};
  c.replications = 0;
  CHECK_THROWS_AS(c.validate(), InvalidArgument);
  c.replications = 1;
  CHECK_NOTHROW(c.validate());
  auto m = gfunction_config(Study::mse);
  CHECK_THROWS_AS(m.validate(), InvalidArgument);
  CHECK(study_from_string("variance-compare") == Study::variance_compare);
  CHECK_THROWS_AS(study_from_string("bogus"), InvalidArgument);
}

TEST_CASE("model descriptors", "[experiments]") {
  ModelDescriptor d;
  d.kind = "gfunction";
  d.p = 4;
  const auto m = d.build();
  CHECK(m.dim == 4);
  const auto wide = d.with_dimension(8);
  CHECK(wide.a == std::vector<double>{1, 2, 3, 4, 5, 6, 7, 8});
  ModelDescriptor lin;
  lin.kind = "linear";
  lin.alpha = 2.0;
  lin.p = 3;
  CHECK(lin.with_dimension(5).build().dim == 5);
  ModelDescriptor cst;
  cst.kind = "custom";
  cst.custom_name = "ishigami";
  CHECK_THROWS_AS(cst.with_dimension(4), InvalidArgument);
  ModelDescriptor bad;
  bad.kind = "spline";
  CHECK_THROWS_AS(bad.build(), InvalidArgument);
}

TEST_CASE("convergence study shape and determinism", "[experiments]") {
  auto c = gfunction_config(Study::convergence);
  c.sizes = {50};
  c.replications = 1;
  const auto r = run_convergence(c);
  CHECK(r.rows.size() == 12);
  std::size_t rank_rows = 0;
  for (const auto& row : r.rows) {
    if (row.method == kMethodRank) {
      ++rank_rows;
      CHECK(row.size == 350);
    } else {
      CHECK(row.size == 50);
    }
    CHECK(row.abs_error == std::abs(row.estimate - row.exact));
  }
  CHECK(rank_rows == 6);
  CHECK(r.evaluations == 350 + 350);
  const auto again = run_convergence(c);
  for (std::size_t k = 0; k < r.rows.size(); ++k) CHECK(again.rows[k].estimate == r.rows[k].estimate);
}

TEST_CASE("MSE study", "[experiments]") {
  auto c = gfunction_config(Study::mse);
  c.budget = 700;
  c.replications = 50;
  const auto r = run_mse(c);
  CHECK(r.rows.size() == 12);
  CHECK(r.rank_n == 700);
  CHECK(r.pickfreeze_n == 100);
  CHECK(r.rank_evaluations == 50 * 700);
  CHECK(r.pickfreeze_evaluations == 50 * 700);
  for (const auto& row : r.rows) {
    CHECK(row.mean >= 0.0);
    CHECK(row.median >= 0.0);
    CHECK(row.stdev >= 0.0);
    CHECK(row.box.q1 <= row.box.median);
    CHECK(row.box.median <= row.box.q3);
  }
  CHECK(r.row(kMethodRank, 1).index == 1);

  auto tiny = c;
  tiny.budget = 13;
  CHECK_THROWS_AS(run_mse(tiny), InvalidArgument);

  auto cst = c;
  cst.model.kind = "custom";
  cst.model.custom_name = "constant";
  CHECK_THROWS_AS(run_mse(cst), DegenerateData);
}

TEST_CASE("aggregates do not depend on the worker count", "[experiments]") {
  auto c = gfunction_config(Study::mse);
  c.budget = 140;
  c.replications = 40;
  ::setenv("SENSIKIT_THREADS", "1", 1);
  const auto one = run_mse(c);
  ::setenv("SENSIKIT_THREADS", "4", 1);
  const auto four = run_mse(c);
  ::unsetenv("SENSIKIT_THREADS");
  for (std::size_t k = 0; k < one.rows.size(); ++k) {
    CHECK(one.rows[k].mean == four.rows[k].mean);
    CHECK(one.rows[k].stdev == four.rows[k].stdev);
  }
}

TEST_CASE("dimension study skips unusable p", "[experiments]") {
  auto c = gfunction_config(Study::dimension);
  c.model.a.clear();
  c.budget = 60;
  c.replications = 20;
  c.dimensions = {6, 20, 40};
  std::vector<std::string> skipped;
  const auto reports = run_dimension(c, &skipped);
  REQUIRE(reports.size() == 2);
  CHECK(reports[0].p == 6);
  CHECK(reports[1].pickfreeze_n == 2);
  CHECK(skipped.size() == 1);

  c.budget = 200;
  c.dimensions = {50};
  CHECK(run_dimension(c).front().pickfreeze_n == 3);
}

TEST_CASE("variance comparison table", "[experiments]") {
  ExperimentConfig c;
  c.study = Study::variance_compare;
  c.model.kind = "linear";
  c.alphas = {0.5, 1.0, 2.0};
  c.dimensions = {2, 3, 4};
  const auto r = run_variance_compare(c);
  CHECK(r.rows.size() == 18);
  for (const auto& row : r.rows) {
    CHECK(row.pf_minus_rank() == row.v_pf - row.v_rank);
    CHECK(row.v_rank <= row.v_pf);
  }
  c.model.kind = "gfunction";
  CHECK_THROWS_AS(run_variance_compare(c), InvalidArgument);
}

TEST_CASE("box statistics", "[experiments]") {
  const auto b = box_stats({1, 2, 3, 4, 5, 6, 7, 8, 100});
  CHECK(b.median == 5.0);
  CHECK(b.q1 == 3.0);
  CHECK(b.q3 == 7.0);
  CHECK(b.whisker_hi == 8.0);
  CHECK(b.outliers == std::vector<double>{100.0});
  CHECK_THROWS_AS(box_stats({}), InvalidArgument);
}
