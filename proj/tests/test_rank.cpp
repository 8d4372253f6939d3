#include <catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>

#include "sensikit/error.hpp"
#include "sensikit/rank.hpp"
#include "sensikit/sampling.hpp"

using namespace sensikit;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

std::vector<double> uniforms(std::size_t n, std::uint64_t seed) {
  auto gen = RngStream{seed, 77}.generator();
  std::vector<double> v(n);
  for (auto& x : v) x = gen.uniform();
  return v;
}

}  // namespace

TEST_CASE("ranks and neighbour maps on a small sample", "[rank]") {
  const std::vector<double> v = {0.3, 0.9, 0.1};
  const auto r = compute_ranks(v);
  CHECK(r.rank == std::vector<std::size_t>{1, 2, 0});
  CHECK(r.order == std::vector<std::size_t>{2, 0, 1});
  CHECK_FALSE(r.ties);
  CHECK(neighbor_map(r, NeighborKind::cyclic) == std::vector<std::size_t>{1, 2, 0});
  CHECK(neighbor_map(r, NeighborKind::prime) == std::vector<std::size_t>{1, 1, 0});

  const std::vector<double> sorted = {1, 2, 3, 4};
  CHECK(compute_ranks(sorted).rank == std::vector<std::size_t>{0, 1, 2, 3});

  const std::vector<double> dup = {0.5, 0.2, 0.5, 0.1};
  const auto rd = compute_ranks(dup);
  CHECK(rd.ties);
  CHECK(rd.rank == std::vector<std::size_t>{2, 1, 3, 0});

  const std::vector<double> one = {1.0};
  CHECK_THROWS_AS(compute_ranks(one), InvalidArgument);
  const std::vector<double> nan = {1.0, std::nan("")};
  CHECK_THROWS_AS(compute_ranks(nan), InvalidArgument);
}

TEST_CASE("neighbour maps over every permutation up to n = 8", "[rank]") {
  for (std::size_t n = 2; n <= 8; ++n) {
    std::vector<double> v(n);
    std::iota(v.begin(), v.end(), 1.0);
    do {
      const auto r = compute_ranks(v);
      const auto cyc = neighbor_map(r, NeighborKind::cyclic);
      const auto pri = neighbor_map(r, NeighborKind::prime);
      std::vector<bool> hit(n, false);
      std::size_t prime_fixed = 0;
      for (std::size_t j = 0; j < n; ++j) {
        REQUIRE(cyc[j] != j);
        hit[cyc[j]] = true;
        if (pri[j] == j) ++prime_fixed;
      }
      REQUIRE(std::all_of(hit.begin(), hit.end(), [](bool b) { return b; }));
      REQUIRE(prime_fixed == 1);
      // One n-cycle: following N from any point visits everything.
      std::size_t j = 0, steps = 0;
      do {
        j = cyc[j];
        ++steps;
      } while (j != 0);
      REQUIRE(steps == n);
    } while (std::next_permutation(v.begin(), v.end()));
  }
}

TEST_CASE("Chatterjee denominator on tie-free data", "[rank]") {
  for (std::size_t n = 2; n <= 50; ++n) {
    const auto y = uniforms(n, n);
    const double nn = static_cast<double>(n);
    CHECK_THAT(chatterjee_spread(y), WithinRel((nn * nn - 1.0) / (6.0 * nn * nn), 1e-12));
    // With Y = V the numerator equals the denominator.
    CHECK_THAT(chatterjee_xi(y, y), WithinRel(1.0, 1e-12));
  }
}

TEST_CASE("Chatterjee xi limits", "[rank]") {
  const auto v = uniforms(10000, 1);
  CHECK(chatterjee_xi(v, v) >= 0.99);
  const auto w = uniforms(10000, 2);
  CHECK_THAT(chatterjee_xi(v, w), WithinAbs(0.0, 0.05));
  const std::vector<double> c(10, 2.0);
  const auto v10 = uniforms(10, 3);
  CHECK_THROWS_AS(chatterjee_xi(v10, c), DegenerateData);
}

TEST_CASE("chi with survival indicators reproduces xi", "[rank]") {
  // xi numerator with the prime map, rebuilt from chi over the sample grid:
  // (1/n) sum_t chi(1_{[t, inf)}, 1_{[t, inf)}) - (1/n) sum_t G(t)^2.
  for (std::uint64_t seed : {4u, 5u, 6u}) {
    const std::size_t n = 60;
    const auto v = uniforms(n, seed);
    auto y = uniforms(n, seed + 100);
    for (std::size_t j = 0; j < n; ++j) y[j] += v[j];
    const double nn = static_cast<double>(n);
    double num = 0.0, den = 0.0;
    for (double t : y) {
      const ScalarMap ind = [t](double s) { return s >= t ? 1.0 : 0.0; };
      const double chi = chi_general(v, y, ind, ind, {NeighborKind::prime, std::nullopt});
      double g = 0.0, f = 0.0;
      for (double s : y) {
        g += s >= t ? 1.0 : 0.0;
        f += s <= t ? 1.0 : 0.0;
      }
      g /= nn;
      f /= nn;
      num += (chi - g * g) / nn;
      den += f * (1.0 - f) / nn;
    }
    CHECK_THAT(chatterjee_xi(v, y), WithinRel(num / den, 1e-12));
  }
}

TEST_CASE("chi_general basics and consistency", "[rank]") {
  const auto v = uniforms(500, 8);
  const ScalarMap one = [](double) { return 1.0; };
  const ScalarMap id = [](double s) { return s; };
  CHECK(chi_general(v, v, one, one) == 1.0);
  std::vector<double> s = v;
  std::sort(s.begin(), s.end());
  double expect = 0.0;
  for (std::size_t k = 0; k < s.size(); ++k) expect += s[k] * s[(k + 1) % s.size()];
  CHECK_THAT(chi_general(v, v, id, id), WithinRel(expect / 500.0, 1e-12));
  const ScalarMap inf = [](double) { return std::numeric_limits<double>::infinity(); };
  CHECK_THROWS_AS(chi_general(v, v, inf, one), DegenerateData);

  // g = h = sin(pi Y / 2) with Y = V + W, both uniform: E[g(Y)|V] is explicit
  // and E[E[g(Y)|V]^2] comes from a midpoint rule.
  const auto cond = [](double x) {
    // int_0^1 sin(pi (x + w) / 2) dw
    return (2.0 / std::numbers::pi) * (std::cos(std::numbers::pi * x / 2.0) - std::cos(std::numbers::pi * (x + 1.0) / 2.0));
  };
  double target = 0.0;
  const int grid = 200000;
  for (int k = 0; k < grid; ++k) {
    const double x = (k + 0.5) / grid;
    target += cond(x) * cond(x) / grid;
  }
  const ScalarMap g = [](double y) { return std::sin(std::numbers::pi * y / 2.0); };
  std::vector<double> errors;
  double band = 0.0;
  for (std::size_t n : {1000u, 10000u, 100000u}) {
    const auto vv = uniforms(n, 11);
    auto yy = uniforms(n, 12);
    for (std::size_t j = 0; j < n; ++j) yy[j] += vv[j];
    errors.push_back(std::abs(chi_general(vv, yy, g, g) - target));
    // Standard error of a mean of g(Y) g(Y'), |g| <= 1.
    band = 3.0 / std::sqrt(static_cast<double>(n));
  }
  CHECK(errors[2] < errors[0]);
  CHECK(errors[2] <= band);
}

TEST_CASE("rank Sobol' estimator", "[rank]") {
  const auto v = uniforms(10000, 21);
  CHECK(rank_sobol(v, v) >= 0.995);
  const auto w = uniforms(10000, 22);
  CHECK_THAT(rank_sobol(v, w), WithinAbs(0.0, 0.05));
  const std::vector<double> c(10, 1.0);
  CHECK_THROWS_AS(rank_sobol(std::span(v).first(10), c), DegenerateData);

  const auto g = make_gfunction({{1, 2, 3, 4, 5, 6}});
  const auto design = sample_iid(g, 70000, {42, 1});
  const auto est = rank_sobol_all(design);
  for (std::size_t i = 0; i < 6; ++i) CHECK_THAT(est[i], WithinAbs((*g.exact_sobol)[i], 0.02));
  CHECK(design.evaluations == 70000);

  const auto lin = sample_iid(make_linear({1.0, 2}), 100000, {1, 1});
  for (double s : rank_sobol_all(lin)) CHECK_THAT(s, WithinAbs(0.5, 0.02));
  const auto cvm = rank_cvm_all(lin);
  CHECK(cvm.size() == 2);

  // Clipping at a level above every output changes nothing.
  const auto col = lin.column(0);
  CHECK(rank_sobol(col, lin.y, {10.0}) == rank_sobol(col, lin.y));
  CHECK(rank_sobol(col, lin.y, {0.5}) != rank_sobol(col, lin.y));
}

TEST_CASE("rank CvM estimator on designs", "[rank]") {
  const auto x1 = make_custom("x1");
  const auto d = sample_iid(x1, 10000, {5, 5});
  const auto est = rank_cvm_all(d);
  CHECK(est[0] >= 0.99);
  CHECK_THAT(est[1], WithinAbs(0.0, 0.05));

  // Row order does not matter.
  IidDesign shuffled = d;
  std::mt19937_64 rng(1);
  std::vector<std::size_t> perm(d.n);
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);
  for (std::size_t j = 0; j < d.n; ++j) {
    shuffled.y[j] = d.y[perm[j]];
    for (std::size_t k = 0; k < d.p; ++k) shuffled.x[j * d.p + k] = d.x[perm[j] * d.p + k];
  }
  CHECK(rank_cvm_all(shuffled) == est);
  // The Sobol' form sums floating-point products, so only rounding differs.
  const auto a = rank_sobol_all(shuffled), b = rank_sobol_all(d);
  for (std::size_t i = 0; i < a.size(); ++i) CHECK_THAT(a[i], WithinAbs(b[i], 1e-12));
}

TEST_CASE("rank estimators are invariant under increasing maps of V", "[rank]") {
  const std::vector<std::function<double(double)>> maps = {
      [](double x) { return 3.0 * x + 7.0; },
      [](double x) { return x * x * x; },
      [](double x) { return std::exp(x); },
  };
  const ScalarMap sq = [](double y) { return y * y; };
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto v = uniforms(200, 1000 + seed);
    auto y = uniforms(200, 2000 + seed);
    for (std::size_t j = 0; j < y.size(); ++j) y[j] += std::sin(6.0 * v[j]);
    const double xi = chatterjee_xi(v, y);
    const double rs = rank_sobol(v, y);
    const double ch = chi_general(v, y, sq, sq);
    for (const auto& f : maps) {
      std::vector<double> t(v.size());
      std::transform(v.begin(), v.end(), t.begin(), f);
      REQUIRE(compute_ranks(t).rank == compute_ranks(v).rank);
      REQUIRE(chatterjee_xi(t, y) == xi);
      REQUIRE(rank_sobol(t, y) == rs);
      REQUIRE(chi_general(t, y, sq, sq) == ch);
    }
  }
}
