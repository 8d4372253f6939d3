// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// non-zero if any fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>
#include <string>
#include <vector>

#include "sensikit/asymptotics.hpp"
#include "sensikit/experiments.hpp"
#include "sensikit/parallel.hpp"
#include "sensikit/pickfreeze.hpp"
#include "sensikit/rank.hpp"
#include "sensikit/sampling.hpp"
#include "sensikit/stats.hpp"

using namespace sensikit;

namespace {

constexpr std::uint64_t kSeed = 20240601;

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail += (detail.empty() ? "" : "; ") + std::string("failed: ") + what;
    }
  }
  void note(const std::string& s) { detail += (detail.empty() ? "" : "; ") + s; }
};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

int failures = 0;

void criterion(int id, const char* name, double limit_seconds, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o.pass = false;
    o.detail = std::string("exception: ") + e.what();
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  o.require(secs <= limit_seconds, "runtime " + num(secs) + " s > " + num(limit_seconds) + " s");
  if (!o.pass) ++failures;
  std::printf("%s criterion %d %s: %s (%.2f s)\n", o.pass ? "PASS" : "FAIL", id, name,
              o.detail.c_str(), secs);
  std::fflush(stdout);
}

ExperimentConfig gfunction6(Study study) {
  ExperimentConfig c;
  c.study = study;
  c.model.kind = "gfunction";
  c.model.a = {1, 2, 3, 4, 5, 6};
  c.seed = kSeed;
  return c;
}

Outcome fixed_budget() {
  auto c = gfunction6(Study::mse);
  c.budget = 700;
  c.replications = 500;
  const auto r = run_mse(c);
  Outcome o;
  const double rank1 = r.row(kMethodRank, 1).mean;
  const double pf1 = r.row(kMethodPickFreeze, 1).mean;
  o.note("rank MSE(S1) " + num(rank1) + ", PF MSE(S1) " + num(pf1));
  o.require(rank1 >= 0.0005 && rank1 <= 0.002, "rank MSE(S1) in [0.0005, 0.002]");
  o.require(pf1 >= 0.005 && pf1 <= 0.02, "PF MSE(S1) in [0.005, 0.02]");
  for (std::size_t i = 1; i <= 6; ++i)
    o.require(r.row(kMethodRank, i).mean < r.row(kMethodPickFreeze, i).mean,
              "rank < PF for S" + std::to_string(i));
  return o;
}

Outcome small_budget() {
  auto c = gfunction6(Study::mse);
  c.budget = 70;
  c.replications = 500;
  const auto r = run_mse(c);
  Outcome o;
  const double rank1 = r.row(kMethodRank, 1).mean;
  const double pf1 = r.row(kMethodPickFreeze, 1).mean;
  o.note("PF MSE(S1) " + num(pf1) + " (ref 0.1129), rank MSE(S1) " + num(rank1) + " (ref 0.0117)");
  o.require(pf1 >= 0.1129 / 2 && pf1 <= 0.1129 * 2, "PF within a factor 2");
  o.require(rank1 >= 0.0117 / 2 && rank1 <= 0.0117 * 2, "rank within a factor 2");
  return o;
}

Outcome convergence() {
  auto c = gfunction6(Study::convergence);
  c.sizes = {100, 500, 1000};
  c.replications = 1;
  const auto r = run_convergence(c);
  const double e100 = r.max_error(kMethodRank, 700);
  const double e1000 = r.max_error(kMethodRank, 7000);
  Outcome o;
  o.note("rank max |error| at N=100: " + num(e100) + ", at N=1000: " + num(e1000));
  o.require(e1000 <= 0.05, "max error at N=1000 <= 0.05");
  o.require(e1000 < e100, "error shrinks from N=100 to N=1000");
  return o;
}

Outcome dimension() {
  auto c = gfunction6(Study::dimension);
  c.model.a.clear();
  c.budget = 200;
  c.replications = 200;
  c.dimensions = {6, 10, 15, 20};
  std::vector<std::string> skipped;
  const auto reports = run_dimension(c, &skipped);
  Outcome o;
  o.require(skipped.empty() && reports.size() == 4, "all four dimensions run");
  double worst = 0.0;
  for (const auto& r : reports)
    for (std::size_t i = 1; i <= r.p; ++i) {
      const double rk = r.row(kMethodRank, i).mean;
      const double pf = r.row(kMethodPickFreeze, i).mean;
      worst = std::max(worst, rk / pf);
      o.require(rk <= pf, "rank <= PF at p=" + std::to_string(r.p) + " S" + std::to_string(i));
    }
  o.note("largest rank/PF MSE ratio " + num(worst));
  return o;
}

Outcome plugin_consistency() {
  const double closed = v_rank(2.0, 3)[0];
  const auto mc = sigma_plugin(make_linear({2.0, 3}), 1000000, {kSeed, 5});
  const double est = mc.sigma_b(0, 0) + mc.sigma_c(0, 0);
  const double rel = std::abs(est - closed) / closed;
  Outcome o;
  o.note("closed " + num(closed) + ", plug-in " + num(est) + ", rel diff " + num(rel));
  o.require(rel <= 0.02, "relative difference <= 2%");
  return o;
}

Outcome clt() {
  const double alpha = 2.0;
  const std::size_t p = 3, n = 5000, reps = 1000;
  const auto model = make_linear({alpha, p});
  const double target = linear_exact_sobol({alpha, p})[0];
  const double sigma2 = linear_sigma_components(alpha, p, 0).sigma2;
  std::vector<double> est(reps);
  parallel_for(reps, [&](std::size_t r) {
    const auto d = sample_iid(model, n, RngStream{kSeed, derive_stream_id(6, r)});
    est[r] = rank_sobol(d.column(0), d.y);
  });
  std::vector<double> scaled(reps);
  std::size_t covered = 0;
  for (std::size_t r = 0; r < reps; ++r) {
    scaled[r] = std::sqrt(static_cast<double>(n)) * (est[r] - target);
    Estimate e;
    e.value = est[r];
    e.n = n;
    const auto ci = confidence_interval(e, sigma2, 0.95);
    if (ci.lo <= target && target <= ci.hi) ++covered;
  }
  const double var = sample_variance(scaled);
  const double coverage = static_cast<double>(covered) / reps;
  Outcome o;
  o.note("var " + num(var) + " vs sigma2 " + num(sigma2) + ", coverage " + num(coverage));
  o.require(std::abs(var - sigma2) <= 0.15 * sigma2, "variance within 15%");
  o.require(coverage >= 0.92 && coverage <= 0.98, "coverage in [0.92, 0.98]");
  return o;
}

std::vector<double> draw(std::size_t n, std::uint64_t stream) {
  auto gen = RngStream{kSeed, stream}.generator();
  std::vector<double> v(n);
  for (auto& x : v) x = gen.uniform();
  return v;
}

bool close(double a, double b, double rel) {
  return std::abs(a - b) <= rel * std::max(std::abs(a), std::abs(b)) || a == b;
}

Outcome invariants() {
  Outcome o;
  const std::vector<std::function<double(double)>> maps = {
      [](double x) { return 3.0 * x - 2.0; },
      [](double x) { return x * x * x; },
      [](double x) { return std::exp(x); },
  };
  const ScalarMap sq = [](double y) { return y * y; };
  bool monotone = true;
  for (std::uint64_t s = 0; s < 100; ++s) {
    const auto v = draw(300, 1000 + s);
    auto y = draw(300, 2000 + s);
    for (std::size_t j = 0; j < y.size(); ++j) y[j] += std::sin(5.0 * v[j]);
    const double xi = chatterjee_xi(v, y), rs = rank_sobol(v, y), ch = chi_general(v, y, sq, sq);
    for (const auto& f : maps) {
      std::vector<double> t(v.size());
      std::transform(v.begin(), v.end(), t.begin(), f);
      monotone = monotone && chatterjee_xi(t, y) == xi && rank_sobol(t, y) == rs &&
                 chi_general(t, y, sq, sq) == ch;
    }
  }
  o.require(monotone, "monotone-transform invariance");

  bool swap = true, affine = true;
  const auto g = make_gfunction({{0, 1, 4.5}});
  const std::size_t u[] = {0};
  for (std::uint64_t r = 0; r < 100; ++r) {
    const auto d = sample_pickfreeze(g, u, 250, {kSeed, 3000 + r});
    swap = swap && sobol_tn(d.y, d.y_u) == sobol_tn(d.y_u, d.y);
    const auto iid = sample_iid(g, 250, {kSeed, 4000 + r});
    const auto x1 = iid.column(0);
    for (double a : {-2.5, 0.01, 7.0}) {
      auto ay = d.y, ayu = d.y_u, ai = iid.y;
      for (auto& v : ay) v = a * v + 3.0;
      for (auto& v : ayu) v = a * v + 3.0;
      for (auto& v : ai) v = a * v + 3.0;
      affine = affine && close(sobol_sn(ay, ayu), sobol_sn(d.y, d.y_u), 1e-10) &&
               close(sobol_tn(ay, ayu), sobol_tn(d.y, d.y_u), 1e-10) &&
               close(rank_sobol(x1, ai), rank_sobol(x1, iid.y), 1e-10);
    }
  }
  o.require(swap, "T_n swap symmetry");
  o.require(affine, "affine output invariance");

  bool denominator = true;
  for (std::size_t n = 2; n <= 50; ++n) {
    const double nn = static_cast<double>(n);
    denominator = denominator && close(chatterjee_spread(draw(n, 5000 + n)),
                                       (nn * nn - 1.0) / (6.0 * nn * nn), 1e-10);
  }
  o.require(denominator, "xi denominator (n^2-1)/(6n^2)");

  bool cyclic = true;
  std::size_t permutations = 0;
  for (std::size_t n = 2; n <= 8; ++n) {
    std::vector<double> v(n);
    std::iota(v.begin(), v.end(), 0.0);
    do {
      ++permutations;
      const auto map = neighbor_map(compute_ranks(v), NeighborKind::cyclic);
      std::vector<bool> seen(n, false);
      for (std::size_t j = 0; j < n; ++j) {
        cyclic = cyclic && map[j] != j && !seen[map[j]];
        seen[map[j]] = true;
      }
    } while (std::next_permutation(v.begin(), v.end()));
  }
  o.require(cyclic, "cyclic map fixed-point-free bijection");
  o.note(std::to_string(permutations) + " permutations checked");
  return o;
}

Outcome pf_identity() {
  Outcome o;
  for (double alpha : {1.0, 2.0}) {
    const std::size_t p = alpha == 1.0 ? 2 : 3;
    const std::size_t u[] = {0};
    const auto r = pf_identity_check(make_linear({alpha, p}), u, 1000000,
                                     {kSeed, 8 + static_cast<std::uint64_t>(alpha)});
    const double exact = alpha * alpha / 12.0;
    const double rel_exact = std::abs(r.covariance - exact) / exact;
    const double rel_nested = std::abs(r.covariance - r.conditional_variance) /
                              std::abs(r.conditional_variance);
    o.note("alpha " + num(alpha) + ": cov " + num(r.covariance) + " (" + num(100 * rel_exact) +
           "% from alpha^2/12), nested " + num(r.conditional_variance) + " (" +
           num(100 * rel_nested) + "%)");
    o.require(rel_exact <= 0.01, "cov within 1% of alpha^2/12");
    o.require(rel_nested <= 0.015, "cov within 1.5% of the nested oracle");
  }
  return o;
}

Outcome orderings() {
  Outcome o;
  bool order = true, gap = true;
  double worst_gap = 0.0;
  for (std::size_t p = 2; p <= 7; ++p)
    for (int k = 1; k <= 40; ++k) {
      const double alpha = 0.1 * k;
      const auto pf = v_pf(alpha, p), rk = v_rank(alpha, p), ef = v_eff(alpha, p);
      const auto m = linear_moments(alpha, p);
      for (std::size_t i = 0; i < p; ++i) {
        order = order && rk[i] <= pf[i];
        const double v = i == 0 ? m.vp : m.vpa;
        const double err = std::abs((rk[i] - ef[i]) - v * v);
        worst_gap = std::max(worst_gap, err);
        gap = gap && err <= 1e-10;
      }
    }
  o.require(order, "V_Rank <= V_PF");
  o.require(gap, "V_Rank - V_Eff = v^2");
  o.note("max |V_Rank - V_Eff - v^2| = " + num(worst_gap));
  return o;
}

}  // namespace

int main() {
  criterion(1, "fixed-budget-mse", 300, fixed_budget);
  criterion(2, "small-budget-mse", 60, small_budget);
  criterion(3, "convergence", 60, convergence);
  criterion(4, "dimension", 180, dimension);
  criterion(5, "variance-plugin", 60, plugin_consistency);
  criterion(6, "clt-coverage", 300, clt);
  criterion(7, "exact-invariants", 10, invariants);
  criterion(8, "pick-freeze-identity", 30, pf_identity);
  criterion(9, "variance-orderings", 1, orderings);
  std::printf("%d of 9 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
