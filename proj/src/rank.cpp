#include "sensikit/rank.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "sensikit/error.hpp"
#include "sensikit/stats.hpp"

namespace sensikit {

namespace {

void check_pair(std::span<const double> v, std::span<const double> y) {
  if (v.size() != y.size())
    throw InvalidArgument("input and output samples differ in length (" +
                          std::to_string(v.size()) + " vs " + std::to_string(y.size()) + ")");
  if (v.size() < 2) throw InvalidArgument("at least two observations are required");
  for (double t : y)
    if (std::isnan(t)) throw InvalidArgument("output sample contains NaN");
}

}  // namespace

RankData compute_ranks(std::span<const double> v) {
  const std::size_t n = v.size();
  if (n < 2) throw InvalidArgument("at least two observations are required");
  for (double t : v)
    if (std::isnan(t)) throw InvalidArgument("conditioning sample contains NaN");

  RankData r;
  r.order.resize(n);
  std::iota(r.order.begin(), r.order.end(), std::size_t{0});
  std::stable_sort(r.order.begin(), r.order.end(),
                   [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  r.rank.resize(n);
  for (std::size_t k = 0; k < n; ++k) r.rank[r.order[k]] = k;
  for (std::size_t k = 1; k < n; ++k) {
    if (v[r.order[k]] == v[r.order[k - 1]]) {
      r.ties = true;
      break;
    }
  }
  return r;
}

std::vector<std::size_t> neighbor_map(const RankData& ranks, NeighborKind kind) {
  const std::size_t n = ranks.size();
  std::vector<std::size_t> map(n);
  for (std::size_t j = 0; j < n; ++j) {
    const std::size_t r = ranks.rank[j];
    if (r + 1 < n)
      map[j] = ranks.order[r + 1];
    else
      map[j] = kind == NeighborKind::cyclic ? ranks.order[0] : j;
  }
  return map;
}

double chatterjee_spread(std::span<const double> y) {
  const std::size_t n = y.size();
  if (n == 0) throw InvalidArgument("chatterjee_spread: empty sample");
  std::vector<double> sorted(y.begin(), y.end());
  std::sort(sorted.begin(), sorted.end());
  long double spread = 0.0L;
  for (double t : y) {
    const auto below = static_cast<long double>(std::upper_bound(sorted.begin(), sorted.end(), t) -
                                                sorted.begin());
    spread += below * (static_cast<long double>(n) - below);
  }
  const long double nn = static_cast<long double>(n);
  return static_cast<double>(spread / (nn * nn * nn));
}

double chatterjee_xi(std::span<const double> v, std::span<const double> y) {
  check_pair(v, y);
  const std::size_t n = y.size();
  const auto next = neighbor_map(compute_ranks(v), NeighborKind::prime);

  std::vector<double> sorted(y.begin(), y.end());
  std::sort(sorted.begin(), sorted.end());
  // #{k : Y_k <= t}
  auto count_le = [&](double t) {
    return static_cast<std::size_t>(std::upper_bound(sorted.begin(), sorted.end(), t) -
                                    sorted.begin());
  };
  // #{k : Y_k >= t}
  auto count_ge = [&](double t) {
    return n - static_cast<std::size_t>(std::lower_bound(sorted.begin(), sorted.end(), t) -
                                        sorted.begin());
  };

  // Integer counts keep the normalizations exact: everything below is a
  // ratio of sums of counts scaled by n^3.
  long double joint = 0.0L;
  long double survival_sq = 0.0L;
  long double spread = 0.0L;
  for (std::size_t j = 0; j < n; ++j) {
    const std::size_t both = count_le(std::min(y[j], y[next[j]]));
    const std::size_t above = count_ge(y[j]);
    const std::size_t below = count_le(y[j]);
    joint += static_cast<long double>(both);
    survival_sq += static_cast<long double>(above) * above;
    spread += static_cast<long double>(below) * (n - below);
  }
  if (spread == 0.0L) throw DegenerateData("chatterjee_xi: output sample is constant");
  const long double nn = static_cast<long double>(n);
  return static_cast<double>((nn * joint - survival_sq) / spread);
}

double chi_general(std::span<const double> v, std::span<const double> y, const ScalarMap& g,
                   const ScalarMap& h, const ChiOptions& options) {
  check_pair(v, y);
  const std::size_t n = y.size();
  const auto next = neighbor_map(compute_ranks(v), options.kind);
  auto clamp = [&](double t) {
    if (!std::isfinite(t)) throw DegenerateData("chi_general: g or h is not finite on the sample");
    return options.clip ? std::clamp(t, -*options.clip, *options.clip) : t;
  };
  std::vector<double> gy(n), hy(n);
  for (std::size_t j = 0; j < n; ++j) {
    gy[j] = clamp(g(y[j]));
    hy[j] = clamp(h(y[j]));
  }
  std::vector<double> terms(n);
  for (std::size_t j = 0; j < n; ++j) terms[j] = gy[j] * hy[next[j]];
  return pairwise_sum(terms) / static_cast<double>(n);
}

double rank_sobol(std::span<const double> v, std::span<const double> y,
                  const RankSobolOptions& options) {
  check_pair(v, y);
  const std::size_t n = y.size();
  std::vector<double> yy(y.begin(), y.end());
  if (options.clip) {
    if (!(*options.clip > 0.0)) throw InvalidArgument("clip must be positive");
    for (double& t : yy) t = std::clamp(t, -*options.clip, *options.clip);
  }
  const auto next = neighbor_map(compute_ranks(v), NeighborKind::cyclic);
  // N is a permutation, so (1/n) sum Y_j Y_N(j) - Ybar^2 equals the centered
  // cross moment below.
  const double mean = pairwise_sum(yy) / static_cast<double>(n);
  std::vector<double> centered(n), cross(n), square(n);
  for (std::size_t j = 0; j < n; ++j) centered[j] = yy[j] - mean;
  for (std::size_t j = 0; j < n; ++j) {
    cross[j] = centered[j] * centered[next[j]];
    square[j] = centered[j] * centered[j];
  }
  const double var = pairwise_sum(square) / static_cast<double>(n);
  require_spread(var, yy, "rank_sobol");
  return pairwise_sum(cross) / static_cast<double>(n) / var;
}

std::vector<double> rank_sobol_all(const IidDesign& design, const RankSobolOptions& options) {
  std::vector<double> out(design.p);
  for (std::size_t i = 0; i < design.p; ++i) out[i] = rank_sobol(design.column(i), design.y, options);
  return out;
}

std::vector<double> rank_cvm_all(const IidDesign& design) {
  std::vector<double> out(design.p);
  for (std::size_t i = 0; i < design.p; ++i) out[i] = chatterjee_xi(design.column(i), design.y);
  return out;
}

}  // namespace sensikit
