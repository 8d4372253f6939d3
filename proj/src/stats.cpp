#include "sensikit/stats.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "sensikit/error.hpp"

namespace sensikit {

double pairwise_sum(std::span<const double> v) {
  if (v.size() <= 8) {
    double s = 0.0;
    for (double t : v) s += t;
    return s;
  }
  const std::size_t half = v.size() / 2;
  return pairwise_sum(v.first(half)) + pairwise_sum(v.subspan(half));
}

double mean(std::span<const double> v) {
  if (v.empty()) throw InvalidArgument("mean of an empty sample");
  return pairwise_sum(v) / static_cast<double>(v.size());
}

double sample_variance(std::span<const double> v) {
  if (v.size() < 2) throw InvalidArgument("variance needs at least two values");
  const double m = mean(v);
  std::vector<double> sq(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) sq[i] = (v[i] - m) * (v[i] - m);
  return pairwise_sum(sq) / static_cast<double>(v.size() - 1);
}

void require_spread(double variance, std::span<const double> values, std::string_view who) {
  std::vector<double> sq(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) sq[i] = values[i] * values[i];
  const double mean_square = pairwise_sum(sq) / static_cast<double>(values.size());
  if (!(variance >= 1e-14 * mean_square) || variance <= 0.0)
    throw DegenerateData(std::string(who) + ": output sample has (numerically) zero variance");
}

double quantile(std::span<const double> v, double q) {
  if (v.empty()) throw InvalidArgument("quantile of an empty sample");
  std::vector<double> s(v.begin(), v.end());
  std::sort(s.begin(), s.end());
  const double pos = q * static_cast<double>(s.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, s.size() - 1);
  return s[lo] + (pos - static_cast<double>(lo)) * (s[hi] - s[lo]);
}

}  // namespace sensikit
