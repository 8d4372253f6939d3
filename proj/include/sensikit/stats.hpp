#pragma once

#include <cstddef>
#include <span>
#include <string_view>

namespace sensikit {

/// Pairwise summation in index order; deterministic for a given input.
double pairwise_sum(std::span<const double> v);

double mean(std::span<const double> v);

/// Sample variance with the (n - 1) normalizer.
double sample_variance(std::span<const double> v);

/// Throws DegenerateData when a (1/n) variance is below 1e-14 times the mean
/// square of `values`.
void require_spread(double variance, std::span<const double> values, std::string_view who);

/// Linear-interpolated quantile (type 7) of a sample; q in [0,1].
double quantile(std::span<const double> v, double q);

}  // namespace sensikit
