#pragma once

#include <cstddef>
#include <optional>
#include <span>

#include "sensikit/models.hpp"
#include "sensikit/random.hpp"
#include "sensikit/sampling.hpp"

namespace sensikit {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  double level = 0.0;
};

/// An index estimate with its cost. `sigma` is the asymptotic standard
/// deviation of sqrt(n) (value - index), when known.
struct Estimate {
  double value = 0.0;
  std::size_t n = 0;
  std::size_t evaluations = 0;
  std::optional<double> sigma;
  std::optional<Interval> ci;
};

/// Pick-Freeze estimator with separate means and the (1/n) variance of Y.
double sobol_sn(std::span<const double> y, std::span<const double> y_u);
Estimate sobol_sn(const PickFreezeDesign& d);

/// Pick-Freeze estimator with pooled means and variances; symmetric in
/// (y, y_u).
double sobol_tn(std::span<const double> y, std::span<const double> y_u);
Estimate sobol_tn(const PickFreezeDesign& d);

/// Cramér-von-Mises index from a triple design; W supplies the integration
/// nodes and indicators use <=.
double cvm_pickfreeze(std::span<const double> y, std::span<const double> y_u,
                      std::span<const double> w);
Estimate cvm_pickfreeze(const TripleDesign& d);

/// Both sides of Var(E[Y|X_u]) = Cov(Y, Y^u).
struct PickFreezeIdentity {
  /// Empirical Cov(Y, Y^u) from n Pick-Freeze pairs.
  double covariance = 0.0;
  /// Nested Monte-Carlo Var(E[Y|X_u]) with about n model calls.
  double conditional_variance = 0.0;
};

PickFreezeIdentity pf_identity_check(const Model& model, std::span<const std::size_t> u,
                                     std::size_t n, const RngStream& stream);

}  // namespace sensikit
