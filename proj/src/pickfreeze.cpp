#include "sensikit/pickfreeze.hpp"

#include <algorithm>
#include <string>
#include <vector>

#include "sensikit/error.hpp"
#include "sensikit/stats.hpp"

namespace sensikit {

namespace {

void check_same_length(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size())
    throw InvalidArgument("Pick-Freeze samples differ in length (" + std::to_string(a.size()) +
                          " vs " + std::to_string(b.size()) + ")");
  if (a.size() < 2) throw InvalidArgument("at least two Pick-Freeze pairs are required");
}

Estimate wrap(double value, std::size_t n, std::size_t evaluations) {
  Estimate e;
  e.value = value;
  e.n = n;
  e.evaluations = evaluations;
  return e;
}

}  // namespace

double sobol_sn(std::span<const double> y, std::span<const double> y_u) {
  check_same_length(y, y_u);
  const std::size_t n = y.size();
  const double my = mean(y);
  const double mu = mean(y_u);
  std::vector<double> cross(n), square(n);
  for (std::size_t j = 0; j < n; ++j) {
    cross[j] = (y[j] - my) * (y_u[j] - mu);
    square[j] = (y[j] - my) * (y[j] - my);
  }
  const double var = pairwise_sum(square) / static_cast<double>(n);
  require_spread(var, y, "sobol_sn");
  return pairwise_sum(cross) / static_cast<double>(n) / var;
}

Estimate sobol_sn(const PickFreezeDesign& d) {
  return wrap(sobol_sn(d.y, d.y_u), d.n(), d.evaluations);
}

double sobol_tn(std::span<const double> y, std::span<const double> y_u) {
  check_same_length(y, y_u);
  const std::size_t n = y.size();
  const double pooled = (pairwise_sum(y) + pairwise_sum(y_u)) / (2.0 * static_cast<double>(n));
  std::vector<double> cross(n), square(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double a = y[j] - pooled;
    const double b = y_u[j] - pooled;
    cross[j] = a * b;
    square[j] = 0.5 * (a * a + b * b);
  }
  const double var = pairwise_sum(square) / static_cast<double>(n);
  std::vector<double> both(y.begin(), y.end());
  both.insert(both.end(), y_u.begin(), y_u.end());
  require_spread(var, both, "sobol_tn");
  return pairwise_sum(cross) / static_cast<double>(n) / var;
}

Estimate sobol_tn(const PickFreezeDesign& d) {
  return wrap(sobol_tn(d.y, d.y_u), d.n(), d.evaluations);
}

double cvm_pickfreeze(std::span<const double> y, std::span<const double> y_u,
                      std::span<const double> w) {
  check_same_length(y, y_u);
  if (w.size() != y.size()) throw InvalidArgument("W sample length differs from Y sample length");
  const std::size_t n = y.size();
  std::vector<double> sy(y.begin(), y.end());
  std::vector<double> su(y_u.begin(), y_u.end());
  std::vector<double> smax(n);
  for (std::size_t j = 0; j < n; ++j) smax[j] = std::max(y[j], y_u[j]);
  std::sort(sy.begin(), sy.end());
  std::sort(su.begin(), su.end());
  std::sort(smax.begin(), smax.end());
  auto count_le = [](const std::vector<double>& s, double t) {
    return static_cast<long double>(std::upper_bound(s.begin(), s.end(), t) - s.begin());
  };

  // Y_j <= W_k and Y^u_j <= W_k  <=>  max(Y_j, Y^u_j) <= W_k.
  const long double nn = static_cast<long double>(n);
  long double num = 0.0L;
  long double den = 0.0L;
  for (double node : w) {
    const long double a = count_le(sy, node);
    const long double b = count_le(su, node);
    const long double c = count_le(smax, node);
    num += nn * c - a * b;
    den += nn * a - a * a;
  }
  if (den == 0.0L) throw DegenerateData("cvm_pickfreeze: denominator is zero (constant output?)");
  return static_cast<double>(num / den);
}

Estimate cvm_pickfreeze(const TripleDesign& d) {
  return wrap(cvm_pickfreeze(d.y, d.y_u, d.w), d.n(), d.evaluations);
}

PickFreezeIdentity pf_identity_check(const Model& model, std::span<const std::size_t> u,
                                     std::size_t n, const RngStream& stream) {
  if (n < 100) throw InvalidArgument("pf_identity_check needs n >= 100");
  PickFreezeIdentity out;

  const auto design = sample_pickfreeze(model, u, n, stream.substream(0));
  const double my = mean(design.y);
  const double mu = mean(design.y_u);
  std::vector<double> cross(n);
  for (std::size_t j = 0; j < n; ++j) cross[j] = (design.y[j] - my) * (design.y_u[j] - mu);
  out.covariance = pairwise_sum(cross) / static_cast<double>(n);

  // Outer draws of X_u, inner redraws of the complement. The within-group
  // variance / inner corrects the between-group variance for inner noise.
  constexpr std::size_t inner = 10;
  const std::size_t outer = n / inner;
  std::vector<bool> frozen(model.dim, false);
  for (std::size_t i : u) frozen[i] = true;
  std::vector<double> group_mean(outer), group_var(outer), fixed(model.dim), x(model.dim),
      values(inner);
  auto gen = stream.substream(1).generator();
  for (std::size_t k = 0; k < outer; ++k) {
    draw_inputs(model, gen, fixed);
    for (std::size_t l = 0; l < inner; ++l) {
      draw_inputs(model, gen, x);
      for (std::size_t i = 0; i < model.dim; ++i)
        if (frozen[i]) x[i] = fixed[i];
      values[l] = model(x);
    }
    group_mean[k] = mean(values);
    group_var[k] = sample_variance(values);
  }
  out.conditional_variance =
      sample_variance(group_mean) - mean(group_var) / static_cast<double>(inner);
  return out;
}

}  // namespace sensikit
