#include "sensikit/models.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <utility>

#include "sensikit/error.hpp"

namespace sensikit {

Distribution Distribution::uniform01() { return Distribution{}; }

Distribution Distribution::uniform(double a, double b) {
  if (!(a < b)) throw InvalidArgument("uniform(a, b) requires a < b");
  Distribution d;
  d.kind_ = Kind::uniform;
  d.a_ = a;
  d.b_ = b;
  return d;
}

Distribution Distribution::from_quantile(std::function<double(double)> quantile) {
  if (!quantile) throw InvalidArgument("quantile function is empty");
  Distribution d;
  d.kind_ = Kind::inverse_cdf;
  d.quantile_ = std::move(quantile);
  return d;
}

double Distribution::transform(double u) const {
  if (!(u > 0.0 && u < 1.0)) throw InvalidArgument("transform_input: u must lie in (0,1)");
  switch (kind_) {
    case Kind::uniform01:
      return u;
    case Kind::uniform:
      return a_ + (b_ - a_) * u;
    case Kind::inverse_cdf:
      return quantile_(u);
  }
  return u;
}

std::optional<double> Distribution::transform_slope() const {
  switch (kind_) {
    case Kind::uniform01:
      return 1.0;
    case Kind::uniform:
      return b_ - a_;
    case Kind::inverse_cdf:
      return std::nullopt;
  }
  return std::nullopt;
}

double transform_input(const Distribution& d, double u) { return d.transform(u); }

namespace {

void check_gfunction(const GFunctionParams& params) {
  if (params.a.empty()) throw InvalidArgument("g-function needs at least one coefficient");
  for (double a : params.a)
    if (!(a >= 0.0)) throw InvalidArgument("g-function coefficients must be non-negative");
}

void check_linear(const LinearModelParams& params) {
  if (params.p < 2) throw InvalidArgument("linear model needs p >= 2");
  if (!(params.alpha > 0.0)) throw InvalidArgument("linear model needs alpha > 0");
}

}  // namespace

double gfunction_eval(const GFunctionParams& params, std::span<const double> x) {
  if (x.size() != params.a.size())
    throw InvalidArgument("g-function: point has " + std::to_string(x.size()) +
                          " coordinates, expected " + std::to_string(params.a.size()));
  double value = 1.0;
  for (std::size_t i = 0; i < x.size(); ++i)
    value *= (std::abs(4.0 * x[i] - 2.0) + params.a[i]) / (1.0 + params.a[i]);
  return value;
}

std::vector<double> gfunction_exact_sobol(const GFunctionParams& params) {
  check_gfunction(params);
  std::vector<double> partial(params.a.size());
  double total = 1.0;
  for (std::size_t i = 0; i < partial.size(); ++i) {
    const double s = 1.0 + params.a[i];
    partial[i] = 1.0 / (3.0 * s * s);
    total *= 1.0 + partial[i];
  }
  total -= 1.0;
  for (double& v : partial) v /= total;
  return partial;
}

std::vector<double> linear_exact_sobol(const LinearModelParams& params) {
  check_linear(params);
  const double a2 = params.alpha * params.alpha;
  const double denom = a2 + static_cast<double>(params.p) - 1.0;
  std::vector<double> s(params.p, 1.0 / denom);
  s[0] = a2 / denom;
  return s;
}

Model make_gfunction(const GFunctionParams& params) {
  check_gfunction(params);
  Model m;
  m.name = "gfunction";
  m.dim = params.a.size();
  m.eval = [params](std::span<const double> x) { return gfunction_eval(params, x); };
  // |4x - 2| has a kink at 1/2; the one-sided slope is used there.
  m.derivative = [params](std::span<const double> x) {
    double rest = 1.0;
    for (std::size_t i = 1; i < x.size(); ++i)
      rest *= (std::abs(4.0 * x[i] - 2.0) + params.a[i]) / (1.0 + params.a[i]);
    const double slope = x[0] >= 0.5 ? 4.0 : -4.0;
    return rest * slope / (1.0 + params.a[0]);
  };
  m.inputs.assign(m.dim, Distribution::uniform01());
  m.exact_sobol = gfunction_exact_sobol(params);
  return m;
}

Model make_linear(const LinearModelParams& params) {
  check_linear(params);
  Model m;
  m.name = "linear";
  m.dim = params.p;
  const double alpha = params.alpha;
  m.eval = [alpha](std::span<const double> x) {
    double y = alpha * x[0];
    for (std::size_t i = 1; i < x.size(); ++i) y += x[i];
    return y;
  };
  m.derivative = [alpha](std::span<const double>) { return alpha; };
  m.inputs.assign(m.dim, Distribution::uniform01());
  m.exact_sobol = linear_exact_sobol(params);
  return m;
}

double finite_difference_x1(const PointFunction& f, std::span<const double> x) {
  constexpr double h = 1e-5;
  std::vector<double> lo(x.begin(), x.end());
  std::vector<double> hi(x.begin(), x.end());
  const double center = std::clamp(x[0], h, 1.0 - h);
  lo[0] = center - h;
  hi[0] = center + h;
  return (f(hi) - f(lo)) / (2.0 * h);
}

double derivative_x1(const Model& model, std::span<const double> x) {
  if (model.has_derivative()) return model.derivative(x);
  return finite_difference_x1(model.eval, x);
}

namespace {

Model make_ishigami() {
  constexpr double a = 7.0;
  constexpr double b = 0.1;
  constexpr double pi = std::numbers::pi;
  Model m;
  m.name = "ishigami";
  m.dim = 3;
  m.eval = [](std::span<const double> x) {
    const double s2 = std::sin(x[1]);
    return std::sin(x[0]) + a * s2 * s2 + b * std::pow(x[2], 4) * std::sin(x[0]);
  };
  m.derivative = [](std::span<const double> x) {
    return std::cos(x[0]) * (1.0 + b * std::pow(x[2], 4));
  };
  m.inputs.assign(3, Distribution::uniform(-pi, pi));
  const double pi4 = std::pow(pi, 4);
  const double v1 = 0.5 * std::pow(1.0 + b * pi4 / 5.0, 2);
  const double v2 = a * a / 8.0;
  const double var = a * a / 8.0 + b * pi4 / 5.0 + b * b * pi4 * pi4 / 18.0 + 0.5;
  m.exact_sobol = std::vector<double>{v1 / var, v2 / var, 0.0};
  return m;
}

Model make_x1() {
  Model m;
  m.name = "x1";
  m.dim = 2;
  m.eval = [](std::span<const double> x) { return x[0]; };
  m.derivative = [](std::span<const double>) { return 1.0; };
  m.inputs.assign(2, Distribution::uniform01());
  m.exact_sobol = std::vector<double>{1.0, 0.0};
  return m;
}

// Y = X_1 X_2: Var(E[Y|X_i]) = 1/48, Var(Y) = 7/144.
Model make_product() {
  Model m;
  m.name = "product";
  m.dim = 2;
  m.eval = [](std::span<const double> x) { return x[0] * x[1]; };
  m.derivative = [](std::span<const double> x) { return x[1]; };
  m.inputs.assign(2, Distribution::uniform01());
  m.exact_sobol = std::vector<double>{3.0 / 7.0, 3.0 / 7.0};
  return m;
}

Model make_constant() {
  Model m;
  m.name = "constant";
  m.dim = 2;
  m.eval = [](std::span<const double>) { return 1.0; };
  m.derivative = [](std::span<const double>) { return 0.0; };
  m.inputs.assign(2, Distribution::uniform01());
  return m;
}

}  // namespace

std::vector<std::string> custom_model_names() { return {"constant", "ishigami", "product", "x1"}; }

Model make_custom(std::string_view name) {
  if (name == "ishigami") return make_ishigami();
  if (name == "product") return make_product();
  if (name == "x1") return make_x1();
  if (name == "constant") return make_constant();
  throw InvalidArgument("unknown custom model '" + std::string(name) + "'");
}

}  // namespace sensikit
