#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace sensikit {

/// Law of one input coordinate, expressed through its quantile function so
/// every input can be generated from a uniform variate in (0,1).
class Distribution {
 public:
  enum class Kind { uniform01, uniform, inverse_cdf };

  static Distribution uniform01();
  static Distribution uniform(double a, double b);
  /// `quantile` must be non-decreasing on (0,1).
  static Distribution from_quantile(std::function<double(double)> quantile);

  Kind kind() const { return kind_; }
  double lower() const { return a_; }
  double upper() const { return b_; }

  /// Maps u in (0,1) to an input value. Throws InvalidArgument outside (0,1).
  double transform(double u) const;

  /// d transform / du, when it is available in closed form.
  std::optional<double> transform_slope() const;

 private:
  Kind kind_ = Kind::uniform01;
  double a_ = 0.0;
  double b_ = 1.0;
  std::function<double(double)> quantile_;
};

double transform_input(const Distribution& d, double u);

using PointFunction = std::function<double(std::span<const double>)>;

/// Y = f(X_1, ..., X_p) with independent inputs.
///
/// `eval` and `derivative` must be deterministic and safe to call
/// concurrently. `derivative` is df/dx_1; when absent, consumers fall back
/// to `finite_difference_x1`.
struct Model {
  std::string name;
  std::size_t dim = 0;
  PointFunction eval;
  PointFunction derivative;
  std::vector<Distribution> inputs;
  /// Exact first-order Sobol' indices, when known in closed form.
  std::optional<std::vector<double>> exact_sobol;

  double operator()(std::span<const double> x) const { return eval(x); }
  bool has_derivative() const { return static_cast<bool>(derivative); }
};

struct GFunctionParams {
  std::vector<double> a;
};

struct LinearModelParams {
  double alpha = 1.0;
  std::size_t p = 2;
};

/// prod_i (|4 x_i - 2| + a_i) / (1 + a_i)
double gfunction_eval(const GFunctionParams& params, std::span<const double> x);

/// First-order indices of the g-function: V_i / (prod_j (1 + V_j) - 1) with
/// V_i = 1 / (3 (1 + a_i)^2).
std::vector<double> gfunction_exact_sobol(const GFunctionParams& params);

/// S_1 = alpha^2 / (alpha^2 + p - 1), S_i = 1 / (alpha^2 + p - 1).
std::vector<double> linear_exact_sobol(const LinearModelParams& params);

Model make_gfunction(const GFunctionParams& params);
Model make_linear(const LinearModelParams& params);

/// Central difference in x_1 with step 1e-5, shifted so both points stay in
/// [0,1].
double finite_difference_x1(const PointFunction& f, std::span<const double> x);

/// df/dx_1 at x, analytic when the model provides it.
double derivative_x1(const Model& model, std::span<const double> x);

/// Compiled-in models selectable by name ("ishigami", "x1", "product").
Model make_custom(std::string_view name);
std::vector<std::string> custom_model_names();

}  // namespace sensikit
