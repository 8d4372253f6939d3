#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "sensikit/models.hpp"
#include "sensikit/pickfreeze.hpp"
#include "sensikit/random.hpp"

namespace sensikit {

/// Moments of the linear model Y = alpha X_1 + X_2 + ... + X_p with uniform
/// inputs. Z_p = X_2 + ... + X_p and Z_{p,alpha} = alpha X_1 + X_3 + ... + X_p
/// are the parts of Y not explained by X_1 and by X_2 respectively.
struct MomentSet {
  double m1p = 0.0;   // E[Z_p]
  double m2p = 0.0;   // E[Z_p^2]
  double m1pa = 0.0;  // E[Z_{p,alpha}]
  double m2pa = 0.0;  // E[Z_{p,alpha}^2]
  double vp = 0.0;
  double vpa = 0.0;
};

MomentSet linear_moments(double alpha, std::size_t p);

/// (p+1) Var(Y Y^i) for i = 1..p: the Pick-Freeze limiting variance of the
/// E[E[Y|X_i]^2] estimate, weighted to the rank method's budget.
std::vector<double> v_pf(double alpha, std::size_t p);

/// Sigma_B^{i,i} + Sigma_C^{i,i}: the rank method's limiting variance of the
/// same quantity.
std::vector<double> v_rank(double alpha, std::size_t p);

/// Var(E[Y|X_i] (2Y - E[Y|X_i])), the efficiency bound.
std::vector<double> v_eff(double alpha, std::size_t p);

/// How the complementary inputs of Y^1 and Y^i are drawn.
enum class Coupling {
  /// Y^1 and Y^i redraw their complements independently.
  independent,
  /// Y^1 and Y^i take their complements from one shared copy X'
  /// (`sample_pickfreeze_all`).
  shared,
};

/// Cov(Y Y^1, Y Y^i) for i >= 2 in the linear model.
double cov_yy1_yyi(double alpha, std::size_t p, Coupling coupling = Coupling::independent);

/// CLT ingredients for the rank Sobol' estimator of one index: the
/// estimator is Psi(Z_n) with Psi(x, y, z) = (x - y^2) / (z - y^2) and
/// sqrt(n)(Z_n - m_b) -> N(0, sigma_b + sigma_c).
struct SigmaComponents {
  Eigen::Matrix3d sigma_b = Eigen::Matrix3d::Zero();
  Eigen::Matrix3d sigma_c = Eigen::Matrix3d::Zero();
  Eigen::Vector3d m_b = Eigen::Vector3d::Zero();
  Eigen::Vector3d g = Eigen::Vector3d::Zero();
  double sigma2 = 0.0;

  /// Psi(m_b), the Sobol' index.
  double index() const;
  /// Smallest eigenvalue of sigma_b + sigma_c relative to its trace.
  double min_relative_eigenvalue() const;
};

/// Fills g = grad Psi(m_b) and sigma2 = g' (sigma_b + sigma_c) g. Throws
/// DegenerateData when Var(Y) = m_b(2) - m_b(1)^2 is not positive.
void assemble_delta_method(SigmaComponents& s);

/// Closed-form components for input `index` (0-based) of the linear model.
SigmaComponents linear_sigma_components(double alpha, std::size_t p, std::size_t index = 0);

struct PluginOptions {
  /// Input whose index is studied (0-based).
  std::size_t index = 0;
  /// Use a central finite difference when the derivative is not analytic.
  bool allow_finite_difference = true;
  /// Monte-Carlo draws are split into this many substreams; the result
  /// depends on it but not on the worker count.
  std::size_t partitions = 16;
};

/// Monte-Carlo estimate of every Sigma_B, Sigma_C entry, m_b, g and sigma2
/// with n_mc outer draws. Works on the uniform scale u = F(X_i), i.e. with
/// f composed with the input's quantile function.
///
/// The model is assumed bounded and twice differentiable in the studied
/// input; this is not checked.
SigmaComponents sigma_plugin(const Model& model, std::size_t n_mc, const RngStream& stream,
                             const PluginOptions& options = {});

/// Approximate sigma2 from a single input/output sample (no model access).
/// Uses neighbours in the ranking of v as stand-ins for Pick-Freeze copies.
double sigma2_single_sample(std::span<const double> v, std::span<const double> y);

/// Standard normal quantile.
double normal_quantile(double p);

/// value -+ z_{(1+level)/2} sqrt(sigma2 / n).
Interval confidence_interval(const Estimate& estimate, double sigma2, double level);

}  // namespace sensikit
