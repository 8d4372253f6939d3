#include "sensikit/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "sensikit/error.hpp"
#include "sensikit/parallel.hpp"
#include "sensikit/rank.hpp"
#include "sensikit/sampling.hpp"
#include "sensikit/stats.hpp"

namespace sensikit {

namespace {

void check_linear_args(double alpha, std::size_t p) {
  if (p < 2) throw InvalidArgument("linear model needs p >= 2");
  if (!(alpha >= 0.0)) throw InvalidArgument("alpha must be non-negative");
}

// The three closed forms share one polynomial shape in (c, m, v); they
// differ by the weight on v in the c^2 and c terms and by the constant.
double quartic(double c, double m, double v, double weight, double constant) {
  const double c2 = c * c;
  return 4.0 / 45.0 * c2 * c2 + m * c2 * c / 3.0 + (weight * v + m * m) * c2 / 3.0 +
         weight * m * v * c + constant;
}

template <class Entry>
std::vector<double> per_index(double alpha, std::size_t p, Entry entry) {
  check_linear_args(alpha, p);
  const MomentSet ms = linear_moments(alpha, p);
  std::vector<double> out(p);
  out[0] = entry(alpha, ms.m1p, ms.vp);
  for (std::size_t i = 1; i < p; ++i) out[i] = entry(1.0, ms.m1pa, ms.vpa);
  return out;
}

}  // namespace

MomentSet linear_moments(double alpha, std::size_t p) {
  check_linear_args(alpha, p);
  const double pp = static_cast<double>(p);
  MomentSet m;
  m.m1p = 0.5 * (pp - 1.0);
  m.m2p = (pp - 1.0) * (3.0 * pp - 2.0) / 12.0;
  m.m1pa = 0.5 * (alpha + pp - 2.0);
  m.m2pa = alpha * alpha / 3.0 + 0.5 * (pp - 2.0) * alpha + (pp - 2.0) * (3.0 * pp - 5.0) / 12.0;
  m.vp = m.m2p - m.m1p * m.m1p;
  m.vpa = m.m2pa - m.m1pa * m.m1pa;
  return m;
}

std::vector<double> v_pf(double alpha, std::size_t p) {
  const double weight = static_cast<double>(p + 1);
  return per_index(alpha, p, [weight](double c, double m, double v) {
    return weight * quartic(c, m, v, 2.0, v * (v + 2.0 * m * m));
  });
}

std::vector<double> v_rank(double alpha, std::size_t p) {
  return per_index(alpha, p, [](double c, double m, double v) {
    return quartic(c, m, v, 4.0, v * (v + 4.0 * m * m));
  });
}

std::vector<double> v_eff(double alpha, std::size_t p) {
  return per_index(alpha, p, [](double c, double m, double v) {
    return quartic(c, m, v, 4.0, 4.0 * v * m * m);
  });
}

double cov_yy1_yyi(double alpha, std::size_t p, Coupling coupling) {
  check_linear_args(alpha, p);
  // m, v: mean and variance of the p - 2 inputs other than X_1 and X_i.
  const double m = 0.5 * static_cast<double>(p - 2);
  const double v = static_cast<double>(p - 2) / 12.0;
  const double a = alpha;
  const double a2 = a * a;
  const double common = a2 * a2 / 24.0 + a2 * a * (m / 6.0 + 1.0 / 12.0) +
                        a2 * (m * m / 6.0 + m / 6.0 + 13.0 / 144.0) + a * (m / 6.0 + 1.0 / 12.0) +
                        m * m / 6.0 + m / 6.0 + 1.0 / 24.0;
  if (coupling == Coupling::independent)
    return common + a2 * v / 4.0 + a * (m * v + v / 2.0) + m * m * v + m * v + v / 4.0;
  return common + a2 * 7.0 * v / 12.0 + a * (2.0 * m * v + v) + 2.0 * m * m * v + 2.0 * m * v +
         v * v + 7.0 * v / 12.0;
}

double SigmaComponents::index() const {
  return (m_b(0) - m_b(1) * m_b(1)) / (m_b(2) - m_b(1) * m_b(1));
}

double SigmaComponents::min_relative_eigenvalue() const {
  const Eigen::Matrix3d total = sigma_b + sigma_c;
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> solver(total, Eigen::EigenvaluesOnly);
  const double trace = total.trace();
  return trace > 0.0 ? solver.eigenvalues()(0) / trace : solver.eigenvalues()(0);
}

void assemble_delta_method(SigmaComponents& s) {
  const double ey = s.m_b(1);
  const double var = s.m_b(2) - ey * ey;
  if (!(var > 1e-14 * std::abs(s.m_b(2))) || !(var > 0.0))
    throw DegenerateData("Var(Y) is zero; the delta method does not apply");
  const double index = (s.m_b(0) - ey * ey) / var;
  s.g = Eigen::Vector3d(1.0, 2.0 * ey * (index - 1.0), -index) / var;
  s.sigma2 = s.g.dot((s.sigma_b + s.sigma_c) * s.g);
}

SigmaComponents linear_sigma_components(double alpha, std::size_t p, std::size_t index) {
  check_linear_args(alpha, p);
  if (index >= p) throw InvalidArgument("index out of range");
  const double pp = static_cast<double>(p);
  // Y = c X + Z, X uniform, Z independent and symmetric about m.
  double c, m, v, kappa4;
  if (index == 0) {
    c = alpha;
    m = 0.5 * (pp - 1.0);
    v = (pp - 1.0) / 12.0;
    kappa4 = -(pp - 1.0) / 120.0;
  } else {
    c = 1.0;
    m = 0.5 * (alpha + pp - 2.0);
    v = (alpha * alpha + pp - 2.0) / 12.0;
    kappa4 = -(alpha * alpha * alpha * alpha + pp - 2.0) / 120.0;
  }
  const double mu4 = kappa4 + 3.0 * v * v;

  // b(X) = E[Y|X] = c X + m.
  const double eb = 0.5 * c + m;
  const double eb2 = c * c / 3.0 + c * m + m * m;

  SigmaComponents s;
  const double b11 = 4.0 * v * eb2 + v * v;
  const double b13 = 4.0 * v * eb2;
  const double b12 = 2.0 * v * eb;
  s.sigma_b << b11, b12, b13,
               b12, v, b12,
               b13, b12, 4.0 * v * eb2 + mu4 - v * v;

  // E[psi | X] = (2 c b(X), c, 2 c b(X)); for X, X' uniform:
  // E[min] = 1/3, E[X min] = 5/24, E[X X' min] = 2/15.
  const double k_bb = c * c * 2.0 / 15.0 + 2.0 * c * m * 5.0 / 24.0 + m * m / 3.0;
  const double k_b = c * 5.0 / 24.0 + m / 3.0;
  const double l_b = c / 3.0 + 0.5 * m;
  const double c11 = 4.0 * c * c * (k_bb - l_b * l_b);
  const double c12 = 2.0 * c * c * k_b - c * c * l_b;
  s.sigma_c << c11, c12, c11,
               c12, c * c / 12.0, c12,
               c11, c12, c11;

  s.m_b = Eigen::Vector3d(eb2, eb, eb2 + v);
  assemble_delta_method(s);
  return s;
}

namespace {

struct PluginSums {
  std::size_t count = 0;
  Eigen::Vector3d mean = Eigen::Vector3d::Zero();
  Eigen::Matrix3d cond_cov = Eigen::Matrix3d::Zero();
  double lag_cov = 0.0;
  Eigen::Matrix3d min_moment = Eigen::Matrix3d::Zero();
  Eigen::Vector3d psi_x = Eigen::Vector3d::Zero();

  PluginSums& operator+=(const PluginSums& o) {
    count += o.count;
    mean += o.mean;
    cond_cov += o.cond_cov;
    lag_cov += o.lag_cov;
    min_moment += o.min_moment;
    psi_x += o.psi_x;
    return *this;
  }
};

PluginSums reduce(std::span<const PluginSums> parts) {
  if (parts.size() == 1) return parts[0];
  const std::size_t half = parts.size() / 2;
  PluginSums left = reduce(parts.first(half));
  left += reduce(parts.subspan(half));
  return left;
}

// The studied input is parameterized by its uniform score u.
class UniformScaleModel {
 public:
  UniformScaleModel(const Model& model, const PluginOptions& options)
      : model_(model), index_(options.index) {
    const auto slope = model.inputs[index_].transform_slope();
    if (index_ == 0 && model.has_derivative() && slope) {
      slope_ = *slope;
      analytic_ = true;
    } else if (!options.allow_finite_difference) {
      throw InvalidArgument("model '" + model.name +
                            "' has no analytic derivative for this input and the "
                            "finite-difference fallback is disabled");
    }
  }

  /// Draws the complement of the studied input into x.
  void draw_rest(Generator& gen, std::span<double> x) const {
    for (std::size_t i = 0; i < model_.dim; ++i)
      if (i != index_) x[i] = model_.inputs[i].transform(gen.uniform());
  }

  double value(double u, std::span<double> x) const {
    x[index_] = model_.inputs[index_].transform(u);
    return model_(x);
  }

  double slope(double u, std::span<double> x) const {
    if (analytic_) {
      x[index_] = model_.inputs[index_].transform(u);
      return model_.derivative(x) * slope_;
    }
    constexpr double h = 1e-5;
    const double center = std::clamp(u, 2.0 * h, 1.0 - 2.0 * h);
    return (value(center + h, x) - value(center - h, x)) / (2.0 * h);
  }

 private:
  const Model& model_;
  std::size_t index_;
  bool analytic_ = false;
  double slope_ = 1.0;
};

PluginSums plugin_partition(const UniformScaleModel& f, std::size_t dim, std::size_t draws,
                            const RngStream& stream) {
  PluginSums s;
  s.count = draws;
  auto gen = stream.generator();
  std::vector<std::vector<double>> w(6, std::vector<double>(dim));
  std::vector<double> y(6);
  for (std::size_t k = 0; k < draws; ++k) {
    // Sigma_B: two independent replicates (W, W', W'') given the same X.
    const double u = gen.uniform();
    for (std::size_t r = 0; r < 6; ++r) {
      f.draw_rest(gen, w[r]);
      y[r] = f.value(u, w[r]);
    }
    const Eigen::Vector3d a1(y[0] * y[1], y[0], y[0] * y[0]);
    const Eigen::Vector3d a2(y[3] * y[4], y[3], y[3] * y[3]);
    const Eigen::Vector3d diff = a1 - a2;
    s.mean += 0.5 * (a1 + a2);
    s.cond_cov += 0.5 * diff * diff.transpose();
    s.lag_cov += 0.5 * diff(0) * (y[1] * y[2] - y[4] * y[5]);

    // Sigma_C: two independent points; psi uses the slope at (u, W) and
    // outputs at independent neighbours W-, W+.
    Eigen::Vector3d psi[2];
    double uu[2];
    for (int side = 0; side < 2; ++side) {
      uu[side] = gen.uniform();
      f.draw_rest(gen, w[0]);
      f.draw_rest(gen, w[1]);
      f.draw_rest(gen, w[2]);
      const double y0 = f.value(uu[side], w[0]);
      const double fx = f.slope(uu[side], w[0]);
      const double neighbours = f.value(uu[side], w[1]) + f.value(uu[side], w[2]);
      psi[side] = Eigen::Vector3d(fx * neighbours, fx, 2.0 * y0 * fx);
      s.psi_x += psi[side] * uu[side];
    }
    const Eigen::Matrix3d outer = psi[0] * psi[1].transpose();
    s.min_moment += 0.5 * (outer + outer.transpose()) * std::min(uu[0], uu[1]);
  }
  return s;
}

}  // namespace

SigmaComponents sigma_plugin(const Model& model, std::size_t n_mc, const RngStream& stream,
                             const PluginOptions& options) {
  if (n_mc < 1000) throw InvalidArgument("sigma_plugin needs at least 1000 Monte-Carlo draws");
  if (options.index >= model.dim) throw InvalidArgument("index out of range");
  if (options.partitions == 0) throw InvalidArgument("partitions must be positive");
  const UniformScaleModel f(model, options);

  const std::size_t parts = std::min(options.partitions, n_mc);
  std::vector<PluginSums> partial(parts);
  parallel_for(parts, [&](std::size_t k) {
    const std::size_t begin = n_mc * k / parts;
    const std::size_t end = n_mc * (k + 1) / parts;
    partial[k] = plugin_partition(f, model.dim, end - begin, stream.substream(k));
  });
  const PluginSums total = reduce(partial);
  const double n = static_cast<double>(total.count);

  SigmaComponents s;
  s.m_b = total.mean / n;
  const Eigen::Matrix3d cond = total.cond_cov / n;
  s.sigma_b = cond;
  // Products of neighbours are one-dependent: lag-one terms double the
  // entries that involve the product coordinate.
  s.sigma_b(0, 0) = cond(0, 0) + 2.0 * total.lag_cov / n;
  s.sigma_b(0, 1) = s.sigma_b(1, 0) = 2.0 * cond(0, 1);
  s.sigma_b(0, 2) = s.sigma_b(2, 0) = 2.0 * cond(0, 2);

  const Eigen::Vector3d psi_x = total.psi_x / (2.0 * n);
  s.sigma_c = total.min_moment / n - psi_x * psi_x.transpose();
  assemble_delta_method(s);
  return s;
}

double sigma2_single_sample(std::span<const double> v, std::span<const double> y) {
  if (v.size() != y.size()) throw InvalidArgument("input and output samples differ in length");
  const std::size_t n = y.size();
  if (n < 8) throw InvalidArgument("single-sample variance needs at least 8 observations");
  const RankData ranks = compute_ranks(v);
  std::vector<double> ys(n);
  for (std::size_t k = 0; k < n; ++k) ys[k] = y[ranks.order[k]];

  std::vector<double> prod(n), sq(n);
  for (std::size_t k = 0; k < n; ++k) {
    prod[k] = ys[k] * ys[(k + 1) % n];
    sq[k] = ys[k] * ys[k];
  }
  SigmaComponents s;
  s.m_b = Eigen::Vector3d(mean(prod), mean(ys), mean(sq));
  assemble_delta_method(s);

  // T_k = g'(Y_(k) Y_(k+1), Y_(k), Y_(k)^2) is one-dependent along the
  // ranking; sigma2 = Var(T) + 2 Cov(T_k, T_{k+1}), the lag-one covariance
  // estimated from differences that cancel the smooth conditional mean.
  std::vector<double> t(n);
  for (std::size_t k = 0; k < n; ++k) t[k] = s.g(0) * prod[k] + s.g(1) * ys[k] + s.g(2) * sq[k];
  std::vector<double> lag(n - 3);
  for (std::size_t k = 0; k + 3 < n; ++k) lag[k] = (t[k] - t[k + 2]) * (t[k + 1] - t[k + 3]);
  const double tm = mean(t);
  std::vector<double> dev(n);
  for (std::size_t k = 0; k < n; ++k) dev[k] = (t[k] - tm) * (t[k] - tm);
  return std::max(0.0, mean(dev) + 2.0 * mean(lag));
}

}  // namespace sensikit
