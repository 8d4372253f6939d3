#include "sensikit/experiments.hpp"

#include <algorithm>
#include <cmath>

#include "sensikit/asymptotics.hpp"
#include "sensikit/error.hpp"
#include "sensikit/parallel.hpp"
#include "sensikit/pickfreeze.hpp"
#include "sensikit/rank.hpp"
#include "sensikit/sampling.hpp"
#include "sensikit/stats.hpp"

namespace sensikit {

Model ModelDescriptor::build() const {
  if (kind == "gfunction") {
    if (!a.empty()) return make_gfunction({a});
    if (p == 0) throw InvalidArgument("gfunction needs coefficients (--a) or a dimension (--p)");
    return make_gfunction({with_dimension(p).a});
  }
  if (kind == "linear") return make_linear({alpha, p});
  if (kind == "custom") return make_custom(custom_name);
  throw InvalidArgument("unknown model kind '" + kind + "'");
}

ModelDescriptor ModelDescriptor::with_dimension(std::size_t dim) const {
  ModelDescriptor d = *this;
  d.p = dim;
  if (kind == "gfunction") {
    d.a.resize(dim);
    for (std::size_t i = a.size(); i < dim; ++i) d.a[i] = static_cast<double>(i + 1);
  } else if (kind != "linear") {
    throw InvalidArgument("model '" + label() + "' has a fixed dimension");
  }
  return d;
}

std::string ModelDescriptor::label() const {
  if (kind == "custom") return custom_name;
  return kind;
}

std::string to_string(Study s) {
  switch (s) {
    case Study::convergence:
      return "convergence";
    case Study::mse:
      return "mse";
    case Study::dimension:
      return "dimension";
    case Study::variance_compare:
      return "variance_compare";
  }
  return "";
}

Study study_from_string(const std::string& s) {
  if (s == "convergence") return Study::convergence;
  if (s == "mse") return Study::mse;
  if (s == "dimension") return Study::dimension;
  if (s == "variance_compare" || s == "variance-compare") return Study::variance_compare;
  throw InvalidArgument("unknown study '" + s + "'");
}

void ExperimentConfig::validate() const {
  if (replications < 1) throw InvalidArgument("replications must be at least 1");
  for (std::size_t k = 1; k < sizes.size(); ++k)
    if (sizes[k] <= sizes[k - 1]) throw InvalidArgument("sizes must be strictly increasing");
  switch (study) {
    case Study::convergence:
      if (sizes.empty()) throw InvalidArgument("convergence study needs at least one size");
      break;
    case Study::mse:
      if (!budget) throw InvalidArgument("mse study needs a budget");
      break;
    case Study::dimension:
      if (!budget) throw InvalidArgument("dimension study needs a budget");
      if (dimensions.empty()) throw InvalidArgument("dimension study needs a p grid");
      break;
    case Study::variance_compare:
      if (alphas.empty() || dimensions.empty())
        throw InvalidArgument("variance comparison needs an alpha grid and p values");
      break;
  }
}

double ConvergenceReport::max_error(const std::string& method, std::size_t size) const {
  double worst = -1.0;
  for (const auto& r : rows)
    if (r.method == method && r.size == size) worst = std::max(worst, r.abs_error);
  if (worst < 0.0) throw InvalidArgument("no rows for " + method + " at size " + std::to_string(size));
  return worst;
}

const MseRow& MseReport::row(const std::string& method, std::size_t index) const {
  for (const auto& r : rows)
    if (r.method == method && r.index == index) return r;
  throw InvalidArgument("no MSE row for " + method + " index " + std::to_string(index));
}

BoxStats box_stats(std::vector<double> values) {
  if (values.empty()) throw InvalidArgument("box statistics of an empty sample");
  BoxStats b;
  b.q1 = quantile(values, 0.25);
  b.median = quantile(values, 0.5);
  b.q3 = quantile(values, 0.75);
  const double iqr = b.q3 - b.q1;
  const double lo_fence = b.q1 - 1.5 * iqr;
  const double hi_fence = b.q3 + 1.5 * iqr;
  std::sort(values.begin(), values.end());
  b.whisker_lo = b.q1;
  b.whisker_hi = b.q3;
  for (double v : values) {
    if (v < lo_fence || v > hi_fence) {
      b.outliers.push_back(v);
    } else {
      b.whisker_lo = std::min(b.whisker_lo, v);
      b.whisker_hi = std::max(b.whisker_hi, v);
    }
  }
  return b;
}

namespace {

// Distinct studies draw from disjoint stream families.
constexpr std::uint64_t kConvergenceStudy = 1;
constexpr std::uint64_t kMseStudy = 2;

const std::vector<double>& exact_of(const Model& model) {
  if (!model.exact_sobol)
    throw InvalidArgument("model '" + model.name + "' has no exact reference indices");
  return *model.exact_sobol;
}

struct Replicate {
  std::vector<double> rank;
  std::vector<double> pickfreeze;
  std::size_t rank_evaluations = 0;
  std::size_t pickfreeze_evaluations = 0;
};

Replicate run_replicate(const Model& model, std::size_t rank_n, std::size_t pf_n,
                        const RngStream& stream) {
  Replicate r;
  const auto iid = sample_iid(model, rank_n, stream.substream(0));
  r.rank = rank_sobol_all(iid);
  r.rank_evaluations = iid.evaluations;
  const auto pf = sample_pickfreeze_all(model, pf_n, stream.substream(1));
  r.pickfreeze.resize(model.dim);
  for (std::size_t i = 0; i < model.dim; ++i) r.pickfreeze[i] = sobol_tn(pf.y, pf.y_frozen[i]);
  r.pickfreeze_evaluations = pf.evaluations;
  return r;
}

std::vector<Replicate> run_replicates(const Model& model, std::size_t rank_n, std::size_t pf_n,
                                      std::size_t reps, const RngStream& base) {
  std::vector<Replicate> out(reps);
  parallel_for(reps, [&](std::size_t r) {
    out[r] = run_replicate(model, rank_n, pf_n, base.substream(r));
  });
  return out;
}

MseReport mse_for(const ModelDescriptor& descriptor, std::size_t budget, std::size_t reps,
                  std::uint64_t seed) {
  const Model model = descriptor.build();
  const std::size_t p = model.dim;
  const BudgetSplit split = budget_split(budget, p);
  if (split.pickfreeze_n < 2)
    throw InvalidArgument("budget " + std::to_string(budget) + " leaves Pick-Freeze N = " +
                          std::to_string(split.pickfreeze_n) + " < 2 at p = " + std::to_string(p));

  const RngStream base{seed, derive_stream_id(kMseStudy, p)};
  const auto reps_out = run_replicates(model, split.rank_n, split.pickfreeze_n, reps, base);
  const auto& exact = exact_of(model);

  MseReport report;
  report.model = descriptor.label();
  report.seed = seed;
  report.p = p;
  report.budget = budget;
  report.rank_n = split.rank_n;
  report.pickfreeze_n = split.pickfreeze_n;
  for (const auto& r : reps_out) {
    report.rank_evaluations += r.rank_evaluations;
    report.pickfreeze_evaluations += r.pickfreeze_evaluations;
  }
  for (const char* method : {kMethodPickFreeze, kMethodRank}) {
    const bool is_rank = std::string(method) == kMethodRank;
    for (std::size_t i = 0; i < p; ++i) {
      std::vector<double> sq(reps);
      for (std::size_t r = 0; r < reps; ++r) {
        const double est = is_rank ? reps_out[r].rank[i] : reps_out[r].pickfreeze[i];
        sq[r] = (est - exact[i]) * (est - exact[i]);
      }
      MseRow row;
      row.method = method;
      row.index = i + 1;
      row.budget = budget;
      row.replications = reps;
      row.mean = mean(sq);
      row.median = quantile(sq, 0.5);
      row.stdev = reps > 1 ? std::sqrt(sample_variance(sq)) : 0.0;
      row.box = box_stats(sq);
      report.rows.push_back(std::move(row));
    }
  }
  return report;
}

}  // namespace

ConvergenceReport run_convergence(const ExperimentConfig& config) {
  config.validate();
  const Model model = config.model.build();
  const std::size_t p = model.dim;

  ConvergenceReport report;
  report.model = config.model.label();
  report.seed = config.seed;
  report.p = p;
  for (std::size_t k = 0; k < config.sizes.size(); ++k) {
    const std::size_t pf_n = config.sizes[k];
    const std::size_t rank_n = (p + 1) * pf_n;
    const RngStream base{config.seed, derive_stream_id(kConvergenceStudy, pf_n)};
    const auto reps = run_replicates(model, rank_n, pf_n, config.replications, base);
    const auto& exact = exact_of(model);
    for (const char* method : {kMethodPickFreeze, kMethodRank}) {
      const bool is_rank = std::string(method) == kMethodRank;
      for (std::size_t i = 0; i < p; ++i) {
        std::vector<double> est(reps.size());
        for (std::size_t r = 0; r < reps.size(); ++r)
          est[r] = is_rank ? reps[r].rank[i] : reps[r].pickfreeze[i];
        ConvergenceRow row;
        row.method = method;
        row.index = i + 1;
        row.size = is_rank ? rank_n : pf_n;
        row.estimate = mean(est);
        row.exact = exact[i];
        row.abs_error = std::abs(row.estimate - row.exact);
        report.rows.push_back(std::move(row));
      }
    }
    for (const auto& r : reps) report.evaluations += r.rank_evaluations + r.pickfreeze_evaluations;
  }
  return report;
}

MseReport run_mse(const ExperimentConfig& config) {
  config.validate();
  return mse_for(config.model, *config.budget, config.replications, config.seed);
}

std::vector<MseReport> run_dimension(const ExperimentConfig& config,
                                     std::vector<std::string>* skipped) {
  config.validate();
  std::vector<MseReport> out;
  for (std::size_t p : config.dimensions) {
    if (*config.budget / (p + 1) < 2) {
      if (skipped)
        skipped->push_back("p = " + std::to_string(p) + ": Pick-Freeze N = " +
                           std::to_string(*config.budget / (p + 1)) + " < 2, skipped");
      continue;
    }
    out.push_back(mse_for(config.model.with_dimension(p), *config.budget, config.replications,
                          config.seed));
  }
  return out;
}

VarianceReport run_variance_compare(const ExperimentConfig& config) {
  config.validate();
  if (config.model.kind != "linear")
    throw InvalidArgument("variance comparison is only available for the linear model");
  VarianceReport report;
  report.seed = config.seed;
  for (std::size_t p : config.dimensions) {
    for (double alpha : config.alphas) {
      const auto pf = v_pf(alpha, p);
      const auto rk = v_rank(alpha, p);
      const auto ef = v_eff(alpha, p);
      for (std::size_t i = 0; i < 2; ++i)
        report.rows.push_back({alpha, p, i + 1, pf[i], rk[i], ef[i]});
    }
  }
  return report;
}

}  // namespace sensikit
