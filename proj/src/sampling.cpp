#include "sensikit/sampling.hpp"

#include <algorithm>
#include <string>

#include "sensikit/error.hpp"

namespace sensikit {

namespace {

void check_n(std::size_t n) {
  if (n < 2) throw InvalidArgument("sample size must be at least 2, got " + std::to_string(n));
}

void check_model(const Model& model) {
  if (model.dim == 0 || model.inputs.size() != model.dim || !model.eval)
    throw InvalidArgument("model '" + model.name + "' is incompletely specified");
}

std::vector<bool> frozen_mask(const Model& model, std::span<const std::size_t> u) {
  if (u.empty()) throw InvalidArgument("index subset u must not be empty");
  std::vector<bool> mask(model.dim, false);
  for (std::size_t i : u) {
    if (i >= model.dim)
      throw InvalidArgument("index " + std::to_string(i + 1) + " is out of range 1.." +
                            std::to_string(model.dim));
    mask[i] = true;
  }
  return mask;
}

}  // namespace

std::vector<double> IidDesign::column(std::size_t i) const {
  std::vector<double> c(n);
  for (std::size_t j = 0; j < n; ++j) c[j] = x[j * p + i];
  return c;
}

PickFreezeDesign PickFreezeAllDesign::pair(std::size_t i) const {
  PickFreezeDesign d;
  d.u = {i};
  d.y = y;
  d.y_u = y_frozen.at(i);
  d.evaluations = 2 * y.size();
  return d;
}

void draw_inputs(const Model& model, Generator& gen, std::span<double> row) {
  for (std::size_t i = 0; i < model.dim; ++i) row[i] = model.inputs[i].transform(gen.uniform());
}

IidDesign sample_iid(const Model& model, std::size_t n, const RngStream& stream) {
  check_n(n);
  check_model(model);
  IidDesign d;
  d.n = n;
  d.p = model.dim;
  d.x.resize(n * d.p);
  d.y.resize(n);
  auto gen = stream.generator();
  for (std::size_t j = 0; j < n; ++j) {
    std::span<double> row(d.x.data() + j * d.p, d.p);
    draw_inputs(model, gen, row);
    d.y[j] = model(row);
  }
  d.evaluations = n;
  return d;
}

PickFreezeDesign sample_pickfreeze(const Model& model, std::span<const std::size_t> u,
                                   std::size_t n, const RngStream& stream) {
  check_n(n);
  check_model(model);
  const auto mask = frozen_mask(model, u);
  PickFreezeDesign d;
  d.u.assign(u.begin(), u.end());
  d.y.resize(n);
  d.y_u.resize(n);
  std::vector<double> x(model.dim), x_u(model.dim);
  auto gen = stream.generator();
  for (std::size_t j = 0; j < n; ++j) {
    draw_inputs(model, gen, x);
    draw_inputs(model, gen, x_u);
    for (std::size_t i = 0; i < model.dim; ++i)
      if (mask[i]) x_u[i] = x[i];
    d.y[j] = model(x);
    d.y_u[j] = model(x_u);
  }
  d.evaluations = 2 * n;
  return d;
}

TripleDesign sample_triple(const Model& model, std::span<const std::size_t> u, std::size_t n,
                           const RngStream& stream) {
  auto pair = sample_pickfreeze(model, u, n, stream);
  TripleDesign d;
  d.u = std::move(pair.u);
  d.y = std::move(pair.y);
  d.y_u = std::move(pair.y_u);
  d.w.resize(n);
  std::vector<double> x(model.dim);
  auto gen = stream.substream(1).generator();
  for (std::size_t j = 0; j < n; ++j) {
    draw_inputs(model, gen, x);
    d.w[j] = model(x);
  }
  d.evaluations = 3 * n;
  return d;
}

PickFreezeAllDesign sample_pickfreeze_all(const Model& model, std::size_t n,
                                          const RngStream& stream) {
  check_n(n);
  check_model(model);
  const std::size_t p = model.dim;
  PickFreezeAllDesign d;
  d.y.resize(n);
  d.y_frozen.assign(p, std::vector<double>(n));
  std::vector<double> x(p), x_prime(p), mixed(p);
  auto gen = stream.generator();
  for (std::size_t j = 0; j < n; ++j) {
    draw_inputs(model, gen, x);
    draw_inputs(model, gen, x_prime);
    d.y[j] = model(x);
    for (std::size_t i = 0; i < p; ++i) {
      mixed = x_prime;
      mixed[i] = x[i];
      d.y_frozen[i][j] = model(mixed);
    }
  }
  d.evaluations = (p + 1) * n;
  return d;
}

BudgetSplit budget_split(std::size_t budget, std::size_t p) {
  if (p == 0) throw InvalidArgument("dimension must be positive");
  return {budget, budget / (p + 1)};
}

}  // namespace sensikit
