#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "sensikit/models.hpp"
#include "sensikit/random.hpp"

namespace sensikit {

/// n i.i.d. input rows (row-major, n x p) and their outputs.
struct IidDesign {
  std::size_t n = 0;
  std::size_t p = 0;
  std::vector<double> x;
  std::vector<double> y;
  std::size_t evaluations = 0;

  std::span<const double> row(std::size_t j) const { return {x.data() + j * p, p}; }
  std::vector<double> column(std::size_t i) const;
};

/// Pairs (Y_j, Y^u_j) sharing the coordinates in u.
struct PickFreezeDesign {
  std::vector<std::size_t> u;
  std::vector<double> y;
  std::vector<double> y_u;
  std::size_t evaluations = 0;

  std::size_t n() const { return y.size(); }
};

/// Pick-Freeze pair plus an independent output sample W.
struct TripleDesign {
  std::vector<std::size_t> u;
  std::vector<double> y;
  std::vector<double> y_u;
  std::vector<double> w;
  std::size_t evaluations = 0;

  std::size_t n() const { return y.size(); }
};

/// One shared output sample and p frozen samples: Y^i keeps X_i and takes
/// every other coordinate from a common independent copy X'. Costs (p+1)N.
struct PickFreezeAllDesign {
  std::vector<double> y;
  std::vector<std::vector<double>> y_frozen;
  std::size_t evaluations = 0;

  std::size_t n() const { return y.size(); }
  std::size_t p() const { return y_frozen.size(); }
  PickFreezeDesign pair(std::size_t i) const;
};

/// Fills `row` with one input draw.
void draw_inputs(const Model& model, Generator& gen, std::span<double> row);

IidDesign sample_iid(const Model& model, std::size_t n, const RngStream& stream);

/// Indices in `u` are 0-based.
PickFreezeDesign sample_pickfreeze(const Model& model, std::span<const std::size_t> u,
                                   std::size_t n, const RngStream& stream);

TripleDesign sample_triple(const Model& model, std::span<const std::size_t> u, std::size_t n,
                           const RngStream& stream);

PickFreezeAllDesign sample_pickfreeze_all(const Model& model, std::size_t n,
                                          const RngStream& stream);

/// Equal-cost sample sizes for estimating all p first-order indices from a
/// budget of model calls: the rank method spends the whole budget on one
/// sample, Pick-Freeze spends budget / (p + 1) per sample (rounded down).
struct BudgetSplit {
  std::size_t rank_n = 0;
  std::size_t pickfreeze_n = 0;
};

BudgetSplit budget_split(std::size_t budget, std::size_t p);

}  // namespace sensikit
