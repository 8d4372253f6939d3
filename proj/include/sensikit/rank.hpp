#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "sensikit/sampling.hpp"

namespace sensikit {

/// Ranks of a conditioning sample V. Ranks are 0-based here: rank[j] is the
/// position of V_j in increasing order and order[r] is the index holding
/// rank r. Equal values are ranked by their index in the input.
struct RankData {
  std::vector<std::size_t> rank;
  std::vector<std::size_t> order;
  bool ties = false;

  std::size_t size() const { return rank.size(); }
};

RankData compute_ranks(std::span<const double> v);

/// prime: the maximum maps to itself. cyclic: the maximum wraps to the
/// minimum, giving a fixed-point-free n-cycle.
enum class NeighborKind { prime, cyclic };

/// map[j] is the index holding the next rank after V_j.
std::vector<std::size_t> neighbor_map(const RankData& ranks, NeighborKind kind);

/// (1/n) sum_j F_n(Y_j) (1 - F_n(Y_j)), the denominator of chatterjee_xi.
double chatterjee_spread(std::span<const double> y);

/// Chatterjee's coefficient of Y on V. Estimates the Cramér-von-Mises index.
double chatterjee_xi(std::span<const double> v, std::span<const double> y);

using ScalarMap = std::function<double(double)>;

struct ChiOptions {
  NeighborKind kind = NeighborKind::cyclic;
  /// Symmetric clamp of g and h values at +-clip.
  std::optional<double> clip;
};

/// (1/n) sum_j g(Y_j) h(Y_tau(j)), tau the neighbor map of V. Estimates
/// E[E[g(Y)|V] E[h(Y)|V]].
double chi_general(std::span<const double> v, std::span<const double> y, const ScalarMap& g,
                   const ScalarMap& h, const ChiOptions& options = {});

struct RankSobolOptions {
  /// Clamp Y to [-clip, clip] before estimating.
  std::optional<double> clip;
};

/// Single-sample first-order Sobol' index of Y with respect to V.
double rank_sobol(std::span<const double> v, std::span<const double> y,
                  const RankSobolOptions& options = {});

/// Sobol' index of every input column from one design; no model calls.
std::vector<double> rank_sobol_all(const IidDesign& design, const RankSobolOptions& options = {});

/// Cramér-von-Mises index of every input column from one design.
std::vector<double> rank_cvm_all(const IidDesign& design);

}  // namespace sensikit
