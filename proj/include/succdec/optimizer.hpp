#pragma once

#include <cstddef>
#include <iosfwd>
#include <vector>

#include "succdec/interleaver.hpp"
#include "succdec/pilot.hpp"

namespace succdec {

/// Weights produced by the backward recursion for one multiplier value.
struct KktCandidate {
  double lambda = 0;
  std::vector<double> weights;  // w_1..w_K, unnormalized
  std::vector<double> sigma;    // sigma_1..sigma_K
  double theta = 0;             // 1 - sum w
  bool clamped = false;         // an inverse argument left [mu(0), mu(1)]
};

/// sigma_K = mu^-1(lambda), w_K = 1 - sigma_K, then
/// sigma_{i-1} = mu^-1(mu(sigma_i) - w_i mu'(sigma_i)), w_{i-1} = sigma_i - sigma_{i-1}.
/// Below mu(0) the curve is continued linearly so theta stays continuous.
KktCandidate kkt_weights(const MuInterpolant &mu, int levels, double lambda);

struct KktSolution {
  std::vector<double> weights;
  std::vector<double> sigma;
  std::vector<double> residuals;  // mu(sigma_k) + sum_{j>k} w_j mu'(sigma_j) - lambda
  std::vector<double> nu;         // multipliers of w_k >= 0
  double lambda = 0;
  double objective = 0;
  double max_residual = 0;
  std::size_t roots = 0;
  bool no_root = false;
  bool clamped = false;

  WeightDistribution distribution() const { return WeightDistribution(weights); }
  void write_csv(std::ostream &os) const;
};

/// Scans lambda over [mu(0), mu(1)], bisects every sign change of theta and
/// keeps the root with the largest sum_k w_k mu(sigma_k).
KktSolution solve_weights(const MuInterpolant &mu, int levels, std::size_t grid_points = 2001);

/// Stationarity residuals of a weight vector at multiplier lambda.
std::vector<double> kkt_residuals(const MuInterpolant &mu, const std::vector<double> &w, double lambda);

} // namespace succdec
