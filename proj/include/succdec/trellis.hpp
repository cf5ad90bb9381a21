#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "succdec/fsmc.hpp"

namespace succdec {

/// Per-time training entry: +1 / -1 for a known symbol, 0 for an erasure.
using TrainingSequence = std::vector<std::int8_t>;

/// Per-time prior log-ratio log Pr(X=+1)/Pr(X=-1). 0 is uniform; +-inf marks
/// a symbol known through its prior. An empty track means uniform everywhere.
using PriorTrack = std::vector<double>;

/// Observation likelihoods exp(-|y_t - x A_q|^2 / N0) for x = +-1, stored
/// after subtracting the smallest distance at each t. The dropped factor is
/// kept in log_offset so absolute likelihoods can be recovered.
struct ObservationTable {
  std::size_t length = 0;
  std::size_t states = 0;
  double noise_n0 = 1.0;
  std::vector<double> dist_plus;   // |y_t - A_q|^2 / N0 - min_t, index t * Q + q
  std::vector<double> dist_minus;  // |y_t + A_q|^2 / N0 - min_t
  std::vector<double> lik_plus;    // exp(-dist_plus)
  std::vector<double> lik_minus;
  std::vector<double> log_offset;  // -min_t - log(pi N0)

  const double *plus(std::size_t t) const { return lik_plus.data() + t * states; }
  const double *minus(std::size_t t) const { return lik_minus.data() + t * states; }
};

ObservationTable observe(const StateModel &model, std::span<const cplx> outputs);

/// Normalized forward / backward state probabilities. forward row t is
/// alpha_t, backward row t is beta_t, pred_backward row t is
/// sum_q' P(q', q) beta_{t+1}(q'). Rows sum to one.
struct TrellisPosteriors {
  std::size_t length = 0;
  std::size_t states = 0;
  std::vector<double> forward;
  std::vector<double> backward;
  std::vector<double> pred_backward;
  std::vector<double> forward_log_scale;   // log normalizer of each forward step
  std::vector<double> backward_log_scale;
  double log_evidence = 0;  // log p(y | training symbols), natural log, including the end boundary

  std::span<const double> alpha(std::size_t t) const { return {forward.data() + t * states, states}; }
  std::span<const double> beta(std::size_t t) const { return {backward.data() + t * states, states}; }
  std::span<const double> g(std::size_t t) const { return {pred_backward.data() + t * states, states}; }
};

/// gamma_t(q', q) = sum over admissible x of Pr(x) P(q', q) (pi N0)^-1 exp(-|y - x A_q|^2 / N0).
/// A known entry (+-1) restricts x to that value with Pr(x) = 1/2 as in the
/// conditional metric; prior_llr sets Pr(x) for unknown entries. Returned
/// row-major as (q', q).
SquareMatrix branch_metric(const StateModel &model, cplx y, std::int8_t training, double prior_llr = 0.0);

/// Normalized BCJR recursions with alpha_1 = beta_{N+1} = stationary.
/// Throws std::runtime_error naming the time index if a step loses all mass.
TrellisPosteriors forward_backward(const StateModel &model, const ObservationTable &obs,
                                   std::span<const std::int8_t> training, std::span<const double> priors = {});
TrellisPosteriors forward_backward(const StateModel &model, std::span<const cplx> outputs,
                                   std::span<const std::int8_t> training, std::span<const double> priors = {});

/// log sum_q alpha_t(q) e_t(q,+1) g_t(q) - log sum_q alpha_t(q) e_t(q,-1) g_t(q):
/// the channel's evidence about x_t from everything except its own prior or
/// training value.
double extrinsic_llr(const TrellisPosteriors &post, const ObservationTable &obs, std::size_t t);

/// log Lambda(X_t = +1) at each position: extrinsic part plus the position's
/// own prior log-ratio (0 when priors is empty).
std::vector<double> bit_llr(const TrellisPosteriors &post, const ObservationTable &obs,
                            std::span<const double> priors, std::span<const std::size_t> positions);

/// Ratios where the forward recursion additionally knows the true values of
/// earlier positions in `positions` (which must be increasing). Backward
/// recursion uses only the training sequence.
std::vector<double> causal_llr(const StateModel &model, const ObservationTable &obs,
                               std::span<const std::int8_t> training, std::span<const std::size_t> positions,
                               std::span<const std::int8_t> inputs);
/// Same, reusing posteriors already computed with the same training sequence.
std::vector<double> causal_llr(const StateModel &model, const ObservationTable &obs, const TrellisPosteriors &post,
                               std::span<const std::int8_t> training, std::span<const std::size_t> positions,
                               std::span<const std::int8_t> inputs);

/// One estimator pass of iterative estimation and decoding. ext_in holds the
/// log extrinsic inputs per entry of positions (0 = no information). Returns
/// log L_out = log Lambda - log L_in per position.
std::vector<double> ied_step(const StateModel &model, const ObservationTable &obs,
                             std::span<const std::int8_t> training, std::span<const std::size_t> positions,
                             std::span<const double> ext_in);

/// -log2 Pr(X = x | llr), i.e. log2(1 + exp(-x llr)), stable for large |llr|.
double bit_loss(double llr, int x);

} // namespace succdec
