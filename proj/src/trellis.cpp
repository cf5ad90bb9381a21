#include "succdec/trellis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace succdec {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Pr(X = +1) from a log-ratio, exact at +-inf.
double prob_plus(double llr) {
  if (llr == kInf) return 1.0;
  if (llr == -kInf) return 0.0;
  return 1.0 / (1.0 + std::exp(-llr));
}

void check_lengths(const ObservationTable &obs, std::span<const std::int8_t> training,
                   std::span<const double> priors) {
  if (training.size() != obs.length) throw std::invalid_argument("trellis: training length mismatch");
  if (!priors.empty() && priors.size() != obs.length) throw std::invalid_argument("trellis: prior length mismatch");
}

// D_t(q) for the given training entry and prior.
void state_weights(const ObservationTable &obs, std::size_t t, std::int8_t u, double prior, double *d) {
  const std::size_t q_n = obs.states;
  const double *ep = obs.plus(t);
  const double *em = obs.minus(t);
  if (u > 0) {
    std::copy(ep, ep + q_n, d);
  } else if (u < 0) {
    std::copy(em, em + q_n, d);
  } else {
    const double pp = prob_plus(prior);
    const double pm = 1.0 - pp;
    for (std::size_t q = 0; q < q_n; ++q) d[q] = pp * ep[q] + pm * em[q];
  }
}

void matvec(const SquareMatrix &m, const double *v, double *out) {
  const std::size_t n = m.size();
  const double *a = m.data().data();
  for (std::size_t r = 0; r < n; ++r) {
    const double *row = a + r * n;
    double s = 0;
    for (std::size_t c = 0; c < n; ++c) s += row[c] * v[c];
    out[r] = s;
  }
}

[[noreturn]] void starvation(const char *which, std::size_t t) {
  throw std::runtime_error(std::string("trellis: ") + which + " recursion lost all probability mass at t = " +
                           std::to_string(t));
}

// log sum_q a(q) g(q) exp(-dist(q)), skipping zero weights.
double log_weighted(const double *a, const double *g, const double *dist, std::size_t q_n) {
  double best = -kInf;
  for (std::size_t q = 0; q < q_n; ++q)
    if (a[q] > 0 && g[q] > 0) best = std::max(best, std::log(a[q] * g[q]) - dist[q]);
  if (best == -kInf) return best;
  double s = 0;
  for (std::size_t q = 0; q < q_n; ++q)
    if (a[q] > 0 && g[q] > 0) s += std::exp(std::log(a[q] * g[q]) - dist[q] - best);
  return best + std::log(s);
}

} // namespace

ObservationTable observe(const StateModel &model, std::span<const cplx> outputs) {
  const double n0 = model.noise_n0();
  if (!(n0 > 0)) throw std::invalid_argument("trellis: noise_n0 must be positive");
  ObservationTable obs;
  obs.length = outputs.size();
  obs.states = model.size();
  obs.noise_n0 = n0;
  const std::size_t q_n = obs.states;
  obs.dist_plus.resize(obs.length * q_n);
  obs.dist_minus.resize(obs.length * q_n);
  obs.lik_plus.resize(obs.length * q_n);
  obs.lik_minus.resize(obs.length * q_n);
  obs.log_offset.resize(obs.length);
  const auto &a = model.states();
  const double log_pi_n0 = std::log(std::numbers::pi * n0);
  for (std::size_t t = 0; t < obs.length; ++t) {
    double *dp = obs.dist_plus.data() + t * q_n;
    double *dm = obs.dist_minus.data() + t * q_n;
    double lo = kInf;
    for (std::size_t q = 0; q < q_n; ++q) {
      dp[q] = std::norm(outputs[t] - a[q]) / n0;
      dm[q] = std::norm(outputs[t] + a[q]) / n0;
      lo = std::min({lo, dp[q], dm[q]});
    }
    double *lp = obs.lik_plus.data() + t * q_n;
    double *lm = obs.lik_minus.data() + t * q_n;
    for (std::size_t q = 0; q < q_n; ++q) {
      dp[q] -= lo;
      dm[q] -= lo;
      lp[q] = std::exp(-dp[q]);
      lm[q] = std::exp(-dm[q]);
    }
    obs.log_offset[t] = -lo - log_pi_n0;
  }
  return obs;
}

SquareMatrix branch_metric(const StateModel &model, cplx y, std::int8_t training, double prior_llr) {
  const std::size_t q_n = model.size();
  const double n0 = model.noise_n0();
  const double scale = 1.0 / (std::numbers::pi * n0);
  double pp = 0.5, pm = 0.5;
  bool use_plus = true, use_minus = true;
  if (training > 0) use_minus = false;
  else if (training < 0) use_plus = false;
  else {
    pp = prob_plus(prior_llr);
    pm = 1.0 - pp;
  }
  SquareMatrix g(q_n);
  for (std::size_t q = 0; q < q_n; ++q) {
    const cplx aq = model.states()[q];
    double e = 0;
    if (use_plus) e += pp * std::exp(-std::norm(y - aq) / n0) * scale;
    if (use_minus) e += pm * std::exp(-std::norm(y + aq) / n0) * scale;
    for (std::size_t qp = 0; qp < q_n; ++qp) g(qp, q) = model.transition()(qp, q) * e;
  }
  return g;
}

TrellisPosteriors forward_backward(const StateModel &model, std::span<const cplx> outputs,
                                   std::span<const std::int8_t> training, std::span<const double> priors) {
  return forward_backward(model, observe(model, outputs), training, priors);
}

TrellisPosteriors forward_backward(const StateModel &model, const ObservationTable &obs,
                                   std::span<const std::int8_t> training, std::span<const double> priors) {
  check_lengths(obs, training, priors);
  const std::size_t n = obs.length;
  const std::size_t q_n = obs.states;
  if (q_n != model.size()) throw std::invalid_argument("trellis: observation table built for another model");
  TrellisPosteriors post;
  post.length = n;
  post.states = q_n;
  post.forward.resize(n * q_n);
  post.backward.resize(n * q_n);
  post.pred_backward.resize(n * q_n);
  post.forward_log_scale.resize(n);
  post.backward_log_scale.resize(n);

  const auto &pbar = model.stationary();
  const SquareMatrix &p = model.transition();
  const SquareMatrix &pt = model.transition_transposed();
  std::vector<double> d(q_n), tmp(q_n), next(q_n);

  if (n == 0) return post;

  // Forward: alpha_{t+1} = P (D_t . alpha_t), normalized.
  std::copy(pbar.begin(), pbar.end(), post.forward.begin());
  double log_ev = 0;
  for (std::size_t t = 0; t < n; ++t) {
    const double *a = post.forward.data() + t * q_n;
    state_weights(obs, t, training[t], priors.empty() ? 0.0 : priors[t], d.data());
    double s = 0;
    for (std::size_t q = 0; q < q_n; ++q) s += (tmp[q] = d[q] * a[q]);
    if (!(s > 0)) starvation("forward", t);
    post.forward_log_scale[t] = std::log(s);
    log_ev += std::log(s) + obs.log_offset[t];
    for (double &v : tmp) v /= s;
    matvec(p, tmp.data(), next.data());
    if (t + 1 < n) std::copy(next.begin(), next.end(), post.forward.begin() + static_cast<std::ptrdiff_t>((t + 1) * q_n));
  }
  // next now holds the normalized predicted distribution of H_{N+1}.
  double end = 0;
  for (std::size_t q = 0; q < q_n; ++q) end += next[q] * pbar[q];
  post.log_evidence = log_ev + std::log(end);

  // Backward: g_t = P^T beta_{t+1}, beta_t = D_t . g_t, normalized.
  std::vector<double> b(pbar.begin(), pbar.end());
  for (std::size_t t = n; t-- > 0;) {
    double *gt = post.pred_backward.data() + t * q_n;
    matvec(pt, b.data(), gt);
    double gs = 0;
    for (std::size_t q = 0; q < q_n; ++q) gs += gt[q];
    if (!(gs > 0)) starvation("backward", t);
    for (std::size_t q = 0; q < q_n; ++q) gt[q] /= gs;
    state_weights(obs, t, training[t], priors.empty() ? 0.0 : priors[t], d.data());
    double *bt = post.backward.data() + t * q_n;
    double s = 0;
    for (std::size_t q = 0; q < q_n; ++q) s += (bt[q] = d[q] * gt[q]);
    if (!(s > 0)) starvation("backward", t);
    for (std::size_t q = 0; q < q_n; ++q) bt[q] /= s;
    post.backward_log_scale[t] = std::log(s * gs);
    std::copy(bt, bt + q_n, b.begin());
  }
  return post;
}

double extrinsic_llr(const TrellisPosteriors &post, const ObservationTable &obs, std::size_t t) {
  const std::size_t q_n = post.states;
  const double *a = post.forward.data() + t * q_n;
  const double *g = post.pred_backward.data() + t * q_n;
  const double lp = log_weighted(a, g, obs.dist_plus.data() + t * q_n, q_n);
  const double lm = log_weighted(a, g, obs.dist_minus.data() + t * q_n, q_n);
  return lp - lm;
}

std::vector<double> bit_llr(const TrellisPosteriors &post, const ObservationTable &obs,
                            std::span<const double> priors, std::span<const std::size_t> positions) {
  std::vector<double> out;
  out.reserve(positions.size());
  for (std::size_t t : positions) {
    if (t >= post.length) throw std::out_of_range("bit_llr: position out of range");
    const double prior = priors.empty() ? 0.0 : priors[t];
    out.push_back(extrinsic_llr(post, obs, t) + prior);
  }
  return out;
}

std::vector<double> causal_llr(const StateModel &model, const ObservationTable &obs,
                               std::span<const std::int8_t> training, std::span<const std::size_t> positions,
                               std::span<const std::int8_t> inputs) {
  check_lengths(obs, training, {});
  return causal_llr(model, obs, forward_backward(model, obs, training), training, positions, inputs);
}

std::vector<double> causal_llr(const StateModel &model, const ObservationTable &obs, const TrellisPosteriors &post,
                               std::span<const std::int8_t> training, std::span<const std::size_t> positions,
                               std::span<const std::int8_t> inputs) {
  check_lengths(obs, training, {});
  if (inputs.size() != positions.size()) throw std::invalid_argument("causal_llr: one input per position required");
  if (post.length != obs.length) throw std::invalid_argument("causal_llr: posteriors for another block");
  const std::size_t n = obs.length;
  const std::size_t q_n = obs.states;
  const SquareMatrix &p = model.transition();
  std::vector<double> a(model.stationary().begin(), model.stationary().end());
  std::vector<double> d(q_n), tmp(q_n);
  std::vector<double> out;
  out.reserve(positions.size());
  std::size_t next_pos = 0;
  for (std::size_t t = 0; t < n && next_pos < positions.size(); ++t) {
    std::int8_t u = training[t];
    if (positions[next_pos] == t) {
      if (next_pos > 0 && positions[next_pos - 1] >= t)
        throw std::invalid_argument("causal_llr: positions must be increasing");
      const double *g = post.pred_backward.data() + t * q_n;
      const double lp = log_weighted(a.data(), g, obs.dist_plus.data() + t * q_n, q_n);
      const double lm = log_weighted(a.data(), g, obs.dist_minus.data() + t * q_n, q_n);
      out.push_back(lp - lm);
      u = inputs[next_pos];
      ++next_pos;
    }
    state_weights(obs, t, u, 0.0, d.data());
    double s = 0;
    for (std::size_t q = 0; q < q_n; ++q) s += (tmp[q] = d[q] * a[q]);
    if (!(s > 0)) starvation("causal forward", t);
    for (double &v : tmp) v /= s;
    matvec(p, tmp.data(), a.data());
  }
  if (out.size() != positions.size()) throw std::out_of_range("causal_llr: position out of range");
  return out;
}

std::vector<double> ied_step(const StateModel &model, const ObservationTable &obs,
                             std::span<const std::int8_t> training, std::span<const std::size_t> positions,
                             std::span<const double> ext_in) {
  if (ext_in.size() != positions.size()) throw std::invalid_argument("ied_step: one input per position required");
  std::vector<double> priors(obs.length, 0.0);
  for (std::size_t i = 0; i < positions.size(); ++i) priors.at(positions[i]) = ext_in[i];
  const TrellisPosteriors post = forward_backward(model, obs, training, priors);
  std::vector<double> out;
  out.reserve(positions.size());
  // Lambda / L_in with Lambda = extrinsic + prior leaves the extrinsic part.
  for (std::size_t t : positions) out.push_back(extrinsic_llr(post, obs, t));
  return out;
}

double bit_loss(double llr, int x) {
  const double z = -static_cast<double>(x) * llr;
  if (z == kInf) return kInf;
  if (z > 0) return (z + std::log1p(std::exp(-z))) / std::numbers::ln2;
  return std::log1p(std::exp(z)) / std::numbers::ln2;
}

} // namespace succdec
