#include "succdec/contraction.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace succdec {

namespace {

constexpr double kFloor = 1e-300;

void require_positive(const SquareMatrix &p) {
  for (std::size_t r = 0; r < p.size(); ++r)
    for (std::size_t c = 0; c < p.size(); ++c)
      if (!(p(r, c) >= kFloor)) {
        std::ostringstream msg;
        msg << "contraction: entry (" << r << ", " << c << ") = " << p(r, c)
            << " is not strictly positive; the convergence bounds do not apply";
        throw std::domain_error(msg.str());
      }
}

} // namespace

double hilbert_metric(std::span<const double> u, std::span<const double> v) {
  if (u.size() != v.size() || u.empty()) throw std::invalid_argument("hilbert_metric: length mismatch");
  double hi = -std::numeric_limits<double>::infinity();
  double lo = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (!(u[i] > 0) || !(v[i] > 0)) throw std::domain_error("hilbert_metric: entries must be positive");
    const double r = std::log(u[i]) - std::log(v[i]);
    hi = std::max(hi, r);
    lo = std::min(lo, r);
  }
  return hi - lo;
}

double birkhoff_tau(const SquareMatrix &p) {
  require_positive(p);
  const std::size_t n = p.size();
  // log phi = min over (i, j, k, l) of lP_ik + lP_jl - lP_jk - lP_il. For a
  // fixed column pair (k, l) this is min_i (lP_ik - lP_il) - max_j (lP_jk - lP_jl).
  std::vector<double> lp(n * n);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c) lp[r * n + c] = std::log(p(r, c));
  double log_phi = 0;
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t l = k + 1; l < n; ++l) {
      double lo = std::numeric_limits<double>::infinity();
      double hi = -lo;
      for (std::size_t i = 0; i < n; ++i) {
        const double d = lp[i * n + k] - lp[i * n + l];
        lo = std::min(lo, d);
        hi = std::max(hi, d);
      }
      log_phi = std::min(log_phi, lo - hi);
    }
  const double s = std::exp(0.5 * log_phi);
  return (1 - s) / (1 + s);
}

double max_column_metric(const SquareMatrix &p) {
  require_positive(p);
  const std::size_t n = p.size();
  std::vector<double> ci(n), cj(n);
  double best = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t r = 0; r < n; ++r) ci[r] = p(r, i);
    for (std::size_t j = i + 1; j < n; ++j) {
      for (std::size_t r = 0; r < n; ++r) cj[r] = p(r, j);
      best = std::max(best, hilbert_metric(ci, cj));
    }
  }
  return best;
}

double theorem1_bound(const SquareMatrix &p, int levels) {
  if (levels < 2) throw std::invalid_argument("theorem1_bound: levels must be >= 2");
  return max_column_metric(p) / std::numbers::ln2 * std::pow(birkhoff_tau(p), levels - 2);
}

double lemma2_gap_bound(const SquareMatrix &p, double weight) {
  if (!(weight > 0) || weight > 1) throw std::invalid_argument("lemma2_gap_bound: weight must be in (0, 1]");
  const double a = max_column_metric(p) / std::numbers::ln2;
  const double tau = birkhoff_tau(p);
  return a * weight / (1 - tau * (1 - weight));
}

double ContractionReport::bound(int levels) const {
  if (levels < 2) throw std::invalid_argument("ContractionReport: levels must be >= 2");
  return max_pair_metric / std::numbers::ln2 * std::pow(tau, levels - 2);
}

void ContractionReport::write_csv(std::ostream &os) const {
  os << "K,bound,measured_gap,gap_stderr\n" << std::setprecision(10);
  for (const auto &r : rows) os << r.levels << ',' << r.bound << ',' << r.measured_gap << ',' << r.gap_stderr << '\n';
}

ContractionReport contraction_report(const SquareMatrix &p) {
  ContractionReport rep;
  rep.tau = birkhoff_tau(p);
  rep.max_pair_metric = max_column_metric(p);
  return rep;
}

} // namespace succdec
