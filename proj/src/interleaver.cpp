#include "succdec/interleaver.hpp"

#include <cmath>
#include <istream>
#include <iomanip>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace succdec {

WeightDistribution::WeightDistribution(std::vector<double> weights) : w_(std::move(weights)) {
  if (w_.empty()) throw std::invalid_argument("WeightDistribution: no levels");
  double s = 0;
  for (double v : w_) {
    if (!(v >= 0)) throw std::invalid_argument("WeightDistribution: negative weight");
    s += v;
  }
  if (std::abs(s - 1.0) > 1e-12) {
    std::ostringstream msg;
    msg << std::setprecision(17) << "WeightDistribution: weights sum to " << s << ", not 1";
    throw std::invalid_argument(msg.str());
  }
}

WeightDistribution WeightDistribution::uniform(int levels) {
  if (levels < 1) throw std::invalid_argument("WeightDistribution: levels must be >= 1");
  return WeightDistribution(std::vector<double>(static_cast<std::size_t>(levels), 1.0 / levels));
}

double WeightDistribution::partial_sum(int level) const {
  double s = 0;
  for (int j = 1; j < level; ++j) s += w_[static_cast<std::size_t>(j - 1)];
  return s;
}

void WeightDistribution::save(std::ostream &os) const {
  os << std::setprecision(17);
  for (std::size_t i = 0; i < w_.size(); ++i) os << (i ? " " : "") << w_[i];
  os << '\n';
}

WeightDistribution WeightDistribution::load(std::istream &is) {
  std::vector<double> w;
  double v;
  while (is >> v) w.push_back(v);
  return WeightDistribution(std::move(w));
}

InterleaverPattern::InterleaverPattern(std::vector<int> assignment, int levels, std::size_t period,
                                       std::size_t dropped)
    : pi_(std::move(assignment)), levels_(levels), period_(period ? period : pi_.size()), dropped_(dropped) {
  if (levels_ < 1) throw std::invalid_argument("InterleaverPattern: levels must be >= 1");
  positions_.resize(static_cast<std::size_t>(levels_));
  for (std::size_t t = 0; t < pi_.size(); ++t) {
    const int k = pi_[t];
    if (k < 1 || k > levels_) throw std::invalid_argument("InterleaverPattern: level index out of range");
    positions_[static_cast<std::size_t>(k - 1)].push_back(t);
  }
}

std::vector<std::size_t> InterleaverPattern::level_sizes() const {
  std::vector<std::size_t> n;
  for (const auto &p : positions_) n.push_back(p.size());
  return n;
}

const std::vector<std::size_t> &InterleaverPattern::positions(int level) const {
  if (level < 1 || level > levels_) throw std::out_of_range("InterleaverPattern: level out of range");
  return positions_[static_cast<std::size_t>(level - 1)];
}

WeightDistribution InterleaverPattern::empirical_weights() const {
  std::vector<double> w;
  const double n = static_cast<double>(pi_.size());
  for (const auto &p : positions_) w.push_back(static_cast<double>(p.size()) / n);
  // Guard the sum-to-one check against rounding.
  const double s = std::accumulate(w.begin(), w.end(), 0.0);
  for (double &v : w) v /= s;
  return WeightDistribution(std::move(w));
}

InterleaverPattern InterleaverPattern::tiled(std::size_t length) const {
  if (period_ == 0) throw std::logic_error("InterleaverPattern: empty pattern cannot be tiled");
  const std::size_t whole = length / period_ * period_;
  if (whole == 0) throw std::invalid_argument("InterleaverPattern: length shorter than one period");
  std::vector<int> pi(whole);
  for (std::size_t t = 0; t < whole; ++t) pi[t] = pi_[t % period_];
  return InterleaverPattern(std::move(pi), levels_, period_, length - whole);
}

void InterleaverPattern::save(std::ostream &os) const {
  os << levels_ << ' ' << pi_.size() << '\n';
  for (int k : pi_) os << k << '\n';
}

InterleaverPattern InterleaverPattern::load(std::istream &is) {
  int k = 0;
  std::size_t n = 0;
  if (!(is >> k >> n)) throw std::runtime_error("pattern file: bad header");
  std::vector<int> pi(n);
  for (auto &v : pi)
    if (!(is >> v)) throw std::runtime_error("pattern file: truncated");
  return InterleaverPattern(std::move(pi), k);
}

InterleaverPattern rectangular(int levels, std::size_t length) {
  if (levels < 1) throw std::invalid_argument("rectangular: levels must be >= 1");
  std::vector<int> omega(static_cast<std::size_t>(levels));
  std::iota(omega.begin(), omega.end(), 1);
  return InterleaverPattern(std::move(omega), levels).tiled(length);
}

std::vector<int> binary_weighted_core(int levels) {
  if (levels < 2) throw std::invalid_argument("binary_weighted: levels must be >= 2");
  std::vector<int> v{2};
  for (int k = 3; k <= levels; ++k) {
    std::vector<int> next;
    next.reserve(2 * v.size() + 1);
    for (int sub : v) {
      next.push_back(k);
      next.push_back(sub);
    }
    next.push_back(k);
    v = std::move(next);
  }
  return v;
}

std::size_t binary_weighted_period(int levels, int reps) {
  if (levels < 2 || levels > 30) throw std::invalid_argument("binary_weighted: levels must be in [2, 30]");
  if (reps < 1) throw std::invalid_argument("binary_weighted: reps must be >= 1");
  return 1 + static_cast<std::size_t>(reps) * ((std::size_t{1} << (levels - 1)) - 1);
}

InterleaverPattern binary_weighted(int levels, int reps, std::size_t length) {
  const std::size_t period = binary_weighted_period(levels, reps);
  if (length < period) throw std::invalid_argument("binary_weighted: length shorter than one subpattern");
  const auto v = binary_weighted_core(levels);
  std::vector<int> omega{1};
  for (int r = 0; r < reps; ++r) omega.insert(omega.end(), v.begin(), v.end());
  return InterleaverPattern(std::move(omega), levels).tiled(length);
}

int default_binary_reps(int levels) {
  switch (levels) {
  case 2: return 9;
  case 3: return 5;
  case 4: return 3;
  case 5: return 2;
  default: return 1;
  }
}

InterleaverPattern sample_random(const WeightDistribution &w, std::size_t length, std::uint64_t seed) {
  StreamRng rng(seed, Stream::pattern);
  return sample_random(w, length, rng);
}

InterleaverPattern sample_random(const WeightDistribution &w, std::size_t length, StreamRng &rng) {
  const auto k = static_cast<std::size_t>(w.levels());
  std::vector<double> cum(k);
  double acc = 0;
  for (std::size_t i = 0; i < k; ++i) cum[i] = acc += w[i];
  std::vector<int> pi(length);
  for (auto &v : pi) {
    const double u = rng.uniform() * acc;
    std::size_t lvl = 0;
    while (lvl + 1 < k && (u >= cum[lvl] || w[lvl] == 0)) ++lvl;
    v = static_cast<int>(lvl) + 1;
  }
  return InterleaverPattern(std::move(pi), w.levels());
}

std::vector<std::int8_t> training_mask(const InterleaverPattern &pattern, int level,
                                       std::span<const std::int8_t> inputs) {
  if (level < 1 || level > pattern.levels()) throw std::out_of_range("training_mask: level out of range");
  if (inputs.size() != pattern.length()) throw std::invalid_argument("training_mask: length mismatch");
  std::vector<std::int8_t> u(inputs.size(), 0);
  for (std::size_t t = 0; t < u.size(); ++t)
    if (pattern[t] < level) u[t] = inputs[t];
  return u;
}

} // namespace succdec
