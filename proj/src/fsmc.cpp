#include "succdec/fsmc.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>

#include <boost/math/distributions/normal.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace succdec {

SquareMatrix::SquareMatrix(std::size_t n, std::vector<double> row_major)
    : n_(n), a_(std::move(row_major)) {
  if (a_.size() != n * n) throw std::invalid_argument("SquareMatrix: data size is not n*n");
}

SquareMatrix SquareMatrix::transposed() const {
  SquareMatrix t(n_);
  for (std::size_t r = 0; r < n_; ++r)
    for (std::size_t c = 0; c < n_; ++c) t(c, r) = (*this)(r, c);
  return t;
}

SquareMatrix SquareMatrix::operator*(const SquareMatrix &rhs) const {
  if (rhs.n_ != n_) throw std::invalid_argument("SquareMatrix: size mismatch");
  SquareMatrix out(n_);
  for (std::size_t r = 0; r < n_; ++r)
    for (std::size_t k = 0; k < n_; ++k) {
      const double a = (*this)(r, k);
      for (std::size_t c = 0; c < n_; ++c) out(r, c) += a * rhs(k, c);
    }
  return out;
}

std::vector<double> SquareMatrix::operator*(std::span<const double> v) const {
  if (v.size() != n_) throw std::invalid_argument("SquareMatrix: vector size mismatch");
  std::vector<double> out(n_, 0.0);
  for (std::size_t r = 0; r < n_; ++r) {
    double s = 0;
    for (std::size_t c = 0; c < n_; ++c) s += (*this)(r, c) * v[c];
    out[r] = s;
  }
  return out;
}

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;

double gauss_pdf(double x, double sd) {
  return std::exp(-0.5 * (x / sd) * (x / sd)) / (sd * std::sqrt(2.0 * std::numbers::pi));
}

// Mass of N(0, sd^2) on [lo, hi], evaluated on the tail that keeps precision.
double interval_mass(double lo, double hi, double sd) {
  if (hi <= lo) return 0.0;
  const double a = lo / sd * kInvSqrt2;
  const double b = hi / sd * kInvSqrt2;
  if (a >= 0) return 0.5 * (std::erfc(a) - std::erfc(b));
  if (b <= 0) return 0.5 * (std::erfc(-b) - std::erfc(-a));
  return 1.0 - 0.5 * std::erfc(-a) - 0.5 * std::erfc(b);
}

std::vector<double> solve_stationary(const SquareMatrix &p) {
  // (P - I) x = 0 with the last equation replaced by sum(x) = 1.
  const std::size_t n = p.size();
  std::vector<double> a(n * (n + 1), 0.0);
  auto at = [&](std::size_t r, std::size_t c) -> double & { return a[r * (n + 1) + c]; };
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c) at(r, c) = p(r, c) - (r == c ? 1.0 : 0.0);
  for (std::size_t c = 0; c < n; ++c) at(n - 1, c) = 1.0;
  at(n - 1, n) = 1.0;
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::abs(at(r, col)) > std::abs(at(piv, col))) piv = r;
    if (std::abs(at(piv, col)) < 1e-300) throw std::runtime_error("stationary distribution is not unique");
    for (std::size_t c = 0; c <= n; ++c) std::swap(at(col, c), at(piv, c));
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col) continue;
      const double f = at(r, col) / at(col, col);
      if (f == 0) continue;
      for (std::size_t c = col; c <= n; ++c) at(r, c) -= f * at(col, c);
    }
  }
  std::vector<double> x(n);
  for (std::size_t r = 0; r < n; ++r) x[r] = std::max(0.0, at(r, n) / at(r, r));
  double s = 0;
  for (double v : x) s += v;
  for (double &v : x) v /= s;
  return x;
}

double parse_double(const std::string &tok) {
  char *end = nullptr;
  const double v = std::strtod(tok.c_str(), &end);
  if (end == tok.c_str() || *end != '\0') throw std::runtime_error("model file: bad number '" + tok + "'");
  return v;
}

} // namespace

double quantizer_distortion(std::span<const double> points, std::span<const double> boundaries,
                            double variance) {
  const double sd = std::sqrt(variance);
  const std::size_t l = points.size();
  double d = 0;
  for (std::size_t i = 0; i < l; ++i) {
    const double lo = i == 0 ? -INFINITY : boundaries[i - 1];
    const double hi = i + 1 == l ? INFINITY : boundaries[i];
    const double mass = interval_mass(lo, hi, sd);
    const double plo = std::isinf(lo) ? 0.0 : gauss_pdf(lo, sd);
    const double phi = std::isinf(hi) ? 0.0 : gauss_pdf(hi, sd);
    const double xplo = std::isinf(lo) ? 0.0 : lo * plo;
    const double xphi = std::isinf(hi) ? 0.0 : hi * phi;
    const double m1 = variance * (plo - phi);
    const double m2 = variance * mass + variance * (xplo - xphi);
    d += m2 - 2 * points[i] * m1 + points[i] * points[i] * mass;
  }
  return d;
}

Quantizer1D lloyd_max(int levels, double variance, double tol, int max_iterations) {
  if (levels < 1) throw std::invalid_argument("lloyd_max: levels must be >= 1");
  if (!(variance > 0)) throw std::invalid_argument("lloyd_max: variance must be > 0");
  if (!(tol > 0)) throw std::invalid_argument("lloyd_max: tol must be > 0");
  const double sd = std::sqrt(variance);
  const auto l = static_cast<std::size_t>(levels);

  Quantizer1D q;
  q.variance = variance;
  q.points.resize(l);
  q.boundaries.resize(l - 1);
  boost::math::normal_distribution<double> source(0.0, sd);
  for (std::size_t i = 0; i < l; ++i)
    q.points[i] = boost::math::quantile(source, (static_cast<double>(i) + 0.5) / static_cast<double>(l));

  double move = INFINITY;
  while (move >= tol) {
    if (q.iterations >= max_iterations) {
      std::ostringstream msg;
      msg << "lloyd_max: no convergence after " << max_iterations << " iterations (residual " << move << ")";
      throw std::runtime_error(msg.str());
    }
    for (std::size_t i = 0; i + 1 < l; ++i) q.boundaries[i] = 0.5 * (q.points[i] + q.points[i + 1]);
    move = 0;
    for (std::size_t i = 0; i < l; ++i) {
      const double lo = i == 0 ? -INFINITY : q.boundaries[i - 1];
      const double hi = i + 1 == l ? INFINITY : q.boundaries[i];
      const double mass = interval_mass(lo, hi, sd);
      const double plo = std::isinf(lo) ? 0.0 : gauss_pdf(lo, sd);
      const double phi = std::isinf(hi) ? 0.0 : gauss_pdf(hi, sd);
      const double c = variance * (plo - phi) / mass;
      move = std::max(move, std::abs(c - q.points[i]));
      q.points[i] = c;
    }
    ++q.iterations;
    q.distortion_history.push_back(quantizer_distortion(q.points, q.boundaries, variance));
  }
  for (std::size_t i = 0; i + 1 < l; ++i) q.boundaries[i] = 0.5 * (q.points[i] + q.points[i + 1]);
  return q;
}

StateModel::StateModel(std::vector<cplx> states, SquareMatrix transition, std::vector<double> stationary,
                       double noise_n0, double alpha, double es_n0_db)
    : states_(std::move(states)), transition_(std::move(transition)), stationary_(std::move(stationary)),
      noise_n0_(noise_n0), alpha_(alpha), es_n0_db_(es_n0_db) {
  const std::size_t q = states_.size();
  if (q == 0) throw std::invalid_argument("StateModel: no states");
  if (transition_.size() != q || stationary_.size() != q)
    throw std::invalid_argument("StateModel: dimension mismatch");
  if (!(noise_n0_ >= 0)) throw std::invalid_argument("StateModel: noise_n0 must be >= 0");
  if (std::isnan(es_n0_db_)) es_n0_db_ = -10.0 * std::log10(noise_n0_);
  const ModelResiduals r = residuals();
  if (r.min_entry < 0) throw std::invalid_argument("StateModel: negative transition entry");
  if (r.max_column_sum_error > 1e-9) throw std::invalid_argument("StateModel: transition columns do not sum to 1");
  if (r.stationary_sum_error > 1e-9) throw std::invalid_argument("StateModel: stationary vector does not sum to 1");
  if (r.max_stationary_error > 1e-8) throw std::invalid_argument("StateModel: stationary vector is not invariant");
  for (double p : stationary_)
    if (p < 0) throw std::invalid_argument("StateModel: negative stationary probability");
  transition_t_ = transition_.transposed();
}

StateModel StateModel::from_transition(std::vector<cplx> states, SquareMatrix transition, double noise_n0) {
  auto p = solve_stationary(transition);
  return StateModel(std::move(states), std::move(transition), std::move(p), noise_n0);
}

StateModel StateModel::single_state(cplx gain, double noise_n0) {
  return StateModel({gain}, SquareMatrix(1, 1.0), {1.0}, noise_n0);
}

ModelResiduals StateModel::residuals() const {
  ModelResiduals r;
  const std::size_t q = size();
  r.min_entry = INFINITY;
  for (std::size_t c = 0; c < q; ++c) {
    double s = 0;
    for (std::size_t row = 0; row < q; ++row) {
      s += transition_(row, c);
      r.min_entry = std::min(r.min_entry, transition_(row, c));
    }
    r.max_column_sum_error = std::max(r.max_column_sum_error, std::abs(s - 1.0));
  }
  const auto pp = transition_ * std::span<const double>(stationary_);
  double total = 0;
  for (std::size_t i = 0; i < q; ++i) {
    r.max_stationary_error = std::max(r.max_stationary_error, std::abs(pp[i] - stationary_[i]));
    total += stationary_[i];
  }
  r.stationary_sum_error = std::abs(total - 1.0);
  return r;
}

StateModel StateModel::with_noise(double noise_n0) const {
  return StateModel(states_, transition_, stationary_, noise_n0, alpha_);
}

void StateModel::save(std::ostream &os) const {
  const std::size_t q = size();
  os << std::setprecision(17);
  os << "succdec-fsmc 1\n";
  os << q << ' ' << alpha_ << ' ' << es_n0_db_ << ' ' << noise_n0_ << '\n';
  for (const cplx &a : states_) os << a.real() << ' ' << a.imag() << '\n';
  for (std::size_t c = 0; c < q; ++c) {
    for (std::size_t r = 0; r < q; ++r) os << (r ? " " : "") << transition_(r, c);
    os << '\n';
  }
  for (std::size_t i = 0; i < q; ++i) os << (i ? " " : "") << stationary_[i];
  os << '\n';
}

StateModel StateModel::load(std::istream &is) {
  std::string magic, version;
  is >> magic >> version;
  if (magic != "succdec-fsmc") throw std::runtime_error("model file: bad header");
  auto next = [&] {
    std::string tok;
    if (!(is >> tok)) throw std::runtime_error("model file: truncated");
    return parse_double(tok);
  };
  const auto q = static_cast<std::size_t>(next());
  const double alpha = next();
  const double db = next();
  const double n0 = next();
  std::vector<cplx> states(q);
  for (auto &a : states) {
    const double re = next();
    const double im = next();
    a = {re, im};
  }
  SquareMatrix p(q);
  for (std::size_t c = 0; c < q; ++c)
    for (std::size_t r = 0; r < q; ++r) p(r, c) = next();
  std::vector<double> stat(q);
  for (auto &v : stat) v = next();
  return StateModel(std::move(states), std::move(p), std::move(stat), n0, alpha, db);
}

void StateModel::save(const std::string &path) const {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write model file " + path);
  save(os);
}

StateModel StateModel::load(const std::string &path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot read model file " + path);
  return load(is);
}

double db_to_n0(double es_n0_db) { return std::pow(10.0, -es_n0_db / 10.0); }

StateModel build_fsmc(double alpha, const Quantizer1D &quantizer, double es_n0_db, double outer_edge) {
  if (!(alpha > 0 && alpha < 1)) throw std::invalid_argument("build_fsmc: alpha must lie in (0,1)");
  if (std::abs(quantizer.variance - 0.5) > 1e-12)
    throw std::invalid_argument("build_fsmc: quantizer must be built for variance 1/2");
  const std::size_t l = quantizer.levels();
  const double sd = std::sqrt(quantizer.variance);
  const double cond_sd = sd * std::sqrt(1.0 - alpha * alpha);

  std::vector<double> edges;
  edges.push_back(-outer_edge);
  edges.insert(edges.end(), quantizer.boundaries.begin(), quantizer.boundaries.end());
  edges.push_back(outer_edge);

  // joint[i][j] = Pr(previous in cell i, next in cell j) for one dimension.
  // The inner probability is closed-form; the outer integral is split where the
  // conditional mean crosses a cell edge so each piece is smooth.
  using boost::math::quadrature::gauss_kronrod;
  std::vector<double> joint(l * l, 0.0);
  for (std::size_t i = 0; i < l; ++i) {
    std::vector<double> cuts{edges[i], edges[i + 1]};
    for (double e : edges) {
      const double u = e / alpha;
      if (u > edges[i] && u < edges[i + 1]) cuts.push_back(u);
    }
    std::sort(cuts.begin(), cuts.end());
    for (std::size_t j = 0; j < l; ++j) {
      auto f = [&](double u) {
        return gauss_pdf(u, sd) * interval_mass(edges[j] - alpha * u, edges[j + 1] - alpha * u, cond_sd);
      };
      double total = 0;
      for (std::size_t c = 0; c + 1 < cuts.size(); ++c) {
        if (cuts[c + 1] <= cuts[c]) continue;
        total += gauss_kronrod<double, 31>::integrate(f, cuts[c], cuts[c + 1], 15, 1e-14);
      }
      joint[i * l + j] = total;
    }
  }

  std::vector<double> p1(l * l);  // p1[j*l + i] = Pr(next j | prev i)
  std::vector<double> stat1(l);
  double stat_total = 0;
  for (std::size_t i = 0; i < l; ++i) {
    double row = 0;
    for (std::size_t j = 0; j < l; ++j) row += joint[i * l + j];
    if (!(row > 0)) {
      std::ostringstream msg;
      msg << "build_fsmc: zero-probability transition row for cell " << i << " [" << edges[i] << ", "
          << edges[i + 1] << "]";
      throw std::runtime_error(msg.str());
    }
    for (std::size_t j = 0; j < l; ++j) p1[j * l + i] = joint[i * l + j] / row;
    stat1[i] = interval_mass(edges[i], edges[i + 1], sd);
    if (!(stat1[i] > 0)) throw std::runtime_error("build_fsmc: zero stationary mass in cell " + std::to_string(i));
    stat_total += stat1[i];
  }
  for (double &v : stat1) v /= stat_total;

  const std::size_t q = l * l;
  std::vector<cplx> states(q);
  SquareMatrix p(q);
  std::vector<double> stat(q);
  for (std::size_t re = 0; re < l; ++re)
    for (std::size_t im = 0; im < l; ++im) {
      const std::size_t s = re * l + im;
      states[s] = {quantizer.points[re], quantizer.points[im]};
      stat[s] = stat1[re] * stat1[im];
      for (std::size_t re2 = 0; re2 < l; ++re2)
        for (std::size_t im2 = 0; im2 < l; ++im2)
          p(re2 * l + im2, s) = p1[re2 * l + re] * p1[im2 * l + im];
    }
  // Exact renormalization of the Kronecker product columns.
  for (std::size_t c = 0; c < q; ++c) {
    double s = 0;
    for (std::size_t r = 0; r < q; ++r) s += p(r, c);
    for (std::size_t r = 0; r < q; ++r) p(r, c) /= s;
  }
  return StateModel(std::move(states), std::move(p), std::move(stat), db_to_n0(es_n0_db), alpha, es_n0_db);
}

StateModel example_channel(double es_n0_db) {
  static const Quantizer1D quantizer = lloyd_max(6, 0.5);
  return build_fsmc(0.95, quantizer, es_n0_db);
}

std::vector<std::int8_t> random_inputs(std::size_t n, StreamRng &rng) {
  std::vector<std::int8_t> x(n);
  for (auto &v : x) v = (rng() >> 63) ? std::int8_t{1} : std::int8_t{-1};
  return x;
}

ChannelRealization simulate(const StateModel &model, std::span<const std::int8_t> inputs, std::uint64_t seed) {
  StreamRng rng(seed, Stream::channel);
  auto r = simulate(model, inputs, rng);
  r.seed = seed;
  return r;
}

ChannelRealization simulate(const StateModel &model, std::span<const std::int8_t> inputs, StreamRng &rng) {
  if (inputs.empty()) throw std::invalid_argument("simulate: inputs must be nonempty");
  const std::size_t q = model.size();
  const auto &p = model.transition_transposed();  // row c = column c of P
  std::vector<double> cum_stat(q);
  std::vector<double> cum_cols(q * q);
  double acc = 0;
  for (std::size_t i = 0; i < q; ++i) cum_stat[i] = acc += model.stationary()[i];
  for (std::size_t c = 0; c < q; ++c) {
    acc = 0;
    for (std::size_t r = 0; r < q; ++r) cum_cols[c * q + r] = acc += p(c, r);
  }
  auto draw = [&](const double *cum) {
    const double u = rng.uniform() * cum[q - 1];
    const auto it = std::upper_bound(cum, cum + q, u);
    return static_cast<int>(std::min<std::ptrdiff_t>(it - cum, static_cast<std::ptrdiff_t>(q - 1)));
  };

  ChannelRealization out;
  const std::size_t n = inputs.size();
  out.states.resize(n);
  out.inputs.assign(inputs.begin(), inputs.end());
  out.outputs.resize(n);
  out.seed = rng.key();
  const double noise_sd = std::sqrt(model.noise_n0() / 2.0);
  std::normal_distribution<double> noise(0.0, 1.0);
  int s = draw(cum_stat.data());
  for (std::size_t t = 0; t < n; ++t) {
    if (t > 0) s = draw(cum_cols.data() + static_cast<std::size_t>(s) * q);
    out.states[t] = s;
    cplx w{0.0, 0.0};
    if (noise_sd > 0) {
      const double re = noise(rng);
      const double im = noise(rng);
      w = {noise_sd * re, noise_sd * im};
    }
    out.outputs[t] = model.states()[static_cast<std::size_t>(s)] * static_cast<double>(inputs[t]) + w;
  }
  return out;
}

} // namespace succdec
