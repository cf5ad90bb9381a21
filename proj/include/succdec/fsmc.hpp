#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "succdec/rng.hpp"

namespace succdec {

using cplx = std::complex<double>;

/// Dense n x n matrix stored row-major.
class SquareMatrix {
public:
  SquareMatrix() = default;
  explicit SquareMatrix(std::size_t n, double fill = 0.0) : n_(n), a_(n * n, fill) {}
  SquareMatrix(std::size_t n, std::vector<double> row_major);

  std::size_t size() const { return n_; }
  double &operator()(std::size_t r, std::size_t c) { return a_[r * n_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return a_[r * n_ + c]; }
  std::span<const double> row(std::size_t r) const { return {a_.data() + r * n_, n_}; }
  const std::vector<double> &data() const { return a_; }

  SquareMatrix transposed() const;
  SquareMatrix operator*(const SquareMatrix &rhs) const;
  std::vector<double> operator*(std::span<const double> v) const;

private:
  std::size_t n_ = 0;
  std::vector<double> a_;
};

/// Scalar quantizer for a zero-mean Gaussian source.
struct Quantizer1D {
  std::vector<double> points;
  std::vector<double> boundaries;  // interior cell edges, |points| - 1 of them
  double variance = 1.0;
  int iterations = 0;
  std::vector<double> distortion_history;  // MSE after each Lloyd update

  std::size_t levels() const { return points.size(); }
};

/// Lloyd-Max quantizer for N(0, variance). Starts from equiprobable cell
/// centroids and alternates centroid / midpoint updates until no point moves
/// by more than tol. Throws std::runtime_error if max_iterations is reached.
Quantizer1D lloyd_max(int levels, double variance, double tol = 1e-12, int max_iterations = 200000);

/// Mean squared error of the quantizer against N(0, variance).
double quantizer_distortion(std::span<const double> points, std::span<const double> boundaries,
                            double variance);

struct ModelResiduals {
  double max_column_sum_error = 0;
  double max_stationary_error = 0;  // |P p - p| per entry
  double stationary_sum_error = 0;
  double min_entry = 0;
  bool strictly_positive() const { return min_entry > 0; }
};

/// Quantized finite-state Markov fading channel Y_t = A_{S_t} X_t + W_t.
/// transition(to, from) = Pr(S_t = to | S_{t-1} = from); columns sum to one.
class StateModel {
public:
  StateModel() = default;
  StateModel(std::vector<cplx> states, SquareMatrix transition, std::vector<double> stationary,
             double noise_n0, double alpha = std::numeric_limits<double>::quiet_NaN(),
             double es_n0_db = std::numeric_limits<double>::quiet_NaN());

  /// Builds a model whose stationary vector is solved from the transition matrix.
  static StateModel from_transition(std::vector<cplx> states, SquareMatrix transition,
                                    double noise_n0);
  /// Memoryless channel with a single known gain.
  static StateModel single_state(cplx gain, double noise_n0);

  std::size_t size() const { return states_.size(); }
  const std::vector<cplx> &states() const { return states_; }
  const SquareMatrix &transition() const { return transition_; }
  /// Row-major transpose, used by backward recursions.
  const SquareMatrix &transition_transposed() const { return transition_t_; }
  const std::vector<double> &stationary() const { return stationary_; }
  double noise_n0() const { return noise_n0_; }
  double symbol_energy() const { return 1.0; }
  double alpha() const { return alpha_; }
  double es_n0_db() const { return es_n0_db_; }

  ModelResiduals residuals() const;
  /// Copy with a different noise level.
  StateModel with_noise(double noise_n0) const;

  void save(std::ostream &os) const;
  static StateModel load(std::istream &is);
  void save(const std::string &path) const;
  static StateModel load(const std::string &path);

private:
  std::vector<cplx> states_;
  SquareMatrix transition_;
  SquareMatrix transition_t_;
  std::vector<double> stationary_;
  double noise_n0_ = 1.0;
  double alpha_ = std::numeric_limits<double>::quiet_NaN();
  double es_n0_db_ = std::numeric_limits<double>::quiet_NaN();
};

double db_to_n0(double es_n0_db);

/// Quantized Gauss-Markov fading model. Real and imaginary parts of the
/// unit-power gain are quantized independently with `quantizer` (built for
/// variance 1/2); consecutive samples have per-dimension correlation alpha.
StateModel build_fsmc(double alpha, const Quantizer1D &quantizer, double es_n0_db,
                      double outer_edge = 6.0);

/// The reference channel used throughout the examples: alpha = 0.95 with a
/// 6-level Lloyd-Max quantizer per dimension (36 states).
StateModel example_channel(double es_n0_db = 3.0);

struct ChannelRealization {
  std::vector<int> states;
  std::vector<std::int8_t> inputs;
  std::vector<cplx> outputs;
  std::uint64_t seed = 0;
};

/// Draws a state path (stationary start, then transitions) and noisy outputs.
ChannelRealization simulate(const StateModel &model, std::span<const std::int8_t> inputs,
                            std::uint64_t seed);
ChannelRealization simulate(const StateModel &model, std::span<const std::int8_t> inputs,
                            StreamRng &rng);

/// Uniform i.i.d. +-1 symbols.
std::vector<std::int8_t> random_inputs(std::size_t n, StreamRng &rng);

} // namespace succdec
