#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace succdec {

/// Sampled pilot-utility function: mu(x) is the data rate (bits/symbol) when
/// each other symbol is independently known with probability x.
struct PilotUtilityCurve {
  std::vector<double> grid;
  std::vector<double> values;
  std::vector<double> errors;
  double es_n0_db = 0;
  std::string model_id;
  std::uint64_t seed = 0;
  std::size_t block_len = 0;
  std::size_t blocks = 0;
  /// Per-block samples, block_values[b][i] at grid[i]. Filled by the
  /// estimator, not stored in CSV files.
  std::vector<std::vector<double>> block_values;

  std::size_t size() const { return grid.size(); }
  void validate() const;

  void write_csv(std::ostream &os) const;
  static PilotUtilityCurve read_csv(std::istream &is);
};

/// Monotone piecewise-cubic fit of a pilot-utility curve (Akima slopes,
/// Hyman-filtered).
class MuInterpolant {
public:
  MuInterpolant() = default;

  double operator()(double x) const;
  double derivative(double x) const;
  /// Smallest x in [0, 1] with mu(x) >= y, to 1e-14. Throws "flat curve"
  /// when the fitted curve has no usable range.
  double inverse(double y) const;

  double lo() const { return lo_; }    // mu(0)
  double hi() const { return hi_; }    // mu(1)
  bool flat() const { return flat_; }
  const std::vector<double> &knots() const { return x_; }
  /// Sample values after isotonic projection.
  const std::vector<double> &fitted_values() const { return y_; }
  /// Integral of mu over [a, b], exact on each cubic piece.
  double integral(double a, double b) const;

  friend MuInterpolant fit_mu(const PilotUtilityCurve &curve);
  friend MuInterpolant mu_from_function(const std::function<double(double)> &f, std::size_t points);

  struct Impl;

private:
  std::shared_ptr<const Impl> impl_;
  std::vector<double> x_, y_;
  double lo_ = 0, hi_ = 0;
  bool flat_ = false;
};

/// Weighted isotonic projection (pool adjacent violators).
std::vector<double> isotonic_fit(std::span<const double> y, std::span<const double> weights);

/// Isotonic projection followed by monotone cubic interpolation. Needs at
/// least four grid points spanning [0, 1].
MuInterpolant fit_mu(const PilotUtilityCurve &curve);

/// Interpolant through exact samples of f on a uniform grid of `points`.
MuInterpolant mu_from_function(const std::function<double(double)> &f, std::size_t points);

} // namespace succdec
