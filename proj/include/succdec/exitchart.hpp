#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "succdec/inforate.hpp"
#include "succdec/optimizer.hpp"
#include "succdec/pilot.hpp"

namespace succdec {

/// Sampled transfer function I_out = T(I_in).
struct ExitCurve {
  std::vector<double> i_in;
  std::vector<double> i_out;
  std::vector<double> errors;  // zeros for closed-form curves
  std::string label;

  /// Piecewise-linear value; constant beyond the sampled range.
  double operator()(double x) const;
  void write_csv(std::ostream &os) const;
};

/// Decoder transfer curves indexed by code rate. Each curve is stored in
/// inverse form: inverse(r, x) is the decoder input information needed to
/// reach output information x, +inf when the code never reaches x.
class DecoderFamily {
public:
  void add(double rate, std::vector<double> i_in, std::vector<double> i_out);
  bool empty() const { return curves_.empty(); }
  std::vector<double> rates() const;
  double inverse(double rate, double x) const;

  /// CSV rows "rate,i_in,i_out" sampled from the decoder transfer function.
  static DecoderFamily read_csv(std::istream &is);
  static DecoderFamily load(const std::string &path);
  void write_csv(std::ostream &os) const;

  /// Parametric stand-in for measured code curves, labeled synthetic:
  /// inverse(x; r) = min(1, (r + 0.05) (1 - (1 - x)^4)) for r = 0.10..0.70 step 0.01.
  static DecoderFamily synthetic(std::size_t samples = 101);

private:
  struct Curve {
    std::vector<double> out;  // increasing
    std::vector<double> in;
  };
  std::map<double, Curve> curves_;
};

/// T_k(x) = mu(x w_k + sigma_k) on the grid.
ExitCurve estimator_exit_from_mu(const MuInterpolant &mu, const WeightDistribution &w, int level,
                                 std::span<const double> grid);

enum class PriorKind { gaussian, erasure };

/// Monte-Carlo estimator transfer curve: level-k positions receive priors of
/// information I_in (Gaussian LLRs or erasures), the estimator runs once and
/// I_out is measured on its extrinsic outputs at interior level-k positions.
ExitCurve estimator_exit_mc(const StateModel &model, const PatternSource &source, int level,
                            std::span<const double> grid, const McConfig &mc, PriorKind kind = PriorKind::gaussian);

/// Binary-input information of a known-state Rayleigh channel with noise
/// variance sigma_w_sq, closed form through 2F1 at z = -1.
double decoder_input_info(double sigma_w_sq);

/// Largest family rate whose inverse curve stays more than d_t below the
/// estimator curve at every estimator grid point. nullopt when none does.
std::optional<double> max_supported_rate(const ExitCurve &estimator, const DecoderFamily &family, double d_t);

struct ExitDesign {
  std::vector<double> weights;
  std::vector<double> level_rates;  // r_k*, 0 where unsupported
  double overall = 0;
  double uniform_baseline = 0;
  double sed_baseline = 0;
  bool degenerate = false;  // some level supports no rate

  void write_csv(std::ostream &os) const;
};

/// sum_k w_k r_k*(w) for one weight vector.
double exit_objective(const MuInterpolant &mu, const DecoderFamily &family, const std::vector<double> &w,
                      double d_t, std::span<const double> grid, std::vector<double> *level_rates = nullptr);

/// Multi-start local search on the simplex: mass moves between level pairs
/// with a halving step. Starts are Dirichlet(1) draws plus the uniform and
/// the SED-optimal weights.
ExitDesign optimize_weights_exit(const MuInterpolant &mu, const DecoderFamily &family, int levels, double d_t,
                                 std::size_t starts, std::uint64_t seed, std::size_t grid_points = 51);

} // namespace succdec
