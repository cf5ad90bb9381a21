#pragma once

#include <cstddef>
#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "succdec/inforate.hpp"
#include "succdec/optimizer.hpp"

namespace succdec {

/// Gallager function E0(rho) of one subchannel, sampled on a rho grid.
class ExponentCurve {
public:
  ExponentCurve() = default;
  ExponentCurve(std::vector<double> rho, std::vector<double> e0, std::vector<double> errors, int level = 0);

  const std::vector<double> &rho() const { return rho_; }
  const std::vector<double> &e0() const { return e0_; }
  const std::vector<double> &errors() const { return err_; }
  int level() const { return level_; }

  /// Monotone cubic through the samples.
  double operator()(double rho) const;
  /// Copy with every sample moved by n_sigma standard errors (rho = 0 stays 0).
  ExponentCurve shifted(double n_sigma) const;
  /// Largest violation of monotonicity and concavity, in standard errors.
  double monotonicity_violation() const;
  double concavity_violation() const;

  void write_csv(std::ostream &os) const;

private:
  struct Impl;
  std::shared_ptr<const Impl> impl_;
  std::vector<double> rho_, e0_, err_;
  int level_ = 0;
};

/// {0, 0.05, ..., 1}.
std::vector<double> default_rho_grid();

/// Monte-Carlo E0 for one level from BCJR posteriors at interior level positions.
ExponentCurve e0_subchannel(const StateModel &model, const PatternSource &source, int level,
                            std::span<const double> rho_grid, const McConfig &mc);
/// All levels of a source with one channel draw per block.
std::vector<ExponentCurve> e0_all_levels(const StateModel &model, const PatternSource &source,
                                         std::span<const double> rho_grid, const McConfig &mc);

/// max over rho in [0, 1] of E0(rho) - rho r, never below 0.
double error_exponent(const ExponentCurve &curve, double r);

/// Rate solving E^r(r) = -log2(p_bar_e / K) / N_k; 0 if even r = 0 falls short.
double finite_length_rate(const ExponentCurve &curve, double n_k, int levels, double p_bar_e);

/// Largest-remainder split of n into integer parts proportional to w.
std::vector<std::size_t> apportion(std::size_t n, std::span<const double> w);

struct PlanLevel {
  int level = 0;
  std::size_t n_k = 0;
  double w_k = 0;
  double rbar_k = 0;
};

struct PlanCandidate {
  int levels = 0;
  std::vector<PlanLevel> rows;
  double rbar = 0;
  double rbar_lo = 0, rbar_hi = 0;  // from curves moved by -+1 standard error
};

struct FiniteLengthPlan {
  std::size_t total_length = 0;
  double p_bar_e = 0;
  std::string family;
  std::vector<PlanCandidate> candidates;
  int best_levels = 0;

  const PlanCandidate &best() const;
  void write_csv(std::ostream &os) const;
};

enum class PlanFamily { rectangular, random };

/// Exponent curves and weights for one level count, reusable across lengths.
struct LevelDesign {
  int levels = 0;
  std::vector<double> weights;
  std::vector<ExponentCurve> curves;
};

/// Rectangular designs use equal weights; random designs use the SED-optimal
/// weights of mu (mu may be null for rectangular).
LevelDesign design_levels(const StateModel &model, PlanFamily family, int levels, const MuInterpolant *mu,
                          std::span<const double> rho_grid, const McConfig &mc);

PlanCandidate plan_candidate(const LevelDesign &design, std::size_t total_length, double p_bar_e);

FiniteLengthPlan optimal_levels(std::span<const LevelDesign> designs, std::size_t total_length, double p_bar_e,
                                std::string family_name);

} // namespace succdec
