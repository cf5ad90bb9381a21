#include "succdec/runner.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "succdec/contraction.hpp"
#include "succdec/exitchart.hpp"
#include "succdec/exponent.hpp"
#include "succdec/interleaver.hpp"
#include "succdec/optimizer.hpp"
#include "succdec/pilot.hpp"

namespace succdec {

namespace fs = std::filesystem;

namespace {

class TaskRun {
public:
  TaskRun(const ExperimentConfig &c, std::ostream *log) : c_(c), log_(log), model_(build_channel(c)) {}

  void execute() {
    switch (c_.task) {
    case Task::mu_curve: mu_curve(); break;
    case Task::rates: rates(); break;
    case Task::optimize_weights: optimize_weights(); break;
    case Task::exit: exit(); break;
    case Task::exponent: exponent(); break;
    case Task::plan: plan(); break;
    case Task::bound_check: bound_check(); break;
    }
  }

  std::vector<std::string> outputs;

private:
  const ExperimentConfig &c_;
  std::ostream *log_;
  StateModel model_;
  std::optional<PilotUtilityCurve> curve_;
  std::optional<MuInterpolant> mu_;

  void note(const std::string &s) {
    if (log_) *log_ << s << '\n';
  }

  template <class Fn>
  void write(const std::string &name, Fn &&fn) {
    const fs::path p = fs::path(c_.out_dir) / name;
    std::ofstream os(p);
    if (!os) throw std::runtime_error("cannot write " + p.string());
    fn(os);
    if (!os) throw std::runtime_error("write failed: " + p.string());
    outputs.push_back(name);
    note("wrote " + p.string());
  }

  const MuInterpolant &mu() {
    if (mu_) return *mu_;
    if (!c_.mu_curve.empty()) {
      std::ifstream in(c_.resolve(c_.mu_curve));
      if (!in) throw std::runtime_error("cannot open " + c_.resolve(c_.mu_curve));
      curve_ = PilotUtilityCurve::read_csv(in);
    } else {
      note("sampling pilot-utility curve");
      const auto grid = default_mu_grid(c_.grid_points, c_.refine);
      curve_ = pilot_utility(model_, grid, c_.mc);
      write("mu_curve.csv", [&](std::ostream &os) { curve_->write_csv(os); });
    }
    mu_ = fit_mu(*curve_);
    if (mu_->flat()) throw std::runtime_error("pilot-utility curve is flat within its standard errors");
    return *mu_;
  }

  WeightDistribution random_weights() {
    if (!c_.optimize) return WeightDistribution(c_.weights);
    const auto sol = solve_weights(mu(), c_.levels);
    if (sol.no_root) throw std::runtime_error("weight optimizer found no root");
    write("kkt.csv", [&](std::ostream &os) { sol.write_csv(os); });
    return sol.distribution();
  }

  int reps() const { return c_.reps > 0 ? c_.reps : default_binary_reps(c_.levels); }

  PatternSource source() {
    if (c_.family == "rectangular") return PatternSource::fixed(rectangular(c_.levels, c_.levels));
    if (c_.family == "binary") {
      const int r = reps();
      return PatternSource::fixed(binary_weighted(c_.levels, r, binary_weighted_period(c_.levels, r)));
    }
    return PatternSource::random(random_weights());
  }

  void mu_curve() {
    if (!c_.mu_curve.empty()) throw std::runtime_error("mu-curve task samples the curve; drop task.mu_curve");
    mu();
    write("mu_summary.csv", [&](std::ostream &os) {
      os << std::setprecision(12) << "quantity,value\n"
         << "mu0," << mu_->lo() << "\nmu1," << mu_->hi() << "\nintegral," << mu_->integral(0, 1) << '\n';
    });
  }

  void rates() {
    const auto src = source();
    const auto r = overall_rates(model_, src, c_.mc, c_.with_capacity);
    write("rates.csv", [&](std::ostream &os) { r.write_csv(os); });
    if (c_.with_capacity) {
      std::ostringstream s;
      s << "R = " << r.rate.mean << " C = " << r.capacity.mean << " R/C = " << r.ratio();
      note(s.str());
    }
  }

  void optimize_weights() {
    const auto sol = solve_weights(mu(), c_.levels);
    if (sol.no_root) throw std::runtime_error("weight optimizer found no root");
    write("kkt.csv", [&](std::ostream &os) { sol.write_csv(os); });
    const auto w = sol.distribution();
    const auto cap = capacity_from_mu(*mu_, w);
    write("mu_rates.csv", [&](std::ostream &os) {
      os << std::setprecision(12) << "level,weight,R,C\n";
      double sum = 0;
      for (int k = 1; k <= c_.levels; ++k) {
        const double sk = w.partial_sum(k);
        const double rk = (*mu_)(sk);
        sum += w[static_cast<std::size_t>(k - 1)] * rk;
        os << k << ',' << w[static_cast<std::size_t>(k - 1)] << ',' << rk << ','
           << cap.per_level[static_cast<std::size_t>(k - 1)] << '\n';
      }
      os << "all,1," << sum << ',' << cap.overall << '\n';
    });
  }

  DecoderFamily family() const {
    if (c_.decoder_family == "synthetic") return DecoderFamily::synthetic();
    return DecoderFamily::load(c_.resolve(c_.decoder_family));
  }

  void exit() {
    const auto fam = family();
    std::vector<double> grid(c_.exit_grid);
    for (std::size_t i = 0; i < grid.size(); ++i)
      grid[i] = static_cast<double>(i) / static_cast<double>(grid.size() - 1);

    if (c_.family == "random") {
      ExitDesign design;
      if (c_.optimize) {
        design = optimize_weights_exit(mu(), fam, c_.levels, c_.d_t, c_.starts, c_.mc.seed, c_.exit_grid);
      } else {
        design.weights = c_.weights;
        design.overall = exit_objective(mu(), fam, c_.weights, c_.d_t, grid, &design.level_rates);
        for (double r : design.level_rates) design.degenerate = design.degenerate || r <= 0;
      }
      const WeightDistribution w(design.weights);
      for (int k = 1; k <= c_.levels; ++k)
        write("exit_level_" + std::to_string(k) + ".csv",
              [&](std::ostream &os) { estimator_exit_from_mu(*mu_, w, k, grid).write_csv(os); });
      write("exit_design.csv", [&](std::ostream &os) { design.write_csv(os); });
      return;
    }

    const auto src = source();
    const auto kind = c_.prior == "erasure" ? PriorKind::erasure : PriorKind::gaussian;
    const auto pattern = src.for_block(c_.mc.block_len, c_.mc.seed, 0);
    ExitDesign design;
    design.weights = pattern.empirical_weights().values();
    for (int k = 1; k <= c_.levels; ++k) {
      const auto curve = estimator_exit_mc(model_, src, k, grid, c_.mc, kind);
      write("exit_level_" + std::to_string(k) + ".csv", [&](std::ostream &os) { curve.write_csv(os); });
      const auto r = max_supported_rate(curve, fam, c_.d_t);
      design.level_rates.push_back(r.value_or(0.0));
      design.degenerate = design.degenerate || !r;
      design.overall += design.weights[static_cast<std::size_t>(k - 1)] * r.value_or(0.0);
    }
    write("exit_design.csv", [&](std::ostream &os) { design.write_csv(os); });
  }

  void exponent() {
    const auto src = source();
    const auto rho = default_rho_grid();
    const auto curves = e0_all_levels(model_, src, rho, c_.mc);
    for (const auto &cv : curves)
      write("exponent_level_" + std::to_string(cv.level()) + ".csv", [&](std::ostream &os) { cv.write_csv(os); });
  }

  void plan() {
    const bool rect = c_.family == "rectangular";
    const MuInterpolant *m = rect ? nullptr : &mu();
    const auto rho = default_rho_grid();
    std::vector<LevelDesign> designs;
    for (int k : c_.candidates) {
      note("exponent curves for K = " + std::to_string(k));
      designs.push_back(design_levels(model_, rect ? PlanFamily::rectangular : PlanFamily::random, k, m, rho, c_.mc));
    }
    for (std::size_t n : c_.lengths) {
      const auto p = optimal_levels(designs, n, c_.p_bar_e, c_.family);
      write("plan_N" + std::to_string(n) + ".csv", [&](std::ostream &os) { p.write_csv(os); });
    }
  }

  void bound_check() {
    auto rep = contraction_report(model_.transition());
    for (int k : c_.candidates) {
      if (k < 2) continue;
      note("rates for rectangular K = " + std::to_string(k));
      const auto r = overall_rates(model_, PatternSource::fixed(rectangular(k, k)), c_.mc, true);
      rep.rows.push_back({k, rep.bound(k), r.gap.mean, r.gap.std_error});
    }
    write("bound.csv", [&](std::ostream &os) { rep.write_csv(os); });
  }
};

std::string hex64(std::uint64_t v) {
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << v;
  return os.str();
}

} // namespace

RunResult run(const ExperimentConfig &config, std::ostream *log) {
  const auto diag = validate(config);
  if (!diag.empty()) {
    std::string msg = "invalid config:";
    for (const auto &d : diag) msg += "\n  " + format_diagnostic(d);
    throw std::invalid_argument(msg);
  }
  const auto start = std::chrono::steady_clock::now();
  fs::create_directories(config.out_dir);

  TaskRun task(config, log);
  try {
    task.execute();
  } catch (const std::exception &e) {
    throw std::runtime_error("task " + task_name(config.task) + ": " + e.what());
  }

  RunResult res;
  res.out_dir = config.out_dir;
  res.outputs = task.outputs;
  res.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  nlohmann::ordered_json m;
  m["tool"] = "succdec";
  m["version"] = kVersion;
  m["task"] = task_name(config.task);
  m["config_hash"] = "fnv1a64:" + hex64(fnv1a64(config.source_text));
  m["seed"] = config.mc.seed;
  m["threads"] = config.mc.threads;
  m["block_len"] = config.mc.block_len;
  m["blocks"] = config.mc.blocks;
  m["wall_seconds"] = res.wall_seconds;
  m["outputs"] = res.outputs;
  {
    std::ofstream os(fs::path(config.out_dir) / "manifest.json");
    os << m.dump(2) << '\n';
  }
  res.outputs.push_back("manifest.json");
  return res;
}

} // namespace succdec
