#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "succdec/config.hpp"
#include "succdec/runner.hpp"

namespace {

int print_diagnostics(const std::vector<succdec::Diagnostic> &diag) {
  for (const auto &d : diag) std::cerr << "error: " << succdec::format_diagnostic(d) << '\n';
  return diag.empty() ? 0 : 2;
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"succdec: successive decoding over finite-state Markov fading channels"};
  app.require_subcommand(1);
  app.set_version_flag("--version", succdec::kVersion);

  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> threads;
  bool quiet = false;

  auto *validate = app.add_subcommand("validate", "parse and check a config without running it");
  validate->add_option("--config", config_path, "INI config file")->required()->check(CLI::ExistingFile);

  auto *run = app.add_subcommand("run", "run the task named in a config");
  run->add_option("--config", config_path, "INI config file")->required()->check(CLI::ExistingFile);
  run->add_option("--out", out_dir, "output directory (overrides output.dir)");
  run->add_option("--seed", seed, "seed (overrides mc.seed)");
  run->add_option("--threads", threads, "worker threads, 0 for all cores (overrides mc.threads)");
  run->add_flag("-q,--quiet", quiet, "no progress lines");

  CLI11_PARSE(app, argc, argv);

  auto parsed = succdec::load_config(config_path);
  auto &cfg = parsed.config;
  if (run->parsed()) {
    // --seed also satisfies a missing mc.seed
    if (seed) {
      std::erase_if(parsed.diagnostics, [](const auto &d) { return d.field == "mc.seed"; });
      cfg.mc.seed = *seed;
    }
    if (!out_dir.empty()) cfg.out_dir = out_dir;
    if (threads) cfg.mc.threads = *threads;
  }
  if (!parsed.ok()) return print_diagnostics(parsed.diagnostics);
  if (const int rc = print_diagnostics(succdec::validate(cfg))) return rc;

  if (validate->parsed()) {
    std::cout << config_path << ": ok (task " << succdec::task_name(cfg.task) << ")\n";
    return 0;
  }

  try {
    const auto res = succdec::run(cfg, quiet ? nullptr : &std::cerr);
    std::cout << "task " << succdec::task_name(cfg.task) << " finished in " << res.wall_seconds << " s\n";
    for (const auto &f : res.outputs) std::cout << "  " << res.out_dir << '/' << f << '\n';
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
