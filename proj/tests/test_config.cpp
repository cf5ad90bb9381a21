#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "succdec/config.hpp"
#include "succdec/runner.hpp"

using namespace succdec;
namespace fs = std::filesystem;

namespace {

const std::string kSmall = std::string(SUCCDEC_SOURCE_DIR) + "/data/small_channel.txt";

std::string base_config(const std::string &extra_mc = "seed = 5\n") {
  return "[channel]\nmodel = " + kSmall +
         "\nes_n0_db = 3\n\n[interleaver]\nfamily = rectangular\nK = 2\n\n[mc]\nblock_len = 2000\nblocks = 3\n"
         "burn_in_cap = 100\n" +
         extra_mc + "\n[task]\nname = rates\n\n[output]\ndir = unused\n";
}

bool has_field(const std::vector<Diagnostic> &d, const std::string &field, const std::string &text = "") {
  for (const auto &x : d)
    if (x.field == field && x.message.find(text) != std::string::npos) return true;
  return false;
}

std::vector<Diagnostic> all_diagnostics(const ParsedConfig &p) {
  auto d = p.diagnostics;
  if (p.ok()) d = validate(p.config);
  return d;
}

std::string slurp(const fs::path &p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string &name) {
  const auto p = fs::temp_directory_path() / ("succdec_test_" + name);
  fs::remove_all(p);
  return p;
}

} // namespace

TEST_CASE("missing seed is named") {
  const auto p = parse_config_text(base_config(""));
  CHECK(has_field(p.diagnostics, "mc.seed"));
}

TEST_CASE("weights that do not sum to one report the sum") {
  auto text = base_config();
  text.replace(text.find("family = rectangular\nK = 2"), 26, "family = random\nK = 3\nweights = 0.2 0.3 0.4");
  const auto d = all_diagnostics(parse_config_text(text));
  CHECK(has_field(d, "interleaver.weights", "0.9"));
}

TEST_CASE("unknown keys, bad numbers and missing files") {
  auto p = parse_config_text(base_config() + "[extra]\nx = 1\n");
  CHECK(has_field(p.diagnostics, "extra"));
  p = parse_config_text(base_config("seed = 5\nblokcs = 4\n"));
  CHECK(has_field(p.diagnostics, "mc.blokcs", "unknown key"));
  p = parse_config_text(base_config("seed = five\n"));
  CHECK(has_field(p.diagnostics, "mc.seed", "five"));
  auto t = base_config();
  t.replace(t.find(kSmall), kSmall.size(), "/nonexistent/model.txt");
  CHECK(has_field(all_diagnostics(parse_config_text(t)), "channel.model", "not found"));
  t = base_config();
  t.replace(t.find("name = rates"), 12, "name = nothing");
  CHECK(has_field(parse_config_text(t).diagnostics, "task.name", "nothing"));
}

TEST_CASE("shipped example configs are clean") {
  int n = 0;
  for (const auto &e : fs::directory_iterator(std::string(SUCCDEC_SOURCE_DIR) + "/configs")) {
    if (e.path().extension() != ".ini") continue;
    ++n;
    const auto p = load_config(e.path().string());
    CAPTURE(e.path().string());
    CHECK(all_diagnostics(p).empty());
  }
  CHECK(n >= 7);
}

TEST_CASE("runs are reproducible and stay in their output directory") {
  auto p = parse_config_text(base_config());
  REQUIRE(p.ok());
  auto c = p.config;
  const auto a = scratch("a"), b = scratch("b");
  c.out_dir = a.string();
  c.mc.threads = 1;
  const auto ra = run(c);
  c.out_dir = b.string();
  c.mc.threads = 3;
  run(c);
  CHECK(ra.outputs == std::vector<std::string>{"rates.csv", "manifest.json"});
  CHECK(slurp(a / "rates.csv") == slurp(b / "rates.csv"));
  std::size_t files = 0;
  for (const auto &e : fs::directory_iterator(a)) {
    (void)e;
    ++files;
  }
  CHECK(files == 2);

  const auto m = nlohmann::json::parse(slurp(a / "manifest.json"));
  CHECK(m["seed"] == 5);
  CHECK(m["task"] == "rates");
  CHECK(m["version"] == kVersion);
  CHECK(m["config_hash"].get<std::string>().rfind("fnv1a64:", 0) == 0);
  CHECK(m["wall_seconds"].get<double>() >= 0);
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST_CASE("FNV-1a reference values") {
  CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
}

TEST_CASE("command line exit codes") {
  const std::string cli = SUCCDEC_CLI;
  const auto dir = scratch("cli");
  fs::create_directories(dir);
  {
    std::ofstream(dir / "bad.ini") << base_config("");
    std::ofstream(dir / "good.ini") << base_config();
  }
  auto rc = [](const std::string &cmd) { return std::system((cmd + " >/dev/null 2>&1").c_str()); };
  CHECK(rc(cli + " validate --config " + (dir / "good.ini").string()) == 0);
  CHECK(rc(cli + " validate --config " + (dir / "bad.ini").string()) != 0);
  CHECK(rc(cli + " run -q --config " + (dir / "bad.ini").string() + " --out " + (dir / "o1").string()) != 0);
  CHECK(rc(cli + " run -q --config " + (dir / "bad.ini").string() + " --seed 3 --out " + (dir / "o2").string()) == 0);
  CHECK(fs::exists(dir / "o2" / "rates.csv"));
  CHECK(fs::exists(dir / "o2" / "manifest.json"));
  CHECK(rc(cli + " frobnicate") != 0);
  fs::remove_all(dir);
}
