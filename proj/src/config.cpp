#include "succdec/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "succdec/interleaver.hpp"

namespace succdec {

namespace pt = boost::property_tree;
namespace fs = std::filesystem;

namespace {

const std::map<std::string, Task> kTasks{
    {"mu-curve", Task::mu_curve}, {"rates", Task::rates},       {"optimize-weights", Task::optimize_weights},
    {"exit", Task::exit},         {"exponent", Task::exponent}, {"plan", Task::plan},
    {"bound-check", Task::bound_check}};

const std::map<std::string, std::set<std::string>> kKeys{
    {"channel", {"alpha", "levels", "es_n0_db", "model"}},
    {"interleaver", {"family", "K", "reps", "weights"}},
    {"mc", {"block_len", "blocks", "burn_in_cap", "seed", "threads"}},
    {"task",
     {"name", "grid_points", "refine", "mu_curve", "decoder_family", "d_t", "starts", "exit_grid", "prior",
      "with_capacity", "candidates", "lengths", "p_bar_e"}},
    {"output", {"dir"}}};

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <class T>
bool parse_number(const std::string &raw, T &out) {
  const std::string s = trim(raw);
  if (s.empty()) return false;
  const char *first = s.data();
  if (*first == '+') ++first;
  const auto [p, ec] = std::from_chars(first, s.data() + s.size(), out);
  return ec == std::errc() && p == s.data() + s.size();
}

class Reader {
public:
  Reader(const pt::ptree &tree, std::vector<Diagnostic> &diag) : tree_(tree), diag_(diag) {}

  std::optional<std::string> raw(const std::string &field) const {
    if (auto v = tree_.get_optional<std::string>(pt::ptree::path_type(field, '.'))) return trim(*v);
    return std::nullopt;
  }

  template <class T>
  void number(const std::string &field, T &out) const {
    const auto v = raw(field);
    if (!v) return;
    if (!parse_number(*v, out)) diag_.push_back({field, "not a valid number: '" + *v + "'"});
  }

  template <class T>
  void list(const std::string &field, std::vector<T> &out) const {
    const auto v = raw(field);
    if (!v) return;
    std::string text = *v;
    for (char &c : text)
      if (c == ',') c = ' ';
    std::istringstream is(text);
    std::vector<T> vals;
    std::string tok;
    while (is >> tok) {
      T x{};
      if (!parse_number(tok, x)) {
        diag_.push_back({field, "not a valid number: '" + tok + "'"});
        return;
      }
      vals.push_back(x);
    }
    if (vals.empty()) {
      diag_.push_back({field, "empty list"});
      return;
    }
    out = std::move(vals);
  }

  void text(const std::string &field, std::string &out) const {
    if (auto v = raw(field)) out = *v;
  }

  void boolean(const std::string &field, bool &out) const {
    const auto v = raw(field);
    if (!v) return;
    if (*v == "true" || *v == "1" || *v == "yes")
      out = true;
    else if (*v == "false" || *v == "0" || *v == "no")
      out = false;
    else
      diag_.push_back({field, "expected true or false, got '" + *v + "'"});
  }

private:
  const pt::ptree &tree_;
  std::vector<Diagnostic> &diag_;
};

} // namespace

std::string task_name(Task t) {
  for (const auto &[name, task] : kTasks)
    if (task == t) return name;
  return "?";
}

std::optional<Task> parse_task(const std::string &s) {
  const auto it = kTasks.find(s);
  if (it == kTasks.end()) return std::nullopt;
  return it->second;
}

std::string ExperimentConfig::resolve(const std::string &path) const {
  if (path.empty()) return path;
  const fs::path p(path);
  if (p.is_absolute()) return path;
  return (fs::path(base_dir.empty() ? "." : base_dir) / p).lexically_normal().string();
}

ParsedConfig parse_config_text(const std::string &text, const std::string &base_dir) {
  ParsedConfig out;
  auto &c = out.config;
  auto &diag = out.diagnostics;
  c.source_text = text;
  c.base_dir = base_dir;

  pt::ptree tree;
  try {
    std::istringstream is(text);
    pt::read_ini(is, tree);
  } catch (const pt::ini_parser_error &e) {
    diag.push_back({"config", "line " + std::to_string(e.line()) + ": " + e.message()});
    return out;
  }

  for (const auto &[section, body] : tree) {
    const auto it = kKeys.find(section);
    if (it == kKeys.end()) {
      diag.push_back({section, body.empty() ? "key outside any section" : "unknown section"});
      continue;
    }
    for (const auto &kv : body)
      if (!it->second.count(kv.first)) diag.push_back({section + "." + kv.first, "unknown key"});
  }

  Reader r(tree, diag);
  r.number("channel.alpha", c.alpha);
  r.number("channel.levels", c.quant_levels);
  r.number("channel.es_n0_db", c.es_n0_db);
  r.text("channel.model", c.model_path);

  r.text("interleaver.family", c.family);
  r.number("interleaver.K", c.levels);
  r.number("interleaver.reps", c.reps);
  if (auto w = r.raw("interleaver.weights")) {
    if (*w == "optimize")
      c.optimize = true;
    else
      r.list("interleaver.weights", c.weights);
  }

  r.number("mc.block_len", c.mc.block_len);
  r.number("mc.blocks", c.mc.blocks);
  r.number("mc.burn_in_cap", c.mc.burn_in_cap);
  if (r.raw("mc.seed"))
    r.number("mc.seed", c.mc.seed);
  else
    diag.push_back({"mc.seed", "missing; a seed is mandatory"});
  r.number("mc.threads", c.mc.threads);

  if (auto name = r.raw("task.name")) {
    if (auto t = parse_task(*name))
      c.task = *t;
    else
      diag.push_back({"task.name", "unknown task '" + *name + "'"});
  } else {
    diag.push_back({"task.name", "missing"});
  }
  r.number("task.grid_points", c.grid_points);
  r.number("task.refine", c.refine);
  r.text("task.mu_curve", c.mu_curve);
  r.text("task.decoder_family", c.decoder_family);
  r.number("task.d_t", c.d_t);
  r.number("task.starts", c.starts);
  r.number("task.exit_grid", c.exit_grid);
  r.text("task.prior", c.prior);
  r.boolean("task.with_capacity", c.with_capacity);
  r.list("task.candidates", c.candidates);
  r.list("task.lengths", c.lengths);
  r.number("task.p_bar_e", c.p_bar_e);

  r.text("output.dir", c.out_dir);
  return out;
}

ParsedConfig load_config(const std::string &path) {
  std::ifstream in(path);
  if (!in) {
    ParsedConfig out;
    out.diagnostics.push_back({"config", "cannot open " + path});
    return out;
  }
  std::stringstream ss;
  ss << in.rdbuf();
  auto base = fs::path(path).parent_path().string();
  return parse_config_text(ss.str(), base.empty() ? "." : base);
}

std::vector<Diagnostic> validate(const ExperimentConfig &c) {
  std::vector<Diagnostic> d;
  auto need_file = [&](const std::string &field, const std::string &path) {
    if (!path.empty() && !fs::exists(c.resolve(path))) d.push_back({field, "file not found: " + c.resolve(path)});
  };

  if (c.model_path.empty()) {
    if (!(c.alpha > 0 && c.alpha < 1)) d.push_back({"channel.alpha", "must lie in (0, 1)"});
    if (c.quant_levels < 1 || c.quant_levels > 64) d.push_back({"channel.levels", "must lie in 1..64"});
  }
  need_file("channel.model", c.model_path);
  if (!std::isfinite(c.es_n0_db)) d.push_back({"channel.es_n0_db", "must be finite"});

  if (c.family != "rectangular" && c.family != "binary" && c.family != "random")
    d.push_back({"interleaver.family", "expected rectangular, binary or random, got '" + c.family + "'"});
  if (c.levels < 1 || c.levels > 64) d.push_back({"interleaver.K", "must lie in 1..64"});
  if (c.family == "binary" && c.levels < 2) d.push_back({"interleaver.K", "binary family needs K >= 2"});
  if (c.family == "binary" && c.levels > 20) d.push_back({"interleaver.K", "binary family supports K <= 20"});
  if (c.reps < 0) d.push_back({"interleaver.reps", "must be >= 1"});
  if (c.family == "random" && !c.optimize) {
    if (c.weights.empty()) {
      d.push_back({"interleaver.weights", "random family needs weights or 'optimize'"});
    } else {
      if (static_cast<int>(c.weights.size()) != c.levels)
        d.push_back({"interleaver.weights", "has " + std::to_string(c.weights.size()) + " entries, K = " +
                                                std::to_string(c.levels)});
      double sum = 0;
      bool neg = false;
      for (double w : c.weights) {
        sum += w;
        neg = neg || !(w >= 0);
      }
      if (neg) d.push_back({"interleaver.weights", "entries must be non-negative"});
      if (std::abs(sum - 1.0) > 1e-12) {
        std::ostringstream os;
        os.precision(17);
        os << "weights sum to " << sum << ", expected 1";
        d.push_back({"interleaver.weights", os.str()});
      }
    }
  }

  if (c.mc.block_len < 10) d.push_back({"mc.block_len", "must be >= 10"});
  if (c.mc.blocks < 2) d.push_back({"mc.blocks", "need at least 2 blocks for standard errors"});
  if (2 * c.mc.burn_in_cap >= c.mc.block_len)
    d.push_back({"mc.burn_in_cap", "twice the burn-in must be shorter than mc.block_len"});

  if (c.grid_points < 4) d.push_back({"task.grid_points", "need at least 4 points"});
  need_file("task.mu_curve", c.mu_curve);
  if (c.decoder_family != "synthetic") need_file("task.decoder_family", c.decoder_family);
  if (!(c.d_t >= 0)) d.push_back({"task.d_t", "must be >= 0"});
  if (c.exit_grid < 2) d.push_back({"task.exit_grid", "need at least 2 points"});
  if (c.prior != "gaussian" && c.prior != "erasure")
    d.push_back({"task.prior", "expected gaussian or erasure, got '" + c.prior + "'"});
  for (int k : c.candidates)
    if (k < 1 || k > 64) d.push_back({"task.candidates", "level counts must lie in 1..64"});
  for (std::size_t n : c.lengths)
    if (n < 1) d.push_back({"task.lengths", "lengths must be positive"});
  if (!(c.p_bar_e > 0 && c.p_bar_e < 1)) d.push_back({"task.p_bar_e", "must lie in (0, 1)"});
  if (c.task == Task::plan && c.family == "binary")
    d.push_back({"interleaver.family", "plan supports rectangular or random"});
  if (c.task == Task::bound_check && c.family != "rectangular")
    d.push_back({"interleaver.family", "bound-check uses rectangular interleavers"});

  if (c.out_dir.empty()) d.push_back({"output.dir", "missing"});
  return d;
}

std::string format_diagnostic(const Diagnostic &d) { return d.field + ": " + d.message; }

std::uint64_t fnv1a64(const std::string &data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : data) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

StateModel build_channel(const ExperimentConfig &c) {
  if (!c.model_path.empty()) {
    auto m = StateModel::load(c.resolve(c.model_path));
    return m.with_noise(db_to_n0(c.es_n0_db));
  }
  return build_fsmc(c.alpha, lloyd_max(c.quant_levels, 0.5), c.es_n0_db);
}

} // namespace succdec
