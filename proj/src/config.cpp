#include "gfs/config.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include "gfs/error.hpp"
#include "gfs/text.hpp"

namespace gfs {

std::string_view cluster_space_name(ClusterSpace s) {
  return s == ClusterSpace::Inputs ? "inputs" : "inputs+target";
}

ClusterSpace parse_cluster_space(std::string_view name) {
  if (name == "inputs") return ClusterSpace::Inputs;
  if (name == "inputs+target") return ClusterSpace::InputsAndTarget;
  throw ConfigError("cluster_space must be 'inputs' or 'inputs+target', got '" + std::string(name) + "'");
}

ArchitectureConfig ExperimentConfig::architecture() const {
  return {variant, kInputCount, mfs, order, clusters};
}

void ExperimentConfig::validate() const {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) throw ConfigError("split.train_fraction must lie in (0, 1)");
  if ((variant == Variant::Brute || variant == Variant::Gft) && (mfs < 2 || mfs > 16)) {
    throw ConfigError("model.mfs must lie in [2, 16]");
  }
  if ((variant == Variant::ClusteredGauss || variant == Variant::ClusteredFcm) && clusters < 2) {
    throw ConfigError("model.clusters must be at least 2");
  }
  if (!(fuzzifier > 1.0)) throw ConfigError("model.fuzzifier must exceed 1");
  if (input_order.size() != kInputCount) throw ConfigError("model.input_order must list 5 inputs");
  std::vector<bool> seen(kInputCount, false);
  for (std::size_t v : input_order) {
    if (v >= kInputCount || seen[v]) throw ConfigError("model.input_order must be a permutation of 0..4");
    seen[v] = true;
  }
  if (!(fcm_tol > 0.0)) throw ConfigError("fcm.tol must be positive");
  if (fcm_max_iter == 0) throw ConfigError("fcm.max_iter must be positive");
  try {
    ga.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

void ExperimentConfig::set_all_seeds(std::uint64_t seed) {
  split_seed = seed;
  fcm_seed = seed;
  ga.seed = seed;
}

namespace {

std::string quote(std::string_view s) {
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"' || ch == '\\') out += '\\';
    out += ch;
  }
  return out + "\"";
}

std::string bool_text(bool b) { return b ? "true" : "false"; }

}  // namespace

std::string write_config(const ExperimentConfig& c) {
  std::ostringstream os;
  os << "# gfs experiment configuration\n"
     << "name = " << quote(c.name) << "\n\n"
     << "[dataset]\n"
     << "path = " << quote(c.dataset_path.generic_string()) << "\n"
     << "log_frequency = " << bool_text(c.log_frequency) << "\n\n"
     << "[split]\n"
     << "train_fraction = " << format_double(c.train_fraction) << "\n"
     << "seed = " << c.split_seed << "\n\n"
     << "[model]\n"
     << "variant = " << quote(variant_name(c.variant)) << "\n"
     << "mfs = " << c.mfs << "\n"
     << "order = " << static_cast<int>(c.order) << "\n"
     << "clusters = " << c.clusters << "\n"
     << "fuzzifier = " << format_double(c.fuzzifier) << "\n"
     << "cluster_space = " << quote(cluster_space_name(c.cluster_space)) << "\n"
     << "input_order = [";
  for (std::size_t i = 0; i < c.input_order.size(); ++i) os << (i ? ", " : "") << c.input_order[i];
  os << "]\n\n"
     << "[fcm]\n"
     << "tol = " << format_double(c.fcm_tol) << "\n"
     << "max_iter = " << c.fcm_max_iter << "\n"
     << "seed = " << c.fcm_seed << "\n\n"
     << "[ga]\n"
     << "population_size = " << c.ga.population_size << "\n"
     << "generations = " << c.ga.generations << "\n"
     << "crossover_rate = " << format_double(c.ga.crossover_rate) << "\n"
     << "mutation_rate = " << (c.ga.mutation_rate ? format_double(*c.ga.mutation_rate) : quote("auto")) << "\n"
     << "mutation_sigma = " << format_double(c.ga.mutation_sigma) << "\n"
     << "tournament_size = " << c.ga.tournament_size << "\n"
     << "elite_count = " << c.ga.elite_count << "\n"
     << "seed = " << c.ga.seed << "\n\n"
     << "[output]\n"
     << "dir = " << quote(c.output_dir.generic_string()) << "\n";
  return os.str();
}

namespace {

struct RawValue {
  std::string text;
  std::size_t line = 0;
};

constexpr std::array<std::string_view, 6> kSections = {"dataset", "split", "model", "fcm", "ga", "output"};

class ConfigReader {
 public:
  ConfigReader(std::string_view text, std::string_view source) : source_(source) {
    std::string section;
    std::size_t line_no = 0;
    std::istringstream in{std::string(text)};
    std::string line;
    while (std::getline(in, line)) {
      ++line_no;
      std::string_view body = trim(strip_comment(line));
      if (body.empty()) continue;
      if (body.front() == '[') {
        if (body.back() != ']') fail(line_no, "unterminated section header");
        section = std::string(trim(body.substr(1, body.size() - 2)));
        if (std::find(kSections.begin(), kSections.end(), section) == kSections.end()) {
          fail(line_no, "unknown section [" + section + "]");
        }
        continue;
      }
      const auto eq = body.find('=');
      if (eq == std::string_view::npos) fail(line_no, "expected 'key = value'");
      const std::string key = (section.empty() ? "" : section + ".") + std::string(trim(body.substr(0, eq)));
      if (values_.count(key)) fail(line_no, "duplicate key '" + key + "'");
      values_[key] = {std::string(trim(body.substr(eq + 1))), line_no};
    }
  }

  [[noreturn]] void fail(std::size_t line, const std::string& msg) const {
    throw ConfigError(std::string(source_) + ":" + std::to_string(line) + ": " + msg);
  }

  void get(const std::string& key, std::string& out) {
    if (auto* v = take(key)) out = unquote(*v);
  }
  void get(const std::string& key, std::filesystem::path& out) {
    if (auto* v = take(key)) out = unquote(*v);
  }
  void get(const std::string& key, bool& out) {
    if (auto* v = take(key)) {
      if (v->text == "true") out = true;
      else if (v->text == "false") out = false;
      else fail(v->line, key + ": expected true or false");
    }
  }
  void get(const std::string& key, double& out) {
    if (auto* v = take(key)) {
      if (!parse_double(v->text, out)) fail(v->line, key + ": expected a number");
    }
  }
  template <typename Int>
  void get_int(const std::string& key, Int& out) {
    if (auto* v = take(key)) out = parse_int<Int>(*v, key);
  }
  void get(const std::string& key, std::vector<std::size_t>& out) {
    auto* v = take(key);
    if (!v) return;
    std::string_view t = v->text;
    if (t.size() < 2 || t.front() != '[' || t.back() != ']') fail(v->line, key + ": expected an array");
    out.clear();
    t = trim(t.substr(1, t.size() - 2));
    if (t.empty()) return;
    for (auto item : split_char(t, ',')) out.push_back(parse_int<std::size_t>({std::string(trim(item)), v->line}, key));
  }
  // Raw access for keys with non-uniform types.
  RawValue* take(const std::string& key) {
    auto it = values_.find(key);
    if (it == values_.end()) return nullptr;
    consumed_.push_back(key);
    return &it->second;
  }
  std::string unquote(const RawValue& v) const {
    const std::string& t = v.text;
    if (t.size() < 2 || t.front() != '"' || t.back() != '"') fail(v.line, "expected a double-quoted string");
    std::string out;
    for (std::size_t i = 1; i + 1 < t.size(); ++i) {
      if (t[i] == '\\' && i + 2 < t.size()) ++i;
      out += t[i];
    }
    return out;
  }

  void reject_unknown() const {
    for (const auto& [key, v] : values_) {
      if (std::find(consumed_.begin(), consumed_.end(), key) == consumed_.end()) fail(v.line, "unknown key '" + key + "'");
    }
  }

 private:
  static std::string_view strip_comment(std::string_view line) {
    bool in_string = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
      if (line[i] == '"' && (i == 0 || line[i - 1] != '\\')) in_string = !in_string;
      if (line[i] == '#' && !in_string) return line.substr(0, i);
    }
    return line;
  }

  template <typename Int>
  Int parse_int(const RawValue& v, const std::string& key) const {
    Int out{};
    const auto* first = v.text.data();
    const auto* last = first + v.text.size();
    auto [ptr, ec] = std::from_chars(first, last, out);
    if (ec != std::errc{} || ptr != last) fail(v.line, key + ": expected a non-negative integer");
    return out;
  }

  std::string source_;
  std::map<std::string, RawValue> values_;
  std::vector<std::string> consumed_;
};

}  // namespace

ExperimentConfig parse_config(std::string_view text, std::string_view source) {
  ConfigReader r(text, source);
  ExperimentConfig c;
  r.get("name", c.name);
  r.get("dataset.path", c.dataset_path);
  r.get("dataset.log_frequency", c.log_frequency);
  r.get("split.train_fraction", c.train_fraction);
  r.get_int("split.seed", c.split_seed);
  if (auto* v = r.take("model.variant")) {
    try {
      c.variant = parse_variant(r.unquote(*v));
    } catch (const std::invalid_argument& e) {
      r.fail(v->line, e.what());
    }
  }
  r.get_int("model.mfs", c.mfs);
  if (auto* v = r.take("model.order")) {
    if (v->text == "0") c.order = TskOrder::Zero;
    else if (v->text == "1") c.order = TskOrder::One;
    else r.fail(v->line, "model.order must be 0 or 1");
  }
  r.get_int("model.clusters", c.clusters);
  r.get("model.fuzzifier", c.fuzzifier);
  if (auto* v = r.take("model.cluster_space")) {
    try {
      c.cluster_space = parse_cluster_space(r.unquote(*v));
    } catch (const ConfigError& e) {
      r.fail(v->line, e.what());
    }
  }
  r.get("model.input_order", c.input_order);
  r.get("fcm.tol", c.fcm_tol);
  r.get_int("fcm.max_iter", c.fcm_max_iter);
  r.get_int("fcm.seed", c.fcm_seed);
  r.get_int("ga.population_size", c.ga.population_size);
  r.get_int("ga.generations", c.ga.generations);
  r.get("ga.crossover_rate", c.ga.crossover_rate);
  if (auto* v = r.take("ga.mutation_rate")) {
    double rate = 0;
    if (v->text == "\"auto\"") c.ga.mutation_rate.reset();
    else if (parse_double(v->text, rate)) c.ga.mutation_rate = rate;
    else r.fail(v->line, "ga.mutation_rate must be a number or \"auto\"");
  }
  r.get("ga.mutation_sigma", c.ga.mutation_sigma);
  r.get_int("ga.tournament_size", c.ga.tournament_size);
  r.get_int("ga.elite_count", c.ga.elite_count);
  r.get_int("ga.seed", c.ga.seed);
  r.get("output.dir", c.output_dir);
  r.reject_unknown();
  try {
    c.validate();
  } catch (const ConfigError& e) {
    throw ConfigError(std::string(source) + ": " + e.what());
  }
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str(), path.string());
}

std::vector<std::string> preset_names() {
  return {"brute-5mf-o1", "gft-3mf-o0", "gft-5mf-o0", "gft-3mf-o1", "gft-5mf-o1", "clustered-gauss-15",
          "clustered-fcm-15"};
}

ExperimentConfig preset_config(std::string_view name) {
  ExperimentConfig c;
  c.name = std::string(name);
  c.output_dir = std::filesystem::path("runs") / c.name;
  c.ga.population_size = 50;
  c.ga.generations = 100;
  if (name == "brute-5mf-o1") {
    c.variant = Variant::Brute;
    c.mfs = 5;
    c.order = TskOrder::One;
  } else if (name == "gft-3mf-o0" || name == "gft-5mf-o0" || name == "gft-3mf-o1" || name == "gft-5mf-o1") {
    c.variant = Variant::Gft;
    c.mfs = name[4] == '3' ? 3 : 5;
    c.order = name.back() == '0' ? TskOrder::Zero : TskOrder::One;
  } else if (name == "clustered-gauss-15") {
    c.variant = Variant::ClusteredGauss;
    c.clusters = 15;
  } else if (name == "clustered-fcm-15") {
    c.variant = Variant::ClusteredFcm;
    c.clusters = 15;
  } else {
    throw ConfigError("unknown preset '" + std::string(name) + "'");
  }
  return c;
}

}  // namespace gfs
