// gfs: genetic fuzzy regression experiments on the airfoil self-noise data.
//
//   gfs cluster  --data FILE [--min 2 --max 25] [--out DIR]
//   gfs train    (--config FILE | --preset NAME) [--data FILE] [--out DIR]
//   gfs compare  [--config FILE]... [--presets a,b,...] [--out DIR]
//   gfs predict  --model FILE --input CSV [--output CSV]
//   gfs describe (--model FILE | --config FILE | --preset NAME)
//   gfs config   --preset NAME
//
// Exit codes: 0 success, 1 usage error, 2 data error, 3 internal error.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <thread>

#include "gfs/architectures.hpp"
#include "gfs/config.hpp"
#include "gfs/error.hpp"
#include "gfs/harness.hpp"
#include "gfs/model_io.hpp"
#include "gfs/text.hpp"

namespace {

struct CommonFlags {
  std::optional<std::uint64_t> seed;
  std::string out;
  bool log_frequency = false;
  std::size_t threads = std::max(1u, std::thread::hardware_concurrency());
  std::string data;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--seed", f.seed, "Override every seed (split, FCM, GA)");
  cmd->add_option("--out", f.out, "Output directory");
  cmd->add_flag("--log-frequency", f.log_frequency, "Scale log10(frequency) instead of frequency");
  cmd->add_option("--threads", f.threads, "Worker threads for fitness evaluation")->check(CLI::PositiveNumber);
  cmd->add_option("--data", f.data, "Path to airfoil_self_noise.dat");
}

void apply_common(gfs::ExperimentConfig& c, const CommonFlags& f, bool per_experiment_out) {
  if (f.seed) c.set_all_seeds(*f.seed);
  if (f.log_frequency) c.log_frequency = true;
  if (!f.data.empty()) c.dataset_path = f.data;
  if (!f.out.empty()) c.output_dir = per_experiment_out ? std::filesystem::path(f.out) / c.name : std::filesystem::path(f.out);
}

gfs::ExperimentConfig resolve_config(const std::string& config_path, const std::string& preset) {
  if (!config_path.empty() && !preset.empty()) throw gfs::ConfigError("use either --config or --preset, not both");
  if (!config_path.empty()) return gfs::load_config(config_path);
  if (!preset.empty()) return gfs::preset_config(preset);
  throw gfs::ConfigError("one of --config or --preset is required");
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  for (auto part : gfs::split_char(s, ',')) {
    auto t = gfs::trim(part);
    if (!t.empty()) out.emplace_back(t);
  }
  return out;
}

void print_report(const gfs::ExperimentReport& r) {
  std::cout << "experiment: " << r.config.name << " (" << gfs::variant_name(r.config.variant) << ")\n"
            << "parameters: " << r.parameter_count << ", rules: " << r.rule_count << "\n"
            << "rmse train: " << gfs::format_fixed(r.rmse_train_db, 3) << " dB\n"
            << "rmse test:  " << gfs::format_fixed(r.rmse_test_db, 3) << " dB\n"
            << "mae test:   " << gfs::format_fixed(r.mae_test_db, 3) << " dB\n"
            << "test prediction spread: " << gfs::format_fixed(r.test_prediction_std_db, 3) << " dB\n"
            << "uncovered samples: " << r.uncovered_train << " train, " << r.uncovered_test << " test\n"
            << "training time: " << gfs::format_fixed(r.wall_clock_seconds, 2) << " s\n";
  if (!r.config.output_dir.empty()) std::cout << "outputs: " << r.config.output_dir.generic_string() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Genetic fuzzy regression experiments"};
  app.require_subcommand(1);

  CommonFlags common;

  auto* cluster = app.add_subcommand("cluster", "FCM elbow analysis over the dataset");
  add_common(cluster, common);
  std::size_t c_min = 2, c_max = 25, chosen = gfs::kDefaultClusters, restarts = 1;
  std::string space = "inputs+target";
  double fuzzifier = 2.0;
  cluster->add_option("--min", c_min, "Smallest cluster count");
  cluster->add_option("--max", c_max, "Largest cluster count");
  cluster->add_option("--chosen", chosen, "Cluster count recorded as the decision");
  cluster->add_option("--restarts", restarts, "Seeded FCM runs per cluster count (best kept)");
  cluster->add_option("--space", space, "inputs | inputs+target");
  cluster->add_option("--fuzzifier", fuzzifier, "FCM fuzzifier m");

  auto* train = app.add_subcommand("train", "Run one experiment");
  add_common(train, common);
  std::string config_path, preset;
  train->add_option("--config", config_path, "Experiment config file");
  train->add_option("--preset", preset, "Named preset");

  auto* cmp = app.add_subcommand("compare", "Run several experiments and tabulate them");
  add_common(cmp, common);
  std::vector<std::string> config_paths;
  std::string presets;
  cmp->add_option("--config", config_paths, "Experiment config files (repeatable)");
  cmp->add_option("--presets", presets, "Comma separated preset names (default: all)");

  auto* predict = app.add_subcommand("predict", "Predict a CSV with a saved model");
  std::string model_path, input_path, output_path;
  predict->add_option("--model", model_path, "Saved model.json")->required();
  predict->add_option("--input", input_path, "Canonical CSV input")->required();
  predict->add_option("--output", output_path, "Output CSV (default: stdout)");

  auto* describe = app.add_subcommand("describe", "Print model structure");
  describe->add_option("--model", model_path, "Saved model.json");
  describe->add_option("--config", config_path, "Experiment config file");
  describe->add_option("--preset", preset, "Named preset");

  auto* config_cmd = app.add_subcommand("config", "Print a preset as a config file");
  config_cmd->add_option("--preset", preset, "Named preset")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  try {
    if (*cluster) {
      gfs::ClusterReportOptions opt;
      opt.c_min = c_min;
      opt.c_max = c_max;
      opt.chosen_clusters = chosen;
      opt.restarts = restarts;
      opt.space = gfs::parse_cluster_space(space);
      opt.log_frequency = common.log_frequency;
      opt.fcm.fuzzifier = fuzzifier;
      if (common.seed) opt.fcm.seed = *common.seed;
      const std::string data = common.data.empty() ? std::string(gfs::kDefaultDatasetPath) : common.data;
      const std::string out = common.out.empty() ? "runs/cluster" : common.out;
      const auto report = gfs::cluster_report(data, opt, {common.threads}, out);
      std::cout << "c,J\n";
      for (const auto& p : report.curve.points) std::cout << p.clusters << ',' << gfs::format_double(p.objective) << '\n';
      std::cout << "knee suggestion: " << report.knee << "\nchosen clusters: " << report.chosen_clusters
                << "\noutputs: " << out << "\n";
    } else if (*train) {
      auto c = resolve_config(config_path, preset);
      apply_common(c, common, false);
      c.validate();
      gfs::RunOptions run{common.threads, &std::cerr};
      print_report(gfs::run_experiment(c, run));
    } else if (*cmp) {
      std::vector<gfs::ExperimentConfig> configs;
      for (const auto& p : config_paths) configs.push_back(gfs::load_config(p));
      auto names = presets.empty() && config_paths.empty() ? gfs::preset_names() : split_list(presets);
      for (const auto& n : names) configs.push_back(gfs::preset_config(n));
      for (auto& c : configs) {
        apply_common(c, common, true);
        c.validate();
      }
      gfs::RunOptions run{common.threads, &std::cerr};
      const std::string out = common.out.empty() ? "runs" : common.out;
      const auto table = gfs::compare(configs, run, out);
      std::cout << table.render_text();
    } else if (*predict) {
      const auto model = gfs::load_model(model_path);
      std::ifstream in(input_path);
      if (!in) throw gfs::DataError("cannot open input CSV '" + input_path + "'");
      std::size_t rows = 0;
      if (output_path.empty()) {
        rows = gfs::predict_csv(model, in, std::cout, input_path);
      } else {
        std::ofstream out(output_path);
        if (!out) throw gfs::DataError("cannot write '" + output_path + "'");
        rows = gfs::predict_csv(model, in, out, input_path);
      }
      std::cerr << "predicted " << rows << " rows\n";
    } else if (*describe) {
      if (!model_path.empty()) {
        const auto model = gfs::load_model(model_path);
        std::cout << "model: " << model.name << "\n" << model.regressor->describe();
      } else {
        const auto c = resolve_config(config_path, preset);
        std::cout << "experiment: " << c.name << "\n"
                  << "variant: " << gfs::variant_name(c.variant) << "\n"
                  << "parameters: " << gfs::param_count(c.architecture()) << "\n";
        const auto arch = c.architecture();
        switch (c.variant) {
          case gfs::Variant::Brute:
            std::cout << "rules: " << gfs::GridEncoding{arch.inputs, arch.mfs, arch.order}.rule_count() << "\n";
            break;
          case gfs::Variant::Gft:
            std::cout << "stages: " << arch.inputs - 1 << ", rules: " << (arch.inputs - 1) * arch.mfs * arch.mfs << "\n";
            break;
          default:
            std::cout << "clusters (rules): " << arch.clusters << "\n";
        }
      }
    } else if (*config_cmd) {
      std::cout << gfs::write_config(gfs::preset_config(preset));
    }
  } catch (const gfs::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const gfs::DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
