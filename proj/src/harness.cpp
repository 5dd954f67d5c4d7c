#include "gfs/harness.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "gfs/error.hpp"
#include "gfs/text.hpp"

namespace gfs {
namespace {

// Prefixes the failing pipeline stage while keeping the error category.
template <typename Fn>
auto stage(std::string_view name, Fn&& fn) -> decltype(fn()) {
  const std::string prefix = std::string(name) + ": ";
  try {
    return fn();
  } catch (const FormatError& e) {
    throw FormatError(prefix + e.what());
  } catch (const DataError& e) {
    throw DataError(prefix + e.what());
  } catch (const ConfigError& e) {
    throw ConfigError(prefix + e.what());
  } catch (const std::exception& e) {
    throw std::runtime_error(prefix + e.what());
  }
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw DataError("failed writing '" + path.string() + "'");
}

std::string predictions_csv(std::span<const double> actual, std::span<const double> predicted) {
  std::ostringstream os;
  os << "index,actual_dB,predicted_dB\n";
  for (std::size_t i = 0; i < actual.size(); ++i) {
    os << i << ',' << format_double(actual[i]) << ',' << format_double(predicted[i]) << '\n';
  }
  return os.str();
}

std::string gnuplot_script(const std::string& name) {
  std::ostringstream os;
  os << "# gnuplot -p plot.gp\n"
     << "set datafile separator ','\n"
     << "set key autotitle columnhead\n"
     << "set multiplot layout 1,3 title '" << name << "'\n"
     << "set title 'training set'\n"
     << "plot 'predictions_train.csv' using 1:2 with points pt 7 ps 0.3 lc rgb 'blue' title 'actual', \\\n"
     << "     '' using 1:3 with points pt 7 ps 0.3 lc rgb 'red' title 'predicted'\n"
     << "set title 'testing set'\n"
     << "plot 'predictions_test.csv' using 1:2 with points pt 7 ps 0.3 lc rgb 'blue' title 'actual', \\\n"
     << "     '' using 1:3 with points pt 7 ps 0.3 lc rgb 'red' title 'predicted'\n"
     << "set title 'fitness evolution'\n"
     << "plot 'fitness.csv' using 1:2 with lines title 'best', '' using 1:3 with lines title 'mean'\n"
     << "unset multiplot\n";
  return os.str();
}

struct Metrics {
  double rmse_db = 0, mae_db = 0, rmse_scaled = 0, std_db = 0;
  std::size_t uncovered = 0;
};

Metrics score(const Regressor& regressor, std::span<const double> genes, const Dataset& data, const Scaler& scaler,
              std::vector<double>& actual_db, std::vector<double>& predicted_db) {
  const Matrix x = scaled_inputs(data, scaler);
  std::vector<Prediction> pred(data.size());
  regressor.bind(x)->predict(genes, pred);
  Metrics m;
  actual_db.resize(data.size());
  predicted_db.resize(data.size());
  double sse = 0, sae = 0, sse_scaled = 0, sum = 0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    actual_db[i] = data[i].noise;
    predicted_db[i] = scaler.invert_target(pred[i].value);
    const double e = predicted_db[i] - actual_db[i];
    const double e_scaled = pred[i].value - scaler.scale_target(actual_db[i]);
    sse += e * e;
    sae += std::abs(e);
    sse_scaled += e_scaled * e_scaled;
    sum += predicted_db[i];
    m.uncovered += !pred[i].covered;
  }
  const auto n = static_cast<double>(data.size());
  m.rmse_db = std::sqrt(sse / n);
  m.mae_db = sae / n;
  m.rmse_scaled = std::sqrt(sse_scaled / n);
  const double mean = sum / n;
  double var = 0;
  for (double p : predicted_db) var += (p - mean) * (p - mean);
  m.std_db = std::sqrt(var / n);
  return m;
}

}  // namespace

Matrix clustering_points(const Dataset& data, const Scaler& scaler, ClusterSpace space) {
  const Matrix x = scaled_inputs(data, scaler);
  if (space == ClusterSpace::Inputs) return x;
  Matrix p(x.rows(), x.cols() + 1);
  p.leftCols(x.cols()) = x;
  for (std::size_t i = 0; i < data.size(); ++i) {
    p(static_cast<Eigen::Index>(i), x.cols()) = scaler.scale_target(data[i].noise);
  }
  return p;
}

nlohmann::json ExperimentReport::to_json() const {
  nlohmann::json history = nlohmann::json::array();
  for (const auto& s : fitness_history) {
    history.push_back({{"generation", s.generation}, {"best", s.best}, {"mean", s.mean}, {"worst", s.worst}});
  }
  return {{"name", config.name},
          {"variant", variant_name(config.variant)},
          {"parameter_count", parameter_count},
          {"rule_count", rule_count},
          {"train_rows", train_rows},
          {"test_rows", test_rows},
          {"rmse_train_dB", rmse_train_db},
          {"rmse_test_dB", rmse_test_db},
          {"mae_test_dB", mae_test_db},
          {"rmse_train_scaled", rmse_train_scaled},
          {"rmse_test_scaled", rmse_test_scaled},
          {"test_prediction_std_dB", test_prediction_std_db},
          {"uncovered_train", uncovered_train},
          {"uncovered_test", uncovered_test},
          {"fitness_history", history},
          {"config", write_config(config)}};
}

ExperimentReport run_experiment(const ExperimentConfig& config, const RunOptions& options) {
  using Clock = std::chrono::steady_clock;
  stage("config", [&] { config.validate(); });
  auto log = [&](const std::string& msg) {
    if (options.log) *options.log << "[" << config.name << "] " << msg << std::endl;
  };

  ExperimentReport report;
  report.config = config;
  const auto setup_start = Clock::now();

  const Dataset data = stage("load", [&] { return load_airfoil(config.dataset_path); });
  const Split parts = stage("split", [&] { return split(data, config.train_fraction, config.split_seed); });
  const Scaler scaler = stage("scale", [&] { return Scaler::fit(parts.train, config.log_frequency); });
  const Matrix train_x = scaled_inputs(parts.train, scaler);
  const std::vector<double> train_y = scaled_targets(parts.train, scaler);
  double fallback = 0;
  for (double y : train_y) fallback += y;
  fallback /= static_cast<double>(train_y.size());
  report.train_rows = parts.train.size();
  report.test_rows = parts.test.size();
  log("loaded " + std::to_string(data.size()) + " rows (" + std::to_string(parts.train.size()) + " train / " +
      std::to_string(parts.test.size()) + " test)");

  std::optional<ClusterModel> clusters;
  std::shared_ptr<const Regressor> regressor = stage("build", [&]() -> std::shared_ptr<const Regressor> {
    switch (config.variant) {
      case Variant::Brute:
        return build_brute(kInputCount, config.mfs, config.order, fallback);
      case Variant::Gft:
        return build_gft(kInputCount, config.mfs, config.order, config.input_order, fallback);
      case Variant::ClusteredGauss:
      case Variant::ClusteredFcm: {
        clusters = stage("cluster", [&] {
          return fcm_fit(clustering_points(parts.train, scaler, config.cluster_space), config.clusters,
                         config.fcm_params());
        });
        Matrix centers = clusters->centers.leftCols(static_cast<Eigen::Index>(kInputCount));
        if (config.variant == Variant::ClusteredGauss) return build_clustered_gauss(std::move(centers), config.order, fallback);
        return build_clustered_fcm(std::move(centers), config.fuzzifier, config.order, fallback);
      }
    }
    throw std::logic_error("unknown variant");
  });
  report.parameter_count = regressor->layout().total_length();
  report.rule_count = regressor->rule_count();
  if (report.parameter_count != param_count(config.architecture())) {
    throw std::logic_error("genome layout length disagrees with param_count");
  }
  report.setup_seconds = std::chrono::duration<double>(Clock::now() - setup_start).count();
  log("built " + std::string(variant_name(config.variant)) + ": " + std::to_string(report.rule_count) + " rules, " +
      std::to_string(report.parameter_count) + " parameters");

  const auto evaluator = regressor->bind(train_x);
  const Objective objective = [&](std::span<const double> genes) {
    return evaluate_fitness(*evaluator, genes, train_y).fitness;
  };
  const Initializer init = [&](Rng& rng, std::span<double> genes) { regressor->initialize(rng, genes); };

  const auto evolve_start = Clock::now();
  EvolutionResult evo = stage("evolve", [&] {
    return evolve(regressor->layout(), objective, config.ga, init, options.threads);
  });
  report.wall_clock_seconds = std::chrono::duration<double>(Clock::now() - evolve_start).count();
  report.fitness_history = evo.history;
  log("evolved " + std::to_string(config.ga.generations) + " generations in " +
      format_fixed(report.wall_clock_seconds, 2) + " s, best fitness " + format_double(*evo.best.fitness));

  report.model = {config.name, regressor, evo.best.genes, scaler};
  stage("evaluate", [&] {
    const Metrics train = score(*regressor, evo.best.genes, parts.train, scaler, report.train_actual_db,
                                report.train_predicted_db);
    const Metrics test = score(*regressor, evo.best.genes, parts.test, scaler, report.test_actual_db,
                               report.test_predicted_db);
    report.rmse_train_db = train.rmse_db;
    report.rmse_train_scaled = train.rmse_scaled;
    report.uncovered_train = train.uncovered;
    report.rmse_test_db = test.rmse_db;
    report.rmse_test_scaled = test.rmse_scaled;
    report.mae_test_db = test.mae_db;
    report.test_prediction_std_db = test.std_db;
    report.uncovered_test = test.uncovered;
  });
  log("rmse train " + format_fixed(report.rmse_train_db, 3) + " dB, test " + format_fixed(report.rmse_test_db, 3) +
      " dB, uncovered test " + std::to_string(report.uncovered_test));

  if (!config.output_dir.empty()) {
    stage("write", [&] {
      const auto& dir = config.output_dir;
      std::filesystem::create_directories(dir);
      write_text(dir / "config.toml", write_config(config));
      write_text(dir / "report.json", report.to_json().dump(2) + "\n");
      write_text(dir / "timing.json", nlohmann::json{{"wall_clock_seconds", report.wall_clock_seconds},
                                                     {"setup_seconds", report.setup_seconds}}
                                              .dump(2) + "\n");
      std::ostringstream fitness;
      write_history_csv(report.fitness_history, fitness);
      write_text(dir / "fitness.csv", fitness.str());
      write_text(dir / "predictions_train.csv", predictions_csv(report.train_actual_db, report.train_predicted_db));
      write_text(dir / "predictions_test.csv", predictions_csv(report.test_actual_db, report.test_predicted_db));
      std::ostringstream train_csv, test_csv;
      write_csv(parts.train, train_csv);
      write_csv(parts.test, test_csv);
      write_text(dir / "train_split.csv", train_csv.str());
      write_text(dir / "test_split.csv", test_csv.str());
      save_model(report.model, dir / "model.json");
      write_text(dir / "plot.gp", gnuplot_script(config.name));
      if (clusters) write_text(dir / "clusters.json", to_json(*clusters).dump(2) + "\n");
    });
  }
  return report;
}

void ComparisonTable::write_csv(std::ostream& out, bool include_wall_clock) const {
  out << "name,variant,parameter_count,rule_count,rmse_train_dB,rmse_test_dB,mae_test_dB,test_pred_std_dB,"
         "uncovered_train,uncovered_test";
  if (include_wall_clock) out << ",wall_clock_s";
  out << '\n';
  for (const auto& r : rows) {
    out << r.name << ',' << variant_name(r.variant) << ',' << r.parameter_count << ',' << r.rule_count << ','
        << format_double(r.rmse_train_db) << ',' << format_double(r.rmse_test_db) << ','
        << format_double(r.mae_test_db) << ',' << format_double(r.test_prediction_std_db) << ','
        << r.uncovered_train << ',' << r.uncovered_test;
    if (include_wall_clock) out << ',' << format_fixed(r.wall_clock_seconds, 3);
    out << '\n';
  }
}

std::string ComparisonTable::render_text() const {
  const std::vector<std::string> header = {"name",      "params",     "rules",     "rmse_train", "rmse_test",
                                           "mae_test",  "pred_std",   "unc_train", "unc_test",   "train_s"};
  std::vector<std::vector<std::string>> cells;
  for (const auto& r : rows) {
    cells.push_back({r.name, std::to_string(r.parameter_count), std::to_string(r.rule_count),
                     format_fixed(r.rmse_train_db, 3), format_fixed(r.rmse_test_db, 3), format_fixed(r.mae_test_db, 3),
                     format_fixed(r.test_prediction_std_db, 3), std::to_string(r.uncovered_train),
                     std::to_string(r.uncovered_test), format_fixed(r.wall_clock_seconds, 2)});
  }
  std::vector<std::size_t> width(header.size());
  for (std::size_t c = 0; c < header.size(); ++c) {
    width[c] = header[c].size();
    for (const auto& row : cells) width[c] = std::max(width[c], row[c].size());
  }
  std::ostringstream os;
  auto line = [&](const std::vector<std::string>& row) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) os << "  ";
      if (c == 0) {
        os << std::left << std::setw(static_cast<int>(width[c])) << row[c];
      } else {
        os << std::right << std::setw(static_cast<int>(width[c])) << row[c];
      }
    }
    os << '\n';
  };
  line(header);
  for (const auto& row : cells) line(row);
  os << "(RMSE/MAE/spread in dB; train_s = wall-clock seconds spent in the GA)\n";
  return os.str();
}

ComparisonTable compare(std::span<const ExperimentConfig> configs, const RunOptions& options,
                        const std::filesystem::path& out_dir) {
  if (configs.size() < 2) throw ConfigError("compare needs at least two experiment configs");
  const auto& ref = configs.front();
  for (const auto& c : configs) {
    if (c.dataset_path != ref.dataset_path || c.train_fraction != ref.train_fraction ||
        c.split_seed != ref.split_seed || c.log_frequency != ref.log_frequency) {
      throw ConfigError("compare: '" + c.name + "' uses a different dataset, split or scaling than '" + ref.name + "'");
    }
  }
  ComparisonTable table;
  for (const auto& c : configs) {
    const ExperimentReport r = run_experiment(c, options);
    table.rows.push_back({c.name, c.variant, r.parameter_count, r.rule_count, r.rmse_train_db, r.rmse_test_db,
                          r.mae_test_db, r.test_prediction_std_db, r.uncovered_train, r.uncovered_test,
                          r.wall_clock_seconds});
  }
  if (!out_dir.empty()) {
    std::filesystem::create_directories(out_dir);
    std::ostringstream csv;
    table.write_csv(csv);
    write_text(out_dir / "comparison.csv", csv.str());
    write_text(out_dir / "comparison.txt", table.render_text());
  }
  return table;
}

ClusterReport cluster_report(const std::filesystem::path& dataset_path, const ClusterReportOptions& opt,
                             const RunOptions& run, const std::filesystem::path& out_dir) {
  const Dataset data = stage("load", [&] { return load_airfoil(dataset_path); });
  const Scaler scaler = stage("scale", [&] { return Scaler::fit(data, opt.log_frequency); });
  const Matrix points = clustering_points(data, scaler, opt.space);
  ClusterReport report;
  report.curve = stage("cluster", [&] {
    return elbow_curve(points, opt.c_min, opt.c_max, opt.fcm, opt.restarts, run.threads);
  });
  report.knee = report.curve.knee();
  report.chosen_clusters = opt.chosen_clusters;
  if (!out_dir.empty()) {
    std::filesystem::create_directories(out_dir);
    std::ostringstream csv;
    write_elbow_csv(report.curve, csv);
    write_text(out_dir / "elbow.csv", csv.str());
    std::ostringstream note;
    note << "dataset: " << dataset_path.generic_string() << " (" << data.size() << " rows)\n"
         << "cluster space: " << cluster_space_name(opt.space) << ", fuzzifier " << format_double(opt.fcm.fuzzifier)
         << "\n"
         << "range: " << opt.c_min << ".." << opt.c_max << "\n"
         << "knee suggestion: " << report.knee << "\n"
         << "chosen clusters: " << report.chosen_clusters << "\n";
    write_text(out_dir / "elbow.txt", note.str());
  }
  return report;
}

}  // namespace gfs
