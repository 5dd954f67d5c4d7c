#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <nlohmann/json.hpp>
#include <span>
#include <string>
#include <vector>

#include "gfs/config.hpp"
#include "gfs/fcm.hpp"
#include "gfs/ga.hpp"
#include "gfs/model_io.hpp"

namespace gfs {

struct RunOptions {
  std::size_t threads = 1;
  std::ostream* log = nullptr;  // progress lines, optional
};

struct ExperimentReport {
  ExperimentConfig config;

  double rmse_train_db = 0;
  double rmse_test_db = 0;
  double mae_test_db = 0;
  double rmse_train_scaled = 0;
  double rmse_test_scaled = 0;
  double test_prediction_std_db = 0;  // spread of the test predictions
  std::size_t uncovered_train = 0;
  std::size_t uncovered_test = 0;
  std::size_t parameter_count = 0;
  std::size_t rule_count = 0;
  std::size_t train_rows = 0;
  std::size_t test_rows = 0;
  std::vector<GenerationStats> fitness_history;
  double wall_clock_seconds = 0;  // evolve only
  double setup_seconds = 0;       // load, split, scale, cluster

  SavedModel model;
  std::vector<double> train_actual_db, train_predicted_db;
  std::vector<double> test_actual_db, test_predicted_db;

  // Everything except the timings, so reruns serialize identically.
  nlohmann::json to_json() const;
};

/// load -> split -> scale -> (FCM when clustered) -> build -> evolve -> evaluate.
///
/// When config.output_dir is set, writes config.toml, report.json,
/// timing.json, fitness.csv, predictions_train.csv, predictions_test.csv,
/// train_split.csv, test_split.csv, model.json, plot.gp and, for clustered
/// variants, clusters.json. Errors are rethrown with the failing stage
/// prefixed to the message.
ExperimentReport run_experiment(const ExperimentConfig& config, const RunOptions& options = {});

struct ComparisonRow {
  std::string name;
  Variant variant = Variant::Brute;
  std::size_t parameter_count = 0;
  std::size_t rule_count = 0;
  double rmse_train_db = 0;
  double rmse_test_db = 0;
  double mae_test_db = 0;
  double test_prediction_std_db = 0;
  std::size_t uncovered_train = 0;
  std::size_t uncovered_test = 0;
  double wall_clock_seconds = 0;
};

struct ComparisonTable {
  std::vector<ComparisonRow> rows;
  // wall_clock_s is the last column.
  void write_csv(std::ostream& out, bool include_wall_clock = true) const;
  std::string render_text() const;
};

// Runs the experiments sequentially. Requires at least two configs that
// share dataset, split and scaling settings (ConfigError otherwise).
// Per-experiment outputs go to each config's output_dir; when out_dir is
// set the table is written there as comparison.csv and comparison.txt.
ComparisonTable compare(std::span<const ExperimentConfig> configs, const RunOptions& options = {},
                        const std::filesystem::path& out_dir = {});

struct ClusterReportOptions {
  std::size_t c_min = 2;
  std::size_t c_max = 25;
  FcmParams fcm;
  ClusterSpace space = ClusterSpace::InputsAndTarget;
  bool log_frequency = false;
  std::size_t chosen_clusters = kDefaultClusters;
  std::size_t restarts = 1;
};

struct ClusterReport {
  ElbowCurve curve;
  std::size_t knee = 0;
  std::size_t chosen_clusters = kDefaultClusters;
};

// Elbow analysis over the whole dataset, scaled with a scaler fitted on it.
ClusterReport cluster_report(const std::filesystem::path& dataset_path, const ClusterReportOptions& options,
                             const RunOptions& run = {}, const std::filesystem::path& out_dir = {});

// Scaled feature matrix for clustering: inputs, optionally with the scaled
// target appended as the last column.
Matrix clustering_points(const Dataset& data, const Scaler& scaler, ClusterSpace space);

}  // namespace gfs
