#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <random>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "gfs/config.hpp"
#include "gfs/error.hpp"
#include "gfs/harness.hpp"
#include "gfs/model_io.hpp"
#include "gfs/rng.hpp"
#include "support/surrogate.hpp"

namespace fs = std::filesystem;
using namespace gfs;

namespace {

fs::path scratch_dir() {
  static const fs::path dir = [] {
    auto d = fs::temp_directory_path() / ("gfs_harness_" + std::to_string(Rng(std::random_device{}()).next() % 1000000));
    fs::remove_all(d);
    fs::create_directories(d);
    gfs::testing::write_dat(gfs::testing::surrogate_airfoil(), d / "airfoil.dat");
    return d;
  }();
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

std::size_t line_count(const fs::path& p) {
  std::ifstream in(p);
  std::size_t n = 0;
  for (std::string line; std::getline(in, line);) n += line.empty() ? 0 : 1;
  return n;
}

ExperimentConfig small(Variant v, const std::string& name) {
  ExperimentConfig c;
  c.name = name;
  c.dataset_path = scratch_dir() / "airfoil.dat";
  c.variant = v;
  c.mfs = 3;
  c.order = v == Variant::Gft ? TskOrder::Zero : TskOrder::One;
  c.clusters = 6;
  c.ga.population_size = 12;
  c.ga.generations = 6;
  return c;
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string("\"") + GFS_CLI_PATH + "\" " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("config text round trips") {
  for (const auto& name : preset_names()) {
    const ExperimentConfig c = preset_config(name);
    CHECK(parse_config(write_config(c)) == c);
  }
  ExperimentConfig c;
  c.name = "odd \"name\"";
  c.ga.mutation_rate = 0.0125;
  c.train_fraction = 0.7;
  c.input_order = {4, 3, 2, 1, 0};
  c.output_dir = "some/dir";
  c.cluster_space = ClusterSpace::Inputs;
  CHECK(parse_config(write_config(c)) == c);
}

TEST_CASE("config parse errors") {
  CHECK_THROWS_AS(parse_config("[model]\nbogus = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[nowhere]\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[model]\nmfs = \"five\"\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[model]\nvariant = \"anfis\"\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[model]\nmfs 5\n"), ConfigError);
  try {
    parse_config("[split]\ntrain_fraction = 2\n", "bad.toml");
    FAIL("expected an error");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("bad.toml") != std::string::npos);
  }
  CHECK_THROWS_AS(load_config(scratch_dir() / "missing.toml"), ConfigError);
  CHECK_THROWS_AS(preset_config("nope"), ConfigError);
  const auto partial = parse_config("# only one key\n[model]\nclusters = 9\n");
  CHECK(partial.clusters == 9);
  CHECK(partial.ga == GaConfig{});
}

TEST_CASE("presets") {
  const auto names = preset_names();
  CHECK(names.size() == 7);
  for (const auto& n : names) {
    const auto c = preset_config(n);
    CHECK(c.name == n);
    CHECK(c.ga.population_size == 50);
    CHECK(c.ga.generations == 100);
    CHECK_NOTHROW(c.validate());
  }
  CHECK(param_count(preset_config("brute-5mf-o1").architecture()) == 18825);
  CHECK(param_count(preset_config("clustered-fcm-15").architecture()) == 90);
  CHECK(preset_config("clustered-fcm-15").clusters == kDefaultClusters);
  CHECK(ExperimentConfig{}.clusters == 15);
}

TEST_CASE("run_experiment writes a reproducible set of outputs") {
  auto c = small(Variant::ClusteredFcm, "fcm-small");
  c.output_dir = scratch_dir() / "run_a";
  const ExperimentReport a = run_experiment(c);
  CHECK(a.parameter_count == 36);
  CHECK(a.parameter_count == a.model.regressor->layout().total_length());
  CHECK(a.train_rows == 1202);
  CHECK(a.test_rows == 301);
  REQUIRE(a.fitness_history.size() == 6);
  for (std::size_t g = 1; g < a.fitness_history.size(); ++g) CHECK(a.fitness_history[g].best >= a.fitness_history[g - 1].best);

  const double span = a.model.scaler.target_span();
  CHECK(std::abs(a.rmse_test_db - a.rmse_test_scaled * span) <= 1e-9 * a.rmse_test_db);
  CHECK(std::abs(a.rmse_train_db - a.rmse_train_scaled * span) <= 1e-9 * a.rmse_train_db);
  CHECK(std::abs(-a.fitness_history.back().best - a.rmse_train_scaled) <= 1e-12);

  const std::vector<std::string> files = {"config.toml",       "report.json",     "fitness.csv",  "predictions_train.csv",
                                          "predictions_test.csv", "train_split.csv", "test_split.csv", "model.json",
                                          "plot.gp",           "clusters.json"};
  for (const auto& f : files) CHECK_MESSAGE(fs::exists(c.output_dir / f), f);
  CHECK(fs::exists(c.output_dir / "timing.json"));
  CHECK(line_count(c.output_dir / "fitness.csv") == 7);
  CHECK(line_count(c.output_dir / "predictions_test.csv") == 302);
  CHECK(slurp(c.output_dir / "predictions_test.csv").rfind("index,actual_dB,predicted_dB\n", 0) == 0);
  CHECK(load_config(c.output_dir / "config.toml") == c);

  std::vector<std::string> before;
  for (const auto& f : files) before.push_back(slurp(c.output_dir / f));
  const std::string timing = slurp(c.output_dir / "timing.json");
  run_experiment(c, {4, nullptr});
  for (std::size_t i = 0; i < files.size(); ++i) CHECK_MESSAGE(slurp(c.output_dir / files[i]) == before[i], files[i]);
  CHECK(timing.find("wall_clock_seconds") != std::string::npos);
}

TEST_CASE("every variant runs end to end") {
  for (Variant v : {Variant::Brute, Variant::Gft, Variant::ClusteredGauss, Variant::ClusteredFcm}) {
    auto c = small(v, std::string(variant_name(v)));
    if (v == Variant::Brute) c.mfs = 2;
    const ExperimentReport r = run_experiment(c);
    CHECK(r.parameter_count == param_count(c.architecture()));
    CHECK(std::isfinite(r.rmse_test_db));
    CHECK(r.test_predicted_db.size() == 301);
  }
}

TEST_CASE("errors carry the failing stage") {
  auto c = small(Variant::ClusteredFcm, "missing");
  c.dataset_path = scratch_dir() / "nope.dat";
  try {
    run_experiment(c);
    FAIL("expected an error");
  } catch (const DataError& e) {
    CHECK(std::string(e.what()).rfind("load:", 0) == 0);
  }
  c = small(Variant::ClusteredFcm, "bad");
  c.ga.elite_count = 0;
  CHECK_THROWS_AS(run_experiment(c), ConfigError);
}

TEST_CASE("saved models predict identically") {
  auto c = small(Variant::ClusteredGauss, "io");
  c.output_dir = scratch_dir() / "io";
  const ExperimentReport r = run_experiment(c);
  const SavedModel loaded = load_model(c.output_dir / "model.json");
  Rng rng(1);
  for (int i = 0; i < 100; ++i) {
    Sample s{rng.uniform(200, 20000), rng.uniform(0, 22), rng.uniform(0.03, 0.3), rng.uniform(31, 72),
             rng.uniform(0.0004, 0.058), 120};
    CHECK(loaded.predict_db(s).value == r.model.predict_db(s).value);
  }

  const fs::path out = scratch_dir() / "io_pred.csv";
  CHECK(predict_file(c.output_dir / "model.json", c.output_dir / "test_split.csv", out) == 301);
  CHECK(slurp(out) == slurp(c.output_dir / "predictions_test.csv"));

  const std::string text = slurp(c.output_dir / "model.json");
  {
    std::ofstream(scratch_dir() / "truncated.json") << text.substr(0, text.size() / 2);
  }
  CHECK_THROWS_AS(load_model(scratch_dir() / "truncated.json"), FormatError);
  auto j = nlohmann::json::parse(text);
  j["version"] = 99;
  {
    std::ofstream(scratch_dir() / "future.json") << j.dump();
  }
  CHECK_THROWS_AS(load_model(scratch_dir() / "future.json"), FormatError);
  j = nlohmann::json::parse(text);
  j["genes"].erase(0);
  CHECK_THROWS_AS(model_from_json(j), FormatError);
  CHECK_THROWS_AS(load_model(scratch_dir() / "absent.json"), DataError);
}

TEST_CASE("compare") {
  const auto a = small(Variant::ClusteredFcm, "a");
  const auto b = small(Variant::Gft, "b");
  const std::vector<ExperimentConfig> one = {a};
  CHECK_THROWS_AS(compare(one), ConfigError);
  auto mismatched = b;
  mismatched.split_seed = 7;
  const std::vector<ExperimentConfig> bad = {a, mismatched};
  CHECK_THROWS_AS(compare(bad), ConfigError);

  const std::vector<ExperimentConfig> pair = {a, b};
  const auto t1 = compare(pair, {}, scratch_dir() / "cmp1");
  const auto t2 = compare(pair, {}, scratch_dir() / "cmp2");
  REQUIRE(t1.rows.size() == 2);
  std::ostringstream s1, s2;
  t1.write_csv(s1, false);
  t2.write_csv(s2, false);
  CHECK(s1.str() == s2.str());
  const std::string csv = slurp(scratch_dir() / "cmp1" / "comparison.csv");
  const std::string header = csv.substr(0, csv.find('\n'));
  CHECK(header.size() > 13);
  CHECK(header.substr(header.size() - 13) == ",wall_clock_s");
  CHECK(fs::exists(scratch_dir() / "cmp1" / "comparison.txt"));
  CHECK(t1.render_text().find("a ") != std::string::npos);
}

TEST_CASE("cluster report") {
  ClusterReportOptions opt;
  const auto report = cluster_report(scratch_dir() / "airfoil.dat", opt, {4, nullptr}, scratch_dir() / "elbow");
  CHECK(report.curve.points.size() == 24);
  CHECK(report.chosen_clusters == 15);
  CHECK(line_count(scratch_dir() / "elbow" / "elbow.csv") == 25);
  for (std::size_t i = 1; i < report.curve.points.size(); ++i) {
    CHECK(report.curve.points[i].clusters > report.curve.points[i - 1].clusters);
  }

  const Matrix blobs = gfs::testing::blobs({{0.1, 0.1}, {0.9, 0.15}, {0.5, 0.9}}, 60, 0.03, 12);
  std::vector<Sample> rows;
  for (Eigen::Index i = 0; i < blobs.rows(); ++i) {
    // Every column is an affine image of one blob coordinate.
    const double u = blobs(i, 0), v = blobs(i, 1);
    rows.push_back({100 + 1000 * u, 20 * v, 0.05 + 0.2 * u, 30 + 40 * v, 0.001 + 0.01 * u, 110 + 20 * v});
  }
  gfs::testing::write_dat(rows, scratch_dir() / "blobs.dat");
  opt.c_max = 8;
  opt.space = ClusterSpace::Inputs;
  opt.restarts = 3;
  CHECK(cluster_report(scratch_dir() / "blobs.dat", opt).knee == 3);
}

TEST_CASE("command-line exit codes") {
  const std::string out = (scratch_dir() / "cli").string();
  const std::string data = (scratch_dir() / "airfoil.dat").string();
  auto c = small(Variant::ClusteredFcm, "cli");
  {
    std::ofstream(scratch_dir() / "cli.toml") << write_config(c);
  }
  const std::string cfg = (scratch_dir() / "cli.toml").string();
  CHECK(run_cli("train --config \"" + cfg + "\" --out \"" + out + "\"") == 0);
  CHECK(run_cli("predict --model \"" + out + "/model.json\" --input \"" + out + "/test_split.csv\" --output \"" + out +
                "/p.csv\"") == 0);
  CHECK(line_count(fs::path(out) / "p.csv") == 302);
  CHECK(run_cli("describe --model \"" + out + "/model.json\"") == 0);
  CHECK(run_cli("describe --preset brute-5mf-o1") == 0);
  CHECK(run_cli("config --preset gft-3mf-o0") == 0);
  CHECK(run_cli("") == 1);
  CHECK(run_cli("train --bogus") == 1);
  CHECK(run_cli("train --preset nope") == 1);
  CHECK(run_cli("train --config \"" + cfg + "\" --data \"" + data + ".missing\"") == 2);
  CHECK(run_cli("predict --model \"" + out + "/nothing.json\" --input x.csv") == 2);
}
