#include "gfs/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <string>

#include "gfs/error.hpp"
#include "gfs/rng.hpp"
#include "gfs/text.hpp"

namespace gfs {
namespace {

void validate_sample(const Sample& s, std::size_t index) {
  for (double v : s.columns()) {
    if (!std::isfinite(v)) {
      throw DataError("row " + std::to_string(index + 1) + ": non-finite value");
    }
  }
  if (s.frequency <= 0 || s.chord_length <= 0 || s.free_stream_velocity <= 0 ||
      s.suction_side_displacement_thickness <= 0) {
    throw DataError("row " + std::to_string(index + 1) +
                    ": frequency, chord, velocity and thickness must be positive");
  }
  if (s.angle_of_attack < 0) {
    throw DataError("row " + std::to_string(index + 1) + ": negative angle of attack");
  }
  if (!(s.noise > 50.0 && s.noise < 200.0)) {
    throw DataError("row " + std::to_string(index + 1) + ": noise " + format_double(s.noise) +
                    " dB outside plausible range (50, 200)");
  }
}

}  // namespace

Dataset::Dataset(std::vector<Sample> samples) : samples_(std::move(samples)) {
  if (samples_.empty()) throw DataError("dataset is empty");
  for (std::size_t i = 0; i < samples_.size(); ++i) validate_sample(samples_[i], i);
}

std::array<ColumnRange, kColumnCount> Dataset::observed_ranges() const {
  std::array<ColumnRange, kColumnCount> out;
  const auto first = samples_.front().columns();
  for (std::size_t c = 0; c < kColumnCount; ++c) out[c] = {first[c], first[c]};
  for (const Sample& s : samples_) {
    const auto v = s.columns();
    for (std::size_t c = 0; c < kColumnCount; ++c) {
      out[c].min = std::min(out[c].min, v[c]);
      out[c].max = std::max(out[c].max, v[c]);
    }
  }
  return out;
}

Dataset parse_airfoil(std::istream& in, std::string_view source) {
  std::vector<Sample> samples;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto fields = split_whitespace(line);
    if (fields.empty()) continue;
    const auto where = std::string(source) + ":" + std::to_string(line_no);
    if (fields.size() != kColumnCount) {
      throw DataError(where + ": expected 6 fields, found " + std::to_string(fields.size()));
    }
    std::array<double, kColumnCount> v{};
    for (std::size_t c = 0; c < kColumnCount; ++c) {
      if (!parse_double(fields[c], v[c])) {
        throw DataError(where + ": non-numeric token '" + std::string(fields[c]) + "'");
      }
    }
    Sample s = Sample::from_columns(v);
    try {
      validate_sample(s, samples.size());
    } catch (const DataError& e) {
      throw DataError(where + ": " + e.what());
    }
    samples.push_back(s);
  }
  if (in.bad()) throw DataError(std::string(source) + ": read failure");
  if (samples.empty()) throw DataError(std::string(source) + ": no data rows");
  return Dataset(std::move(samples));
}

Dataset load_airfoil(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open dataset file '" + path.string() + "'");
  return parse_airfoil(in, path.string());
}

void write_csv(const Dataset& data, std::ostream& out) {
  out << "frequency,angle,chord,velocity,thickness,noise\n";
  for (const Sample& s : data.samples()) {
    const auto v = s.columns();
    for (std::size_t c = 0; c < kColumnCount; ++c) {
      if (c) out << ',';
      out << format_double(v[c]);
    }
    out << '\n';
  }
}

CsvTable read_csv(std::istream& in, std::string_view source) {
  std::string line;
  if (!std::getline(in, line)) throw DataError(std::string(source) + ": empty CSV");
  const auto header = split_char(trim(line), ',');
  std::vector<std::string> names;
  for (auto h : header) names.emplace_back(trim(h));
  const std::vector<std::string> expected(Dataset::kFeatureNames.begin(), Dataset::kFeatureNames.end());
  CsvTable table;
  if (names.size() == kColumnCount && names.back() == Dataset::kTargetName &&
      std::equal(expected.begin(), expected.end(), names.begin())) {
    table.has_target = true;
  } else if (names == expected) {
    table.has_target = false;
  } else {
    throw DataError(std::string(source) + ":1: unexpected CSV header '" + line + "'");
  }
  const std::size_t width = table.has_target ? kColumnCount : kInputCount;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto where = std::string(source) + ":" + std::to_string(line_no);
    const auto fields = split_char(trim(line), ',');
    if (fields.size() != width) {
      throw DataError(where + ": expected " + std::to_string(width) + " fields, found " +
                      std::to_string(fields.size()));
    }
    std::array<double, kColumnCount> v{};
    for (std::size_t c = 0; c < width; ++c) {
      if (!parse_double(trim(fields[c]), v[c]) || !std::isfinite(v[c])) {
        throw DataError(where + ": bad numeric field '" + std::string(fields[c]) + "'");
      }
    }
    table.rows.push_back(Sample::from_columns(v));
  }
  return table;
}

Split split(const Dataset& data, double train_fraction, std::uint64_t seed) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw std::invalid_argument("train_fraction must lie in (0, 1)");
  }
  const std::size_t n = data.size();
  const auto n_train = static_cast<std::size_t>(std::floor(static_cast<double>(n) * train_fraction));
  if (n_train == 0 || n_train == n) {
    throw std::invalid_argument("split leaves an empty partition for " + std::to_string(n) + " rows");
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(seed);
  for (std::size_t i = n - 1; i > 0; --i) std::swap(order[i], order[rng.below(i + 1)]);

  std::vector<Sample> train, test;
  train.reserve(n_train);
  test.reserve(n - n_train);
  for (std::size_t i = 0; i < n; ++i) {
    (i < n_train ? train : test).push_back(data[order[i]]);
  }
  return {Dataset(std::move(train)), Dataset(std::move(test))};
}

Scaler Scaler::fit(const Dataset& data, bool log_frequency) {
  Scaler s;
  s.log_frequency_ = log_frequency;
  auto ranges = data.observed_ranges();
  if (log_frequency) ranges[0] = {std::log10(ranges[0].min), std::log10(ranges[0].max)};
  for (std::size_t c = 0; c < kColumnCount; ++c) {
    if (!(ranges[c].max > ranges[c].min)) {
      const std::string name =
          c < kInputCount ? std::string(Dataset::kFeatureNames[c]) : std::string(Dataset::kTargetName);
      throw DataError("cannot scale constant column '" + name + "'");
    }
  }
  s.ranges_ = ranges;
  return s;
}

double Scaler::transform_input(std::size_t column, double value) const {
  if (column == 0 && log_frequency_) value = std::log10(value);
  return (value - ranges_[column].min) / (ranges_[column].max - ranges_[column].min);
}

std::array<double, kInputCount> Scaler::scale_inputs_unclamped(const Sample& s) const {
  const auto raw = s.inputs();
  std::array<double, kInputCount> out{};
  for (std::size_t c = 0; c < kInputCount; ++c) out[c] = transform_input(c, raw[c]);
  return out;
}

std::array<double, kInputCount> Scaler::scale_inputs(const Sample& s) const {
  auto out = scale_inputs_unclamped(s);
  for (double& v : out) v = std::clamp(v, 0.0, 1.0);
  return out;
}

double Scaler::scale_target(double noise_db) const {
  const ColumnRange& r = ranges_[kInputCount];
  return (noise_db - r.min) / (r.max - r.min);
}

double Scaler::invert_target(double scaled) const {
  const ColumnRange& r = ranges_[kInputCount];
  return r.min + scaled * (r.max - r.min);
}

nlohmann::json Scaler::to_json() const {
  nlohmann::json cols = nlohmann::json::array();
  for (std::size_t c = 0; c < kColumnCount; ++c) {
    cols.push_back({{"name", c < kInputCount ? Dataset::kFeatureNames[c] : Dataset::kTargetName},
                    {"min", ranges_[c].min},
                    {"max", ranges_[c].max}});
  }
  return {{"log_frequency", log_frequency_}, {"columns", cols}};
}

Scaler Scaler::from_json(const nlohmann::json& j) {
  Scaler s;
  s.log_frequency_ = j.at("log_frequency").get<bool>();
  const auto& cols = j.at("columns");
  if (!cols.is_array() || cols.size() != kColumnCount) throw FormatError("scaler: expected 6 columns");
  for (std::size_t c = 0; c < kColumnCount; ++c) {
    s.ranges_[c] = {cols[c].at("min").get<double>(), cols[c].at("max").get<double>()};
    if (!(s.ranges_[c].max > s.ranges_[c].min)) throw FormatError("scaler: degenerate column range");
  }
  return s;
}

bool Scaler::operator==(const Scaler& o) const {
  if (log_frequency_ != o.log_frequency_) return false;
  for (std::size_t c = 0; c < kColumnCount; ++c) {
    if (ranges_[c].min != o.ranges_[c].min || ranges_[c].max != o.ranges_[c].max) return false;
  }
  return true;
}

Matrix scaled_inputs(const Dataset& data, const Scaler& scaler) {
  Matrix m(static_cast<Eigen::Index>(data.size()), static_cast<Eigen::Index>(kInputCount));
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto x = scaler.scale_inputs(data[i]);
    for (std::size_t c = 0; c < kInputCount; ++c) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) = x[c];
  }
  return m;
}

std::vector<double> scaled_targets(const Dataset& data, const Scaler& scaler) {
  std::vector<double> y(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) y[i] = scaler.scale_target(data[i].noise);
  return y;
}

}  // namespace gfs
