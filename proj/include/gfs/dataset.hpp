#pragma once

#include <Eigen/Core>
#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <nlohmann/json.hpp>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace gfs {

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

inline std::span<const double> row_span(const Matrix& m, Eigen::Index i) {
  return {m.data() + i * m.cols(), static_cast<std::size_t>(m.cols())};
}

inline constexpr std::size_t kInputCount = 5;
inline constexpr std::size_t kColumnCount = kInputCount + 1;

// One row of the airfoil self-noise table, in physical units.
struct Sample {
  double frequency = 0;                            // Hz
  double angle_of_attack = 0;                      // degrees
  double chord_length = 0;                         // m
  double free_stream_velocity = 0;                 // m/s
  double suction_side_displacement_thickness = 0;  // m
  double noise = 0;                                // scaled sound pressure level, dB

  std::array<double, kInputCount> inputs() const {
    return {frequency, angle_of_attack, chord_length, free_stream_velocity,
            suction_side_displacement_thickness};
  }
  std::array<double, kColumnCount> columns() const {
    return {frequency, angle_of_attack, chord_length, free_stream_velocity,
            suction_side_displacement_thickness, noise};
  }
  static Sample from_columns(std::span<const double, kColumnCount> v) {
    return {v[0], v[1], v[2], v[3], v[4], v[5]};
  }

  bool operator==(const Sample&) const = default;
};

struct ColumnRange {
  double min = 0;
  double max = 0;
};

class Dataset {
 public:
  static constexpr std::array<std::string_view, kInputCount> kFeatureNames = {
      "frequency", "angle", "chord", "velocity", "thickness"};
  static constexpr std::string_view kTargetName = "noise";

  Dataset() = default;
  // Throws DataError when empty or when a row violates the Sample invariants.
  explicit Dataset(std::vector<Sample> samples);

  const std::vector<Sample>& samples() const { return samples_; }
  std::size_t size() const { return samples_.size(); }
  const Sample& operator[](std::size_t i) const { return samples_[i]; }

  // Observed (min, max) per column in file order, target last.
  std::array<ColumnRange, kColumnCount> observed_ranges() const;

 private:
  std::vector<Sample> samples_;
};

// Parses the UCI `airfoil_self_noise.dat` layout: six whitespace separated
// numeric fields per line, no header. Errors name the 1-based line.
Dataset parse_airfoil(std::istream& in, std::string_view source = "<stream>");
Dataset load_airfoil(const std::filesystem::path& path);

// Canonical CSV export with a `frequency,angle,chord,velocity,thickness,noise`
// header. read_csv also accepts the five input columns without `noise`; the
// rows then carry noise = 0 and has_target is false.
void write_csv(const Dataset& data, std::ostream& out);
struct CsvTable {
  std::vector<Sample> rows;
  bool has_target = true;
};
CsvTable read_csv(std::istream& in, std::string_view source = "<stream>");

struct Split {
  Dataset train;
  Dataset test;
};

// Seeded Fisher-Yates shuffle; the first floor(n * train_fraction) rows of
// the permutation form the training set.
Split split(const Dataset& data, double train_fraction, std::uint64_t seed);

/// Per-column min-max scaling to [0, 1], fitted on one dataset.
///
/// With log_frequency the frequency column is mapped through log10 before
/// scaling. Inputs scaled for prediction are clamped to [0, 1]; the target
/// path is left unclamped so invert_target(scale_target(y)) == y.
class Scaler {
 public:
  static Scaler fit(const Dataset& data, bool log_frequency);

  std::array<double, kInputCount> scale_inputs(const Sample& s) const;
  std::array<double, kInputCount> scale_inputs_unclamped(const Sample& s) const;
  double scale_target(double noise_db) const;
  double invert_target(double scaled) const;

  bool log_frequency() const { return log_frequency_; }
  const std::array<ColumnRange, kColumnCount>& ranges() const { return ranges_; }
  double target_span() const { return ranges_[kInputCount].max - ranges_[kInputCount].min; }

  nlohmann::json to_json() const;
  static Scaler from_json(const nlohmann::json& j);

  bool operator==(const Scaler&) const;

 private:
  double transform_input(std::size_t column, double value) const;

  std::array<ColumnRange, kColumnCount> ranges_{};  // in transformed units
  bool log_frequency_ = false;
};

// Scaled (clamped) input rows and scaled targets, ready for the models.
Matrix scaled_inputs(const Dataset& data, const Scaler& scaler);
std::vector<double> scaled_targets(const Dataset& data, const Scaler& scaler);

}  // namespace gfs
