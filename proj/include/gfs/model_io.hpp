#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <nlohmann/json.hpp>
#include <string>
#include <vector>

#include "gfs/architectures.hpp"
#include "gfs/dataset.hpp"

namespace gfs {

inline constexpr int kModelFormatVersion = 1;

// A trained regressor together with the genes and the scaler that maps raw
// samples into its input space.
struct SavedModel {
  std::string name;
  std::shared_ptr<const Regressor> regressor;
  std::vector<double> genes;
  Scaler scaler;

  // Prediction in dB for one raw sample; inputs are clamped to the scaler
  // box first.
  Prediction predict_db(const Sample& sample) const;
};

nlohmann::json to_json(const SavedModel& model);
// Throws FormatError on a wrong format tag, version or gene count.
SavedModel model_from_json(const nlohmann::json& j);

void save_model(const SavedModel& model, const std::filesystem::path& path);
SavedModel load_model(const std::filesystem::path& path);

// Reads a canonical CSV (with or without the noise column) and writes
// `index,actual_dB,predicted_dB` (or `index,predicted_dB`). Returns the row
// count.
std::size_t predict_csv(const SavedModel& model, std::istream& in, std::ostream& out,
                        std::string_view source = "<stream>");
std::size_t predict_file(const std::filesystem::path& model_path, const std::filesystem::path& input_csv,
                         const std::filesystem::path& output_csv);

}  // namespace gfs
