#include "gfs/model_io.hpp"

#include <fstream>
#include <sstream>

#include "gfs/error.hpp"
#include "gfs/text.hpp"

namespace gfs {

Prediction SavedModel::predict_db(const Sample& sample) const {
  const auto x = scaler.scale_inputs(sample);
  const Prediction p = regressor->predict(genes, x);
  return {scaler.invert_target(p.value), p.covered};
}

nlohmann::json to_json(const SavedModel& model) {
  nlohmann::json j = {{"format", "gfs-model"},
                      {"version", kModelFormatVersion},
                      {"name", model.name},
                      {"regressor", model.regressor->to_json()},
                      {"scaler", model.scaler.to_json()},
                      {"genes", model.genes}};
  const auto systems = decode_systems(*model.regressor, model.genes);
  if (!systems.empty()) {
    nlohmann::json sj = nlohmann::json::array();
    for (const auto& s : systems) sj.push_back(to_json(s));
    // Informational; loading rebuilds everything from regressor + genes.
    j["fuzzy_systems"] = sj;
  }
  return j;
}

SavedModel model_from_json(const nlohmann::json& j) {
  try {
    if (!j.is_object() || j.value("format", std::string()) != "gfs-model") throw FormatError("model: not a gfs model file");
    const int version = j.at("version").get<int>();
    if (version != kModelFormatVersion) {
      throw FormatError("model: unsupported format version " + std::to_string(version) + " (expected " +
                        std::to_string(kModelFormatVersion) + ")");
    }
    SavedModel m;
    m.name = j.at("name").get<std::string>();
    m.regressor = regressor_from_json(j.at("regressor"));
    m.scaler = Scaler::from_json(j.at("scaler"));
    m.genes = j.at("genes").get<std::vector<double>>();
    if (m.genes.size() != m.regressor->layout().total_length()) {
      throw FormatError("model: expected " + std::to_string(m.regressor->layout().total_length()) + " genes, found " +
                        std::to_string(m.genes.size()));
    }
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("model: ") + e.what());
  }
}

void save_model(const SavedModel& model, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write model file '" + path.string() + "'");
  out << to_json(model).dump(1) << '\n';
  if (!out) throw DataError("failed writing model file '" + path.string() + "'");
}

SavedModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open model file '" + path.string() + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError("model file '" + path.string() + "': " + e.what());
  }
  return model_from_json(j);
}

std::size_t predict_csv(const SavedModel& model, std::istream& in, std::ostream& out, std::string_view source) {
  const CsvTable table = read_csv(in, source);
  out << (table.has_target ? "index,actual_dB,predicted_dB\n" : "index,predicted_dB\n");
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const Prediction p = model.predict_db(table.rows[i]);
    out << i << ',';
    if (table.has_target) out << format_double(table.rows[i].noise) << ',';
    out << format_double(p.value) << '\n';
  }
  return table.rows.size();
}

std::size_t predict_file(const std::filesystem::path& model_path, const std::filesystem::path& input_csv,
                         const std::filesystem::path& output_csv) {
  const SavedModel model = load_model(model_path);
  std::ifstream in(input_csv);
  if (!in) throw DataError("cannot open input CSV '" + input_csv.string() + "'");
  std::ofstream out(output_csv);
  if (!out) throw DataError("cannot write predictions to '" + output_csv.string() + "'");
  return predict_csv(model, in, out, input_csv.string());
}

}  // namespace gfs
