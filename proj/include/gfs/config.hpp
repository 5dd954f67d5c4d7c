#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "gfs/fcm.hpp"
#include "gfs/fuzzy.hpp"
#include "gfs/genome.hpp"

namespace gfs {

enum class ClusterSpace { Inputs, InputsAndTarget };

std::string_view cluster_space_name(ClusterSpace s);
ClusterSpace parse_cluster_space(std::string_view name);

inline constexpr std::string_view kDefaultDatasetPath = "data/airfoil_self_noise.dat";
inline constexpr std::size_t kDefaultClusters = 15;

struct ExperimentConfig {
  std::string name = "experiment";

  std::filesystem::path dataset_path{std::string(kDefaultDatasetPath)};
  bool log_frequency = false;

  double train_fraction = 0.8;
  std::uint64_t split_seed = 42;

  Variant variant = Variant::ClusteredFcm;
  std::size_t mfs = 5;
  TskOrder order = TskOrder::One;
  std::size_t clusters = kDefaultClusters;
  double fuzzifier = 2.0;
  ClusterSpace cluster_space = ClusterSpace::InputsAndTarget;
  std::vector<std::size_t> input_order{0, 1, 2, 3, 4};  // cascade input permutation

  // fuzzifier above is shared with clustering; these are the FCM run knobs.
  double fcm_tol = 1e-6;
  std::size_t fcm_max_iter = 300;
  std::uint64_t fcm_seed = 42;

  GaConfig ga;

  std::filesystem::path output_dir;  // empty: write nothing

  FcmParams fcm_params() const { return {fuzzifier, fcm_tol, fcm_max_iter, fcm_seed}; }
  ArchitectureConfig architecture() const;
  // Throws ConfigError on inconsistent settings.
  void validate() const;
  // Sets the split, FCM and GA seeds at once.
  void set_all_seeds(std::uint64_t seed);

  bool operator==(const ExperimentConfig&) const = default;
};

/// Flat `key = value` text with `[section]` headers (a TOML subset).
///
/// Values are double-quoted strings, integers, decimals, true/false or
/// integer arrays `[0, 1, 2]`. `#` starts a comment. Unknown keys are
/// rejected; missing keys keep their defaults.
std::string write_config(const ExperimentConfig& config);
ExperimentConfig parse_config(std::string_view text, std::string_view source = "<config>");
ExperimentConfig load_config(const std::filesystem::path& path);

// Named presets: brute-5mf-o1, gft-3mf-o0,
// gft-5mf-o0, gft-3mf-o1, gft-5mf-o1, clustered-gauss-15, clustered-fcm-15.
// All use population 50 and 100 generations.
std::vector<std::string> preset_names();
ExperimentConfig preset_config(std::string_view name);

}  // namespace gfs
