#pragma once

#include <cstddef>
#include <memory>
#include <nlohmann/json.hpp>
#include <span>
#include <string>
#include <vector>

#include "gfs/dataset.hpp"
#include "gfs/fuzzy.hpp"
#include "gfs/genome.hpp"
#include "gfs/rng.hpp"

namespace gfs {

struct Prediction {
  double value = 0;
  bool covered = true;
};

class Regressor;

// A regressor bound to a fixed set of input rows, so that work depending
// only on the inputs (cluster activations, distances) is done once.
class BoundEvaluator {
 public:
  virtual ~BoundEvaluator() = default;
  virtual std::size_t rows() const = 0;
  // Thread-safe; out.size() == rows().
  virtual void predict(std::span<const double> genes, std::span<Prediction> out) const = 0;
};

/// Common contract over the trainable fuzzy regressors.
///
/// A regressor is the immutable structure (layout, frozen centers,
/// fallback); the trainable parameters travel separately as a gene vector
/// matching layout(). Inputs are scaled vectors of input_count() values.
class Regressor {
 public:
  virtual ~Regressor() = default;

  virtual Variant variant() const = 0;
  virtual std::size_t input_count() const = 0;
  virtual std::size_t rule_count() const = 0;
  const GenomeLayout& layout() const { return layout_; }
  // Output used when no rule fires; normally the mean scaled training
  // target.
  double fallback() const { return fallback_; }

  // Throws std::invalid_argument on gene or input length mismatch.
  virtual Prediction predict(std::span<const double> genes, std::span<const double> x) const = 0;
  virtual void predict_batch(std::span<const double> genes, const Matrix& inputs, std::span<Prediction> out) const;
  virtual std::unique_ptr<BoundEvaluator> bind(const Matrix& inputs) const;

  // Initial genes for one GA individual.
  virtual void initialize(Rng& rng, std::span<double> genes) const;

  // Structure without genes; regressor_from_json rebuilds it.
  virtual nlohmann::json to_json() const = 0;
  // Human-readable structure summary.
  virtual std::string describe() const = 0;

 protected:
  Regressor(GenomeLayout layout, double fallback) : layout_(std::move(layout)), fallback_(fallback) {}
  void check_lengths(std::span<const double> genes, std::size_t x_size) const;

 private:
  GenomeLayout layout_;
  double fallback_;
};

// Full grid TSK with triangular MFs: m^d rules.
std::unique_ptr<Regressor> build_brute(std::size_t inputs = 5, std::size_t mfs = 5, TskOrder order = TskOrder::One,
                                       double fallback = 0.5);

// Left-deep cascade of 2-input grid systems:
//   s_1 = FIS_1(x_p0, x_p1), s_k = FIS_k(clamp(s_{k-1}), x_pk)
// where p is `input_order` (identity when empty).
std::unique_ptr<Regressor> build_gft(std::size_t inputs = 5, std::size_t mfs = 3, TskOrder order = TskOrder::Zero,
                                     std::vector<std::size_t> input_order = {}, double fallback = 0.5);

// Gaussian activation per cluster center with a trained width per cluster;
// genes are c sigmas followed by c consequents.
std::unique_ptr<Regressor> build_clustered_gauss(Matrix centers, TskOrder order = TskOrder::One,
                                                 double fallback = 0.5);

// Activation per cluster from the FCM membership of x to the frozen
// centers; genes are the c consequents only.
std::unique_ptr<Regressor> build_clustered_fcm(Matrix centers, double fuzzifier = 2.0,
                                               TskOrder order = TskOrder::One, double fallback = 0.5);

std::unique_ptr<Regressor> regressor_from_json(const nlohmann::json& j);

// Stage-level access for a cascade regressor. Each stage is 2 inputs with
// the cascade's m and order.
struct CascadeStageView {
  std::span<const double> mf_genes;
  std::span<const double> consequents;
};
std::vector<CascadeStageView> cascade_stages(const Regressor& gft, std::span<const double> genes);

// Decoded fuzzy systems for structural inspection: one for brute, one per
// cascade stage. Clustered regressors yield none.
std::vector<FuzzySystem> decode_systems(const Regressor& regressor, std::span<const double> genes);

// Activations (sum-normalized for clustered-fcm) of a clustered regressor.
std::vector<double> cluster_activations(const Regressor& clustered, std::span<const double> genes,
                                        std::span<const double> x);

struct FitResult {
  double fitness = 0;         // -RMSE in scaled units
  std::size_t uncovered = 0;  // samples that used the fallback
};

// Fitness of one gene vector against scaled targets.
FitResult evaluate_fitness(const BoundEvaluator& evaluator, std::span<const double> genes,
                           std::span<const double> targets);

}  // namespace gfs
