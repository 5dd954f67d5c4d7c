#pragma once

#include <cstddef>
#include <nlohmann/json.hpp>
#include <span>
#include <variant>
#include <vector>

namespace gfs {

// Total firing strength below this marks an input as uncovered.
inline constexpr double kCoverageEpsilon = 1e-12;

struct TriangularMF {
  double a = 0;  // left foot
  double b = 0;  // peak
  double c = 0;  // right foot
  bool operator==(const TriangularMF&) const = default;
};

struct GaussianMF {
  double mu = 0;
  double sigma = 1;
  bool operator==(const GaussianMF&) const = default;
};

using MembershipFunction = std::variant<TriangularMF, GaussianMF>;

// Degree in [0, 1]. A triangle with a == b (or b == c) is a shoulder that
// reaches 1 at its peak. Throws std::invalid_argument for non-finite x, an
// unordered triangle or sigma <= 0.
double mf_degree(const TriangularMF& mf, double x);
double mf_degree(const GaussianMF& mf, double x);
double mf_degree(const MembershipFunction& mf, double x);

// Unchecked triangular degree for hot loops; requires a <= b <= c.
inline double triangle_degree(const TriangularMF& mf, double x) {
  if (x < mf.a || x > mf.c) return 0.0;
  if (x == mf.b) return 1.0;
  if (x < mf.b) return (x - mf.a) / (mf.b - mf.a);
  return (mf.c - x) / (mf.c - mf.b);
}

struct InputPartition {
  std::vector<MembershipFunction> mfs;
  std::size_t size() const { return mfs.size(); }
  bool operator==(const InputPartition&) const = default;
};

// m triangles with peaks at k/(m-1) and feet on the neighbouring peaks.
// Degrees sum to one everywhere on [0, 1].
InputPartition uniform_partition(std::size_t m);

enum class TskOrder { Zero = 0, One = 1 };

// Coefficients per rule: 1 for order 0, inputs + 1 (slopes then intercept)
// for order 1.
inline std::size_t consequent_arity(TskOrder order, std::size_t inputs) {
  return order == TskOrder::Zero ? 1 : inputs + 1;
}

struct TskRule {
  std::vector<std::size_t> antecedent;  // one MF index per input
  std::vector<double> consequent;
  bool operator==(const TskRule&) const = default;
};

// Evaluates one rule consequent at x.
double consequent_value(std::span<const double> coefficients, TskOrder order, std::span<const double> x);

class FuzzySystem {
 public:
  // Throws std::invalid_argument when rule antecedents or consequent
  // arities do not match the partitions and order.
  FuzzySystem(std::vector<InputPartition> partitions, std::vector<TskRule> rules, TskOrder order);

  // Full grid: one rule per antecedent combination, enumerated in
  // mixed-radix order with the last input varying fastest. `consequents`
  // holds the rule coefficients back to back in that order.
  static FuzzySystem grid(std::vector<InputPartition> partitions, TskOrder order,
                          std::span<const double> consequents);

  const std::vector<InputPartition>& partitions() const { return partitions_; }
  const std::vector<TskRule>& rules() const { return rules_; }
  TskOrder order() const { return order_; }
  std::size_t input_count() const { return partitions_.size(); }

  bool operator==(const FuzzySystem&) const = default;

 private:
  std::vector<InputPartition> partitions_;
  std::vector<TskRule> rules_;
  TskOrder order_;
};

// Mixed-radix decode of a grid rule index (last input fastest).
std::vector<std::size_t> grid_antecedent(std::size_t rule_index, std::span<const std::size_t> radices);

// Product t-norm firing strength of every rule.
std::vector<double> firing_strengths(const FuzzySystem& system, std::span<const double> x);

struct TskOutput {
  double value = 0;
  bool covered = true;
};

// Weighted average of rule consequents. When the total firing strength is
// below kCoverageEpsilon the result is `fallback` with covered = false.
TskOutput tsk_eval(const FuzzySystem& system, std::span<const double> x, double fallback);

/// Grid TSK evaluation straight from flat parameters.
///
/// `mfs` holds inputs * mfs_per_input triangles (input-major) and
/// `consequents` the grid rule coefficients in FuzzySystem::grid order.
/// Only MFs with nonzero degree are enumerated, in the same rule order as a
/// full sweep, so the result is bit-identical to tsk_eval on the equivalent
/// FuzzySystem.
TskOutput grid_eval(std::span<const TriangularMF> mfs, std::size_t mfs_per_input,
                    std::span<const double> consequents, TskOrder order, std::span<const double> x,
                    double fallback);

nlohmann::json to_json(const FuzzySystem& system);
FuzzySystem fuzzy_system_from_json(const nlohmann::json& j);

}  // namespace gfs
