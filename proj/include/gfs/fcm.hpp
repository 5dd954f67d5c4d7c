#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <nlohmann/json.hpp>
#include <span>
#include <vector>

#include "gfs/dataset.hpp"

namespace gfs {

struct FcmParams {
  double fuzzifier = 2.0;
  double tol = 1e-6;  // on the largest center displacement
  std::size_t max_iter = 300;
  std::uint64_t seed = 42;
};

struct ClusterModel {
  Matrix centers;     // c x dims
  double fuzzifier = 2.0;
  Matrix membership;  // n x c, rows sum to 1
  double objective = 0;
  std::size_t iterations_used = 0;
  // Objective after each center update, then for the final (U, centers).
  std::vector<double> objective_history;
};

/// Fuzzy c-means by alternating optimization.
///
/// Centers start at c distinct data points chosen under `seed`. Each
/// iteration recomputes the memberships from the centers and the centers
/// from the memberships, stopping once no center moves more than `tol`.
/// The returned membership matrix is consistent with the final centers.
/// Throws std::invalid_argument for c < 2, c > n or fuzzifier <= 1 and
/// DataError when fewer than c distinct points exist.
ClusterModel fcm_fit(const Matrix& points, std::size_t clusters, const FcmParams& params);

// Membership of x to each center. Points that coincide with one or more
// centers split their membership equally among them.
std::vector<double> fcm_membership(std::span<const double> x, const Matrix& centers, double fuzzifier);
void fcm_membership(std::span<const double> x, const Matrix& centers, double fuzzifier, std::span<double> out);

// J = sum_i sum_k U_ik^m |x_i - c_k|^2
double fcm_objective(const Matrix& points, const Matrix& centers, const Matrix& membership, double fuzzifier);

struct ElbowPoint {
  std::size_t clusters = 0;
  double objective = 0;
};

struct ElbowCurve {
  std::vector<ElbowPoint> points;
  // Cluster count farthest below the chord between the curve endpoints,
  // measured on axes normalized to [0, 1].
  std::size_t knee() const;
};

// One fcm_fit per cluster count in [c_min, c_max] (best of `restarts`
// seeded runs each). Seeds derive from params.seed and c.
ElbowCurve elbow_curve(const Matrix& points, std::size_t c_min, std::size_t c_max, const FcmParams& params,
                       std::size_t restarts = 1, std::size_t threads = 1);

void write_elbow_csv(const ElbowCurve& curve, std::ostream& out);

nlohmann::json to_json(const ClusterModel& model);

}  // namespace gfs
