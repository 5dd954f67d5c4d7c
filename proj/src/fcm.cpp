#include "gfs/fcm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "gfs/error.hpp"
#include "gfs/parallel.hpp"
#include "gfs/rng.hpp"
#include "gfs/text.hpp"

namespace gfs {
namespace {

double squared_distance(std::span<const double> x, const Matrix& centers, Eigen::Index k) {
  double d2 = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) {
    const double diff = x[j] - centers(k, static_cast<Eigen::Index>(j));
    d2 += diff * diff;
  }
  return d2;
}

void update_memberships(const Matrix& points, const Matrix& centers, double m, Matrix& u) {
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    std::span<double> row(u.data() + i * u.cols(), static_cast<std::size_t>(u.cols()));
    fcm_membership(row_span(points, i), centers, m, row);
  }
}

void update_centers(const Matrix& points, const Matrix& u, double m, Matrix& centers) {
  centers.setZero();
  Eigen::VectorXd weight_sum = Eigen::VectorXd::Zero(centers.rows());
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    for (Eigen::Index k = 0; k < centers.rows(); ++k) {
      const double w = std::pow(u(i, k), m);
      weight_sum(k) += w;
      centers.row(k) += w * points.row(i);
    }
  }
  for (Eigen::Index k = 0; k < centers.rows(); ++k) {
    if (weight_sum(k) > 0) centers.row(k) /= weight_sum(k);
  }
}

}  // namespace

void fcm_membership(std::span<const double> x, const Matrix& centers, double m, std::span<double> out) {
  const auto c = static_cast<std::size_t>(centers.rows());
  if (c == 0) throw std::invalid_argument("fcm_membership: no centers");
  if (!(m > 1.0)) throw std::invalid_argument("fcm_membership: fuzzifier must exceed 1");
  if (x.size() != static_cast<std::size_t>(centers.cols()) || out.size() != c) {
    throw std::invalid_argument("fcm_membership: dimension mismatch");
  }
  double d2_min = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < c; ++k) {
    out[k] = squared_distance(x, centers, static_cast<Eigen::Index>(k));
    d2_min = std::min(d2_min, out[k]);
  }
  if (d2_min == 0.0) {
    std::size_t hits = 0;
    for (std::size_t k = 0; k < c; ++k) hits += out[k] == 0.0;
    for (std::size_t k = 0; k < c; ++k) out[k] = out[k] == 0.0 ? 1.0 / static_cast<double>(hits) : 0.0;
    return;
  }
  // u_k = 1 / sum_j (d_k / d_j)^(2/(m-1)), rewritten relative to the
  // nearest center so every term stays in (0, 1].
  const double exponent = 1.0 / (m - 1.0);
  double total = 0.0;
  for (std::size_t k = 0; k < c; ++k) {
    out[k] = std::pow(d2_min / out[k], exponent);
    total += out[k];
  }
  for (std::size_t k = 0; k < c; ++k) out[k] /= total;
}

std::vector<double> fcm_membership(std::span<const double> x, const Matrix& centers, double m) {
  std::vector<double> out(static_cast<std::size_t>(centers.rows()));
  fcm_membership(x, centers, m, out);
  return out;
}

double fcm_objective(const Matrix& points, const Matrix& centers, const Matrix& u, double m) {
  double j = 0.0;
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    const auto x = row_span(points, i);
    for (Eigen::Index k = 0; k < centers.rows(); ++k) j += std::pow(u(i, k), m) * squared_distance(x, centers, k);
  }
  return j;
}

ClusterModel fcm_fit(const Matrix& points, std::size_t clusters, const FcmParams& params) {
  const auto n = static_cast<std::size_t>(points.rows());
  if (clusters < 2) throw std::invalid_argument("fcm_fit: need at least 2 clusters");
  if (clusters > n) throw std::invalid_argument("fcm_fit: more clusters than points");
  if (!(params.fuzzifier > 1.0)) throw std::invalid_argument("fcm_fit: fuzzifier must exceed 1");
  if (params.max_iter == 0) throw std::invalid_argument("fcm_fit: max_iter must be positive");
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    for (double v : row_span(points, i)) {
      if (!std::isfinite(v)) throw DataError("fcm_fit: non-finite coordinate");
    }
  }

  // Initial centers: distinct points in seeded random order.
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  Rng rng(params.seed);
  for (std::size_t i = n - 1; i > 0; --i) std::swap(order[i], order[rng.below(i + 1)]);
  Matrix centers(static_cast<Eigen::Index>(clusters), points.cols());
  std::size_t chosen = 0;
  for (std::size_t idx : order) {
    const auto i = static_cast<Eigen::Index>(idx);
    bool duplicate = false;
    for (std::size_t k = 0; k < chosen && !duplicate; ++k) {
      duplicate = (centers.row(static_cast<Eigen::Index>(k)) == points.row(i));
    }
    if (duplicate) continue;
    centers.row(static_cast<Eigen::Index>(chosen++)) = points.row(i);
    if (chosen == clusters) break;
  }
  if (chosen < clusters) {
    throw DataError("fcm_fit: only " + std::to_string(chosen) + " distinct points for " +
                    std::to_string(clusters) + " clusters");
  }

  ClusterModel model;
  model.fuzzifier = params.fuzzifier;
  model.membership.resize(points.rows(), static_cast<Eigen::Index>(clusters));
  Matrix previous = centers;
  for (std::size_t it = 1; it <= params.max_iter; ++it) {
    update_memberships(points, centers, params.fuzzifier, model.membership);
    previous = centers;
    update_centers(points, model.membership, params.fuzzifier, centers);
    model.objective_history.push_back(fcm_objective(points, centers, model.membership, params.fuzzifier));
    model.iterations_used = it;
    const double shift = (centers - previous).rowwise().norm().maxCoeff();
    if (shift < params.tol) break;
  }
  update_memberships(points, centers, params.fuzzifier, model.membership);
  model.objective = fcm_objective(points, centers, model.membership, params.fuzzifier);
  model.objective_history.push_back(model.objective);
  model.centers = std::move(centers);
  return model;
}

std::size_t ElbowCurve::knee() const {
  if (points.empty()) throw std::logic_error("ElbowCurve::knee: empty curve");
  if (points.size() < 3) return points.front().clusters;
  const auto& first = points.front();
  const auto& last = points.back();
  const double c_span = static_cast<double>(last.clusters - first.clusters);
  double j_min = first.objective, j_max = first.objective;
  for (const auto& p : points) {
    j_min = std::min(j_min, p.objective);
    j_max = std::max(j_max, p.objective);
  }
  const double j_span = j_max > j_min ? j_max - j_min : 1.0;
  auto nx = [&](const ElbowPoint& p) { return static_cast<double>(p.clusters - first.clusters) / c_span; };
  auto ny = [&](const ElbowPoint& p) { return (p.objective - j_min) / j_span; };
  const double x0 = nx(first), y0 = ny(first), x1 = nx(last), y1 = ny(last);
  const double dx = x1 - x0, dy = y1 - y0;
  const double norm = std::hypot(dx, dy);
  std::size_t best = first.clusters;
  double best_distance = -1.0;
  for (const auto& p : points) {
    // Signed so that points below a decreasing chord count as positive.
    const double dist = ((nx(p) - x0) * dy - (ny(p) - y0) * dx) / norm;
    if (dist > best_distance) {
      best_distance = dist;
      best = p.clusters;
    }
  }
  return best;
}

ElbowCurve elbow_curve(const Matrix& points, std::size_t c_min, std::size_t c_max, const FcmParams& params,
                       std::size_t restarts, std::size_t threads) {
  if (c_min < 2 || c_max < c_min) throw std::invalid_argument("elbow_curve: need 2 <= c_min <= c_max");
  if (restarts == 0) throw std::invalid_argument("elbow_curve: restarts must be positive");
  ElbowCurve curve;
  curve.points.resize(c_max - c_min + 1);
  parallel_for(curve.points.size(), threads, [&](std::size_t i) {
    const std::size_t c = c_min + i;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t r = 0; r < restarts; ++r) {
      FcmParams p = params;
      p.seed = derive_seed(params.seed, {c, r});
      best = std::min(best, fcm_fit(points, c, p).objective);
    }
    curve.points[i] = {c, best};
  });
  return curve;
}

void write_elbow_csv(const ElbowCurve& curve, std::ostream& out) {
  out << "c,J\n";
  for (const auto& p : curve.points) out << p.clusters << ',' << format_double(p.objective) << '\n';
}

nlohmann::json to_json(const ClusterModel& model) {
  nlohmann::json centers = nlohmann::json::array();
  for (Eigen::Index k = 0; k < model.centers.rows(); ++k) {
    const auto r = row_span(model.centers, k);
    centers.push_back(std::vector<double>(r.begin(), r.end()));
  }
  return {{"centers", centers},
          {"fuzzifier", model.fuzzifier},
          {"objective", model.objective},
          {"iterations_used", model.iterations_used}};
}

}  // namespace gfs
