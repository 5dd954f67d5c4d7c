#include "gfs/fuzzy.hpp"

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

#include "gfs/error.hpp"

namespace gfs {

double mf_degree(const TriangularMF& mf, double x) {
  if (!std::isfinite(x)) throw std::invalid_argument("mf_degree: non-finite input");
  if (!(mf.a <= mf.b && mf.b <= mf.c)) throw std::invalid_argument("mf_degree: triangle requires a <= b <= c");
  return triangle_degree(mf, x);
}

double mf_degree(const GaussianMF& mf, double x) {
  if (!std::isfinite(x)) throw std::invalid_argument("mf_degree: non-finite input");
  if (!(mf.sigma > 0)) throw std::invalid_argument("mf_degree: gaussian requires sigma > 0");
  const double z = (x - mf.mu) / mf.sigma;
  return std::exp(-0.5 * z * z);
}

double mf_degree(const MembershipFunction& mf, double x) {
  return std::visit([x](const auto& f) { return mf_degree(f, x); }, mf);
}

InputPartition uniform_partition(std::size_t m) {
  if (m < 2) throw std::invalid_argument("uniform_partition: need at least 2 MFs");
  InputPartition p;
  const double step = 1.0 / static_cast<double>(m - 1);
  for (std::size_t k = 0; k < m; ++k) {
    const double peak = k == m - 1 ? 1.0 : static_cast<double>(k) * step;
    const double left = k == 0 ? 0.0 : static_cast<double>(k - 1) * step;
    const double right = k == m - 1 ? 1.0 : (k + 1 == m - 1 ? 1.0 : static_cast<double>(k + 1) * step);
    p.mfs.emplace_back(TriangularMF{left, peak, right});
  }
  return p;
}

double consequent_value(std::span<const double> coefficients, TskOrder order, std::span<const double> x) {
  if (order == TskOrder::Zero) return coefficients[0];
  double y = coefficients[x.size()];
  for (std::size_t j = 0; j < x.size(); ++j) y += coefficients[j] * x[j];
  return y;
}

FuzzySystem::FuzzySystem(std::vector<InputPartition> partitions, std::vector<TskRule> rules, TskOrder order)
    : partitions_(std::move(partitions)), rules_(std::move(rules)), order_(order) {
  if (partitions_.empty()) throw std::invalid_argument("FuzzySystem: no inputs");
  for (const auto& p : partitions_) {
    if (p.mfs.empty()) throw std::invalid_argument("FuzzySystem: empty input partition");
  }
  const std::size_t arity = consequent_arity(order_, partitions_.size());
  for (const TskRule& r : rules_) {
    if (r.antecedent.size() != partitions_.size()) {
      throw std::invalid_argument("FuzzySystem: antecedent arity mismatch");
    }
    for (std::size_t j = 0; j < r.antecedent.size(); ++j) {
      if (r.antecedent[j] >= partitions_[j].size()) {
        throw std::invalid_argument("FuzzySystem: antecedent index out of range");
      }
    }
    if (r.consequent.size() != arity) throw std::invalid_argument("FuzzySystem: consequent arity mismatch");
  }
}

std::vector<std::size_t> grid_antecedent(std::size_t rule_index, std::span<const std::size_t> radices) {
  std::vector<std::size_t> tuple(radices.size());
  for (std::size_t j = radices.size(); j-- > 0;) {
    tuple[j] = rule_index % radices[j];
    rule_index /= radices[j];
  }
  return tuple;
}

FuzzySystem FuzzySystem::grid(std::vector<InputPartition> partitions, TskOrder order,
                              std::span<const double> consequents) {
  std::vector<std::size_t> radices;
  std::size_t rule_count = 1;
  for (const auto& p : partitions) {
    radices.push_back(p.size());
    rule_count *= p.size();
  }
  const std::size_t arity = consequent_arity(order, partitions.size());
  if (consequents.size() != rule_count * arity) {
    throw std::invalid_argument("FuzzySystem::grid: expected " + std::to_string(rule_count * arity) +
                                " consequent coefficients, got " + std::to_string(consequents.size()));
  }
  std::vector<TskRule> rules;
  rules.reserve(rule_count);
  for (std::size_t r = 0; r < rule_count; ++r) {
    const auto coeffs = consequents.subspan(r * arity, arity);
    rules.push_back({grid_antecedent(r, radices), std::vector<double>(coeffs.begin(), coeffs.end())});
  }
  return FuzzySystem(std::move(partitions), std::move(rules), order);
}

std::vector<double> firing_strengths(const FuzzySystem& system, std::span<const double> x) {
  if (x.size() != system.input_count()) throw std::invalid_argument("firing_strengths: dimension mismatch");
  std::vector<std::vector<double>> degrees(system.input_count());
  for (std::size_t j = 0; j < x.size(); ++j) {
    for (const auto& mf : system.partitions()[j].mfs) degrees[j].push_back(mf_degree(mf, x[j]));
  }
  std::vector<double> w;
  w.reserve(system.rules().size());
  for (const TskRule& r : system.rules()) {
    double v = 1.0;
    for (std::size_t j = 0; j < x.size(); ++j) v *= degrees[j][r.antecedent[j]];
    w.push_back(v);
  }
  return w;
}

TskOutput tsk_eval(const FuzzySystem& system, std::span<const double> x, double fallback) {
  const auto w = firing_strengths(system, x);
  double num = 0.0;
  double den = 0.0;
  for (std::size_t r = 0; r < w.size(); ++r) {
    if (w[r] == 0.0) continue;
    num += w[r] * consequent_value(system.rules()[r].consequent, system.order(), x);
    den += w[r];
  }
  if (den < kCoverageEpsilon) return {fallback, false};
  return {num / den, true};
}

TskOutput grid_eval(std::span<const TriangularMF> mfs, std::size_t mfs_per_input,
                    std::span<const double> consequents, TskOrder order, std::span<const double> x,
                    double fallback) {
  constexpr std::size_t kMaxInputs = 16;
  constexpr std::size_t kMaxMfs = 16;
  const std::size_t d = x.size();
  if (d == 0 || d > kMaxInputs || mfs_per_input == 0 || mfs_per_input > kMaxMfs ||
      mfs.size() != d * mfs_per_input) {
    throw std::invalid_argument("grid_eval: dimension mismatch");
  }
  const std::size_t arity = consequent_arity(order, d);

  // Nonzero degrees per input, in MF order.
  std::array<std::array<double, kMaxMfs>, kMaxInputs> deg{};
  std::array<std::array<std::size_t, kMaxMfs>, kMaxInputs> idx{};
  std::array<std::size_t, kMaxInputs> count{};
  std::array<std::size_t, kMaxInputs> stride{};
  std::size_t s = 1;
  for (std::size_t j = d; j-- > 0;) {
    stride[j] = s;
    s *= mfs_per_input;
  }
  if (consequents.size() != s * arity) throw std::invalid_argument("grid_eval: consequent length mismatch");
  for (std::size_t j = 0; j < d; ++j) {
    if (!std::isfinite(x[j])) throw std::invalid_argument("grid_eval: non-finite input");
    for (std::size_t k = 0; k < mfs_per_input; ++k) {
      const double v = triangle_degree(mfs[j * mfs_per_input + k], x[j]);
      if (v != 0.0) {
        deg[j][count[j]] = v;
        idx[j][count[j]] = k;
        ++count[j];
      }
    }
    if (count[j] == 0) return {fallback, false};
  }

  // Odometer over the nonzero MFs; last input fastest, matching grid order.
  std::array<std::size_t, kMaxInputs> pos{};
  double num = 0.0;
  double den = 0.0;
  for (;;) {
    double w = 1.0;
    std::size_t rule = 0;
    for (std::size_t j = 0; j < d; ++j) {
      w *= deg[j][pos[j]];
      rule += idx[j][pos[j]] * stride[j];
    }
    if (w != 0.0) {
      num += w * consequent_value(consequents.subspan(rule * arity, arity), order, x);
      den += w;
    }
    std::size_t j = d;
    while (j-- > 0) {
      if (++pos[j] < count[j]) break;
      pos[j] = 0;
    }
    if (j == static_cast<std::size_t>(-1)) break;
  }
  if (den < kCoverageEpsilon) return {fallback, false};
  return {num / den, true};
}

nlohmann::json to_json(const FuzzySystem& system) {
  using nlohmann::json;
  json parts = json::array();
  for (const auto& p : system.partitions()) {
    json mfs = json::array();
    for (const auto& mf : p.mfs) {
      if (const auto* t = std::get_if<TriangularMF>(&mf)) {
        mfs.push_back({{"kind", "triangular"}, {"params", {t->a, t->b, t->c}}});
      } else {
        const auto& g = std::get<GaussianMF>(mf);
        mfs.push_back({{"kind", "gaussian"}, {"params", {g.mu, g.sigma}}});
      }
    }
    parts.push_back(mfs);
  }
  json rules = json::array();
  for (const auto& r : system.rules()) rules.push_back({{"antecedent", r.antecedent}, {"consequent", r.consequent}});
  return {{"order", static_cast<int>(system.order())}, {"partitions", parts}, {"rules", rules}};
}

FuzzySystem fuzzy_system_from_json(const nlohmann::json& j) {
  try {
    const int order = j.at("order").get<int>();
    if (order != 0 && order != 1) throw FormatError("fuzzy system: order must be 0 or 1");
    std::vector<InputPartition> parts;
    for (const auto& pj : j.at("partitions")) {
      InputPartition p;
      for (const auto& mj : pj) {
        const auto kind = mj.at("kind").get<std::string>();
        const auto params = mj.at("params").get<std::vector<double>>();
        if (kind == "triangular" && params.size() == 3) {
          p.mfs.emplace_back(TriangularMF{params[0], params[1], params[2]});
        } else if (kind == "gaussian" && params.size() == 2) {
          p.mfs.emplace_back(GaussianMF{params[0], params[1]});
        } else {
          throw FormatError("fuzzy system: bad membership function '" + kind + "'");
        }
      }
      parts.push_back(std::move(p));
    }
    std::vector<TskRule> rules;
    for (const auto& rj : j.at("rules")) {
      rules.push_back({rj.at("antecedent").get<std::vector<std::size_t>>(),
                       rj.at("consequent").get<std::vector<double>>()});
    }
    return FuzzySystem(std::move(parts), std::move(rules), static_cast<TskOrder>(order));
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("fuzzy system: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw FormatError(std::string("fuzzy system: ") + e.what());
  }
}

}  // namespace gfs
