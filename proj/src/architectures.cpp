#include "gfs/architectures.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "gfs/error.hpp"
#include "gfs/fcm.hpp"

namespace gfs {

void Regressor::check_lengths(std::span<const double> genes, std::size_t x_size) const {
  if (genes.size() != layout_.total_length()) {
    throw std::invalid_argument("predict: expected " + std::to_string(layout_.total_length()) + " genes, got " +
                                std::to_string(genes.size()));
  }
  if (x_size != input_count()) {
    throw std::invalid_argument("predict: expected " + std::to_string(input_count()) + " inputs, got " +
                                std::to_string(x_size));
  }
}

void Regressor::predict_batch(std::span<const double> genes, const Matrix& inputs, std::span<Prediction> out) const {
  if (out.size() != static_cast<std::size_t>(inputs.rows())) throw std::invalid_argument("predict_batch: size mismatch");
  for (Eigen::Index i = 0; i < inputs.rows(); ++i) out[static_cast<std::size_t>(i)] = predict(genes, row_span(inputs, i));
}

namespace {

class RowEvaluator final : public BoundEvaluator {
 public:
  RowEvaluator(const Regressor& r, const Matrix& inputs) : regressor_(r), inputs_(inputs) {}
  std::size_t rows() const override { return static_cast<std::size_t>(inputs_.rows()); }
  void predict(std::span<const double> genes, std::span<Prediction> out) const override {
    regressor_.predict_batch(genes, inputs_, out);
  }

 private:
  const Regressor& regressor_;
  Matrix inputs_;
};

}  // namespace

std::unique_ptr<BoundEvaluator> Regressor::bind(const Matrix& inputs) const {
  return std::make_unique<RowEvaluator>(*this, inputs);
}

void Regressor::initialize(Rng& rng, std::span<double> genes) const { initialize_genes(layout_, rng, genes); }

namespace {

constexpr std::size_t kMaxTriangles = 16 * 16;

// Triangles of a grid system, sorted the same way GenomeLayout::repair
// orders them.
struct TriangleBlock {
  std::array<TriangularMF, kMaxTriangles> mfs{};
  std::size_t count = 0;
  std::span<const TriangularMF> view() const { return {mfs.data(), count}; }
};

TriangleBlock sorted_triangles(std::span<const double> genes, std::size_t per_input) {
  TriangleBlock block;
  block.count = genes.size() / 3;
  if (block.count > kMaxTriangles) throw std::invalid_argument("too many membership functions");
  for (std::size_t k = 0; k < block.count; ++k) {
    std::array<double, 3> t = {genes[3 * k], genes[3 * k + 1], genes[3 * k + 2]};
    std::sort(t.begin(), t.end());
    block.mfs[k] = {t[0], t[1], t[2]};
  }
  for (std::size_t base = 0; base < block.count; base += per_input) {
    std::stable_sort(block.mfs.begin() + static_cast<std::ptrdiff_t>(base),
                     block.mfs.begin() + static_cast<std::ptrdiff_t>(base + per_input),
                     [](const TriangularMF& l, const TriangularMF& r) {
                       if (l.b != r.b) return l.b < r.b;
                       if (l.a != r.a) return l.a < r.a;
                       return l.c < r.c;
                     });
  }
  return block;
}

std::string order_name(TskOrder o) { return o == TskOrder::Zero ? "0" : "1"; }

class GridRegressor final : public Regressor {
 public:
  GridRegressor(GridEncoding enc, double fallback)
      : Regressor(enc.layout(), fallback), enc_(enc) {}

  Variant variant() const override { return Variant::Brute; }
  std::size_t input_count() const override { return enc_.inputs; }
  std::size_t rule_count() const override { return enc_.rule_count(); }
  const GridEncoding& encoding() const { return enc_; }

  Prediction predict(std::span<const double> genes, std::span<const double> x) const override {
    check_lengths(genes, x.size());
    const auto mfs = sorted_triangles(genes.first(enc_.mf_gene_count()), enc_.mfs);
    return eval(mfs, genes, x);
  }

  void predict_batch(std::span<const double> genes, const Matrix& inputs, std::span<Prediction> out) const override {
    check_lengths(genes, static_cast<std::size_t>(inputs.cols()));
    if (out.size() != static_cast<std::size_t>(inputs.rows())) throw std::invalid_argument("predict_batch: size mismatch");
    const auto mfs = sorted_triangles(genes.first(enc_.mf_gene_count()), enc_.mfs);
    for (Eigen::Index i = 0; i < inputs.rows(); ++i) out[static_cast<std::size_t>(i)] = eval(mfs, genes, row_span(inputs, i));
  }

  nlohmann::json to_json() const override {
    return {{"variant", variant_name(variant())},
            {"inputs", enc_.inputs},
            {"mfs", enc_.mfs},
            {"order", static_cast<int>(enc_.order)},
            {"fallback", fallback()}};
  }

  std::string describe() const override {
    std::ostringstream os;
    os << "variant: brute (full-grid TSK, order " << order_name(enc_.order) << ")\n"
       << "inputs: " << enc_.inputs << ", triangular MFs per input: " << enc_.mfs << "\n"
       << "rules: " << enc_.rule_count() << "\n"
       << "parameters: " << layout().total_length() << " (" << enc_.mf_gene_count() << " MF + "
       << layout().total_length() - enc_.mf_gene_count() << " consequent)\n";
    return os.str();
  }

 private:
  Prediction eval(const TriangleBlock& mfs, std::span<const double> genes, std::span<const double> x) const {
    const auto out = grid_eval(mfs.view(), enc_.mfs, genes.subspan(enc_.mf_gene_count()), enc_.order, x, fallback());
    return {out.value, out.covered};
  }

  GridEncoding enc_;
};

class CascadeRegressor final : public Regressor {
 public:
  CascadeRegressor(std::size_t inputs, std::size_t mfs, TskOrder order, std::vector<std::size_t> input_order,
                   double fallback)
      : Regressor(make_layout(inputs, mfs, order), fallback),
        inputs_(inputs),
        stage_{2, mfs, order},
        input_order_(std::move(input_order)) {}

  static GenomeLayout make_layout(std::size_t inputs, std::size_t mfs, TskOrder order) {
    if (inputs < 2) throw std::invalid_argument("build_gft: need at least 2 inputs");
    const GenomeLayout stage = GridEncoding{2, mfs, order}.layout();
    GenomeLayout layout;
    for (std::size_t k = 0; k + 1 < inputs; ++k) layout.append(stage, "stage" + std::to_string(k + 1) + "/");
    return layout;
  }

  Variant variant() const override { return Variant::Gft; }
  std::size_t input_count() const override { return inputs_; }
  std::size_t rule_count() const override { return stage_count() * stage_.rule_count(); }
  std::size_t stage_count() const { return inputs_ - 1; }
  std::size_t stage_length() const { return layout().total_length() / stage_count(); }
  const GridEncoding& stage_encoding() const { return stage_; }
  const std::vector<std::size_t>& input_order() const { return input_order_; }

  Prediction predict(std::span<const double> genes, std::span<const double> x) const override {
    check_lengths(genes, x.size());
    const std::size_t len = stage_length();
    const std::size_t mf_len = stage_.mf_gene_count();
    bool covered = true;
    double carry = x[input_order_[0]];
    double value = 0.0;
    for (std::size_t k = 0; k < stage_count(); ++k) {
      const auto stage_genes = genes.subspan(k * len, len);
      const auto mfs = sorted_triangles(stage_genes.first(mf_len), stage_.mfs);
      const std::array<double, 2> pair = {carry, x[input_order_[k + 1]]};
      const auto out = grid_eval(mfs.view(), stage_.mfs, stage_genes.subspan(mf_len), stage_.order, pair, fallback());
      covered = covered && out.covered;
      value = out.value;
      carry = std::clamp(value, 0.0, 1.0);
    }
    return {value, covered};
  }

  nlohmann::json to_json() const override {
    return {{"variant", variant_name(variant())},
            {"inputs", inputs_},
            {"mfs", stage_.mfs},
            {"order", static_cast<int>(stage_.order)},
            {"input_order", input_order_},
            {"fallback", fallback()}};
  }

  std::string describe() const override {
    std::ostringstream os;
    os << "variant: gft (cascade of 2-input TSK systems, order " << order_name(stage_.order) << ")\n"
       << "inputs: " << inputs_ << ", triangular MFs per stage input: " << stage_.mfs << "\n"
       << "stages: " << stage_count() << " (" << stage_.rule_count() << " rules, " << stage_length()
       << " parameters each)\n";
    for (std::size_t k = 0; k < stage_count(); ++k) {
      os << "  stage " << k + 1 << ": ";
      if (k == 0) {
        os << "x" << input_order_[0];
      } else {
        os << "stage " << k;
      }
      os << ", x" << input_order_[k + 1] << "\n";
    }
    os << "rules: " << rule_count() << "\n"
       << "parameters: " << layout().total_length() << "\n";
    return os.str();
  }

 private:
  std::size_t inputs_;
  GridEncoding stage_;
  std::vector<std::size_t> input_order_;
};

enum class Activation { Gaussian, Fcm };

constexpr GeneBounds kSigmaBounds{0.01, 2.0};

class ClusteredRegressor final : public Regressor {
 public:
  ClusteredRegressor(Matrix centers, Activation activation, double fuzzifier, TskOrder order, double fallback)
      : Regressor(make_layout(centers, activation, order), fallback),
        centers_(std::move(centers)),
        activation_(activation),
        fuzzifier_(fuzzifier),
        order_(order) {
    if (activation_ == Activation::Fcm && !(fuzzifier_ > 1.0)) {
      throw std::invalid_argument("build_clustered_fcm: fuzzifier must exceed 1");
    }
  }

  static GenomeLayout make_layout(const Matrix& centers, Activation activation, TskOrder order) {
    if (centers.rows() == 0 || centers.cols() == 0) throw std::invalid_argument("clustered model: no centers");
    for (Eigen::Index i = 0; i < centers.size(); ++i) {
      if (!std::isfinite(centers.data()[i])) throw std::invalid_argument("clustered model: non-finite center");
    }
    const auto c = static_cast<std::size_t>(centers.rows());
    const auto d = static_cast<std::size_t>(centers.cols());
    GenomeLayout layout;
    if (activation == Activation::Gaussian) layout.add("sigma", c, kSigmaBounds);
    const auto per_rule = consequent_bounds(order, d);
    std::vector<GeneBounds> all;
    for (std::size_t k = 0; k < c; ++k) all.insert(all.end(), per_rule.begin(), per_rule.end());
    layout.add("consequents", all);
    return layout;
  }

  Variant variant() const override {
    return activation_ == Activation::Gaussian ? Variant::ClusteredGauss : Variant::ClusteredFcm;
  }
  std::size_t input_count() const override { return static_cast<std::size_t>(centers_.cols()); }
  std::size_t rule_count() const override { return clusters(); }
  std::size_t clusters() const { return static_cast<std::size_t>(centers_.rows()); }
  const Matrix& centers() const { return centers_; }
  double fuzzifier() const { return fuzzifier_; }
  TskOrder order() const { return order_; }
  std::size_t sigma_count() const { return activation_ == Activation::Gaussian ? clusters() : 0; }

  // Per-row quantity that depends only on x: squared distances for the
  // Gaussian variant, memberships for the FCM variant.
  void precompute(std::span<const double> x, std::span<double> out) const {
    if (activation_ == Activation::Fcm) {
      fcm_membership(x, centers_, fuzzifier_, out);
      return;
    }
    for (std::size_t k = 0; k < clusters(); ++k) {
      double d2 = 0.0;
      for (std::size_t j = 0; j < x.size(); ++j) {
        const double diff = x[j] - centers_(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(j));
        d2 += diff * diff;
      }
      out[k] = d2;
    }
  }

  void activations(std::span<const double> genes, std::span<const double> pre, std::span<double> act) const {
    if (activation_ == Activation::Fcm) {
      std::copy(pre.begin(), pre.end(), act.begin());
      return;
    }
    for (std::size_t k = 0; k < clusters(); ++k) {
      const double sigma = genes[k];
      act[k] = std::exp(-pre[k] / (2.0 * sigma * sigma));
    }
  }

  Activation activation() const { return activation_; }

  Prediction combine(std::span<const double> genes, std::span<const double> pre, std::span<const double> x,
                     std::span<double> scratch) const {
    activations(genes, pre, scratch);
    const std::size_t arity = consequent_arity(order_, x.size());
    const auto consequents = genes.subspan(sigma_count());
    double num = 0.0;
    double den = 0.0;
    // Same operation order as ClusteredEvaluator, which relies on it for
    // bit-identical results.
    for (std::size_t k = 0; k < clusters(); ++k) {
      num += scratch[k] * consequent_value(consequents.subspan(k * arity, arity), order_, x);
      den += scratch[k];
    }
    if (activation_ == Activation::Fcm) return {num, true};
    if (den < kCoverageEpsilon) return {fallback(), false};
    return {num / den, true};
  }

  Prediction predict(std::span<const double> genes, std::span<const double> x) const override {
    check_lengths(genes, x.size());
    std::vector<double> pre(clusters()), scratch(clusters());
    precompute(x, pre);
    return combine(genes, pre, x, scratch);
  }

  std::unique_ptr<BoundEvaluator> bind(const Matrix& inputs) const override;

  nlohmann::json to_json() const override {
    nlohmann::json centers = nlohmann::json::array();
    for (Eigen::Index k = 0; k < centers_.rows(); ++k) {
      const auto r = row_span(centers_, k);
      centers.push_back(std::vector<double>(r.begin(), r.end()));
    }
    nlohmann::json j = {{"variant", variant_name(variant())},
                        {"inputs", input_count()},
                        {"order", static_cast<int>(order_)},
                        {"centers", centers},
                        {"fallback", fallback()}};
    if (activation_ == Activation::Fcm) j["fuzzifier"] = fuzzifier_;
    return j;
  }

  std::string describe() const override {
    std::ostringstream os;
    if (activation_ == Activation::Gaussian) {
      os << "variant: clustered-gauss (Gaussian activation on cluster centers, order " << order_name(order_) << ")\n";
    } else {
      os << "variant: clustered-fcm (FCM membership activation, m = " << fuzzifier_ << ", order "
         << order_name(order_) << ")\n";
    }
    os << "inputs: " << input_count() << "\n"
       << "clusters (rules): " << clusters() << "\n"
       << "parameters: " << layout().total_length();
    if (sigma_count()) os << " (" << sigma_count() << " sigma + " << layout().total_length() - sigma_count() << " consequent)";
    os << "\n";
    return os.str();
  }

 private:
  Matrix centers_;
  Activation activation_;
  double fuzzifier_;
  TskOrder order_;
};

// Evaluates all rows cluster by cluster with rows in the inner loop, so
// the compiler can vectorize across rows. Each row still sees exactly the
// scalar sequence of operations in ClusteredRegressor::combine.
class ClusteredEvaluator final : public BoundEvaluator {
 public:
  ClusteredEvaluator(const ClusteredRegressor& r, const Matrix& inputs)
      : regressor_(r), xt_(inputs.transpose()), pre_(static_cast<Eigen::Index>(r.clusters()), inputs.rows()) {
    if (static_cast<std::size_t>(inputs.cols()) != r.input_count()) throw std::invalid_argument("bind: dimension mismatch");
    std::vector<double> row(r.clusters());
    for (Eigen::Index i = 0; i < inputs.rows(); ++i) {
      regressor_.precompute(row_span(inputs, i), row);
      for (std::size_t k = 0; k < row.size(); ++k) pre_(static_cast<Eigen::Index>(k), i) = row[k];
    }
  }

  std::size_t rows() const override { return static_cast<std::size_t>(xt_.cols()); }

  void predict(std::span<const double> genes, std::span<Prediction> out) const override {
    if (genes.size() != regressor_.layout().total_length()) throw std::invalid_argument("predict: gene length mismatch");
    if (out.size() != rows()) throw std::invalid_argument("predict: size mismatch");
    const std::size_t n = rows();
    const std::size_t d = regressor_.input_count();
    const TskOrder order = regressor_.order();
    const std::size_t arity = consequent_arity(order, d);
    const bool gaussian = regressor_.activation() == Activation::Gaussian;
    const auto consequents = genes.subspan(regressor_.sigma_count());
    std::vector<double> num(n, 0.0), den(n, 0.0), act(n), val(n);
    for (std::size_t k = 0; k < regressor_.clusters(); ++k) {
      const double* pre = pre_.data() + k * n;
      if (gaussian) {
        const double sigma = genes[k];
        const double two_s2 = 2.0 * sigma * sigma;
        for (std::size_t i = 0; i < n; ++i) act[i] = std::exp(-pre[i] / two_s2);
      } else {
        std::copy(pre, pre + n, act.begin());
      }
      const double* coef = consequents.data() + k * arity;
      if (order == TskOrder::Zero) {
        std::fill(val.begin(), val.end(), coef[0]);
      } else {
        std::fill(val.begin(), val.end(), coef[d]);
        for (std::size_t j = 0; j < d; ++j) {
          const double* xj = xt_.data() + j * n;
          const double cj = coef[j];
          for (std::size_t i = 0; i < n; ++i) val[i] += cj * xj[i];
        }
      }
      for (std::size_t i = 0; i < n; ++i) {
        num[i] += act[i] * val[i];
        den[i] += act[i];
      }
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (!gaussian) {
        out[i] = {num[i], true};
      } else if (den[i] < kCoverageEpsilon) {
        out[i] = {regressor_.fallback(), false};
      } else {
        out[i] = {num[i] / den[i], true};
      }
    }
  }

 private:
  const ClusteredRegressor& regressor_;
  Matrix xt_;   // d x n
  Matrix pre_;  // c x n
};

std::unique_ptr<BoundEvaluator> ClusteredRegressor::bind(const Matrix& inputs) const {
  return std::make_unique<ClusteredEvaluator>(*this, inputs);
}

std::vector<std::size_t> identity_order(std::size_t n) {
  std::vector<std::size_t> v(n);
  std::iota(v.begin(), v.end(), 0);
  return v;
}

}  // namespace

std::unique_ptr<Regressor> build_brute(std::size_t inputs, std::size_t mfs, TskOrder order, double fallback) {
  return std::make_unique<GridRegressor>(GridEncoding{inputs, mfs, order}, fallback);
}

std::unique_ptr<Regressor> build_gft(std::size_t inputs, std::size_t mfs, TskOrder order,
                                     std::vector<std::size_t> input_order, double fallback) {
  if (input_order.empty()) input_order = identity_order(inputs);
  auto sorted = input_order;
  std::sort(sorted.begin(), sorted.end());
  if (sorted != identity_order(inputs)) throw std::invalid_argument("build_gft: input_order must permute 0..d-1");
  return std::make_unique<CascadeRegressor>(inputs, mfs, order, std::move(input_order), fallback);
}

std::unique_ptr<Regressor> build_clustered_gauss(Matrix centers, TskOrder order, double fallback) {
  return std::make_unique<ClusteredRegressor>(std::move(centers), Activation::Gaussian, 2.0, order, fallback);
}

std::unique_ptr<Regressor> build_clustered_fcm(Matrix centers, double fuzzifier, TskOrder order, double fallback) {
  return std::make_unique<ClusteredRegressor>(std::move(centers), Activation::Fcm, fuzzifier, order, fallback);
}

std::unique_ptr<Regressor> regressor_from_json(const nlohmann::json& j) {
  try {
    const Variant v = parse_variant(j.at("variant").get<std::string>());
    const int order_int = j.at("order").get<int>();
    if (order_int != 0 && order_int != 1) throw FormatError("regressor: order must be 0 or 1");
    const auto order = static_cast<TskOrder>(order_int);
    const double fallback = j.at("fallback").get<double>();
    switch (v) {
      case Variant::Brute:
        return build_brute(j.at("inputs").get<std::size_t>(), j.at("mfs").get<std::size_t>(), order, fallback);
      case Variant::Gft:
        return build_gft(j.at("inputs").get<std::size_t>(), j.at("mfs").get<std::size_t>(), order,
                         j.at("input_order").get<std::vector<std::size_t>>(), fallback);
      case Variant::ClusteredGauss:
      case Variant::ClusteredFcm: {
        const auto rows = j.at("centers").get<std::vector<std::vector<double>>>();
        const std::size_t d = j.at("inputs").get<std::size_t>();
        Matrix centers(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(d));
        for (std::size_t k = 0; k < rows.size(); ++k) {
          if (rows[k].size() != d) throw FormatError("regressor: center dimension mismatch");
          for (std::size_t q = 0; q < d; ++q) centers(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(q)) = rows[k][q];
        }
        if (v == Variant::ClusteredGauss) return build_clustered_gauss(std::move(centers), order, fallback);
        return build_clustered_fcm(std::move(centers), j.at("fuzzifier").get<double>(), order, fallback);
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("regressor: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw FormatError(std::string("regressor: ") + e.what());
  }
  throw FormatError("regressor: unknown variant");
}

std::vector<CascadeStageView> cascade_stages(const Regressor& gft, std::span<const double> genes) {
  const auto* c = dynamic_cast<const CascadeRegressor*>(&gft);
  if (!c) throw std::invalid_argument("cascade_stages: not a cascade regressor");
  if (genes.size() != gft.layout().total_length()) throw std::invalid_argument("cascade_stages: gene length mismatch");
  std::vector<CascadeStageView> out;
  const std::size_t len = c->stage_length();
  const std::size_t mf_len = c->stage_encoding().mf_gene_count();
  for (std::size_t k = 0; k < c->stage_count(); ++k) {
    const auto g = genes.subspan(k * len, len);
    out.push_back({g.first(mf_len), g.subspan(mf_len)});
  }
  return out;
}

std::vector<FuzzySystem> decode_systems(const Regressor& regressor, std::span<const double> genes) {
  if (const auto* g = dynamic_cast<const GridRegressor*>(&regressor)) return {g->encoding().decode(genes)};
  if (const auto* c = dynamic_cast<const CascadeRegressor*>(&regressor)) {
    std::vector<FuzzySystem> out;
    const std::size_t len = c->stage_length();
    for (std::size_t k = 0; k < c->stage_count(); ++k) {
      out.push_back(c->stage_encoding().decode(genes.subspan(k * len, len)));
    }
    return out;
  }
  return {};
}

std::vector<double> cluster_activations(const Regressor& clustered, std::span<const double> genes,
                                        std::span<const double> x) {
  const auto* c = dynamic_cast<const ClusteredRegressor*>(&clustered);
  if (!c) throw std::invalid_argument("cluster_activations: not a clustered regressor");
  if (genes.size() != clustered.layout().total_length() || x.size() != c->input_count()) {
    throw std::invalid_argument("cluster_activations: length mismatch");
  }
  std::vector<double> pre(c->clusters()), act(c->clusters());
  c->precompute(x, pre);
  c->activations(genes, pre, act);
  return act;
}

FitResult evaluate_fitness(const BoundEvaluator& evaluator, std::span<const double> genes,
                           std::span<const double> targets) {
  if (targets.size() != evaluator.rows()) throw std::invalid_argument("evaluate_fitness: target count mismatch");
  std::vector<Prediction> pred(targets.size());
  evaluator.predict(genes, pred);
  FitResult r;
  double sse = 0.0;
  for (std::size_t i = 0; i < targets.size(); ++i) {
    const double e = pred[i].value - targets[i];
    sse += e * e;
    r.uncovered += !pred[i].covered;
  }
  r.fitness = -std::sqrt(sse / static_cast<double>(targets.size()));
  return r;
}

}  // namespace gfs
