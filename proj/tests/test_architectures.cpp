#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "gfs/architectures.hpp"
#include "gfs/error.hpp"
#include "gfs/fcm.hpp"
#include "gfs/rng.hpp"

using namespace gfs;

namespace {

std::vector<double> random_genes(const Regressor& r, Rng& rng) {
  std::vector<double> genes(r.layout().total_length());
  r.initialize(rng, genes);
  return genes;
}

std::vector<double> random_point(std::size_t d, Rng& rng) {
  std::vector<double> x(d);
  for (auto& v : x) v = rng.uniform();
  return x;
}

Matrix random_centers(std::size_t c, std::size_t d, Rng& rng) {
  Matrix m(c, d);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = rng.uniform();
  return m;
}

double affine(std::span<const double> k, std::span<const double> x) {
  double y = k[x.size()];
  for (std::size_t j = 0; j < x.size(); ++j) y += k[j] * x[j];
  return y;
}

}  // namespace

TEST_CASE("brute-force structure") {
  const auto brute = build_brute();
  CHECK(brute->variant() == Variant::Brute);
  CHECK(brute->layout().total_length() == 18825);
  CHECK(brute->rule_count() == 3125);
  CHECK(brute->input_count() == 5);
  CHECK(build_brute(2, 3, TskOrder::One)->layout().total_length() == 45);
}

TEST_CASE("brute-force predict equals tsk_eval on the decoded system") {
  Rng rng(6);
  const auto brute = build_brute(3, 3, TskOrder::One, 0.5);
  for (int trial = 0; trial < 5; ++trial) {
    const auto genes = random_genes(*brute, rng);
    const auto systems = decode_systems(*brute, genes);
    REQUIRE(systems.size() == 1);
    for (int i = 0; i < 50; ++i) {
      const auto x = random_point(3, rng);
      const auto a = brute->predict(genes, x);
      const auto b = tsk_eval(systems[0], x, 0.5);
      CHECK(a.value == b.value);
      CHECK(a.covered == b.covered);
    }
  }
}

TEST_CASE("brute-force at partition vertices fires a single rule") {
  Rng rng(14);
  const std::size_t d = 3, m = 3;
  const auto brute = build_brute(d, m, TskOrder::One);
  // Exact uniform partition followed by random consequents.
  std::vector<double> genes(brute->layout().total_length());
  std::size_t g = 0;
  for (std::size_t in = 0; in < d; ++in) {
    for (const auto& mf : uniform_partition(m).mfs) {
      const auto& t = std::get<TriangularMF>(mf);
      genes[g++] = t.a;
      genes[g++] = t.b;
      genes[g++] = t.c;
    }
  }
  const auto bounds = brute->layout().bounds();
  for (; g < genes.size(); ++g) genes[g] = rng.uniform(bounds[g].lower, bounds[g].upper);
  const std::size_t mf_genes = d * m * 3;
  for (std::size_t rule = 0; rule < 27; ++rule) {
    const std::vector<std::size_t> radices(d, m);
    const auto t = grid_antecedent(rule, radices);
    std::vector<double> x(d);
    for (std::size_t j = 0; j < d; ++j) x[j] = static_cast<double>(t[j]) / (m - 1);
    const auto k = std::span<const double>(genes).subspan(mf_genes + rule * (d + 1), d + 1);
    const auto out = brute->predict(genes, x);
    CHECK(out.covered);
    CHECK(out.value == doctest::Approx(affine(k, x)).epsilon(1e-14));
  }
}

TEST_CASE("gft structure") {
  const auto small = build_gft(5, 3, TskOrder::Zero);
  CHECK(small->variant() == Variant::Gft);
  CHECK(small->rule_count() == 36);
  CHECK(small->layout().total_length() == 108);
  const auto large = build_gft(5, 5, TskOrder::One);
  CHECK(large->rule_count() == 100);
  CHECK(large->layout().total_length() == 420);
  CHECK(cascade_stages(*small, std::vector<double>(108)).size() == 4);
  CHECK_THROWS_AS(build_gft(1, 3), std::invalid_argument);
  CHECK_THROWS_AS(build_gft(5, 3, TskOrder::Zero, {0, 1, 2, 3}), std::invalid_argument);
  CHECK_THROWS_AS(build_gft(5, 3, TskOrder::Zero, {0, 1, 2, 3, 3}), std::invalid_argument);
}

TEST_CASE("gft with constant stage outputs propagates the constant") {
  const auto gft = build_gft(5, 3, TskOrder::Zero);
  Rng rng(2);
  auto genes = random_genes(*gft, rng);
  for (const auto& view : cascade_stages(*gft, genes)) {
    const auto offset = static_cast<std::size_t>(view.consequents.data() - genes.data());
    std::fill_n(genes.begin() + offset, view.consequents.size(), 0.4);
  }
  for (int i = 0; i < 100; ++i) {
    const auto out = gft->predict(genes, random_point(5, rng));
    CHECK(out.covered);
    CHECK(out.value == doctest::Approx(0.4).epsilon(1e-15));
  }
}

TEST_CASE("gft matches manual stage-by-stage evaluation") {
  Rng rng(10);
  for (TskOrder order : {TskOrder::Zero, TskOrder::One}) {
    for (std::size_t m : {3u, 5u}) {
      const std::vector<std::size_t> perm = {3, 0, 4, 1, 2};
      for (const auto& input_order : {std::vector<std::size_t>{}, perm}) {
        const auto gft = build_gft(5, m, order, input_order, 0.5);
        const GridEncoding stage{2, m, order};
        for (int trial = 0; trial < 5; ++trial) {
          const auto genes = random_genes(*gft, rng);
          const auto views = cascade_stages(*gft, genes);
          const auto systems = decode_systems(*gft, genes);
          REQUIRE(systems.size() == 4);
          for (int i = 0; i < 40; ++i) {
            const auto x = random_point(5, rng);
            const auto p = [&](std::size_t k) { return input_order.empty() ? k : input_order[k]; };
            double carry = x[p(0)];
            double y = 0;
            bool covered = true;
            for (std::size_t k = 0; k < 4; ++k) {
              std::vector<double> stage_genes(views[k].mf_genes.begin(), views[k].mf_genes.end());
              stage_genes.insert(stage_genes.end(), views[k].consequents.begin(), views[k].consequents.end());
              const FuzzySystem s = stage.decode(stage_genes);
              CHECK(s == systems[k]);
              const std::vector<double> in = {carry, x[p(k + 1)]};
              const auto out = tsk_eval(s, in, 0.5);
              covered = covered && out.covered;
              y = out.value;
              carry = std::clamp(y, 0.0, 1.0);
            }
            const auto got = gft->predict(genes, x);
            CHECK(std::abs(got.value - y) <= 1e-12);
            CHECK(got.covered == covered);
            CHECK(gft->predict(genes, x).value == got.value);
          }
        }
      }
    }
  }
}

TEST_CASE("clustered-gauss") {
  Rng rng(3);
  Matrix centers(15, 5);
  for (Eigen::Index i = 0; i < centers.size(); ++i) centers.data()[i] = rng.uniform();
  const auto gauss = build_clustered_gauss(centers);
  CHECK(gauss->variant() == Variant::ClusteredGauss);
  CHECK(gauss->layout().total_length() == 105);
  CHECK(gauss->rule_count() == 15);

  SUBCASE("a center with a narrow width dominates") {
    Matrix far(3, 2);
    far << 0.5, 0.5, -3, -3, 4, 4;
    const auto model = build_clustered_gauss(far, TskOrder::One);
    const std::vector<double> genes = {0.05, 0.05, 0.05, 1.5, -0.5, 0.2, -1, 1, 0.9, 2, 2, -1};
    const std::vector<double> x = {0.5, 0.5};
    const auto out = model->predict(genes, x);
    CHECK(out.covered);
    CHECK(std::abs(out.value - (1.5 * 0.5 - 0.5 * 0.5 + 0.2)) <= 1e-6);
  }

  SUBCASE("zero consequents predict zero") {
    auto genes = random_genes(*gauss, rng);
    std::fill(genes.begin() + 15, genes.end(), 0.0);
    for (int i = 0; i < 50; ++i) {
      const auto out = gauss->predict(genes, random_point(5, rng));
      if (out.covered) CHECK(out.value == 0.0);
    }
  }

  SUBCASE("far from every center falls back") {
    Matrix one(1, 1);
    one << 0.0;
    const auto model = build_clustered_gauss(one, TskOrder::Zero, 0.33);
    const std::vector<double> genes = {0.01, 0.8};
    const auto out = model->predict(genes, std::vector<double>{1.0});
    CHECK_FALSE(out.covered);
    CHECK(out.value == 0.33);
  }

  CHECK_THROWS_AS(build_clustered_gauss(Matrix(0, 5)), std::invalid_argument);
}

TEST_CASE("clustered-fcm") {
  Rng rng(4);
  const Matrix centers = random_centers(15, 5, rng);
  const auto fcm = build_clustered_fcm(centers);
  CHECK(fcm->variant() == Variant::ClusteredFcm);
  CHECK(fcm->layout().total_length() == 90);
  CHECK_THROWS_AS(build_clustered_fcm(centers, 1.0), std::invalid_argument);

  const auto genes = random_genes(*fcm, rng);
  SUBCASE("a center predicts its own affine consequent exactly") {
    for (Eigen::Index k = 0; k < 15; ++k) {
      const std::vector<double> x(centers.row(k).data(), centers.row(k).data() + 5);
      const auto kk = std::span<const double>(genes).subspan(k * 6, 6);
      CHECK(fcm->predict(genes, x).value == affine(kk, x));
    }
  }

  SUBCASE("activations sum to one and output is a convex combination") {
    for (int i = 0; i < 100; ++i) {
      const auto x = random_point(5, rng);
      const auto act = cluster_activations(*fcm, genes, x);
      double sum = 0;
      for (double a : act) sum += a;
      CHECK(std::abs(sum - 1.0) <= 1e-12);
      double lo = INFINITY, hi = -INFINITY;
      for (std::size_t k = 0; k < 15; ++k) {
        const double v = affine(std::span<const double>(genes).subspan(k * 6, 6), x);
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
      const auto out = fcm->predict(genes, x);
      CHECK(out.covered);
      CHECK(out.value >= lo - 1e-12);
      CHECK(out.value <= hi + 1e-12);
    }
  }

  SUBCASE("one cluster is a plain affine model") {
    Matrix one(1, 5);
    one.setConstant(0.5);
    const auto single = build_clustered_fcm(one);
    const std::vector<double> k = {0.1, -0.2, 0.3, 0.4, -0.5, 0.6};
    for (int i = 0; i < 20; ++i) {
      const auto x = random_point(5, rng);
      CHECK(single->predict(k, x).value == affine(k, x));
    }
  }
}

TEST_CASE("parameter counts agree with layouts for every variant") {
  Rng rng(5);
  for (std::size_t d = 1; d <= 5; ++d) {
    for (std::size_t m : {2u, 3u, 5u}) {
      for (TskOrder order : {TskOrder::Zero, TskOrder::One}) {
        CHECK(build_brute(d, m, order)->layout().total_length() == param_count({Variant::Brute, d, m, order, 0}));
        if (d >= 2) {
          CHECK(build_gft(d, m, order)->layout().total_length() == param_count({Variant::Gft, d, m, order, 0}));
        }
        for (std::size_t c : {1u, 4u, 15u}) {
          const Matrix centers = random_centers(c, d, rng);
          CHECK(build_clustered_gauss(centers, order)->layout().total_length() ==
                param_count({Variant::ClusteredGauss, d, m, order, c}));
          CHECK(build_clustered_fcm(centers, 2.0, order)->layout().total_length() ==
                param_count({Variant::ClusteredFcm, d, m, order, c}));
        }
      }
    }
  }
}

TEST_CASE("bound evaluators match point predictions") {
  Rng rng(12);
  Matrix inputs(64, 5);
  for (Eigen::Index i = 0; i < inputs.size(); ++i) inputs.data()[i] = rng.uniform();
  const Matrix centers = random_centers(6, 5, rng);
  std::vector<std::unique_ptr<Regressor>> models;
  models.push_back(build_brute(5, 2, TskOrder::One));
  models.push_back(build_gft(5, 3, TskOrder::Zero));
  models.push_back(build_clustered_gauss(centers));
  models.push_back(build_clustered_fcm(centers));
  for (const auto& model : models) {
    const auto genes = random_genes(*model, rng);
    const auto eval = model->bind(inputs);
    REQUIRE(eval->rows() == 64);
    std::vector<Prediction> bound(64), batch(64);
    eval->predict(genes, bound);
    model->predict_batch(genes, inputs, batch);
    for (Eigen::Index i = 0; i < 64; ++i) {
      const auto single = model->predict(genes, row_span(inputs, i));
      CHECK(bound[i].value == single.value);
      CHECK(batch[i].value == single.value);
      CHECK(bound[i].covered == single.covered);
      CHECK(std::isfinite(single.value));
    }
    CHECK_THROWS_AS(model->predict(std::vector<double>(3), row_span(inputs, 0)), std::invalid_argument);
    CHECK_THROWS_AS(model->predict(genes, std::vector<double>(4)), std::invalid_argument);
  }
}

TEST_CASE("regressor structure JSON round trip") {
  Rng rng(15);
  const Matrix centers = random_centers(4, 5, rng);
  std::vector<std::unique_ptr<Regressor>> models;
  models.push_back(build_brute(2, 3, TskOrder::Zero, 0.125));
  models.push_back(build_gft(5, 3, TskOrder::One, {4, 3, 2, 1, 0}, 0.3));
  models.push_back(build_clustered_gauss(centers, TskOrder::One, 0.7));
  models.push_back(build_clustered_fcm(centers, 1.7, TskOrder::Zero, 0.1));
  for (const auto& model : models) {
    const auto back = regressor_from_json(nlohmann::json::parse(model->to_json().dump()));
    CHECK(back->variant() == model->variant());
    CHECK(back->fallback() == model->fallback());
    CHECK(back->describe() == model->describe());
    const auto genes = random_genes(*model, rng);
    for (int i = 0; i < 20; ++i) {
      const auto x = random_point(model->input_count(), rng);
      CHECK(back->predict(genes, x).value == model->predict(genes, x).value);
    }
  }
  CHECK_THROWS_AS(regressor_from_json(nlohmann::json{{"variant", "anfis"}}), FormatError);
  CHECK_THROWS_AS(regressor_from_json(nlohmann::json::array()), FormatError);
}

TEST_CASE("describe mentions counts") {
  CHECK(build_brute()->describe().find("18825") != std::string::npos);
  CHECK(build_gft(5, 5, TskOrder::One)->describe().find("100") != std::string::npos);
}
