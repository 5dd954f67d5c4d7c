#include <doctest.h>

#include <cmath>
#include <vector>

#include "gfs/genome.hpp"
#include "gfs/rng.hpp"

using namespace gfs;

namespace {

std::size_t ipow(std::size_t b, std::size_t e) {
  std::size_t r = 1;
  while (e-- > 0) r *= b;
  return r;
}

}  // namespace

TEST_CASE("parameter counts") {
  CHECK(param_count({Variant::Brute, 5, 5, TskOrder::One, 0}) == 18825);
  CHECK(param_count({Variant::ClusteredFcm, 5, 0, TskOrder::One, 15}) == 90);
  CHECK(param_count({Variant::Brute, 2, 2, TskOrder::Zero, 0}) == 16);
  CHECK(param_count({Variant::ClusteredGauss, 5, 0, TskOrder::One, 15}) == 105);
  // 4 stages of 9 rules and 6 triangles each
  CHECK(param_count({Variant::Gft, 5, 3, TskOrder::Zero, 0}) == 4 * (9 + 18));
  CHECK(GridEncoding{5, 5, TskOrder::One}.layout().total_length() == 18825);
}

TEST_CASE("param_count matches the encoded length for every grid shape") {
  Rng rng(1);
  for (std::size_t d = 1; d <= 5; ++d) {
    for (std::size_t m : {2u, 3u, 5u}) {
      for (TskOrder order : {TskOrder::Zero, TskOrder::One}) {
        const GridEncoding enc{d, m, order};
        const std::size_t expected = ipow(m, d) * consequent_arity(order, d) + 3 * d * m;
        CHECK(param_count({Variant::Brute, d, m, order, 0}) == expected);
        const GenomeLayout layout = enc.layout();
        REQUIRE(layout.total_length() == expected);
        std::vector<double> genes(expected);
        initialize_genes(layout, rng, genes);
        CHECK(enc.encode(enc.decode(genes)).genes.size() == expected);
      }
    }
  }
}

TEST_CASE("layout segments are contiguous") {
  const GenomeLayout layout = GridEncoding{3, 3, TskOrder::One}.layout();
  std::size_t offset = 0;
  for (const auto& s : layout.segments()) {
    CHECK(s.offset == offset);
    offset += s.length;
  }
  CHECK(offset == layout.total_length());
  CHECK_THROWS_AS(layout.segment("nope"), std::out_of_range);

  GenomeLayout outer;
  outer.add("sigma", 4, {0.01, 2});
  outer.append(layout, "inner/");
  CHECK(outer.total_length() == 4 + layout.total_length());
  CHECK(outer.segment("inner/" + layout.segments()[0].name).offset == 4);
}

TEST_CASE("encode and decode round trip") {
  Rng rng(99);
  for (TskOrder order : {TskOrder::Zero, TskOrder::One}) {
    const GridEncoding enc{2, 3, order};
    std::vector<double> genes(enc.layout().total_length());
    initialize_genes(enc.layout(), rng, genes, 0.3);
    const FuzzySystem s = enc.decode(genes);
    const Chromosome c = enc.encode(s);
    CHECK(c.genes == genes);
    CHECK_FALSE(c.fitness.has_value());
    CHECK(enc.decode(c.genes) == s);
  }
  const GridEncoding enc{2, 2, TskOrder::Zero};
  CHECK_THROWS_AS(enc.decode(std::vector<double>(15)), std::invalid_argument);
  const GridEncoding other{2, 3, TskOrder::Zero};
  std::vector<double> genes(other.layout().total_length(), 0.5);
  CHECK_THROWS_AS(enc.encode(other.decode(genes)), std::invalid_argument);
}

TEST_CASE("sort-repair of triangle triples") {
  const GridEncoding enc{1, 2, TskOrder::Zero};
  std::vector<double> genes = {0.0, 0.0, 1.0, 0.9, 0.1, 0.5, 0.3, 0.6};
  const FuzzySystem s = enc.decode(genes);
  const auto& mfs = s.partitions()[0].mfs;
  CHECK(std::get<TriangularMF>(mfs[0]) == TriangularMF{0.0, 0.0, 1.0});
  CHECK(std::get<TriangularMF>(mfs[1]) == TriangularMF{0.1, 0.5, 0.9});

  // Triples of one input end up ordered by peak.
  std::vector<double> swapped = {0.1, 0.7, 0.9, 0.0, 0.2, 0.4, 0.3, 0.6};
  enc.layout().repair(swapped);
  CHECK(swapped == std::vector<double>{0.0, 0.2, 0.4, 0.1, 0.7, 0.9, 0.3, 0.6});
}

TEST_CASE("repair clamps, is idempotent and leaves valid genes alone") {
  Rng rng(4);
  const GenomeLayout layout = GridEncoding{3, 3, TskOrder::One}.layout();
  const auto& bounds = layout.bounds();
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> genes(layout.total_length());
    for (std::size_t i = 0; i < genes.size(); ++i) genes[i] = rng.uniform(bounds[i].lower - 1, bounds[i].upper + 1);
    layout.repair(genes);
    CHECK(layout.within_bounds(genes));
    auto again = genes;
    layout.repair(again);
    CHECK(again == genes);
  }
  CHECK_FALSE(layout.within_bounds(std::vector<double>(3)));
}

TEST_CASE("consequent bounds") {
  const auto zero = consequent_bounds(TskOrder::Zero, 5);
  REQUIRE(zero.size() == 1);
  CHECK(zero[0].lower == 0.0);
  CHECK(zero[0].upper == 1.0);
  const auto one = consequent_bounds(TskOrder::One, 2);
  REQUIRE(one.size() == 3);
  CHECK(one[0].lower == -2.0);
  CHECK(one[1].upper == 2.0);
  CHECK(one[2].lower == -1.0);
  CHECK(one[2].upper == 2.0);
}

TEST_CASE("initial genes cover the input space") {
  Rng rng(13);
  const GridEncoding enc{2, 5, TskOrder::Zero};
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> genes(enc.layout().total_length());
    initialize_genes(enc.layout(), rng, genes);
    CHECK(enc.layout().within_bounds(genes));
    const auto tris = triangles_from_genes(std::span<const double>(genes).first(enc.mf_gene_count()));
    for (int i = 0; i <= 200; ++i) {
      const double x = i / 200.0;
      for (std::size_t in = 0; in < 2; ++in) {
        double sum = 0;
        for (std::size_t k = 0; k < 5; ++k) sum += triangle_degree(tris[in * 5 + k], x);
        CHECK(sum > 0.0);
      }
    }
  }
}

TEST_CASE("GaConfig validation") {
  GaConfig c;
  CHECK_NOTHROW(c.validate());
  CHECK(c.effective_mutation_rate(200) == doctest::Approx(0.005));
  c.mutation_rate = 0.2;
  CHECK(c.effective_mutation_rate(200) == 0.2);

  auto bad = [](auto mutate) {
    GaConfig g;
    mutate(g);
    CHECK_THROWS_AS(g.validate(), std::invalid_argument);
  };
  bad([](GaConfig& g) { g.population_size = 1; });
  bad([](GaConfig& g) { g.elite_count = 0; });
  bad([](GaConfig& g) { g.elite_count = 50; });
  bad([](GaConfig& g) { g.crossover_rate = 1.5; });
  bad([](GaConfig& g) { g.mutation_rate = -0.1; });
  bad([](GaConfig& g) { g.tournament_size = 0; });
  bad([](GaConfig& g) { g.generations = 0; });
  bad([](GaConfig& g) { g.mutation_sigma = -1; });
}

TEST_CASE("variant names") {
  for (Variant v : {Variant::Brute, Variant::Gft, Variant::ClusteredGauss, Variant::ClusteredFcm}) {
    CHECK(parse_variant(variant_name(v)) == v);
  }
  CHECK_THROWS(parse_variant("anfis"));
}
