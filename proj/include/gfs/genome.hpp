#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gfs/fuzzy.hpp"
#include "gfs/rng.hpp"

namespace gfs {

struct GeneBounds {
  double lower = 0;
  double upper = 1;
  double width() const { return upper - lower; }
};

enum class SegmentKind {
  Plain,
  // Consecutive (a, b, c) triangle triples. Repair sorts each triple and
  // then orders the triples of one input by peak.
  Triangles,
};

struct Segment {
  std::string name;
  std::size_t offset = 0;
  std::size_t length = 0;
  SegmentKind kind = SegmentKind::Plain;
  std::size_t triangles_per_input = 0;  // Triangles only
};

/// Ordered, contiguous description of a flat gene vector.
class GenomeLayout {
 public:
  // Appends a segment with per-gene bounds; returns its offset.
  std::size_t add(std::string name, std::span<const GeneBounds> bounds, SegmentKind kind = SegmentKind::Plain,
                  std::size_t triangles_per_input = 0);
  std::size_t add(std::string name, std::size_t length, GeneBounds bounds, SegmentKind kind = SegmentKind::Plain,
                  std::size_t triangles_per_input = 0);
  // Appends every segment of `other`, prefixing names.
  void append(const GenomeLayout& other, std::string_view prefix);

  const std::vector<Segment>& segments() const { return segments_; }
  const Segment& segment(std::string_view name) const;
  std::size_t total_length() const { return bounds_.size(); }
  const std::vector<GeneBounds>& bounds() const { return bounds_; }

  bool within_bounds(std::span<const double> genes) const;
  // Clamp to bounds, then sort-repair triangle segments. Idempotent.
  void repair(std::span<double> genes) const;

 private:
  std::vector<Segment> segments_;
  std::vector<GeneBounds> bounds_;
};

struct Chromosome {
  std::vector<double> genes;
  std::optional<double> fitness;
};

struct GaConfig {
  std::size_t population_size = 50;
  std::size_t generations = 100;
  double crossover_rate = 0.9;
  std::optional<double> mutation_rate;  // unset: 1 / genome length
  double mutation_sigma = 0.1;          // fraction of each gene's bound width
  std::size_t tournament_size = 3;
  std::size_t elite_count = 1;
  std::uint64_t seed = 42;

  // Throws std::invalid_argument on violated invariants.
  void validate() const;
  double effective_mutation_rate(std::size_t genome_length) const;

  bool operator==(const GaConfig&) const = default;
};

enum class Variant { Brute, Gft, ClusteredGauss, ClusteredFcm };

std::string_view variant_name(Variant v);
Variant parse_variant(std::string_view name);

struct ArchitectureConfig {
  Variant variant = Variant::Brute;
  std::size_t inputs = 5;
  std::size_t mfs = 5;  // grid and cascade systems
  TskOrder order = TskOrder::One;
  std::size_t clusters = 15;  // clustered systems
};

// Trainable parameter count of an architecture:
//   grid:            m^d * arity(d) + 3 d m
//   cascade:         (d - 1) * (m^2 * arity(2) + 6 m)
//   clustered-gauss: c + c * arity(d)
//   clustered-fcm:   c * arity(d)
std::size_t param_count(const ArchitectureConfig& config);

// Bounds for one rule's consequent coefficients.
std::vector<GeneBounds> consequent_bounds(TskOrder order, std::size_t inputs);

/// Flat encoding of a full-grid triangular TSK system.
///
/// Genes: one Triangles segment of inputs * mfs * 3 values in [0, 1],
/// followed by mfs^inputs rule consequents.
struct GridEncoding {
  std::size_t inputs = 0;
  std::size_t mfs = 0;
  TskOrder order = TskOrder::One;

  std::size_t rule_count() const;
  std::size_t mf_gene_count() const { return inputs * mfs * 3; }
  GenomeLayout layout() const;

  // Throws std::invalid_argument if the system is not a triangular grid
  // of this shape in canonical rule order.
  Chromosome encode(const FuzzySystem& system) const;
  // Sort-repairs a copy of the genes first, so any vector of the right
  // length decodes to a valid system.
  FuzzySystem decode(std::span<const double> genes) const;
};

// Reads triangle triples out of repaired genes.
std::vector<TriangularMF> triangles_from_genes(std::span<const double> genes);

// Populates genes for generation 0: triangle segments start from the
// uniform partition with interior points jittered by up to `jitter` times
// the peak spacing after which the segment is repaired; other genes are
// uniform within bounds.
void initialize_genes(const GenomeLayout& layout, Rng& rng, std::span<double> genes, double jitter = 0.1);

}  // namespace gfs
