#include "gfs/genome.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

namespace gfs {

std::size_t GenomeLayout::add(std::string name, std::span<const GeneBounds> bounds, SegmentKind kind,
                              std::size_t triangles_per_input) {
  for (const auto& b : bounds) {
    if (!(b.lower <= b.upper)) throw std::invalid_argument("GenomeLayout: lower bound above upper bound");
  }
  if (kind == SegmentKind::Triangles &&
      (triangles_per_input == 0 || bounds.size() % (3 * triangles_per_input) != 0)) {
    throw std::invalid_argument("GenomeLayout: triangle segment length must be a multiple of 3 * mfs");
  }
  const std::size_t offset = bounds_.size();
  segments_.push_back({std::move(name), offset, bounds.size(), kind, triangles_per_input});
  bounds_.insert(bounds_.end(), bounds.begin(), bounds.end());
  return offset;
}

std::size_t GenomeLayout::add(std::string name, std::size_t length, GeneBounds bounds, SegmentKind kind,
                              std::size_t triangles_per_input) {
  const std::vector<GeneBounds> b(length, bounds);
  return add(std::move(name), b, kind, triangles_per_input);
}

void GenomeLayout::append(const GenomeLayout& other, std::string_view prefix) {
  for (const Segment& s : other.segments_) {
    const std::span<const GeneBounds> b(other.bounds_.data() + s.offset, s.length);
    add(std::string(prefix) + s.name, b, s.kind, s.triangles_per_input);
  }
}

const Segment& GenomeLayout::segment(std::string_view name) const {
  for (const Segment& s : segments_) {
    if (s.name == name) return s;
  }
  throw std::out_of_range("GenomeLayout: no segment named '" + std::string(name) + "'");
}

bool GenomeLayout::within_bounds(std::span<const double> genes) const {
  if (genes.size() != bounds_.size()) return false;
  for (std::size_t i = 0; i < genes.size(); ++i) {
    if (!(genes[i] >= bounds_[i].lower && genes[i] <= bounds_[i].upper)) return false;
  }
  return true;
}

void GenomeLayout::repair(std::span<double> genes) const {
  if (genes.size() != bounds_.size()) throw std::invalid_argument("GenomeLayout::repair: length mismatch");
  for (std::size_t i = 0; i < genes.size(); ++i) {
    double& g = genes[i];
    if (std::isnan(g)) g = bounds_[i].lower;
    g = std::clamp(g, bounds_[i].lower, bounds_[i].upper);
  }
  for (const Segment& s : segments_) {
    if (s.kind != SegmentKind::Triangles) continue;
    const std::size_t m = s.triangles_per_input;
    std::vector<std::array<double, 3>> tri(m);
    for (std::size_t base = s.offset; base < s.offset + s.length; base += 3 * m) {
      for (std::size_t k = 0; k < m; ++k) {
        tri[k] = {genes[base + 3 * k], genes[base + 3 * k + 1], genes[base + 3 * k + 2]};
        std::sort(tri[k].begin(), tri[k].end());
      }
      std::stable_sort(tri.begin(), tri.end(), [](const auto& l, const auto& r) {
        if (l[1] != r[1]) return l[1] < r[1];
        if (l[0] != r[0]) return l[0] < r[0];
        return l[2] < r[2];
      });
      for (std::size_t k = 0; k < m; ++k) {
        for (std::size_t q = 0; q < 3; ++q) genes[base + 3 * k + q] = tri[k][q];
      }
    }
  }
}

void GaConfig::validate() const {
  if (population_size < 2) throw std::invalid_argument("GaConfig: population_size must be >= 2");
  if (generations < 1) throw std::invalid_argument("GaConfig: generations must be >= 1");
  if (!(crossover_rate >= 0 && crossover_rate <= 1)) throw std::invalid_argument("GaConfig: crossover_rate outside [0, 1]");
  if (mutation_rate && !(*mutation_rate >= 0 && *mutation_rate <= 1)) {
    throw std::invalid_argument("GaConfig: mutation_rate outside [0, 1]");
  }
  if (!(mutation_sigma >= 0) || !std::isfinite(mutation_sigma)) throw std::invalid_argument("GaConfig: mutation_sigma must be >= 0");
  if (tournament_size < 1) throw std::invalid_argument("GaConfig: tournament_size must be >= 1");
  if (elite_count < 1 || elite_count >= population_size) {
    throw std::invalid_argument("GaConfig: elite_count must satisfy 1 <= elite_count < population_size");
  }
}

double GaConfig::effective_mutation_rate(std::size_t genome_length) const {
  if (mutation_rate) return *mutation_rate;
  return genome_length == 0 ? 0.0 : 1.0 / static_cast<double>(genome_length);
}

std::string_view variant_name(Variant v) {
  switch (v) {
    case Variant::Brute: return "brute";
    case Variant::Gft: return "gft";
    case Variant::ClusteredGauss: return "clustered-gauss";
    case Variant::ClusteredFcm: return "clustered-fcm";
  }
  return "unknown";
}

Variant parse_variant(std::string_view name) {
  for (Variant v : {Variant::Brute, Variant::Gft, Variant::ClusteredGauss, Variant::ClusteredFcm}) {
    if (variant_name(v) == name) return v;
  }
  throw std::invalid_argument("unknown variant '" + std::string(name) + "'");
}

namespace {

std::size_t ipow(std::size_t base, std::size_t exp) {
  std::size_t r = 1;
  while (exp--) r *= base;
  return r;
}

}  // namespace

std::size_t param_count(const ArchitectureConfig& cfg) {
  const std::size_t d = cfg.inputs;
  const std::size_t m = cfg.mfs;
  switch (cfg.variant) {
    case Variant::Brute:
      return ipow(m, d) * consequent_arity(cfg.order, d) + d * m * 3;
    case Variant::Gft:
      return d < 2 ? 0 : (d - 1) * (m * m * consequent_arity(cfg.order, 2) + 2 * m * 3);
    case Variant::ClusteredGauss:
      return cfg.clusters + cfg.clusters * consequent_arity(cfg.order, d);
    case Variant::ClusteredFcm:
      return cfg.clusters * consequent_arity(cfg.order, d);
  }
  return 0;
}

std::vector<GeneBounds> consequent_bounds(TskOrder order, std::size_t inputs) {
  if (order == TskOrder::Zero) return {{0.0, 1.0}};
  std::vector<GeneBounds> b(inputs, GeneBounds{-2.0, 2.0});
  b.push_back({-1.0, 2.0});
  return b;
}

std::size_t GridEncoding::rule_count() const { return ipow(mfs, inputs); }

GenomeLayout GridEncoding::layout() const {
  if (inputs == 0 || mfs < 2) throw std::invalid_argument("GridEncoding: need inputs >= 1 and mfs >= 2");
  GenomeLayout layout;
  layout.add("mf", mf_gene_count(), {0.0, 1.0}, SegmentKind::Triangles, mfs);
  const auto per_rule = consequent_bounds(order, inputs);
  std::vector<GeneBounds> all;
  all.reserve(rule_count() * per_rule.size());
  for (std::size_t r = 0; r < rule_count(); ++r) all.insert(all.end(), per_rule.begin(), per_rule.end());
  layout.add("consequents", all);
  return layout;
}

Chromosome GridEncoding::encode(const FuzzySystem& system) const {
  if (system.input_count() != inputs || system.order() != order || system.rules().size() != rule_count()) {
    throw std::invalid_argument("GridEncoding::encode: system shape does not match encoding");
  }
  Chromosome c;
  c.genes.reserve(mf_gene_count() + rule_count() * consequent_arity(order, inputs));
  for (const auto& p : system.partitions()) {
    if (p.size() != mfs) throw std::invalid_argument("GridEncoding::encode: wrong MF count");
    for (const auto& mf : p.mfs) {
      const auto* t = std::get_if<TriangularMF>(&mf);
      if (!t) throw std::invalid_argument("GridEncoding::encode: only triangular MFs are encodable");
      c.genes.insert(c.genes.end(), {t->a, t->b, t->c});
    }
  }
  const std::vector<std::size_t> radices(inputs, mfs);
  for (std::size_t r = 0; r < rule_count(); ++r) {
    const TskRule& rule = system.rules()[r];
    if (rule.antecedent != grid_antecedent(r, radices)) {
      throw std::invalid_argument("GridEncoding::encode: rules are not in grid order");
    }
    c.genes.insert(c.genes.end(), rule.consequent.begin(), rule.consequent.end());
  }
  return c;
}

std::vector<TriangularMF> triangles_from_genes(std::span<const double> genes) {
  std::vector<TriangularMF> out(genes.size() / 3);
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = {genes[3 * k], genes[3 * k + 1], genes[3 * k + 2]};
  return out;
}

FuzzySystem GridEncoding::decode(std::span<const double> genes) const {
  const GenomeLayout lay = layout();
  if (genes.size() != lay.total_length()) {
    throw std::invalid_argument("GridEncoding::decode: expected " + std::to_string(lay.total_length()) +
                                " genes, got " + std::to_string(genes.size()));
  }
  std::vector<double> g(genes.begin(), genes.end());
  lay.repair(g);
  const auto tris = triangles_from_genes(std::span<const double>(g).first(mf_gene_count()));
  std::vector<InputPartition> parts(inputs);
  for (std::size_t j = 0; j < inputs; ++j) {
    for (std::size_t k = 0; k < mfs; ++k) parts[j].mfs.emplace_back(tris[j * mfs + k]);
  }
  return FuzzySystem::grid(std::move(parts), order, std::span<const double>(g).subspan(mf_gene_count()));
}

void initialize_genes(const GenomeLayout& layout, Rng& rng, std::span<double> genes, double jitter) {
  if (genes.size() != layout.total_length()) throw std::invalid_argument("initialize_genes: length mismatch");
  const auto& bounds = layout.bounds();
  for (const Segment& s : layout.segments()) {
    if (s.kind == SegmentKind::Plain) {
      for (std::size_t i = s.offset; i < s.offset + s.length; ++i) {
        genes[i] = rng.uniform(bounds[i].lower, bounds[i].upper);
      }
      continue;
    }
    const std::size_t m = s.triangles_per_input;
    const auto base_partition = uniform_partition(m);
    const double spacing = 1.0 / static_cast<double>(m - 1);
    for (std::size_t base = s.offset; base < s.offset + s.length; base += 3 * m) {
      for (std::size_t k = 0; k < m; ++k) {
        const auto& t = std::get<TriangularMF>(base_partition.mfs[k]);
        const std::array<double, 3> v = {t.a, t.b, t.c};
        for (std::size_t q = 0; q < 3; ++q) {
          // The outer shoulders stay pinned to the domain ends so the
          // initial partition covers all of [0, 1].
          const bool pinned = (k == 0 && q < 2) || (k == m - 1 && q > 0);
          const double delta = pinned ? 0.0 : jitter * spacing * rng.uniform(-1.0, 1.0);
          genes[base + 3 * k + q] = v[q] + delta;
        }
      }
    }
  }
  layout.repair(genes);
}

}  // namespace gfs
