#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

#include "gfs/genome.hpp"
#include "gfs/rng.hpp"

namespace gfs {

// Fitness to maximize. Must be a pure function of the genes; it is called
// concurrently from several workers.
using Objective = std::function<double(std::span<const double>)>;

// Fills one individual of the initial population.
using Initializer = std::function<void(Rng&, std::span<double>)>;

struct GenerationStats {
  std::size_t generation = 0;  // 1-based
  double best = 0;
  double mean = 0;
  double worst = 0;
  bool operator==(const GenerationStats&) const = default;
};

struct EvolutionResult {
  Chromosome best;
  std::vector<GenerationStats> history;  // one entry per generation
};

/// Generational GA with elitism, tournament selection, uniform crossover
/// and bounded Gaussian mutation.
///
/// Every offspring draws from its own stream derived from (seed,
/// generation, slot), and evaluation happens after all offspring are
/// built, so results do not depend on `threads`. Non-finite fitness is
/// treated as -inf.
EvolutionResult evolve(const GenomeLayout& layout, const Objective& objective, const GaConfig& config,
                       const Initializer& initializer = {}, std::size_t threads = 1);

void write_history_csv(std::span<const GenerationStats> history, std::ostream& out);

}  // namespace gfs
