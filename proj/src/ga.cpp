#include "gfs/ga.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>
#include <stdexcept>

#include "gfs/parallel.hpp"
#include "gfs/text.hpp"

namespace gfs {
namespace {

constexpr double kWorst = -std::numeric_limits<double>::infinity();

double sanitize(double f) { return std::isfinite(f) ? f : kWorst; }

// Index of the fittest among `tournament_size` uniform draws; ties go to
// the first drawn.
std::size_t tournament(std::span<const double> fitness, std::size_t tournament_size, Rng& rng) {
  std::size_t best = rng.below(fitness.size());
  for (std::size_t t = 1; t < tournament_size; ++t) {
    const std::size_t challenger = rng.below(fitness.size());
    if (fitness[challenger] > fitness[best]) best = challenger;
  }
  return best;
}

// Population order by descending fitness, ties broken by index.
std::vector<std::size_t> ranking(std::span<const double> fitness) {
  std::vector<std::size_t> order(fitness.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t l, std::size_t r) { return fitness[l] > fitness[r]; });
  return order;
}

GenerationStats summarize(std::size_t generation, std::span<const double> fitness) {
  GenerationStats s;
  s.generation = generation;
  s.best = *std::max_element(fitness.begin(), fitness.end());
  s.worst = *std::min_element(fitness.begin(), fitness.end());
  double sum = 0.0;
  for (double f : fitness) sum += f;
  s.mean = sum / static_cast<double>(fitness.size());
  return s;
}

}  // namespace

EvolutionResult evolve(const GenomeLayout& layout, const Objective& objective, const GaConfig& config,
                       const Initializer& initializer, std::size_t threads) {
  config.validate();
  if (!objective) throw std::invalid_argument("evolve: missing objective");
  const std::size_t n = config.population_size;
  const std::size_t len = layout.total_length();
  if (len == 0) throw std::invalid_argument("evolve: empty genome layout");
  const double mutation_rate = config.effective_mutation_rate(len);
  const auto& bounds = layout.bounds();

  std::vector<std::vector<double>> population(n, std::vector<double>(len));
  std::vector<double> fitness(n);

  parallel_for(n, threads, [&](std::size_t i) {
    Rng rng(derive_seed(config.seed, {0, i}));
    if (initializer) {
      initializer(rng, population[i]);
    } else {
      initialize_genes(layout, rng, population[i]);
    }
    layout.repair(population[i]);
    fitness[i] = sanitize(objective(population[i]));
  });

  EvolutionResult result;
  result.history.reserve(config.generations);
  std::vector<std::vector<double>> next(n, std::vector<double>(len));
  std::vector<double> next_fitness(n);

  for (std::size_t gen = 1; gen <= config.generations; ++gen) {
    const auto order = ranking(fitness);
    for (std::size_t e = 0; e < config.elite_count; ++e) {
      next[e] = population[order[e]];
      next_fitness[e] = fitness[order[e]];
    }
    parallel_for(n - config.elite_count, threads, [&](std::size_t k) {
      const std::size_t slot = config.elite_count + k;
      Rng rng(derive_seed(config.seed, {gen, slot}));
      const auto& p1 = population[tournament(fitness, config.tournament_size, rng)];
      const auto& p2 = population[tournament(fitness, config.tournament_size, rng)];
      auto& child = next[slot];
      if (rng.uniform() < config.crossover_rate) {
        for (std::size_t g = 0; g < len; ++g) child[g] = (rng.next() >> 63) ? p2[g] : p1[g];
      } else {
        child = p1;
      }
      if (mutation_rate > 0.0) {
        for (std::size_t g = 0; g < len; ++g) {
          if (rng.uniform() < mutation_rate) {
            child[g] += rng.normal() * config.mutation_sigma * bounds[g].width();
          }
        }
      }
      layout.repair(child);
      next_fitness[slot] = sanitize(objective(child));
    });
    std::swap(population, next);
    std::swap(fitness, next_fitness);
    result.history.push_back(summarize(gen, fitness));
  }

  const auto order = ranking(fitness);
  result.best.genes = population[order.front()];
  result.best.fitness = fitness[order.front()];
  return result;
}

void write_history_csv(std::span<const GenerationStats> history, std::ostream& out) {
  out << "generation,best,mean,worst\n";
  for (const auto& s : history) {
    out << s.generation << ',' << format_double(s.best) << ',' << format_double(s.mean) << ','
        << format_double(s.worst) << '\n';
  }
}

}  // namespace gfs
