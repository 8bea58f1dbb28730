#pragma once

#include "netcomp/compression.hpp"
#include "netcomp/objectives.hpp"

#include <cstdint>
#include <vector>

namespace netcomp {

struct GAConfig {
  std::size_t population_size = 64;
  std::size_t elite_count = 4;
  double crossover_rate = 0.8;
  double mutation_rate = 0.2;
  double mutation_scale = 0.25;      // log-normal spread of multiplicative mutation
  double mutation_fine_ratio = 1e-3; // smallest spread, relative to mutation_scale; 1 keeps it fixed
  std::size_t stall_generations = 50;
  std::size_t max_generations = 2000;
  std::uint64_t seed = 42;
  unsigned threads = 1;              // 0: hardware concurrency; results do not depend on it
  std::size_t tournament_size = 3;
  double vertex_mutation_rate = 0.1;  // replace the child by a random vertex of the set
  int repair_retries = 10;
  double target_value = -1e300;  // stop once the best value is at or below this

  void validate() const;
};

struct GAResult {
  LiabilityNetwork best;
  double best_value = 0.0;
  std::vector<double> history;  // best value after each generation
  std::size_t generations = 0;
  std::size_t evaluations = 0;
  std::size_t repair_failures = 0;
};

/// Genetic algorithm over the compression set. The initial population holds
/// L̃ and the maximal compression, so the result is never worse than either.
GAResult ga_optimize(const Objective& objective, const ConstraintSpec& spec, const GAConfig& config = {});

struct LocalSearchOptions {
  double initial_step = 0.0;  // 0: a quarter of the largest base entry
  double min_step = 1e-6;     // relative to the largest base entry
  double shrink = 0.5;
  std::size_t max_evaluations = 20000;
  std::size_t pair_move_limit = 40;  // also try e_k − e_l moves when the dimension is at most this
  bool gradient_moves = true;        // lead with a projected finite-difference gradient step
};

struct LocalSearchResult {
  LiabilityNetwork network;
  double value = 0.0;
  std::size_t evaluations = 0;
};

/// Deterministic projected pattern search from a feasible start: a projected
/// finite-difference gradient step, then coordinate and pair moves, with a
/// step that shrinks whenever no move improves.
LocalSearchResult local_search_baseline(const Objective& objective, const ConstraintSpec& spec,
                                        const LiabilityNetwork& start, const LocalSearchOptions& options = {});

}  // namespace netcomp
