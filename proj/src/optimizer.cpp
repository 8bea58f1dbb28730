#include "netcomp/optimizer.hpp"

#include "netcomp/errors.hpp"
#include "netcomp/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <random>

namespace netcomp {

namespace {

struct Member {
  Vector genome;
  double value = 0.0;
};

double uniform(std::mt19937_64& rng) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng); }
double gaussian(std::mt19937_64& rng) { return std::normal_distribution<double>(0.0, 1.0)(rng); }

class Search {
 public:
  Search(const Objective& objective, const ConstraintSpec& spec, const GAConfig& config)
      : objective_(objective), region_(spec), config_(config) {
    const Vector base = region_.gather(spec.base.matrix());
    double positive = 0.0;
    int count = 0;
    for (Eigen::Index k = 0; k < base.size(); ++k) {
      if (base(k) > 0.0) {
        positive += base(k);
        ++count;
      }
    }
    typical_ = count > 0 ? positive / count : 1.0;
  }

  const FeasibleRegion& region() const { return region_; }

  double evaluate(const Vector& genome) const {
    try {
      return objective_.evaluate(region_.to_network(genome), region_.spec().base);
    } catch (const std::exception& e) {
      throw Error("objective " + objective_.describe() + " failed on a candidate network: " + e.what());
    }
  }

  std::optional<Vector> project(const Vector& y) const {
    try {
      return region_.project(y);
    } catch (const ConvergenceError&) {
      return std::nullopt;
    }
  }

  std::optional<Vector> random_vertex(std::mt19937_64& rng) const {
    const auto d = static_cast<Eigen::Index>(region_.dimension());
    Vector cost(d);
    for (Eigen::Index k = 0; k < d; ++k) cost(k) = gaussian(rng);
    const LpSolution sol = lp_solve(region_.linear_program(cost));
    if (sol.status != LpStatus::kOptimal) return std::nullopt;
    Vector y = sol.x.head(d);
    if (is_feasible(region_.scatter(y), region_.spec()).feasible) return y;
    return project(y);
  }

  void mutate(Vector& y, std::mt19937_64& rng) const {
    const auto d = y.size();
    if (d == 0) return;
    // Log-uniform spread in [fine_ratio, 1] * scale: coarse moves explore, fine ones polish.
    const double spread = config_.mutation_scale * std::pow(config_.mutation_fine_ratio, uniform(rng));
    bool any = false;
    for (Eigen::Index k = 0; k < d; ++k) {
      if (uniform(rng) >= 0.3) continue;
      any = true;
      perturb(y, k, spread, rng);
    }
    if (!any) perturb(y, static_cast<Eigen::Index>(uniform(rng) * static_cast<double>(d)) % d, spread, rng);
  }

  Member tournament(const std::vector<Member>& pop, std::mt19937_64& rng) const {
    std::size_t best = pop.size();
    for (std::size_t t = 0; t < std::max<std::size_t>(1, config_.tournament_size); ++t) {
      const auto pick = static_cast<std::size_t>(uniform(rng) * static_cast<double>(pop.size())) % pop.size();
      if (best == pop.size() || pop[pick].value < pop[best].value ||
          (pop[pick].value == pop[best].value && pick < best)) {
        best = pick;
      }
    }
    return pop[best];
  }

  Vector child(const std::vector<Member>& pop, std::mt19937_64& rng, std::size_t& failures) const {
    for (int attempt = 0; attempt <= config_.repair_retries; ++attempt) {
      const Member a = tournament(pop, rng);
      Vector y = a.genome;
      if (uniform(rng) < config_.crossover_rate) {
        const Member b = tournament(pop, rng);
        const double beta = uniform(rng);
        y = beta * a.genome + (1.0 - beta) * b.genome;
      }
      bool moved = false;
      if (uniform(rng) < config_.mutation_rate) {
        mutate(y, rng);
        moved = true;
      }
      if (uniform(rng) < config_.vertex_mutation_rate) {
        if (auto v = random_vertex(rng)) return *v;
        ++failures;
        continue;
      }
      if (!moved && is_feasible(region_.scatter(y), region_.spec()).feasible) return y;
      if (auto p = project(y)) return *p;
      ++failures;
      if (attempt == config_.repair_retries) return a.genome;
    }
    return pop.front().genome;
  }

 private:
  void perturb(Vector& y, Eigen::Index k, double spread, std::mt19937_64& rng) const {
    const double factor = std::exp(spread * gaussian(rng));
    if (y(k) > 0.0) {
      y(k) *= factor;
    } else {
      // Zero entries cannot move multiplicatively; seed them at a small level.
      y(k) = spread * typical_ * std::abs(gaussian(rng));
    }
  }

  const Objective& objective_;
  FeasibleRegion region_;
  GAConfig config_;
  double typical_ = 1.0;
};

}  // namespace

void GAConfig::validate() const {
  if (population_size < 2) throw ValidationError("population size must be at least 2");
  if (elite_count >= population_size) throw ValidationError("elite count must be below the population size");
  const auto rate = [](double r, const char* name) {
    if (!(r >= 0.0 && r <= 1.0)) throw ValidationError(std::string(name) + " must lie in [0,1]");
  };
  rate(crossover_rate, "crossover rate");
  rate(mutation_rate, "mutation rate");
  rate(vertex_mutation_rate, "vertex mutation rate");
  if (!(mutation_scale >= 0.0)) throw ValidationError("mutation scale must be nonnegative");
  if (!(mutation_fine_ratio > 0.0 && mutation_fine_ratio <= 1.0)) {
    throw ValidationError("mutation fine ratio must lie in (0, 1]");
  }
  if (stall_generations < 1) throw ValidationError("stall generations must be at least 1");
  if (max_generations < 1) throw ValidationError("max generations must be at least 1");
  if (repair_retries < 0) throw ValidationError("repair retries must be nonnegative");
}

GAResult ga_optimize(const Objective& objective, const ConstraintSpec& spec, const GAConfig& config) {
  config.validate();
  const FeasibilityReport base_ok = is_feasible(spec.base, spec);
  if (!base_ok.feasible) throw ValidationError("base network is not feasible for its own constraint set");
  const Search search(objective, spec, config);
  const FeasibleRegion& region = search.region();
  const std::size_t m = config.population_size;
  GAResult result;

  // Initial population: L̃, maximal compression, then random feasible points.
  std::vector<Vector> genomes(m);
  genomes[0] = region.gather(spec.base.matrix());
  genomes[1] = region.gather(maximal_compression(spec).matrix());
  std::vector<std::size_t> failures(m, 0);
  parallel_for(m - 2, config.threads, [&](std::size_t idx) {
    const std::size_t slot = idx + 2;
    std::mt19937_64 rng(derive_seed(config.seed, 0, slot));
    std::optional<Vector> y;
    if (slot % 2 == 0) y = search.random_vertex(rng);
    if (!y) {
      const double w = uniform(rng);
      Vector mix = w * genomes[0] + (1.0 - w) * genomes[1];
      for (Eigen::Index k = 0; k < mix.size(); ++k) mix(k) *= std::exp(gaussian(rng));
      y = search.project(mix);
      if (!y) ++failures[slot];
    }
    genomes[slot] = y ? *y : genomes[slot % 2];
  });

  std::vector<Member> pop(m);
  std::vector<bool> known(m, false);
  for (std::size_t i = 0; i < m; ++i) pop[i].genome = std::move(genomes[i]);

  double best_prev = kInfinity;
  std::size_t stall = 0;
  for (std::size_t gen = 0; gen < config.max_generations; ++gen) {
    parallel_for(m, config.threads, [&](std::size_t i) {
      if (!known[i]) pop[i].value = search.evaluate(pop[i].genome);
    });
    for (std::size_t i = 0; i < m; ++i) {
      if (!known[i]) ++result.evaluations;
    }
    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return pop[a].value < pop[b].value; });
    std::vector<Member> sorted;
    sorted.reserve(m);
    for (auto i : order) sorted.push_back(pop[i]);
    pop = std::move(sorted);

    const double best = pop.front().value;
    result.history.push_back(best);
    result.generations = gen + 1;
    if (best < best_prev - 1e-9) {
      stall = 0;
    } else {
      ++stall;
    }
    best_prev = std::min(best_prev, best);
    if (stall >= config.stall_generations || gen + 1 == config.max_generations || best <= config.target_value) break;

    std::vector<Member> next(m);
    std::fill(known.begin(), known.end(), false);
    for (std::size_t e = 0; e < config.elite_count; ++e) {
      next[e] = pop[e];
      known[e] = true;
    }
    std::vector<std::size_t> child_failures(m, 0);
    parallel_for(m - config.elite_count, config.threads, [&](std::size_t idx) {
      const std::size_t slot = idx + config.elite_count;
      std::mt19937_64 rng(derive_seed(config.seed, gen + 1, slot));
      next[slot].genome = search.child(pop, rng, child_failures[slot]);
    });
    for (auto f : child_failures) failures[0] += f;
    pop = std::move(next);
  }
  for (auto f : failures) result.repair_failures += f;
  result.best = region.to_network(pop.front().genome);
  result.best_value = pop.front().value;
  return result;
}

LocalSearchResult local_search_baseline(const Objective& objective, const ConstraintSpec& spec,
                                        const LiabilityNetwork& start, const LocalSearchOptions& options) {
  const FeasibilityReport ok = is_feasible(start, spec);
  if (!ok.feasible) throw ValidationError("local search start is not feasible");
  const FeasibleRegion region(spec);
  const auto d = static_cast<Eigen::Index>(region.dimension());
  const double scale = std::max(spec.base.matrix().maxCoeff(), 1e-12);
  double step = options.initial_step > 0.0 ? options.initial_step : 0.25 * scale;
  const double min_step = options.min_step * scale;

  LocalSearchResult res;
  Vector y = region.gather(start.matrix());
  double value = objective.evaluate(start, spec.base);
  res.evaluations = 1;

  std::vector<Vector> directions;
  for (Eigen::Index k = 0; k < d; ++k) {
    Vector e = Vector::Zero(d);
    e(k) = 1.0;
    directions.push_back(e);
    directions.push_back(-e);
  }
  if (static_cast<std::size_t>(d) <= options.pair_move_limit) {
    for (Eigen::Index k = 0; k < d; ++k) {
      for (Eigen::Index l = 0; l < d; ++l) {
        if (k == l) continue;
        Vector e = Vector::Zero(d);
        e(k) = 1.0;
        e(l) = -1.0;
        directions.push_back(e);
      }
    }
  }

  // Forward-difference gradient at y; its negative leads the direction list.
  const auto descent = [&]() -> std::optional<Vector> {
    if (d == 0 || res.evaluations + static_cast<std::size_t>(d) > options.max_evaluations) return std::nullopt;
    const double h = 1e-7 * scale;
    Vector g(d);
    for (Eigen::Index k = 0; k < d; ++k) {
      Vector probe = y;
      probe(k) += h;
      g(k) = (objective.evaluate(region.to_network(probe), spec.base) - value) / h;
    }
    res.evaluations += static_cast<std::size_t>(d);
    const double norm = g.norm();
    if (!(norm > 0.0) || !std::isfinite(norm)) return std::nullopt;
    return Vector(-g / norm);
  };

  std::optional<Vector> gradient_dir = options.gradient_moves ? descent() : std::nullopt;
  while (step >= min_step && res.evaluations < options.max_evaluations) {
    bool improved = false;
    std::vector<const Vector*> order;
    if (gradient_dir) order.push_back(&*gradient_dir);
    for (const Vector& dir : directions) order.push_back(&dir);
    for (const Vector* dir_ptr : order) {
      const Vector& dir = *dir_ptr;
      if (res.evaluations >= options.max_evaluations) break;
      Vector trial;
      try {
        trial = region.project(y + step * dir);
      } catch (const ConvergenceError&) {
        continue;
      }
      if ((trial - y).lpNorm<Eigen::Infinity>() <= 1e-15 * scale) continue;
      const double v = objective.evaluate(region.to_network(trial), spec.base);
      ++res.evaluations;
      if (v < value - 1e-12) {
        y = std::move(trial);
        value = v;
        improved = true;
        break;
      }
    }
    if (improved && options.gradient_moves) gradient_dir = descent();
    if (!improved) step *= options.shrink;
  }
  res.network = region.to_network(y);
  res.value = value;
  return res;
}

}  // namespace netcomp
