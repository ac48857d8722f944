#include "sfcl/mssa.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <string>

namespace sfcl::mssa {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

double distance(const Position& a, const Position& b) {
  double sum = 0.0;
  for (std::size_t d = 0; d < a.size(); ++d) sum += (a[d] - b[d]) * (a[d] - b[d]);
  return std::sqrt(sum);
}

Position drift_draws(std::size_t dim, Rng& rng) {
  Position out(dim);
  for (auto& v : out) v = uniform01(rng);
  return out;
}

std::size_t argmin_fitness(const std::vector<Spider>& pop) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < pop.size(); ++i) {
    if (pop[i].fitness < pop[best].fitness) best = i;
  }
  return best;
}

std::size_t argmax_fitness(const std::vector<Spider>& pop) {
  std::size_t worst = 0;
  for (std::size_t i = 1; i < pop.size(); ++i) {
    if (pop[i].fitness > pop[worst].fitness) worst = i;
  }
  return worst;
}

void assign_weights(std::vector<Spider>& pop) {
  std::vector<double> f(pop.size());
  for (std::size_t i = 0; i < pop.size(); ++i) f[i] = pop[i].fitness;
  const auto w = population_weights(f);
  for (std::size_t i = 0; i < pop.size(); ++i) pop[i].weight = w[i];
}

// Males heavier than the male median weight dominate.
void classify_males(std::vector<Spider>& pop) {
  std::vector<double> w;
  for (const auto& s : pop) {
    if (s.sex != Sex::female) w.push_back(s.weight);
  }
  if (w.empty()) return;
  std::sort(w.begin(), w.end());
  const std::size_t m = w.size();
  const double median = m % 2 ? w[m / 2] : 0.5 * (w[m / 2 - 1] + w[m / 2]);
  for (auto& s : pop) {
    if (s.sex != Sex::female) s.sex = s.weight > median ? Sex::dominant_male : Sex::nondominant_male;
  }
}

}  // namespace

double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

double Bounds::mating_radius() const {
  if (lower.empty()) return 0.0;
  double widths = 0.0;
  for (std::size_t d = 0; d < lower.size(); ++d) widths += upper[d] - lower[d];
  return widths / (2.0 * static_cast<double>(lower.size()));
}

Position clamp(Position x, const Bounds& bounds) {
  for (std::size_t d = 0; d < x.size(); ++d) {
    if (!(x[d] >= bounds.lower[d])) x[d] = bounds.lower[d];
    if (!(x[d] <= bounds.upper[d])) x[d] = bounds.upper[d];
  }
  return x;
}

void SsaParams::validate() const {
  if (population_size < 4) throw std::invalid_argument("population_size must be at least 4");
  if (iterations < 1) throw std::invalid_argument("iterations must be at least 1");
  if (!(levy_beta_min >= 0.0 && levy_beta_min < levy_beta_max && levy_beta_max <= 1.0)) {
    throw std::invalid_argument("levy beta range must lie in (0, 1]");
  }
  if (!(attraction_probability >= 0.0 && attraction_probability <= 1.0)) {
    throw std::invalid_argument("attraction_probability must lie in [0, 1]");
  }
  if (!(levy_probability >= 0.0 && levy_probability <= 1.0)) {
    throw std::invalid_argument("levy_probability must lie in [0, 1]");
  }
  if (female_count && (*female_count < 1 || *female_count > population_size)) {
    throw std::invalid_argument("female_count must lie in [1, population_size]");
  }
}

double spider_weight(double f_i, double f_b, double f_w) {
  if (!(f_w > f_b)) return 1.0;
  return (f_w - f_i) / (f_w - f_b);
}

std::vector<double> population_weights(std::span<const double> fitness) {
  double best = kInf, worst = -kInf;
  for (double f : fitness) {
    if (!std::isfinite(f)) continue;
    best = std::min(best, f);
    worst = std::max(worst, f);
  }
  std::vector<double> w(fitness.size(), 0.0);
  if (!std::isfinite(best)) {
    std::fill(w.begin(), w.end(), 1.0);
    return w;
  }
  for (std::size_t i = 0; i < fitness.size(); ++i) {
    if (std::isfinite(fitness[i])) w[i] = spider_weight(fitness[i], best, worst);
  }
  return w;
}

Position female_move(const Position& x, const Spider& closest, const Spider& best, const FemaleDraws& draws,
                     const Bounds& bounds) {
  return female_move(x, closest, distance(x, closest.position), best, distance(x, best.position), draws, bounds);
}

Position female_move(const Position& x, const Spider& closest, double dc, const Spider& best, double db,
                     const FemaleDraws& draws, const Bounds& bounds) {
  const double vib_c = draws.a1 * closest.weight * std::exp(-dc * dc) * (draws.attract_closest ? 1.0 : -1.0);
  const double vib_b = draws.a2 * best.weight * std::exp(-db * db) * (draws.attract_best ? 1.0 : -1.0);
  Position out(x.size());
  for (std::size_t d = 0; d < x.size(); ++d) {
    out[d] = x[d] + vib_c * (closest.position[d] - x[d]) + vib_b * (best.position[d] - x[d]) + (draws.a3[d] - 0.5);
  }
  return clamp(std::move(out), bounds);
}

Position female_move(const Position& x, const Spider& closest, const Spider& best, double attraction_probability,
                     const Bounds& bounds, Rng& rng) {
  FemaleDraws draws;
  draws.a1 = uniform01(rng);
  draws.a2 = uniform01(rng);
  draws.attract_closest = uniform01(rng) < attraction_probability;
  draws.attract_best = uniform01(rng) < attraction_probability;
  draws.a3 = drift_draws(x.size(), rng);
  return female_move(x, closest, best, draws, bounds);
}

Position dominant_male_move(const Position& x, const Spider& nearest_female, const DominantMaleDraws& draws,
                            const Bounds& bounds) {
  return dominant_male_move(x, nearest_female, distance(x, nearest_female.position), draws, bounds);
}

Position dominant_male_move(const Position& x, const Spider& nearest_female, double d, const DominantMaleDraws& draws,
                            const Bounds& bounds) {
  const double vib = draws.a5 * nearest_female.weight * std::exp(-d * d);
  Position out(x.size());
  for (std::size_t k = 0; k < x.size(); ++k) {
    out[k] = x[k] + vib * (nearest_female.position[k] - x[k]) + (draws.a6[k] - 0.5);
  }
  return clamp(std::move(out), bounds);
}

Position dominant_male_move(const Position& x, const Spider& nearest_female, const Bounds& bounds, Rng& rng) {
  DominantMaleDraws draws;
  draws.a5 = uniform01(rng);
  draws.a6 = drift_draws(x.size(), rng);
  return dominant_male_move(x, nearest_female, draws, bounds);
}

Position nondominant_male_move(const Position& x, const Position& weighted_mean, double a7, const Bounds& bounds) {
  Position out(x.size());
  for (std::size_t d = 0; d < x.size(); ++d) out[d] = x[d] + a7 * (weighted_mean[d] - x[d]);
  return clamp(std::move(out), bounds);
}

Position nondominant_male_move(const Position& x, const Position& weighted_mean, const Bounds& bounds, Rng& rng) {
  return nondominant_male_move(x, weighted_mean, uniform01(rng), bounds);
}

std::size_t roulette_pick(std::span<const double> weights, double u) {
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  if (!(total > 0.0)) {
    return std::min(weights.size() - 1, static_cast<std::size_t>(u * static_cast<double>(weights.size())));
  }
  const double target = u * total;
  double cum = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    cum += weights[i];
    if (cum > target) return i;
  }
  return weights.size() - 1;
}

Position mate(std::span<const Spider> participants, Rng& rng) {
  std::vector<double> w;
  for (const auto& s : participants) w.push_back(s.weight);
  const std::size_t dim = participants.front().position.size();
  Position child(dim);
  for (std::size_t d = 0; d < dim; ++d) child[d] = participants[roulette_pick(w, uniform01(rng))].position[d];
  return child;
}

double levy_sample(double beta, Rng& rng) {
  // sigma_u^beta = Gamma(1+b) sin(pi b/2) / (Gamma((1+b)/2) b 2^((b-1)/2))
  const double log_ratio = std::lgamma(1.0 + beta) + std::log(std::sin(std::numbers::pi * beta / 2.0)) -
                           std::lgamma((1.0 + beta) / 2.0) - std::log(beta) - (beta - 1.0) / 2.0 * std::log(2.0);
  const double sigma_u = std::exp(log_ratio / beta);
  std::normal_distribution<double> normal(0.0, 1.0);
  const double u = normal(rng) * sigma_u;
  const double v = normal(rng);
  return u / std::pow(std::abs(v), 1.0 / beta);
}

Position levy_step(const Position& x, const Position& best, std::span<const double> steps, const Bounds& bounds) {
  Position out(x);
  for (std::size_t d = 0; d < x.size(); ++d) {
    const double diff = x[d] - best[d];
    if (diff == 0.0 || std::isnan(steps[d])) continue;
    out[d] = x[d] + steps[d] * diff;
  }
  return clamp(std::move(out), bounds);
}

Position levy_step(const Position& x, const Position& best, const Bounds& bounds, double beta_min, double beta_max,
                   Rng& rng) {
  // beta uniform on (beta_min, beta_max]
  const double beta = beta_max - uniform01(rng) * (beta_max - beta_min);
  std::vector<double> steps(x.size());
  for (auto& s : steps) s = levy_sample(beta, rng);
  return levy_step(x, best, steps, bounds);
}

Position local_search_shift(const Position& x, const Position& best, const Position& mean, int t, double a8,
                            const Bounds& bounds) {
  Position out(x.size());
  for (std::size_t d = 0; d < x.size(); ++d) out[d] = x[d] + a8 * (best[d] - t * mean[d]);
  return clamp(std::move(out), bounds);
}

Position local_search_shift(const Position& x, const Position& best, const Position& mean, const Bounds& bounds,
                            Rng& rng) {
  const int t = uniform01(rng) < 0.5 ? 1 : 2;
  return local_search_shift(x, best, mean, t, uniform01(rng), bounds);
}

Result optimize(const Objective& objective, const Bounds& bounds, const SsaParams& params) {
  params.validate();
  if (bounds.upper.size() != bounds.lower.size()) throw std::invalid_argument("bounds dimension mismatch");
  const auto n = static_cast<std::size_t>(params.population_size);
  const std::size_t dim = bounds.dimension();

  Rng master(splitmix64(params.seed));
  std::vector<Rng> streams;
  for (std::size_t i = 0; i < n; ++i) streams.emplace_back(splitmix64(params.seed ^ splitmix64(i + 1)));

  std::size_t females = params.female_count
                            ? static_cast<std::size_t>(*params.female_count)
                            : static_cast<std::size_t>(std::floor((0.9 - 0.25 * uniform01(master)) * static_cast<double>(n)));
  females = std::clamp<std::size_t>(females, 1, n);

  Result result;
  int iteration = 0;
  auto evaluate = [&](const Position& x) {
    ++result.evaluations;
    double f = 0.0;
    try {
      f = objective(x);
    } catch (const std::exception& e) {
      throw std::runtime_error("objective failed at iteration " + std::to_string(iteration) + ": " + e.what());
    }
    return std::isnan(f) ? kInf : f;
  };

  std::vector<Spider> pop(n);
  for (std::size_t i = 0; i < n; ++i) {
    pop[i].position.resize(dim);
    for (std::size_t d = 0; d < dim; ++d) {
      pop[i].position[d] = bounds.lower[d] + uniform01(streams[i]) * (bounds.upper[d] - bounds.lower[d]);
    }
    pop[i].sex = i < females ? Sex::female : Sex::nondominant_male;
    pop[i].fitness = evaluate(pop[i].position);
  }

  Spider elite = pop[argmin_fitness(pop)];
  const double radius = bounds.mating_radius();

  for (iteration = 1; iteration <= params.iterations; ++iteration) {
    assign_weights(pop);
    classify_males(pop);

    // Social moves, all computed from the same snapshot.
    const std::vector<Spider> snap = pop;
    const Spider& best = snap[argmin_fitness(snap)];
    Position male_mean(dim, 0.0);
    double male_weight = 0.0;
    std::size_t male_count = 0;
    for (const auto& s : snap) {
      if (s.sex == Sex::female) continue;
      ++male_count;
      male_weight += s.weight;
      for (std::size_t d = 0; d < dim; ++d) male_mean[d] += s.weight * s.position[d];
    }
    if (male_weight > 0.0) {
      for (auto& v : male_mean) v /= male_weight;
    } else if (male_count > 0) {
      std::fill(male_mean.begin(), male_mean.end(), 0.0);
      for (const auto& s : snap) {
        if (s.sex == Sex::female) continue;
        for (std::size_t d = 0; d < dim; ++d) male_mean[d] += s.position[d] / static_cast<double>(male_count);
      }
    }

    for (std::size_t i = 0; i < n; ++i) {
      const Spider& me = snap[i];
      if (me.sex == Sex::female) {
        // Nearest heavier spider; the heaviest spider falls back to its nearest neighbour.
        std::ptrdiff_t heavier = -1, nearest = -1;
        double d_heavier = kInf, d_nearest = kInf;
        for (std::size_t j = 0; j < n; ++j) {
          if (j == i) continue;
          const double d = distance(me.position, snap[j].position);
          if (d < d_nearest) d_nearest = d, nearest = static_cast<std::ptrdiff_t>(j);
          if (snap[j].weight > me.weight && d < d_heavier) d_heavier = d, heavier = static_cast<std::ptrdiff_t>(j);
        }
        const Spider& closest = heavier >= 0 ? snap[heavier] : nearest >= 0 ? snap[nearest] : me;
        pop[i].position = female_move(me.position, closest, best, params.attraction_probability, bounds, streams[i]);
      } else if (me.sex == Sex::dominant_male && females > 0) {
        std::size_t nearest = 0;
        double d_nearest = kInf;
        for (std::size_t j = 0; j < n; ++j) {
          if (snap[j].sex != Sex::female) continue;
          const double d = distance(me.position, snap[j].position);
          if (d < d_nearest) d_nearest = d, nearest = j;
        }
        pop[i].position = dominant_male_move(me.position, snap[nearest], bounds, streams[i]);
      } else {
        pop[i].position = nondominant_male_move(me.position, male_mean, bounds, streams[i]);
      }
      pop[i].fitness = evaluate(pop[i].position);
      // A move that worsens the spider is discarded.
      if (pop[i].fitness > me.fitness) {
        pop[i].position = me.position;
        pop[i].fitness = me.fitness;
      }
    }

    // Mating.
    assign_weights(pop);
    classify_males(pop);
    for (std::size_t i = 0; i < n; ++i) {
      if (pop[i].sex != Sex::dominant_male) continue;
      std::vector<Spider> party{pop[i]};
      for (std::size_t j = 0; j < n; ++j) {
        if (pop[j].sex == Sex::female && distance(pop[i].position, pop[j].position) <= radius) party.push_back(pop[j]);
      }
      if (party.size() < 2) continue;
      Position child = mate(party, streams[i]);
      const double f = evaluate(child);
      const std::size_t worst = argmax_fitness(pop);
      if (f < pop[worst].fitness) {
        pop[worst].position = std::move(child);
        pop[worst].fitness = f;
      }
    }

    // Modification one: Levy flight away from the current best.
    const Position best_now = pop[argmin_fitness(pop)].position;
    for (std::size_t i = 0; i < n; ++i) {
      if (uniform01(streams[i]) >= params.levy_probability) continue;
      Position x = levy_step(pop[i].position, best_now, bounds, params.levy_beta_min, params.levy_beta_max, streams[i]);
      const double f = evaluate(x);
      if (f <= pop[i].fitness) {
        pop[i].position = std::move(x);
        pop[i].fitness = f;
      }
    }

    // Modification two: shift toward the best relative to the population mean.
    const Position best_shift = pop[argmin_fitness(pop)].position;
    Position mean(dim, 0.0);
    for (const auto& s : pop) {
      for (std::size_t d = 0; d < dim; ++d) mean[d] += s.position[d] / static_cast<double>(n);
    }
    for (std::size_t i = 0; i < n; ++i) {
      Position x = local_search_shift(pop[i].position, best_shift, mean, bounds, streams[i]);
      const double f = evaluate(x);
      if (f <= pop[i].fitness) {
        pop[i].position = std::move(x);
        pop[i].fitness = f;
      }
    }

    // Elitism.
    const std::size_t b = argmin_fitness(pop);
    if (pop[b].fitness < elite.fitness) {
      elite = pop[b];
    } else if (pop[b].fitness > elite.fitness) {
      const std::size_t w = argmax_fitness(pop);
      pop[w].position = elite.position;
      pop[w].fitness = elite.fitness;
    }

    double sum = 0.0;
    int finite = 0;
    for (const auto& s : pop) {
      if (std::isfinite(s.fitness)) sum += s.fitness, ++finite;
    }
    result.trace.push_back({iteration, elite.fitness, finite ? sum / finite : kInf});
  }

  assign_weights(pop);
  classify_males(pop);
  result.best = elite.position;
  result.best_fitness = elite.fitness;
  result.final_population = std::move(pop);
  return result;
}

}  // namespace sfcl::mssa
