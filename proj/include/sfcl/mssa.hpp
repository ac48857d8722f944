#pragma once

// Modified social spider algorithm over a box-bounded real vector space.
//
// Each operator comes in two forms: a kernel taking its random draws
// explicitly (so the arithmetic is testable in isolation) and a wrapper that
// takes the draws from a generator.

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <span>
#include <vector>

namespace sfcl::mssa {

using Position = std::vector<double>;
using Rng = std::mt19937_64;

/// Uniform in [0, 1) from the top 53 bits; portable across standard libraries.
double uniform01(Rng& rng);

struct Bounds {
  std::vector<double> lower;
  std::vector<double> upper;

  std::size_t dimension() const { return lower.size(); }
  /// Sum of widths over 2 * dimension.
  double mating_radius() const;
};

/// Componentwise clamp; NaN coordinates go to the lower bound.
Position clamp(Position x, const Bounds& bounds);

enum class Sex { female, dominant_male, nondominant_male };

struct Spider {
  Position position;
  double fitness = 0.0;
  double weight = 0.0;
  Sex sex = Sex::female;
};

struct SsaParams {
  int population_size = 25;
  int iterations = 100;
  double attraction_probability = 0.7;  // sign draw for the female move
  double levy_probability = 0.2;        // per spider, per iteration
  double levy_beta_min = 0.0;           // exclusive
  double levy_beta_max = 1.0;
  std::uint64_t seed = 1;
  std::optional<int> female_count;      // overrides the random female fraction

  void validate() const;  // throws std::invalid_argument
};

/// (f_w - f_i) / (f_w - f_b); 1 when the population is degenerate.
double spider_weight(double f_i, double f_b, double f_w);

/// Weights over a population where non-finite fitness marks an infeasible
/// spider (weight 0). Extremes are taken over finite values.
std::vector<double> population_weights(std::span<const double> fitness);

struct FemaleDraws {
  double a1 = 0.0;
  double a2 = 0.0;
  Position a3;  // per-dimension drift draws, drift is (a3 - 0.5)
  bool attract_closest = true;
  bool attract_best = true;
};

/// Kernel with the vibration distances d_ic, d_ib given explicitly.
Position female_move(const Position& x, const Spider& closest, double d_ic, const Spider& best, double d_ib,
                     const FemaleDraws& draws, const Bounds& bounds);
/// Distances taken as Euclidean between positions.
Position female_move(const Position& x, const Spider& closest, const Spider& best, const FemaleDraws& draws,
                     const Bounds& bounds);
Position female_move(const Position& x, const Spider& closest, const Spider& best, double attraction_probability,
                     const Bounds& bounds, Rng& rng);

struct DominantMaleDraws {
  double a5 = 0.0;
  Position a6;  // per-dimension drift draws
};

Position dominant_male_move(const Position& x, const Spider& nearest_female, double d_ic,
                            const DominantMaleDraws& draws, const Bounds& bounds);
Position dominant_male_move(const Position& x, const Spider& nearest_female, const DominantMaleDraws& draws,
                            const Bounds& bounds);
Position dominant_male_move(const Position& x, const Spider& nearest_female, const Bounds& bounds, Rng& rng);

Position nondominant_male_move(const Position& x, const Position& weighted_mean, double a7, const Bounds& bounds);
Position nondominant_male_move(const Position& x, const Position& weighted_mean, const Bounds& bounds, Rng& rng);

/// Roulette wheel: first index whose cumulative weight exceeds u * total.
/// All-zero weights fall back to a uniform pick.
std::size_t roulette_pick(std::span<const double> weights, double u);

/// Offspring coordinates drawn per dimension from the participants
/// (dominant male first, then the females in range) by roulette over their
/// weights.
Position mate(std::span<const Spider> participants, Rng& rng);

/// Mantegna's construction of a heavy-tailed step with tail exponent beta.
double levy_sample(double beta, Rng& rng);

/// x + L (x - best), L per dimension.
Position levy_step(const Position& x, const Position& best, std::span<const double> steps, const Bounds& bounds);
Position levy_step(const Position& x, const Position& best, const Bounds& bounds, double beta_min, double beta_max,
                   Rng& rng);

/// x + a8 (best - T * mean), T in {1, 2}.
Position local_search_shift(const Position& x, const Position& best, const Position& mean, int t, double a8,
                            const Bounds& bounds);
Position local_search_shift(const Position& x, const Position& best, const Position& mean, const Bounds& bounds,
                            Rng& rng);

struct TraceRow {
  int iteration = 0;
  double best_fitness = 0.0;
  double mean_fitness = 0.0;  // over finite fitness values

  bool operator==(const TraceRow&) const = default;
};

struct Result {
  Position best;
  double best_fitness = 0.0;
  std::vector<TraceRow> trace;
  std::vector<Spider> final_population;
  long evaluations = 0;
};

using Objective = std::function<double(const Position&)>;

/// Minimizes `objective`. Exceptions from the objective propagate wrapped in
/// std::runtime_error naming the iteration.
Result optimize(const Objective& objective, const Bounds& bounds, const SsaParams& params);

}  // namespace sfcl::mssa
