#include <doctest.h>

#include <cmath>
#include <random>

#include "sfcl/mssa.hpp"
#include "support.hpp"

using namespace sfcl::mssa;

namespace {

Bounds box(std::size_t dim, double lo, double hi) { return {Position(dim, lo), Position(dim, hi)}; }

Spider spider(Position x, double w) {
  Spider s;
  s.position = std::move(x);
  s.weight = w;
  return s;
}

double sphere(const Position& x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return s;
}

}  // namespace

TEST_CASE("spider weight") {
  CHECK(spider_weight(10.0, 10.0, 20.0) == 1.0);
  CHECK(spider_weight(20.0, 10.0, 20.0) == 0.0);
  CHECK(spider_weight(15.0, 10.0, 20.0) == 0.5);
  CHECK(spider_weight(3.0, 3.0, 3.0) == 1.0);

  const std::vector<double> f{4.0, 1.0, INFINITY, 7.0};
  const auto w = population_weights(f);
  CHECK(w == std::vector<double>{0.5, 1.0, 0.0, 0.0});
}

TEST_CASE("female move") {
  const Bounds b = box(1, -10, 10);
  SUBCASE("null move") {
    FemaleDraws d{0.0, 0.0, {0.5}, true, true};
    CHECK(female_move({3.0}, spider({1.0}, 1.0), spider({5.0}, 1.0), d, b) == Position{3.0});
  }
  SUBCASE("already at best and closest") {
    FemaleDraws d{1.0, 1.0, {0.5}, true, true};
    CHECK(female_move({2.0}, spider({2.0}, 1.0), spider({2.0}, 1.0), d, b) == Position{2.0});
  }
  SUBCASE("hand-evaluated attraction") {
    FemaleDraws d{1.0, 0.0, {0.5}, true, true};
    const auto x = female_move({0.0}, spider({1.0}, 0.5), spider({0.0}, 1.0), d, b);
    CHECK(x[0] == doctest::Approx(0.5 * std::exp(-1.0)));
    CHECK(x[0] == doctest::Approx(0.1839).epsilon(1e-3));
  }
  SUBCASE("repulsion flips the sign") {
    FemaleDraws d{1.0, 0.0, {0.5}, false, true};
    const auto x = female_move({0.0}, spider({1.0}, 0.5), spider({0.0}, 1.0), d, b);
    CHECK(x[0] == doctest::Approx(-0.5 * std::exp(-1.0)));
  }
}

TEST_CASE("dominant male move") {
  const Bounds b = box(1, -10, 10);
  CHECK(dominant_male_move({1.0}, spider({4.0}, 1.0), DominantMaleDraws{0.0, {0.5}}, b) == Position{1.0});
  CHECK(dominant_male_move({0.0}, spider({2.0}, 1.0), 0.0, DominantMaleDraws{0.5, {0.5}}, b) == Position{1.0});
  const auto at = dominant_male_move({2.0}, spider({2.0}, 1.0), DominantMaleDraws{0.7, {0.8}}, b);
  CHECK(at[0] == doctest::Approx(2.3));
  // Euclidean distance form: 0.5 * e^{-4} * 2.
  const auto far = dominant_male_move({0.0}, spider({2.0}, 1.0), DominantMaleDraws{0.5, {0.5}}, b);
  CHECK(far[0] == doctest::Approx(std::exp(-4.0)));
}

TEST_CASE("non-dominant male move") {
  const Bounds b = box(1, -10, 10);
  CHECK(nondominant_male_move({4.0}, {2.0}, 1.0, b) == Position{2.0});
  CHECK(nondominant_male_move({4.0}, {2.0}, 0.0, b) == Position{4.0});
  CHECK(nondominant_male_move({4.0}, {2.0}, 0.25, b) == Position{3.5});
}

TEST_CASE("local search shift") {
  const Bounds b = box(1, -10, 10);
  CHECK(local_search_shift({1.0}, {3.0}, {1.0}, 2, 0.0, b) == Position{1.0});
  CHECK(local_search_shift({1.0}, {3.0}, {3.0}, 1, 0.9, b) == Position{1.0});
  CHECK(local_search_shift({1.0}, {3.0}, {1.0}, 2, 0.5, b) == Position{1.5});
}

TEST_CASE("Levy step") {
  const Bounds b = box(2, -10, 10);
  const std::vector<double> ones{1.0, 1.0};
  CHECK(levy_step({1.0, 2.0}, {1.0, 2.0}, ones, b) == Position{1.0, 2.0});
  CHECK(levy_step({1.0, 2.0}, {0.0, 3.0}, ones, b) == Position{2.0, 1.0});
  Rng rng(3);
  CHECK(levy_step({1.0, 2.0}, {1.0, 2.0}, b, 0.0, 1.0, rng) == Position{1.0, 2.0});
}

TEST_CASE("Levy tail index") {
  Rng rng(12345);
  for (double beta : {0.8, 0.5}) {
    std::vector<double> xs(100000);
    for (auto& x : xs) x = levy_sample(beta, rng);
    // Hill estimates the survival exponent; the density decays one power faster.
    const double density_exponent = 1.0 + testing::hill_tail_index(xs, 1000);
    INFO("beta " << beta << " density exponent " << density_exponent);
    CHECK(std::abs(density_exponent - (1.0 + beta)) <= 0.2);
  }
}

TEST_CASE("roulette and mating") {
  SUBCASE("degenerate wheel") {
    Rng rng(1);
    std::vector<Spider> party{spider({1.0, 2.0, 3.0}, 1.0), spider({-1.0, -2.0, -3.0}, 0.0)};
    for (int i = 0; i < 50; ++i) CHECK(mate(party, rng) == Position{1.0, 2.0, 3.0});
  }
  SUBCASE("identical participants") {
    Rng rng(2);
    std::vector<Spider> party{spider({0.5, 0.5}, 0.3), spider({0.5, 0.5}, 0.9)};
    CHECK(mate(party, rng) == Position{0.5, 0.5});
  }
  SUBCASE("selection frequencies") {
    Rng rng(3);
    std::vector<Spider> party{spider({0.0, 0.0, 0.0}, 0.75), spider({1.0, 1.0, 1.0}, 0.25)};
    std::vector<int> hits(3, 0);
    const int trials = 10000;
    for (int i = 0; i < trials; ++i) {
      const auto c = mate(party, rng);
      for (std::size_t d = 0; d < 3; ++d) hits[d] += c[d] == 0.0;
    }
    for (int h : hits) CHECK(std::abs(h / double(trials) - 0.75) <= 0.02);
  }
  SUBCASE("roulette boundaries") {
    const std::vector<double> w{0.0, 1.0, 3.0};
    CHECK(roulette_pick(w, 0.0) == 1);
    CHECK(roulette_pick(w, 0.2499) == 1);
    CHECK(roulette_pick(w, 0.25) == 2);
    CHECK(roulette_pick(std::vector<double>{0.0, 0.0}, 0.7) == 1);
  }
}

TEST_CASE("clamp handles adversarial draws") {
  const Bounds b = box(3, 0.0, 4.0);
  CHECK(clamp({-1e300, NAN, 1e300}, b) == Position{0.0, 0.0, 4.0});
  CHECK(b.mating_radius() == doctest::Approx(2.0));
  std::mt19937_64 gen(9);
  std::uniform_real_distribution<double> wild(-1e6, 1e6);
  for (int i = 0; i < 1000; ++i) {
    FemaleDraws fd{wild(gen), wild(gen), {wild(gen), wild(gen), wild(gen)}, i % 2 == 0, i % 3 == 0};
    const Position x{1.0, 2.0, 3.0};
    for (const auto& y : {female_move(x, spider({4.0, 0.0, 2.0}, 1.0), spider({0.0, 4.0, 1.0}, 0.5), fd, b),
                          dominant_male_move(x, spider({3.0, 3.0, 0.0}, 0.7), DominantMaleDraws{wild(gen), {wild(gen), wild(gen), wild(gen)}}, b),
                          nondominant_male_move(x, {4.0, 4.0, 4.0}, wild(gen), b),
                          local_search_shift(x, {4.0, 0.0, 4.0}, {2.0, 2.0, 2.0}, 2, wild(gen), b),
                          levy_step(x, {0.0, 0.0, 0.0}, std::vector<double>{wild(gen), wild(gen), NAN}, b)}) {
      for (std::size_t d = 0; d < 3; ++d) {
        CHECK(y[d] >= 0.0);
        CHECK(y[d] <= 4.0);
      }
    }
  }
}

TEST_CASE("parameter validation") {
  SsaParams p;
  CHECK_NOTHROW(p.validate());
  p.population_size = 3;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p = SsaParams{};
  p.iterations = 0;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p = SsaParams{};
  p.levy_beta_max = 1.5;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
}

TEST_CASE("optimizer runs are reproducible and elitist") {
  SsaParams p;
  p.seed = 77;
  p.iterations = 30;
  const Bounds b = box(4, -5, 5);
  const auto a = optimize(sphere, b, p);
  const auto c = optimize(sphere, b, p);
  CHECK(a.trace == c.trace);
  CHECK(a.best == c.best);
  for (std::size_t i = 1; i < a.trace.size(); ++i) CHECK(a.trace[i].best_fitness <= a.trace[i - 1].best_fitness);
  CHECK(a.trace.size() == 30);
  CHECK(a.best_fitness == sphere(a.best));
  p.seed = 78;
  CHECK(optimize(sphere, b, p).trace != a.trace);
}

TEST_CASE("weights after a run span [0, 1]") {
  SsaParams p;
  p.iterations = 5;
  const auto r = optimize(sphere, box(3, -5, 5), p);
  double lo = 1.0, hi = 0.0;
  for (const auto& s : r.final_population) {
    CHECK(s.weight >= 0.0);
    CHECK(s.weight <= 1.0);
    lo = std::min(lo, s.weight);
    hi = std::max(hi, s.weight);
  }
  CHECK(hi == 1.0);
  CHECK(lo == 0.0);
}

TEST_CASE("sphere benchmark") {
  int hits = 0;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    SsaParams p;
    p.seed = seed;
    hits += optimize(sphere, box(5, -5, 5), p).best_fitness < 1e-2;
  }
  CHECK(hits >= 95);
}

TEST_CASE("single female degenerate run terminates") {
  SsaParams p;
  p.population_size = 4;
  p.iterations = 3;
  p.female_count = 1;
  const auto r = optimize(sphere, box(2, -1, 1), p);
  CHECK(r.trace.size() == 3);
  CHECK(std::isfinite(r.best_fitness));
  CHECK(r.best_fitness == sphere(r.best));
}

TEST_CASE("objective failures name the iteration") {
  SsaParams p;
  p.iterations = 4;
  int calls = 0;
  const Objective bad = [&](const Position& x) {
    if (++calls > 40) throw std::runtime_error("boom");
    return sphere(x);
  };
  try {
    optimize(bad, box(2, -1, 1), p);
    FAIL("expected a throw");
  } catch (const std::runtime_error& e) {
    const std::string msg = e.what();
    CHECK(msg.find("iteration 1") != std::string::npos);
    CHECK(msg.find("boom") != std::string::npos);
  }
}
