#include <doctest.h>

#include <cmath>

#include "sfcl/placement.hpp"
#include "support.hpp"

using namespace sfcl;
using testing::Builder;
using testing::fixture;

namespace {

// 1 kV / 1 MVA base so that ohms equal per unit. Source j0.1 behind bus 1,
// one branch to bus 2 with a CB rated at half the bolted fault current.
Network toy_single(double rating_fraction) {
  Builder b(1.0, 1.0);
  b.substation(1, 0.0, 0.1).bus(2).branch(1, 1, 2, 0.0, 0.0, SwitchKind::sectionalizing, 1e9);
  Network probe = b.build();
  const double bolted = 10.0 * probe.i_base_a();
  b.data.branches[0].cb_rating_a = bolted * rating_fraction;
  return b.build();
}

PlacementProblem resistive_problem(std::vector<BranchId> candidates) {
  PlacementProblem p;
  p.candidates = std::move(candidates);
  p.z_min_ohm = 0.0;
  p.trigger_current_a = 1.0;
  return p;
}

}  // namespace

TEST_CASE("no violation needs no devices") {
  const Network net = toy_single(2.0);
  const auto r = place(resistive_problem({1}), net, SwitchConfig{});
  CHECK(r.feasible);
  CHECK(r.devices.empty());
  CHECK(r.objective == 0.0);
}

TEST_CASE("bisection matches the closed-form series impedance") {
  // |1 / (j0.1 + R)| = 5  =>  R = sqrt(0.2^2 - 0.1^2).
  const Network net = toy_single(0.5);
  PlacementProblem p = resistive_problem({1});
  const PlacementContext ctx(net, SwitchConfig{}, p);
  const auto z = min_impedance_for_set(ctx, {1});
  REQUIRE(z.has_value());
  const double exact = std::sqrt(0.2 * 0.2 - 0.1 * 0.1);
  CHECK(std::abs(z->at(1) - exact) <= 1e-3);
  CHECK(z->at(1) >= exact);
  CHECK(ctx.feasible(*z));

  const auto r = place(ctx);
  CHECK(r.feasible);
  REQUIRE(r.devices.size() == 1);
  CHECK(r.objective == doctest::Approx(z->at(1) + p.omega));
}

TEST_CASE("all-Z_max still violating is infeasible with residuals") {
  const Network net = toy_single(0.5);
  PlacementProblem p = resistive_problem({1});
  p.z_max_ohm = 0.05;
  const PlacementContext ctx(net, SwitchConfig{}, p);
  CHECK_FALSE(min_impedance_for_set(ctx, {1}).has_value());
  const auto r = place(ctx);
  CHECK_FALSE(r.feasible);
  REQUIRE(r.residual_violations.count(1) == 1);
  CHECK(r.residual_violations.at(1) > 0.0);
}

TEST_CASE("open branch in a set is an error") {
  const PlacementContext ctx(subtransient_view(fixture()), testing::tie_config(),
                             resistive_problem({2, 33}));
  CHECK_THROWS_AS(min_impedance_for_set(ctx, {33}), std::invalid_argument);
  CHECK_THROWS_AS(min_impedance_for_set(ctx, {77}), std::invalid_argument);
}

TEST_CASE("exactly one single-branch solution among three candidates") {
  // Star around bus 2; the CB on lateral 3 (2-4) only sees faults at bus 4,
  // whose path holds branches 1 and 3. Candidates 2, 3, 4: only 3 helps.
  Builder b(1.0, 1.0);
  b.substation(1, 0.0, 0.1).bus(2).bus(3).bus(4).bus(5);
  b.branch(1, 1, 2, 0.0, 0.05).branch(2, 2, 3, 0.0, 0.05).branch(3, 2, 4, 0.0, 0.05).branch(4, 2, 5, 0.0, 0.05);
  b.data.branches[2].cb_rating_a = 0.8 * (1.0 / 0.2) * Network(b.data).i_base_a();
  const Network net = b.build();

  const PlacementContext ctx(net, SwitchConfig{}, resistive_problem({2, 3, 4}));
  const auto r = place(ctx);
  const auto oracle = testing::brute_force_placement(ctx);
  REQUIRE(r.feasible);
  CHECK(r.branches() == std::set<BranchId>{3});
  CHECK(r.objective == oracle.objective);
  // Rated at 4 pu: |j0.2 + R| = 0.25.
  const double exact = std::sqrt(0.25 * 0.25 - 0.2 * 0.2);
  CHECK(std::abs(r.devices[0].impedance_ohm - exact) <= 1e-3);
}

TEST_CASE("placement equals the brute-force oracle on random toys") {
  std::mt19937_64 rng(2024);
  int feasible = 0, infeasible = 0;
  for (int i = 0; i < 60; ++i) {
    const auto inst = testing::random_toy(rng, 8);
    const PlacementContext ctx(inst.network, SwitchConfig{}, inst.problem);
    const auto r = place(ctx);
    const auto oracle = testing::brute_force_placement(ctx);
    CHECK(r.feasible == oracle.feasible);
    if (oracle.feasible) {
      CHECK(r.objective == oracle.objective);
      CHECK(r.objective >= inst.problem.omega * static_cast<double>(oracle.set.size()));
      ++feasible;
    } else {
      ++infeasible;
    }
  }
  CHECK(feasible > 0);
}

TEST_CASE("greedy fallback stays feasible") {
  const Network sub = subtransient_view(fixture());
  PlacementProblem p;
  p.candidates = default_candidates(fixture());
  p.exhaustive_cap = 0;
  const PlacementContext ctx(sub, testing::tie_config(), p);
  const auto greedy = place(ctx);
  CHECK_FALSE(greedy.exhaustive);
  CHECK(greedy.feasible);
  CHECK(ctx.feasible([&] {
    std::map<BranchId, double> z;
    for (const auto& d : greedy.devices) z[d.branch] = d.impedance_ohm;
    return z;
  }()));
  p.exhaustive_cap = 12;
  const PlacementContext ctx2(sub, testing::tie_config(), p);
  CHECK(place(ctx2).objective <= greedy.objective);
}

TEST_CASE("default candidates are CB and DG interconnection branches") {
  const auto c = default_candidates(fixture());
  CHECK(c == std::vector<BranchId>{2, 6, 7, 8, 18, 22, 23, 24, 25, 29, 30, 33});
}

TEST_CASE("aggregation") {
  auto result = [](std::vector<std::pair<int, double>> devs) {
    SfclPlacementResult r;
    r.feasible = true;
    for (auto [b, z] : devs) {
      SfclDevice d;
      d.branch = b;
      d.impedance_ohm = z;
      r.devices.push_back(d);
      r.objective += z + 10.0;
    }
    return r;
  };
  SUBCASE("union of level sets") {
    const auto agg = aggregate_devices({result({{4, 0.2}, {20, 0.1}}), result({{3, 0.3}, {20, 0.1}}),
                                        result({{3, 0.3}, {7, 0.7}, {20, 0.1}})});
    CHECK(agg.branches() == std::set<BranchId>{3, 4, 7, 20});
  }
  SUBCASE("idempotent") {
    const auto one = result({{2, 0.9}, {18, 1.3}});
    const auto agg = aggregate_devices({one, one, one});
    CHECK(agg.devices == one.devices);
    CHECK(agg.objective == doctest::Approx(one.objective));
  }
  SUBCASE("max rule") {
    const auto agg = aggregate_devices({result({{20, 0.1}}), result({{20, 0.3}}), result({{20, 0.2}})});
    REQUIRE(agg.devices.size() == 1);
    CHECK(agg.devices[0].impedance_ohm == 0.3);
  }
  SUBCASE("infeasible input") {
    auto bad = result({{2, 1.0}});
    bad.feasible = false;
    CHECK_THROWS_AS(aggregate_devices({bad}), std::invalid_argument);
  }
}

TEST_CASE("aggregate is re-verified on every level") {
  const Network sub = subtransient_view(fixture());
  PlacementProblem p;
  p.candidates = default_candidates(fixture());
  const std::vector<SwitchConfig> configs{testing::tie_config(), SwitchConfig{{7, 9, 14, 32, 37}},
                                          SwitchConfig{{7, 9, 14, 28, 32}}};
  std::vector<std::unique_ptr<PlacementContext>> ctx;
  std::vector<const PlacementContext*> ptrs;
  std::vector<SfclPlacementResult> per_level;
  for (const auto& c : configs) {
    ctx.push_back(std::make_unique<PlacementContext>(sub, c, p));
    ptrs.push_back(ctx.back().get());
    per_level.push_back(place(*ctx.back()));
    REQUIRE(per_level.back().feasible);
  }
  const auto agg = aggregate(per_level, ptrs);
  CHECK(agg.feasible);
  for (const auto& r : per_level) CHECK(agg.branches().size() >= r.branches().size());
  for (const auto* c : ptrs) {
    const auto scan = c->model().scan(devices_for_config(agg, c->config()));
    CHECK(scan.max_loading(c->network()) <= 1.0);
  }
}

TEST_CASE("larger impedances on a feasible set stay feasible") {
  const Network sub = subtransient_view(fixture());
  PlacementProblem p;
  p.candidates = default_candidates(fixture());
  const PlacementContext ctx(sub, testing::tie_config(), p);
  const auto r = place(ctx);
  REQUIRE(r.feasible);
  std::map<BranchId, double> z;
  for (const auto& d : r.devices) z[d.branch] = d.impedance_ohm;
  for (double bump : {0.1, 1.0, 5.0}) {
    auto zz = z;
    for (auto& [id, v] : zz) v = std::min(p.z_max_ohm, v + bump);
    CHECK(ctx.feasible(zz));
  }
}
