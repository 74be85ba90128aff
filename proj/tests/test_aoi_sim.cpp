#include "doctest.h"

#include <cmath>
#include <set>
#include <vector>

#include "aoifbl/aoi_sim.hpp"

using namespace aoifbl;

namespace {

Scenario small_scenario(double db1, double db2) {
    Scenario s;
    s.name = "test";
    s.snr_db = {db1, db2};
    s.specs = {ChannelSpec{std::pow(10.0, db1 / 10.0), 16},
               ChannelSpec{std::pow(10.0, db2 / 10.0), 16}};
    return s;
}

}  // namespace

TEST_SUITE_BEGIN("aoi_sim");

TEST_CASE("trial seeds are deterministic and collision-free") {
    std::set<std::uint64_t> seen;
    for (int t = 0; t < 1000; ++t) seen.insert(trial_seed(42, t));
    CHECK(seen.size() == 1000);
    CHECK(trial_seed(42, 7) == trial_seed(42, 7));
    CHECK(trial_seed(42, 7) != trial_seed(43, 7));
}

TEST_CASE("step resets on certain success and ages on certain failure") {
    const std::vector<ChannelSpec> specs = {ChannelSpec{std::pow(10.0, -0.3), 16},
                                            ChannelSpec{std::pow(10.0, -0.3), 16}};
    std::mt19937_64 rng(1);
    // 400 uses at -3 dB: error probability below 1e-30, success certain.
    AoiState state{{5, 3}};
    for (int k = 0; k < 1000; ++k) {
        state = step(state, Allocation{{400, 400}}, specs, rng);
        CHECK(state.a == std::vector<int>{1, 1});
    }
    // One channel use cannot carry 16 bits: eps rounds to 1, failure certain.
    state = AoiState{{5, 3}};
    for (int k = 1; k <= 50; ++k) {
        state = step(state, Allocation{{1, 400}}, specs, rng);
        CHECK(state.a[0] == 5 + k);
        CHECK(state.a[1] == 1);
    }
    CHECK_THROWS_AS(step(AoiState{{1}}, Allocation{{10, 10}}, specs, rng),
                    std::invalid_argument);
}

TEST_CASE("failure frequency matches the analytic error rate") {
    // n chosen so eps is close to 0.1; compare the empirical frequency over
    // many single-step draws against the exact value within 4 binomial sigma.
    const ChannelSpec spec{std::pow(10.0, -1.3), 16};
    const double eps = packet_error_rate(spec, 384);
    const int draws = 100000;
    std::mt19937_64 rng(123);
    int failures = 0;
    AoiState state{{1}};
    const std::vector<ChannelSpec> specs = {spec};
    for (int i = 0; i < draws; ++i) {
        state.a = {1};
        if (step(state, Allocation{{384}}, specs, rng).a[0] != 1) ++failures;
    }
    const double freq = static_cast<double>(failures) / draws;
    const double sigma = std::sqrt(eps * (1.0 - eps) / draws);
    CHECK(std::abs(freq - eps) < 4.0 * sigma);
}

TEST_CASE("episodes are reproducible and respond to the seed") {
    // Error rates near 0.1 per sensor, so distinct seeds are virtually
    // certain to diverge within 50 periods.
    Scenario s = small_scenario(-13, -6);
    s.periods = 50;
    const Policy p{PolicyKind::MinPer, nullptr};
    const Trajectory t1 = run_episode(s, p, 99);
    const Trajectory t2 = run_episode(s, p, 99);
    REQUIRE(t1.states.size() == 50);
    for (std::size_t k = 0; k < t1.states.size(); ++k)
        CHECK(t1.states[k].a == t2.states[k].a);
    const Trajectory t3 = run_episode(s, p, 100);
    bool same = true;
    for (std::size_t k = 0; k < t1.states.size(); ++k)
        same = same && t1.states[k].a == t3.states[k].a;
    CHECK_FALSE(same);
    CHECK(t1.allocs.size() == 50);
    CHECK(t1.delivered.size() == 50);
}

TEST_CASE("discounted sum of an all-fresh run equals the lower bound") {
    Scenario s = small_scenario(-8, -8);
    Trajectory traj;
    for (int k = 0; k < s.periods; ++k) traj.states.push_back(AoiState{{1, 1}});
    const double d = discounted_aoi(traj, s.gamma);
    CHECK(std::abs(d - discounted_lower_bound(s)) < 1e-12);
    CHECK(std::abs(discounted_lower_bound(s) - 20.0) < 1e-12);  // gamma^500 ~ 0
}

TEST_CASE("single-period discounted sum is the plain age sum") {
    Trajectory traj;
    traj.states.push_back(AoiState{{3, 2}});
    CHECK(discounted_aoi(traj, 0.9) == doctest::Approx(5.0).epsilon(1e-15));
    CHECK_THROWS_AS(discounted_aoi(traj, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(discounted_aoi(traj, 0.0), std::invalid_argument);
}

TEST_CASE("forward accumulation agrees with backward Horner evaluation") {
    Scenario s = small_scenario(-13, -6);
    const Trajectory traj = run_episode(s, Policy{PolicyKind::OneStep, nullptr}, 7);
    const double forward = discounted_aoi(traj, s.gamma);
    double backward = 0.0;
    for (std::size_t k = traj.states.size(); k-- > 0;) {
        int abs_a = 0;
        for (int a : traj.states[k].a) abs_a += a;
        backward = abs_a + s.gamma * backward;
    }
    CHECK(std::abs(forward - backward) < 1e-9);
    CHECK(forward >= discounted_lower_bound(s) - 1e-9);
}

TEST_CASE("monte_carlo is bit-stable and bounded below") {
    Scenario s = small_scenario(-13, -6);
    s.trials = 50;
    s.periods = 100;
    const Policy p{PolicyKind::OneStep, nullptr};
    const SimMetrics m1 = monte_carlo(s, p, 5);
    const SimMetrics m2 = monte_carlo(s, p, 5);
    CHECK(m1.delta_d_mean == m2.delta_d_mean);
    CHECK(m1.var_d == m2.var_d);
    CHECK(m1.delta_mean_abs_a == m2.delta_mean_abs_a);
    CHECK(m1.var_abs_a == m2.var_abs_a);
    CHECK(m1.delta_d_mean >= -1e-9);
    CHECK(m1.delta_mean_abs_a >= -1e-9);
    CHECK(m1.var_d >= 0.0);
    CHECK(m1.var_abs_a >= 0.0);
    CHECK(m1.feasible);
}

TEST_CASE("infeasible policies are flagged, not rejected") {
    Scenario s = small_scenario(-13, -6);
    s.trials = 5;
    s.periods = 50;
    const SimMetrics m = monte_carlo(s, Policy{PolicyKind::Uniform, nullptr}, 1);
    CHECK_FALSE(m.feasible);  // 250 uses cannot satisfy eps_max at -13 dB
    CHECK(m.delta_d_mean > 0.0);
}

TEST_CASE("stale-age frequency is binomially consistent") {
    // A sensor's age exceeds 1 exactly when its last transmission failed, so
    // the count of stale periods is Binomial(N, eps) under a fixed allocation.
    Scenario s = small_scenario(-8, -8);
    s.trials = 100;
    s.periods = 200;
    StateCounts counts;
    monte_carlo(s, Policy{PolicyKind::MinPer, nullptr}, 11, &counts);
    const double eps = packet_error_rate(s.specs[0], 250);
    long stale = 0, total = 0;
    for (const auto& [state, c] : counts) {
        total += c;
        if (state.first > 1) stale += c;
    }
    CHECK(total == 100L * 200L);
    const double freq = static_cast<double>(stale) / static_cast<double>(total);
    const double sigma = std::sqrt(eps * (1.0 - eps) / static_cast<double>(total));
    CHECK(std::abs(freq - eps) < 4.0 * sigma);
}

TEST_CASE("scenario validation") {
    Scenario s = small_scenario(-8, -8);
    s.gamma = 1.0;
    CHECK_THROWS_AS(s.validate(), std::invalid_argument);
    s = small_scenario(-8, -8);
    s.a0 = {1};
    CHECK_THROWS_AS(s.validate(), std::invalid_argument);
    s = small_scenario(-8, -8);
    s.eps_max = 0.6;
    CHECK_THROWS_AS(s.validate(), std::invalid_argument);
    s = small_scenario(-8, -8);
    s.trials = 0;
    CHECK_THROWS_AS(s.validate(), std::invalid_argument);
    CHECK_NOTHROW(small_scenario(-8, -8).validate());
}

TEST_SUITE_END();
