#include "doctest.h"

#include <cmath>
#include <vector>

#include "aoifbl/policies.hpp"

using namespace aoifbl;

namespace {

// Independent error-rate oracle used to brute-force reference allocations.
double per_oracle(double snr, int d, int n) {
    const double c = std::log2(1.0 + snr);
    const double v = 1.0 - std::pow(1.0 + snr, -2.0);
    const double arg = std::sqrt(n / v) * (c - static_cast<double>(d) / n) * std::log(2.0);
    return 0.5 * std::erfc(arg / std::sqrt(2.0));
}

std::vector<ChannelSpec> two_sensor(double db1, double db2) {
    return {ChannelSpec{std::pow(10.0, db1 / 10.0), 16},
            ChannelSpec{std::pow(10.0, db2 / 10.0), 16}};
}

// Reverse scan over every split of the budget: the smallest n1 minimizing
// w1 eps1(n1) + w2 eps2(N - n1) subject to both sensors meeting eps_max where
// possible.
int brute_force_n1(const std::vector<ChannelSpec>& specs, double w1, double w2,
                   int n_max, double eps_max) {
    const int lo = min_blocklength(specs[0], eps_max, 10 * n_max);
    const int hi = n_max - min_blocklength(specs[1], eps_max, 10 * n_max);
    REQUIRE(lo <= hi);
    int best_n1 = hi;
    double best = 1e300;
    for (int n1 = hi; n1 >= lo; --n1) {
        const double obj = w1 * per_oracle(specs[0].snr_linear, 16, n1) +
                           w2 * per_oracle(specs[1].snr_linear, 16, n_max - n1);
        if (obj <= best) {  // reverse scan with <= lands on the smallest argmin
            best = obj;
            best_n1 = n1;
        }
    }
    return best_n1;
}

const std::vector<std::vector<ChannelSpec>> kBenchmarks = {
    two_sensor(-13, -6), two_sensor(-13, -3), two_sensor(-10, -3), two_sensor(-8, -8)};

}  // namespace

TEST_SUITE_BEGIN("policies");

TEST_CASE("uniform allocation floors the split and leaves the remainder idle") {
    CHECK(uniform_allocation(2, 500).n == std::vector<int>{250, 250});
    CHECK(uniform_allocation(3, 500).n == std::vector<int>{166, 166, 166});
    CHECK(uniform_allocation(1, 500).n == std::vector<int>{500});
    CHECK(uniform_allocation(3, 500).total() == 498);
    CHECK_THROWS_AS(uniform_allocation(0, 500), std::invalid_argument);
    CHECK_THROWS_AS(uniform_allocation(5, 4), std::invalid_argument);
}

TEST_CASE("min-PER matches the reverse-scan brute-force oracle") {
    for (const auto& specs : kBenchmarks) {
        const Allocation a = min_per_allocation(specs, 500, 0.1);
        CHECK(a.total() == 500);
        CHECK(a.n[0] == brute_force_n1(specs, 1.0, 1.0, 500, 0.1));
        CHECK(feasibility_check(a, specs, 0.1).ok());
    }
}

TEST_CASE("min-PER benchmark splits") {
    const std::vector<int> expected = {391, 434, 406, 250};
    for (std::size_t i = 0; i < kBenchmarks.size(); ++i)
        CHECK(min_per_allocation(kBenchmarks[i], 500, 0.1).n[0] == expected[i]);
}

TEST_CASE("min-PER throws when the per-sensor minima exceed the budget") {
    CHECK_THROWS_AS(min_per_allocation(two_sensor(-13, -6), 400, 0.1),
                    std::runtime_error);  // needs 384 + 81
}

TEST_CASE("one-step at all-fresh state equals min-PER and is scale invariant") {
    for (const auto& specs : kBenchmarks) {
        const Allocation ref = min_per_allocation(specs, 500, 0.1);
        CHECK(one_step_allocation(AoiState{{1, 1}}, specs, 500, 0.1).n == ref.n);
        CHECK(one_step_allocation(AoiState{{7, 7}}, specs, 500, 0.1).n == ref.n);
    }
}

TEST_CASE("one-step matches the weighted brute-force oracle across states") {
    for (const auto& specs : kBenchmarks)
        for (int a1 : {1, 2, 4, 8})
            for (int a2 : {1, 3, 8}) {
                const Allocation a =
                    one_step_allocation(AoiState{{a1, a2}}, specs, 500, 0.1);
                CHECK(a.total() == 500);
                CHECK(a.n[0] == brute_force_n1(specs, a1, a2, 500, 0.1));
            }
}

TEST_CASE("one-step shifts budget toward the older sensor") {
    const auto specs = two_sensor(-13, -6);
    const int fresh = one_step_allocation(AoiState{{1, 1}}, specs, 500, 0.1).n[0];
    const int aged = one_step_allocation(AoiState{{4, 1}}, specs, 500, 0.1).n[0];
    CHECK(fresh == 391);
    CHECK(aged == 410);
    int prev = 0;
    for (int a1 = 1; a1 <= 8; ++a1) {
        const int n1 = one_step_allocation(AoiState{{a1, 1}}, specs, 500, 0.1).n[0];
        CHECK(n1 >= prev);
        prev = n1;
    }
}

TEST_CASE("one-step rejects malformed states") {
    const auto specs = two_sensor(-13, -6);
    CHECK_THROWS_AS(one_step_allocation(AoiState{{1}}, specs, 500, 0.1),
                    std::invalid_argument);
    CHECK_THROWS_AS(one_step_allocation(AoiState{{0, 1}}, specs, 500, 0.1),
                    std::invalid_argument);
}

TEST_CASE("budget is exhausted at every state") {
    const auto specs = two_sensor(-13, -3);
    for (int a1 = 1; a1 <= 8; ++a1)
        for (int a2 = 1; a2 <= 8; ++a2)
            CHECK(one_step_allocation(AoiState{{a1, a2}}, specs, 500, 0.1).total() == 500);
}

TEST_CASE("three-sensor allocation reaches the exhaustive optimum") {
    const std::vector<ChannelSpec> specs(3, ChannelSpec{std::pow(10.0, -0.6), 16});
    const Allocation a = min_per_allocation(specs, 300, 0.1);
    CHECK(a.total() == 300);
    // Exhaustive scan over the integer simplex with the oracle error rate.
    const int lo = min_blocklength(specs[0], 0.1);  // 81 per sensor
    double best = 1e300;
    for (int n1 = lo; n1 <= 300 - 2 * lo; ++n1)
        for (int n2 = lo; n2 <= 300 - lo - n1; ++n2) {
            const int n3 = 300 - n1 - n2;
            if (n3 < lo) continue;
            const double obj = per_oracle(specs[0].snr_linear, 16, n1) +
                               per_oracle(specs[1].snr_linear, 16, n2) +
                               per_oracle(specs[2].snr_linear, 16, n3);
            best = std::min(best, obj);
        }
    double got = 0.0;
    for (int n : a.n) got += per_oracle(specs[0].snr_linear, 16, n);
    CHECK(got <= best + 1e-12);
}

TEST_CASE("feasibility check flags sensors individually") {
    const auto scen1 = two_sensor(-13, -6);
    const auto r1 = feasibility_check(Allocation{{250, 250}}, scen1, 0.1);
    CHECK_FALSE(r1.sensor_ok[0]);  // -13 dB needs 384 uses
    CHECK(r1.sensor_ok[1]);
    CHECK_FALSE(r1.ok());
    const auto scen4 = two_sensor(-8, -8);
    CHECK(feasibility_check(Allocation{{250, 250}}, scen4, 0.1).ok());
    CHECK_THROWS_AS(feasibility_check(Allocation{{250}}, scen1, 0.1),
                    std::invalid_argument);
}

TEST_CASE("relaxed balance residual on constructed inputs") {
    const std::vector<ChannelSpec> same(2, ChannelSpec{std::pow(10.0, -0.8), 16});
    CHECK(relaxed_balance_residual(Allocation{{250, 250}}, AoiState{{3, 3}}, same) ==
          doctest::Approx(0.0));
    // eps(240) * 1 vs eps(260) * 1: residual = 1 - eps(260)/eps(240).
    const double e240 = per_oracle(same[0].snr_linear, 16, 240);
    const double e260 = per_oracle(same[0].snr_linear, 16, 260);
    CHECK(relaxed_balance_residual(Allocation{{240, 260}}, AoiState{{1, 1}}, same) ==
          doctest::Approx(1.0 - e260 / e240).epsilon(1e-9));
    CHECK_THROWS_AS(
        relaxed_balance_residual(Allocation{{240, 260}}, AoiState{{1}}, same),
        std::invalid_argument);
}

TEST_CASE("allocate dispatches and validates the MDP table") {
    const auto specs = two_sensor(-8, -8);
    const AllocationContext ctx{specs, 500, 0.1};
    CHECK(allocate(Policy{PolicyKind::Uniform, nullptr}, AoiState{{1, 1}}, ctx).n ==
          std::vector<int>{250, 250});
    CHECK(allocate(Policy{PolicyKind::MinPer, nullptr}, AoiState{{5, 1}}, ctx).n[0] == 250);
    CHECK_THROWS_AS(allocate(Policy{PolicyKind::MdpLookup, nullptr}, AoiState{{1, 1}}, ctx),
                    std::invalid_argument);
    QTable bad;
    bad.a_max = 8;
    bad.action_grid = {100, 101};  // wrong endpoints for this scenario
    bad.values.assign(64 * 2, 0.0);
    CHECK_THROWS_AS(allocate(Policy{PolicyKind::MdpLookup, &bad}, AoiState{{1, 1}}, ctx),
                    std::invalid_argument);
}

TEST_CASE("MDP lookup clips ages beyond the table bound") {
    const auto specs = two_sensor(-8, -8);
    const AllocationContext ctx{specs, 500, 0.1};
    QTable q = train(make_mdp_spec({specs[0], specs[1]}, 500, 0.1, 8, 0.9, 500));
    REQUIRE(q.converged);
    const Policy p{PolicyKind::MdpLookup, &q};
    CHECK(allocate(p, AoiState{{20, 31}}, ctx).n == allocate(p, AoiState{{8, 8}}, ctx).n);
    CHECK(allocate(p, AoiState{{3, 9}}, ctx).n == allocate(p, AoiState{{3, 8}}, ctx).n);
}

TEST_CASE("policy names") {
    CHECK(std::string(policy_name(PolicyKind::Uniform)) == "uniform");
    CHECK(std::string(policy_name(PolicyKind::MinPer)) == "min_per");
    CHECK(std::string(policy_name(PolicyKind::OneStep)) == "one_step");
    CHECK(std::string(policy_name(PolicyKind::MdpLookup)) == "mdp");
}

TEST_SUITE_END();
