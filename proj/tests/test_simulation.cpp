#include <doctest.h>

#include "iqswitch/simulation.hpp"

using namespace iqswitch;

namespace {

SimulationOptions short_run(std::int64_t horizon) {
    SimulationOptions o;
    o.horizon = horizon;
    return o;
}

} // namespace

TEST_CASE("every slot of every policy satisfies the dynamics identities") {
    const auto traffic = make_uniform(4, 0.2);
    for (Policy p : {Policy::maxweight, Policy::random, Policy::power_of_d, Policy::random_d_flip, Policy::d_flip,
                     Policy::bursty_mw, Policy::pipelined_mw, Policy::randomly_delayed_mw, Policy::pick_and_compare}) {
        SchedulerParams params{p, 2, 3, 0.25};
        auto opt = short_run(5000);
        std::int64_t slots = 0;
        opt.observer = [&](const SlotView& v) {
            ++slots;
            REQUIRE(v.next_q == v.q + v.arrivals - v.schedule.matrix() + v.unused);
            REQUIRE(v.next_q.cwiseProduct(v.unused).sum() == 0);
            REQUIRE((v.next_q.array() >= 0).all());
            REQUIRE(v.trace != nullptr);
            REQUIRE(v.trace->chosen_weight <= v.trace->maxweight_weight);
            REQUIRE(v.trace->is_maxweight == (v.trace->chosen_weight == v.trace->maxweight_weight));
        };
        simulate(traffic, params, opt, 99);
        CHECK(slots == 5000);
    }
}

TEST_CASE("runs are reproducible and policies share arrivals") {
    const auto traffic = make_uniform(3, 0.3);
    const auto a = simulate(traffic, {Policy::power_of_d, 2}, short_run(20000), 5, 1);
    const auto b = simulate(traffic, {Policy::power_of_d, 2}, short_run(20000), 5, 1);
    CHECK(a.sum_q.mean == b.sum_q.mean);
    CHECK(a.sum_q.half_width == b.sum_q.half_width);
    const auto c = simulate(traffic, {Policy::power_of_d, 2}, short_run(20000), 5, 2);
    CHECK(a.sum_q.mean != c.sum_q.mean);

    // Bursty with m = 1 follows the MaxWeight trajectory exactly.
    const auto mw = simulate(traffic, {Policy::maxweight}, short_run(20000), 5);
    const auto bursty = simulate(traffic, {Policy::bursty_mw, 0, 1}, short_run(20000), 5);
    CHECK(mw.sum_q.mean == bursty.sum_q.mean);
}

TEST_CASE("pipelined MaxWeight is deterministic given the arrivals") {
    const auto traffic = make_uniform(4, 0.1);
    std::vector<std::int64_t> first, second;
    auto record = [](std::vector<std::int64_t>& out) {
        auto opt = short_run(3000);
        opt.observer = [&out](const SlotView& v) { out.push_back(v.next_q.sum()); };
        return opt;
    };
    simulate(traffic, {Policy::pipelined_mw, 0, 2}, record(first), 8);
    simulate(traffic, {Policy::pipelined_mw, 0, 2}, record(second), 8);
    CHECK(first == second);
}

TEST_CASE("bounded-gap audit holds for bursty and pipelined MaxWeight") {
    const auto traffic = make_uniform(4, 0.1);
    for (const SchedulerParams p : {SchedulerParams{Policy::bursty_mw, 0, 5}, SchedulerParams{Policy::pipelined_mw, 0, 3},
                                    SchedulerParams{Policy::maxweight}}) {
        auto opt = short_run(50000);
        opt.pi2_audit = true;
        opt.audit_m = p.uses_m() ? p.m : 1;
        const auto r = simulate(traffic, p, opt, 3);
        REQUIRE(r.pi2);
        CHECK(r.pi2->violations == 0);
        CHECK(r.pi2->max_gap <= 2 * opt.audit_m * 4);
        if (p.policy == Policy::maxweight) CHECK(r.pi2->max_gap == 0);
    }
}

TEST_CASE("memory audits for randomly delayed MaxWeight and PC-d") {
    const auto traffic = make_uniform(3, 0.1);
    auto opt = short_run(50000);
    opt.pi3_audit = true;

    const auto always = simulate(traffic, {Policy::randomly_delayed_mw, 0, 0, 1.0}, opt, 4);
    CHECK(always.pi3->empirical_delta() == 1.0);
    CHECK(always.pi3->tau.taus == std::vector<std::int64_t>(always.pi3->tau.taus.size(), 1));

    const auto lazy = simulate(traffic, {Policy::randomly_delayed_mw, 0, 0, 0.1}, opt, 4);
    CHECK(lazy.pi3->monotonicity_violations == 0);
    CHECK(lazy.pi3->empirical_delta() >= 0.1);

    const auto pc = simulate(traffic, {Policy::pick_and_compare, 2}, opt, 4);
    CHECK(pc.pi3->monotonicity_violations == 0);
    CHECK(pc.pi3->empirical_delta() >= 2.0 / 6.0);
}

TEST_CASE("SSC sampling produces all three norms") {
    const auto traffic = make_uniform(3, 0.2);
    auto opt = short_run(20000);
    opt.ssc = true;
    opt.thinning = 5;
    const auto r = simulate(traffic, {Policy::maxweight}, opt, 6);
    REQUIRE(r.norm_perp_K);
    CHECK(r.norm_perp_K->mean >= 0.0);
    CHECK(r.norm_parallel_K->mean > 0.0);
    CHECK(r.norm_perp_S->mean <= r.norm_perp_K->mean + 1e-9);
    CHECK(r.norm_perp_K->samples <= 4000);
}

TEST_CASE("bad options are configuration errors") {
    const auto traffic = make_uniform(3, 0.2);
    CHECK_THROWS_AS(simulate(traffic, {Policy::maxweight}, short_run(0), 1), ConfigError);
    CHECK_THROWS_AS(simulate(traffic, {Policy::maxweight}, short_run(100), 1), ConfigError);  // too short for 30 batches
    CHECK_THROWS_AS(simulate(traffic, {Policy::power_of_d, 0}, short_run(5000), 1), ConfigError);
    CHECK(default_horizon(0.1) == 40000);
}
