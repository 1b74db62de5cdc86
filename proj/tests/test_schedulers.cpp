#include <doctest.h>

#include <cmath>
#include <map>

#include "iqswitch/oracle.hpp"
#include "iqswitch/schedulers.hpp"

using namespace iqswitch;

namespace {

QueueMatrix corner3() {
    QueueMatrix q = QueueMatrix::Zero(3, 3);
    q(0, 0) = 3;
    return q;
}

QueueMatrix random_q(int n, int max_entry, Rng& rng) {
    QueueMatrix q(n, n);
    for (Index k = 0; k < n * n; ++k) q.data()[k] = uniform_below(rng, static_cast<std::uint32_t>(max_entry + 1));
    return q;
}

} // namespace

TEST_CASE("max_weight_matching examples") {
    QueueMatrix q(2, 2);
    q << 3, 1, 1, 2;
    CHECK(max_weight_matching(q) == Schedule::identity(2));
    CHECK(max_weight(q) == 5);
    CHECK(max_weight_matching(QueueMatrix::Zero(2, 2)) == Schedule::identity(2));
    CHECK(max_weight_matching(QueueMatrix::Zero(5, 5)) == Schedule::identity(5));
    q << 0, 5, 5, 0;
    CHECK(max_weight_matching(q) == Schedule({1, 0}));
    CHECK(max_weight(q) == 10);
}

TEST_CASE("max_weight_matching equals enumeration for n <= 6") {
    Rng rng = make_stream(3, 0);
    for (int n = 2; n <= 6; ++n) {
        for (int k = 0; k < 1000; ++k) {
            const QueueMatrix q = random_q(n, k % 3 == 0 ? 2 : 100, rng);
            const auto brute = oracle::brute_force_matching(q);
            const Schedule s = max_weight_matching(q);
            REQUIRE(weight(q, s) == brute.weight);
            REQUIRE(s == brute.schedule);  // lexicographic tie-break
        }
    }
}

TEST_CASE("max_weight_matching works at n = 16") {
    Rng rng = make_stream(4, 0);
    for (int k = 0; k < 50; ++k) {
        const QueueMatrix q = random_q(16, 1, rng);
        const Schedule s = max_weight_matching(q);
        CHECK(weight(q, s) == max_weight(q));
        // Any other schedule is no better.
        for (int r = 0; r < 20; ++r) CHECK(weight(q, random_schedule(16, rng)) <= weight(q, s));
    }
}

TEST_CASE("random_schedule") {
    Rng rng = make_stream(8, 0);
    CHECK(random_schedule(1, rng) == Schedule::identity(1));

    SUBCASE("n = 3 passes a chi-square uniformity test") {
        std::map<std::vector<int>, int> counts;
        constexpr int kDraws = 60000;
        for (int k = 0; k < kDraws; ++k) ++counts[random_schedule(3, rng).permutation()];
        REQUIRE(counts.size() == 6);
        double chi2 = 0.0;
        for (const auto& [perm, c] : counts) chi2 += std::pow(c - kDraws / 6.0, 2) / (kDraws / 6.0);
        CHECK(chi2 < 20.515);  // chi-square(5) upper 1e-3 quantile
    }
    SUBCASE("n = 2 picks the identity half the time") {
        constexpr int kDraws = 100000;
        int hits = 0;
        for (int k = 0; k < kDraws; ++k) hits += random_schedule(2, rng) == Schedule::identity(2);
        CHECK(std::abs(hits / double(kDraws) - 0.5) < 4 * std::sqrt(0.25 / kDraws));
    }
}

TEST_CASE("power_of_d") {
    const QueueMatrix q = corner3();
    SUBCASE("d = 1 is random scheduling") {
        Rng a = make_stream(1, 0), b = make_stream(1, 0);
        for (int k = 0; k < 100; ++k) CHECK(power_of_d(q, 1, a) == random_schedule(3, b));
    }
    SUBCASE("mean weight matches the 36-case enumeration") {
        CHECK(oracle::exact_expected_weight_power_of_d(q, 2) == doctest::Approx(5.0 / 3.0).epsilon(1e-14));
        Rng rng = make_stream(2, 0);
        constexpr int kDraws = 200000;
        double sum = 0.0, sum2 = 0.0;
        for (int k = 0; k < kDraws; ++k) {
            const double w = static_cast<double>(weight(q, power_of_d(q, 2, rng)));
            sum += w;
            sum2 += w * w;
        }
        const double mean = sum / kDraws;
        const double se = std::sqrt((sum2 / kDraws - mean * mean) / kDraws);
        CHECK(std::abs(mean - 5.0 / 3.0) < 4 * se);
    }
    SUBCASE("d = 12 at n = 3 hits the unique maximizer often enough") {
        QueueMatrix u(3, 3);
        u << 9, 1, 2, 3, 8, 1, 0, 2, 7;  // identity is the unique maximizer
        Rng rng = make_stream(3, 0);
        constexpr int kDraws = 50000;
        int hits = 0;
        for (int k = 0; k < kDraws; ++k) hits += weight(u, power_of_d(u, 12, rng)) == max_weight(u);
        const double p_min = 1.0 - std::pow(1.0 - 1.0 / 6.0, 12);
        CHECK(hits / double(kDraws) > p_min - 4 * std::sqrt(p_min * (1 - p_min) / kDraws));
    }
    SUBCASE("d < 1 rejected") {
        Rng rng = make_stream(1, 0);
        CHECK_THROWS_AS(power_of_d(q, 0, rng), ConfigError);
    }
}

TEST_CASE("flip_step") {
    Rng rng = make_stream(9, 0);
    QueueMatrix q(2, 2);
    q << 0, 5, 5, 0;
    CHECK(flip_step(q, Schedule::identity(2), rng) == Schedule({1, 0}));

    const QueueMatrix flat = QueueMatrix::Constant(4, 4, 7);
    const Schedule s({2, 0, 3, 1});
    for (int k = 0; k < 100; ++k) CHECK(flip_step(flat, s, rng) == s);

    for (int k = 0; k < 100; ++k) CHECK(flip_step(corner3(), Schedule::identity(3), rng) == Schedule::identity(3));
}

TEST_CASE("flip chains never lose weight") {
    Rng rng = make_stream(10, 0);
    for (int trial = 0; trial < 200; ++trial) {
        const QueueMatrix q = random_q(6, 20, rng);
        Schedule s = random_schedule(6, rng);
        std::int64_t w = weight(q, s);
        for (int k = 0; k < 30; ++k) {
            flip_step_in_place(q, s, rng);
            REQUIRE(Schedule::is_permutation(s.permutation()));
            const std::int64_t next = weight(q, s);
            REQUIRE(next >= w);
            w = next;
        }
    }
}

TEST_CASE("random_d_flip") {
    const QueueMatrix q = corner3();
    Rng a = make_stream(12, 0), b = make_stream(12, 0);
    for (int k = 0; k < 50; ++k) CHECK(random_d_flip(q, 0, a) == random_schedule(3, b));

    // Weight is 3 when s_00 = 1 (p = 1/3) or the flip repairs it (p = 2/3 * 1/3), so E = 3 * 5/9.
    CHECK(oracle::exact_expected_weight_random_1_flip(q) == doctest::Approx(5.0 / 3.0).epsilon(1e-14));
    const double rhs = 3.0 / 3.0;  // (1/n)<q,1>; the cone term is added in the oracle tests
    CHECK(oracle::exact_expected_weight_random_1_flip(q) >= rhs);

    Rng rng = make_stream(13, 0);
    constexpr int kDraws = 100000;
    double sum = 0.0;
    for (int k = 0; k < kDraws; ++k) sum += static_cast<double>(weight(q, random_d_flip(q, 1, rng)));
    const double se = std::sqrt(20.0 / 9.0 / kDraws);  // Var = 9 p (1 - p) with p = 5/9
    CHECK(std::abs(sum / kDraws - 5.0 / 3.0) < 4 * se);
}

TEST_CASE("d_flip carries its schedule across slots") {
    Rng rng = make_stream(14, 0);
    QueueMatrix q(3, 3);
    q << 0, 4, 0, 0, 0, 4, 4, 0, 0;
    DFlipScheduler frozen(3, 0);
    for (int t = 0; t < 20; ++t) CHECK(frozen.choose(q, rng) == Schedule::identity(3));

    DFlipScheduler flipper(3, 3);
    std::int64_t w = weight(q, flipper.prev_schedule());
    CHECK(flipper.prev_schedule() == Schedule::identity(3));
    for (int t = 0; t < 50; ++t) {
        const Schedule s = flipper.choose(q, rng);
        CHECK(s == flipper.prev_schedule());
        CHECK(weight(q, s) >= w);  // same q: weight can only rise
        w = weight(q, s);
    }
}

TEST_CASE("bursty MaxWeight") {
    Rng rng = make_stream(15, 0);
    QueueMatrix q(2, 2);
    q << 1, 5, 5, 1;
    BurstyMaxWeight b(2, 3);
    CHECK(b.choose(q, rng) == Schedule({1, 0}));
    CHECK(b.recomputed_last());
    QueueMatrix flipped(2, 2);
    flipped << 9, 0, 0, 9;
    CHECK(b.choose(flipped, rng) == Schedule({1, 0}));  // cached
    CHECK(!b.recomputed_last());
    CHECK(b.slot_counter() == 2);
    // An empty system resets the counter, so the next slot recomputes.
    b.choose(QueueMatrix::Zero(2, 2), rng);
    CHECK(b.recomputed_last());
    CHECK(b.slot_counter() == 1);

    BurstyMaxWeight every(2, 1);
    for (int t = 0; t < 5; ++t) CHECK(every.choose(flipped, rng) == max_weight_matching(flipped));
}

TEST_CASE("pipelined MaxWeight uses the schedule of q(t - m)") {
    Rng rng = make_stream(16, 0);
    QueueMatrix q1(2, 2), q2(2, 2);
    q1 << 0, 5, 5, 0;
    q2 << 5, 0, 0, 5;
    PipelinedMaxWeight p(2, 2);
    CHECK(p.pipeline().size() == 2);
    CHECK(p.choose(q1, rng) == Schedule::identity(2));  // bootstrap
    CHECK(p.choose(q2, rng) == Schedule::identity(2));  // bootstrap
    CHECK(p.choose(q2, rng) == Schedule({1, 0}));       // MW(q1)
    CHECK(p.choose(q1, rng) == Schedule::identity(2));  // MW(q2)
    CHECK(p.pipeline().size() == 2);

    PipelinedMaxWeight one(2, 1);
    one.choose(q1, rng);
    CHECK(one.choose(q2, rng) == max_weight_matching(q1));
}

TEST_CASE("randomly delayed MaxWeight") {
    Rng rng = make_stream(17, 0);
    QueueMatrix q(3, 3);
    q << 1, 9, 0, 0, 1, 9, 9, 0, 1;
    RandomlyDelayedMaxWeight always(3, 1.0);
    for (int t = 0; t < 10; ++t) CHECK(always.choose(q, rng) == max_weight_matching(q));

    CHECK_THROWS_AS(RandomlyDelayedMaxWeight(3, 0.0), ConfigError);
    CHECK_THROWS_AS(RandomlyDelayedMaxWeight(3, 1.5), ConfigError);

    RandomlyDelayedMaxWeight lazy(3, 0.1);
    constexpr int kSlots = 1000000;
    int recomputes = 0;
    const QueueMatrix z = QueueMatrix::Zero(3, 3);
    for (int t = 0; t < kSlots; ++t) {
        lazy.choose(z, rng);
        recomputes += lazy.recomputed_last();
    }
    CHECK(std::abs(recomputes / double(kSlots) - 0.1) < 4 * std::sqrt(0.09 / kSlots));
}

TEST_CASE("pick-and-compare never does worse than the previous schedule") {
    Rng rng = make_stream(18, 0);
    PickAndCompare pc(4, 2);
    CHECK(pc.prev_schedule() == Schedule::identity(4));
    for (int t = 0; t < 2000; ++t) {
        const QueueMatrix q = random_q(4, 10, rng);
        const std::int64_t before = weight(q, pc.prev_schedule());
        const Schedule s = pc.choose(q, rng);
        CHECK(weight(q, s) >= before);
        CHECK(s == pc.prev_schedule());
    }
    // Ties keep the previous schedule.
    PickAndCompare tie(3, 4);
    for (int t = 0; t < 20; ++t) CHECK(tie.choose(QueueMatrix::Constant(3, 3, 2), rng) == Schedule::identity(3));
}

TEST_CASE("every policy returns a valid permutation") {
    Rng rng = make_stream(19, 0);
    const std::vector<SchedulerParams> all{
        {Policy::maxweight}, {Policy::random}, {Policy::power_of_d, 3}, {Policy::random_d_flip, 4},
        {Policy::d_flip, 2}, {Policy::bursty_mw, 0, 3}, {Policy::pipelined_mw, 0, 2},
        {Policy::randomly_delayed_mw, 0, 0, 0.3}, {Policy::pick_and_compare, 2}};
    for (const auto& p : all) {
        auto sched = make_scheduler(p, 5);
        CHECK(sched->params().policy == p.policy);
        for (int t = 0; t < 200; ++t) {
            const Schedule s = sched->choose(random_q(5, 6, rng), rng);
            REQUIRE(s.size() == 5);
            REQUIRE(Schedule::is_permutation(s.permutation()));
        }
    }
}

TEST_CASE("policy registry") {
    CHECK(parse_policy("pick_and_compare") == Policy::pick_and_compare);
    CHECK(to_string(parse_policy("d_flip")) == "d_flip");
    CHECK_THROWS_AS(parse_policy("islip"), ConfigError);
    CHECK_THROWS_AS(make_scheduler({Policy::bursty_mw, 0, 0}, 4), ConfigError);
    CHECK_THROWS_AS(make_scheduler({Policy::pick_and_compare, 0}, 4), ConfigError);
    CHECK_NOTHROW(make_scheduler({Policy::d_flip, 0}, 4));
    CHECK(SchedulerParams{Policy::power_of_d, 2}.label() == "power_of_d(d=2)");
}
