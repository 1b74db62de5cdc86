#include <doctest.h>

#include <cmath>

#include "iqswitch/traffic.hpp"

using namespace iqswitch;

TEST_CASE("uniform traffic rates and variance") {
    const auto spec = make_uniform(2, 0.5);
    CHECK((spec.lambda.array() - 0.25).abs().maxCoeff() < 1e-15);

    const auto s4 = make_uniform(4, 0.1);
    CHECK(s4.sigma_norm2() == doctest::Approx(0.9 * 3.1).epsilon(1e-12));
    CHECK(s4.sigma_norm2() == doctest::Approx((1 - 0.1) * (4 - 1 + 0.1)).epsilon(1e-12));
    // epsilon -> 0: ||sigma||^2 -> n - 1.
    CHECK(make_uniform(4, 1e-9).sigma_norm2() == doctest::Approx(3.0).epsilon(1e-8));
}

TEST_CASE("epsilon outside (0,1) is rejected") {
    CHECK_THROWS_AS(make_uniform(4, 0.0), ConfigError);
    CHECK_THROWS_AS(make_uniform(4, 1.0), ConfigError);
    CHECK_THROWS_AS(make_uniform(4, -0.2), ConfigError);
}

TEST_CASE("Birkhoff mixtures") {
    SUBCASE("identity alone has nu_min = 0 and warns") {
        const auto spec = make_nonuniform(3, 0.1, {{1.0, Schedule::identity(3)}});
        CHECK(spec.nu_min == 0.0);
        CHECK(spec.warnings.size() == 1);
    }
    SUBCASE("two 2x2 permutations average to uniform") {
        const auto spec = make_nonuniform(2, 0.1, {{0.5, Schedule::identity(2)}, {0.5, cyclic_shift(2, 1)}});
        CHECK((spec.nu.array() - 0.5).abs().maxCoeff() < 1e-15);
        CHECK(spec.warnings.empty());
    }
    SUBCASE("0.7 identity + 0.3 spread over the other shifts") {
        const auto spec = make_nonuniform(4, 0.1,
                                          {{0.7, Schedule::identity(4)},
                                           {0.1, cyclic_shift(4, 1)},
                                           {0.1, cyclic_shift(4, 2)},
                                           {0.1, cyclic_shift(4, 3)}});
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) CHECK(spec.nu(i, j) == doctest::Approx(i == j ? 0.7 : 0.1).epsilon(1e-14));
        CHECK(spec.nu_min == doctest::Approx(0.1));
    }
    SUBCASE("coefficients must sum to one") {
        CHECK_THROWS_AS(make_nonuniform(2, 0.1, {{0.5, Schedule::identity(2)}}), ConfigError);
        CHECK_THROWS_AS(make_nonuniform(2, 0.1, {{1.5, Schedule::identity(2)}, {-0.5, cyclic_shift(2, 1)}}),
                        ConfigError);
    }
    SUBCASE("preset is doubly stochastic with positive nu_min") {
        for (int n : {2, 3, 4, 16}) {
            const auto spec = make_nonuniform(n, 0.2, default_nonuniform_preset(n));
            CHECK((spec.nu.rowwise().sum().array() - 1).abs().maxCoeff() < 1e-12);
            CHECK((spec.nu.colwise().sum().array() - 1).abs().maxCoeff() < 1e-12);
            CHECK(spec.nu_min > 0.0);
        }
    }
}

TEST_CASE("non doubly stochastic nu is rejected") {
    Matrix<double> nu(2, 2);
    nu << 0.6, 0.4, 0.5, 0.5;
    CHECK_THROWS_AS(make_traffic(nu, 0.1), ConfigError);
}

TEST_CASE("near-zero rate gives all-zero arrivals") {
    const auto spec = make_uniform(3, 1.0 - 1e-15);
    Rng rng = make_stream(1, 0);
    for (int t = 0; t < 1000; ++t) CHECK(sample_arrivals(spec, rng).sum() == 0);
}

TEST_CASE("empirical arrival moments") {
    // 1e6 slots of 2x2 uniform Bernoulli at lambda = 0.25.
    const auto spec = make_uniform(2, 0.5);
    Rng rng = make_stream(11, 0);
    constexpr int kSlots = 1000000;
    Eigen::Matrix2d sum = Eigen::Matrix2d::Zero(), sum2 = Eigen::Matrix2d::Zero();
    double cross = 0.0;  // E[a_00 a_11]
    for (int t = 0; t < kSlots; ++t) {
        const ArrivalMatrix a = sample_arrivals(spec, rng);
        const Eigen::Matrix2d d = a.cast<double>();
        sum += d;
        sum2 += d.cwiseProduct(d);
        cross += d(0, 0) * d(1, 1);
    }
    const double lam = 0.25, var = lam * (1 - lam);
    const double se_mean = std::sqrt(var / kSlots);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
            const double mean = sum(i, j) / kSlots;
            CHECK(std::abs(mean - lam) < 3 * se_mean);
            const double v = sum2(i, j) / kSlots - mean * mean;
            // Var of the sample variance of a Bernoulli: (mu4 - var^2)/N.
            const double mu4 = lam * std::pow(1 - lam, 4) + (1 - lam) * std::pow(lam, 4);
            CHECK(std::abs(v - var) < 4 * std::sqrt((mu4 - var * var) / kSlots));
        }
    const double cov = cross / kSlots - (sum(0, 0) / kSlots) * (sum(1, 1) / kSlots);
    CHECK(std::abs(cov / var) < 4.0 / std::sqrt(kSlots));
}

TEST_CASE("scaled Bernoulli draws a_max with probability lambda / a_max") {
    // lambda = 0.4 per entry: nu uniform on n = 2 is 0.5, so epsilon = 0.2.
    const auto spec = make_uniform(2, 0.2, ArrivalFamily::scaled_bernoulli, 2);
    CHECK(spec.lambda(0, 0) == doctest::Approx(0.4));
    CHECK(spec.sigma2(0, 0) == doctest::Approx(0.4 * 2 - 0.16));
    Rng rng = make_stream(5, 0);
    constexpr int kSlots = 250000;
    int hits = 0;
    for (int t = 0; t < kSlots; ++t) {
        const ArrivalMatrix a = sample_arrivals(spec, rng);
        CHECK(((a.array() == 0) || (a.array() == 2)).all());
        hits += a(0, 1) == 2;
    }
    const double p = static_cast<double>(hits) / kSlots;
    CHECK(std::abs(p - 0.2) < 3 * std::sqrt(0.2 * 0.8 / kSlots));
}

TEST_CASE("scaled Bernoulli cannot exceed its burst capacity") {
    Matrix<double> nu = Matrix<double>::Identity(2, 2);
    CHECK_NOTHROW(make_traffic(nu, 0.1, ArrivalFamily::scaled_bernoulli, 2));
    CHECK_THROWS_AS(make_traffic(nu, 0.1, ArrivalFamily::scaled_bernoulli, 0), ConfigError);
}
