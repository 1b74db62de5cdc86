#include "iqswitch/verify.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "iqswitch/geometry.hpp"
#include "iqswitch/matching.hpp"
#include "iqswitch/oracle.hpp"
#include "iqswitch/random.hpp"

namespace iqswitch {
namespace {

QueueMatrix random_queues(int n, int max_entry, Rng& rng) {
    QueueMatrix q(n, n);
    for (Index j = 0; j < n; ++j)
        for (Index i = 0; i < n; ++i) q(i, j) = uniform_below(rng, static_cast<std::uint32_t>(max_entry + 1));
    return q;
}

} // namespace

VerifyReport verify_matching(std::uint64_t seed) {
    Rng rng = make_stream(seed, 0);
    VerifyReport r{"matching", true, 0.0, ""};
    int mismatches = 0, cases = 0;
    for (int n = 2; n <= 6; ++n) {
        for (int k = 0; k < 1000; ++k) {
            // Alternate wide and narrow entry ranges so ties get exercised.
            const QueueMatrix q = random_queues(n, k % 2 ? 100 : 3, rng);
            const auto brute = oracle::brute_force_matching(q);
            const Schedule fast = max_weight_matching(q);
            const std::int64_t gap = std::abs(brute.weight - weight(q, fast));
            r.residual = std::max(r.residual, static_cast<double>(gap));
            if (gap != 0 || fast != brute.schedule) ++mismatches;
            ++cases;
        }
    }
    r.passed = mismatches == 0;
    r.detail = std::to_string(cases) + " cases, " + std::to_string(mismatches) + " mismatches";
    return r;
}

VerifyReport verify_projection(std::uint64_t seed) {
    Rng rng = make_stream(seed, 0);
    VerifyReport r{"projection", true, 0.0, ""};
    for (int k = 0; k < 200; ++k) {
        Eigen::MatrixXd x(3, 3);
        for (Index j = 0; j < 3; ++j)
            for (Index i = 0; i < 3; ++i) x(i, j) = -10.0 + 20.0 * uniform01(rng);
        const auto dykstra = project_cone(x);
        const Eigen::MatrixXd exact = oracle::active_set_projection(x);
        r.residual = std::max(r.residual, (dykstra.parallel - exact).norm());
    }
    r.passed = r.residual < 1e-6;
    r.detail = "200 cases, max Frobenius residual";
    return r;
}

VerifyReport verify_weight_bound(std::uint64_t seed) {
    Rng rng = make_stream(seed, 0);
    constexpr int n = 3;
    VerifyReport r{"weight_bound", true, 0.0, ""};
    double worst = 1e300;
    int violations = 0;
    for (int k = 0; k < 100; ++k) {
        const QueueMatrix q = random_queues(n, 50, rng);
        const double perp = project_cone(q.cast<double>().eval()).norm_perp;
        const double rhs = static_cast<double>(q.sum()) / n + perp / (2.0 * n * n * n);
        for (double lhs : {oracle::exact_expected_weight_power_of_d(q, 2), oracle::exact_expected_weight_random_1_flip(q)}) {
            worst = std::min(worst, lhs - rhs);
            if (lhs - rhs < -1e-9) ++violations;
        }
    }
    r.residual = worst;
    r.passed = violations == 0;
    r.detail = "100 cases x {power-of-2, random 1-flip}, min(LHS - RHS), " + std::to_string(violations) + " violations";
    return r;
}

VerifyReport verify_single_queue() {
    VerifyReport r{"single_queue", true, 0.0, ""};
    std::ostringstream detail;
    for (auto [lambda, mu] : {std::pair{0.45, 0.5}, std::pair{0.2375, 0.25}, std::pair{0.1, 0.3}}) {
        const auto sol = oracle::exact_single_queue_mean(lambda, mu);
        const double rho = lambda * (1 - mu) / (mu * (1 - lambda));
        const double closed = rho / (1 - rho);
        const double err = std::abs(sol.mean - closed) / closed;
        r.residual = std::max({r.residual, err, sol.detailed_balance_residual, std::abs(sol.pi.sum() - 1.0)});
        detail << "lambda=" << lambda << " mu=" << mu << " mean=" << sol.mean << "; ";
    }
    r.passed = r.residual < 1e-8;
    r.detail = detail.str();
    return r;
}

std::vector<VerifyReport> run_verification(const std::string& suite) {
    std::vector<VerifyReport> out;
    const bool all = suite == "all";
    if (all || suite == "matching") out.push_back(verify_matching());
    if (all || suite == "projection") out.push_back(verify_projection());
    if (all || suite == "weight_bound") out.push_back(verify_weight_bound());
    if (all || suite == "single_queue") out.push_back(verify_single_queue());
    if (out.empty()) throw ConfigError("unknown verification suite '" + suite + "'");
    return out;
}

} // namespace iqswitch
