#ifndef IQSWITCH_ORACLE_HPP
#define IQSWITCH_ORACLE_HPP

#include <cstdint>

#include <Eigen/Dense>

#include "iqswitch/switch_core.hpp"

// Brute-force references used to certify the production routines at small
// sizes. Nothing here calls into matching, schedulers or geometry.
namespace iqswitch::oracle {

/// Stationary law of the single queue q <- [q + a - s]^+ with
/// a ~ Bernoulli(lambda), s ~ Bernoulli(mu) independent.
struct BirthDeathSolution {
    double lambda = 0.0;
    double mu = 0.0;
    int q_max = 0;
    Eigen::VectorXd pi;
    double mean = 0.0;
    double detailed_balance_residual = 0.0;
};

/// Solves the truncated chain on {0..q_max} by a sparse linear solve,
/// doubling q_max until pi[q_max] < 1e-10. Requires 0 <= lambda < mu <= 1;
/// throws ConfigError otherwise.
BirthDeathSolution exact_single_queue_mean(double lambda, double mu, int q_max = 64);

struct MatchingResult {
    std::int64_t weight = 0;
    Schedule schedule;
};

/// Enumerates all n! permutations in lexicographic order and keeps the first
/// maximizer. n <= 8.
MatchingResult brute_force_matching(const QueueMatrix& q);

/// E[<q, s>] when s is the best of d uniform schedules drawn with
/// replacement, by enumerating all (n!)^d ordered tuples. n <= 4, d <= 3.
double exact_expected_weight_power_of_d(const QueueMatrix& q, int d);

/// E[<q, s>] for a uniform schedule followed by one flip step on a uniform
/// unordered pair of matched edges. n <= 5.
double exact_expected_weight_random_1_flip(const QueueMatrix& q);

/// Euclidean projection onto {y in span(e^i, e~^j), y >= 0} by enumerating
/// every zero pattern of y and solving the equality-constrained least
/// squares on each; the closest feasible candidate is the projection. n <= 3.
Eigen::MatrixXd active_set_projection(const Eigen::MatrixXd& x);

} // namespace iqswitch::oracle

#endif // IQSWITCH_ORACLE_HPP
