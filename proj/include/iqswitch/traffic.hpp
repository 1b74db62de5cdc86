#ifndef IQSWITCH_TRAFFIC_HPP
#define IQSWITCH_TRAFFIC_HPP

#include <string>
#include <vector>

#include "iqswitch/random.hpp"
#include "iqswitch/switch_core.hpp"

namespace iqswitch {

enum class ArrivalFamily {
    bernoulli,        // a_ij in {0, 1}
    scaled_bernoulli, // a_ij in {0, a_max}
};

std::string to_string(ArrivalFamily family);
ArrivalFamily parse_family(const std::string& name);

/// One term of a Birkhoff-von Neumann mixture nu = sum_k coefficient_k P_k.
struct MixtureTerm {
    double coefficient;
    Schedule permutation;
};

/// Arrival law: lambda = (1 - epsilon) nu with independent entries drawn
/// from `family`. Immutable once built.
struct TrafficSpec {
    int n = 0;
    Matrix<double> nu;      // doubly stochastic
    double epsilon = 0.0;   // heavy-traffic parameter, load = 1 - epsilon
    ArrivalFamily family = ArrivalFamily::bernoulli;
    int a_max = 1;
    Matrix<double> lambda;  // mean arrivals per slot
    Matrix<double> sigma2;  // per-entry arrival variance
    Matrix<double> emit_probability;  // P(a_ij = a_max)
    double nu_min = 0.0;
    std::vector<std::string> warnings;

    double load() const noexcept { return 1.0 - epsilon; }
    /// ||sigma||^2, the sum of per-entry variances.
    double sigma_norm2() const { return sigma2.sum(); }
};

/// Builds a spec from an arbitrary doubly stochastic nu. Throws ConfigError
/// when nu is not doubly stochastic within 1e-12, epsilon is outside (0,1),
/// or the family cannot realize lambda.
TrafficSpec make_traffic(const Matrix<double>& nu, double epsilon,
                         ArrivalFamily family = ArrivalFamily::bernoulli, int a_max = 1);

/// lambda_ij = (1 - epsilon) / n on every pair.
TrafficSpec make_uniform(int n, double epsilon,
                         ArrivalFamily family = ArrivalFamily::bernoulli, int a_max = 1);

/// nu = sum_k alpha_k P_k. Coefficients must be nonnegative and sum to 1
/// within 1e-9.
TrafficSpec make_nonuniform(int n, double epsilon, const std::vector<MixtureTerm>& weights,
                            ArrivalFamily family = ArrivalFamily::bernoulli, int a_max = 1);

/// Input i -> output (i + k) mod n.
Schedule cyclic_shift(int n, int k);

/// Stand-in non-uniform rate matrix used for the load sweep study:
/// 0.6 * (1/n) 1 + 0.4 * (0.5 I + 0.3 R + 0.2 R^2), R the unit cyclic shift.
std::vector<MixtureTerm> default_nonuniform_preset(int n);

/// Draws a(t). Entries are independent across pairs and slots.
ArrivalMatrix sample_arrivals(const TrafficSpec& spec, Rng& rng);
void sample_arrivals_into(const TrafficSpec& spec, Rng& rng, ArrivalMatrix& a);

} // namespace iqswitch

#endif // IQSWITCH_TRAFFIC_HPP
