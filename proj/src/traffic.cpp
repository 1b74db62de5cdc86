#include "iqswitch/traffic.hpp"

#include <cmath>

namespace iqswitch {

std::string to_string(ArrivalFamily family) {
    switch (family) {
    case ArrivalFamily::bernoulli: return "bernoulli";
    case ArrivalFamily::scaled_bernoulli: return "scaled_bernoulli";
    }
    return "unknown";
}

ArrivalFamily parse_family(const std::string& name) {
    if (name == "bernoulli") return ArrivalFamily::bernoulli;
    if (name == "scaled_bernoulli") return ArrivalFamily::scaled_bernoulli;
    throw ConfigError("unknown arrival family '" + name + "'");
}

TrafficSpec make_traffic(const Matrix<double>& nu, double epsilon, ArrivalFamily family, int a_max) {
    if (nu.rows() != nu.cols() || nu.rows() < 2) throw ConfigError("nu must be square with n >= 2");
    if (!(epsilon > 0.0 && epsilon < 1.0)) throw ConfigError("epsilon must lie in (0, 1)");
    if (family == ArrivalFamily::bernoulli) a_max = 1;
    if (a_max < 1) throw ConfigError("a_max must be at least 1");
    if ((nu.array() < 0.0).any()) throw ConfigError("nu has a negative entry");

    constexpr double kTol = 1e-12;
    const double row_err = (nu.rowwise().sum().array() - 1.0).abs().maxCoeff();
    const double col_err = (nu.colwise().sum().array() - 1.0).abs().maxCoeff();
    if (row_err > kTol || col_err > kTol) throw ConfigError("nu is not doubly stochastic");

    TrafficSpec spec;
    spec.n = static_cast<int>(nu.rows());
    spec.nu = nu;
    spec.epsilon = epsilon;
    spec.family = family;
    spec.a_max = a_max;
    spec.lambda = (1.0 - epsilon) * nu;
    spec.nu_min = nu.minCoeff();
    spec.emit_probability = spec.lambda / static_cast<double>(a_max);
    if ((spec.emit_probability.array() > 1.0).any())
        throw ConfigError("arrival rate exceeds what the family can produce");

    // Var of a_max * Bernoulli(lambda / a_max) = lambda a_max - lambda^2.
    spec.sigma2 = (spec.lambda.array() * a_max - spec.lambda.array().square()).matrix();
    if (spec.nu_min <= 0.0)
        spec.warnings.emplace_back("nu_min = 0: some pair has zero rate (heavy-traffic assumption needs nu_min > 0)");
    return spec;
}

TrafficSpec make_uniform(int n, double epsilon, ArrivalFamily family, int a_max) {
    if (n < 2) throw ConfigError("switch needs at least two ports");
    return make_traffic(Matrix<double>::Constant(n, n, 1.0 / n), epsilon, family, a_max);
}

TrafficSpec make_nonuniform(int n, double epsilon, const std::vector<MixtureTerm>& weights,
                            ArrivalFamily family, int a_max) {
    if (n < 2) throw ConfigError("switch needs at least two ports");
    if (weights.empty()) throw ConfigError("mixture has no terms");
    double total = 0.0;
    Matrix<double> nu = Matrix<double>::Zero(n, n);
    for (const auto& term : weights) {
        if (term.coefficient < 0.0) throw ConfigError("mixture coefficient is negative");
        if (term.permutation.size() != n) throw ConfigError("mixture permutation has the wrong size");
        total += term.coefficient;
        for (int i = 0; i < n; ++i) nu(i, term.permutation[i]) += term.coefficient;
    }
    if (std::abs(total - 1.0) > 1e-9) throw ConfigError("mixture coefficients do not sum to 1");
    // Remove the (<= 1e-9) coefficient drift so the 1e-12 check applies to
    // the mixture shape, not to rounding in the user's coefficients.
    nu /= total;
    return make_traffic(nu, epsilon, family, a_max);
}

Schedule cyclic_shift(int n, int k) {
    std::vector<int> perm(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) perm[static_cast<std::size_t>(i)] = ((i + k) % n + n) % n;
    return Schedule(std::move(perm));
}

std::vector<MixtureTerm> default_nonuniform_preset(int n) {
    std::vector<MixtureTerm> terms;
    for (int k = 0; k < n; ++k) {
        double c = 0.6 / n;
        if (k == 0) c += 0.4 * 0.5;
        if (k == 1) c += 0.4 * 0.3;
        if (k == 2 % n) c += 0.4 * 0.2;
        terms.push_back({c, cyclic_shift(n, k)});
    }
    return terms;
}

void sample_arrivals_into(const TrafficSpec& spec, Rng& rng, ArrivalMatrix& a) {
    const Index n = spec.n;
    a.resize(n, n);
    const double* p = spec.emit_probability.data();
    std::int64_t* out = a.data();
    const std::int64_t burst = spec.a_max;
    for (Index k = 0; k < n * n; ++k) out[k] = uniform01(rng) < p[k] ? burst : 0;
}

ArrivalMatrix sample_arrivals(const TrafficSpec& spec, Rng& rng) {
    ArrivalMatrix a;
    sample_arrivals_into(spec, rng, a);
    return a;
}

} // namespace iqswitch
