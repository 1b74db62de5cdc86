#ifndef IQSWITCH_VERIFY_HPP
#define IQSWITCH_VERIFY_HPP

#include <cstdint>
#include <string>
#include <vector>

namespace iqswitch {

/// Outcome of one oracle cross-validation.
struct VerifyReport {
    std::string name;
    bool passed = false;
    double residual = 0.0;  // worst discrepancy (or worst margin, for bounds)
    std::string detail;
};

/// Hungarian vs brute force, 1000 random q for each n in 2..6 (weight and
/// tie-broken schedule must agree).
VerifyReport verify_matching(std::uint64_t seed = 1);
/// Dykstra vs active-set enumeration, 200 random 3x3 inputs in [-10, 10].
VerifyReport verify_projection(std::uint64_t seed = 2);
/// Exact power-of-2 and random 1-flip expectations against
/// (1/n)<q,1> + ||q_perpK|| / (2 n^3), 100 random q at n = 3.
VerifyReport verify_weight_bound(std::uint64_t seed = 3);
/// Truncated birth-death solve against its geometric closed form and the
/// detailed-balance residual.
VerifyReport verify_single_queue();

/// suite: matching | projection | weight_bound | single_queue | all.
std::vector<VerifyReport> run_verification(const std::string& suite);

} // namespace iqswitch

#endif // IQSWITCH_VERIFY_HPP
