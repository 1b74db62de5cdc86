#ifndef IQSWITCH_SIMULATION_HPP
#define IQSWITCH_SIMULATION_HPP

#include <cstdint>
#include <functional>
#include <optional>

#include "iqswitch/geometry.hpp"
#include "iqswitch/metrics.hpp"
#include "iqswitch/schedulers.hpp"
#include "iqswitch/traffic.hpp"

namespace iqswitch {

/// Everything the loop saw in one slot, handed to an optional observer.
struct SlotView {
    std::int64_t t;
    const QueueMatrix& q;          // q(t)
    const ArrivalMatrix& arrivals; // a(t)
    const Schedule& schedule;      // s(t)
    const QueueMatrix& unused;     // u(t)
    const QueueMatrix& next_q;     // q(t+1)
    const DecisionTrace* trace;    // null unless MaxWeight weights are tracked
};

struct SimulationOptions {
    std::int64_t horizon = 0;       // slots
    double warmup_fraction = 0.2;
    int batches = 30;
    int thinning = 10;              // SSC norms on every thinning-th slot
    bool ssc = false;
    bool pi2_audit = false;
    bool pi3_audit = false;
    bool keep_taus = true;
    int audit_m = 1;                // m for the 2 m n a_max slack
    ConeOptions cone;
    std::function<void(const SlotView&)> observer;

    bool tracks_maxweight() const { return pi2_audit || pi3_audit || static_cast<bool>(observer); }
};

/// Steady-state summary of one trajectory.
struct RunRecord {
    std::int64_t slots = 0;
    Estimate sum_q;                       // E[sum_ij q_ij]
    std::optional<Estimate> norm_perp_K;  // sampled slots only
    std::optional<Estimate> norm_parallel_K;
    std::optional<Estimate> norm_perp_S;
    std::optional<Pi2Audit> pi2;
    std::optional<Pi3Audit> pi3;
    std::int64_t wasted_service = 0;
};

/// Default horizon ceil(400 / epsilon^2).
std::int64_t default_horizon(double epsilon);

/// Runs one trajectory from the empty state. Arrivals and scheduler draw
/// from separate substreams of (seed, replication), so policies compared
/// at the same seed see the same arrival sequence.
RunRecord simulate(const TrafficSpec& traffic, const SchedulerParams& policy,
                   const SimulationOptions& options, std::uint64_t seed,
                   std::uint64_t replication = 0);

} // namespace iqswitch

#endif // IQSWITCH_SIMULATION_HPP
