#include "iqswitch/simulation.hpp"

#include <cmath>

namespace iqswitch {

std::int64_t default_horizon(double epsilon) {
    if (!(epsilon > 0.0 && epsilon < 1.0)) throw ConfigError("epsilon must lie in (0, 1)");
    return static_cast<std::int64_t>(std::ceil(400.0 / (epsilon * epsilon)));
}

RunRecord simulate(const TrafficSpec& traffic, const SchedulerParams& policy,
                   const SimulationOptions& options, std::uint64_t seed, std::uint64_t replication) {
    policy.validate();
    if (options.horizon < 1) throw ConfigError("horizon must be positive");
    if (options.thinning < 1) throw ConfigError("thinning must be at least 1");

    const int n = traffic.n;
    Rng arrival_rng = make_stream(seed, replication, 0);
    Rng policy_rng = make_stream(seed, replication, 1);
    auto scheduler = make_scheduler(policy, n);

    const std::int64_t horizon = options.horizon;
    const std::int64_t ssc_samples = (horizon + options.thinning - 1) / options.thinning;
    BatchMeans sum_q(horizon, options.warmup_fraction, options.batches);
    std::optional<BatchMeans> perp_k, par_k, perp_s;
    if (options.ssc) {
        perp_k.emplace(ssc_samples, options.warmup_fraction, options.batches);
        par_k.emplace(ssc_samples, options.warmup_fraction, options.batches);
        perp_s.emplace(ssc_samples, options.warmup_fraction, options.batches);
    }
    std::optional<Pi2Auditor> pi2;
    std::optional<Pi3Auditor> pi3;
    if (options.pi2_audit) pi2.emplace(options.audit_m, n, traffic.a_max);
    if (options.pi3_audit) pi3.emplace(options.keep_taus);

    const bool track_mw = options.tracks_maxweight();
    const bool policy_is_mw = policy.policy == Policy::maxweight;

    QueueMatrix q = QueueMatrix::Zero(n, n);
    QueueMatrix q_before;
    QueueMatrix unused = QueueMatrix::Zero(n, n);
    ArrivalMatrix a(n, n);
    Schedule prev;
    DecisionTrace trace;
    RunRecord record;

    for (std::int64_t t = 0; t < horizon; ++t) {
        sum_q.push(static_cast<double>(q.sum()));
        if (options.ssc && t % options.thinning == 0) {
            const SscMetrics m = ssc_metrics(q, options.cone);
            perp_k->push(m.norm_perp_K);
            par_k->push(m.norm_parallel_K);
            perp_s->push(m.norm_perp_S);
        }

        Schedule s = scheduler->choose(q, policy_rng);

        if (track_mw) {
            trace.chosen = s;
            trace.chosen_weight = weight(q, s);
            trace.maxweight_weight = policy_is_mw ? trace.chosen_weight : max_weight(q);
            trace.is_maxweight = trace.chosen_weight == trace.maxweight_weight;
            trace.candidates_considered = scheduler->candidates_considered();
            trace.has_prev = t > 0;
            trace.prev_schedule_weight = t > 0 ? weight(q, prev) : 0;
            if (pi2) pi2->observe(trace);
            if (pi3) pi3->observe(trace);
        }

        sample_arrivals_into(traffic, arrival_rng, a);
        if (options.observer) q_before = q;
        record.wasted_service += step_in_place(q, a, s, unused);
        if (options.observer)
            options.observer(SlotView{t, q_before, a, s, unused, q, track_mw ? &trace : nullptr});
        prev = std::move(s);
    }

    record.slots = horizon;
    record.sum_q = sum_q.finish();
    if (options.ssc) {
        record.norm_perp_K = perp_k->finish();
        record.norm_parallel_K = par_k->finish();
        record.norm_perp_S = perp_s->finish();
    }
    if (pi2) record.pi2 = pi2->result();
    if (pi3) record.pi3 = pi3->result();
    return record;
}

} // namespace iqswitch
