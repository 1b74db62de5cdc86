#ifndef IQSWITCH_METRICS_HPP
#define IQSWITCH_METRICS_HPP

#include <cstdint>
#include <span>
#include <vector>

#include "iqswitch/switch_core.hpp"

namespace iqswitch {

/// Steady-state mean with a 95% confidence half-width.
struct Estimate {
    double mean = 0.0;
    double half_width = 0.0;
    int batches = 0;
    std::int64_t samples = 0;
};

/// Two-sided 95% Student-t quantile with `dof` degrees of freedom.
double t_quantile_975(int dof);

/// Batch means: drops the first floor(warmup_fraction * size) samples,
/// splits the rest into num_batches equal batches (a remainder shorter than
/// one batch is dropped from the tail), and returns the mean of batch means
/// with a Student-t interval over batches. Throws ConfigError when fewer than
/// 10 * num_batches samples remain after warmup.
Estimate estimate_mean(std::span<const double> series, double warmup_fraction = 0.2,
                       int num_batches = 30);

/// Streaming form of estimate_mean for a series of known length. Feeding the
/// same values gives the same Estimate without storing the series.
class BatchMeans {
public:
    BatchMeans(std::int64_t length, double warmup_fraction = 0.2, int num_batches = 30);

    void push(double value);
    std::int64_t pushed() const noexcept { return index_; }
    Estimate finish() const;

private:
    std::int64_t length_;
    std::int64_t warmup_;
    std::int64_t batch_size_;
    int num_batches_;
    std::int64_t index_ = 0;
    std::vector<double> sums_;
};

/// Estimate built from independent replication means (R >= 2).
Estimate combine_replications(std::span<const double> means, std::int64_t samples_per_replication);

/// epsilon * E[sum q], interval scaled alike.
Estimate scaled_queue_length(const Estimate& sum_q, double epsilon);

/// Lower bound valid for any scheduler: ||sigma||^2 / 2 - epsilon (1 - epsilon) / 2.
double universal_lower_bound(double sigma_norm2, double epsilon);

/// (1 - 1/2n) ||sigma~||^2, the limit of epsilon E[sum q] under MaxWeight-like policies.
double maxweight_limit(int n, double sigma_tilde_norm2);

// ---------------------------------------------------------------------------
// Per-slot audits
// ---------------------------------------------------------------------------

/// What one scheduling decision looked like next to MaxWeight.
struct DecisionTrace {
    Schedule chosen;
    std::int64_t chosen_weight = 0;
    std::int64_t maxweight_weight = 0;
    bool is_maxweight = false;
    int candidates_considered = 0;
    bool has_prev = false;            // false in the first slot
    std::int64_t prev_schedule_weight = 0;  // <q(t), s(t-1)>
};

struct Pi2Audit {
    std::int64_t slots = 0;
    std::int64_t violations = 0;  // slots with gap > 2 m n a_max
    std::int64_t max_gap = 0;
    std::int64_t bound = 0;
};

/// Bounded-gap check against the 2 m n a_max slack.
class Pi2Auditor {
public:
    Pi2Auditor(int m, int n, int a_max);
    void observe(const DecisionTrace& trace);
    const Pi2Audit& result() const noexcept { return audit_; }

private:
    Pi2Audit audit_;
};

Pi2Audit audit_pi2(std::span<const DecisionTrace> traces, int m, int n, int a_max);

/// Gaps tau_k = T_{k+1} - T_k between slots where the chosen schedule had
/// MaxWeight weight.
struct TauRecord {
    std::vector<std::int64_t> taus;

    /// Empirical P(tau > c).
    double ccdf(std::int64_t c) const;
    /// Largest P^(tau > c) - (1 - delta)^c - z * SE over c = 1..c_max, with
    /// SE the binomial standard error of P^. Nonpositive means the tail is
    /// dominated by Geometric(delta) at this resolution.
    double geometric_tail_excess(double delta, int c_max, double z = 4.0) const;
};

struct Pi3Audit {
    std::int64_t slots = 0;
    std::int64_t monotonicity_violations = 0;  // <q(t),s(t)> < <q(t),s(t-1)>
    std::int64_t maxweight_slots = 0;
    TauRecord tau;

    double empirical_delta() const {
        return slots > 0 ? static_cast<double>(maxweight_slots) / static_cast<double>(slots) : 0.0;
    }
};

class Pi3Auditor {
public:
    explicit Pi3Auditor(bool keep_taus = true) : keep_taus_(keep_taus) {}
    void observe(const DecisionTrace& trace);
    const Pi3Audit& result() const noexcept { return audit_; }

private:
    bool keep_taus_;
    std::int64_t t_ = 0;
    std::int64_t last_mw_ = -1;
    Pi3Audit audit_;
};

Pi3Audit audit_pi3(std::span<const DecisionTrace> traces);

/// One point of a size sweep with epsilon(n) = c n^-beta.
struct SizePoint {
    int n = 0;
    double epsilon = 0.0;
    Estimate sum_q;
};

/// epsilon(n) / n * E[sum q] per point, with scaled intervals.
std::vector<Estimate> large_scale_ratio(std::span<const SizePoint> points);

} // namespace iqswitch

#endif // IQSWITCH_METRICS_HPP
