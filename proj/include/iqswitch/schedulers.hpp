#ifndef IQSWITCH_SCHEDULERS_HPP
#define IQSWITCH_SCHEDULERS_HPP

#include <deque>
#include <memory>
#include <string>

#include "iqswitch/matching.hpp"
#include "iqswitch/random.hpp"
#include "iqswitch/switch_core.hpp"

namespace iqswitch {

// ---------------------------------------------------------------------------
// Stateless building blocks
// ---------------------------------------------------------------------------

/// Uniform permutation of {0..n-1} by Fisher-Yates.
Schedule random_schedule(int n, Rng& rng);

/// Best of d independent uniform schedules (sampled with replacement).
/// Ties keep the earliest sample.
Schedule power_of_d(const QueueMatrix& q, int d, Rng& rng);

/// One flip step in place: picks an unordered pair of inputs {i, k}
/// uniformly, and swaps their outputs if q_il + q_kj > q_ij + q_kl.
/// Returns true if the schedule changed. No-op for n < 2.
bool flip_step_in_place(const QueueMatrix& q, Schedule& s, Rng& rng);

Schedule flip_step(const QueueMatrix& q, Schedule s, Rng& rng);

/// random_schedule followed by d flip steps.
Schedule random_d_flip(const QueueMatrix& q, int d, Rng& rng);

// ---------------------------------------------------------------------------
// Policies
// ---------------------------------------------------------------------------

enum class Policy {
    maxweight,
    random,
    power_of_d,
    random_d_flip,
    d_flip,
    bursty_mw,
    pipelined_mw,
    randomly_delayed_mw,
    pick_and_compare,
};

std::string to_string(Policy policy);
Policy parse_policy(const std::string& name);

/// Policy identity plus the parameter it uses (d, m or delta).
struct SchedulerParams {
    Policy policy = Policy::maxweight;
    int d = 0;
    int m = 0;
    double delta = 0.0;

    bool uses_d() const;
    bool uses_m() const;
    bool uses_delta() const;
    /// Throws ConfigError if a required parameter is out of range.
    void validate() const;
    /// e.g. "power_of_d(d=2)".
    std::string label() const;
};

/// A scheduling policy bound to one trajectory. Memory-carrying policies
/// start from the identity schedule.
class Scheduler {
public:
    explicit Scheduler(int n) : n_(n) {}
    virtual ~Scheduler() = default;

    /// Schedule for the slot whose pre-arrival queues are q.
    virtual Schedule choose(const QueueMatrix& q, Rng& rng) = 0;
    virtual SchedulerParams params() const = 0;

    int ports() const noexcept { return n_; }
    /// Number of candidate schedules evaluated by the last choose().
    int candidates_considered() const noexcept { return candidates_; }

protected:
    int n_;
    int candidates_ = 0;
};

class MaxWeightScheduler final : public Scheduler {
public:
    using Scheduler::Scheduler;
    Schedule choose(const QueueMatrix& q, Rng& rng) override;
    SchedulerParams params() const override { return {Policy::maxweight}; }
};

class RandomScheduler final : public Scheduler {
public:
    using Scheduler::Scheduler;
    Schedule choose(const QueueMatrix& q, Rng& rng) override;
    SchedulerParams params() const override { return {Policy::random}; }
};

class PowerOfDScheduler final : public Scheduler {
public:
    PowerOfDScheduler(int n, int d);
    Schedule choose(const QueueMatrix& q, Rng& rng) override;
    SchedulerParams params() const override { return {Policy::power_of_d, d_}; }

private:
    int d_;
};

class RandomDFlipScheduler final : public Scheduler {
public:
    RandomDFlipScheduler(int n, int d);
    Schedule choose(const QueueMatrix& q, Rng& rng) override;
    SchedulerParams params() const override { return {Policy::random_d_flip, d_}; }

private:
    int d_;
};

/// d flip steps applied to the previous slot's schedule.
class DFlipScheduler final : public Scheduler {
public:
    DFlipScheduler(int n, int d, Schedule initial = {});
    Schedule choose(const QueueMatrix& q, Rng& rng) override;
    SchedulerParams params() const override { return {Policy::d_flip, d_}; }
    const Schedule& prev_schedule() const noexcept { return prev_; }

private:
    int d_;
    Schedule prev_;
};

/// MaxWeight recomputed every m slots. The slot counter returns to 0
/// whenever the system is empty.
class BurstyMaxWeight final : public Scheduler {
public:
    BurstyMaxWeight(int n, int m);
    Schedule choose(const QueueMatrix& q, Rng& rng) override;
    SchedulerParams params() const override { return {Policy::bursty_mw, 0, m_}; }
    /// Counter value the next choose() will see.
    int slot_counter() const noexcept { return counter_; }
    bool recomputed_last() const noexcept { return recomputed_; }

private:
    int m_;
    int counter_ = 0;
    bool recomputed_ = false;
    Schedule cached_;
};

/// Uses in slot t the MaxWeight schedule of q(t - m); the first m slots use
/// the identity.
class PipelinedMaxWeight final : public Scheduler {
public:
    PipelinedMaxWeight(int n, int m);
    Schedule choose(const QueueMatrix& q, Rng& rng) override;
    SchedulerParams params() const override { return {Policy::pipelined_mw, 0, m_}; }
    const std::deque<Schedule>& pipeline() const noexcept { return pipeline_; }

private:
    int m_;
    std::deque<Schedule> pipeline_;
};

/// With probability delta recompute MaxWeight, else repeat the previous
/// schedule.
class RandomlyDelayedMaxWeight final : public Scheduler {
public:
    RandomlyDelayedMaxWeight(int n, double delta);
    Schedule choose(const QueueMatrix& q, Rng& rng) override;
    SchedulerParams params() const override { return {Policy::randomly_delayed_mw, 0, 0, delta_}; }
    const Schedule& prev_schedule() const noexcept { return prev_; }
    bool recomputed_last() const noexcept { return recomputed_; }

private:
    double delta_;
    Schedule prev_;
    bool recomputed_ = false;
};

/// PC-d: power-of-d candidate compared against the previous schedule; ties
/// keep the previous schedule.
class PickAndCompare final : public Scheduler {
public:
    PickAndCompare(int n, int d);
    Schedule choose(const QueueMatrix& q, Rng& rng) override;
    SchedulerParams params() const override { return {Policy::pick_and_compare, d_}; }
    const Schedule& prev_schedule() const noexcept { return prev_; }

private:
    int d_;
    Schedule prev_;
};

/// Registry: builds the scheduler named by params for an n-port switch.
std::unique_ptr<Scheduler> make_scheduler(const SchedulerParams& params, int n);

} // namespace iqswitch

#endif // IQSWITCH_SCHEDULERS_HPP
