#include "iqswitch/schedulers.hpp"

#include <sstream>

namespace iqswitch {

Schedule random_schedule(int n, Rng& rng) {
    std::vector<int> perm(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) perm[static_cast<std::size_t>(i)] = i;
    for (int i = n - 1; i > 0; --i) {
        const auto j = uniform_below(rng, static_cast<std::uint32_t>(i + 1));
        std::swap(perm[static_cast<std::size_t>(i)], perm[j]);
    }
    return Schedule::unchecked(std::move(perm));
}

Schedule power_of_d(const QueueMatrix& q, int d, Rng& rng) {
    if (d < 1) throw ConfigError("power_of_d: d must be at least 1");
    const int n = static_cast<int>(q.rows());
    Schedule best = random_schedule(n, rng);
    std::int64_t best_w = weight(q, best);
    for (int k = 1; k < d; ++k) {
        Schedule cand = random_schedule(n, rng);
        const std::int64_t w = weight(q, cand);
        if (w > best_w) {
            best = std::move(cand);
            best_w = w;
        }
    }
    return best;
}

bool flip_step_in_place(const QueueMatrix& q, Schedule& s, Rng& rng) {
    const int n = s.size();
    if (n < 2) return false;
    const int i = static_cast<int>(uniform_below(rng, static_cast<std::uint32_t>(n)));
    int k = static_cast<int>(uniform_below(rng, static_cast<std::uint32_t>(n - 1)));
    if (k >= i) ++k;
    const int j = s[i];
    const int l = s[k];
    if (q(i, j) + q(k, l) >= q(i, l) + q(k, j)) return false;
    s.swap_outputs(i, k);
    return true;
}

Schedule flip_step(const QueueMatrix& q, Schedule s, Rng& rng) {
    if (q.rows() != s.size()) throw ConfigError("flip_step: schedule size does not match queue matrix");
    flip_step_in_place(q, s, rng);
    return s;
}

Schedule random_d_flip(const QueueMatrix& q, int d, Rng& rng) {
    if (d < 0) throw ConfigError("random_d_flip: d must be nonnegative");
    Schedule s = random_schedule(static_cast<int>(q.rows()), rng);
    for (int k = 0; k < d; ++k) flip_step_in_place(q, s, rng);
    return s;
}

// ---------------------------------------------------------------------------

std::string to_string(Policy policy) {
    switch (policy) {
    case Policy::maxweight: return "maxweight";
    case Policy::random: return "random";
    case Policy::power_of_d: return "power_of_d";
    case Policy::random_d_flip: return "random_d_flip";
    case Policy::d_flip: return "d_flip";
    case Policy::bursty_mw: return "bursty_mw";
    case Policy::pipelined_mw: return "pipelined_mw";
    case Policy::randomly_delayed_mw: return "randomly_delayed_mw";
    case Policy::pick_and_compare: return "pick_and_compare";
    }
    return "unknown";
}

Policy parse_policy(const std::string& name) {
    for (Policy p : {Policy::maxweight, Policy::random, Policy::power_of_d, Policy::random_d_flip,
                     Policy::d_flip, Policy::bursty_mw, Policy::pipelined_mw,
                     Policy::randomly_delayed_mw, Policy::pick_and_compare}) {
        if (to_string(p) == name) return p;
    }
    throw ConfigError("unknown scheduler '" + name + "'");
}

bool SchedulerParams::uses_d() const {
    return policy == Policy::power_of_d || policy == Policy::random_d_flip ||
           policy == Policy::d_flip || policy == Policy::pick_and_compare;
}

bool SchedulerParams::uses_m() const {
    return policy == Policy::bursty_mw || policy == Policy::pipelined_mw;
}

bool SchedulerParams::uses_delta() const { return policy == Policy::randomly_delayed_mw; }

void SchedulerParams::validate() const {
    const bool flip = policy == Policy::random_d_flip || policy == Policy::d_flip;
    if (uses_d() && d < (flip ? 0 : 1))
        throw ConfigError(to_string(policy) + ": d must be at least " + (flip ? "0" : "1"));
    if (uses_m() && m < 1) throw ConfigError(to_string(policy) + ": m must be at least 1");
    if (uses_delta() && !(delta > 0.0 && delta <= 1.0))
        throw ConfigError("randomly_delayed_mw: delta must lie in (0, 1]");
}

std::string SchedulerParams::label() const {
    std::ostringstream out;
    out << to_string(policy);
    if (uses_d()) out << "(d=" << d << ")";
    if (uses_m()) out << "(m=" << m << ")";
    if (uses_delta()) out << "(delta=" << delta << ")";
    return out.str();
}

// ---------------------------------------------------------------------------

Schedule MaxWeightScheduler::choose(const QueueMatrix& q, Rng&) {
    candidates_ = 1;
    return max_weight_matching(q);
}

Schedule RandomScheduler::choose(const QueueMatrix&, Rng& rng) {
    candidates_ = 1;
    return random_schedule(n_, rng);
}

PowerOfDScheduler::PowerOfDScheduler(int n, int d) : Scheduler(n), d_(d) {
    SchedulerParams{Policy::power_of_d, d}.validate();
}

Schedule PowerOfDScheduler::choose(const QueueMatrix& q, Rng& rng) {
    candidates_ = d_;
    return power_of_d(q, d_, rng);
}

RandomDFlipScheduler::RandomDFlipScheduler(int n, int d) : Scheduler(n), d_(d) {
    SchedulerParams{Policy::random_d_flip, d}.validate();
}

Schedule RandomDFlipScheduler::choose(const QueueMatrix& q, Rng& rng) {
    candidates_ = d_ + 1;
    return random_d_flip(q, d_, rng);
}

DFlipScheduler::DFlipScheduler(int n, int d, Schedule initial)
    : Scheduler(n), d_(d), prev_(initial.size() == n ? std::move(initial) : Schedule::identity(n)) {
    SchedulerParams{Policy::d_flip, d}.validate();
}

Schedule DFlipScheduler::choose(const QueueMatrix& q, Rng& rng) {
    candidates_ = d_ + 1;
    for (int k = 0; k < d_; ++k) flip_step_in_place(q, prev_, rng);
    return prev_;
}

BurstyMaxWeight::BurstyMaxWeight(int n, int m) : Scheduler(n), m_(m), cached_(Schedule::identity(n)) {
    SchedulerParams{Policy::bursty_mw, 0, m}.validate();
}

Schedule BurstyMaxWeight::choose(const QueueMatrix& q, Rng&) {
    if ((q.array() == 0).all()) counter_ = 0;
    recomputed_ = counter_ % m_ == 0;
    if (recomputed_) cached_ = max_weight_matching(q);
    counter_ = (counter_ + 1) % m_;
    candidates_ = recomputed_ ? 1 : 0;
    return cached_;
}

PipelinedMaxWeight::PipelinedMaxWeight(int n, int m) : Scheduler(n), m_(m) {
    SchedulerParams{Policy::pipelined_mw, 0, m}.validate();
    pipeline_.assign(static_cast<std::size_t>(m), Schedule::identity(n));
}

Schedule PipelinedMaxWeight::choose(const QueueMatrix& q, Rng&) {
    Schedule out = std::move(pipeline_.front());
    pipeline_.pop_front();
    pipeline_.push_back(max_weight_matching(q));
    candidates_ = 1;
    return out;
}

RandomlyDelayedMaxWeight::RandomlyDelayedMaxWeight(int n, double delta)
    : Scheduler(n), delta_(delta), prev_(Schedule::identity(n)) {
    SchedulerParams{Policy::randomly_delayed_mw, 0, 0, delta}.validate();
}

Schedule RandomlyDelayedMaxWeight::choose(const QueueMatrix& q, Rng& rng) {
    recomputed_ = delta_ >= 1.0 || uniform01(rng) < delta_;
    if (recomputed_) prev_ = max_weight_matching(q);
    candidates_ = recomputed_ ? 1 : 0;
    return prev_;
}

PickAndCompare::PickAndCompare(int n, int d) : Scheduler(n), d_(d), prev_(Schedule::identity(n)) {
    SchedulerParams{Policy::pick_and_compare, d}.validate();
}

Schedule PickAndCompare::choose(const QueueMatrix& q, Rng& rng) {
    Schedule candidate = power_of_d(q, d_, rng);
    if (weight(q, candidate) > weight(q, prev_)) prev_ = std::move(candidate);
    candidates_ = d_ + 1;
    return prev_;
}

std::unique_ptr<Scheduler> make_scheduler(const SchedulerParams& params, int n) {
    params.validate();
    switch (params.policy) {
    case Policy::maxweight: return std::make_unique<MaxWeightScheduler>(n);
    case Policy::random: return std::make_unique<RandomScheduler>(n);
    case Policy::power_of_d: return std::make_unique<PowerOfDScheduler>(n, params.d);
    case Policy::random_d_flip: return std::make_unique<RandomDFlipScheduler>(n, params.d);
    case Policy::d_flip: return std::make_unique<DFlipScheduler>(n, params.d);
    case Policy::bursty_mw: return std::make_unique<BurstyMaxWeight>(n, params.m);
    case Policy::pipelined_mw: return std::make_unique<PipelinedMaxWeight>(n, params.m);
    case Policy::randomly_delayed_mw: return std::make_unique<RandomlyDelayedMaxWeight>(n, params.delta);
    case Policy::pick_and_compare: return std::make_unique<PickAndCompare>(n, params.d);
    }
    throw ConfigError("unknown policy");
}

} // namespace iqswitch
