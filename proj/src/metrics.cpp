#include "iqswitch/metrics.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/distributions/students_t.hpp>

namespace iqswitch {

double t_quantile_975(int dof) {
    if (dof < 1) throw ConfigError("t quantile needs at least one degree of freedom");
    return boost::math::quantile(boost::math::students_t(static_cast<double>(dof)), 0.975);
}

namespace {

Estimate from_batch_sums(std::span<const double> sums, std::int64_t batch_size) {
    const int b = static_cast<int>(sums.size());
    double mean = 0.0;
    for (double s : sums) mean += s / static_cast<double>(batch_size);
    mean /= b;
    double ss = 0.0;
    for (double s : sums) {
        const double dev = s / static_cast<double>(batch_size) - mean;
        ss += dev * dev;
    }
    const double var = ss / (b - 1);
    return {mean, t_quantile_975(b - 1) * std::sqrt(var / b), b, batch_size * b};
}

std::int64_t warmup_length(std::int64_t length, double warmup_fraction) {
    if (!(warmup_fraction >= 0.0 && warmup_fraction < 1.0))
        throw ConfigError("warmup fraction must lie in [0, 1)");
    return static_cast<std::int64_t>(std::floor(warmup_fraction * static_cast<double>(length)));
}

} // namespace

Estimate estimate_mean(std::span<const double> series, double warmup_fraction, int num_batches) {
    if (num_batches < 2) throw ConfigError("batch means needs at least two batches");
    const auto length = static_cast<std::int64_t>(series.size());
    const std::int64_t warmup = warmup_length(length, warmup_fraction);
    if (length - warmup < 10LL * num_batches) throw ConfigError("series too short for batch means");
    const std::int64_t batch = (length - warmup) / num_batches;
    std::vector<double> sums(static_cast<std::size_t>(num_batches), 0.0);
    for (std::int64_t k = 0; k < batch * num_batches; ++k)
        sums[static_cast<std::size_t>(k / batch)] += series[static_cast<std::size_t>(warmup + k)];
    return from_batch_sums(sums, batch);
}

BatchMeans::BatchMeans(std::int64_t length, double warmup_fraction, int num_batches)
    : length_(length), warmup_(warmup_length(length, warmup_fraction)), num_batches_(num_batches),
      sums_(static_cast<std::size_t>(std::max(num_batches, 0)), 0.0) {
    if (num_batches < 2) throw ConfigError("batch means needs at least two batches");
    if (length - warmup_ < 10LL * num_batches) throw ConfigError("series too short for batch means");
    batch_size_ = (length - warmup_) / num_batches;
}

void BatchMeans::push(double value) {
    const std::int64_t k = index_++ - warmup_;
    if (k < 0 || k >= batch_size_ * num_batches_) return;
    sums_[static_cast<std::size_t>(k / batch_size_)] += value;
}

Estimate BatchMeans::finish() const {
    if (index_ < length_) throw ConfigError("BatchMeans: series ended early");
    return from_batch_sums(sums_, batch_size_);
}

Estimate combine_replications(std::span<const double> means, std::int64_t samples_per_replication) {
    const int r = static_cast<int>(means.size());
    if (r < 2) throw ConfigError("need at least two replications");
    double mean = 0.0;
    for (double m : means) mean += m;
    mean /= r;
    double ss = 0.0;
    for (double m : means) ss += (m - mean) * (m - mean);
    return {mean, t_quantile_975(r - 1) * std::sqrt(ss / (r - 1) / r), r, samples_per_replication * r};
}

Estimate scaled_queue_length(const Estimate& sum_q, double epsilon) {
    if (!(epsilon > 0.0 && epsilon < 1.0)) throw ConfigError("epsilon must lie in (0, 1)");
    Estimate e = sum_q;
    e.mean *= epsilon;
    e.half_width *= epsilon;
    return e;
}

double universal_lower_bound(double sigma_norm2, double epsilon) {
    return 0.5 * sigma_norm2 - epsilon * (1.0 - epsilon) / 2.0;
}

double maxweight_limit(int n, double sigma_tilde_norm2) {
    return (1.0 - 1.0 / (2.0 * n)) * sigma_tilde_norm2;
}

// ---------------------------------------------------------------------------

Pi2Auditor::Pi2Auditor(int m, int n, int a_max) {
    audit_.bound = 2LL * m * n * a_max;
}

void Pi2Auditor::observe(const DecisionTrace& trace) {
    const std::int64_t gap = trace.maxweight_weight - trace.chosen_weight;
    ++audit_.slots;
    audit_.max_gap = std::max(audit_.max_gap, gap);
    if (gap > audit_.bound) ++audit_.violations;
}

Pi2Audit audit_pi2(std::span<const DecisionTrace> traces, int m, int n, int a_max) {
    Pi2Auditor auditor(m, n, a_max);
    for (const auto& t : traces) auditor.observe(t);
    return auditor.result();
}

void Pi3Auditor::observe(const DecisionTrace& trace) {
    ++audit_.slots;
    if (trace.has_prev && trace.chosen_weight < trace.prev_schedule_weight) ++audit_.monotonicity_violations;
    if (trace.is_maxweight) {
        ++audit_.maxweight_slots;
        if (last_mw_ >= 0 && keep_taus_) audit_.tau.taus.push_back(t_ - last_mw_);
        last_mw_ = t_;
    }
    ++t_;
}

Pi3Audit audit_pi3(std::span<const DecisionTrace> traces) {
    Pi3Auditor auditor;
    for (const auto& t : traces) auditor.observe(t);
    return auditor.result();
}

double TauRecord::ccdf(std::int64_t c) const {
    if (taus.empty()) return 0.0;
    const auto above = std::count_if(taus.begin(), taus.end(), [c](std::int64_t t) { return t > c; });
    return static_cast<double>(above) / static_cast<double>(taus.size());
}

double TauRecord::geometric_tail_excess(double delta, int c_max, double z) const {
    const double count = static_cast<double>(taus.size());
    double worst = -1.0;
    for (int c = 1; c <= c_max; ++c) {
        const double p = ccdf(c);
        const double se = count > 0 ? std::sqrt(p * (1.0 - p) / count) : 0.0;
        worst = std::max(worst, p - std::pow(1.0 - delta, c) - z * se);
    }
    return worst;
}

std::vector<Estimate> large_scale_ratio(std::span<const SizePoint> points) {
    std::vector<Estimate> out;
    out.reserve(points.size());
    for (const auto& p : points) {
        Estimate e = p.sum_q;
        const double scale = p.epsilon / p.n;
        e.mean *= scale;
        e.half_width *= scale;
        out.push_back(e);
    }
    return out;
}

} // namespace iqswitch
