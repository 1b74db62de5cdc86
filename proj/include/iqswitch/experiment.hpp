#ifndef IQSWITCH_EXPERIMENT_HPP
#define IQSWITCH_EXPERIMENT_HPP

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "iqswitch/metrics.hpp"
#include "iqswitch/schedulers.hpp"
#include "iqswitch/traffic.hpp"

namespace iqswitch {

enum class MetricKind { scaled_q, ssc, pi2_audit, pi3_audit, tau };

std::string to_string(MetricKind metric);
MetricKind parse_metric(const std::string& name);

/// epsilon(n) = c * n^-beta for size sweeps.
struct EpsilonScaling {
    double c = 1.0;
    double beta = 0.0;
    double epsilon(int n) const;
};

struct TrafficConfig {
    std::string kind = "uniform";  // uniform | nonuniform | preset
    std::string preset = "default_nonuniform";
    std::optional<double> epsilon;
    std::optional<double> load;
    std::optional<EpsilonScaling> scaling;
    ArrivalFamily family = ArrivalFamily::bernoulli;
    int a_max = 1;
    std::vector<std::pair<double, std::vector<int>>> mixture;
};

struct SweepAxis {
    std::string axis;  // epsilon | load | d | m | delta | n
    std::vector<double> values;
};

struct ExperimentConfig {
    int n = 0;
    TrafficConfig traffic;
    std::vector<SchedulerParams> schedulers;
    std::optional<std::int64_t> horizon;  // default ceil(400 / epsilon^2)
    double warmup_fraction = 0.2;
    int thinning = 10;
    int batches = 30;
    int replications = 1;
    std::uint64_t master_seed = 1;
    std::set<MetricKind> metrics{MetricKind::scaled_q};
    std::optional<SweepAxis> sweep;
    std::string output;
};

/// Parses and validates a config tree. Unknown keys, missing or superfluous
/// scheduler parameters, and load given together with epsilon are rejected
/// with ConfigError before anything runs.
ExperimentConfig parse_config(const nlohmann::json& tree);
ExperimentConfig load_config(const std::string& path);

/// One fully specified simulation: a point of the sweep cross-product.
struct Job {
    int n = 0;
    double epsilon = 0.0;
    TrafficSpec traffic;
    std::string traffic_label;
    SchedulerParams scheduler;
    std::int64_t horizon = 0;
};

std::vector<Job> expand(const ExperimentConfig& config);

/// One CSV row.
struct ResultRow {
    std::size_t job = 0;  // index into RunResult::jobs
    std::string metric;
    double mean = 0.0;
    double ci_half_width = 0.0;
    std::int64_t samples = 0;
};

/// Fixed CSV header, in column order.
const std::vector<std::string>& result_header();

struct RunResult {
    std::vector<Job> jobs;
    std::vector<ResultRow> rows;
};

/// Runs every job with R replications on `threads` workers. Replication r of
/// every job draws from stream (master_seed, r); aggregation is ordered by
/// job and replication index, so the output does not depend on scheduling.
RunResult run_experiment(const ExperimentConfig& config, int threads = 1);

void write_csv(std::ostream& out, const ExperimentConfig& config, const RunResult& result);

/// Thread count from IQSWITCH_THREADS, else the hardware concurrency.
int default_thread_count();

} // namespace iqswitch

#endif // IQSWITCH_EXPERIMENT_HPP
