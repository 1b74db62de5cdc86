#include "iqswitch/experiment.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <ostream>
#include <thread>

#include "iqswitch/simulation.hpp"

namespace iqswitch {

using nlohmann::json;

std::string to_string(MetricKind metric) {
    switch (metric) {
    case MetricKind::scaled_q: return "scaled_q";
    case MetricKind::ssc: return "ssc";
    case MetricKind::pi2_audit: return "pi2_audit";
    case MetricKind::pi3_audit: return "pi3_audit";
    case MetricKind::tau: return "tau";
    }
    return "unknown";
}

MetricKind parse_metric(const std::string& name) {
    for (MetricKind m : {MetricKind::scaled_q, MetricKind::ssc, MetricKind::pi2_audit,
                         MetricKind::pi3_audit, MetricKind::tau})
        if (to_string(m) == name) return m;
    throw ConfigError("unknown metric '" + name + "'");
}

double EpsilonScaling::epsilon(int n) const { return c * std::pow(static_cast<double>(n), -beta); }

// ---------------------------------------------------------------------------
// Parsing
// ---------------------------------------------------------------------------

namespace {

void reject_unknown_keys(const json& obj, std::initializer_list<const char*> allowed, const std::string& where) {
    if (!obj.is_object()) throw ConfigError(where + " must be an object");
    for (const auto& item : obj.items()) {
        bool ok = false;
        for (const char* key : allowed) ok = ok || item.key() == key;
        if (!ok) throw ConfigError("unknown key '" + item.key() + "' in " + where);
    }
}

template <typename T>
T get_as(const json& obj, const char* key, const std::string& where) {
    try {
        return obj.at(key).get<T>();
    } catch (const json::exception&) {
        throw ConfigError("bad or missing '" + std::string(key) + "' in " + where);
    }
}

SchedulerParams parse_scheduler(const json& obj, const std::optional<SweepAxis>& sweep) {
    reject_unknown_keys(obj, {"name", "d", "m", "delta"}, "scheduler");
    SchedulerParams p;
    p.policy = parse_policy(get_as<std::string>(obj, "name", "scheduler"));
    const std::string label = to_string(p.policy);
    const auto check = [&](const char* key, bool used) {
        const bool swept = sweep && sweep->axis == key;
        if (!used && obj.contains(key)) throw ConfigError(label + " does not take '" + key + "'");
        if (!used && swept) throw ConfigError("sweep over '" + std::string(key) + "' but " + label + " does not take it");
        if (used && !obj.contains(key) && !swept) throw ConfigError(label + " requires '" + key + "'");
        if (used && obj.contains(key) && swept) throw ConfigError(label + ": '" + key + "' is both set and swept");
    };
    check("d", p.uses_d());
    check("m", p.uses_m());
    check("delta", p.uses_delta());
    if (obj.contains("d")) p.d = get_as<int>(obj, "d", "scheduler");
    if (obj.contains("m")) p.m = get_as<int>(obj, "m", "scheduler");
    if (obj.contains("delta")) p.delta = get_as<double>(obj, "delta", "scheduler");
    if (!(sweep && (sweep->axis == "d" || sweep->axis == "m" || sweep->axis == "delta"))) p.validate();
    return p;
}

} // namespace

ExperimentConfig parse_config(const json& tree) {
    reject_unknown_keys(tree, {"n", "traffic", "scheduler", "schedulers", "horizon", "warmup_fraction",
                               "thinning", "batches", "replications", "master_seed", "metrics", "sweep",
                               "output"},
                        "config");
    ExperimentConfig cfg;

    if (tree.contains("sweep")) {
        const json& s = tree.at("sweep");
        reject_unknown_keys(s, {"axis", "values"}, "sweep");
        SweepAxis axis{get_as<std::string>(s, "axis", "sweep"), get_as<std::vector<double>>(s, "values", "sweep")};
        static const char* kAxes[] = {"epsilon", "load", "d", "m", "delta", "n"};
        bool known = false;
        for (const char* a : kAxes) known = known || axis.axis == a;
        if (!known) throw ConfigError("unknown sweep axis '" + axis.axis + "'");
        if (axis.values.empty()) throw ConfigError("sweep has no values");
        cfg.sweep = std::move(axis);
    }

    const bool sweep_n = cfg.sweep && cfg.sweep->axis == "n";
    if (tree.contains("n") == sweep_n) throw ConfigError(sweep_n ? "'n' is both set and swept" : "missing 'n'");
    if (!sweep_n) {
        cfg.n = get_as<int>(tree, "n", "config");
        if (cfg.n < 2) throw ConfigError("n must be at least 2");
    }

    if (!tree.contains("traffic") || !tree.at("traffic").is_object())
        throw ConfigError("config needs a 'traffic' object");
    const json& t = tree.at("traffic");
    reject_unknown_keys(t, {"kind", "preset", "epsilon", "load", "epsilon_scaling", "family", "a_max", "mixture"},
                        "traffic");
    auto& tc = cfg.traffic;
    if (t.contains("kind")) tc.kind = get_as<std::string>(t, "kind", "traffic");
    if (tc.kind != "uniform" && tc.kind != "nonuniform" && tc.kind != "preset")
        throw ConfigError("traffic kind must be uniform, nonuniform or preset");
    if (t.contains("preset")) tc.preset = get_as<std::string>(t, "preset", "traffic");
    if (tc.kind == "preset" && tc.preset != "default_nonuniform")
        throw ConfigError("unknown traffic preset '" + tc.preset + "'");
    if (t.contains("epsilon")) tc.epsilon = get_as<double>(t, "epsilon", "traffic");
    if (t.contains("load")) tc.load = get_as<double>(t, "load", "traffic");
    if (t.contains("epsilon_scaling")) {
        const json& sc = t.at("epsilon_scaling");
        reject_unknown_keys(sc, {"c", "beta"}, "epsilon_scaling");
        tc.scaling = EpsilonScaling{get_as<double>(sc, "c", "epsilon_scaling"), get_as<double>(sc, "beta", "epsilon_scaling")};
    }
    if (t.contains("family")) tc.family = parse_family(get_as<std::string>(t, "family", "traffic"));
    if (t.contains("a_max")) tc.a_max = get_as<int>(t, "a_max", "traffic");
    if (tc.family == ArrivalFamily::bernoulli && tc.a_max != 1) throw ConfigError("bernoulli traffic has a_max = 1");
    if (t.contains("mixture")) {
        if (tc.kind != "nonuniform") throw ConfigError("'mixture' only applies to nonuniform traffic");
        for (const json& term : t.at("mixture")) {
            reject_unknown_keys(term, {"coefficient", "permutation"}, "mixture term");
            tc.mixture.emplace_back(get_as<double>(term, "coefficient", "mixture term"),
                                    get_as<std::vector<int>>(term, "permutation", "mixture term"));
        }
    } else if (tc.kind == "nonuniform") {
        throw ConfigError("nonuniform traffic needs 'mixture'");
    }

    const std::string axis = cfg.sweep ? cfg.sweep->axis : "";
    const int rate_sources = (tc.epsilon ? 1 : 0) + (tc.load ? 1 : 0) + (tc.scaling ? 1 : 0) +
                             ((axis == "epsilon" || axis == "load") ? 1 : 0);
    if (tc.epsilon && tc.load) throw ConfigError("give either load or epsilon, not both");
    if (rate_sources != 1)
        throw ConfigError("exactly one of epsilon, load, epsilon_scaling or an epsilon/load sweep must set the rate");

    if (tree.contains("scheduler") == tree.contains("schedulers"))
        throw ConfigError("give exactly one of 'scheduler' or 'schedulers'");
    if (tree.contains("scheduler")) {
        cfg.schedulers.push_back(parse_scheduler(tree.at("scheduler"), cfg.sweep));
    } else {
        for (const json& s : tree.at("schedulers")) cfg.schedulers.push_back(parse_scheduler(s, cfg.sweep));
        if (cfg.schedulers.empty()) throw ConfigError("'schedulers' is empty");
    }

    if (tree.contains("horizon")) {
        cfg.horizon = get_as<std::int64_t>(tree, "horizon", "config");
        if (*cfg.horizon < 1) throw ConfigError("horizon must be positive");
    }
    if (tree.contains("warmup_fraction")) cfg.warmup_fraction = get_as<double>(tree, "warmup_fraction", "config");
    if (!(cfg.warmup_fraction >= 0.0 && cfg.warmup_fraction < 1.0)) throw ConfigError("warmup_fraction must lie in [0, 1)");
    if (tree.contains("thinning")) cfg.thinning = get_as<int>(tree, "thinning", "config");
    if (cfg.thinning < 1) throw ConfigError("thinning must be at least 1");
    if (tree.contains("batches")) cfg.batches = get_as<int>(tree, "batches", "config");
    if (cfg.batches < 2) throw ConfigError("batches must be at least 2");
    if (tree.contains("replications")) cfg.replications = get_as<int>(tree, "replications", "config");
    if (cfg.replications < 1) throw ConfigError("replications must be at least 1");
    if (tree.contains("master_seed")) cfg.master_seed = get_as<std::uint64_t>(tree, "master_seed", "config");
    if (tree.contains("metrics")) {
        cfg.metrics.clear();
        for (const json& m : tree.at("metrics")) {
            if (!m.is_string()) throw ConfigError("metrics must be strings");
            cfg.metrics.insert(parse_metric(m.get<std::string>()));
        }
    }
    if (tree.contains("output")) cfg.output = get_as<std::string>(tree, "output", "config");

    // Build every job once so that bad traffic or parameter values surface
    // before any simulation starts.
    (void)expand(cfg);
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config '" + path + "'");
    json tree;
    try {
        in >> tree;
    } catch (const json::exception& e) {
        throw ConfigError("config '" + path + "' is not valid JSON: " + e.what());
    }
    return parse_config(tree);
}

// ---------------------------------------------------------------------------
// Expansion
// ---------------------------------------------------------------------------

namespace {

TrafficSpec build_traffic(const TrafficConfig& tc, int n, double epsilon, std::string& label) {
    if (tc.kind == "uniform") {
        label = "uniform";
        return make_uniform(n, epsilon, tc.family, tc.a_max);
    }
    if (tc.kind == "preset") {
        label = "preset:" + tc.preset;
        return make_nonuniform(n, epsilon, default_nonuniform_preset(n), tc.family, tc.a_max);
    }
    label = "nonuniform";
    std::vector<MixtureTerm> terms;
    for (const auto& [c, perm] : tc.mixture) {
        if (static_cast<int>(perm.size()) != n) throw ConfigError("mixture permutation length differs from n");
        terms.push_back({c, Schedule(perm)});
    }
    return make_nonuniform(n, epsilon, terms, tc.family, tc.a_max);
}

} // namespace

std::vector<Job> expand(const ExperimentConfig& config) {
    std::vector<double> axis_values{0.0};
    const std::string axis = config.sweep ? config.sweep->axis : "";
    if (config.sweep) axis_values = config.sweep->values;

    std::vector<Job> jobs;
    for (double value : axis_values) {
        for (SchedulerParams sched : config.schedulers) {
            Job job;
            job.n = config.n;
            if (axis == "n") {
                if (value != std::floor(value) || value < 2) throw ConfigError("swept n must be an integer >= 2");
                job.n = static_cast<int>(value);
            }
            const auto& tc = config.traffic;
            if (tc.epsilon) job.epsilon = *tc.epsilon;
            if (tc.load) job.epsilon = 1.0 - *tc.load;
            if (tc.scaling) job.epsilon = tc.scaling->epsilon(job.n);
            if (axis == "epsilon") job.epsilon = value;
            if (axis == "load") job.epsilon = 1.0 - value;
            if (axis == "d") sched.d = static_cast<int>(value);
            if (axis == "m") sched.m = static_cast<int>(value);
            if (axis == "delta") sched.delta = value;
            if ((axis == "d" || axis == "m") && value != std::floor(value))
                throw ConfigError("swept " + axis + " must be an integer");
            sched.validate();
            job.scheduler = sched;
            job.traffic = build_traffic(tc, job.n, job.epsilon, job.traffic_label);
            job.horizon = config.horizon ? *config.horizon : default_horizon(job.epsilon);
            const std::int64_t post = job.horizon - static_cast<std::int64_t>(std::floor(config.warmup_fraction * job.horizon));
            if (post < 10LL * config.batches) throw ConfigError("horizon too short for the requested batches");
            if (config.metrics.count(MetricKind::ssc)) {
                const std::int64_t samples = (job.horizon + config.thinning - 1) / config.thinning;
                if (samples - static_cast<std::int64_t>(std::floor(config.warmup_fraction * samples)) < 10LL * config.batches)
                    throw ConfigError("horizon too short for thinned SSC sampling");
            }
            jobs.push_back(std::move(job));
        }
    }
    return jobs;
}

// ---------------------------------------------------------------------------
// Running
// ---------------------------------------------------------------------------

const std::vector<std::string>& result_header() {
    static const std::vector<std::string> header{
        "n", "traffic", "family", "a_max", "epsilon", "load", "scheduler", "d", "m", "delta",
        "horizon", "warmup_fraction", "thinning", "replications", "metric", "mean", "ci_half_width",
        "samples", "seed"};
    return header;
}

namespace {

SimulationOptions options_for(const ExperimentConfig& config, const Job& job) {
    SimulationOptions opt;
    opt.horizon = job.horizon;
    opt.warmup_fraction = config.warmup_fraction;
    opt.batches = config.batches;
    opt.thinning = config.thinning;
    opt.ssc = config.metrics.count(MetricKind::ssc) > 0;
    opt.pi2_audit = config.metrics.count(MetricKind::pi2_audit) > 0;
    opt.pi3_audit = config.metrics.count(MetricKind::pi3_audit) > 0 || config.metrics.count(MetricKind::tau) > 0;
    opt.keep_taus = config.metrics.count(MetricKind::tau) > 0;
    opt.audit_m = job.scheduler.uses_m() ? job.scheduler.m : 1;
    return opt;
}

Estimate aggregate(const std::vector<const Estimate*>& parts) {
    if (parts.size() == 1) return *parts.front();
    std::vector<double> means;
    for (const Estimate* e : parts) means.push_back(e->mean);
    return combine_replications(means, parts.front()->samples);
}

Estimate scaled(Estimate e, double factor) {
    e.mean *= factor;
    e.half_width *= factor;
    return e;
}

double limit_sigma2(const TrafficSpec& t) {
    // sigma^2 as epsilon -> 0 with the family held fixed.
    return (t.nu.array() * t.a_max - t.nu.array().square()).sum();
}

} // namespace

int default_thread_count() {
    if (const char* env = std::getenv("IQSWITCH_THREADS")) {
        const int k = std::atoi(env);
        if (k >= 1) return k;
    }
    return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

RunResult run_experiment(const ExperimentConfig& config, int threads) {
    RunResult result;
    result.jobs = expand(config);
    const std::size_t reps = static_cast<std::size_t>(config.replications);
    const std::size_t total = result.jobs.size() * reps;
    std::vector<RunRecord> records(total);
    std::vector<std::exception_ptr> errors(total);

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t k = next++; k < total; k = next++) {
            const Job& job = result.jobs[k / reps];
            try {
                records[k] = simulate(job.traffic, job.scheduler, options_for(config, job), config.master_seed, k % reps);
            } catch (...) {
                errors[k] = std::current_exception();
            }
        }
    };
    const int workers = std::max(1, std::min<int>(threads, static_cast<int>(total)));
    {
        std::vector<std::jthread> pool;
        for (int w = 1; w < workers; ++w) pool.emplace_back(worker);
        worker();
    }
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);

    for (std::size_t j = 0; j < result.jobs.size(); ++j) {
        const Job& job = result.jobs[j];
        const RunRecord* recs = &records[j * reps];
        auto collect = [&](auto member) {
            std::vector<const Estimate*> parts;
            for (std::size_t r = 0; r < reps; ++r) parts.push_back(member(recs[r]));
            return aggregate(parts);
        };
        auto add = [&](const std::string& metric, const Estimate& e) {
            result.rows.push_back({j, metric, e.mean, e.half_width, e.samples});
        };

        const Estimate sum_q = collect([](const RunRecord& r) { return &r.sum_q; });
        add("mean_sum_q", sum_q);
        add("per_queue_mean", scaled(sum_q, 1.0 / (job.n * job.n)));
        if (config.metrics.count(MetricKind::scaled_q)) {
            add("scaled_q", scaled_queue_length(sum_q, job.epsilon));
            add("lower_bound", {universal_lower_bound(job.traffic.sigma_norm2(), job.epsilon), 0.0, 0, 0});
            add("maxweight_limit", {maxweight_limit(job.n, limit_sigma2(job.traffic)), 0.0, 0, 0});
        }
        if (config.traffic.scaling || (config.sweep && config.sweep->axis == "n")) {
            const SizePoint point{job.n, job.epsilon, sum_q};
            add("large_scale_ratio", large_scale_ratio(std::span(&point, 1)).front());
        }
        if (config.metrics.count(MetricKind::ssc)) {
            add("norm_perp_K", collect([](const RunRecord& r) { return &*r.norm_perp_K; }));
            add("norm_parallel_K", collect([](const RunRecord& r) { return &*r.norm_parallel_K; }));
            add("norm_perp_S", collect([](const RunRecord& r) { return &*r.norm_perp_S; }));
        }
        if (config.metrics.count(MetricKind::pi2_audit)) {
            std::int64_t violations = 0, max_gap = 0, slots = 0, bound = 0;
            for (std::size_t r = 0; r < reps; ++r) {
                violations += recs[r].pi2->violations;
                max_gap = std::max(max_gap, recs[r].pi2->max_gap);
                slots += recs[r].pi2->slots;
                bound = recs[r].pi2->bound;
            }
            add("pi2_violations", {static_cast<double>(violations), 0.0, 0, slots});
            add("pi2_max_gap", {static_cast<double>(max_gap), 0.0, 0, slots});
            add("pi2_bound", {static_cast<double>(bound), 0.0, 0, slots});
        }
        if (config.metrics.count(MetricKind::pi3_audit) || config.metrics.count(MetricKind::tau)) {
            std::int64_t violations = 0, slots = 0, mw = 0;
            TauRecord taus;
            for (std::size_t r = 0; r < reps; ++r) {
                violations += recs[r].pi3->monotonicity_violations;
                slots += recs[r].pi3->slots;
                mw += recs[r].pi3->maxweight_slots;
                const auto& t = recs[r].pi3->tau.taus;
                taus.taus.insert(taus.taus.end(), t.begin(), t.end());
            }
            add("pi3_monotonicity_violations", {static_cast<double>(violations), 0.0, 0, slots});
            add("empirical_delta", {slots ? static_cast<double>(mw) / slots : 0.0, 0.0, 0, slots});
            if (config.metrics.count(MetricKind::tau)) {
                const auto count = static_cast<std::int64_t>(taus.taus.size());
                double mean = 0.0;
                for (auto t : taus.taus) mean += static_cast<double>(t);
                add("tau_mean", {count ? mean / count : 0.0, 0.0, 0, count});
                for (int c : {1, 2, 5, 10, 20, 30}) {
                    const double p = taus.ccdf(c);
                    const double se = count ? std::sqrt(p * (1 - p) / count) : 0.0;
                    add("tau_ccdf_" + std::to_string(c), {p, 1.96 * se, 0, count});
                }
            }
        }
    }
    return result;
}

// ---------------------------------------------------------------------------
// CSV
// ---------------------------------------------------------------------------

namespace {

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

} // namespace

void write_csv(std::ostream& out, const ExperimentConfig& config, const RunResult& result) {
    const auto& header = result_header();
    for (std::size_t k = 0; k < header.size(); ++k) out << (k ? "," : "") << header[k];
    out << "\r\n";
    for (const ResultRow& row : result.rows) {
        const Job& job = result.jobs[row.job];
        const SchedulerParams& s = job.scheduler;
        const std::vector<std::string> fields{
            std::to_string(job.n),
            csv_field(job.traffic_label),
            to_string(job.traffic.family),
            std::to_string(job.traffic.a_max),
            fmt_double(job.epsilon),
            fmt_double(1.0 - job.epsilon),
            to_string(s.policy),
            s.uses_d() ? std::to_string(s.d) : "",
            s.uses_m() ? std::to_string(s.m) : "",
            s.uses_delta() ? fmt_double(s.delta) : "",
            std::to_string(job.horizon),
            fmt_double(config.warmup_fraction),
            std::to_string(config.thinning),
            std::to_string(config.replications),
            csv_field(row.metric),
            fmt_double(row.mean),
            fmt_double(row.ci_half_width),
            std::to_string(row.samples),
            std::to_string(config.master_seed),
        };
        for (std::size_t k = 0; k < fields.size(); ++k) out << (k ? "," : "") << fields[k];
        out << "\r\n";
    }
}

} // namespace iqswitch
