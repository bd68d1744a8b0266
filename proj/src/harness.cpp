#include "vmci/harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <exception>
#include <fstream>
#include <functional>
#include <memory>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "vmci/discovery.hpp"
#include "vmci/estimators.hpp"
#include "vmci/graph.hpp"
#include "vmci/rng.hpp"

namespace vmci {

void ExperimentConfig::validate() const {
    if (replications < 1) throw std::invalid_argument("replications must be at least 1");
    if (sample_sizes.empty()) throw std::invalid_argument("sample_sizes must not be empty");
    for (std::size_t i = 0; i < sample_sizes.size(); ++i) {
        if (sample_sizes[i] < 4) throw std::invalid_argument("sample sizes must be at least 4");
        if (i > 0 && sample_sizes[i] <= sample_sizes[i - 1])
            throw std::invalid_argument("sample_sizes must be strictly increasing");
    }
    if (threads < 1) throw std::invalid_argument("threads must be at least 1");
    if (model_beta < 1) throw std::invalid_argument("model_beta must be positive");
    tester.validate();
    null_model.validate();
    alt_model.validate();
}

std::uint64_t replication_seed(std::uint64_t root_seed, std::size_t n, std::size_t rep) {
    return derive_key(summary_seed(root_seed, n), rep);
}

std::uint64_t summary_seed(std::uint64_t root_seed, std::size_t n) { return derive_key(root_seed, n); }

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Task {
    std::size_t n;
    std::size_t rep;
    std::uint64_t seed;
};

// Runs every (n, rep) task on a worker pool; results come back in task order.
std::vector<std::vector<ResultRow>> run_tasks(const ExperimentConfig& config,
                                              const std::function<std::vector<ResultRow>(const Task&)>& work) {
    std::vector<Task> tasks;
    for (auto n : config.sample_sizes)
        for (std::size_t r = 0; r < config.replications; ++r)
            tasks.push_back({n, r, replication_seed(config.root_seed, n, r)});

    std::vector<std::vector<ResultRow>> results(tasks.size());
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        for (std::size_t i; (i = next.fetch_add(1)) < tasks.size();) {
            try {
                results[i] = work(tasks[i]);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                next = tasks.size();
            }
        }
    };
    const std::size_t nthreads = std::min(config.threads, tasks.size());
    if (nthreads <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t t = 0; t < nthreads; ++t) pool.emplace_back(worker);
    }
    if (failure) std::rethrow_exception(failure);
    if (!config.record_wall_time)
        for (auto& rows : results)
            for (auto& row : rows) row.wall_time_s = 0.0;
    return results;
}

double median(std::vector<double> v) {
    if (v.empty()) return 0.0;
    std::sort(v.begin(), v.end());
    const auto mid = v.size() / 2;
    return v.size() % 2 ? v[mid] : 0.5 * (v[mid - 1] + v[mid]);
}

// Flattens per-task rows and appends one summary row per n, computed from
// the rows named `metric`.
std::vector<ResultRow> assemble(const ExperimentConfig& config, std::vector<std::vector<ResultRow>> per_task,
                                const std::string& metric, const std::string& summary_name,
                                const std::function<double(const std::vector<ResultRow>&)>& summarize) {
    std::vector<ResultRow> out;
    std::size_t idx = 0;
    for (auto n : config.sample_sizes) {
        std::vector<ResultRow> of_metric;
        double time_sum = 0.0;
        for (std::size_t r = 0; r < config.replications; ++r, ++idx) {
            for (auto& row : per_task[idx]) {
                if (row.metric_name.rfind(metric, 0) == 0) {
                    of_metric.push_back(row);
                    time_sum += row.wall_time_s;
                }
                out.push_back(std::move(row));
            }
        }
        ResultRow summary;
        summary.n = n;
        summary.replication = -1;
        summary.metric_name = summary_name;
        summary.metric_value = summarize(of_metric);
        summary.wall_time_s = of_metric.empty() ? 0.0 : time_sum / static_cast<double>(of_metric.size());
        summary.seed = summary_seed(config.root_seed, n);
        out.push_back(std::move(summary));
    }
    return out;
}

std::vector<double> values_of(const std::vector<ResultRow>& rows) {
    std::vector<double> v;
    for (const auto& r : rows) v.push_back(r.metric_value);
    return v;
}

}  // namespace

std::vector<ResultRow> run_ci_error_curve(const ExperimentConfig& config) {
    config.validate();
    const std::size_t null_reps = (config.replications + 1) / 2;
    auto per_task = run_tasks(config, [&](const Task& t) {
        const bool is_null = t.rep < null_reps;
        const auto data = sample_mixture(t.n, is_null ? config.null_model : config.alt_model, t.seed);
        auto tester = config.tester;
        tester.base_seed = t.seed;
        const auto t0 = Clock::now();
        const auto decision = tester.tester == TesterKind::vm_ci
                                  ? vm_ci_test(data, "X", "Y", {"Z1", "Z2"}, tester)
                                  : gaussian_pc_test(data, "X", "Y", {"Z1", "Z2"}, tester.alpha);
        ResultRow row;
        row.n = t.n;
        row.replication = static_cast<long>(t.rep);
        row.wall_time_s = seconds_since(t0);
        row.seed = t.seed;
        // type I: rejecting independence under the null; type II: accepting it under the alternative
        row.metric_name = is_null ? "type1_error" : "type2_error";
        row.metric_value = is_null ? (decision.independent ? 0.0 : 1.0) : (decision.independent ? 1.0 : 0.0);
        return std::vector<ResultRow>{row};
    });
    return assemble(config, std::move(per_task), "type", "total_error", [&](const std::vector<ResultRow>& rows) {
        double t1 = 0.0, t2 = 0.0;
        std::size_t n1 = 0, n2 = 0;
        for (const auto& r : rows) {
            if (r.metric_name == "type1_error") t1 += r.metric_value, ++n1;
            else t2 += r.metric_value, ++n2;
        }
        return (n1 ? t1 / static_cast<double>(n1) : 0.0) + (n2 ? t2 / static_cast<double>(n2) : 0.0);
    });
}

std::vector<ResultRow> run_discovery_loss_curve(const ExperimentConfig& config) {
    config.validate();
    const Dag truth_dag = sem_dag();
    const Pdag truth = essential_graph(truth_dag);
    const auto& vars = truth_dag.vertices().names();
    const std::size_t delta = config.delta_max.value_or(vars.size() - 2);

    auto per_task = run_tasks(config, [&](const Task& t) {
        CiTester tester;
        if (config.oracle_tester) {
            tester = oracle_ci(truth_dag);
        } else {
            auto data = std::make_shared<const SampleMatrix>(sample_sem(t.n, SemSpec{config.model_beta}, t.seed));
            auto tc = config.tester;
            tc.base_seed = t.seed;
            tester = make_tester(std::move(data), tc);
        }
        const auto t0 = Clock::now();
        const auto result = config.algorithm == Algorithm::pc ? pc(tester, vars, delta) : gs(tester, vars);
        const double elapsed = seconds_since(t0);
        ResultRow loss{t.n, static_cast<long>(t.rep), "structural_loss",
                       static_cast<double>(structural_loss(result.graph, truth)), elapsed, t.seed};
        ResultRow count{t.n, static_cast<long>(t.rep), "ci_test_count",
                         static_cast<double>(result.ci_test_count), elapsed, t.seed};
        return std::vector<ResultRow>{loss, count};
    });
    return assemble(config, std::move(per_task), "structural_loss", "median_structural_loss",
                    [](const std::vector<ResultRow>& rows) { return median(values_of(rows)); });
}

std::vector<ResultRow> run_entropy_convergence(const ExperimentConfig& config) {
    config.validate();
    const double target = power_law_entropy(config.model_beta);
    auto per_task = run_tasks(config, [&](const Task& t) {
        const auto data = sample_power_law(t.n, config.model_beta, t.seed);
        const EntropyParams params{config.tester.beta, config.tester.gamma, 1, config.tester.floor};
        const auto t0 = Clock::now();
        const auto est = entropy_vm(data, params, t.seed);
        ResultRow row{t.n, static_cast<long>(t.rep), "abs_error", std::abs(est.value - target),
                      seconds_since(t0), t.seed};
        return std::vector<ResultRow>{row};
    });
    return assemble(config, std::move(per_task), "abs_error", "median_abs_error",
                    [](const std::vector<ResultRow>& rows) { return median(values_of(rows)); });
}

std::vector<ResultRow> run_experiment(const ExperimentConfig& config) {
    switch (config.experiment) {
        case ExperimentKind::ci_error_curve: return run_ci_error_curve(config);
        case ExperimentKind::discovery_loss_curve: return run_discovery_loss_curve(config);
        case ExperimentKind::entropy_convergence: return run_entropy_convergence(config);
    }
    throw std::logic_error("unhandled experiment kind");
}

void write_results_csv(std::ostream& out, const std::vector<ResultRow>& rows) {
    out << "n,replication,metric_name,metric_value,wall_time_s,seed\n";
    for (const auto& r : rows)
        out << r.n << ',' << r.replication << ',' << r.metric_name << ',' << format_double(r.metric_value) << ','
            << format_double(r.wall_time_s) << ',' << r.seed << '\n';
}

// ---------------------------------------------------------------------------
// Config parsing

namespace {

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

template <typename T>
T parse_number(const std::string& key, const std::string& text) {
    T v{};
    auto res = std::from_chars(text.data(), text.data() + text.size(), v);
    if (res.ec != std::errc{} || res.ptr != text.data() + text.size())
        throw std::invalid_argument("config key '" + key + "': bad value '" + text + "'");
    return v;
}

bool parse_bool(const std::string& key, const std::string& text) {
    if (text == "true" || text == "on" || text == "1" || text == "yes") return true;
    if (text == "false" || text == "off" || text == "0" || text == "no") return false;
    throw std::invalid_argument("config key '" + key + "': expected a boolean, got '" + text + "'");
}

std::vector<std::size_t> parse_size_list(const std::string& key, const std::string& text) {
    std::vector<std::size_t> out;
    std::istringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(parse_number<std::size_t>(key, item));
    }
    return out;
}

}  // namespace

std::map<std::string, std::string> read_key_values(std::istream& in) {
    std::map<std::string, std::string> kv;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config line " + std::to_string(lineno) + ": expected 'key = value'");
        auto key = trim(line.substr(0, eq));
        if (key.empty()) throw std::invalid_argument("config line " + std::to_string(lineno) + ": empty key");
        kv[key] = trim(line.substr(eq + 1));
    }
    return kv;
}

std::map<std::string, std::string> read_key_values_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open '" + path + "'");
    return read_key_values(f);
}

const std::vector<std::string>& experiment_config_keys() {
    static const std::vector<std::string> keys{
        "experiment", "sample_sizes", "replications", "tester",    "i_min",      "beta",
        "gamma",      "floor",        "alpha",        "model_beta", "null_t1",   "null_t2",
        "null_txy",   "alt_t1",       "alt_t2",       "alt_txy",   "algorithm",  "delta_max",
        "root_seed",  "output_path",  "threads",      "record_wall_time"};
    return keys;
}

ExperimentConfig parse_experiment_config(const std::map<std::string, std::string>& kv) {
    ExperimentConfig c;
    const auto& known = experiment_config_keys();
    for (const auto& [key, value] : kv) {
        if (std::find(known.begin(), known.end(), key) == known.end())
            throw std::invalid_argument("unknown config key '" + key + "'");
        if (key == "experiment") {
            if (value == "ci_error_curve") c.experiment = ExperimentKind::ci_error_curve;
            else if (value == "discovery_loss_curve") c.experiment = ExperimentKind::discovery_loss_curve;
            else if (value == "entropy_convergence") c.experiment = ExperimentKind::entropy_convergence;
            else throw std::invalid_argument("unknown experiment '" + value + "'");
        } else if (key == "sample_sizes") {
            c.sample_sizes = parse_size_list(key, value);
        } else if (key == "replications") {
            c.replications = parse_number<std::size_t>(key, value);
        } else if (key == "tester") {
            c.oracle_tester = false;
            if (value == "vmci") c.tester.tester = TesterKind::vm_ci;
            else if (value == "gauss") c.tester.tester = TesterKind::gaussian_pc;
            else if (value == "oracle") c.oracle_tester = true;
            else throw std::invalid_argument("unknown tester '" + value + "'");
        } else if (key == "i_min") {
            c.tester.i_min = parse_number<double>(key, value);
        } else if (key == "beta") {
            c.tester.beta = parse_number<int>(key, value);
        } else if (key == "gamma") {
            c.tester.gamma = parse_number<double>(key, value);
        } else if (key == "floor") {
            c.tester.floor = parse_number<double>(key, value);
        } else if (key == "alpha") {
            c.tester.alpha = parse_number<double>(key, value);
        } else if (key == "model_beta") {
            c.model_beta = parse_number<int>(key, value);
            c.null_model.beta = c.alt_model.beta = c.model_beta;
        } else if (key == "null_t1") {
            c.null_model.t1 = parse_number<double>(key, value);
        } else if (key == "null_t2") {
            c.null_model.t2 = parse_number<double>(key, value);
        } else if (key == "null_txy") {
            c.null_model.t_xy = parse_number<double>(key, value);
        } else if (key == "alt_t1") {
            c.alt_model.t1 = parse_number<double>(key, value);
        } else if (key == "alt_t2") {
            c.alt_model.t2 = parse_number<double>(key, value);
        } else if (key == "alt_txy") {
            c.alt_model.t_xy = parse_number<double>(key, value);
        } else if (key == "algorithm") {
            if (value == "pc") c.algorithm = Algorithm::pc;
            else if (value == "gs") c.algorithm = Algorithm::gs;
            else throw std::invalid_argument("unknown algorithm '" + value + "'");
        } else if (key == "delta_max") {
            c.delta_max = parse_number<std::size_t>(key, value);
        } else if (key == "root_seed") {
            c.root_seed = parse_number<std::uint64_t>(key, value);
        } else if (key == "output_path") {
            c.output_path = value;
        } else if (key == "threads") {
            c.threads = parse_number<std::size_t>(key, value);
        } else if (key == "record_wall_time") {
            c.record_wall_time = parse_bool(key, value);
        }
    }
    c.validate();
    return c;
}

}  // namespace vmci
