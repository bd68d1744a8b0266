#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "test_support.hpp"
#include "vmci/discovery.hpp"
#include "vmci/estimators.hpp"
#include "vmci/graph.hpp"
#include "vmci/harness.hpp"
#include "vmci/kernels.hpp"
#include "vmci/rng.hpp"
#include "vmci/synth.hpp"

using namespace vmci;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
    bool pass;
    std::string detail;
};

int failures = 0;

void criterion(int id, const std::string& title, double budget_s, const std::function<Outcome()>& body) {
    const auto t0 = Clock::now();
    Outcome o;
    try {
        o = body();
    } catch (const std::exception& e) {
        o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
    const bool in_time = secs < budget_s;
    const bool pass = o.pass && in_time;
    if (!pass) ++failures;
    std::ostringstream line;
    line << (pass ? "PASS" : "FAIL") << " criterion " << id << ": " << title << " | " << o.detail << " | " << secs
         << " s (budget " << budget_s << " s" << (in_time ? "" : ", exceeded") << ")";
    std::cout << line.str() << std::endl;
}

SampleMatrix uniform_column(std::size_t n, std::uint64_t seed) {
    SampleMatrix m({"X"}, n);
    SplitMix64 rng(seed);
    for (std::size_t r = 0; r < n; ++r) m(r, 0) = rng.uniform();
    return m;
}

double rate(const std::vector<ResultRow>& rows, std::size_t n, const std::string& metric) {
    double s = 0.0, k = 0.0;
    for (const auto& r : rows)
        if (r.n == n && r.metric_name == metric) s += r.metric_value, k += 1.0;
    return k > 0 ? s / k : 0.0;
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

}  // namespace

int main() {
    std::cout.setf(std::ios::fixed);
    std::cout.precision(4);

    criterion(1, "Legendre kernel moments for orders 1,3,5,7", 1.0, [] {
        double worst = 0.0;
        for (int beta : {1, 3, 5, 7}) {
            const KernelSpec k(beta, 1);
            worst = std::max(worst, std::abs(kernel_moment(k, 0, beta + 2) - 1.0));
            for (int s = 1; s <= beta; ++s) worst = std::max(worst, std::abs(kernel_moment(k, s, beta + 2)));
        }
        std::ostringstream d;
        d << "max moment deviation " << worst;
        return Outcome{worst <= 1e-8, d.str()};
    });

    criterion(2, "power-law entropy vs closed form -0.66407", 120.0, [] {
        const double target = power_law_entropy(3);
        std::vector<double> small, large;
        for (std::uint64_t seed = 0; seed < 20; ++seed) {
            const auto key = derive_key(0xe27, seed);
            small.push_back(std::abs(entropy_vm(sample_power_law(250, 3, key), {}, key).value - target));
            large.push_back(std::abs(entropy_vm(sample_power_law(4000, 3, key), {}, key).value - target));
        }
        const double ms = testing::median(small), ml = testing::median(large);
        std::ostringstream d;
        d << "median |err| n=250 " << ms << ", n=4000 " << ml;
        return Outcome{ml < 0.10 && ml < ms, d.str()};
    });

    criterion(3, "uniform entropy near zero", 60.0, [] {
        std::vector<double> errs;
        for (std::uint64_t seed = 0; seed < 20; ++seed) {
            const auto key = derive_key(0xe3, seed);
            errs.push_back(std::abs(entropy_vm(uniform_column(4000, key), {}, key).value));
        }
        const double m = testing::median(errs);
        std::ostringstream d;
        d << "median |H| n=4000 " << m;
        return Outcome{m < 0.08, d.str()};
    });

    criterion(4, "VM-CI type-I and type-II error on the mixture models", 900.0, [] {
        ExperimentConfig c;
        c.experiment = ExperimentKind::ci_error_curve;
        c.sample_sizes = {500, 2000};
        c.replications = 200;  // 100 null + 100 alternative per n
        c.root_seed = 4;
        const auto rows = run_ci_error_curve(c);
        const double t1_500 = rate(rows, 500, "type1_error"), t2_500 = rate(rows, 500, "type2_error");
        const double t1 = rate(rows, 2000, "type1_error"), t2 = rate(rows, 2000, "type2_error");
        std::ostringstream d;
        d << "n=2000 type-I " << t1 << ", type-II " << t2 << "; total n=500 " << t1_500 + t2_500 << ", n=2000 "
          << t1 + t2;
        return Outcome{t1 <= 0.10 && t2 <= 0.10 && t1 + t2 <= t1_500 + t2_500 + 0.05, d.str()};
    });

    criterion(5, "oracle PC and GS recover essential graphs", 120.0, [] {
        const auto g = sem_dag();
        const auto truth = essential_graph(g);
        const auto& vars = g.vertices().names();
        const auto lp = structural_loss(pc(oracle_ci(g), vars, vars.size() - 2).graph, truth);
        const auto lg = structural_loss(gs(oracle_ci(g), vars).graph, truth);
        const bool oriented = truth.undirected().empty() && truth == to_pdag(g);
        std::size_t checked = 0, mismatched = 0;
        for (std::size_t m = 1; m <= 5; ++m)
            for (const auto& dag : testing::all_dags(m)) {
                ++checked;
                if (!(pc(oracle_ci(dag), dag.vertices().names(), dag.max_degree()).graph == essential_graph(dag)))
                    ++mismatched;
            }
        std::ostringstream d;
        d << "loss PC " << lp << ", GS " << lg << ", truth fully oriented " << oriented << "; " << mismatched
          << " mismatches over " << checked << " DAGs";
        return Outcome{lp == 0 && lg == 0 && oriented && mismatched == 0, d.str()};
    });

    std::vector<ResultRow> discovery_rows;
    criterion(6, "PC with VM-CI on SEM data, loss trend", 1800.0, [&] {
        ExperimentConfig c;
        c.experiment = ExperimentKind::discovery_loss_curve;
        c.sample_sizes = {500, 4000};
        c.replications = 25;
        c.tester.i_min = 0.01;
        c.algorithm = Algorithm::pc;
        c.root_seed = 6;
        discovery_rows = run_discovery_loss_curve(c);
        double m500 = -1, m4000 = -1;
        for (const auto& r : discovery_rows)
            if (r.metric_name == "median_structural_loss") (r.n == 500 ? m500 : m4000) = r.metric_value;
        std::ostringstream d;
        d << "median loss n=500 " << m500 << ", n=4000 " << m4000;
        return Outcome{m4000 <= m500 && m4000 <= 4.0, d.str()};
    });

    criterion(7, "PC test count within the combinatorial bound", 1.0, [&] {
        const auto bound = static_cast<double>(pc_test_bound(6, 4));
        std::size_t runs = 0, violations = 0;
        double worst = 0.0;
        for (const auto& r : discovery_rows)
            if (r.metric_name == "ci_test_count") {
                ++runs;
                worst = std::max(worst, r.metric_value);
                violations += r.metric_value > bound;
            }
        std::ostringstream d;
        d << runs << " runs, max count " << worst << ", bound " << bound;
        return Outcome{runs == 50 && violations == 0, d.str()};
    });

    criterion(8, "d-separation agrees with path enumeration", 60.0, [] {
        std::size_t queries = 0, disagreements = 0;
        for (std::uint64_t seed = 0; seed < 200; ++seed) {
            const std::size_t m = 2 + seed % 6;
            const auto g = testing::random_dag(m, 0.15 + 0.1 * static_cast<double>(seed % 6), derive_key(8, seed));
            for (std::size_t x = 0; x < m; ++x)
                for (std::size_t y = x + 1; y < m; ++y) {
                    std::vector<std::size_t> rest;
                    for (std::size_t v = 0; v < m; ++v)
                        if (v != x && v != y) rest.push_back(v);
                    std::vector<std::vector<std::size_t>> zs{{}};
                    for (std::size_t i = 0; i < rest.size(); ++i) {
                        zs.push_back({rest[i]});
                        for (std::size_t j = i + 1; j < rest.size(); ++j) zs.push_back({rest[i], rest[j]});
                    }
                    for (const auto& z : zs) {
                        std::vector<std::string> zn;
                        for (auto v : z) zn.push_back(g.vertices().name(v));
                        const bool fast = d_separated(g, g.vertices().name(x), g.vertices().name(y), zn);
                        disagreements += fast != testing::brute_force_d_separated(g, x, y, z);
                        ++queries;
                    }
                }
        }
        std::ostringstream d;
        d << disagreements << " disagreements over " << queries << " queries";
        return Outcome{disagreements == 0, d.str()};
    });

    criterion(9, "cmi_vm cost grows quadratically", 300.0, [] {
        auto time_at = [](std::size_t n, std::uint64_t seed) {
            const auto data = sample_mixture(n, MixtureSpec{}, seed);
            const auto t0 = Clock::now();
            const auto e = cmi_vm(data, "X", "Y", {"Z1", "Z2"}, {}, seed);
            const double s = std::chrono::duration<double>(Clock::now() - t0).count();
            if (!std::isfinite(e.value)) throw std::runtime_error("non-finite estimate");
            return s;
        };
        std::vector<double> ratios;
        for (std::uint64_t seed = 0; seed < 5; ++seed) ratios.push_back(time_at(4000, seed) / time_at(1000, seed));
        const double r = testing::median(ratios);
        std::ostringstream d;
        d << "median time ratio n=4000/n=1000 " << r;
        return Outcome{r >= 8.0 && r <= 32.0, d.str()};
    });

    criterion(10, "experiment CSV is byte-reproducible", 120.0, [] {
        namespace fs = std::filesystem;
        const auto dir = fs::temp_directory_path() / "vmci_acceptance";
        fs::create_directories(dir);
        const auto cfg = dir / "repro.cfg";
        std::ofstream(cfg) << "experiment = ci_error_curve\n"
                              "sample_sizes = 200, 400\n"
                              "replications = 10\n"
                              "root_seed = 10\n"
                              "threads = 2\n";
        auto run = [&](const std::string& out) {
            const std::string cmd = std::string(VMCI_CLI_PATH) + " experiment --config " + cfg.string() +
                                    " > " + (dir / out).string();
            const int status = std::system(cmd.c_str());
            return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
        };
        const int a = run("a.csv"), b = run("b.csv");
        const auto ca = slurp(dir / "a.csv"), cb = slurp(dir / "b.csv");
        fs::remove_all(dir);
        std::ostringstream d;
        d << "exit codes " << a << "," << b << "; " << ca.size() << " bytes, identical " << (ca == cb);
        return Outcome{a == 0 && b == 0 && !ca.empty() && ca == cb, d.str()};
    });

    std::cout << (failures == 0 ? "ALL CRITERIA PASS" : std::to_string(failures) + " CRITERIA FAIL") << std::endl;
    return failures == 0 ? 0 : 1;
}
