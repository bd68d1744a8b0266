#include <CLI11.hpp>

#include <cstdint>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "vmci/citest.hpp"
#include "vmci/discovery.hpp"
#include "vmci/estimators.hpp"
#include "vmci/graph.hpp"
#include "vmci/harness.hpp"
#include "vmci/sample_matrix.hpp"
#include "vmci/synth.hpp"

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitDependent = 3;
constexpr int kExitBadInput = 64;
constexpr int kExitRuntime = 70;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty()) out.push_back(item);
    return out;
}

void print_entropy(std::ostream& out, const std::string& prefix, const vmci::EntropyEstimate& e) {
    using vmci::format_double;
    out << prefix << "value=" << format_double(e.value) << '\n'
        << prefix << "n_total=" << e.n_total << '\n'
        << prefix << "n_fit=" << e.n_fit << '\n'
        << prefix << "n_eval=" << e.n_eval << '\n'
        << prefix << "bandwidth_h=" << format_double(e.bandwidth_h) << '\n'
        << prefix << "beta=" << e.beta << '\n'
        << prefix << "floor_hits=" << e.floor_hits << '\n';
}

vmci::TesterKind parse_tester(const std::string& s) {
    if (s == "vmci") return vmci::TesterKind::vm_ci;
    if (s == "gauss") return vmci::TesterKind::gaussian_pc;
    throw UsageError("unknown tester '" + s + "'");
}

// Compares against the essential graph when the truth file is a DAG, since
// discovery can only recover the equivalence class.
vmci::Pdag truth_class(const vmci::Pdag& truth) {
    if (truth.undirected().empty()) return vmci::essential_graph(vmci::to_dag(truth));
    return truth;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Von Mises CMI estimation, CI testing and causal discovery"};
    app.require_subcommand(1);

    // simulate
    std::string model = "mixture", sim_out;
    std::size_t sim_n = 1000;
    std::uint64_t sim_seed = 0;
    vmci::MixtureSpec mix;
    int sim_beta = 3;
    auto* simulate = app.add_subcommand("simulate", "Write a synthetic sample CSV");
    simulate->add_option("--model", model, "mixture or sem")->check(CLI::IsMember({"mixture", "sem"}));
    simulate->add_option("--n", sim_n, "Number of rows")->required();
    simulate->add_option("--seed", sim_seed, "Root seed");
    simulate->add_option("--out", sim_out, "Output CSV path")->required();
    simulate->add_option("--beta", sim_beta, "Power-law exponent of the noise");
    simulate->add_option("--t1", mix.t1, "P(U_X copies U_Z1)");
    simulate->add_option("--t2", mix.t2, "P(U_X copies U_Z2)");
    simulate->add_option("--txy", mix.t_xy, "P(U_Y copies U_X)");

    // entropy
    std::string ent_data;
    vmci::EntropyParams ent_params;
    std::uint64_t ent_seed = 0;
    auto* entropy = app.add_subcommand("entropy", "Estimate the differential entropy of all columns");
    entropy->add_option("--data", ent_data, "Sample CSV")->required();
    entropy->add_option("--beta", ent_params.beta, "Kernel order (odd)");
    entropy->add_option("--gamma", ent_params.gamma, "Bandwidth prefactor");
    entropy->add_option("--exponent-dim", ent_params.exponent_dim, "Dimension in the bandwidth exponent");
    entropy->add_option("--floor", ent_params.floor, "Density floor");
    entropy->add_option("--seed", ent_seed, "Split seed");

    // cmi
    std::string cmi_data, cmi_x, cmi_y, cmi_z;
    vmci::CmiParams cmi_params;
    std::uint64_t cmi_seed = 0;
    auto* cmi = app.add_subcommand("cmi", "Estimate I(X;Y|Z)");
    cmi->add_option("--data", cmi_data, "Sample CSV")->required();
    cmi->add_option("--x", cmi_x, "Column X")->required();
    cmi->add_option("--y", cmi_y, "Column Y")->required();
    cmi->add_option("--z", cmi_z, "Comma-separated conditioning columns");
    cmi->add_option("--beta", cmi_params.beta, "Kernel order (odd)");
    cmi->add_option("--gamma", cmi_params.gamma, "Bandwidth prefactor");
    cmi->add_option("--floor", cmi_params.floor, "Density floor");
    cmi->add_option("--seed", cmi_seed, "Split seed");

    // ci-test
    std::string ci_data, ci_x, ci_y, ci_z, ci_tester = "vmci";
    vmci::CiTesterConfig ci_config;
    auto* ci_test = app.add_subcommand("ci-test", "Test X independent of Y given Z (exit 0 independent, 3 dependent)");
    ci_test->add_option("--data", ci_data, "Sample CSV")->required();
    ci_test->add_option("--x", ci_x, "Column X")->required();
    ci_test->add_option("--y", ci_y, "Column Y")->required();
    ci_test->add_option("--z", ci_z, "Comma-separated conditioning columns");
    ci_test->add_option("--tester", ci_tester, "vmci or gauss")->check(CLI::IsMember({"vmci", "gauss"}));
    ci_test->add_option("--imin", ci_config.i_min, "Minimum detectable CMI");
    ci_test->add_option("--beta", ci_config.beta, "Kernel order (odd)");
    ci_test->add_option("--gamma", ci_config.gamma, "Bandwidth prefactor");
    ci_test->add_option("--floor", ci_config.floor, "Density floor");
    ci_test->add_option("--alpha", ci_config.alpha, "Significance level of the Gaussian test");
    ci_test->add_option("--seed", ci_config.base_seed, "Base seed");

    // discover
    std::string disc_data, disc_algorithm = "pc", disc_tester = "vmci", disc_truth, disc_out;
    vmci::CiTesterConfig disc_config;
    std::optional<std::size_t> disc_delta;
    auto* discover = app.add_subcommand("discover", "Learn an equivalence class with PC or GS");
    discover->add_option("--data", disc_data, "Sample CSV (not needed with the oracle tester)");
    discover->add_option("--algorithm", disc_algorithm, "pc or gs")->check(CLI::IsMember({"pc", "gs"}));
    discover->add_option("--tester", disc_tester, "vmci, gauss or oracle")
        ->check(CLI::IsMember({"vmci", "gauss", "oracle"}));
    discover->add_option("--truth", disc_truth, "Ground-truth graph file");
    discover->add_option("--out", disc_out, "Output graph file")->required();
    discover->add_option("--imin", disc_config.i_min, "Minimum detectable CMI");
    discover->add_option("--beta", disc_config.beta, "Kernel order (odd)");
    discover->add_option("--gamma", disc_config.gamma, "Bandwidth prefactor");
    discover->add_option("--floor", disc_config.floor, "Density floor");
    discover->add_option("--alpha", disc_config.alpha, "Significance level of the Gaussian test");
    discover->add_option("--seed", disc_config.base_seed, "Base seed");
    discover->add_option("--delta-max", disc_delta, "Largest PC conditioning set (default m - 2)");

    // experiment
    std::string exp_config_path;
    std::map<std::string, std::string> exp_overrides;
    auto* experiment = app.add_subcommand("experiment", "Run a replicated experiment and write result CSV");
    experiment->add_option("--config", exp_config_path, "Key-value config file");
    for (const auto& key : vmci::experiment_config_keys())
        experiment->add_option_function<std::string>(
            "--" + key, [&exp_overrides, key](const std::string& v) { exp_overrides[key] = v; },
            "Overrides config key " + key);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    try {
        if (*simulate) {
            vmci::SampleMatrix data = model == "sem"
                                          ? vmci::sample_sem(sim_n, vmci::SemSpec{sim_beta}, sim_seed)
                                          : (mix.beta = sim_beta, vmci::sample_mixture(sim_n, mix, sim_seed));
            vmci::write_csv_file(sim_out, data);
        } else if (*entropy) {
            const auto data = vmci::read_csv_file(ent_data);
            print_entropy(std::cout, "", vmci::entropy_vm(data, ent_params, ent_seed));
        } else if (*cmi) {
            const auto data = vmci::read_csv_file(cmi_data);
            const auto est = vmci::cmi_vm(data, cmi_x, cmi_y, split_list(cmi_z), cmi_params, cmi_seed);
            std::cout << "value=" << vmci::format_double(est.value) << '\n' << "d_z=" << est.d_z << '\n';
            print_entropy(std::cout, "h_xz.", est.h_xz);
            print_entropy(std::cout, "h_yz.", est.h_yz);
            if (est.h_z) print_entropy(std::cout, "h_z.", *est.h_z);
            print_entropy(std::cout, "h_xyz.", est.h_xyz);
            for (const auto& w : est.warnings) std::cerr << "warning: " << w << '\n';
        } else if (*ci_test) {
            ci_config.tester = parse_tester(ci_tester);
            ci_config.validate();
            const auto data = vmci::read_csv_file(ci_data);
            const auto z = split_list(ci_z);
            const auto d = ci_config.tester == vmci::TesterKind::vm_ci
                               ? vmci::vm_ci_test(data, ci_x, ci_y, z, ci_config)
                               : vmci::gaussian_pc_test(data, ci_x, ci_y, z, ci_config.alpha);
            std::cout << "tester=" << d.tester_name << '\n'
                      << "statistic=" << vmci::format_double(d.statistic) << '\n'
                      << "threshold=" << vmci::format_double(d.threshold) << '\n'
                      << "independent=" << (d.independent ? "true" : "false") << '\n'
                      << "n_used=" << d.n_used << '\n';
            return d.independent ? 0 : kExitDependent;
        } else if (*discover) {
            std::optional<vmci::Pdag> truth;
            if (!disc_truth.empty()) truth = vmci::read_graph_file(disc_truth);
            vmci::CiTester tester;
            std::vector<std::string> vars;
            if (disc_tester == "oracle") {
                if (!truth) throw UsageError("the oracle tester needs --truth");
                const auto dag = vmci::to_dag(*truth);
                tester = vmci::oracle_ci(dag);
                vars = dag.vertices().names();
            } else {
                if (disc_data.empty()) throw UsageError("--data is required unless --tester oracle");
                disc_config.tester = parse_tester(disc_tester);
                auto data = std::make_shared<const vmci::SampleMatrix>(vmci::read_csv_file(disc_data));
                vars = data->names();
                tester = vmci::make_tester(std::move(data), disc_config);
            }
            const std::size_t delta = disc_delta.value_or(vars.size() >= 2 ? vars.size() - 2 : 0);
            const auto result = disc_algorithm == "gs" ? vmci::gs(tester, vars) : vmci::pc(tester, vars, delta);
            vmci::write_graph_file(disc_out, result.graph);
            std::cout << "ci_test_count=" << result.ci_test_count << '\n';
            if (truth) std::cout << "structural_loss=" << vmci::structural_loss(result.graph, truth_class(*truth)) << '\n';
            for (const auto& w : result.warnings) std::cerr << "warning: " << w << '\n';
        } else if (*experiment) {
            std::map<std::string, std::string> kv;
            if (!exp_config_path.empty()) kv = vmci::read_key_values_file(exp_config_path);
            for (const auto& [k, v] : exp_overrides) kv[k] = v;
            const auto config = vmci::parse_experiment_config(kv);
            const auto rows = vmci::run_experiment(config);
            if (config.output_path.empty()) {
                vmci::write_results_csv(std::cout, rows);
            } else {
                std::ofstream f(config.output_path, std::ios::binary);
                if (!f) throw std::runtime_error("cannot open '" + config.output_path + "' for writing");
                vmci::write_results_csv(f, rows);
                if (!f) throw std::runtime_error("write to '" + config.output_path + "' failed");
            }
        }
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitBadInput;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitRuntime;
    }
    return 0;
}
