#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "vmci/citest.hpp"
#include "vmci/synth.hpp"

namespace vmci {

enum class ExperimentKind { ci_error_curve, discovery_loss_curve, entropy_convergence };
enum class Algorithm { pc, gs };

struct ExperimentConfig {
    ExperimentKind experiment = ExperimentKind::ci_error_curve;
    std::vector<std::size_t> sample_sizes{500, 1000, 2000};
    std::size_t replications = 100;
    CiTesterConfig tester;
    bool oracle_tester = false;  // discovery only: d-separation on the true DAG
    MixtureSpec null_model{3, 0.2, 0.2, 0.0};
    MixtureSpec alt_model{3, 0.2, 0.1, 0.3};
    int model_beta = 3;  // power-law exponent of the SEM and entropy models
    Algorithm algorithm = Algorithm::pc;
    std::optional<std::size_t> delta_max;  // defaults to m - 2
    std::uint64_t root_seed = 0;
    std::string output_path;
    std::size_t threads = 1;
    bool record_wall_time = false;  // off keeps the CSV byte-reproducible

    /// Throws std::invalid_argument on an invalid configuration.
    void validate() const;
};

struct ResultRow {
    std::size_t n = 0;
    long replication = 0;  // -1 marks a per-n summary row
    std::string metric_name;
    double metric_value = 0.0;
    double wall_time_s = 0.0;
    std::uint64_t seed = 0;

    friend bool operator==(const ResultRow&, const ResultRow&) = default;
};

/// Seed of replication `rep` at sample size `n`: derive_key(derive_key(root, n), rep).
/// Summary rows carry derive_key(root, n).
std::uint64_t replication_seed(std::uint64_t root_seed, std::size_t n, std::size_t rep);
std::uint64_t summary_seed(std::uint64_t root_seed, std::size_t n);

/// Per n: the first ceil(R/2) replications test the null mixture, the rest the
/// alternative. Rows "type1_error" / "type2_error" hold 0 or 1, and one
/// "total_error" summary row per n holds the sum of the two rates.
std::vector<ResultRow> run_ci_error_curve(const ExperimentConfig& config);

/// Rows "structural_loss" and "ci_test_count" per replication against the
/// essential graph of the SEM DAG, plus a "median_structural_loss" summary.
std::vector<ResultRow> run_discovery_loss_curve(const ExperimentConfig& config);

/// Rows "abs_error" = |entropy_vm - closed form| on 1-D power-law data, plus
/// a "median_abs_error" summary.
std::vector<ResultRow> run_entropy_convergence(const ExperimentConfig& config);

std::vector<ResultRow> run_experiment(const ExperimentConfig& config);

/// Header n,replication,metric_name,metric_value,wall_time_s,seed.
void write_results_csv(std::ostream& out, const std::vector<ResultRow>& rows);

// Config files hold one `key = value` per line; '#' starts a comment.
std::map<std::string, std::string> read_key_values(std::istream& in);
std::map<std::string, std::string> read_key_values_file(const std::string& path);
const std::vector<std::string>& experiment_config_keys();
/// Unknown keys and malformed values throw std::invalid_argument.
ExperimentConfig parse_experiment_config(const std::map<std::string, std::string>& kv);

}  // namespace vmci
