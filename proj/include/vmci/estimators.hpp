#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "vmci/density.hpp"
#include "vmci/sample_matrix.hpp"

namespace vmci {

/// Seeded partition of row indices: the fit part gets ceil(n/2) rows.
struct SampleSplit {
    std::vector<std::size_t> fit_rows;
    std::vector<std::size_t> eval_rows;
};

SampleSplit split_rows(std::size_t n, std::uint64_t seed);

struct EntropyParams {
    int beta = 3;
    double gamma = 0.35;
    int exponent_dim = 1;
    double floor = kDefaultDensityFloor;
};

/// Von Mises entropy estimate in nats with its diagnostics.
struct EntropyEstimate {
    double value = 0.0;
    std::size_t n_total = 0;
    std::size_t n_fit = 0;
    std::size_t n_eval = 0;
    double bandwidth_h = 0.0;
    int beta = 0;
    std::size_t floor_hits = 0;  // eval points whose raw density was at or below the floor

    friend bool operator==(const EntropyEstimate&, const EntropyEstimate&) = default;
};

/// -(1/n_eval) sum over the eval half of log max(floor, p_hat), where p_hat is
/// a KDE on the fit half with bandwidth from the full row count.
/// Throws std::invalid_argument for fewer than 4 rows or non-finite data.
EntropyEstimate entropy_vm(const SampleMatrix& samples, const EntropyParams& params,
                           std::uint64_t split_seed);
EntropyEstimate entropy_vm(const SampleMatrix& samples, const EntropyParams& params,
                           const SampleSplit& split);

struct Interval {
    double lo;
    double hi;
};

/// Plug-in entropy -integral p log p over a box of at most two axes, by the
/// tensor midpoint rule. Density values are floored at `floor` first.
double entropy_plugin_oracle(const std::function<double(std::span<const double>)>& density,
                             const std::vector<Interval>& domain_box, int grid_points_per_axis,
                             double floor = kDefaultDensityFloor);

struct CmiParams {
    int beta = 3;
    double gamma = 0.35;
    double floor = kDefaultDensityFloor;
    // Per-term bandwidth prefactors; unset terms use `gamma`.
    std::optional<double> gamma_xz;
    std::optional<double> gamma_yz;
    std::optional<double> gamma_z;
    std::optional<double> gamma_xyz;
    // Evaluate the four entropy terms on separate threads.
    bool parallel_terms = false;
};

/// H(X,Z) + H(Y,Z) - H(Z) - H(X,Y,Z), all four terms on one shared split.
struct CmiEstimate {
    double value = 0.0;
    EntropyEstimate h_xz;
    EntropyEstimate h_yz;
    std::optional<EntropyEstimate> h_z;  // absent when Z is empty
    EntropyEstimate h_xyz;
    std::size_t d_z = 0;
    std::vector<std::string> warnings;

    friend bool operator==(const CmiEstimate&, const CmiEstimate&) = default;
};

/// Bandwidth exponents follow the dimension count of each term's joint
/// smoothness: 2+d_Z for (X,Y,Z), 1+d_Z for (X,Z) and (Y,Z), d_Z for Z.
/// A beta at or below 1 + d_Z/2 only produces a warning.
CmiEstimate cmi_vm(const SampleMatrix& data, const std::string& x, const std::string& y,
                   const std::vector<std::string>& z, const CmiParams& params,
                   std::uint64_t split_seed);

}  // namespace vmci
