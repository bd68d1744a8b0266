#pragma once

#include <cstddef>
#include <span>

#include "vmci/kernels.hpp"
#include "vmci/sample_matrix.hpp"

namespace vmci {

inline constexpr double kDefaultDensityFloor = 1e-6;

/// h = gamma * n^(-1 / (2 beta + exponent_dim)).
///
/// `exponent_dim` is the dimension entering the rate, which for the CMI terms
/// is not always the dimension of the data being smoothed.
struct BandwidthRule {
    double gamma = 0.35;
    int beta = 3;
    int exponent_dim = 1;
};

/// Throws std::invalid_argument for n < 1, gamma <= 0, beta < 1 or exponent_dim < 0.
double compute_bandwidth(const BandwidthRule& rule, std::size_t n);

/// Product-kernel density estimate over a retained set of samples.
/// Immutable once built; evaluation is safe from any number of threads.
class DensityEstimate {
public:
    /// Throws std::invalid_argument on fewer than 2 rows, non-finite samples,
    /// non-positive bandwidth or floor, or a kernel/column dimension mismatch.
    DensityEstimate(SampleMatrix fit_samples, double bandwidth, KernelSpec kernel, double floor);

    const SampleMatrix& fit_samples() const { return fit_; }
    double bandwidth() const { return h_; }
    const KernelSpec& kernel() const { return spec_; }
    double floor() const { return floor_; }
    std::size_t dim() const { return fit_.cols(); }

    /// (1/n_fit) sum_i h^-d K_d((x_i - point) / h); may be negative or zero.
    double eval_raw(std::span<const double> point) const;

    /// max(floor, eval_raw(point)).
    double eval(std::span<const double> point) const;

private:
    SampleMatrix fit_;
    double h_;
    KernelSpec spec_;
    double floor_;
    LegendreKernel kernel_;
    double norm_;  // 1 / (n_fit h^d)
};

/// Fits on `samples` as given; the bandwidth comes from `rule` evaluated at
/// `n_total`, the size of the full data set before any split.
DensityEstimate fit_kde(const SampleMatrix& samples, const KernelSpec& kernel,
                        const BandwidthRule& rule, std::size_t n_total,
                        double floor = kDefaultDensityFloor);

}  // namespace vmci
