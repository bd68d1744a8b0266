#include "vmci/density.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace vmci {

double compute_bandwidth(const BandwidthRule& rule, std::size_t n) {
    if (n < 1) throw std::invalid_argument("compute_bandwidth: n must be positive");
    if (!(rule.gamma > 0.0) || !std::isfinite(rule.gamma))
        throw std::invalid_argument("compute_bandwidth: gamma must be positive");
    if (rule.beta < 1) throw std::invalid_argument("compute_bandwidth: beta must be positive");
    if (rule.exponent_dim < 0)
        throw std::invalid_argument("compute_bandwidth: exponent_dim must be nonnegative");
    const double exponent = -1.0 / (2.0 * rule.beta + rule.exponent_dim);
    return rule.gamma * std::pow(static_cast<double>(n), exponent);
}

DensityEstimate::DensityEstimate(SampleMatrix fit_samples, double bandwidth, KernelSpec kernel,
                                 double floor)
    : fit_(std::move(fit_samples)),
      h_(bandwidth),
      spec_(kernel),
      floor_(floor),
      kernel_(kernel.order()),
      norm_(0.0) {
    if (fit_.rows() < 2)
        throw std::invalid_argument("density fit needs at least 2 rows, got " +
                                    std::to_string(fit_.rows()));
    if (!fit_.all_finite()) throw std::invalid_argument("density fit samples contain non-finite values");
    if (!(h_ > 0.0) || !std::isfinite(h_)) throw std::invalid_argument("bandwidth must be positive");
    if (!(floor_ > 0.0)) throw std::invalid_argument("density floor must be positive");
    if (static_cast<std::size_t>(spec_.dim()) != fit_.cols())
        throw std::invalid_argument("kernel dimension " + std::to_string(spec_.dim()) +
                                    " does not match " + std::to_string(fit_.cols()) + " columns");
    norm_ = 1.0 / (static_cast<double>(fit_.rows()) * std::pow(h_, static_cast<double>(fit_.cols())));
}

double DensityEstimate::eval_raw(std::span<const double> point) const {
    const std::size_t d = fit_.cols();
    if (point.size() != d)
        throw std::invalid_argument("density evaluated at a point of dimension " +
                                    std::to_string(point.size()) + ", expected " + std::to_string(d));
    for (double v : point)
        if (!std::isfinite(v)) throw std::invalid_argument("density evaluated at a non-finite point");
    const double inv_h = 1.0 / h_;
    const double* row = fit_.values().data();
    double sum = 0.0;
    for (std::size_t i = 0; i < fit_.rows(); ++i, row += d) {
        double term = 1.0;
        for (std::size_t j = 0; j < d; ++j) {
            const double u = (row[j] - point[j]) * inv_h;
            if (u < -1.0 || u > 1.0) {
                term = 0.0;
                break;
            }
            term *= kernel_.eval_inside(u);
        }
        sum += term;
    }
    return sum * norm_;
}

double DensityEstimate::eval(std::span<const double> point) const {
    const double raw = eval_raw(point);
    return raw > floor_ ? raw : floor_;
}

DensityEstimate fit_kde(const SampleMatrix& samples, const KernelSpec& kernel,
                        const BandwidthRule& rule, std::size_t n_total, double floor) {
    if (rule.beta != kernel.order())
        throw std::invalid_argument("bandwidth rule beta does not match kernel order");
    return DensityEstimate(samples, compute_bandwidth(rule, n_total), kernel, floor);
}

}  // namespace vmci
