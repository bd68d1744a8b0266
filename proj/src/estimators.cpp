#include "vmci/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <set>
#include <sstream>
#include <stdexcept>

#include "vmci/rng.hpp"

namespace vmci {

SampleSplit split_rows(std::size_t n, std::uint64_t seed) {
    auto perm = seeded_permutation(n, seed);
    const std::size_t n_fit = (n + 1) / 2;
    SampleSplit split;
    split.fit_rows.assign(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(n_fit));
    split.eval_rows.assign(perm.begin() + static_cast<std::ptrdiff_t>(n_fit), perm.end());
    return split;
}

EntropyEstimate entropy_vm(const SampleMatrix& samples, const EntropyParams& params,
                           std::uint64_t split_seed) {
    if (samples.rows() < 4)
        throw std::invalid_argument("entropy_vm needs at least 4 rows, got " +
                                    std::to_string(samples.rows()));
    return entropy_vm(samples, params, split_rows(samples.rows(), split_seed));
}

EntropyEstimate entropy_vm(const SampleMatrix& samples, const EntropyParams& params,
                           const SampleSplit& split) {
    const std::size_t n = samples.rows();
    if (n < 4) throw std::invalid_argument("entropy_vm needs at least 4 rows, got " + std::to_string(n));
    if (split.fit_rows.size() + split.eval_rows.size() != n)
        throw std::invalid_argument("entropy_vm: split does not cover the sample");
    if (!samples.all_finite()) throw std::invalid_argument("entropy_vm: samples contain non-finite values");

    const KernelSpec kernel(params.beta, static_cast<int>(samples.cols()));
    const BandwidthRule rule{params.gamma, params.beta, params.exponent_dim};
    const auto density = fit_kde(samples.select_rows(split.fit_rows), kernel, rule, n, params.floor);

    EntropyEstimate est;
    est.n_total = n;
    est.n_fit = split.fit_rows.size();
    est.n_eval = split.eval_rows.size();
    est.bandwidth_h = density.bandwidth();
    est.beta = params.beta;

    double log_sum = 0.0;
    for (auto r : split.eval_rows) {
        const double raw = density.eval_raw(samples.row(r));
        if (raw <= params.floor) {
            ++est.floor_hits;
            log_sum += std::log(params.floor);
        } else {
            log_sum += std::log(raw);
        }
    }
    est.value = -log_sum / static_cast<double>(est.n_eval);
    return est;
}

double entropy_plugin_oracle(const std::function<double(std::span<const double>)>& density,
                             const std::vector<Interval>& domain_box, int grid_points_per_axis,
                             double floor) {
    if (domain_box.empty() || domain_box.size() > 2)
        throw std::invalid_argument(
            "entropy_plugin_oracle supports 1 or 2 axes; tensor grids grow as points^d");
    if (grid_points_per_axis < 1) throw std::invalid_argument("entropy_plugin_oracle: need grid points");
    for (const auto& iv : domain_box)
        if (!(iv.hi > iv.lo)) throw std::invalid_argument("entropy_plugin_oracle: empty interval");

    const auto m = static_cast<std::size_t>(grid_points_per_axis);
    const std::size_t d = domain_box.size();
    std::vector<double> step(d);
    double cell = 1.0;
    for (std::size_t k = 0; k < d; ++k) {
        step[k] = (domain_box[k].hi - domain_box[k].lo) / static_cast<double>(m);
        cell *= step[k];
    }

    std::vector<double> point(d);
    std::size_t total = 1;
    for (std::size_t k = 0; k < d; ++k) total *= m;
    double acc = 0.0;
    for (std::size_t idx = 0; idx < total; ++idx) {
        std::size_t rest = idx;
        for (std::size_t k = 0; k < d; ++k) {
            point[k] = domain_box[k].lo + (static_cast<double>(rest % m) + 0.5) * step[k];
            rest /= m;
        }
        const double p = std::max(floor, density(point));
        acc -= p * std::log(p);
    }
    return acc * cell;
}

CmiEstimate cmi_vm(const SampleMatrix& data, const std::string& x, const std::string& y,
                   const std::vector<std::string>& z, const CmiParams& params,
                   std::uint64_t split_seed) {
    if (x == y) throw std::invalid_argument("cmi_vm: x and y must be different columns");
    std::set<std::string> zset(z.begin(), z.end());
    if (zset.size() != z.size()) throw std::invalid_argument("cmi_vm: conditioning set has duplicates");
    if (zset.count(x) || zset.count(y))
        throw std::invalid_argument("cmi_vm: x and y must not appear in the conditioning set");
    const std::size_t ix = data.column_index(x);
    const std::size_t iy = data.column_index(y);
    std::vector<std::size_t> iz;
    for (const auto& name : z) iz.push_back(data.column_index(name));
    // Canonical column order keeps the estimate bit-identical under x <-> y
    // and under any reordering of z.
    std::sort(iz.begin(), iz.end());
    if (data.rows() < 4)
        throw std::invalid_argument("cmi_vm needs at least 4 rows, got " + std::to_string(data.rows()));

    CmiEstimate out;
    out.d_z = z.size();
    const int dz = static_cast<int>(z.size());
    if (!(params.beta > 1.0 + dz / 2.0)) {
        std::ostringstream msg;
        msg << "beta = " << params.beta << " does not exceed 1 + d_Z/2 = " << 1.0 + dz / 2.0
            << "; the estimator converges slower than the parametric rate";
        out.warnings.push_back(msg.str());
    }

    const auto split = split_rows(data.rows(), split_seed);

    auto columns = [&](std::initializer_list<std::size_t> head) {
        std::vector<std::size_t> cols(head);
        cols.insert(cols.end(), iz.begin(), iz.end());
        return cols;
    };
    auto term = [&](std::vector<std::size_t> cols, int exponent_dim, std::optional<double> gamma) {
        EntropyParams p{params.beta, gamma.value_or(params.gamma), exponent_dim, params.floor};
        return entropy_vm(data.select_columns(cols), p, split);
    };

    auto run_xz = [&] { return term(columns({ix}), 1 + dz, params.gamma_xz); };
    auto run_yz = [&] { return term(columns({iy}), 1 + dz, params.gamma_yz); };
    auto run_z = [&] { return term(iz, dz, params.gamma_z); };
    auto run_xyz = [&] { return term(columns({std::min(ix, iy), std::max(ix, iy)}), 2 + dz, params.gamma_xyz); };

    if (params.parallel_terms) {
        auto f_xz = std::async(std::launch::async, run_xz);
        auto f_yz = std::async(std::launch::async, run_yz);
        std::future<EntropyEstimate> f_z;
        if (dz > 0) f_z = std::async(std::launch::async, run_z);
        out.h_xyz = run_xyz();
        out.h_xz = f_xz.get();
        out.h_yz = f_yz.get();
        if (dz > 0) out.h_z = f_z.get();
    } else {
        out.h_xz = run_xz();
        out.h_yz = run_yz();
        if (dz > 0) out.h_z = run_z();
        out.h_xyz = run_xyz();
    }

    const double hz = out.h_z ? out.h_z->value : 0.0;
    out.value = ((out.h_xz.value + out.h_yz.value) - hz) - out.h_xyz.value;
    return out;
}

}  // namespace vmci
