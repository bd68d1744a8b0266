#include "vmci/citest.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>

#include <Eigen/Dense>
#include <boost/math/distributions/normal.hpp>

#include "vmci/estimators.hpp"
#include "vmci/rng.hpp"

namespace vmci {

void CiTesterConfig::validate() const {
    if (!(i_min > 0.0)) throw std::invalid_argument("i_min must be positive");
    if (beta < 1 || beta % 2 == 0) throw std::invalid_argument("beta must be a positive odd integer");
    if (!(gamma > 0.0)) throw std::invalid_argument("gamma must be positive");
    if (!(floor > 0.0)) throw std::invalid_argument("floor must be positive");
    if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must lie in (0, 1)");
}

std::string tester_name(TesterKind kind) {
    switch (kind) {
        case TesterKind::vm_ci: return "vmci";
        case TesterKind::gaussian_pc: return "gauss";
    }
    return "unknown";
}

std::uint64_t derive_test_seed(std::uint64_t base_seed, const std::string& x, const std::string& y,
                               const std::vector<std::string>& z) {
    const auto& lo = std::min(x, y);
    const auto& hi = std::max(x, y);
    std::vector<std::string> zs(z);
    std::sort(zs.begin(), zs.end());
    std::uint64_t key = derive_key(base_seed, fnv1a(lo));
    key = derive_key(key, fnv1a(hi));
    key = derive_key(key, zs.size());
    for (const auto& name : zs) key = derive_key(key, fnv1a(name));
    return key;
}

CiDecision vm_ci_test(const SampleMatrix& data, const std::string& x, const std::string& y,
                      const std::vector<std::string>& z, const CiTesterConfig& config) {
    config.validate();
    CmiParams params;
    params.beta = config.beta;
    params.gamma = config.gamma;
    params.floor = config.floor;
    params.parallel_terms = config.parallel_terms;
    const auto est = cmi_vm(data, x, y, z, params, derive_test_seed(config.base_seed, x, y, z));

    CiDecision d;
    d.statistic = est.value;
    d.threshold = config.i_min / 2.0;
    d.independent = d.statistic <= d.threshold;
    d.n_used = data.rows();
    d.tester_name = tester_name(TesterKind::vm_ci);
    return d;
}

CiDecision gaussian_pc_test(const SampleMatrix& data, const std::string& x, const std::string& y,
                            const std::vector<std::string>& z, double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must lie in (0, 1)");
    if (x == y) throw std::invalid_argument("gaussian_pc_test: x and y must differ");
    std::set<std::string> zset(z.begin(), z.end());
    if (zset.count(x) || zset.count(y) || zset.size() != z.size())
        throw std::invalid_argument("gaussian_pc_test: invalid conditioning set");
    const std::size_t n = data.rows();
    const std::size_t k = z.size();
    if (n <= k + 3)
        throw std::invalid_argument("gaussian_pc_test needs more than |z| + 3 = " +
                                    std::to_string(k + 3) + " rows");

    auto column = [&](const std::string& name) {
        const auto c = data.column_index(name);
        Eigen::VectorXd v(static_cast<Eigen::Index>(n));
        for (std::size_t r = 0; r < n; ++r) v(static_cast<Eigen::Index>(r)) = data(r, c);
        return Eigen::VectorXd(v.array() - v.mean());
    };
    Eigen::VectorXd rx = column(x);
    Eigen::VectorXd ry = column(y);
    if (k > 0) {
        Eigen::MatrixXd zm(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(k));
        for (std::size_t j = 0; j < k; ++j) zm.col(static_cast<Eigen::Index>(j)) = column(z[j]);
        Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(zm);
        if (qr.rank() < static_cast<Eigen::Index>(k))
            throw std::runtime_error("gaussian_pc_test: conditioning covariance is singular");
        rx -= zm * qr.solve(rx);
        ry -= zm * qr.solve(ry);
    }
    const double sxx = rx.squaredNorm();
    const double syy = ry.squaredNorm();
    const double scale = std::max(column(x).squaredNorm(), column(y).squaredNorm());
    if (!(sxx > 1e-24 * scale) || !(syy > 1e-24 * scale))
        throw std::runtime_error("gaussian_pc_test: residual variance vanishes (singular covariance)");
    const double r = std::clamp(rx.dot(ry) / std::sqrt(sxx * syy), -1.0, 1.0);

    CiDecision d;
    d.statistic = std::sqrt(static_cast<double>(n - k) - 3.0) * std::atanh(r);
    d.threshold = boost::math::quantile(boost::math::normal(), 1.0 - alpha / 2.0);
    d.independent = std::abs(d.statistic) <= d.threshold;
    d.n_used = n;
    d.tester_name = tester_name(TesterKind::gaussian_pc);
    return d;
}

CiTester make_tester(std::shared_ptr<const SampleMatrix> data, const CiTesterConfig& config) {
    config.validate();
    if (!data) throw std::invalid_argument("make_tester: no data");
    CiTester t;
    t.name = tester_name(config.tester);
    if (config.tester == TesterKind::vm_ci) {
        t.test = [data, config](const std::string& x, const std::string& y,
                                const std::vector<std::string>& z) {
            return vm_ci_test(*data, x, y, z, config);
        };
    } else {
        t.test = [data, alpha = config.alpha](const std::string& x, const std::string& y,
                                              const std::vector<std::string>& z) {
            return gaussian_pc_test(*data, x, y, z, alpha);
        };
    }
    return t;
}

}  // namespace vmci
