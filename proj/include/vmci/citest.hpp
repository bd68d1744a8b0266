#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "vmci/ci_tester.hpp"
#include "vmci/density.hpp"
#include "vmci/sample_matrix.hpp"

namespace vmci {

enum class TesterKind { vm_ci, gaussian_pc };

struct CiTesterConfig {
    TesterKind tester = TesterKind::vm_ci;
    double i_min = 0.11;  // dependence threshold is i_min / 2
    int beta = 3;
    double gamma = 0.35;
    double floor = kDefaultDensityFloor;
    double alpha = 0.05;  // gaussian_pc only
    std::uint64_t base_seed = 0;
    bool parallel_terms = false;

    /// Throws std::invalid_argument when a field is out of range.
    void validate() const;
};

/// Split seed for one query. Symmetric in {x, y} and independent of the
/// order of z, so a repeated query always sees the same split.
std::uint64_t derive_test_seed(std::uint64_t base_seed, const std::string& x, const std::string& y,
                               const std::vector<std::string>& z);

/// Declares dependence iff the CMI estimate exceeds i_min / 2; ties are independent.
CiDecision vm_ci_test(const SampleMatrix& data, const std::string& x, const std::string& y,
                      const std::vector<std::string>& z, const CiTesterConfig& config);

/// Fisher-z test of zero partial correlation. `statistic` holds the signed z
/// value and `threshold` the two-sided critical value.
/// Throws std::invalid_argument when n <= |z| + 3, std::runtime_error on a
/// singular covariance.
CiDecision gaussian_pc_test(const SampleMatrix& data, const std::string& x, const std::string& y,
                            const std::vector<std::string>& z, double alpha);

/// Binds `data` (shared, not copied per query) to the configured tester.
CiTester make_tester(std::shared_ptr<const SampleMatrix> data, const CiTesterConfig& config);

std::string tester_name(TesterKind kind);

}  // namespace vmci
