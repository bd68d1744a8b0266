#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

namespace vmci {

/// Outcome of one X _||_ Y | Z query.
struct CiDecision {
    double statistic = 0.0;
    double threshold = 0.0;
    bool independent = false;
    std::size_t n_used = 0;
    std::string tester_name;

    friend bool operator==(const CiDecision&, const CiDecision&) = default;
};

/// Anything that answers conditional independence queries by variable name.
/// Discovery algorithms only see this interface.
struct CiTester {
    std::string name;
    std::function<CiDecision(const std::string& x, const std::string& y,
                             const std::vector<std::string>& z)>
        test;

    CiDecision operator()(const std::string& x, const std::string& y,
                          const std::vector<std::string>& z) const {
        return test(x, y, z);
    }
};

}  // namespace vmci
