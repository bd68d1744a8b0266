#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "vmci/ci_tester.hpp"
#include "vmci/graph.hpp"

namespace vmci {

struct DiscoveryResult {
    Pdag graph;
    SepsetMap sepsets;
    std::size_t ci_test_count = 0;
    // PC: tests per conditioning-set size. GS: tests per phase
    // (Markov boundaries, skeleton, orientation).
    std::vector<std::size_t> tests_per_level;
    std::string tester_name;
    std::map<std::string, std::vector<std::string>> markov_boundaries;  // GS only
    std::vector<std::string> warnings;
};

/// PC: level-wise edge deletion from the complete graph for conditioning sets
/// of size 0..delta_max drawn from the current neighbours of X, then
/// v-structure orientation from the recorded separating sets and Meek closure.
/// Iteration follows `vars` order; subsets are enumerated lexicographically.
DiscoveryResult pc(const CiTester& tester, const std::vector<std::string>& vars, std::size_t delta_max);

/// Upper bound 2 C(m,2) sum_{i=0..delta} C(m-1, i) on the number of PC tests.
std::size_t pc_test_bound(std::size_t m, std::size_t delta);

/// Grow-shrink Markov boundary of `x`, in `vars` order.
std::vector<std::string> gs_markov_boundary(const CiTester& tester, const std::vector<std::string>& vars,
                                            const std::string& x);

/// GS: Markov boundaries, skeleton from boundary-restricted separation
/// search, collider orientation, Meek closure. Pairs whose boundary
/// membership is one-sided are not considered for an edge.
DiscoveryResult gs(const CiTester& tester, const std::vector<std::string>& vars);

}  // namespace vmci
