#include "vmci/discovery.hpp"

#include <algorithm>
#include <set>
#include <sstream>
#include <stdexcept>

namespace vmci {

namespace {

// Calls `fn` on every size-k subset of `items` in lexicographic index order;
// stops early when `fn` returns true. Returns whether it stopped early.
template <typename Fn>
bool for_each_subset(const std::vector<std::size_t>& items, std::size_t k, Fn&& fn) {
    if (k > items.size()) return false;
    std::vector<std::size_t> pick(k);
    for (std::size_t i = 0; i < k; ++i) pick[i] = i;
    std::vector<std::size_t> subset(k);
    while (true) {
        for (std::size_t i = 0; i < k; ++i) subset[i] = items[pick[i]];
        if (fn(subset)) return true;
        std::size_t i = k;
        while (i > 0 && pick[i - 1] == items.size() - k + (i - 1)) --i;
        if (i == 0) return false;
        ++pick[i - 1];
        for (std::size_t j = i; j < k; ++j) pick[j] = pick[j - 1] + 1;
    }
}

// All subsets by increasing size, lexicographic within a size.
template <typename Fn>
bool for_each_subset_any_size(const std::vector<std::size_t>& items, Fn&& fn) {
    for (std::size_t k = 0; k <= items.size(); ++k)
        if (for_each_subset(items, k, fn)) return true;
    return false;
}

std::string describe(const std::string& x, const std::string& y, const std::vector<std::string>& z) {
    std::ostringstream ss;
    ss << x << " _||_ " << y << " | {";
    for (std::size_t i = 0; i < z.size(); ++i) ss << (i ? "," : "") << z[i];
    ss << "}";
    return ss.str();
}

// Counts invocations and attaches the query to any error.
class CountingTester {
public:
    CountingTester(const CiTester& t, const VertexSet& vs) : tester_(t), vs_(vs) {}

    bool independent(std::size_t x, std::size_t y, const std::vector<std::size_t>& z) {
        std::vector<std::string> zn;
        zn.reserve(z.size());
        for (auto v : z) zn.push_back(vs_.name(v));
        ++count_;
        try {
            return tester_(vs_.name(x), vs_.name(y), zn).independent;
        } catch (const std::exception& e) {
            throw std::runtime_error("CI test " + describe(vs_.name(x), vs_.name(y), zn) +
                                     " failed: " + e.what());
        }
    }

    std::size_t count() const { return count_; }

private:
    const CiTester& tester_;
    const VertexSet& vs_;
    std::size_t count_ = 0;
};

std::vector<std::string> names_of(const VertexSet& vs, const std::vector<std::size_t>& idx) {
    std::vector<std::string> out;
    out.reserve(idx.size());
    for (auto i : idx) out.push_back(vs.name(i));
    return out;
}

// Applies requested arrowheads to the skeleton; an edge requested in both
// directions stays undirected.
void apply_orientations(Pdag& g, const std::set<Edge>& wanted, std::vector<std::string>& warnings) {
    const auto& vs = g.vertices();
    for (const auto& [a, b] : wanted) {
        if (!g.has_undirected(a, b)) continue;
        if (wanted.count({b, a})) {
            warnings.push_back("conflicting orientations for " + vs.name(a) + " -- " + vs.name(b) +
                               "; left undirected");
            continue;
        }
        g.orient(a, b);
    }
}

std::size_t binomial(std::size_t n, std::size_t k) {
    if (k > n) return 0;
    std::size_t r = 1;
    for (std::size_t i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

}  // namespace

std::size_t pc_test_bound(std::size_t m, std::size_t delta) {
    std::size_t sum = 0;
    for (std::size_t i = 0; i <= delta; ++i) sum += binomial(m - (m > 0 ? 1 : 0), i);
    return 2 * binomial(m, 2) * sum;
}

DiscoveryResult pc(const CiTester& tester, const std::vector<std::string>& vars, std::size_t delta_max) {
    const VertexSet vs(vars);
    const std::size_t m = vs.size();
    CountingTester ci(tester, vs);
    DiscoveryResult res;
    res.tester_name = tester.name;

    std::vector<std::vector<bool>> adj(m, std::vector<bool>(m, true));
    for (std::size_t i = 0; i < m; ++i) adj[i][i] = false;

    for (std::size_t level = 0; level <= delta_max; ++level) {
        const std::size_t before = ci.count();
        bool any_candidate = false;
        for (std::size_t x = 0; x < m; ++x) {
            for (std::size_t y = 0; y < m; ++y) {
                if (!adj[x][y]) continue;
                std::vector<std::size_t> nbrs;
                for (std::size_t k = 0; k < m; ++k)
                    if (k != y && adj[x][k]) nbrs.push_back(k);
                if (nbrs.size() < level) continue;
                any_candidate = true;
                for_each_subset(nbrs, level, [&](const std::vector<std::size_t>& s) {
                    if (!ci.independent(x, y, s)) return false;
                    adj[x][y] = adj[y][x] = false;
                    res.sepsets.set(vs.name(x), vs.name(y), names_of(vs, s));
                    return true;
                });
            }
        }
        res.tests_per_level.push_back(ci.count() - before);
        if (!any_candidate) break;
    }

    Pdag g(vs);
    for (std::size_t a = 0; a < m; ++a)
        for (std::size_t b = a + 1; b < m; ++b)
            if (adj[a][b]) g.add_undirected(a, b);

    std::set<Edge> wanted;
    for (std::size_t c = 0; c < m; ++c) {
        for (std::size_t a = 0; a < m; ++a) {
            if (!adj[a][c]) continue;
            for (std::size_t b = a + 1; b < m; ++b) {
                if (!adj[b][c] || adj[a][b]) continue;
                const auto* sep = res.sepsets.find(vs.name(a), vs.name(b));
                if (sep && std::find(sep->begin(), sep->end(), vs.name(c)) != sep->end()) continue;
                wanted.insert({a, c});
                wanted.insert({b, c});
            }
        }
    }
    apply_orientations(g, wanted, res.warnings);
    res.graph = meek_closure(std::move(g));
    res.ci_test_count = ci.count();
    return res;
}

namespace {

std::vector<std::size_t> markov_boundary(CountingTester& ci, std::size_t m, std::size_t x) {
    std::vector<std::size_t> mb;
    auto contains = [&](std::size_t v) { return std::find(mb.begin(), mb.end(), v) != mb.end(); };

    bool added = true;
    while (added) {
        added = false;
        for (std::size_t y = 0; y < m; ++y) {
            if (y == x || contains(y)) continue;
            if (!ci.independent(x, y, mb)) {
                mb.push_back(y);
                added = true;
            }
        }
    }

    bool removed = true;
    while (removed) {
        removed = false;
        for (std::size_t i = 0; i < mb.size();) {
            std::vector<std::size_t> rest;
            for (std::size_t j = 0; j < mb.size(); ++j)
                if (j != i) rest.push_back(mb[j]);
            if (ci.independent(x, mb[i], rest)) {
                mb.erase(mb.begin() + static_cast<std::ptrdiff_t>(i));
                removed = true;
            } else {
                ++i;
            }
        }
    }
    std::sort(mb.begin(), mb.end());
    return mb;
}

std::vector<std::size_t> without(const std::vector<std::size_t>& s, std::initializer_list<std::size_t> drop) {
    std::vector<std::size_t> out;
    for (auto v : s)
        if (std::find(drop.begin(), drop.end(), v) == drop.end()) out.push_back(v);
    return out;
}

bool has(const std::vector<std::size_t>& s, std::size_t v) {
    return std::find(s.begin(), s.end(), v) != s.end();
}

}  // namespace

std::vector<std::string> gs_markov_boundary(const CiTester& tester, const std::vector<std::string>& vars,
                                            const std::string& x) {
    const VertexSet vs(vars);
    CountingTester ci(tester, vs);
    return names_of(vs, markov_boundary(ci, vs.size(), vs.index(x)));
}

DiscoveryResult gs(const CiTester& tester, const std::vector<std::string>& vars) {
    const VertexSet vs(vars);
    const std::size_t m = vs.size();
    CountingTester ci(tester, vs);
    DiscoveryResult res;
    res.tester_name = tester.name;

    // Steps 1-2: Markov boundaries.
    std::vector<std::vector<std::size_t>> mb(m);
    for (std::size_t x = 0; x < m; ++x) {
        mb[x] = markov_boundary(ci, m, x);
        res.markov_boundaries[vs.name(x)] = names_of(vs, mb[x]);
    }
    res.tests_per_level.push_back(ci.count());

    // Step 3: an edge for each mutual boundary pair not separated by any
    // subset of the smaller reduced boundary.
    Pdag g(vs);
    std::size_t mark = ci.count();
    for (std::size_t x = 0; x < m; ++x) {
        for (std::size_t y = x + 1; y < m; ++y) {
            const bool xy = has(mb[x], y), yx = has(mb[y], x);
            if (xy != yx)
                res.warnings.push_back("asymmetric Markov boundaries for " + vs.name(x) + ", " + vs.name(y) +
                                       "; pair dropped");
            if (!(xy && yx)) continue;
            const auto tx = without(mb[x], {y});
            const auto ty = without(mb[y], {x});
            const auto& t = ty.size() < tx.size() ? ty : tx;
            const bool separated = for_each_subset_any_size(t, [&](const std::vector<std::size_t>& s) {
                if (!ci.independent(x, y, s)) return false;
                res.sepsets.set(vs.name(x), vs.name(y), names_of(vs, s));
                return true;
            });
            if (!separated) g.add_undirected(x, y);
        }
    }
    res.tests_per_level.push_back(ci.count() - mark);

    // Step 4: orient y -> x when some z adjacent to x but not to y stays
    // dependent on y given x plus every subset of the smaller reduced boundary.
    mark = ci.count();
    std::vector<std::vector<std::size_t>> nbr(m);
    for (std::size_t v = 0; v < m; ++v) nbr[v] = g.neighbors(v);
    std::set<Edge> wanted;
    for (const auto& [a, b] : g.undirected()) {
        for (const auto& [x, y] : {Edge{a, b}, Edge{b, a}}) {
            for (auto z : nbr[x]) {
                if (z == y || has(nbr[y], z)) continue;
                const auto wy = without(mb[y], {x, z});
                const auto wz = without(mb[z], {x, y});
                const auto& w = wz.size() < wy.size() ? wz : wy;
                const bool separated = for_each_subset_any_size(w, [&](const std::vector<std::size_t>& s) {
                    auto cond = s;
                    cond.insert(std::upper_bound(cond.begin(), cond.end(), x), x);
                    return ci.independent(y, z, cond);
                });
                if (!separated) {
                    wanted.insert({y, x});
                    break;
                }
            }
        }
    }
    res.tests_per_level.push_back(ci.count() - mark);
    apply_orientations(g, wanted, res.warnings);
    res.graph = meek_closure(std::move(g));
    res.ci_test_count = ci.count();
    return res;
}

}  // namespace vmci
