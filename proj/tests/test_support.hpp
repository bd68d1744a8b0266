#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "vmci/graph.hpp"
#include "vmci/rng.hpp"

namespace vmci::testing {

inline std::vector<std::string> vertex_names(std::size_t m) {
    std::vector<std::string> names;
    for (std::size_t i = 0; i < m; ++i) names.push_back(std::string(1, static_cast<char>('A' + i)));
    return names;
}

/// Random DAG: a seeded topological order, each forward pair joined w.p. p.
inline Dag random_dag(std::size_t m, double p, std::uint64_t seed) {
    SplitMix64 rng(seed);
    const auto order = seeded_permutation(m, derive_key(seed, 1));
    std::vector<Edge> edges;
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = i + 1; j < m; ++j)
            if (rng.uniform() < p) edges.push_back({order[i], order[j]});
    return Dag(VertexSet(vertex_names(m)), edges);
}

/// Every DAG on m labelled vertices: each pair is absent, i->j or j->i.
inline std::vector<Dag> all_dags(std::size_t m) {
    std::vector<Edge> pairs;
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = i + 1; j < m; ++j) pairs.push_back({i, j});
    std::size_t total = 1;
    for (std::size_t k = 0; k < pairs.size(); ++k) total *= 3;
    std::vector<Dag> out;
    const VertexSet vs(vertex_names(m));
    for (std::size_t code = 0; code < total; ++code) {
        std::vector<Edge> edges;
        std::size_t c = code;
        for (const auto& [i, j] : pairs) {
            const auto mark = c % 3;
            c /= 3;
            if (mark == 1) edges.push_back({i, j});
            if (mark == 2) edges.push_back({j, i});
        }
        try {
            out.emplace_back(vs, edges);
        } catch (const std::invalid_argument&) {
        }
    }
    return out;
}

/// Literal d-separation: enumerate every simple path of the skeleton and
/// apply the blocking rules node by node.
inline bool brute_force_d_separated(const Dag& g, std::size_t x, std::size_t y, const std::vector<std::size_t>& z) {
    const std::size_t m = g.size();
    std::vector<bool> in_z(m, false);
    for (auto v : z) in_z[v] = true;

    // descendant-or-self closure
    std::vector<std::vector<bool>> desc(m, std::vector<bool>(m, false));
    for (std::size_t v = 0; v < m; ++v) {
        std::vector<std::size_t> stack{v};
        while (!stack.empty()) {
            auto u = stack.back();
            stack.pop_back();
            if (desc[v][u]) continue;
            desc[v][u] = true;
            for (auto c : g.children(u)) stack.push_back(c);
        }
    }
    auto collider_open = [&](std::size_t v) {
        for (std::size_t w = 0; w < m; ++w)
            if (in_z[w] && desc[v][w]) return true;
        return false;
    };

    std::vector<std::size_t> path{x};
    std::vector<bool> on_path(m, false);
    on_path[x] = true;
    std::function<bool(std::size_t)> active_path_from = [&](std::size_t u) -> bool {
        if (u == y) {
            for (std::size_t k = 1; k + 1 < path.size(); ++k) {
                const auto a = path[k - 1], v = path[k], b = path[k + 1];
                const bool collider = g.has_edge(a, v) && g.has_edge(b, v);
                if (collider ? !collider_open(v) : in_z[v]) return false;
            }
            return true;
        }
        for (std::size_t w = 0; w < m; ++w) {
            if (on_path[w] || !g.adjacent(u, w)) continue;
            on_path[w] = true;
            path.push_back(w);
            const bool found = active_path_from(w);
            path.pop_back();
            on_path[w] = false;
            if (found) return true;
        }
        return false;
    };
    return !active_path_from(x);
}

/// Parents, children and co-parents of x.
inline std::vector<std::string> graphical_markov_blanket(const Dag& g, std::size_t x) {
    std::vector<bool> in(g.size(), false);
    for (auto p : g.parents(x)) in[p] = true;
    for (auto c : g.children(x)) {
        in[c] = true;
        for (auto sp : g.parents(c)) in[sp] = true;
    }
    in[x] = false;
    std::vector<std::string> out;
    for (std::size_t v = 0; v < g.size(); ++v)
        if (in[v]) out.push_back(g.vertices().name(v));
    return out;
}

inline Dag fig_dag() {
    return Dag({"1", "2", "3", "4", "5", "6"},
               {{"1", "3"}, {"2", "3"}, {"1", "5"}, {"4", "5"}, {"4", "6"}, {"5", "6"}});
}

inline double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const auto mid = v.size() / 2;
    return v.size() % 2 ? v[mid] : 0.5 * (v[mid - 1] + v[mid]);
}

/// Asymptotic Kolmogorov distribution tail P(K > t).
inline double kolmogorov_tail(double t) {
    double s = 0.0;
    for (int k = 1; k <= 100; ++k) s += (k % 2 ? 2.0 : -2.0) * std::exp(-2.0 * k * k * t * t);
    return std::clamp(s, 0.0, 1.0);
}

/// One-sample KS p-value against a continuous CDF.
template <typename Cdf>
double ks_pvalue(std::vector<double> xs, Cdf cdf) {
    std::sort(xs.begin(), xs.end());
    const double n = static_cast<double>(xs.size());
    double d = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double f = cdf(xs[i]);
        d = std::max({d, (static_cast<double>(i) + 1) / n - f, f - static_cast<double>(i) / n});
    }
    const double sn = std::sqrt(n);
    return kolmogorov_tail((sn + 0.12 + 0.11 / sn) * d);
}

/// Two-sample KS p-value.
inline double ks2_pvalue(std::vector<double> a, std::vector<double> b) {
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
    while (i < a.size() && j < b.size()) {
        const double v = std::min(a[i], b[j]);
        while (i < a.size() && a[i] == v) ++i;
        while (j < b.size() && b[j] == v) ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    const double ne = std::sqrt(na * nb / (na + nb));
    return kolmogorov_tail((ne + 0.12 + 0.11 / ne) * d);
}

}  // namespace vmci::testing
