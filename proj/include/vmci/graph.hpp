#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <set>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "vmci/ci_tester.hpp"

namespace vmci {

using Edge = std::pair<std::size_t, std::size_t>;

/// Ordered list of distinct vertex names with name -> index lookup.
class VertexSet {
public:
    VertexSet() = default;
    explicit VertexSet(std::vector<std::string> names);

    std::size_t size() const { return names_.size(); }
    const std::vector<std::string>& names() const { return names_; }
    const std::string& name(std::size_t i) const { return names_.at(i); }
    /// Throws std::invalid_argument for an unknown vertex.
    std::size_t index(const std::string& name) const;
    bool contains(const std::string& name) const { return index_.count(name) != 0; }

    friend bool operator==(const VertexSet& a, const VertexSet& b) { return a.names_ == b.names_; }

private:
    std::vector<std::string> names_;
    std::unordered_map<std::string, std::size_t> index_;
};

/// Directed acyclic graph; self-loops and cycles are rejected at construction.
class Dag {
public:
    Dag(std::vector<std::string> vertices, const std::vector<std::pair<std::string, std::string>>& edges);
    Dag(VertexSet vertices, const std::vector<Edge>& edges);

    const VertexSet& vertices() const { return vertices_; }
    std::size_t size() const { return vertices_.size(); }
    bool has_edge(std::size_t from, std::size_t to) const { return adj_[from][to]; }
    bool adjacent(std::size_t a, std::size_t b) const { return adj_[a][b] || adj_[b][a]; }
    const std::vector<std::size_t>& parents(std::size_t v) const { return parents_[v]; }
    const std::vector<std::size_t>& children(std::size_t v) const { return children_[v]; }
    /// Edges sorted by (parent, child) index.
    std::vector<Edge> edges() const;
    std::size_t max_degree() const;

private:
    VertexSet vertices_;
    std::vector<std::vector<bool>> adj_;
    std::vector<std::vector<std::size_t>> parents_;
    std::vector<std::vector<std::size_t>> children_;
};

/// Partially directed graph: every adjacent pair is either directed or undirected.
class Pdag {
public:
    Pdag() = default;
    explicit Pdag(VertexSet vertices);
    explicit Pdag(std::vector<std::string> vertices) : Pdag(VertexSet(std::move(vertices))) {}

    const VertexSet& vertices() const { return vertices_; }
    std::size_t size() const { return vertices_.size(); }

    /// Both throw std::invalid_argument for self-loops or an already adjacent pair.
    void add_directed(std::size_t from, std::size_t to);
    void add_undirected(std::size_t a, std::size_t b);
    void add_directed(const std::string& from, const std::string& to);
    void add_undirected(const std::string& a, const std::string& b);
    /// Turns the undirected edge a -- b into a -> b; throws if a -- b is absent.
    void orient(std::size_t from, std::size_t to);
    void remove_edge(std::size_t a, std::size_t b);

    bool has_directed(std::size_t from, std::size_t to) const { return directed_.count({from, to}) != 0; }
    bool has_undirected(std::size_t a, std::size_t b) const { return undirected_.count(key(a, b)) != 0; }
    bool adjacent(std::size_t a, std::size_t b) const {
        return has_directed(a, b) || has_directed(b, a) || has_undirected(a, b);
    }
    std::vector<std::size_t> neighbors(std::size_t v) const;

    const std::set<Edge>& directed() const { return directed_; }
    /// Undirected edges keyed (min, max).
    const std::set<Edge>& undirected() const { return undirected_; }
    std::size_t edge_count() const { return directed_.size() + undirected_.size(); }

    friend bool operator==(const Pdag&, const Pdag&) = default;

private:
    static Edge key(std::size_t a, std::size_t b) { return a < b ? Edge{a, b} : Edge{b, a}; }
    void check_pair(std::size_t a, std::size_t b) const;

    VertexSet vertices_;
    std::set<Edge> directed_;
    std::set<Edge> undirected_;
};

/// Separating sets found during skeleton search, keyed by unordered pair.
class SepsetMap {
public:
    void set(const std::string& a, const std::string& b, std::vector<std::string> z);
    /// nullptr when the pair was never separated.
    const std::vector<std::string>* find(const std::string& a, const std::string& b) const;
    std::size_t size() const { return map_.size(); }
    const std::map<std::pair<std::string, std::string>, std::vector<std::string>>& entries() const {
        return map_;
    }

    friend bool operator==(const SepsetMap&, const SepsetMap&) = default;

private:
    std::map<std::pair<std::string, std::string>, std::vector<std::string>> map_;
};

/// Reachability ("Bayes ball") d-separation test.
/// Throws std::invalid_argument for unknown vertices, x == y, or x or y in z.
bool d_separated(const Dag& g, const std::string& x, const std::string& y,
                 const std::vector<std::string>& z);

/// Perfect CI tester answering d_separated(g, x, y, z).
CiTester oracle_ci(const Dag& g);

struct VStructure {
    std::string a;
    std::string collider;
    std::string b;

    friend auto operator<=>(const VStructure&, const VStructure&) = default;
};

/// Colliders a -> c <- b with a, b non-adjacent; a precedes b in vertex order.
std::vector<VStructure> v_structures(const Dag& g);

/// Applies Meek rules R1-R4 round-robin until no undirected edge changes.
/// Only orients; never adds or removes adjacencies.
Pdag meek_closure(Pdag p);

/// Skeleton plus v-structures, closed under the Meek rules (the CPDAG).
Pdag essential_graph(const Dag& g);

struct LossBreakdown {
    std::size_t missing = 0;
    std::size_t extra = 0;
    std::size_t misoriented = 0;
    std::size_t total() const { return missing + extra + misoriented; }
};

/// Missing, extra and misoriented edges of `estimated` relative to `truth`.
/// Vertices are matched by name; throws std::invalid_argument if the sets differ.
LossBreakdown structural_loss_breakdown(const Pdag& estimated, const Pdag& truth);
std::size_t structural_loss(const Pdag& estimated, const Pdag& truth);

Pdag to_pdag(const Dag& g);
/// Throws std::invalid_argument if `p` has undirected edges or a cycle.
Dag to_dag(const Pdag& p);

// Text format:
//   vars: A,B,C
//   A -> B
//   B -- C
// Blank lines and lines starting with '#' are ignored.
void write_graph(std::ostream& out, const Pdag& p);
std::string format_graph(const Pdag& p);
Pdag read_graph(std::istream& in);
Pdag parse_graph(const std::string& text);
Pdag read_graph_file(const std::string& path);
void write_graph_file(const std::string& path, const Pdag& p);

}  // namespace vmci
