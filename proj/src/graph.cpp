#include "vmci/graph.hpp"

#include <algorithm>
#include <array>
#include <optional>
#include <deque>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace vmci {

VertexSet::VertexSet(std::vector<std::string> names) : names_(std::move(names)) {
    for (std::size_t i = 0; i < names_.size(); ++i) {
        if (names_[i].empty()) throw std::invalid_argument("vertex names must be non-empty");
        if (!index_.emplace(names_[i], i).second)
            throw std::invalid_argument("duplicate vertex '" + names_[i] + "'");
    }
}

std::size_t VertexSet::index(const std::string& name) const {
    auto it = index_.find(name);
    if (it == index_.end()) throw std::invalid_argument("unknown vertex '" + name + "'");
    return it->second;
}

// ---------------------------------------------------------------------------
// Dag

namespace {

std::vector<Edge> resolve(const VertexSet& vs, const std::vector<std::pair<std::string, std::string>>& edges) {
    std::vector<Edge> out;
    out.reserve(edges.size());
    for (const auto& [a, b] : edges) out.emplace_back(vs.index(a), vs.index(b));
    return out;
}

}  // namespace

Dag::Dag(std::vector<std::string> vertices, const std::vector<std::pair<std::string, std::string>>& edges)
    : Dag(VertexSet(vertices), resolve(VertexSet(vertices), edges)) {}

Dag::Dag(VertexSet vertices, const std::vector<Edge>& edges)
    : vertices_(std::move(vertices)),
      adj_(vertices_.size(), std::vector<bool>(vertices_.size(), false)),
      parents_(vertices_.size()),
      children_(vertices_.size()) {
    const std::size_t n = vertices_.size();
    for (const auto& [a, b] : edges) {
        if (a >= n || b >= n) throw std::invalid_argument("edge endpoint out of range");
        if (a == b) throw std::invalid_argument("self-loop on '" + vertices_.name(a) + "'");
        if (adj_[b][a])
            throw std::invalid_argument("edges in both directions between '" + vertices_.name(a) +
                                        "' and '" + vertices_.name(b) + "'");
        if (adj_[a][b]) continue;
        adj_[a][b] = true;
        parents_[b].push_back(a);
        children_[a].push_back(b);
    }
    for (auto& p : parents_) std::sort(p.begin(), p.end());
    for (auto& c : children_) std::sort(c.begin(), c.end());

    // Kahn's algorithm
    std::vector<std::size_t> indeg(n);
    std::deque<std::size_t> ready;
    for (std::size_t v = 0; v < n; ++v)
        if ((indeg[v] = parents_[v].size()) == 0) ready.push_back(v);
    std::size_t seen = 0;
    while (!ready.empty()) {
        auto v = ready.front();
        ready.pop_front();
        ++seen;
        for (auto c : children_[v])
            if (--indeg[c] == 0) ready.push_back(c);
    }
    if (seen != n) throw std::invalid_argument("graph contains a directed cycle");
}

std::vector<Edge> Dag::edges() const {
    std::vector<Edge> out;
    for (std::size_t a = 0; a < size(); ++a)
        for (auto b : children_[a]) out.emplace_back(a, b);
    return out;
}

std::size_t Dag::max_degree() const {
    std::size_t best = 0;
    for (std::size_t v = 0; v < size(); ++v) best = std::max(best, parents_[v].size() + children_[v].size());
    return best;
}

// ---------------------------------------------------------------------------
// Pdag

Pdag::Pdag(VertexSet vertices) : vertices_(std::move(vertices)) {}

void Pdag::check_pair(std::size_t a, std::size_t b) const {
    if (a >= size() || b >= size()) throw std::invalid_argument("edge endpoint out of range");
    if (a == b) throw std::invalid_argument("self-loop on '" + vertices_.name(a) + "'");
    if (adjacent(a, b))
        throw std::invalid_argument("'" + vertices_.name(a) + "' and '" + vertices_.name(b) +
                                    "' are already adjacent");
}

void Pdag::add_directed(std::size_t from, std::size_t to) {
    check_pair(from, to);
    directed_.emplace(from, to);
}

void Pdag::add_undirected(std::size_t a, std::size_t b) {
    check_pair(a, b);
    undirected_.insert(key(a, b));
}

void Pdag::add_directed(const std::string& from, const std::string& to) {
    add_directed(vertices_.index(from), vertices_.index(to));
}

void Pdag::add_undirected(const std::string& a, const std::string& b) {
    add_undirected(vertices_.index(a), vertices_.index(b));
}

void Pdag::orient(std::size_t from, std::size_t to) {
    if (undirected_.erase(key(from, to)) == 0)
        throw std::invalid_argument("no undirected edge to orient");
    directed_.emplace(from, to);
}

void Pdag::remove_edge(std::size_t a, std::size_t b) {
    directed_.erase({a, b});
    directed_.erase({b, a});
    undirected_.erase(key(a, b));
}

std::vector<std::size_t> Pdag::neighbors(std::size_t v) const {
    std::vector<std::size_t> out;
    for (std::size_t u = 0; u < size(); ++u)
        if (u != v && adjacent(u, v)) out.push_back(u);
    return out;
}

// ---------------------------------------------------------------------------
// SepsetMap

namespace {

std::pair<std::string, std::string> pair_key(const std::string& a, const std::string& b) {
    return a < b ? std::pair{a, b} : std::pair{b, a};
}

}  // namespace

void SepsetMap::set(const std::string& a, const std::string& b, std::vector<std::string> z) {
    map_[pair_key(a, b)] = std::move(z);
}

const std::vector<std::string>* SepsetMap::find(const std::string& a, const std::string& b) const {
    auto it = map_.find(pair_key(a, b));
    return it == map_.end() ? nullptr : &it->second;
}

// ---------------------------------------------------------------------------
// d-separation

bool d_separated(const Dag& g, const std::string& x, const std::string& y,
                 const std::vector<std::string>& z) {
    const auto& vs = g.vertices();
    const std::size_t ix = vs.index(x);
    const std::size_t iy = vs.index(y);
    if (ix == iy) throw std::invalid_argument("d_separated: x and y must differ");
    const std::size_t n = g.size();
    std::vector<bool> in_z(n, false);
    for (const auto& name : z) in_z[vs.index(name)] = true;
    if (in_z[ix] || in_z[iy]) throw std::invalid_argument("d_separated: x or y is in the conditioning set");

    // Z together with its ancestors: a collider is open iff it lies here.
    std::vector<bool> anc(n, false);
    std::vector<std::size_t> stack;
    for (std::size_t v = 0; v < n; ++v)
        if (in_z[v]) stack.push_back(v);
    while (!stack.empty()) {
        auto v = stack.back();
        stack.pop_back();
        if (anc[v]) continue;
        anc[v] = true;
        for (auto p : g.parents(v)) stack.push_back(p);
    }

    // Traverse (vertex, direction) states. `up` means the trail arrived from a
    // child, `down` means it arrived from a parent.
    enum Dir { up = 0, down = 1 };
    std::vector<std::array<bool, 2>> visited(n, {false, false});
    std::vector<std::pair<std::size_t, Dir>> frontier{{ix, up}};
    while (!frontier.empty()) {
        auto [v, dir] = frontier.back();
        frontier.pop_back();
        if (visited[v][dir]) continue;
        visited[v][dir] = true;
        if (v == iy) return false;
        if (dir == up) {
            if (in_z[v]) continue;
            for (auto p : g.parents(v)) frontier.emplace_back(p, up);
            for (auto c : g.children(v)) frontier.emplace_back(c, down);
        } else {
            if (!in_z[v])
                for (auto c : g.children(v)) frontier.emplace_back(c, down);
            if (anc[v])
                for (auto p : g.parents(v)) frontier.emplace_back(p, up);
        }
    }
    return true;
}

CiTester oracle_ci(const Dag& g) {
    CiTester t;
    t.name = "oracle";
    t.test = [g](const std::string& x, const std::string& y, const std::vector<std::string>& z) {
        CiDecision d;
        d.independent = d_separated(g, x, y, z);
        d.statistic = d.independent ? 0.0 : 1.0;
        d.threshold = 0.5;
        d.n_used = 0;
        d.tester_name = "oracle";
        return d;
    };
    return t;
}

std::vector<VStructure> v_structures(const Dag& g) {
    std::vector<VStructure> out;
    const auto& vs = g.vertices();
    for (std::size_t c = 0; c < g.size(); ++c) {
        const auto& pa = g.parents(c);
        for (std::size_t i = 0; i < pa.size(); ++i)
            for (std::size_t j = i + 1; j < pa.size(); ++j)
                if (!g.adjacent(pa[i], pa[j])) out.push_back({vs.name(pa[i]), vs.name(c), vs.name(pa[j])});
    }
    std::sort(out.begin(), out.end());
    return out;
}

// ---------------------------------------------------------------------------
// Meek rules

namespace {

// Each rule asks whether the undirected edge i -- j should become i -> j.

bool meek_r1(const Pdag& p, std::size_t i, std::size_t j) {
    for (std::size_t k = 0; k < p.size(); ++k)
        if (p.has_directed(k, i) && k != j && !p.adjacent(k, j)) return true;
    return false;
}

bool meek_r2(const Pdag& p, std::size_t i, std::size_t j) {
    for (std::size_t k = 0; k < p.size(); ++k)
        if (p.has_directed(i, k) && p.has_directed(k, j)) return true;
    return false;
}

bool meek_r3(const Pdag& p, std::size_t i, std::size_t j) {
    std::vector<std::size_t> mids;
    for (std::size_t k = 0; k < p.size(); ++k)
        if (p.has_undirected(i, k) && p.has_directed(k, j)) mids.push_back(k);
    for (std::size_t a = 0; a < mids.size(); ++a)
        for (std::size_t b = a + 1; b < mids.size(); ++b)
            if (!p.adjacent(mids[a], mids[b])) return true;
    return false;
}

bool meek_r4(const Pdag& p, std::size_t i, std::size_t j) {
    for (std::size_t l = 0; l < p.size(); ++l) {
        if (!p.has_directed(l, j) || !p.adjacent(i, l)) continue;
        for (std::size_t k = 0; k < p.size(); ++k)
            if (k != j && p.has_undirected(i, k) && p.has_directed(k, l) && !p.adjacent(k, j)) return true;
    }
    return false;
}

}  // namespace

Pdag meek_closure(Pdag p) {
    using Rule = bool (*)(const Pdag&, std::size_t, std::size_t);
    constexpr Rule rules[] = {meek_r1, meek_r2, meek_r3, meek_r4};
    bool changed = true;
    while (changed) {
        changed = false;
        for (Rule rule : rules) {
            const std::vector<Edge> pending(p.undirected().begin(), p.undirected().end());
            for (const auto& [a, b] : pending) {
                if (!p.has_undirected(a, b)) continue;
                if (rule(p, a, b)) {
                    p.orient(a, b);
                    changed = true;
                } else if (rule(p, b, a)) {
                    p.orient(b, a);
                    changed = true;
                }
            }
        }
    }
    return p;
}

Pdag essential_graph(const Dag& g) {
    Pdag p(g.vertices());
    for (const auto& [a, b] : g.edges()) p.add_undirected(a, b);
    const auto& vs = g.vertices();
    for (const auto& v : v_structures(g)) {
        const auto a = vs.index(v.a), c = vs.index(v.collider), b = vs.index(v.b);
        if (p.has_undirected(a, c)) p.orient(a, c);
        if (p.has_undirected(b, c)) p.orient(b, c);
    }
    return meek_closure(std::move(p));
}

// ---------------------------------------------------------------------------
// Comparison

LossBreakdown structural_loss_breakdown(const Pdag& estimated, const Pdag& truth) {
    const auto& ev = estimated.vertices();
    const auto& tv = truth.vertices();
    if (ev.size() != tv.size()) throw std::invalid_argument("structural_loss: vertex sets differ");
    std::vector<std::size_t> to_est(tv.size());
    for (std::size_t i = 0; i < tv.size(); ++i) {
        if (!ev.contains(tv.name(i)))
            throw std::invalid_argument("structural_loss: vertex '" + tv.name(i) + "' missing from estimate");
        to_est[i] = ev.index(tv.name(i));
    }

    LossBreakdown loss;
    for (std::size_t a = 0; a < tv.size(); ++a) {
        for (std::size_t b = a + 1; b < tv.size(); ++b) {
            const auto ea = to_est[a], eb = to_est[b];
            const bool in_truth = truth.adjacent(a, b);
            const bool in_est = estimated.adjacent(ea, eb);
            if (in_truth && !in_est) {
                ++loss.missing;
            } else if (!in_truth && in_est) {
                ++loss.extra;
            } else if (in_truth && in_est) {
                const bool same = (truth.has_undirected(a, b) && estimated.has_undirected(ea, eb)) ||
                                  (truth.has_directed(a, b) && estimated.has_directed(ea, eb)) ||
                                  (truth.has_directed(b, a) && estimated.has_directed(eb, ea));
                if (!same) ++loss.misoriented;
            }
        }
    }
    return loss;
}

std::size_t structural_loss(const Pdag& estimated, const Pdag& truth) {
    return structural_loss_breakdown(estimated, truth).total();
}

Pdag to_pdag(const Dag& g) {
    Pdag p(g.vertices());
    for (const auto& [a, b] : g.edges()) p.add_directed(a, b);
    return p;
}

Dag to_dag(const Pdag& p) {
    if (!p.undirected().empty()) throw std::invalid_argument("graph has undirected edges; not a DAG");
    return Dag(p.vertices(), std::vector<Edge>(p.directed().begin(), p.directed().end()));
}

// ---------------------------------------------------------------------------
// Text format

void write_graph(std::ostream& out, const Pdag& p) {
    const auto& vs = p.vertices();
    out << "vars: ";
    for (std::size_t i = 0; i < vs.size(); ++i) out << (i ? "," : "") << vs.name(i);
    out << '\n';
    for (std::size_t a = 0; a < vs.size(); ++a) {
        for (std::size_t b = a + 1; b < vs.size(); ++b) {
            if (p.has_directed(a, b)) out << vs.name(a) << " -> " << vs.name(b) << '\n';
            else if (p.has_directed(b, a)) out << vs.name(b) << " -> " << vs.name(a) << '\n';
            else if (p.has_undirected(a, b)) out << vs.name(a) << " -- " << vs.name(b) << '\n';
        }
    }
}

std::string format_graph(const Pdag& p) {
    std::ostringstream ss;
    write_graph(ss, p);
    return ss.str();
}

namespace {

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

}  // namespace

Pdag read_graph(std::istream& in) {
    std::string line;
    std::optional<Pdag> g;
    std::size_t lineno = 0;
    auto fail = [&](const std::string& what) {
        throw std::invalid_argument("graph line " + std::to_string(lineno) + ": " + what);
    };
    while (std::getline(in, line)) {
        ++lineno;
        line = trim(line);
        if (line.empty() || line[0] == '#') continue;
        if (!g) {
            if (line.rfind("vars:", 0) != 0) fail("expected 'vars:' header");
            std::vector<std::string> names;
            std::istringstream ss(line.substr(5));
            std::string name;
            while (std::getline(ss, name, ',')) {
                name = trim(name);
                if (!name.empty()) names.push_back(name);
            }
            g.emplace(std::move(names));
            continue;
        }
        std::string op;
        std::size_t pos;
        if ((pos = line.find("->")) != std::string::npos) op = "->";
        else if ((pos = line.find("--")) != std::string::npos) op = "--";
        else fail("expected 'A -> B' or 'A -- B'");
        const auto a = trim(line.substr(0, pos));
        const auto b = trim(line.substr(pos + 2));
        try {
            if (op == "->") g->add_directed(a, b);
            else g->add_undirected(a, b);
        } catch (const std::invalid_argument& e) {
            fail(e.what());
        }
    }
    if (!g) throw std::runtime_error("graph text has no 'vars:' header");
    return *g;
}

Pdag parse_graph(const std::string& text) {
    std::istringstream ss(text);
    return read_graph(ss);
}

Pdag read_graph_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open '" + path + "'");
    return read_graph(f);
}

void write_graph_file(const std::string& path, const Pdag& p) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot open '" + path + "' for writing");
    write_graph(f, p);
    if (!f) throw std::runtime_error("write to '" + path + "' failed");
}

}  // namespace vmci
