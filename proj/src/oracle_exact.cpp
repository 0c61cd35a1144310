#include "perclab/oracle_exact.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <istream>
#include <queue>
#include <set>
#include <sstream>

#include "perclab/rng.hpp"
#include "perclab/union_find.hpp"

namespace perclab::oracle {

void validate(const TinyGraph& g) {
    if (g.vertices == 0 || g.vertices > kMaxVertices) {
        throw SizeError("tiny graph needs 1 to " + std::to_string(kMaxVertices) + " vertices");
    }
    if (g.edges.size() > kMaxEdges) throw SizeError("tiny graph has more than " + std::to_string(kMaxEdges) + " edges");
    if (g.origin >= g.vertices) throw std::invalid_argument("origin out of range");
    if (!g.keys.empty() && g.keys.size() != g.edges.size()) throw std::invalid_argument("one key per edge required");
    std::set<std::pair<std::uint32_t, std::uint32_t>> seen;
    UnionFind uf(g.vertices);
    for (auto [u, v] : g.edges) {
        if (u >= g.vertices || v >= g.vertices) throw std::invalid_argument("edge endpoint out of range");
        if (u == v) throw std::invalid_argument("self-loop");
        if (!seen.insert(std::minmax(u, v)).second) throw std::invalid_argument("duplicate edge");
        uf.unite(u, v);
    }
    if (uf.component_size(g.origin) != g.vertices) throw std::invalid_argument("tiny graph is not connected");
}

TinyGraph parse_tiny_graph(std::istream& in) {
    std::vector<std::string> lines;
    for (std::string line; std::getline(in, line);) {
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        lines.push_back(line);
    }
    if (lines.empty()) throw std::invalid_argument("empty graph file");
    TinyGraph g;
    std::size_t E = 0;
    {
        std::istringstream head(lines[0]);
        if (!(head >> g.vertices >> E >> g.origin)) throw std::invalid_argument("header must be \"V E origin\"");
    }
    if (lines.size() != E + 1) throw std::invalid_argument("edge count does not match header");
    if (E > kMaxEdges) throw SizeError("tiny graph has more than " + std::to_string(kMaxEdges) + " edges");
    for (std::size_t i = 1; i <= E; ++i) {
        std::istringstream row(lines[i]);
        std::uint32_t u = 0, v = 0;
        std::string extra;
        if (!(row >> u >> v) || (row >> extra)) throw std::invalid_argument("edge line must be \"u v\"");
        g.edges.emplace_back(u, v);
    }
    validate(g);
    return g;
}

TinyGraph read_tiny_graph(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    return parse_tiny_graph(in);
}

std::string format_tiny_graph(const TinyGraph& g) {
    std::ostringstream out;
    out << g.vertices << ' ' << g.edges.size() << ' ' << g.origin << '\n';
    for (auto [u, v] : g.edges) out << u << ' ' << v << '\n';
    return out.str();
}

ConnectionPolynomials::ConnectionPolynomials(const TinyGraph& g)
    : vertices_(g.vertices), edges_(static_cast<std::uint32_t>(g.edges.size())) {
    validate(g);
    const auto V = vertices_;
    const auto E = edges_;
    counts_.assign(static_cast<std::size_t>(V) * V, std::vector<std::uint64_t>(E + 1, 0));
    std::vector<std::uint32_t> comp(V);
    UnionFind uf(V);
    for (std::uint32_t mask = 0; mask < (1u << E); ++mask) {
        uf.reset();
        for (std::uint32_t i = 0; i < E; ++i) {
            if ((mask >> i) & 1u) uf.unite(g.edges[i].first, g.edges[i].second);
        }
        const auto k = static_cast<std::uint32_t>(std::popcount(mask));
        for (std::uint32_t x = 0; x < V; ++x) comp[x] = uf.find(x);
        for (std::uint32_t x = 0; x < V; ++x) {
            for (std::uint32_t y = x; y < V; ++y) {
                if (comp[x] == comp[y]) ++counts_[x * V + y][k];
            }
        }
    }
    for (std::uint32_t x = 0; x < V; ++x) {
        for (std::uint32_t y = 0; y < x; ++y) counts_[x * V + y] = counts_[y * V + x];
    }
}

const std::vector<std::uint64_t>& ConnectionPolynomials::counts(std::uint32_t x, std::uint32_t y) const {
    if (x >= vertices_ || y >= vertices_) throw std::out_of_range("vertex out of range");
    return counts_[x * vertices_ + y];
}

double ConnectionPolynomials::evaluate(std::uint32_t x, std::uint32_t y, double p) const {
    if (!(p >= 0.0 && p <= 1.0)) throw std::domain_error("probability must lie in [0, 1]");
    const auto& c = counts(x, y);
    double sum = 0.0;
    for (std::uint32_t k = 0; k <= edges_; ++k) {
        if (c[k] == 0) continue;
        sum += static_cast<double>(c[k]) * std::pow(p, k) * std::pow(1.0 - p, edges_ - k);
    }
    return sum;
}

graph::Rational ConnectionPolynomials::evaluate_exact(std::uint32_t x, std::uint32_t y,
                                                      const graph::Rational& p) const {
    const auto& c = counts(x, y);
    const graph::Rational q = 1 - p;
    graph::Rational sum = 0;
    for (std::uint32_t k = 0; k <= edges_; ++k) {
        if (c[k] == 0) continue;
        graph::Rational term = c[k];
        for (std::uint32_t i = 0; i < k; ++i) term *= p;
        for (std::uint32_t i = k; i < edges_; ++i) term *= q;
        sum += term;
    }
    return sum;
}

double exact_two_point(const TinyGraph& g, double p, std::uint32_t target) {
    if (target >= g.vertices) throw std::out_of_range("target out of range");
    return ConnectionPolynomials(g).evaluate(g.origin, target, p);
}

double exact_triangle(const TinyGraph& g, double p) {
    const ConnectionPolynomials poly(g);
    const auto V = g.vertices;
    std::vector<double> tau(static_cast<std::size_t>(V) * V);
    for (std::uint32_t x = 0; x < V; ++x) {
        for (std::uint32_t y = 0; y < V; ++y) tau[x * V + y] = poly.evaluate(x, y, p);
    }
    const auto o = g.origin;
    double sum = 0.0;
    for (std::uint32_t x = 0; x < V; ++x) {
        for (std::uint32_t y = 0; y < V; ++y) sum += tau[o * V + x] * tau[x * V + y] * tau[y * V + o];
    }
    return sum;
}

TinyGraph embed_ball(const graph::BallSpec& spec) {
    graph::validate(spec);
    if (graph::ball_vertex_count(spec) > kMaxVertices || graph::ball_edge_count(spec) > kMaxEdges) {
        throw SizeError("box too large for the exhaustive oracle");
    }
    const mc::BoxGraph box(spec);
    TinyGraph g;
    g.vertices = box.vertex_count();
    g.origin = box.origin_index();
    const auto edges = box.graph().edges();
    const auto keys = box.graph().edge_keys();
    for (std::size_t i = 0; i < edges.size(); ++i) {
        g.edges.emplace_back(edges[i].a, edges[i].b);
        g.keys.push_back(keys[i]);
    }
    validate(g);
    return g;
}

mc::FiniteGraph to_finite_graph(const TinyGraph& g) {
    validate(g);
    std::vector<mc::FiniteGraph::Edge> edges;
    std::vector<std::uint64_t> keys;
    for (std::size_t i = 0; i < g.edges.size(); ++i) {
        const auto [u, v] = std::minmax(g.edges[i].first, g.edges[i].second);
        edges.push_back({u, v});
        keys.push_back(g.keys.empty() ? hash_combine(u, v) : g.keys[i]);
    }
    return mc::FiniteGraph(g.vertices, std::move(edges), std::move(keys));
}

std::uint32_t designated_target(const TinyGraph& g) {
    validate(g);
    std::vector<std::vector<std::uint32_t>> adj(g.vertices);
    for (auto [u, v] : g.edges) {
        adj[u].push_back(v);
        adj[v].push_back(u);
    }
    std::vector<int> dist(g.vertices, -1);
    std::queue<std::uint32_t> q;
    dist[g.origin] = 0;
    q.push(g.origin);
    while (!q.empty()) {
        const auto v = q.front();
        q.pop();
        for (auto w : adj[v]) {
            if (dist[w] < 0) {
                dist[w] = dist[v] + 1;
                q.push(w);
            }
        }
    }
    std::uint32_t best = g.origin;
    for (std::uint32_t v = 0; v < g.vertices; ++v) {
        if (dist[v] >= dist[best]) best = v;
    }
    return best;
}

}  // namespace perclab::oracle
