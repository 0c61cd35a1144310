#pragma once

// Monte-Carlo engine for Bernoulli bond percolation on finite graphs, in
// particular on truncated boxes (tree ball of radius R) x [-M, M] of T_d x Z.
//
// Edge states are never stored. Configuration k of base seed s opens edge e iff
// u(s, k, e) < p, where u is a counter-based uniform deviate keyed by the
// edge's canonical identity. All p share one deviate per edge, so clusters grow
// monotonically in p (grand coupling), and nested boxes see identical states on
// their common edges.
//
// Every two-point estimate on a box is a lower bound for the infinite-volume
// value: removing edges outside the box can only disconnect pairs.

#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include "perclab/graph_core.hpp"
#include "perclab/rng.hpp"
#include "perclab/stats.hpp"

namespace perclab::mc {

using graph::BallSpec;
using graph::Vertex;

enum class EdgeKind : std::uint8_t { tree = 0, line = 1 };

// Canonical unordered pair of adjacent vertices, stored by its lower endpoint:
// the child end of a tree edge, or the smaller line coordinate of a line edge.
struct EdgeId {
    Vertex lower;
    EdgeKind kind = EdgeKind::tree;

    static EdgeId between(const Vertex& a, const Vertex& b);
    std::uint64_t key() const;

    friend bool operator==(const EdgeId&, const EdgeId&) = default;
};

// Key of an edge from its lower endpoint. Split into a per-(tree vertex, kind)
// base and a per-line offset so that box code can form it without tables.
std::uint64_t edge_key_base(std::uint64_t lower_address_key, EdgeKind kind);
std::uint64_t edge_key_line_offset(std::int64_t line);
inline std::uint64_t edge_key(std::uint64_t lower_address_key, std::int64_t line, EdgeKind kind) {
    return edge_key_base(lower_address_key, kind) + edge_key_line_offset(line);
}

class ConfigSampler {
public:
    ConfigSampler(std::uint64_t base_seed, std::uint64_t config_index, double p);

    double deviate(std::uint64_t edge_key) const { return rng_.uniform(edge_key); }
    bool is_open(std::uint64_t edge_key) const { return rng_.uniform(edge_key) < p_; }
    bool is_open(const EdgeId& e) const { return is_open(e.key()); }

    std::uint64_t base_seed() const { return base_seed_; }
    std::uint64_t config_index() const { return config_index_; }
    double p() const { return p_; }
    const CounterRng& rng() const { return rng_; }

private:
    std::uint64_t base_seed_;
    std::uint64_t config_index_;
    double p_;
    CounterRng rng_;
};

// Immutable finite graph in compressed adjacency form. Each edge carries the
// key from which its random state is derived.
class FiniteGraph {
public:
    struct Edge {
        std::uint32_t a;
        std::uint32_t b;
    };

    FiniteGraph() = default;
    FiniteGraph(std::uint32_t vertex_count, std::vector<Edge> edges, std::vector<std::uint64_t> keys);

    std::uint32_t vertex_count() const { return vertex_count_; }
    std::size_t edge_count() const { return edges_.size(); }
    std::span<const Edge> edges() const { return edges_; }
    std::span<const std::uint64_t> edge_keys() const { return keys_; }

    struct Incidence {
        std::uint32_t vertex;
        std::uint32_t edge;
    };
    std::span<const Incidence> incident(std::uint32_t v) const {
        return {incidence_.data() + offsets_[v], incidence_.data() + offsets_[v + 1]};
    }

private:
    std::uint32_t vertex_count_ = 0;
    std::vector<Edge> edges_;
    std::vector<std::uint64_t> keys_;
    std::vector<std::uint32_t> offsets_;
    std::vector<Incidence> incidence_;
};

// Reusable scratch space for explorations of a FiniteGraph.
class Explorer {
public:
    explicit Explorer(std::uint32_t vertex_count);

    // Breadth-first search over open edges; each edge is sampled at most once
    // (an edge is only examined while its far end is unvisited). Returns the
    // cluster in visit order.
    std::span<const std::uint32_t> explore(const FiniteGraph& g, const ConfigSampler& sampler, std::uint32_t start);
    bool reached(std::uint32_t v) const { return stamp_[v] == generation_; }

    // Minimax connection thresholds from `start`: v lies in the cluster of
    // start at p iff threshold(v) < p. Only edges with deviate < cap are used,
    // so vertices outside the cluster at `cap` stay unreached. The start vertex
    // gets -1.
    std::span<const std::uint32_t> thresholds(const FiniteGraph& g, const CounterRng& rng, std::uint32_t start,
                                              double cap);
    double threshold(std::uint32_t v) const { return value_[v]; }

private:
    std::uint32_t generation_ = 0;
    std::vector<std::uint32_t> stamp_;
    std::vector<double> value_;
    std::vector<std::uint32_t> order_;
    void next_generation();
};

// The truncated box. Index of (tree node t, line m) is t * (2M + 1) + (m + M).
// Adjacency is arithmetic (tree-node table plus line offsets), and edge keys
// are formed on the fly; `graph()` gives the same box as a FiniteGraph with
// identical keys.
class BoxGraph {
public:
    static constexpr std::uint32_t kNone = std::numeric_limits<std::uint32_t>::max();

    explicit BoxGraph(const BallSpec& spec);

    const BallSpec& spec() const { return spec_; }
    const FiniteGraph& graph() const { return graph_; }
    std::span<const graph::TreeAddress> tree_nodes() const { return tree_nodes_; }
    std::uint32_t vertex_count() const { return graph_.vertex_count(); }
    std::uint32_t layers() const { return layers_; }

    std::uint32_t index_of(const Vertex& v) const;
    std::optional<std::uint32_t> find(const Vertex& v) const;
    Vertex vertex_at(std::uint32_t index) const;
    std::uint32_t origin_index() const { return index(0, 0); }
    std::uint32_t index(std::uint32_t tree_node, std::int64_t line) const {
        return tree_node * layers_ + static_cast<std::uint32_t>(line + spec_.line_half_width);
    }
    std::uint32_t tree_node_of(std::uint32_t index) const {
        return static_cast<std::uint32_t>((index * layer_inverse_) >> 64);
    }
    std::int64_t line_of(std::uint32_t index) const {
        return static_cast<std::int64_t>(index - tree_node_of(index) * layers_) - spec_.line_half_width;
    }
    // Tree node of the representative v_n = (up 0, down 0^n).
    std::uint32_t axis_node(int n) const { return axis_nodes_.at(static_cast<std::size_t>(n)); }
    int depth_of_node(std::uint32_t tree_node) const { return static_cast<int>(tree_nodes_[tree_node].depth()); }
    bool contains(const Vertex& v) const { return find(v).has_value(); }

    // Tree neighbours of a node: slot 0 is the parent, slots 1..d-1 the
    // children; kNone when outside the ball.
    const std::uint32_t* tree_adjacency(std::uint32_t tree_node) const {
        return tree_adj_.data() + static_cast<std::size_t>(tree_node) * static_cast<std::size_t>(spec_.d);
    }
    // Edge from (node, layer) to its tree parent, and from (node, layer) to (node, layer + 1).
    std::uint64_t tree_edge_key(std::uint32_t node, std::uint32_t layer) const {
        return tree_base_[node] + line_offset_[layer];
    }
    std::uint64_t line_edge_key(std::uint32_t node, std::uint32_t layer) const {
        return line_base_[node] + line_offset_[layer];
    }

    // Calls fn(w, key, exists) for all d + 2 neighbour slots of v. Missing
    // neighbours are reported with w = v and exists = false, which lets callers
    // stay branch-free.
    template <class Fn>
    void for_each_slot(std::uint32_t v, Fn&& fn) const {
        const std::uint32_t t = tree_node_of(v);
        const std::uint32_t layer = v - t * layers_;
        const std::uint32_t* adj = tree_adjacency(t);
        const std::uint32_t parent = adj[0];
        const bool has_parent = parent != kNone;
        fn(has_parent ? parent * layers_ + layer : v, tree_edge_key(t, layer), has_parent);
        for (int j = 1; j < spec_.d; ++j) {
            const std::uint32_t c = adj[j];
            const bool has_child = c != kNone;
            fn(has_child ? c * layers_ + layer : v, tree_edge_key(has_child ? c : t, layer), has_child);
        }
        const bool up = layer + 1 < layers_;
        fn(up ? v + 1 : v, line_edge_key(t, layer), up);
        const bool down = layer > 0;
        fn(down ? v - 1 : v, line_edge_key(t, down ? layer - 1 : 0), down);
    }

    // Calls fn(a, b, key) once per edge of the box.
    template <class Fn>
    void for_each_edge(Fn&& fn) const {
        const auto T = static_cast<std::uint32_t>(tree_nodes_.size());
        for (std::uint32_t t = 0; t < T; ++t) {
            const std::uint32_t parent = tree_adjacency(t)[0];
            for (std::uint32_t layer = 0; layer < layers_; ++layer) {
                const std::uint32_t v = t * layers_ + layer;
                if (parent != kNone) fn(v, parent * layers_ + layer, tree_edge_key(t, layer));
                if (layer + 1 < layers_) fn(v, v + 1, line_edge_key(t, layer));
            }
        }
    }

private:
    BallSpec spec_;
    std::uint32_t layers_ = 1;
    unsigned __int128 layer_inverse_ = 0;  // ceil(2^64 / layers), exact for 32-bit indices
    std::vector<graph::TreeAddress> tree_nodes_;
    std::unordered_map<std::uint64_t, std::uint32_t> node_by_key_;
    std::vector<std::uint32_t> axis_nodes_;
    std::vector<std::uint32_t> tree_adj_;
    std::vector<std::uint64_t> tree_base_;
    std::vector<std::uint64_t> line_base_;
    std::vector<std::uint64_t> line_offset_;
    FiniteGraph graph_;
};

// Scratch space for explorations of a box, specialised for speed.
class BoxExplorer {
public:
    explicit BoxExplorer(const BoxGraph& box);

    // Minimax exploration from `start` restricted to an increasing grid of p
    // values (at most 250): afterwards grade(v) is the smallest i with v in the
    // cluster of start at grid[i], and grade(v) == grid.size() when v is not
    // reached even at grid.back(). Bucketed by grade, so the cost is about one
    // breadth-first search at the largest p. Returns reached vertices in
    // settling order. A one-point grid is a plain breadth-first search.
    std::span<const std::uint32_t> graded(const CounterRng& rng, std::uint32_t start, std::span<const double> grid);
    std::span<const std::uint32_t> explore(const ConfigSampler& sampler, std::uint32_t start);
    std::uint32_t grade(std::uint32_t v) const { return grade_[v]; }
    bool reached(std::uint32_t v) const { return grade_[v] < levels_; }

    // Continuous minimax thresholds, as Explorer::thresholds.
    std::span<const std::uint32_t> thresholds(const CounterRng& rng, std::uint32_t start, double cap);
    double threshold(std::uint32_t v) const { return value_[v]; }
    bool threshold_reached(std::uint32_t v) const { return stamp_[v] == generation_; }

private:
    const BoxGraph* box_;
    std::uint32_t levels_ = 0;
    std::vector<std::uint8_t> grade_;
    std::vector<std::uint32_t> queue_;
    std::vector<std::uint64_t> deferred_;
    std::vector<std::vector<std::uint32_t>> buckets_;
    std::vector<std::uint32_t> order_;
    std::uint32_t generation_ = 0;
    std::vector<std::uint32_t> stamp_;
    std::vector<double> value_;
};

std::vector<Vertex> explore_cluster(const ConfigSampler& sampler, const BallSpec& spec, const Vertex& start);
std::vector<std::uint32_t> explore_cluster(const ConfigSampler& sampler, const FiniteGraph& g, std::uint32_t start);

// Component labels over all open edges; the label of a vertex is the smallest
// vertex index in its component.
std::vector<std::uint32_t> full_labeling(const ConfigSampler& sampler, const FiniteGraph& g);
std::vector<std::uint32_t> full_labeling(const ConfigSampler& sampler, const BoxGraph& box);
std::vector<std::uint32_t> full_labeling(const ConfigSampler& sampler, const BallSpec& spec);

struct RunOptions {
    std::uint64_t samples = 1;
    std::uint64_t base_seed = 0;
    unsigned threads = 1;
};

// Estimated tau(o, (n, m)) for 0 <= n <= R, 0 <= m <= M from a single
// exploration of o per configuration. The representatives of key (n, m) are
// v_n at line +m and -m (one vertex when m = 0); hits counts successes over
// representatives. Intervals are Wilson at 99% over `samples` configurations,
// exact for m = 0 and conservative for m > 0.
class TwoPointTable {
public:
    TwoPointTable() = default;
    TwoPointTable(BallSpec spec, double p, std::uint64_t samples, std::uint64_t base_seed);

    const BallSpec& spec() const { return spec_; }
    double p() const { return p_; }
    std::uint64_t samples() const { return samples_; }
    std::uint64_t base_seed() const { return base_seed_; }
    int max_n() const { return spec_.tree_radius; }
    int max_m() const { return spec_.line_half_width; }

    static int representatives(int m) { return m == 0 ? 1 : 2; }
    std::uint64_t hits(int n, int m) const { return hits_[slot(n, m)]; }
    std::uint64_t& hits(int n, int m) { return hits_[slot(n, m)]; }

    double tau(int n, int m) const;
    double stderr(int n, int m) const;
    Interval ci(int n, int m) const;
    EstimateWithCI estimate(int n, int m) const;

    // Per-configuration connection bits for the axis representatives:
    // bit n of tree_axis[k] is set when (v_n, 0) was reached in configuration k;
    // line_pos / line_neg hold bit m for (o, +m) and (o, -m). Present when
    // R, M <= 63.
    bool has_axis_samples() const { return !tree_axis_.empty(); }
    std::span<const std::uint64_t> tree_axis() const { return tree_axis_; }
    std::span<const std::uint64_t> line_pos() const { return line_pos_; }
    std::span<const std::uint64_t> line_neg() const { return line_neg_; }
    void set_axis_samples(std::vector<std::uint64_t> tree, std::vector<std::uint64_t> pos, std::vector<std::uint64_t> neg);

    friend bool operator==(const TwoPointTable&, const TwoPointTable&) = default;

private:
    std::size_t slot(int n, int m) const;

    BallSpec spec_;
    double p_ = 0.0;
    std::uint64_t samples_ = 0;
    std::uint64_t base_seed_ = 0;
    std::vector<std::uint64_t> hits_;
    std::vector<std::uint64_t> tree_axis_;
    std::vector<std::uint64_t> line_pos_;
    std::vector<std::uint64_t> line_neg_;
};

bool axis_samples_supported(const BallSpec& spec);

TwoPointTable estimate_two_point(double p, const BallSpec& spec, const RunOptions& run);
TwoPointTable estimate_two_point(double p, const BoxGraph& box, const RunOptions& run);

// Tables for every p in `ps` from the same configurations, via one graded
// exploration per configuration. Identical to calling estimate_two_point for
// each p separately.
std::vector<TwoPointTable> estimate_two_point_grid(std::span<const double> ps, const BoxGraph& box,
                                                   const RunOptions& run);

// Per-vertex connection counts to `origin` over run.samples configurations of
// a generic graph (configuration k uses config index k).
std::vector<std::uint64_t> two_point_hits(double p, const FiniteGraph& g, std::uint32_t origin, const RunOptions& run);

struct TriangleSamples {
    EstimateWithCI estimate;
    std::vector<double> values;  // one per sample, in config order
};

// Unbiased estimator of the box triangle diagram
//   sum over x, y in the sum domain of tau(o,x) tau(x,y) tau(y,o),
// all connections taken inside the sampling box. Sample k uses configurations
// 3k, 3k+1, 3k+2: clusters C1, C3 of o in the outer two and a full labeling of
// the middle one, scoring sum over middle labels of |C1 cap L| * |C3 cap L|.
// The sum domain defaults to the whole box.
TriangleSamples triangle_mc(double p, const BallSpec& spec, const RunOptions& run,
                            std::optional<BallSpec> sum_domain = std::nullopt);
TriangleSamples triangle_mc(double p, const BoxGraph& box, const RunOptions& run,
                            std::optional<BallSpec> sum_domain = std::nullopt);
TriangleSamples triangle_mc(double p, const FiniteGraph& g, std::uint32_t origin, const RunOptions& run,
                            std::span<const std::uint8_t> in_domain = {});

}  // namespace perclab::mc
