#include "perclab/perc_mc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <stdexcept>

#include "perclab/parallel.hpp"
#include "perclab/union_find.hpp"

namespace perclab::mc {

namespace {

constexpr double kUnreached = std::numeric_limits<double>::infinity();

std::uint64_t zigzag(std::int64_t v) {
    return (static_cast<std::uint64_t>(v) << 1) ^ static_cast<std::uint64_t>(v >> 63);
}

// Representative targets of each orbit key in a box: (slot, vertex index).
struct Target {
    std::size_t slot;
    std::uint32_t vertex;
    int n;
    int m;  // signed line offset
};

std::vector<Target> box_targets(const BoxGraph& box) {
    const auto& s = box.spec();
    std::vector<Target> out;
    std::size_t slot = 0;
    for (int n = 0; n <= s.tree_radius; ++n) {
        const auto node = box.axis_node(n);
        for (int m = 0; m <= s.line_half_width; ++m, ++slot) {
            out.push_back({slot, box.index(node, m), n, m});
            if (m > 0) out.push_back({slot, box.index(node, -m), n, -m});
        }
    }
    return out;
}

void record_axis(const Target& t, std::uint64_t& tree, std::uint64_t& pos, std::uint64_t& neg) {
    if (t.m == 0) tree |= std::uint64_t{1} << t.n;
    if (t.n == 0 && t.m > 0) pos |= std::uint64_t{1} << t.m;
    if (t.n == 0 && t.m < 0) neg |= std::uint64_t{1} << (-t.m);
}

void check_p(double p) {
    if (!(p >= 0.0 && p <= 1.0)) throw std::domain_error("probability must lie in [0, 1]");
}

void check_samples(std::uint64_t samples) {
    if (samples == 0) throw std::domain_error("need at least one sample");
}

}  // namespace

// ---------------------------------------------------------------- edges

std::uint64_t edge_key_base(std::uint64_t lower_address_key, EdgeKind kind) {
    return mix64(lower_address_key ^ (static_cast<std::uint64_t>(kind) + 1));
}

std::uint64_t edge_key_line_offset(std::int64_t line) { return zigzag(line) * 0x9e3779b97f4a7c15ULL; }

EdgeId EdgeId::between(const Vertex& a, const Vertex& b) {
    if (a.tree == b.tree) {
        if (a.line + 1 == b.line) return {a, EdgeKind::line};
        if (b.line + 1 == a.line) return {b, EdgeKind::line};
    } else if (a.line == b.line) {
        if (graph::tree_parent(a.tree) == b.tree) return {a, EdgeKind::tree};
        if (graph::tree_parent(b.tree) == a.tree) return {b, EdgeKind::tree};
    }
    throw std::invalid_argument("vertices are not adjacent");
}

std::uint64_t EdgeId::key() const { return edge_key(graph::address_key(lower.tree), lower.line, kind); }

ConfigSampler::ConfigSampler(std::uint64_t base_seed, std::uint64_t config_index, double p)
    : base_seed_(base_seed), config_index_(config_index), p_(p), rng_(base_seed, config_index) {
    check_p(p);
}

// ---------------------------------------------------------------- graphs

FiniteGraph::FiniteGraph(std::uint32_t vertex_count, std::vector<Edge> edges, std::vector<std::uint64_t> keys)
    : vertex_count_(vertex_count), edges_(std::move(edges)), keys_(std::move(keys)) {
    if (edges_.size() != keys_.size()) throw std::invalid_argument("one key per edge required");
    offsets_.assign(static_cast<std::size_t>(vertex_count_) + 1, 0);
    for (const auto& e : edges_) {
        if (e.a >= vertex_count_ || e.b >= vertex_count_ || e.a == e.b) throw std::invalid_argument("bad edge");
        ++offsets_[e.a + 1];
        ++offsets_[e.b + 1];
    }
    for (std::size_t i = 1; i < offsets_.size(); ++i) offsets_[i] += offsets_[i - 1];
    incidence_.resize(offsets_.back());
    auto fill = offsets_;
    for (std::uint32_t i = 0; i < edges_.size(); ++i) {
        incidence_[fill[edges_[i].a]++] = {edges_[i].b, i};
        incidence_[fill[edges_[i].b]++] = {edges_[i].a, i};
    }
}

BoxGraph::BoxGraph(const BallSpec& spec) : spec_(spec) {
    graph::validate(spec);
    const auto total = graph::ball_vertex_count(spec);
    if (total > std::numeric_limits<std::uint32_t>::max() / 2) throw std::length_error("box too large");
    layers_ = static_cast<std::uint32_t>(2 * spec.line_half_width + 1);
    layer_inverse_ = ((static_cast<unsigned __int128>(1) << 64) + layers_ - 1) / layers_;
    tree_nodes_ = graph::enumerate_tree_ball(spec.d, spec.tree_radius);
    const auto T = static_cast<std::uint32_t>(tree_nodes_.size());
    std::vector<std::uint64_t> node_keys(T);
    for (std::uint32_t i = 0; i < T; ++i) {
        node_keys[i] = graph::address_key(tree_nodes_[i]);
        if (!node_by_key_.emplace(node_keys[i], i).second) throw std::logic_error("address key collision");
    }
    for (int n = 0; n <= spec.tree_radius; ++n) {
        graph::TreeAddress a{0, std::vector<std::uint8_t>(static_cast<std::size_t>(n), 0)};
        axis_nodes_.push_back(node_by_key_.at(graph::address_key(a)));
    }

    const auto d = static_cast<std::size_t>(spec.d);
    tree_adj_.assign(T * d, kNone);
    tree_base_.resize(T);
    line_base_.resize(T);
    for (std::uint32_t t = 0; t < T; ++t) {
        const auto nb = graph::tree_neighbors(tree_nodes_[t], spec.d);
        for (std::size_t j = 0; j < d; ++j) {
            if (nb[j].depth() > static_cast<std::uint32_t>(spec.tree_radius)) continue;
            const auto it = node_by_key_.find(graph::address_key(nb[j]));
            if (it != node_by_key_.end()) tree_adj_[t * d + j] = it->second;
        }
        tree_base_[t] = edge_key_base(node_keys[t], EdgeKind::tree);
        line_base_[t] = edge_key_base(node_keys[t], EdgeKind::line);
    }
    for (std::int64_t m = -spec.line_half_width; m <= spec.line_half_width; ++m) {
        line_offset_.push_back(edge_key_line_offset(m));
    }

    std::vector<FiniteGraph::Edge> edges;
    std::vector<std::uint64_t> keys;
    edges.reserve(static_cast<std::size_t>(graph::ball_edge_count(spec)));
    keys.reserve(edges.capacity());
    for_each_edge([&](std::uint32_t a, std::uint32_t b, std::uint64_t key) {
        edges.push_back({a, b});
        keys.push_back(key);
    });
    graph_ = FiniteGraph(static_cast<std::uint32_t>(total), std::move(edges), std::move(keys));
}

std::optional<std::uint32_t> BoxGraph::find(const Vertex& v) const {
    if (v.line < -spec_.line_half_width || v.line > spec_.line_half_width) return std::nullopt;
    if (v.tree.depth() > static_cast<std::uint32_t>(spec_.tree_radius)) return std::nullopt;
    if (!graph::is_canonical(v.tree, spec_.d)) return std::nullopt;
    const auto it = node_by_key_.find(graph::address_key(v.tree));
    if (it == node_by_key_.end() || tree_nodes_[it->second] != v.tree) return std::nullopt;
    return index(it->second, v.line);
}

std::uint32_t BoxGraph::index_of(const Vertex& v) const {
    auto idx = find(v);
    if (!idx) throw std::out_of_range("vertex outside box: " + graph::to_string(v));
    return *idx;
}

Vertex BoxGraph::vertex_at(std::uint32_t index) const {
    return Vertex{tree_nodes_.at(tree_node_of(index)), line_of(index)};
}

// ---------------------------------------------------------------- exploration

Explorer::Explorer(std::uint32_t vertex_count)
    : stamp_(vertex_count, 0), value_(vertex_count, kUnreached) {
    order_.reserve(vertex_count);
}

void Explorer::next_generation() {
    if (++generation_ == 0) {
        std::fill(stamp_.begin(), stamp_.end(), 0);
        generation_ = 1;
    }
    order_.clear();
}

std::span<const std::uint32_t> Explorer::explore(const FiniteGraph& g, const ConfigSampler& sampler,
                                                 std::uint32_t start) {
    next_generation();
    stamp_[start] = generation_;
    order_.push_back(start);
    const auto keys = g.edge_keys();
    for (std::size_t head = 0; head < order_.size(); ++head) {
        const auto v = order_[head];
        for (const auto& inc : g.incident(v)) {
            if (stamp_[inc.vertex] == generation_) continue;
            if (!sampler.is_open(keys[inc.edge])) continue;
            stamp_[inc.vertex] = generation_;
            order_.push_back(inc.vertex);
        }
    }
    return order_;
}

std::span<const std::uint32_t> Explorer::thresholds(const FiniteGraph& g, const CounterRng& rng,
                                                    std::uint32_t start, double cap) {
    next_generation();
    using Item = std::pair<double, std::uint32_t>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
    const auto keys = g.edge_keys();
    // stamp = generation marks "seen"; order_ collects settled vertices.
    stamp_[start] = generation_;
    value_[start] = -1.0;
    heap.push({-1.0, start});
    while (!heap.empty()) {
        const auto [t, v] = heap.top();
        heap.pop();
        if (t > value_[v]) continue;
        order_.push_back(v);
        for (const auto& inc : g.incident(v)) {
            const double u = rng.uniform(keys[inc.edge]);
            if (!(u < cap)) continue;
            const double candidate = std::max(t, u);
            if (stamp_[inc.vertex] != generation_) {
                stamp_[inc.vertex] = generation_;
                value_[inc.vertex] = candidate;
                heap.push({candidate, inc.vertex});
            } else if (candidate < value_[inc.vertex]) {
                value_[inc.vertex] = candidate;
                heap.push({candidate, inc.vertex});
            }
        }
    }
    return order_;
}

BoxExplorer::BoxExplorer(const BoxGraph& box)
    : box_(&box), grade_(box.vertex_count(), 0), stamp_(box.vertex_count(), 0), value_(box.vertex_count(), kUnreached) {
    order_.reserve(box.vertex_count());
}

std::span<const std::uint32_t> BoxExplorer::graded(const CounterRng& rng, std::uint32_t start,
                                                   std::span<const double> grid) {
    if (grid.empty() || grid.size() > 250) throw std::domain_error("grid must hold 1 to 250 values");
    if (!std::is_sorted(grid.begin(), grid.end())) throw std::domain_error("grid must be increasing");
    const auto K = static_cast<std::uint32_t>(grid.size());
    const auto V = box_->vertex_count();
    const std::size_t slots = static_cast<std::size_t>(box_->spec().d) + 2;
    levels_ = K;
    std::fill(grade_.begin(), grade_.end(), static_cast<std::uint8_t>(K));
    order_.clear();
    queue_.resize(static_cast<std::size_t>(V) + 1);
    if (K > 1) {
        deferred_.resize(static_cast<std::size_t>(V) + slots + 1);
        buckets_.resize(K);
        for (auto& b : buckets_) b.clear();
    }

    // Level of a deviate: number of grid values <= u, K when u >= grid.back().
    auto level_of = [&](double u) -> std::uint32_t {
        if (K <= 8) {
            std::uint32_t j = 0;
            for (std::uint32_t i = 0; i < K; ++i) j += u >= grid[i];
            return j;
        }
        return static_cast<std::uint32_t>(std::upper_bound(grid.begin(), grid.end(), u) - grid.begin());
    };

    std::uint8_t* grade = grade_.data();
    std::uint32_t* queue = queue_.data();
    std::uint64_t* deferred = deferred_.data();
    grade[start] = 0;
    if (K > 1) buckets_[0].push_back(start);
    else queue[0] = start;
    std::size_t tail = K > 1 ? 0 : 1;
    for (std::uint32_t level = 0; level < K; ++level) {
        // Seed this level's queue with the vertices deferred to it, skipping
        // those since improved to a lower level.
        if (K > 1) {
            tail = 0;
            for (auto v : buckets_[level]) {
                queue[tail] = v;
                tail += grade[v] == level;
            }
            buckets_[level].clear();
        }
        std::size_t deferred_tail = 0;
        auto flush = [&] {
            for (std::size_t i = 0; i < deferred_tail; ++i) {
                const auto j = static_cast<std::uint32_t>(deferred[i] >> 32);
                buckets_[j].push_back(static_cast<std::uint32_t>(deferred[i]));
            }
            deferred_tail = 0;
        };
        for (std::size_t head = 0; head < tail; ++head) {
            const auto v = queue[head];
            if (grade[v] != level) continue;  // improved meanwhile
            if (deferred_tail + slots > V) flush();
            order_.push_back(v);
            box_->for_each_slot(v, [&](std::uint32_t w, std::uint64_t key, bool exists) {
                // Settled at this level or below (missing slots map to v itself): no hash needed.
                if (grade[w] <= level) return;
                const std::uint32_t j = std::max(level, level_of(rng.uniform(key)));
                const std::uint32_t old = grade[w];
                const bool better = exists & (j < old);
                grade[w] = static_cast<std::uint8_t>(better ? j : old);
                // Branch-free: both slots past the tails are written, only one tail advances.
                queue[tail] = w;
                tail += better & (j == level);
                if (K > 1) {
                    deferred[deferred_tail] = (static_cast<std::uint64_t>(j) << 32) | w;
                    deferred_tail += better & (j != level);
                }
            });
        }
        flush();
    }
    return order_;
}

std::span<const std::uint32_t> BoxExplorer::explore(const ConfigSampler& sampler, std::uint32_t start) {
    const double grid[] = {sampler.p()};
    return graded(sampler.rng(), start, grid);
}

std::span<const std::uint32_t> BoxExplorer::thresholds(const CounterRng& rng, std::uint32_t start, double cap) {
    if (++generation_ == 0) {
        std::fill(stamp_.begin(), stamp_.end(), 0);
        generation_ = 1;
    }
    order_.clear();
    using Item = std::pair<double, std::uint32_t>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
    stamp_[start] = generation_;
    value_[start] = -1.0;
    heap.push({-1.0, start});
    while (!heap.empty()) {
        const auto [t, v] = heap.top();
        heap.pop();
        if (t > value_[v]) continue;
        order_.push_back(v);
        box_->for_each_slot(v, [&](std::uint32_t w, std::uint64_t key, bool exists) {
            if (!exists) return;
            const double u = rng.uniform(key);
            if (!(u < cap)) return;
            const double candidate = std::max(t, u);
            if (stamp_[w] != generation_ || candidate < value_[w]) {
                stamp_[w] = generation_;
                value_[w] = candidate;
                heap.push({candidate, w});
            }
        });
    }
    return order_;
}

std::vector<std::uint32_t> explore_cluster(const ConfigSampler& sampler, const FiniteGraph& g, std::uint32_t start) {
    if (start >= g.vertex_count()) throw std::out_of_range("start vertex outside graph");
    Explorer ex(g.vertex_count());
    auto c = ex.explore(g, sampler, start);
    return {c.begin(), c.end()};
}

std::vector<Vertex> explore_cluster(const ConfigSampler& sampler, const BallSpec& spec, const Vertex& start) {
    const BoxGraph box(spec);
    BoxExplorer ex(box);
    std::vector<Vertex> out;
    for (auto v : ex.explore(sampler, box.index_of(start))) out.push_back(box.vertex_at(v));
    return out;
}

namespace {

std::vector<std::uint32_t> labels_from(UnionFind& uf, std::uint32_t count) {
    constexpr auto kUnset = std::numeric_limits<std::uint32_t>::max();
    std::vector<std::uint32_t> label_of_root(count, kUnset);
    std::vector<std::uint32_t> labels(count);
    for (std::uint32_t v = 0; v < count; ++v) {
        auto& l = label_of_root[uf.find(v)];
        if (l == kUnset) l = v;
        labels[v] = l;
    }
    return labels;
}

}  // namespace

std::vector<std::uint32_t> full_labeling(const ConfigSampler& sampler, const FiniteGraph& g) {
    UnionFind uf(g.vertex_count());
    const auto edges = g.edges();
    const auto keys = g.edge_keys();
    for (std::size_t i = 0; i < edges.size(); ++i) {
        if (sampler.is_open(keys[i])) uf.unite(edges[i].a, edges[i].b);
    }
    return labels_from(uf, g.vertex_count());
}

std::vector<std::uint32_t> full_labeling(const ConfigSampler& sampler, const BoxGraph& box) {
    UnionFind uf(box.vertex_count());
    box.for_each_edge([&](std::uint32_t a, std::uint32_t b, std::uint64_t key) {
        if (sampler.is_open(key)) uf.unite(a, b);
    });
    return labels_from(uf, box.vertex_count());
}

std::vector<std::uint32_t> full_labeling(const ConfigSampler& sampler, const BallSpec& spec) {
    return full_labeling(sampler, BoxGraph(spec));
}

// ---------------------------------------------------------------- tables

TwoPointTable::TwoPointTable(BallSpec spec, double p, std::uint64_t samples, std::uint64_t base_seed)
    : spec_(spec), p_(p), samples_(samples), base_seed_(base_seed),
      hits_(static_cast<std::size_t>(spec.tree_radius + 1) * static_cast<std::size_t>(spec.line_half_width + 1), 0) {}

std::size_t TwoPointTable::slot(int n, int m) const {
    if (n < 0 || n > spec_.tree_radius || m < 0 || m > spec_.line_half_width) {
        throw std::out_of_range("orbit key outside table");
    }
    return static_cast<std::size_t>(n) * static_cast<std::size_t>(spec_.line_half_width + 1) +
           static_cast<std::size_t>(m);
}

double TwoPointTable::tau(int n, int m) const {
    if (samples_ == 0) return 0.0;
    return static_cast<double>(hits(n, m)) / (static_cast<double>(samples_) * representatives(m));
}

double TwoPointTable::stderr(int n, int m) const {
    const double t = tau(n, m);
    return samples_ == 0 ? 0.0 : std::sqrt(t * (1.0 - t) / static_cast<double>(samples_));
}

Interval TwoPointTable::ci(int n, int m) const { return wilson_interval(tau(n, m), static_cast<double>(samples_)); }

EstimateWithCI TwoPointTable::estimate(int n, int m) const {
    EstimateWithCI e;
    e.estimate = tau(n, m);
    e.stderr = stderr(n, m);
    const auto w = ci(n, m);
    e.ci_low = w.low;
    e.ci_high = w.high;
    e.samples = samples_;
    return e;
}

void TwoPointTable::set_axis_samples(std::vector<std::uint64_t> tree, std::vector<std::uint64_t> pos,
                                     std::vector<std::uint64_t> neg) {
    if (tree.size() != samples_ || pos.size() != samples_ || neg.size() != samples_) {
        throw std::invalid_argument("axis samples must have one entry per configuration");
    }
    tree_axis_ = std::move(tree);
    line_pos_ = std::move(pos);
    line_neg_ = std::move(neg);
}

bool axis_samples_supported(const BallSpec& spec) { return spec.tree_radius <= 63 && spec.line_half_width <= 63; }

TwoPointTable estimate_two_point(double p, const BallSpec& spec, const RunOptions& run) {
    return estimate_two_point(p, BoxGraph(spec), run);
}

TwoPointTable estimate_two_point(double p, const BoxGraph& box, const RunOptions& run) {
    check_p(p);
    const double ps[] = {p};
    return estimate_two_point_grid(ps, box, run).front();
}

std::vector<TwoPointTable> estimate_two_point_grid(std::span<const double> ps, const BoxGraph& box,
                                                   const RunOptions& run) {
    check_samples(run.samples);
    if (ps.empty()) throw std::domain_error("empty p grid");
    for (double p : ps) check_p(p);
    if (ps.size() > 250) throw std::domain_error("at most 250 p values per grid");
    // Graded exploration wants an increasing grid; rank[i] is the position of ps[i] in it.
    std::vector<double> grid(ps.begin(), ps.end());
    std::sort(grid.begin(), grid.end());
    std::vector<std::uint32_t> rank(ps.size());
    for (std::size_t i = 0; i < ps.size(); ++i) {
        rank[i] = static_cast<std::uint32_t>(std::lower_bound(grid.begin(), grid.end(), ps[i]) - grid.begin());
    }
    const auto targets = box_targets(box);
    const bool axis = axis_samples_supported(box.spec());
    const auto S = run.samples;
    const auto P = ps.size();

    std::vector<TwoPointTable> tables;
    for (double p : ps) tables.emplace_back(box.spec(), p, S, run.base_seed);
    // Per-p axis bits, written by config index so workers never overlap.
    std::vector<std::vector<std::uint64_t>> tree(P), pos(P), neg(P);
    if (axis) {
        for (std::size_t i = 0; i < P; ++i) {
            tree[i].assign(S, 0);
            pos[i].assign(S, 0);
            neg[i].assign(S, 0);
        }
    }
    const std::size_t slots = static_cast<std::size_t>(box.spec().tree_radius + 1) *
                              static_cast<std::size_t>(box.spec().line_half_width + 1);
    const unsigned workers = worker_count(S, run.threads);
    std::vector<std::vector<std::uint64_t>> partial(workers, std::vector<std::uint64_t>(P * slots, 0));

    run_chunked(S, workers, [&](unsigned w, std::uint64_t begin, std::uint64_t end) {
        BoxExplorer ex(box);
        auto& acc = partial[w];
        for (std::uint64_t k = begin; k < end; ++k) {
            const CounterRng rng(run.base_seed, k);
            ex.graded(rng, box.origin_index(), grid);
            for (const auto& t : targets) {
                const auto g = ex.grade(t.vertex);
                for (std::size_t i = 0; i < P; ++i) {
                    if (g > rank[i]) continue;
                    ++acc[i * slots + t.slot];
                    if (axis) record_axis(t, tree[i][k], pos[i][k], neg[i][k]);
                }
            }
        }
    });

    for (std::size_t i = 0; i < P; ++i) {
        for (int n = 0; n <= box.spec().tree_radius; ++n) {
            for (int m = 0; m <= box.spec().line_half_width; ++m) {
                std::uint64_t total = 0;
                const auto s = static_cast<std::size_t>(n) * static_cast<std::size_t>(box.spec().line_half_width + 1) +
                               static_cast<std::size_t>(m);
                for (const auto& acc : partial) total += acc[i * slots + s];
                tables[i].hits(n, m) = total;
            }
        }
        if (axis) tables[i].set_axis_samples(std::move(tree[i]), std::move(pos[i]), std::move(neg[i]));
    }
    return tables;
}

std::vector<std::uint64_t> two_point_hits(double p, const FiniteGraph& g, std::uint32_t origin, const RunOptions& run) {
    check_p(p);
    check_samples(run.samples);
    if (origin >= g.vertex_count()) throw std::out_of_range("origin outside graph");
    const unsigned workers = worker_count(run.samples, run.threads);
    std::vector<std::vector<std::uint64_t>> partial(workers, std::vector<std::uint64_t>(g.vertex_count(), 0));
    run_chunked(run.samples, workers, [&](unsigned w, std::uint64_t begin, std::uint64_t end) {
        Explorer ex(g.vertex_count());
        for (std::uint64_t k = begin; k < end; ++k) {
            for (auto v : ex.explore(g, ConfigSampler(run.base_seed, k, p), origin)) ++partial[w][v];
        }
    });
    std::vector<std::uint64_t> hits(g.vertex_count(), 0);
    for (const auto& part : partial) {
        for (std::size_t v = 0; v < hits.size(); ++v) hits[v] += part[v];
    }
    return hits;
}

// ---------------------------------------------------------------- triangle

TriangleSamples triangle_mc(double p, const FiniteGraph& g, std::uint32_t origin, const RunOptions& run,
                            std::span<const std::uint8_t> in_domain) {
    check_p(p);
    check_samples(run.samples);
    if (!in_domain.empty() && in_domain.size() != g.vertex_count()) throw std::invalid_argument("domain mask size");
    auto inside = [&](std::uint32_t v) { return in_domain.empty() || in_domain[v] != 0; };

    TriangleSamples out;
    out.values.assign(run.samples, 0.0);
    run_chunked(run.samples, worker_count(run.samples, run.threads),
                [&](unsigned, std::uint64_t begin, std::uint64_t end) {
                    Explorer ex(g.vertex_count());
                    UnionFind uf(g.vertex_count());
                    std::vector<std::uint64_t> count(g.vertex_count(), 0);
                    std::vector<std::uint32_t> first;
                    std::vector<std::uint32_t> touched;
                    const auto edges = g.edges();
                    const auto keys = g.edge_keys();
                    for (std::uint64_t k = begin; k < end; ++k) {
                        const ConfigSampler s1(run.base_seed, 3 * k, p);
                        const ConfigSampler s2(run.base_seed, 3 * k + 1, p);
                        const ConfigSampler s3(run.base_seed, 3 * k + 2, p);
                        auto c1 = ex.explore(g, s1, origin);
                        first.assign(c1.begin(), c1.end());

                        uf.reset();
                        for (std::size_t i = 0; i < edges.size(); ++i) {
                            if (s2.is_open(keys[i])) uf.unite(edges[i].a, edges[i].b);
                        }
                        touched.clear();
                        for (auto x : first) {
                            if (!inside(x)) continue;
                            const auto r = uf.find(x);
                            if (count[r]++ == 0) touched.push_back(r);
                        }
                        std::uint64_t score = 0;
                        for (auto y : ex.explore(g, s3, origin)) {
                            if (inside(y)) score += count[uf.find(y)];
                        }
                        for (auto r : touched) count[r] = 0;
                        out.values[k] = static_cast<double>(score);
                    }
                });
    out.estimate = mean_estimate(out.values);
    return out;
}

TriangleSamples triangle_mc(double p, const BoxGraph& box, const RunOptions& run, std::optional<BallSpec> sum_domain) {
    check_p(p);
    check_samples(run.samples);
    const auto& s = box.spec();
    std::vector<std::uint8_t> mask;
    if (sum_domain) {
        if (sum_domain->d != s.d || sum_domain->tree_radius > s.tree_radius ||
            sum_domain->line_half_width > s.line_half_width) {
            throw std::domain_error("sum domain must lie inside the sampling box");
        }
        mask.assign(box.vertex_count(), 0);
        for (std::uint32_t v = 0; v < mask.size(); ++v) {
            mask[v] = box.depth_of_node(box.tree_node_of(v)) <= sum_domain->tree_radius &&
                      std::abs(box.line_of(v)) <= sum_domain->line_half_width;
        }
    }
    auto inside = [&](std::uint32_t v) { return mask.empty() || mask[v] != 0; };

    TriangleSamples out;
    out.values.assign(run.samples, 0.0);
    const auto V = box.vertex_count();
    run_chunked(run.samples, worker_count(run.samples, run.threads),
                [&](unsigned, std::uint64_t begin, std::uint64_t end) {
                    BoxExplorer ex(box);
                    UnionFind uf(V);
                    std::vector<std::uint64_t> count(V, 0);
                    std::vector<std::uint32_t> touched;
                    for (std::uint64_t k = begin; k < end; ++k) {
                        const ConfigSampler s1(run.base_seed, 3 * k, p);
                        const ConfigSampler s2(run.base_seed, 3 * k + 1, p);
                        const ConfigSampler s3(run.base_seed, 3 * k + 2, p);
                        uf.reset();
                        box.for_each_edge([&](std::uint32_t a, std::uint32_t b, std::uint64_t key) {
                            if (s2.is_open(key)) uf.unite(a, b);
                        });
                        touched.clear();
                        for (auto x : ex.explore(s1, box.origin_index())) {
                            if (!inside(x)) continue;
                            const auto r = uf.find(x);
                            if (count[r]++ == 0) touched.push_back(r);
                        }
                        std::uint64_t score = 0;
                        for (auto y : ex.explore(s3, box.origin_index())) {
                            if (inside(y)) score += count[uf.find(y)];
                        }
                        for (auto r : touched) count[r] = 0;
                        out.values[k] = static_cast<double>(score);
                    }
                });
    out.estimate = mean_estimate(out.values);
    return out;
}

TriangleSamples triangle_mc(double p, const BallSpec& spec, const RunOptions& run, std::optional<BallSpec> sum_domain) {
    return triangle_mc(p, BoxGraph(spec), run, sum_domain);
}

}  // namespace perclab::mc
