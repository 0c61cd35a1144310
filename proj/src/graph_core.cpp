#include "perclab/graph_core.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "perclab/rng.hpp"

namespace perclab::graph {

namespace {

std::uint64_t checked_mul(std::uint64_t a, std::uint64_t b) {
    std::uint64_t out = 0;
    if (__builtin_mul_overflow(a, b, &out)) {
        throw std::overflow_error("count exceeds 64-bit range");
    }
    return out;
}

std::uint64_t checked_pow(std::uint64_t base, int exp) {
    std::uint64_t out = 1;
    for (int i = 0; i < exp; ++i) out = checked_mul(out, base);
    return out;
}

void check_level_args(int d, int n, int l) {
    validate_degree(d);
    if (n < 0) throw std::domain_error("sphere index must be nonnegative");
    if (std::abs(l) > n) throw std::domain_error("level exceeds distance");
    if ((n - l) % 2 != 0) throw std::domain_error("level and distance differ in parity");
}

// Appends every canonical word of length k below a_up, in lexicographic order.
void append_words(int b, std::uint32_t up, int k, std::vector<TreeAddress>& out) {
    if (k == 0) {
        out.push_back(TreeAddress{up, {}});
        return;
    }
    std::vector<std::uint8_t> word(static_cast<std::size_t>(k), 0);
    const std::uint8_t first_min = up >= 1 ? 1 : 0;
    if (first_min >= b) return;
    word[0] = first_min;
    while (true) {
        out.push_back(TreeAddress{up, word});
        int pos = k - 1;
        while (pos >= 0) {
            if (word[static_cast<std::size_t>(pos)] + 1 < b) {
                ++word[static_cast<std::size_t>(pos)];
                break;
            }
            word[static_cast<std::size_t>(pos)] = (pos == 0) ? first_min : 0;
            --pos;
        }
        if (pos < 0) return;
    }
}

}  // namespace

Tilt Tilt::operator*(const Tilt& other) const {
    if (base_ != other.base_) throw std::invalid_argument("tilts with different bases");
    return {base_, exponent_ + other.exponent_};
}

Rational Tilt::as_rational() const {
    boost::multiprecision::cpp_int power = 1;
    const std::int64_t e = exponent_ < 0 ? -exponent_ : exponent_;
    for (std::int64_t i = 0; i < e; ++i) power *= base_;
    if (exponent_ >= 0) return Rational(power);
    return Rational(boost::multiprecision::cpp_int(1), power);
}

double Tilt::as_double() const {
    return std::pow(static_cast<double>(base_), static_cast<double>(exponent_));
}

void validate_degree(int d) {
    if (d < 3 || d > 255) throw std::domain_error("tree degree must lie in [3, 255]");
}

void validate(const BallSpec& spec) {
    validate_degree(spec.d);
    if (spec.tree_radius < 0) throw std::domain_error("tree radius must be nonnegative");
    if (spec.line_half_width < 0) throw std::domain_error("line half-width must be nonnegative");
}

Vertex origin() { return Vertex{}; }

bool is_canonical(const TreeAddress& a, int d) {
    const int b = d - 1;
    for (auto label : a.down) {
        if (label >= b) return false;
    }
    return a.up == 0 || a.down.empty() || a.down.front() != 0;
}

TreeAddress canonicalize(std::uint32_t up, std::vector<std::uint8_t> down) {
    std::size_t skip = 0;
    while (up > 0 && skip < down.size() && down[skip] == 0) {
        --up;
        ++skip;
    }
    down.erase(down.begin(), down.begin() + static_cast<std::ptrdiff_t>(skip));
    return TreeAddress{up, std::move(down)};
}

TreeAddress tree_parent(const TreeAddress& a) {
    if (a.down.empty()) return TreeAddress{a.up + 1, {}};
    TreeAddress p = a;
    p.down.pop_back();
    return p;
}

std::vector<TreeAddress> tree_children(const TreeAddress& a, int d) {
    const int b = d - 1;
    std::vector<TreeAddress> out;
    out.reserve(static_cast<std::size_t>(b));
    for (int c = 0; c < b; ++c) {
        auto word = a.down;
        word.push_back(static_cast<std::uint8_t>(c));
        out.push_back(canonicalize(a.up, std::move(word)));
    }
    return out;
}

std::vector<TreeAddress> tree_neighbors(const TreeAddress& a, int d) {
    std::vector<TreeAddress> out;
    out.reserve(static_cast<std::size_t>(d));
    out.push_back(tree_parent(a));
    for (auto& c : tree_children(a, d)) out.push_back(std::move(c));
    return out;
}

std::vector<Vertex> neighbors(const Vertex& v, int d) {
    std::vector<Vertex> out;
    out.reserve(static_cast<std::size_t>(d) + 2);
    for (auto& t : tree_neighbors(v.tree, d)) out.push_back(Vertex{std::move(t), v.line});
    out.push_back(Vertex{v.tree, v.line + 1});
    out.push_back(Vertex{v.tree, v.line - 1});
    return out;
}

std::uint64_t tree_distance(const TreeAddress& a, const TreeAddress& b) {
    // Express both as words below the common ancestor a_U.
    const std::uint32_t top = std::max(a.up, b.up);
    const std::size_t pad_a = top - a.up;
    const std::size_t pad_b = top - b.up;
    const std::size_t len_a = pad_a + a.down.size();
    const std::size_t len_b = pad_b + b.down.size();
    auto label_at = [](const TreeAddress& x, std::size_t pad, std::size_t i) -> int {
        return i < pad ? 0 : x.down[i - pad];
    };
    std::size_t common = 0;
    const std::size_t limit = std::min(len_a, len_b);
    while (common < limit && label_at(a, pad_a, common) == label_at(b, pad_b, common)) ++common;
    return (len_a - common) + (len_b - common);
}

std::int64_t level(const Vertex& x, const Vertex& y) { return y.tree.height() - x.tree.height(); }

Tilt delta(const Vertex& x, const Vertex& y, int d) { return Tilt(d - 1, level(x, y)); }

OrbitKey orbit_key(const Vertex& x, const Vertex& y) {
    const std::int64_t dm = x.line - y.line;
    return OrbitKey{static_cast<std::uint32_t>(tree_distance(x.tree, y.tree)),
                    static_cast<std::uint64_t>(dm < 0 ? -dm : dm)};
}

std::uint64_t sphere_count(int d, int n) {
    validate_degree(d);
    if (n < 0) throw std::domain_error("sphere index must be nonnegative");
    if (n == 0) return 1;
    return checked_mul(static_cast<std::uint64_t>(d), checked_pow(static_cast<std::uint64_t>(d - 1), n - 1));
}

std::uint64_t level_count(int d, int n, int l) {
    check_level_args(d, n, l);
    const int ups = (n + l) / 2;
    const int downs = (n - l) / 2;
    const auto b = static_cast<std::uint64_t>(d - 1);
    if (downs == 0) return 1;
    if (ups == 0) return checked_pow(b, downs);
    return checked_mul(b - 1, checked_pow(b, downs - 1));
}

double sphere_count_real(int d, int n) {
    validate_degree(d);
    if (n < 0) throw std::domain_error("sphere index must be nonnegative");
    if (n == 0) return 1.0;
    return d * std::pow(static_cast<double>(d - 1), n - 1);
}

double level_count_real(int d, int n, int l) {
    check_level_args(d, n, l);
    const int ups = (n + l) / 2;
    const int downs = (n - l) / 2;
    const double b = d - 1;
    if (downs == 0) return 1.0;
    if (ups == 0) return std::pow(b, downs);
    return (b - 1.0) * std::pow(b, downs - 1);
}

std::uint64_t tree_ball_size(int d, int radius) {
    std::uint64_t total = 0;
    for (int n = 0; n <= radius; ++n) total += sphere_count(d, n);
    return total;
}

std::uint64_t ball_vertex_count(const BallSpec& spec) {
    validate(spec);
    return checked_mul(tree_ball_size(spec.d, spec.tree_radius),
                       2 * static_cast<std::uint64_t>(spec.line_half_width) + 1);
}

std::uint64_t ball_edge_count(const BallSpec& spec) {
    validate(spec);
    const std::uint64_t t = tree_ball_size(spec.d, spec.tree_radius);
    const auto layers = 2 * static_cast<std::uint64_t>(spec.line_half_width) + 1;
    return checked_mul(t - 1, layers) + checked_mul(t, layers - 1);
}

std::vector<TreeAddress> enumerate_tree_sphere(int d, int n) {
    validate_degree(d);
    std::vector<TreeAddress> out;
    for (int up = 0; up <= n; ++up) append_words(d - 1, static_cast<std::uint32_t>(up), n - up, out);
    return out;
}

std::vector<TreeAddress> enumerate_tree_ball(int d, int radius) {
    std::vector<TreeAddress> out;
    for (int n = 0; n <= radius; ++n) {
        auto sphere = enumerate_tree_sphere(d, n);
        out.insert(out.end(), std::make_move_iterator(sphere.begin()), std::make_move_iterator(sphere.end()));
    }
    return out;
}

void for_each_ball_vertex(const BallSpec& spec, const std::function<void(const Vertex&)>& fn) {
    validate(spec);
    for (const auto& t : enumerate_tree_ball(spec.d, spec.tree_radius)) {
        for (std::int64_t m = -spec.line_half_width; m <= spec.line_half_width; ++m) fn(Vertex{t, m});
    }
}

std::vector<Vertex> enumerate_ball(const BallSpec& spec) {
    std::vector<Vertex> out;
    out.reserve(static_cast<std::size_t>(ball_vertex_count(spec)));
    for_each_ball_vertex(spec, [&](const Vertex& v) { out.push_back(v); });
    return out;
}

std::uint64_t address_key(const TreeAddress& a) {
    std::uint64_t h = mix64(0x7f4a7c159e3779b9ULL ^ a.up);
    h = hash_combine(h, a.down.size());
    for (auto label : a.down) h = hash_combine(h, label);
    return h;
}

std::string to_string(const TreeAddress& a) {
    std::ostringstream os;
    os << "(up=" << a.up << ", down=[";
    for (std::size_t i = 0; i < a.down.size(); ++i) os << (i ? "," : "") << int(a.down[i]);
    os << "])";
    return os.str();
}

std::string to_string(const Vertex& v) { return to_string(v.tree) + "@" + std::to_string(v.line); }

}  // namespace perclab::graph
