#pragma once

// Geometry of the product graph T_d x Z.
//
// Tree vertices are addressed relative to a fixed origin o and a fixed end xi.
// The ancestors of o are a_1, a_2, ... (a_k is reached from o by k parent
// steps). Every vertex has d-1 children labelled 0..d-2, and a_{k-1} is child 0
// of a_k. A vertex is written (up, down): climb `up` steps to a_up, then descend
// along the child labels in `down`. The form is canonical when up == 0 or the
// first down label is nonzero, so that the word never walks back toward o.

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace perclab::graph {

using Rational = boost::multiprecision::cpp_rational;

struct TreeAddress {
    std::uint32_t up = 0;
    std::vector<std::uint8_t> down;

    std::uint32_t depth() const { return up + static_cast<std::uint32_t>(down.size()); }
    // L(o, x) for this vertex x.
    std::int64_t height() const {
        return static_cast<std::int64_t>(up) - static_cast<std::int64_t>(down.size());
    }

    friend bool operator==(const TreeAddress&, const TreeAddress&) = default;
    friend auto operator<=>(const TreeAddress&, const TreeAddress&) = default;
};

struct Vertex {
    TreeAddress tree;
    std::int64_t line = 0;

    friend bool operator==(const Vertex&, const Vertex&) = default;
    friend auto operator<=>(const Vertex&, const Vertex&) = default;
};

struct BallSpec {
    int d = 3;
    int tree_radius = 0;
    int line_half_width = 0;

    int branching() const { return d - 1; }
    friend bool operator==(const BallSpec&, const BallSpec&) = default;
};

struct OrbitKey {
    std::uint32_t n = 0;  // tree distance
    std::uint64_t m = 0;  // absolute line offset

    friend bool operator==(const OrbitKey&, const OrbitKey&) = default;
    friend auto operator<=>(const OrbitKey&, const OrbitKey&) = default;
};

// Exact tilt b^L. Products and inverses are computed on the exponent, so the
// cocycle identities hold without rounding.
class Tilt {
public:
    Tilt(int base, std::int64_t exponent) : base_(base), exponent_(exponent) {}

    int base() const { return base_; }
    std::int64_t exponent() const { return exponent_; }

    Tilt inverse() const { return {base_, -exponent_}; }
    Tilt operator*(const Tilt& other) const;

    Rational as_rational() const;
    double as_double() const;

    friend bool operator==(const Tilt&, const Tilt&) = default;

private:
    int base_;
    std::int64_t exponent_;
};

void validate_degree(int d);
void validate(const BallSpec& spec);

Vertex origin();
bool is_canonical(const TreeAddress& a, int d);
// Brings an arbitrary (up, down) pair to canonical form by cancelling leading
// zero labels against up-steps.
TreeAddress canonicalize(std::uint32_t up, std::vector<std::uint8_t> down);

TreeAddress tree_parent(const TreeAddress& a);
// The d-1 children of `a`, child label 0 first.
std::vector<TreeAddress> tree_children(const TreeAddress& a, int d);
// Parent first, then children.
std::vector<TreeAddress> tree_neighbors(const TreeAddress& a, int d);

// Parent, the d-1 children, then the line neighbours at +1 and -1.
std::vector<Vertex> neighbors(const Vertex& v, int d);

std::uint64_t tree_distance(const TreeAddress& a, const TreeAddress& b);
std::int64_t level(const Vertex& x, const Vertex& y);
Tilt delta(const Vertex& x, const Vertex& y, int d);
OrbitKey orbit_key(const Vertex& x, const Vertex& y);

std::uint64_t sphere_count(int d, int n);
std::uint64_t level_count(int d, int n, int l);
// Same counts in floating point, usable far beyond 64-bit range.
double sphere_count_real(int d, int n);
double level_count_real(int d, int n, int l);

std::uint64_t tree_ball_size(int d, int radius);
std::uint64_t ball_vertex_count(const BallSpec& spec);
std::uint64_t ball_edge_count(const BallSpec& spec);

// Tree ball in deterministic order: by depth, then by address.
std::vector<TreeAddress> enumerate_tree_ball(int d, int radius);
std::vector<TreeAddress> enumerate_tree_sphere(int d, int n);
void for_each_ball_vertex(const BallSpec& spec, const std::function<void(const Vertex&)>& fn);
std::vector<Vertex> enumerate_ball(const BallSpec& spec);

// Deterministic 64-bit fingerprint of a canonical address; platform independent.
std::uint64_t address_key(const TreeAddress& a);

std::string to_string(const TreeAddress& a);
std::string to_string(const Vertex& v);

}  // namespace perclab::graph
