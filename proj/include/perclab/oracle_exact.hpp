#pragma once

// Exact connection probabilities on tiny graphs by enumerating every edge
// configuration. Intended as ground truth for the Monte-Carlo code.

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "perclab/graph_core.hpp"
#include "perclab/perc_mc.hpp"

namespace perclab::oracle {

inline constexpr std::uint32_t kMaxVertices = 16;
// 2^18 configurations; the radius-1, half-width-1 box of T_3 x Z has 17 edges.
inline constexpr std::uint32_t kMaxEdges = 18;

class SizeError : public std::length_error {
public:
    using std::length_error::length_error;
};

struct TinyGraph {
    std::uint32_t vertices = 0;
    std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
    std::uint32_t origin = 0;
    // Optional per-edge keys for Monte-Carlo sampling; empty means keys derived
    // from the endpoint pair.
    std::vector<std::uint64_t> keys;

    friend bool operator==(const TinyGraph&, const TinyGraph&) = default;
};

// Checks sizes, endpoint ranges, loops, duplicates and connectivity. Throws
// SizeError or std::invalid_argument.
void validate(const TinyGraph& g);

// Plain text: first line "V E origin", then one "u v" line per edge. Blank
// lines and lines starting with '#' are ignored.
TinyGraph parse_tiny_graph(std::istream& in);
TinyGraph read_tiny_graph(const std::string& path);
std::string format_tiny_graph(const TinyGraph& g);

// Connection polynomials: count[x][y][k] = number of configurations with k
// open edges in which x and y are connected. tau_p(x, y) is
// sum_k count[k] p^k (1-p)^(E-k), a polynomial of degree <= E.
class ConnectionPolynomials {
public:
    explicit ConnectionPolynomials(const TinyGraph& g);

    std::uint32_t vertices() const { return vertices_; }
    std::uint32_t edges() const { return edges_; }
    const std::vector<std::uint64_t>& counts(std::uint32_t x, std::uint32_t y) const;
    double evaluate(std::uint32_t x, std::uint32_t y, double p) const;
    graph::Rational evaluate_exact(std::uint32_t x, std::uint32_t y, const graph::Rational& p) const;

private:
    std::uint32_t vertices_;
    std::uint32_t edges_;
    std::vector<std::vector<std::uint64_t>> counts_;  // x * V + y
};

double exact_two_point(const TinyGraph& g, double p, std::uint32_t target);
double exact_triangle(const TinyGraph& g, double p);

// The truncated box as a TinyGraph; vertex i is box index i and keys match
// the box's Monte-Carlo keys.
TinyGraph embed_ball(const graph::BallSpec& spec);

mc::FiniteGraph to_finite_graph(const TinyGraph& g);

// Farthest vertex from the origin by graph distance, largest index among ties.
std::uint32_t designated_target(const TinyGraph& g);

}  // namespace perclab::oracle
