#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "iealm/errors.hpp"

// The 2D lag-complex Logistic map:
//   x(i+1) = b*x(i)*(1 - z(i))
//   y(i+1) = b*y(i)*(1 - z(i))
//   z(i+1) = a*x(i)^2 + y(i)^2,   a = 2
// plus its decoupled per-coordinate form, and the functional graph of the
// z-recurrence under fixed-point quantization.

namespace iealm {

struct MapParams {
    double a = 2.0;  // fixed by the scheme
    double b = 0.0;  // control parameter; the cipher uses b in [1.69, 2)
};

struct State {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;
};

// One iteration, evaluated in 64-bit floating point in the written order.
// Throws DivergentOrbit if a coordinate leaves the finite domain.
State step(const State& s, const MapParams& p);

// Decoupled recurrence: s(i+1) from (s(i-1), s(i)) and ratio = x(0)/y(0).
//   x(i+1) = b*x(i)*(1 - (a + (1/ratio)^2)*x(i-1)^2)
//   y(i+1) = b*y(i)*(1 - (a*ratio^2 + 1)*y(i-1)^2)
//   z(i+1) = b^2*z(i)*(1 - z(i-1))^2
// The x/y coefficients follow the proof of the decoupling property; the
// printed statement swaps them (see tests).
State step_decoupled(const State& prev, const State& cur, const MapParams& p,
                     double ratio);

struct Orbit {
    std::vector<double> x, y, z;  // length = keep
};

// Iterate keep+discard times from k; return iterates discard+1 .. discard+keep.
// The initial state itself is never emitted.
Orbit orbit(const State& k, const MapParams& p, std::size_t keep,
            std::size_t discard);

// ---- quantized z-map ------------------------------------------------------

enum class Quantizer { Floor, Round, Ceil };  // Round = half away from zero

// b is kept as an exact rational so quantization never suffers
// double-rounding at floor/round/ceil boundaries.
struct QuantizedMapConfig {
    int n = 3;  // fractional bits; grid has 2^(2n) nodes, 1 <= n <= 16
    std::int64_t b_num = 511;
    std::int64_t b_den = 256;
    Quantizer quantizer = Quantizer::Floor;

    void validate() const;
};

// Parses "511/256", "1.99609375" or "2" into an exact rational.
QuantizedMapConfig make_quantized_config(int n, const std::string& b,
                                         Quantizer q);

// State (u,v) encodes (z(i-1), z(i)) = (u/2^n, v/2^n); successor is (v, w)
// with w = Q(b^2 * (v/2^n) * (1 - u/2^n)^2 * 2^n) mod 2^n.
std::pair<std::uint32_t, std::uint32_t> quantized_step(std::uint32_t u,
                                                       std::uint32_t v,
                                                       const QuantizedMapConfig& cfg);

struct FunctionalGraph {
    int n = 0;
    std::vector<std::uint32_t> successor;  // node id = u*2^n + v

    std::uint32_t node_count() const { return static_cast<std::uint32_t>(successor.size()); }
    std::uint32_t node_id(std::uint32_t u, std::uint32_t v) const {
        return (u << n) | v;
    }
    std::pair<std::uint32_t, std::uint32_t> coords(std::uint32_t id) const {
        return {id >> n, id & ((1u << n) - 1u)};
    }
};

FunctionalGraph build_functional_graph(const QuantizedMapConfig& cfg);

struct GraphStats {
    std::size_t component_count = 0;
    std::size_t cycle_count = 0;
    std::vector<std::size_t> cycle_lengths;       // sorted ascending
    std::size_t max_transient_length = 0;
    std::vector<std::uint32_t> self_loop_nodes;   // ascending node ids
};

// Components by union-find over successor edges, cycles by iterated-successor
// walk; the two counts are cross-checked (out-degree-1 graphs have exactly
// one cycle per component).
GraphStats graph_stats(const FunctionalGraph& g);

std::string graph_to_dot(const FunctionalGraph& g);
std::string graph_to_json(const FunctionalGraph& g, const GraphStats& stats);

}  // namespace iealm
