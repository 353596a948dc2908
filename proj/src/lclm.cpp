#include "iealm/lclm.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numeric>
#include <sstream>
#include <utility>

#include "json.hpp"

namespace iealm {

namespace {

bool finite_state(const State& s) {
    return std::isfinite(s.x) && std::isfinite(s.y) && std::isfinite(s.z);
}

}  // namespace

State step(const State& s, const MapParams& p) {
    if (!finite_state(s))
        throw DivergentOrbit("step: non-finite input state", 0);
    State out;
    out.x = (p.b * s.x) * (1.0 - s.z);
    out.y = (p.b * s.y) * (1.0 - s.z);
    out.z = (p.a * s.x) * s.x + s.y * s.y;
    if (!finite_state(out))
        throw DivergentOrbit("step: orbit diverged", 1);
    return out;
}

State step_decoupled(const State& prev, const State& cur, const MapParams& p,
                     double ratio) {
    if (!std::isfinite(ratio) || ratio == 0.0)
        throw RatioUndefined("step_decoupled: x(0)/y(0) must be finite and non-zero");
    const double inv = 1.0 / ratio;
    State out;
    out.x = p.b * cur.x * (1.0 - (p.a + inv * inv) * prev.x * prev.x);
    out.y = p.b * cur.y * (1.0 - (p.a * ratio * ratio + 1.0) * prev.y * prev.y);
    const double w = 1.0 - prev.z;
    out.z = (p.b * p.b) * cur.z * (w * w);
    if (!finite_state(out))
        throw DivergentOrbit("step_decoupled: orbit diverged", 1);
    return out;
}

Orbit orbit(const State& k, const MapParams& p, std::size_t keep,
            std::size_t discard) {
    Orbit out;
    out.x.reserve(keep);
    out.y.reserve(keep);
    out.z.reserve(keep);
    State s = k;
    const std::size_t total = keep + discard;
    for (std::size_t i = 0; i < total; ++i) {
        try {
            s = step(s, p);
        } catch (const DivergentOrbit&) {
            throw DivergentOrbit("orbit: diverged at iteration " + std::to_string(i + 1),
                                 static_cast<long long>(i + 1));
        }
        if (i >= discard) {
            out.x.push_back(s.x);
            out.y.push_back(s.y);
            out.z.push_back(s.z);
        }
    }
    return out;
}

// ---- quantized z-map --------------------------------------------------------

void QuantizedMapConfig::validate() const {
    if (n < 1 || n > 16)
        throw ContractViolation("QuantizedMapConfig: n must be in [1,16]");
    if (b_den <= 0 || b_num < 0)
        throw ContractViolation("QuantizedMapConfig: b must be a non-negative rational");
    if (b_num > (1LL << 20) || b_den > (1LL << 20))
        throw ContractViolation("QuantizedMapConfig: rational b too large (limit 2^20)");
}

QuantizedMapConfig make_quantized_config(int n, const std::string& b, Quantizer q) {
    QuantizedMapConfig cfg;
    cfg.n = n;
    cfg.quantizer = q;
    std::int64_t num = 0, den = 1;
    if (auto slash = b.find('/'); slash != std::string::npos) {
        num = std::stoll(b.substr(0, slash));
        den = std::stoll(b.substr(slash + 1));
    } else if (auto dot = b.find('.'); dot != std::string::npos) {
        const std::string digits = b.substr(0, dot) + b.substr(dot + 1);
        const std::size_t frac = b.size() - dot - 1;
        if (frac > 9) throw ContractViolation("make_quantized_config: too many decimals");
        num = std::stoll(digits);
        den = 1;
        for (std::size_t i = 0; i < frac; ++i) den *= 10;
    } else {
        num = std::stoll(b);
    }
    const std::int64_t g = std::gcd(num, den);
    if (g > 1) { num /= g; den /= g; }
    cfg.b_num = num;
    cfg.b_den = den;
    cfg.validate();
    return cfg;
}

std::pair<std::uint32_t, std::uint32_t> quantized_step(std::uint32_t u,
                                                       std::uint32_t v,
                                                       const QuantizedMapConfig& cfg) {
    cfg.validate();
    const std::uint32_t size = 1u << cfg.n;
    if (u >= size || v >= size)
        throw ContractViolation("quantized_step: grid index out of range");
    // w_real = b^2 * v * (2^n - u)^2 / 2^(2n); exact integer arithmetic.
    using u128 = unsigned __int128;
    const u128 span = size - u;
    const u128 num = static_cast<u128>(cfg.b_num) * static_cast<u128>(cfg.b_num) *
                     static_cast<u128>(v) * span * span;
    const u128 den = static_cast<u128>(cfg.b_den) * static_cast<u128>(cfg.b_den)
                     << (2 * cfg.n);
    u128 w = num / den;
    const u128 rem = num % den;
    switch (cfg.quantizer) {
        case Quantizer::Floor: break;
        case Quantizer::Round: w += (2 * rem >= den) ? 1 : 0; break;
        case Quantizer::Ceil: w += (rem > 0) ? 1 : 0; break;
    }
    return {v, static_cast<std::uint32_t>(w & (size - 1))};
}

FunctionalGraph build_functional_graph(const QuantizedMapConfig& cfg) {
    cfg.validate();
    FunctionalGraph g;
    g.n = cfg.n;
    const std::uint32_t size = 1u << cfg.n;
    g.successor.resize(static_cast<std::size_t>(size) * size);
    for (std::uint32_t u = 0; u < size; ++u) {
        for (std::uint32_t v = 0; v < size; ++v) {
            const auto [su, sv] = quantized_step(u, v, cfg);
            g.successor[g.node_id(u, v)] = g.node_id(su, sv);
        }
    }
    return g;
}

namespace {

struct UnionFind {
    std::vector<std::uint32_t> parent;
    explicit UnionFind(std::size_t n) : parent(n) {
        std::iota(parent.begin(), parent.end(), 0u);
    }
    std::uint32_t find(std::uint32_t a) {
        while (parent[a] != a) {
            parent[a] = parent[parent[a]];
            a = parent[a];
        }
        return a;
    }
    void unite(std::uint32_t a, std::uint32_t b) { parent[find(a)] = find(b); }
};

}  // namespace

GraphStats graph_stats(const FunctionalGraph& g) {
    const std::size_t n_nodes = g.successor.size();
    GraphStats stats;

    UnionFind uf(n_nodes);
    for (std::uint32_t v = 0; v < n_nodes; ++v) uf.unite(v, g.successor[v]);
    std::size_t components = 0;
    for (std::uint32_t v = 0; v < n_nodes; ++v)
        if (uf.find(v) == v) ++components;
    stats.component_count = components;

    // Iterated-successor walk: color 0 = unseen, 1 = on current path, 2 = done.
    std::vector<std::uint8_t> color(n_nodes, 0);
    std::vector<std::uint32_t> pos(n_nodes, 0);
    std::vector<std::uint32_t> transient(n_nodes, 0);
    std::vector<std::uint32_t> path;
    for (std::uint32_t s = 0; s < n_nodes; ++s) {
        if (color[s] != 0) continue;
        path.clear();
        std::uint32_t cur = s;
        while (color[cur] == 0) {
            color[cur] = 1;
            pos[cur] = static_cast<std::uint32_t>(path.size());
            path.push_back(cur);
            cur = g.successor[cur];
        }
        std::size_t tail_start = path.size();
        if (color[cur] == 1) {  // closed a new cycle inside this path
            const std::uint32_t start = pos[cur];
            stats.cycle_lengths.push_back(path.size() - start);
            for (std::size_t j = start; j < path.size(); ++j) {
                transient[path[j]] = 0;
                color[path[j]] = 2;
            }
            tail_start = start;
        }
        for (std::size_t j = tail_start; j-- > 0;) {
            transient[path[j]] = transient[g.successor[path[j]]] + 1;
            color[path[j]] = 2;
        }
    }
    stats.cycle_count = stats.cycle_lengths.size();
    std::sort(stats.cycle_lengths.begin(), stats.cycle_lengths.end());
    for (std::uint32_t v = 0; v < n_nodes; ++v) {
        if (transient[v] > stats.max_transient_length)
            stats.max_transient_length = transient[v];
        if (g.successor[v] == v) stats.self_loop_nodes.push_back(v);
    }
    if (stats.cycle_count != stats.component_count)
        throw ContractViolation("graph_stats: cycle/component count mismatch");
    return stats;
}

std::string graph_to_dot(const FunctionalGraph& g) {
    std::ostringstream out;
    out << "digraph lclm_z {\n";
    for (std::uint32_t id = 0; id < g.successor.size(); ++id) {
        const auto [u, v] = g.coords(id);
        const auto [su, sv] = g.coords(g.successor[id]);
        out << "  \"" << u << ',' << v << "\" -> \"" << su << ',' << sv << "\";\n";
    }
    out << "}\n";
    return out.str();
}

std::string graph_to_json(const FunctionalGraph& g, const GraphStats& stats) {
    nlohmann::json j;
    j["n"] = g.n;
    auto edges = nlohmann::json::array();
    for (std::uint32_t id = 0; id < g.successor.size(); ++id)
        edges.push_back({id, g.successor[id]});
    j["edges"] = std::move(edges);
    j["stats"] = {
        {"component_count", stats.component_count},
        {"cycle_count", stats.cycle_count},
        {"cycle_lengths", stats.cycle_lengths},
        {"max_transient_length", stats.max_transient_length},
        {"self_loop_nodes", stats.self_loop_nodes},
    };
    return j.dump(2) + "\n";
}

}  // namespace iealm
