#include "iealm/keystream.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "json.hpp"

namespace iealm {

InitialConditions derive_initial_conditions(const ChannelSums& s) {
    InitialConditions ic;
    ic.k1 = {0.2 + static_cast<double>(s.x_r) / 1e9,
             0.4 + static_cast<double>(s.y_g) / 1e9,
             0.1 + static_cast<double>(s.z_b) / 1e9};
    ic.k2 = {0.3 + static_cast<double>(s.x_r) / 1e9,
             0.5 + static_cast<double>(s.y_g) / 1e9,
             0.2 + static_cast<double>(s.z_b) / 1e9};
    return ic;
}

Nibble quantize_u(double x) {
    if (!std::isfinite(x))
        throw ContractViolation("quantize_u: non-finite input");
    const double scaled = std::floor(std::fabs(x) * 1e15);
    // fmod is exact for integer-valued doubles, no 64-bit overflow concerns
    return static_cast<Nibble>(std::fmod(scaled, 16.0));
}

Byte quantize_vw(double x) {
    if (!std::isfinite(x))
        throw ContractViolation("quantize_vw: non-finite input");
    const double t = x * 1e3;
    const double dec = t - std::floor(t);  // in [0,1) for negative x too
    const double v = std::floor(dec * 1e3);
    return static_cast<Byte>(std::fmod(v, 256.0));
}

Permutation order_permutation(const std::vector<double>& seq) {
    for (double v : seq)
        if (!std::isfinite(v))
            throw ContractViolation("order_permutation: non-finite element");
    Permutation order(seq.size());
    std::iota(order.begin(), order.end(), 0u);
    std::stable_sort(order.begin(), order.end(),
                     [&seq](std::uint32_t a, std::uint32_t b) { return seq[a] < seq[b]; });
    return order;
}

Permutation rank_permutation(const std::vector<double>& seq) {
    return invert_permutation(order_permutation(seq));
}

bool is_bijection(const Permutation& t) {
    std::vector<bool> seen(t.size(), false);
    for (std::uint32_t v : t) {
        if (v >= t.size() || seen[v]) return false;
        seen[v] = true;
    }
    return true;
}

Permutation invert_permutation(const Permutation& t) {
    Permutation inv(t.size());
    std::vector<bool> seen(t.size(), false);
    for (std::uint32_t i = 0; i < t.size(); ++i) {
        const std::uint32_t v = t[i];
        if (v >= t.size() || seen[v])
            throw InvalidPermutation("invert_permutation: not a bijection");
        seen[v] = true;
        inv[v] = i;
    }
    return inv;
}

namespace {

// U/V/W plus the two permutation families of one orbit.
struct HalfKeystream {
    std::vector<Nibble> u;
    std::vector<Byte> v, w;
    PermFamily first_half;   // T2 (or T4): order of elements 0..MN-1
    PermFamily second_half;  // T1 (or T3): order of elements MN..2MN-1
};

HalfKeystream derive_half(const State& k0, double b, std::size_t mn) {
    const MapParams params{2.0, b};
    const Orbit orb = orbit(k0, params, 2 * mn, 250);
    std::vector<double> g(2 * mn);
    for (std::size_t i = 0; i < 2 * mn; ++i)
        g[i] = ((orb.x[i] + orb.y[i]) + orb.z[i]) / 3.0;

    HalfKeystream out;
    out.u.resize(mn);
    out.v.resize(mn);
    out.w.resize(mn);
    for (std::size_t i = 0; i < mn; ++i) {
        out.u[i] = quantize_u(orb.x[i]);
        out.v[i] = quantize_vw(orb.y[i]);
        out.w[i] = quantize_vw(orb.z[i]);
    }
    const std::array<const std::vector<double>*, 4> sources{&orb.x, &orb.y, &orb.z, &g};
    for (int m = 0; m < 4; ++m) {
        const auto& s = *sources[m];
        out.first_half[m] = order_permutation({s.begin(), s.begin() + mn});
        out.second_half[m] = order_permutation({s.begin() + mn, s.end()});
    }
    return out;
}

}  // namespace

Keystream generate_keystream(const KeyMaterial& k, std::size_t pixel_count) {
    if (pixel_count < 1)
        throw ContractViolation("generate_keystream: pixel count must be >= 1");
    const InitialConditions ic = derive_initial_conditions(k.sums);
    HalfKeystream a = derive_half(ic.k1, k.b, pixel_count);
    HalfKeystream b = derive_half(ic.k2, k.b, pixel_count);
    Keystream ks;
    ks.u = std::move(a.u);
    ks.v = std::move(a.v);
    ks.w = std::move(a.w);
    ks.t1 = std::move(a.second_half);
    ks.t2 = std::move(a.first_half);
    ks.u2 = std::move(b.u);
    ks.v2 = std::move(b.v);
    ks.w2 = std::move(b.w);
    ks.t3 = std::move(b.second_half);
    ks.t4 = std::move(b.first_half);
    return ks;
}

namespace {

template <typename T>
nlohmann::json bytes_json(const std::vector<T>& v) {
    nlohmann::json j = nlohmann::json::array();
    for (T b : v) j.push_back(static_cast<unsigned>(b));
    return j;
}

nlohmann::json family_json(const PermFamily& fam) {
    nlohmann::json j = nlohmann::json::array();
    for (const auto& p : fam) j.push_back(p);
    return j;
}

template <typename T>
std::vector<T> bytes_from_json(const nlohmann::json& j) {
    std::vector<T> v;
    v.reserve(j.size());
    for (const auto& e : j) v.push_back(static_cast<T>(e.get<unsigned>()));
    return v;
}

PermFamily family_from_json(const nlohmann::json& j) {
    PermFamily fam;
    for (int m = 0; m < 4; ++m) fam[m] = j.at(m).get<Permutation>();
    return fam;
}

}  // namespace

std::string keystream_to_json(const Keystream& ks) {
    nlohmann::json j;
    j["U"] = bytes_json(ks.u);
    j["V"] = bytes_json(ks.v);
    j["W"] = bytes_json(ks.w);
    j["U2"] = bytes_json(ks.u2);
    j["V2"] = bytes_json(ks.v2);
    j["W2"] = bytes_json(ks.w2);
    j["T1"] = family_json(ks.t1);
    j["T2"] = family_json(ks.t2);
    j["T3"] = family_json(ks.t3);
    j["T4"] = family_json(ks.t4);
    return j.dump();
}

Keystream keystream_from_json(const std::string& text) {
    const nlohmann::json j = nlohmann::json::parse(text);
    Keystream ks;
    ks.u = bytes_from_json<Nibble>(j.at("U"));
    ks.v = bytes_from_json<Byte>(j.at("V"));
    ks.w = bytes_from_json<Byte>(j.at("W"));
    ks.u2 = bytes_from_json<Nibble>(j.at("U2"));
    ks.v2 = bytes_from_json<Byte>(j.at("V2"));
    ks.w2 = bytes_from_json<Byte>(j.at("W2"));
    ks.t1 = family_from_json(j.at("T1"));
    ks.t2 = family_from_json(j.at("T2"));
    ks.t3 = family_from_json(j.at("T3"));
    ks.t4 = family_from_json(j.at("T4"));
    return ks;
}

}  // namespace iealm
