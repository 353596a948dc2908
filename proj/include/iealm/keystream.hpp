#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "iealm/bitops.hpp"
#include "iealm/lclm.hpp"

// Derives the full per-image key material: byte sequences U, V, W (and the
// primed counterparts) plus the four bit-plane permutation families T1..T4,
// all from the control parameter b and the plaintext channel sums.

namespace iealm {

struct ChannelSums {
    std::uint64_t x_r = 0, y_g = 0, z_b = 0;
};

struct KeyMaterial {
    double b = 0.0;  // in [1.69, 2)
    ChannelSums sums;
};

struct InitialConditions {
    State k1, k2;
};

using Permutation = std::vector<std::uint32_t>;
using PermFamily = std::array<Permutation, 4>;  // one permutation per bit-plane

struct Keystream {
    std::vector<Nibble> u;   // 4-bit
    std::vector<Byte> v, w;  // 8-bit
    std::vector<Nibble> u2;  // primed counterparts (from K2)
    std::vector<Byte> v2, w2;
    PermFamily t1, t2, t3, t4;

    std::size_t pixel_count() const { return u.size(); }
};

// K1 = (0.2 + Xr/1e9, 0.4 + Yg/1e9, 0.1 + Zb/1e9), K2 = K1 + (0.1, 0.1, 0.1).
InitialConditions derive_initial_conditions(const ChannelSums& s);

// floor(|x| * 1e15) mod 16
Nibble quantize_u(double x);

// floor(Dec(x) * 1e3) mod 256, Dec(x) = x*1e3 - floor(x*1e3)
Byte quantize_vw(double x);

// T(i) = |{j : seq[j] < seq[i]}| + |{j < i : seq[j] == seq[i]}|
// (ascending 0-based rank, ties broken stably by index).
Permutation rank_permutation(const std::vector<double>& seq);

// Stable ascending argsort: T[r] = index of the r-th smallest element.
// Inverse of rank_permutation; this is what the reference traces use.
Permutation order_permutation(const std::vector<double>& seq);

bool is_bijection(const Permutation& t);
Permutation invert_permutation(const Permutation& t);

// Full derivation: orbit of 2*MN (250 discarded) from each of K1/K2;
// U/V/W from the first MN elements of X/Y/Z; per source sequence m in
// (X, Y, Z, G): T2[m]/T4[m] = order of the first half, T1[m]/T3[m] = order
// of the second half (T1, T2 from K1's orbit; T3, T4 from K2's).
Keystream generate_keystream(const KeyMaterial& k, std::size_t pixel_count);

// JSON fixture round-trip.
std::string keystream_to_json(const Keystream& ks);
Keystream keystream_from_json(const std::string& text);

}  // namespace iealm
