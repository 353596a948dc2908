#pragma once

#include <cstdint>
#include <utility>

#include "iealm/errors.hpp"

// Bit-exact primitives shared by the cipher and the attack: nibble
// split/combine, modular add/sub at explicit bit widths, carries.

namespace iealm {

using Byte = std::uint8_t;    // [0,255]
using Nibble = std::uint8_t;  // [0,15]

// x -> (low, high) with x = low + 16*high.
constexpr std::pair<Nibble, Nibble> spl(Byte x) {
    return {static_cast<Nibble>(x & 0x0F), static_cast<Nibble>(x >> 4)};
}

constexpr Byte combine(Nibble low, Nibble high) {
    return static_cast<Byte>((low & 0x0F) | (high << 4));
}

// k-th least-significant bit; k must address a bit of an 8-bit value.
constexpr unsigned bit(unsigned x, int k) {
    if (k < 0 || k >= 8)
        throw ContractViolation("bit: index out of range");
    return (x >> k) & 1u;
}

// (a + b) mod 2^n0. Widths are explicit; only 4 and 8 are used here.
constexpr unsigned boxplus(unsigned a, unsigned b, int n0) {
    const unsigned mask = (1u << n0) - 1u;
    if (n0 < 1 || n0 > 31 || a > mask || b > mask)
        throw ContractViolation("boxplus: operand out of range");
    return (a + b) & mask;
}

// (a - b) mod 2^n0; exact inverse of boxplus in its second operand.
constexpr unsigned boxminus(unsigned a, unsigned b, int n0) {
    const unsigned mask = (1u << n0) - 1u;
    if (n0 < 1 || n0 > 31 || a > mask || b > mask)
        throw ContractViolation("boxminus: operand out of range");
    return (a - b) & mask;
}

// Carry of the low-nibble addition into the high nibble: floor((l+v)/16).
constexpr unsigned carry_low_to_high(Nibble l, Nibble v) {
    return (static_cast<unsigned>(l & 0x0F) + static_cast<unsigned>(v & 0x0F)) >> 4;
}

}  // namespace iealm
