#pragma once

#include <vector>

#include "iealm/image.hpp"
#include "iealm/keystream.hpp"

// The encryption pipeline, per channel:
//   I*  = I [+] V            (modulo-256 addition)
//   I** = W xor I*
//   (L**, H**) = Spl(I**)
//   L'  = U  xor perm(L**, T1) xor perm(H**, T2)
//   H'  = U' xor perm(L', T3) xor perm(H**, T4)
//   I'' = W' xor ((L' + 16 H') [+] V')
// where perm gathers each bit-plane independently.

namespace iealm {

// out[i] = sum_k bit(in[t[k][i]], k) << k
std::vector<Nibble> permute_bits(const std::vector<Nibble>& nibbles,
                                 const PermFamily& t);

// Exact inverse: permute_bits(inverse_permute_bits(x, t), t) == x.
std::vector<Nibble> inverse_permute_bits(const std::vector<Nibble>& nibbles,
                                         const PermFamily& t);

// Every intermediate buffer of one channel encryption, for inspection.
struct CipherTrace {
    std::vector<Byte> input;       // I
    std::vector<Byte> i_star;      // I*
    std::vector<Byte> i_xor;       // I**
    std::vector<Nibble> l_ss;      // L**
    std::vector<Nibble> h_ss;      // H**
    std::vector<Nibble> l_tilde;   // perm(L**, T1)
    std::vector<Nibble> h_tilde;   // perm(H**, T2)
    std::vector<Nibble> l_prime;   // L'
    std::vector<Nibble> l_hat;     // perm(L', T3)
    std::vector<Nibble> h_hat;     // perm(H**, T4)
    std::vector<Nibble> h_prime;   // H'
    std::vector<Byte> i_prime;     // I'
    std::vector<Byte> output;      // I''
};

CipherTrace encrypt_channel(const std::vector<Byte>& input, const Keystream& ks);
std::vector<Byte> decrypt_channel(const std::vector<Byte>& cipher, const Keystream& ks);

// RGB entry points; all three channels share one keystream. The explicit-sums
// overloads freeze the key material regardless of the image content.
Image encrypt_rgb(const Image& img, double b, const ChannelSums& sums);
Image encrypt_rgb(const Image& img, double b);  // faithful: sums from img
Image decrypt_rgb(const Image& img, double b, const ChannelSums& sums);

Image encrypt_rgb(const Image& img, const Keystream& ks);
Image decrypt_rgb(const Image& img, const Keystream& ks);

}  // namespace iealm
