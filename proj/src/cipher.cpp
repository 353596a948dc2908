#include "iealm/cipher.hpp"

#include "iealm/errors.hpp"

namespace iealm {

namespace {

void check_family(const PermFamily& t, std::size_t mn) {
    for (const auto& plane : t) {
        if (plane.size() != mn || !is_bijection(plane))
            throw InvalidPermutation("bit-plane permutation is not a bijection");
    }
}

}  // namespace

std::vector<Nibble> permute_bits(const std::vector<Nibble>& nibbles,
                                 const PermFamily& t) {
    check_family(t, nibbles.size());
    std::vector<Nibble> out(nibbles.size(), 0);
    for (int k = 0; k < 4; ++k) {
        const auto& tk = t[k];
        for (std::size_t i = 0; i < nibbles.size(); ++i)
            out[i] |= static_cast<Nibble>(((nibbles[tk[i]] >> k) & 1u) << k);
    }
    return out;
}

std::vector<Nibble> inverse_permute_bits(const std::vector<Nibble>& nibbles,
                                         const PermFamily& t) {
    check_family(t, nibbles.size());
    std::vector<Nibble> out(nibbles.size(), 0);
    for (int k = 0; k < 4; ++k) {
        const auto& tk = t[k];
        for (std::size_t i = 0; i < nibbles.size(); ++i)
            out[tk[i]] |= static_cast<Nibble>(((nibbles[i] >> k) & 1u) << k);
    }
    return out;
}

CipherTrace encrypt_channel(const std::vector<Byte>& input, const Keystream& ks) {
    const std::size_t mn = input.size();
    if (ks.pixel_count() != mn)
        throw DimensionMismatch("encrypt_channel: keystream/channel length mismatch");

    CipherTrace tr;
    tr.input = input;
    tr.i_star.resize(mn);
    tr.i_xor.resize(mn);
    tr.l_ss.resize(mn);
    tr.h_ss.resize(mn);
    for (std::size_t i = 0; i < mn; ++i) {
        tr.i_star[i] = static_cast<Byte>(boxplus(input[i], ks.v[i], 8));
        tr.i_xor[i] = static_cast<Byte>(ks.w[i] ^ tr.i_star[i]);
        const auto [lo, hi] = spl(tr.i_xor[i]);
        tr.l_ss[i] = lo;
        tr.h_ss[i] = hi;
    }
    tr.l_tilde = permute_bits(tr.l_ss, ks.t1);
    tr.h_tilde = permute_bits(tr.h_ss, ks.t2);
    tr.l_prime.resize(mn);
    for (std::size_t i = 0; i < mn; ++i)
        tr.l_prime[i] = static_cast<Nibble>(ks.u[i] ^ tr.l_tilde[i] ^ tr.h_tilde[i]);
    tr.l_hat = permute_bits(tr.l_prime, ks.t3);
    tr.h_hat = permute_bits(tr.h_ss, ks.t4);
    tr.h_prime.resize(mn);
    tr.i_prime.resize(mn);
    tr.output.resize(mn);
    for (std::size_t i = 0; i < mn; ++i) {
        tr.h_prime[i] = static_cast<Nibble>(ks.u2[i] ^ tr.l_hat[i] ^ tr.h_hat[i]);
        tr.i_prime[i] = combine(tr.l_prime[i], tr.h_prime[i]);
        tr.output[i] = static_cast<Byte>(ks.w2[i] ^ boxplus(tr.i_prime[i], ks.v2[i], 8));
    }
    return tr;
}

std::vector<Byte> decrypt_channel(const std::vector<Byte>& cipher, const Keystream& ks) {
    const std::size_t mn = cipher.size();
    if (ks.pixel_count() != mn)
        throw DimensionMismatch("decrypt_channel: keystream/channel length mismatch");

    std::vector<Nibble> l_prime(mn), h_prime(mn);
    for (std::size_t i = 0; i < mn; ++i) {
        const Byte i_prime =
            static_cast<Byte>(boxminus(static_cast<Byte>(cipher[i] ^ ks.w2[i]), ks.v2[i], 8));
        const auto [lo, hi] = spl(i_prime);
        l_prime[i] = lo;
        h_prime[i] = hi;
    }
    const std::vector<Nibble> l_hat = permute_bits(l_prime, ks.t3);
    std::vector<Nibble> h_hat(mn);
    for (std::size_t i = 0; i < mn; ++i)
        h_hat[i] = static_cast<Nibble>(h_prime[i] ^ ks.u2[i] ^ l_hat[i]);
    const std::vector<Nibble> h_ss = inverse_permute_bits(h_hat, ks.t4);
    const std::vector<Nibble> h_tilde = permute_bits(h_ss, ks.t2);
    std::vector<Nibble> l_tilde(mn);
    for (std::size_t i = 0; i < mn; ++i)
        l_tilde[i] = static_cast<Nibble>(l_prime[i] ^ ks.u[i] ^ h_tilde[i]);
    const std::vector<Nibble> l_ss = inverse_permute_bits(l_tilde, ks.t1);

    std::vector<Byte> plain(mn);
    for (std::size_t i = 0; i < mn; ++i) {
        const Byte i_star = static_cast<Byte>(combine(l_ss[i], h_ss[i]) ^ ks.w[i]);
        plain[i] = static_cast<Byte>(boxminus(i_star, ks.v[i], 8));
    }
    return plain;
}

Image encrypt_rgb(const Image& img, const Keystream& ks) {
    img.validate();
    if (img.channels != 3)
        throw ContractViolation("encrypt_rgb: image must have 3 channels");
    Image out = img;
    for (int c = 0; c < 3; ++c)
        out.set_channel(c, encrypt_channel(img.channel(c), ks).output);
    return out;
}

Image decrypt_rgb(const Image& img, const Keystream& ks) {
    img.validate();
    if (img.channels != 3)
        throw ContractViolation("decrypt_rgb: image must have 3 channels");
    Image out = img;
    for (int c = 0; c < 3; ++c)
        out.set_channel(c, decrypt_channel(img.channel(c), ks));
    return out;
}

Image encrypt_rgb(const Image& img, double b, const ChannelSums& sums) {
    return encrypt_rgb(img, generate_keystream({b, sums}, img.pixel_count()));
}

Image encrypt_rgb(const Image& img, double b) {
    return encrypt_rgb(img, b, channel_sums(img));
}

Image decrypt_rgb(const Image& img, double b, const ChannelSums& sums) {
    return decrypt_rgb(img, generate_keystream({b, sums}, img.pixel_count()));
}

}  // namespace iealm
