#include "iealm/attack.hpp"

#include <chrono>
#include <cstring>
#include <fstream>

#include "json.hpp"

namespace iealm {

std::size_t pattern_count(std::size_t pixel_count) {
    if (pixel_count < 2)
        throw ContractViolation("pattern_count: need at least 2 pixels");
    std::size_t n = 0;
    while ((std::size_t{1} << n) < pixel_count) ++n;
    return n;
}

std::vector<std::vector<Byte>> pattern_images(int plane, bool high_nibble,
                                              std::size_t pixel_count) {
    if (plane < 0 || plane > 3)
        throw ContractViolation("pattern_images: plane must be in [0,3]");
    const std::size_t n = pattern_count(pixel_count);
    std::vector<std::vector<Byte>> out(n);
    for (std::size_t t = 1; t <= n; ++t) {
        auto& img = out[t - 1];
        img.resize(pixel_count);
        for (std::size_t i = 0; i < pixel_count; ++i) {
            const Byte b = static_cast<Byte>(((i >> (t - 1)) & 1u) << plane);
            img[i] = high_nibble ? static_cast<Byte>(b << 4) : b;
        }
    }
    return out;
}

namespace {

constexpr int kPlanes[3] = {0, 2, 3};  // plane 1 duplicates plane 0

// acc[i] = sum_t bits[t-1][i] << (t-1) must be a bijection on [0, MN).
Permutation decode_permutation(const std::vector<std::vector<Byte>>& bits,
                               std::size_t mn, const std::string& what) {
    Permutation perm(mn, 0);
    for (std::size_t t = 0; t < bits.size(); ++t)
        for (std::size_t i = 0; i < mn; ++i)
            perm[i] |= static_cast<std::uint32_t>(bits[t][i]) << t;
    std::vector<bool> seen(mn, false);
    for (const std::uint32_t v : perm) {
        if (v >= mn || seen[v])
            throw NonBijectiveRecovery(
                what + ": decoded indices are not a permutation; the oracle's "
                       "controlling sequences changed between queries");
        seen[v] = true;
    }
    return perm;
}

inline Byte low_diff(Byte a, Byte b, int k) {
    return static_cast<Byte>((((a ^ b) & 0x0F) >> k) & 1u);
}

inline Byte high_diff(Byte a, Byte b, int k) {
    return static_cast<Byte>((((a ^ b) >> 4) >> k) & 1u);
}

}  // namespace

ChosenPlaintextAttack::ChosenPlaintextAttack(Oracle& oracle, AttackOptions opt)
    : oracle_(oracle), opt_(opt) {
    mn_ = static_cast<std::size_t>(oracle_.height()) * oracle_.width();
    if (mn_ < 2) throw ContractViolation("attack: oracle image too small");
    n_ = pattern_count(mn_);
}

void ChosenPlaintextAttack::require(bool ok, const char* what) const {
    if (!ok) throw ContractViolation(std::string("attack stage order: ") + what);
}

std::vector<ChosenPlaintextAttack::Channel> ChosenPlaintextAttack::submit(
    const std::string& stage, const std::vector<Channel>& payloads) {
    std::vector<Channel> out;
    out.reserve(payloads.size());
    Image img = Image::zeros(oracle_.height(), oracle_.width(), 3);
    if (opt_.packing) {
        for (std::size_t g = 0; g < payloads.size(); g += 3) {
            for (int c = 0; c < 3; ++c) {
                const std::size_t j = std::min(g + c, payloads.size() - 1);
                img.set_channel(c, payloads[j]);
            }
            const Image enc = oracle_.query(img, stage);
            ++queries_[stage];
            for (int c = 0; c < 3 && g + c < payloads.size(); ++c)
                out.push_back(enc.channel(c));
        }
    } else {
        for (const Channel& p : payloads) {
            for (int c = 0; c < 3; ++c) img.set_channel(c, p);
            const Image enc = oracle_.query(img, stage);
            ++queries_[stage];
            out.push_back(enc.channel(0));
        }
    }
    return out;
}

void ChosenPlaintextAttack::recover_t2() {
    const std::string stage = "stage_T2";
    zero_cipher_ = submit(stage, {Channel(mn_, 0)})[0];

    // pattern step t carries planes (0,2,3); differential low nibble of the
    // cipher reads the pattern bit at position T2_k(i)
    std::vector<std::vector<std::vector<Byte>>> bits(
        3, std::vector<std::vector<Byte>>(n_, std::vector<Byte>(mn_)));
    std::vector<std::vector<std::vector<Byte>>> pats(3);
    for (int p = 0; p < 3; ++p)
        pats[p] = pattern_images(kPlanes[p], /*high_nibble=*/true, mn_);
    for (std::size_t t = 0; t < n_; ++t) {
        const auto ciphers = submit(stage, {pats[0][t], pats[1][t], pats[2][t]});
        for (int p = 0; p < 3; ++p)
            for (std::size_t i = 0; i < mn_; ++i)
                bits[p][t][i] = low_diff(zero_cipher_[i], ciphers[p][i], kPlanes[p]);
    }
    for (int p = 0; p < 3; ++p)
        t2_[kPlanes[p]] = decode_permutation(bits[p], mn_, "recover_T2 plane " +
                                                              std::to_string(kPlanes[p]));
    t2_[1] = t2_[0];
    have_t2_ = true;
}

void ChosenPlaintextAttack::recover_v_low() {
    require(have_t2_, "recover_v_low needs recover_t2");
    const std::string stage = "stage_V";
    v_low_.assign(mn_, 0);

    if (!opt_.adaptive_v_low) {
        // constant images L = c for c = 1..15; the first c whose low-nibble
        // carry fires reveals V_L(T_{2,0}(i)) = 16 - c
        std::vector<Channel> payloads;
        for (int c = 1; c <= 15; ++c) payloads.emplace_back(mn_, static_cast<Byte>(c));
        const auto ciphers = submit(stage, payloads);
        std::vector<bool> resolved(mn_, false);
        for (int c = 1; c <= 15; ++c) {
            const Channel& cc = ciphers[c - 1];
            for (std::size_t i = 0; i < mn_; ++i) {
                const unsigned carry = ((zero_cipher_[i] ^ cc[i]) & 1u) ^ (c & 1u);
                const std::uint32_t j = t2_[0][i];
                if (carry == 1 && !resolved[j]) {
                    v_low_[j] = static_cast<Nibble>(16 - c);
                    resolved[j] = true;
                }
            }
        }
    } else {
        // bisection on the carry threshold; thresholds of one round share the
        // parity of c, so the unknown T_{1,0} parity term cancels uniformly
        const Permutation inv_t20 = invert_permutation(t2_[0]);
        std::vector<Nibble> lo(mn_, 0), hi(mn_, 15);
        const int rounds[4][8] = {{8, -1}, {4, 12, -1}, {2, 6, 10, 14, -1},
                                  {1, 3, 5, 7, 9, 11, 13, 15}};
        for (int r = 0; r < 4; ++r) {
            Channel payload(mn_);
            std::vector<Nibble> tau(mn_);
            for (std::size_t j = 0; j < mn_; ++j) {
                // smallest threshold in this round's set that bisects [lo, hi]
                Nibble pick = 0;
                for (int q = 0; q < 8 && rounds[r][q] > 0; ++q) {
                    const Nibble th = static_cast<Nibble>(rounds[r][q]);
                    if (th > lo[j] && th <= hi[j]) { pick = th; break; }
                }
                tau[j] = pick;
                payload[j] = static_cast<Byte>(pick ? 16 - pick : (r == 3 ? 1 : 2));
            }
            const Channel cc = submit(stage, {payload})[0];
            const unsigned parity = (r == 3) ? 1u : 0u;  // c parity per round
            for (std::size_t j = 0; j < mn_; ++j) {
                if (tau[j] == 0) continue;
                const std::size_t i = inv_t20[j];
                const unsigned carry = ((zero_cipher_[i] ^ cc[i]) & 1u) ^ parity;
                if (carry)
                    lo[j] = tau[j];
                else
                    hi[j] = static_cast<Nibble>(tau[j] - 1);
            }
        }
        for (std::size_t j = 0; j < mn_; ++j) {
            if (lo[j] != hi[j])
                throw NonBijectiveRecovery("recover_v_low: bisection did not converge");
            v_low_[j] = lo[j];
        }
    }
    have_v_low_ = true;
}

void ChosenPlaintextAttack::recover_v_high() {
    require(have_v_low_, "recover_v_high needs recover_v_low");
    const std::string stage = "stage_V";

    // Choose L*_1 = V_L xor 2^k and H_1 = 2^k [-] r_1: then H*_{0^1} = V_H xor
    // (V_H [+] 2^k) and the cipher's low plane k+1 reads V_{H,k} at T_{2,k+1}.
    // The baseline is the all-zero image, so r_0 stays zero.
    DifferentialWorkspace ws(mn_);
    std::vector<Channel> payloads;
    for (int k = 0; k < 3; ++k) {
        Channel img(mn_);
        for (std::size_t i = 0; i < mn_; ++i) {
            const Nibble l_star = static_cast<Nibble>(v_low_[i] ^ (1u << k));
            const Nibble l1 = static_cast<Nibble>(boxminus(l_star, v_low_[i], 4));
            ws.carry1[i] = static_cast<Nibble>(carry_low_to_high(l1, v_low_[i]));
            const Nibble h1 = static_cast<Nibble>(boxminus(1u << k, ws.carry1[i], 4));
            img[i] = combine(l1, h1);
        }
        payloads.push_back(std::move(img));
    }
    const auto ciphers = submit(stage, payloads);

    std::vector<Nibble> v_high(mn_, 0);
    for (int k = 0; k < 3; ++k)
        for (std::size_t i = 0; i < mn_; ++i) {
            const Byte bit = low_diff(zero_cipher_[i], ciphers[k][i], k + 1);
            v_high[t2_[k + 1][i]] |= static_cast<Nibble>(bit << k);
        }
    v_eq_.resize(mn_);
    for (std::size_t i = 0; i < mn_; ++i) v_eq_[i] = combine(v_low_[i], v_high[i]);
    have_v_ = true;
}

void ChosenPlaintextAttack::recover_t1() {
    require(have_v_, "recover_t1 needs recover_v_high");
    const std::string stage = "stage_T1";

    // Pair per step: baseline (L_0 = 0, H_0 = r_1) vs pattern (L_1, H_1 = r_0
    // = 0); the chosen high nibbles cancel H* in the differential.
    DifferentialWorkspace ws(mn_);
    std::vector<std::vector<std::vector<Byte>>> bits(
        3, std::vector<std::vector<Byte>>(n_, std::vector<Byte>(mn_)));
    std::vector<std::vector<std::vector<Byte>>> pats(3);
    for (int p = 0; p < 3; ++p)
        pats[p] = pattern_images(kPlanes[p], /*high_nibble=*/false, mn_);
    for (std::size_t t = 0; t < n_; ++t) {
        std::vector<Channel> baselines(3), patterns(3);
        for (int p = 0; p < 3; ++p) {
            const Channel& l1 = pats[p][t];
            Channel base(mn_);
            for (std::size_t i = 0; i < mn_; ++i) {
                ws.carry1[i] = static_cast<Nibble>(carry_low_to_high(l1[i], v_low_[i]));
                base[i] = static_cast<Byte>(ws.carry1[i] << 4);
            }
            baselines[p] = std::move(base);
            patterns[p] = l1;
        }
        const auto cb = submit(stage, baselines);
        const auto cp = submit(stage, patterns);
        for (int p = 0; p < 3; ++p)
            for (std::size_t i = 0; i < mn_; ++i)
                bits[p][t][i] = low_diff(cb[p][i], cp[p][i], kPlanes[p]);
    }
    for (int p = 0; p < 3; ++p)
        t1_[kPlanes[p]] = decode_permutation(bits[p], mn_, "recover_T1 plane " +
                                                              std::to_string(kPlanes[p]));
    t1_[1] = t1_[0];
    have_t1_ = true;
}

void ChosenPlaintextAttack::recover_t4() {
    require(have_t1_, "recover_t4 needs recover_t1");
    const std::string stage = "stage_T4";

    // With V known the attack chooses I* directly: I = I* [-] V_eq.
    Channel star_zero(mn_);
    for (std::size_t i = 0; i < mn_; ++i)
        star_zero[i] = static_cast<Byte>(boxminus(0, v_eq_[i], 8));
    star_zero_cipher_ = submit(stage, {star_zero})[0];

    std::array<Permutation, 4> inv_t1;
    for (int p = 0; p < 3; ++p) inv_t1[kPlanes[p]] = invert_permutation(t1_[kPlanes[p]]);

    std::vector<std::vector<std::vector<Byte>>> bits(
        3, std::vector<std::vector<Byte>>(n_, std::vector<Byte>(mn_)));
    for (std::size_t t = 1; t <= n_; ++t) {
        std::vector<Channel> payloads(3);
        for (int p = 0; p < 3; ++p) {
            const int k = kPlanes[p];
            // H*_1 carries the pattern; L*_1 is chosen so the T1-permuted L*
            // equals the T2-permuted H*, cancelling L-star in the differential
            Channel img(mn_);
            std::vector<Nibble> h_star(mn_);
            for (std::size_t i = 0; i < mn_; ++i)
                h_star[i] = static_cast<Nibble>(((i >> (t - 1)) & 1u) << k);
            for (std::size_t j = 0; j < mn_; ++j) {
                const Nibble l_star = static_cast<Nibble>(
                    ((h_star[t2_[k][inv_t1[k][j]]] >> k) & 1u) << k);
                img[j] = static_cast<Byte>(
                    boxminus(combine(l_star, h_star[j]), v_eq_[j], 8));
            }
            payloads[p] = std::move(img);
        }
        const auto ciphers = submit(stage, payloads);
        for (int p = 0; p < 3; ++p)
            for (std::size_t i = 0; i < mn_; ++i)
                bits[p][t - 1][i] = high_diff(star_zero_cipher_[i], ciphers[p][i], kPlanes[p]);
    }
    for (int p = 0; p < 3; ++p)
        t4_[kPlanes[p]] = decode_permutation(bits[p], mn_, "recover_T4 plane " +
                                                              std::to_string(kPlanes[p]));
    t4_[1] = t4_[0];
    have_t4_ = true;
}

ChosenPlaintextAttack::Channel ChosenPlaintextAttack::star_to_plain_image(
    const Channel& l_star1) const {
    // H*_1 = 0 and the desired T1-permuted image equals l_star1, so
    // L*_1(j) takes its bits from l_star1 at T1_k^{-1}(j).
    Channel img(mn_);
    std::array<Permutation, 4> inv_t1;
    for (int p = 0; p < 3; ++p) inv_t1[kPlanes[p]] = invert_permutation(t1_[kPlanes[p]]);
    inv_t1[1] = invert_permutation(t1_[1]);
    for (std::size_t j = 0; j < mn_; ++j) {
        Nibble l_star = 0;
        for (int k = 0; k < 4; ++k)
            l_star |= static_cast<Nibble>(((l_star1[inv_t1[k][j]] >> k) & 1u) << k);
        img[j] = static_cast<Byte>(boxminus(l_star, v_eq_[j], 8));
    }
    return img;
}

void ChosenPlaintextAttack::recover_t3() {
    require(have_t4_, "recover_t3 needs recover_t4 (shared I*=0 baseline)");
    const std::string stage = "stage_T3";

    // Carries through the final modular addition do not cancel here; they
    // depend only on (i, L-star value) and are measured by one calibration
    // query per plane (Phi for plane 0, Psi for planes 2 and 3).
    DifferentialWorkspace ws(mn_);
    std::vector<Channel> calibrations;
    for (int p = 0; p < 3; ++p)
        calibrations.push_back(star_to_plain_image(
            Channel(mn_, static_cast<Byte>(1u << kPlanes[p]))));
    const auto cal_ciphers = submit(stage, calibrations);
    for (int p = 0; p < 3; ++p) {
        ws.calibration[p].resize(mn_);
        for (std::size_t i = 0; i < mn_; ++i)
            ws.calibration[p][i] = static_cast<Byte>(
                high_diff(star_zero_cipher_[i], cal_ciphers[p][i], kPlanes[p]) ^ 1u);
    }

    std::vector<std::vector<std::vector<Byte>>> bits(
        3, std::vector<std::vector<Byte>>(n_, std::vector<Byte>(mn_)));
    for (std::size_t t = 1; t <= n_; ++t) {
        std::vector<Channel> payloads(3);
        std::vector<Channel> l_stars(3);
        for (int p = 0; p < 3; ++p) {
            Channel l_star(mn_);
            for (std::size_t i = 0; i < mn_; ++i)
                l_star[i] = static_cast<Byte>(((i >> (t - 1)) & 1u) << kPlanes[p]);
            payloads[p] = star_to_plain_image(l_star);
            l_stars[p] = std::move(l_star);
        }
        const auto ciphers = submit(stage, payloads);
        for (int p = 0; p < 3; ++p)
            for (std::size_t i = 0; i < mn_; ++i) {
                const Byte raw = high_diff(star_zero_cipher_[i], ciphers[p][i], kPlanes[p]);
                bits[p][t - 1][i] =
                    static_cast<Byte>(raw ^ (l_stars[p][i] ? ws.calibration[p][i] : 0));
            }
    }
    for (int p = 0; p < 3; ++p)
        t3_[kPlanes[p]] = decode_permutation(bits[p], mn_, "recover_T3 plane " +
                                                              std::to_string(kPlanes[p]));
    t3_[1] = t3_[0];
    have_t3_ = true;
}

void ChosenPlaintextAttack::build_codebook() {
    require(have_t3_, "build_codebook needs recover_t3");
    const std::string stage = "stage_codebook";

    std::vector<Channel> payloads;
    payloads.reserve(256);
    for (int c = 0; c < 256; ++c) {
        // invert the known permutation pipeline so the star-domain value is
        // the constant c at every pixel
        const auto [lo, hi] = spl(static_cast<Byte>(c));
        std::vector<Nibble> l_star(mn_, lo), h_star(mn_, hi);
        const std::vector<Nibble> l_hat = permute_bits(l_star, t3_);
        std::vector<Nibble> h_hat(mn_);
        for (std::size_t i = 0; i < mn_; ++i)
            h_hat[i] = static_cast<Nibble>(h_star[i] ^ l_hat[i]);
        const std::vector<Nibble> h = inverse_permute_bits(h_hat, t4_);
        const std::vector<Nibble> h_tilde = permute_bits(h, t2_);
        std::vector<Nibble> l_tilde(mn_);
        for (std::size_t i = 0; i < mn_; ++i)
            l_tilde[i] = static_cast<Nibble>(l_star[i] ^ h_tilde[i]);
        const std::vector<Nibble> l = inverse_permute_bits(l_tilde, t1_);
        Channel img(mn_);
        for (std::size_t i = 0; i < mn_; ++i)
            img[i] = static_cast<Byte>(boxminus(combine(l[i], h[i]), v_eq_[i], 8));
        payloads.push_back(std::move(img));
    }
    const auto ciphers = submit(stage, payloads);

    codebook_.assign(mn_ * 256, 0);
    std::vector<bool> seen(mn_ * 256, false);
    for (int c = 0; c < 256; ++c) {
        const Channel& cc = ciphers[c];
        for (std::size_t i = 0; i < mn_; ++i) {
            const std::size_t slot = i * 256 + cc[i];
            if (seen[slot])
                throw CodebookInconsistent(
                    "build_codebook: pixel " + std::to_string(i) +
                    " maps two constants to cipher byte " + std::to_string(cc[i]));
            seen[slot] = true;
            codebook_[slot] = static_cast<Byte>(c);
        }
    }
    // 256 distinct constants marked 256 distinct slots per pixel, so every
    // row is fully populated and bijective here.
    have_f_ = true;
}

EquivalentKey ChosenPlaintextAttack::run() {
    const auto t0 = std::chrono::steady_clock::now();
    struct StageCall {
        const char* name;
        void (ChosenPlaintextAttack::*fn)();
    };
    const StageCall stages[] = {
        {"stage_T2", &ChosenPlaintextAttack::recover_t2},
        {"stage_V", &ChosenPlaintextAttack::recover_v_low},
        {"stage_V", &ChosenPlaintextAttack::recover_v_high},
        {"stage_T1", &ChosenPlaintextAttack::recover_t1},
        {"stage_T4", &ChosenPlaintextAttack::recover_t4},
        {"stage_T3", &ChosenPlaintextAttack::recover_t3},
        {"stage_codebook", &ChosenPlaintextAttack::build_codebook},
    };
    for (const auto& s : stages) {
        try {
            (this->*s.fn)();
        } catch (const NonBijectiveRecovery& e) {
            throw NonBijectiveRecovery(std::string(e.what()) + " [" + s.name +
                                       ", after " + std::to_string(report().total) +
                                       " queries]");
        } catch (const std::exception& e) {
            throw std::runtime_error(std::string(s.name) + " failed after " +
                                     std::to_string(report().total) +
                                     " queries: " + e.what());
        }
    }
    wall_seconds_ = std::chrono::duration<double>(
                        std::chrono::steady_clock::now() - t0).count();
    return equivalent_key();
}

EquivalentKey ChosenPlaintextAttack::equivalent_key() const {
    require(have_t3_, "equivalent_key needs all permutation stages");
    EquivalentKey eq;
    eq.height = oracle_.height();
    eq.width = oracle_.width();
    eq.t1 = t1_;
    eq.t2 = t2_;
    eq.t3 = t3_;
    eq.t4 = t4_;
    eq.v_eq = v_eq_;
    eq.codebook = codebook_;
    return eq;
}

AttackReport ChosenPlaintextAttack::report() const {
    AttackReport r;
    r.per_stage = queries_;
    for (const auto& [_, v] : queries_) r.total += v;
    r.wall_seconds = wall_seconds_;
    r.packing = opt_.packing;
    return r;
}

std::string AttackReport::to_json() const {
    nlohmann::json j;
    j["per_stage"] = per_stage;
    j["total"] = total;
    j["wall_seconds"] = wall_seconds;
    j["packing"] = packing;
    return j.dump(2) + "\n";
}

// ---- plaintext recovery -------------------------------------------------------

std::vector<Byte> recover_plaintext_channel(const std::vector<Byte>& cipher,
                                            const EquivalentKey& eq) {
    const std::size_t mn = eq.pixel_count();
    if (cipher.size() != mn)
        throw DimensionMismatch("recover_plaintext: channel length mismatch");
    if (eq.codebook.size() != mn * 256)
        throw ContractViolation("recover_plaintext: incomplete codebook");
    std::vector<Nibble> l_star(mn), h_star(mn);
    for (std::size_t i = 0; i < mn; ++i) {
        const Byte star = eq.codebook[i * 256 + cipher[i]];
        const auto [lo, hi] = spl(star);
        l_star[i] = lo;
        h_star[i] = hi;
    }
    const std::vector<Nibble> l_hat = permute_bits(l_star, eq.t3);
    std::vector<Nibble> h_hat(mn);
    for (std::size_t i = 0; i < mn; ++i)
        h_hat[i] = static_cast<Nibble>(h_star[i] ^ l_hat[i]);
    const std::vector<Nibble> h = inverse_permute_bits(h_hat, eq.t4);
    const std::vector<Nibble> h_tilde = permute_bits(h, eq.t2);
    std::vector<Nibble> l_tilde(mn);
    for (std::size_t i = 0; i < mn; ++i)
        l_tilde[i] = static_cast<Nibble>(l_star[i] ^ h_tilde[i]);
    const std::vector<Nibble> l = inverse_permute_bits(l_tilde, eq.t1);
    std::vector<Byte> plain(mn);
    for (std::size_t i = 0; i < mn; ++i)
        plain[i] = static_cast<Byte>(boxminus(combine(l[i], h[i]), eq.v_eq[i], 8));
    return plain;
}

Image recover_plaintext(const Image& cipher, const EquivalentKey& eq) {
    cipher.validate();
    if (cipher.height != eq.height || cipher.width != eq.width)
        throw DimensionMismatch("recover_plaintext: image dims do not match key");
    Image out = cipher;
    for (int c = 0; c < cipher.channels; ++c)
        out.set_channel(c, recover_plaintext_channel(cipher.channel(c), eq));
    return out;
}

std::pair<EquivalentKey, AttackReport> run_attack(Oracle& oracle, bool packing) {
    AttackOptions opt;
    opt.packing = packing;
    ChosenPlaintextAttack attack(oracle, opt);
    EquivalentKey eq = attack.run();
    return {std::move(eq), attack.report()};
}

// ---- equivalent key file format ------------------------------------------------
// "IEQK" | u32 M | u32 N | 16 permutations (T1..T4, 4 planes each) as u32 LE |
// v_eq (MN bytes) | codebook (MN*256 bytes)

namespace {

void put_u32(std::vector<Byte>& out, std::uint32_t v) {
    out.push_back(static_cast<Byte>(v & 0xFF));
    out.push_back(static_cast<Byte>((v >> 8) & 0xFF));
    out.push_back(static_cast<Byte>((v >> 16) & 0xFF));
    out.push_back(static_cast<Byte>((v >> 24) & 0xFF));
}

std::uint32_t get_u32(const std::vector<Byte>& in, std::size_t& pos) {
    if (pos + 4 > in.size()) throw IoError("equivalent key file truncated");
    const std::uint32_t v = in[pos] | (in[pos + 1] << 8) | (in[pos + 2] << 16) |
                            (static_cast<std::uint32_t>(in[pos + 3]) << 24);
    pos += 4;
    return v;
}

}  // namespace

void EquivalentKey::save(const std::string& path) const {
    std::vector<Byte> out{'I', 'E', 'Q', 'K'};
    put_u32(out, static_cast<std::uint32_t>(height));
    put_u32(out, static_cast<std::uint32_t>(width));
    for (const PermFamily* fam : {&t1, &t2, &t3, &t4})
        for (const Permutation& p : *fam)
            for (std::uint32_t v : p) put_u32(out, v);
    out.insert(out.end(), v_eq.begin(), v_eq.end());
    out.insert(out.end(), codebook.begin(), codebook.end());
    std::ofstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot write " + path);
    f.write(reinterpret_cast<const char*>(out.data()),
            static_cast<std::streamsize>(out.size()));
    if (!f) throw IoError("short write to " + path);
}

EquivalentKey EquivalentKey::load(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open " + path);
    std::vector<Byte> in{std::istreambuf_iterator<char>(f),
                         std::istreambuf_iterator<char>()};
    if (in.size() < 12 || std::memcmp(in.data(), "IEQK", 4) != 0)
        throw IoError(path + ": not an equivalent-key file");
    std::size_t pos = 4;
    EquivalentKey eq;
    eq.height = static_cast<int>(get_u32(in, pos));
    eq.width = static_cast<int>(get_u32(in, pos));
    const std::size_t mn = static_cast<std::size_t>(eq.height) * eq.width;
    for (PermFamily* fam : {&eq.t1, &eq.t2, &eq.t3, &eq.t4})
        for (Permutation& p : *fam) {
            p.resize(mn);
            for (std::size_t i = 0; i < mn; ++i) p[i] = get_u32(in, pos);
            if (!is_bijection(p)) throw IoError(path + ": corrupt permutation");
        }
    if (in.size() - pos != mn + mn * 256)
        throw IoError(path + ": truncated key material");
    eq.v_eq.assign(in.begin() + pos, in.begin() + pos + mn);
    pos += mn;
    eq.codebook.assign(in.begin() + pos, in.end());
    return eq;
}

}  // namespace iealm
