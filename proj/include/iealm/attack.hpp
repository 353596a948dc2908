#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "iealm/oracle.hpp"

// The six-stage chosen-plaintext attack. Against a frozen oracle it recovers
// an equivalent key: the four bit-plane permutation families, V with its MSB
// folded into the W'-side (Fact-1 equivalence, so v_eq = V mod 128), and a
// per-pixel codebook F mapping cipher bytes to the intermediate star-domain
// bytes. Stage order: T2, V_L, V_H, T1, T4, T3, codebook.

namespace iealm {

struct EquivalentKey {
    int height = 0, width = 0;
    PermFamily t1, t2, t3, t4;
    std::vector<Byte> v_eq;     // bit 7 clear on every element
    std::vector<Byte> codebook; // MN x 256; row i: cipher byte -> star byte

    std::size_t pixel_count() const { return v_eq.size(); }
    void save(const std::string& path) const;
    static EquivalentKey load(const std::string& path);
};

struct AttackReport {
    std::map<std::string, std::uint64_t> per_stage;
    std::uint64_t total = 0;
    double wall_seconds = 0.0;
    bool packing = true;

    std::string to_json() const;
};

struct AttackOptions {
    bool packing = true;        // ride three independent payloads per RGB query
    bool adaptive_v_low = false;  // bisection V_L search instead of the c-sweep
};

// Per-stage scratch for the differential terms the attack materializes: the
// low-nibble carries r_0/r_1 of a chosen pair, and the measured cipher-side
// carry corrections Phi (plane 0) / Psi (planes 2, 3) used by the T3 stage.
// Phi(i, 0) = Psi(i, 0) = 0 by construction (the baseline contributes no
// carry difference); the remaining inter-plane carries (theta, lambda, beta)
// are cancelled by the choice of queries and never computed. Rebuilt inside
// every stage, nothing is cached across stages.
struct DifferentialWorkspace {
    std::vector<Nibble> carry0, carry1;             // r_0(i), r_1(i)
    std::array<std::vector<Byte>, 3> calibration;   // Phi / Psi per attacked plane

    explicit DifferentialWorkspace(std::size_t mn)
        : carry0(mn, 0), carry1(mn, 0) {}
};

// The t-th (1-based) pattern sets bit `plane` of the chosen nibble at pixel i
// to floor(i / 2^(t-1)) mod 2, all other bits zero. Stacked over t = 1..n the
// patterns spell out each pixel index in binary.
std::vector<std::vector<Byte>> pattern_images(int plane, bool high_nibble,
                                              std::size_t pixel_count);

std::size_t pattern_count(std::size_t pixel_count);  // ceil(log2(MN))

class ChosenPlaintextAttack {
public:
    explicit ChosenPlaintextAttack(Oracle& oracle, AttackOptions opt = {});

    // All stages in order; returns the equivalent key. Stage failures
    // propagate with the stage name attached.
    EquivalentKey run();

    // Individual stages; each requires its predecessors.
    void recover_t2();
    void recover_v_low();
    void recover_v_high();
    void recover_t1();
    void recover_t4();
    void recover_t3();
    void build_codebook();

    const PermFamily& t1() const { return t1_; }
    const PermFamily& t2() const { return t2_; }
    const PermFamily& t3() const { return t3_; }
    const PermFamily& t4() const { return t4_; }
    const std::vector<Byte>& v_eq() const { return v_eq_; }
    EquivalentKey equivalent_key() const;
    AttackReport report() const;

private:
    using Channel = std::vector<Byte>;

    // Submits payload channels under a stage label, three per RGB query when
    // packing (short tail groups replicate the last payload); returns one
    // cipher channel per payload.
    std::vector<Channel> submit(const std::string& stage,
                                const std::vector<Channel>& payloads);
    Channel star_to_plain_image(const Channel& l_star1) const;  // H*_1 = 0
    void require(bool ok, const char* what) const;

    Oracle& oracle_;
    AttackOptions opt_;
    std::size_t mn_ = 0;
    std::size_t n_ = 0;  // pattern count
    std::map<std::string, std::uint64_t> queries_;
    double wall_seconds_ = 0.0;

    Channel zero_cipher_;       // cipher of the all-zero image (stage T2)
    Channel star_zero_cipher_;  // cipher of the I* = 0 image (stage T4)
    PermFamily t1_, t2_, t3_, t4_;
    std::vector<Nibble> v_low_;
    std::vector<Byte> v_eq_;
    std::vector<Byte> codebook_;
    bool have_t2_ = false, have_v_low_ = false, have_v_ = false;
    bool have_t1_ = false, have_t4_ = false, have_t3_ = false, have_f_ = false;
};

// Decrypt with a recovered key only (no oracle access).
std::vector<Byte> recover_plaintext_channel(const std::vector<Byte>& cipher,
                                            const EquivalentKey& eq);
Image recover_plaintext(const Image& cipher, const EquivalentKey& eq);

std::pair<EquivalentKey, AttackReport> run_attack(Oracle& oracle, bool packing = true);

}  // namespace iealm
