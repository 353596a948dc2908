#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "iealm/image.hpp"

// Key-space and key-distribution calculators, plus a per-channel mean
// statistic over an image corpus. Counts are exact big integers.

namespace iealm {

struct PrecisionSpec {
    unsigned bits;  // arithmetic precision L
};

struct ChannelInterval {
    double lo = 0.0, hi = 0.0;  // mean-pixel bounds, 0 <= lo < hi <= 256
};

// Number of distinct channel-sum triples: (255*M*N)^3, as a decimal string.
std::string key_count(unsigned m, unsigned n);

// 2^(2L) * (256*M*N)^3, as a decimal string.
std::string key_space_size(PrecisionSpec l, unsigned m, unsigned n);

// Compare two non-negative decimal strings: -1, 0, 1.
int compare_decimal(const std::string& a, const std::string& b);

// floor(log2(value)); exact flag set when value is a power of two.
std::pair<unsigned, bool> log2_decimal(const std::string& value);

struct SigmaCoverage {
    double probability;        // product of per-channel one-sigma masses
    double key_space_fraction; // product of interval widths / 256
};

SigmaCoverage sigma_coverage(const std::array<ChannelInterval, 3>& intervals);

struct CorpusReport {
    // one entry per image: mean pixel value per channel
    std::vector<std::vector<double>> means;
    double bin_width = 8.0;
    // histogram of per-image channel means, channel-major
    std::vector<std::vector<std::uint64_t>> histogram;
    std::vector<double> mean_of_means;

    std::string to_json() const;
};

CorpusReport corpus_means(const std::vector<Image>& images, double bin_width = 8.0);

}  // namespace iealm
