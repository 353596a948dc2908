#include "iealm/analysis.hpp"

#include <gmpxx.h>

#include <cmath>

#include "json.hpp"

namespace iealm {

namespace {
// one-sigma mass of the normal distribution, kept as a named constant
constexpr double kOneSigmaMass = 0.6827;
}

std::string key_count(unsigned m, unsigned n) {
    if (m < 1 || n < 1) throw ContractViolation("key_count: dimensions must be >= 1");
    mpz_class base = 255;
    base *= m;
    base *= n;
    mpz_class count;
    mpz_pow_ui(count.get_mpz_t(), base.get_mpz_t(), 3);
    return count.get_str();
}

std::string key_space_size(PrecisionSpec l, unsigned m, unsigned n) {
    mpz_class base = 256;
    base *= m;
    base *= n;
    mpz_class cube;
    mpz_pow_ui(cube.get_mpz_t(), base.get_mpz_t(), 3);
    mpz_class pw;
    mpz_ui_pow_ui(pw.get_mpz_t(), 2, 2UL * l.bits);
    mpz_class total = pw * cube;
    return total.get_str();
}

int compare_decimal(const std::string& a, const std::string& b) {
    const mpz_class x(a), y(b);
    return cmp(x, y) < 0 ? -1 : (cmp(x, y) > 0 ? 1 : 0);
}

std::pair<unsigned, bool> log2_decimal(const std::string& value) {
    const mpz_class x(value);
    if (x <= 0) throw ContractViolation("log2_decimal: value must be positive");
    const auto bits = mpz_sizeinbase(x.get_mpz_t(), 2);
    const bool exact = mpz_scan1(x.get_mpz_t(), 0) == bits - 1;
    return {static_cast<unsigned>(bits - 1), exact};
}

SigmaCoverage sigma_coverage(const std::array<ChannelInterval, 3>& intervals) {
    SigmaCoverage out{1.0, 1.0};
    for (const auto& iv : intervals) {
        if (!(iv.lo >= 0.0 && iv.lo < iv.hi && iv.hi <= 256.0))
            throw ContractViolation("sigma_coverage: need 0 <= lo < hi <= 256");
        out.probability *= kOneSigmaMass;
        out.key_space_fraction *= (iv.hi - iv.lo) / 256.0;
    }
    return out;
}

CorpusReport corpus_means(const std::vector<Image>& images, double bin_width) {
    if (images.empty()) throw EmptyCorpus("corpus_means: no images supplied");
    if (!(bin_width > 0.0)) throw ContractViolation("corpus_means: bin width must be > 0");

    CorpusReport report;
    report.bin_width = bin_width;
    std::size_t max_channels = 0;
    for (const Image& img : images) {
        img.validate();
        std::vector<double> mean(img.channels, 0.0);
        for (std::size_t i = 0; i < img.pixel_count(); ++i)
            for (int c = 0; c < img.channels; ++c)
                mean[c] += img.pixels[i * img.channels + c];
        for (double& m : mean) m /= static_cast<double>(img.pixel_count());
        max_channels = std::max<std::size_t>(max_channels, img.channels);
        report.means.push_back(std::move(mean));
    }

    const std::size_t bins =
        static_cast<std::size_t>(std::ceil(256.0 / bin_width));
    report.histogram.assign(max_channels, std::vector<std::uint64_t>(bins, 0));
    report.mean_of_means.assign(max_channels, 0.0);
    std::vector<std::size_t> counts(max_channels, 0);
    for (const auto& mean : report.means)
        for (std::size_t c = 0; c < mean.size(); ++c) {
            const auto bin = std::min<std::size_t>(
                bins - 1, static_cast<std::size_t>(mean[c] / bin_width));
            ++report.histogram[c][bin];
            report.mean_of_means[c] += mean[c];
            ++counts[c];
        }
    for (std::size_t c = 0; c < max_channels; ++c)
        if (counts[c] > 0) report.mean_of_means[c] /= static_cast<double>(counts[c]);
    return report;
}

std::string CorpusReport::to_json() const {
    nlohmann::json j;
    j["means"] = means;
    j["bin_width"] = bin_width;
    j["histogram"] = histogram;
    j["mean_of_means"] = mean_of_means;
    return j.dump(2) + "\n";
}

}  // namespace iealm
