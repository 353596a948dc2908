#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "iealm/bitops.hpp"
#include "iealm/keystream.hpp"

namespace iealm {

// 8-bit image, raster (row-major) order, channel-interleaved for RGB.
struct Image {
    int height = 0;    // M rows
    int width = 0;     // N columns
    int channels = 1;  // 1 or 3
    std::vector<Byte> pixels;

    static Image zeros(int height, int width, int channels);

    std::size_t pixel_count() const {
        return static_cast<std::size_t>(height) * static_cast<std::size_t>(width);
    }
    std::vector<Byte> channel(int c) const;
    void set_channel(int c, const std::vector<Byte>& data);
    bool same_dims(const Image& other) const {
        return height == other.height && width == other.width &&
               channels == other.channels;
    }
    void validate() const;
};

ChannelSums channel_sums(const Image& img);

// PPM (P6) / PGM (P5) binary, maxval 255; "IEAL" raw dump with u16 dims as a
// fallback. load_image sniffs the magic; save_image picks the format from the
// extension (.ppm/.pgm/anything else -> raw).
Image load_image(const std::string& path);
void save_image(const Image& img, const std::string& path);

Image decode_ppm(const std::vector<Byte>& bytes);
std::vector<Byte> encode_ppm(const Image& img);
Image decode_raw(const std::vector<Byte>& bytes);
std::vector<Byte> encode_raw(const Image& img);

}  // namespace iealm
