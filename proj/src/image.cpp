#include "iealm/image.hpp"

#include <algorithm>
#include <cctype>
#include <cstring>
#include <fstream>

#include "iealm/errors.hpp"

namespace iealm {

Image Image::zeros(int height, int width, int channels) {
    Image img;
    img.height = height;
    img.width = width;
    img.channels = channels;
    img.pixels.assign(static_cast<std::size_t>(height) * width * channels, 0);
    img.validate();
    return img;
}

void Image::validate() const {
    if (channels != 1 && channels != 3)
        throw ContractViolation("Image: channels must be 1 or 3");
    if (height < 1 || width < 1 || pixel_count() < 2)
        throw ContractViolation("Image: need at least 2 pixels");
    if (pixels.size() != pixel_count() * channels)
        throw ContractViolation("Image: pixel buffer size mismatch");
}

std::vector<Byte> Image::channel(int c) const {
    if (c < 0 || c >= channels)
        throw ContractViolation("Image::channel: index out of range");
    std::vector<Byte> out(pixel_count());
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i] = pixels[i * channels + c];
    return out;
}

void Image::set_channel(int c, const std::vector<Byte>& data) {
    if (c < 0 || c >= channels)
        throw ContractViolation("Image::set_channel: index out of range");
    if (data.size() != pixel_count())
        throw ContractViolation("Image::set_channel: length mismatch");
    for (std::size_t i = 0; i < data.size(); ++i)
        pixels[i * channels + c] = data[i];
}

ChannelSums channel_sums(const Image& img) {
    ChannelSums s;
    if (img.channels == 1) {
        for (Byte b : img.pixels) s.x_r += b;
        s.y_g = s.z_b = s.x_r;
        return s;
    }
    for (std::size_t i = 0; i < img.pixel_count(); ++i) {
        s.x_r += img.pixels[3 * i];
        s.y_g += img.pixels[3 * i + 1];
        s.z_b += img.pixels[3 * i + 2];
    }
    return s;
}

namespace {

// Skips whitespace and '#' comment lines, then parses one decimal token.
int parse_pnm_int(const std::vector<Byte>& bytes, std::size_t& pos) {
    while (pos < bytes.size()) {
        if (std::isspace(bytes[pos])) {
            ++pos;
        } else if (bytes[pos] == '#') {
            while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
        } else {
            break;
        }
    }
    int value = 0;
    bool any = false;
    while (pos < bytes.size() && std::isdigit(bytes[pos])) {
        value = value * 10 + (bytes[pos] - '0');
        ++pos;
        any = true;
    }
    if (!any) throw IoError("PNM header: expected integer");
    return value;
}

}  // namespace

Image decode_ppm(const std::vector<Byte>& bytes) {
    if (bytes.size() < 2 || bytes[0] != 'P' || (bytes[1] != '5' && bytes[1] != '6'))
        throw IoError("not a binary PGM/PPM file");
    Image img;
    img.channels = (bytes[1] == '6') ? 3 : 1;
    std::size_t pos = 2;
    img.width = parse_pnm_int(bytes, pos);
    img.height = parse_pnm_int(bytes, pos);
    const int maxval = parse_pnm_int(bytes, pos);
    if (maxval != 255) throw IoError("PNM: only maxval 255 supported");
    ++pos;  // single whitespace after maxval
    const std::size_t need =
        static_cast<std::size_t>(img.width) * img.height * img.channels;
    if (bytes.size() - pos < need) throw IoError("PNM: truncated pixel data");
    img.pixels.assign(bytes.begin() + pos, bytes.begin() + pos + need);
    img.validate();
    return img;
}

std::vector<Byte> encode_ppm(const Image& img) {
    img.validate();
    std::string header = (img.channels == 3 ? "P6\n" : "P5\n");
    header += std::to_string(img.width) + " " + std::to_string(img.height) + "\n255\n";
    std::vector<Byte> out(header.begin(), header.end());
    out.insert(out.end(), img.pixels.begin(), img.pixels.end());
    return out;
}

Image decode_raw(const std::vector<Byte>& bytes) {
    if (bytes.size() < 8 || std::memcmp(bytes.data(), "IEAL", 4) != 0)
        throw IoError("raw image: bad magic");
    Image img;
    img.height = bytes[4] | (bytes[5] << 8);
    img.width = bytes[6] | (bytes[7] << 8);
    const std::size_t body = bytes.size() - 8;
    const std::size_t mn = static_cast<std::size_t>(img.height) * img.width;
    if (mn == 0 || body % mn != 0) throw IoError("raw image: size mismatch");
    img.channels = static_cast<int>(body / mn);
    img.pixels.assign(bytes.begin() + 8, bytes.end());
    img.validate();
    return img;
}

std::vector<Byte> encode_raw(const Image& img) {
    img.validate();
    if (img.height > 0xFFFF || img.width > 0xFFFF)
        throw IoError("raw image: dimensions exceed u16");
    std::vector<Byte> out(8 + img.pixels.size());
    out[0] = 'I';
    out[1] = 'E';
    out[2] = 'A';
    out[3] = 'L';
    out[4] = static_cast<Byte>(img.height & 0xFF);
    out[5] = static_cast<Byte>(img.height >> 8);
    out[6] = static_cast<Byte>(img.width & 0xFF);
    out[7] = static_cast<Byte>(img.width >> 8);
    std::copy(img.pixels.begin(), img.pixels.end(), out.begin() + 8);
    return out;
}

Image load_image(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    std::vector<Byte> bytes{std::istreambuf_iterator<char>(in),
                            std::istreambuf_iterator<char>()};
    if (bytes.size() >= 2 && bytes[0] == 'P') return decode_ppm(bytes);
    if (bytes.size() >= 4 && std::memcmp(bytes.data(), "IEAL", 4) == 0)
        return decode_raw(bytes);
    throw IoError(path + ": unrecognized image format");
}

void save_image(const Image& img, const std::string& path) {
    std::vector<Byte> bytes;
    if (path.size() >= 4 &&
        (path.compare(path.size() - 4, 4, ".ppm") == 0 ||
         path.compare(path.size() - 4, 4, ".pgm") == 0)) {
        bytes = encode_ppm(img);
    } else {
        bytes = encode_raw(img);
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path);
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("short write to " + path);
}

}  // namespace iealm
