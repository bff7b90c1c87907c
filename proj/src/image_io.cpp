#include "leafarch/image_io.hpp"

#include <zlib.h>

#include <cstring>
#include <fstream>

namespace leafarch::io {

namespace {

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open file: " + path.string());
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                    std::istreambuf_iterator<char>());
    return bytes;
}

void write_file(const std::filesystem::path& path, const void* data, std::size_t size) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open file for writing: " + path.string());
    out.write(static_cast<const char*>(data), static_cast<std::streamsize>(size));
    if (!out) throw Error("write failed: " + path.string());
}

// --- netpbm ---------------------------------------------------------------

// Skips whitespace and '#' comments, then parses one non-negative integer.
int pnm_int(const std::vector<std::uint8_t>& b, std::size_t& pos) {
    while (pos < b.size()) {
        if (std::isspace(b[pos])) {
            ++pos;
        } else if (b[pos] == '#') {
            while (pos < b.size() && b[pos] != '\n') ++pos;
        } else {
            break;
        }
    }
    if (pos >= b.size() || !std::isdigit(b[pos])) throw Error("malformed PNM header");
    int v = 0;
    while (pos < b.size() && std::isdigit(b[pos])) {
        v = v * 10 + (b[pos] - '0');
        ++pos;
    }
    return v;
}

RasterData decode_pnm(const std::vector<std::uint8_t>& b) {
    if (b.size() < 2) throw Error("truncated PNM");
    const int channels = (b[1] == '6') ? 3 : 1;
    std::size_t pos = 2;
    const int w = pnm_int(b, pos);
    const int h = pnm_int(b, pos);
    const int maxval = pnm_int(b, pos);
    if (w < 1 || h < 1) throw EmptyImage("empty PNM image");
    if (maxval != 255) throw Error("only 8-bit PNM supported");
    ++pos;  // single whitespace after maxval
    const std::size_t need = static_cast<std::size_t>(w) * h * channels;
    if (b.size() < pos + need) throw Error("truncated PNM payload");

    RasterData img;
    img.width = w;
    img.height = h;
    img.channels = channels;
    img.pixels.assign(b.begin() + static_cast<std::ptrdiff_t>(pos),
                      b.begin() + static_cast<std::ptrdiff_t>(pos + need));
    return img;
}

// --- PNG ------------------------------------------------------------------

constexpr std::uint8_t kPngSig[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};

std::uint32_t be32(const std::uint8_t* p) {
    return (static_cast<std::uint32_t>(p[0]) << 24) | (static_cast<std::uint32_t>(p[1]) << 16) |
           (static_cast<std::uint32_t>(p[2]) << 8) | p[3];
}

void put_be32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    out.push_back(static_cast<std::uint8_t>(v >> 24));
    out.push_back(static_cast<std::uint8_t>(v >> 16));
    out.push_back(static_cast<std::uint8_t>(v >> 8));
    out.push_back(static_cast<std::uint8_t>(v));
}

std::uint8_t paeth(int a, int b, int c) {
    const int p = a + b - c;
    const int pa = std::abs(p - a), pb = std::abs(p - b), pc = std::abs(p - c);
    if (pa <= pb && pa <= pc) return static_cast<std::uint8_t>(a);
    if (pb <= pc) return static_cast<std::uint8_t>(b);
    return static_cast<std::uint8_t>(c);
}

std::vector<std::uint8_t> zlib_inflate(const std::vector<std::uint8_t>& in,
                                       std::size_t expected) {
    std::vector<std::uint8_t> out(expected);
    uLongf out_len = static_cast<uLongf>(expected);
    const int rc = uncompress(out.data(), &out_len, in.data(), static_cast<uLong>(in.size()));
    if (rc != Z_OK || out_len != expected) throw Error("PNG: inflate failed");
    return out;
}

}  // namespace

RasterData decode_png(const std::vector<std::uint8_t>& bytes) {
    if (bytes.size() < 8 || std::memcmp(bytes.data(), kPngSig, 8) != 0) {
        throw Error("not a PNG file");
    }

    int w = 0, h = 0, bit_depth = 0, color_type = 0;
    std::vector<std::uint8_t> idat;
    std::size_t pos = 8;
    bool seen_ihdr = false, seen_iend = false;

    while (pos + 8 <= bytes.size() && !seen_iend) {
        const std::uint32_t len = be32(&bytes[pos]);
        if (pos + 12 + len > bytes.size()) throw Error("PNG: truncated chunk");
        const char* type = reinterpret_cast<const char*>(&bytes[pos + 4]);
        const std::uint8_t* data = &bytes[pos + 8];

        if (std::memcmp(type, "IHDR", 4) == 0) {
            if (len != 13) throw Error("PNG: bad IHDR");
            w = static_cast<int>(be32(data));
            h = static_cast<int>(be32(data + 4));
            bit_depth = data[8];
            color_type = data[9];
            if (data[12] != 0) throw Error("PNG: interlaced images not supported");
            if (bit_depth != 8) throw Error("PNG: only 8-bit depth supported");
            if (color_type != 0 && color_type != 2 && color_type != 6) {
                throw Error("PNG: only grayscale/RGB/RGBA supported");
            }
            seen_ihdr = true;
        } else if (std::memcmp(type, "IDAT", 4) == 0) {
            idat.insert(idat.end(), data, data + len);
        } else if (std::memcmp(type, "IEND", 4) == 0) {
            seen_iend = true;
        }
        pos += 12 + len;
    }
    if (!seen_ihdr || idat.empty()) throw Error("PNG: missing IHDR/IDAT");
    if (w < 1 || h < 1) throw EmptyImage("empty PNG image");

    const int src_ch = color_type == 0 ? 1 : color_type == 2 ? 3 : 4;
    const std::size_t stride = static_cast<std::size_t>(w) * src_ch;
    const auto raw = zlib_inflate(idat, (stride + 1) * h);

    std::vector<std::uint8_t> flat(stride * h);
    for (int y = 0; y < h; ++y) {
        const std::uint8_t filter = raw[(stride + 1) * y];
        const std::uint8_t* src = &raw[(stride + 1) * y + 1];
        std::uint8_t* dst = &flat[stride * y];
        const std::uint8_t* up = y > 0 ? &flat[stride * (y - 1)] : nullptr;
        for (std::size_t i = 0; i < stride; ++i) {
            const int left = i >= static_cast<std::size_t>(src_ch) ? dst[i - src_ch] : 0;
            const int above = up ? up[i] : 0;
            const int ul = (up && i >= static_cast<std::size_t>(src_ch)) ? up[i - src_ch] : 0;
            int v = src[i];
            switch (filter) {
                case 0: break;
                case 1: v += left; break;
                case 2: v += above; break;
                case 3: v += (left + above) / 2; break;
                case 4: v += paeth(left, above, ul); break;
                default: throw Error("PNG: unknown filter type");
            }
            dst[i] = static_cast<std::uint8_t>(v & 0xff);
        }
    }

    RasterData img;
    img.width = w;
    img.height = h;
    img.channels = src_ch == 1 ? 1 : 3;
    img.pixels.resize(static_cast<std::size_t>(w) * h * img.channels);
    if (src_ch == img.channels) {
        img.pixels = std::move(flat);
    } else {  // RGBA -> RGB
        for (std::size_t p = 0; p < static_cast<std::size_t>(w) * h; ++p) {
            img.pixels[3 * p] = flat[4 * p];
            img.pixels[3 * p + 1] = flat[4 * p + 1];
            img.pixels[3 * p + 2] = flat[4 * p + 2];
        }
    }
    return img;
}

namespace {

std::vector<std::uint8_t> encode_png(const std::uint8_t* pixels, int w, int h, int channels) {
    const std::size_t stride = static_cast<std::size_t>(w) * channels;
    std::vector<std::uint8_t> raw((stride + 1) * h);
    for (int y = 0; y < h; ++y) {
        raw[(stride + 1) * y] = 0;  // filter: none
        std::memcpy(&raw[(stride + 1) * y + 1], pixels + stride * y, stride);
    }

    uLongf bound = compressBound(static_cast<uLong>(raw.size()));
    std::vector<std::uint8_t> compressed(bound);
    if (compress2(compressed.data(), &bound, raw.data(), static_cast<uLong>(raw.size()), 6) !=
        Z_OK) {
        throw Error("PNG: deflate failed");
    }
    compressed.resize(bound);

    std::vector<std::uint8_t> out(kPngSig, kPngSig + 8);
    const auto chunk = [&out](const char* type, const std::vector<std::uint8_t>& data) {
        put_be32(out, static_cast<std::uint32_t>(data.size()));
        const std::size_t start = out.size();
        out.insert(out.end(), type, type + 4);
        out.insert(out.end(), data.begin(), data.end());
        const uLong crc = crc32(crc32(0L, Z_NULL, 0), &out[start], static_cast<uInt>(4 + data.size()));
        put_be32(out, static_cast<std::uint32_t>(crc));
    };

    std::vector<std::uint8_t> ihdr;
    put_be32(ihdr, static_cast<std::uint32_t>(w));
    put_be32(ihdr, static_cast<std::uint32_t>(h));
    ihdr.push_back(8);                                        // bit depth
    ihdr.push_back(channels == 1 ? 0 : 2);                    // color type
    ihdr.push_back(0);
    ihdr.push_back(0);
    ihdr.push_back(0);
    chunk("IHDR", ihdr);
    chunk("IDAT", compressed);
    chunk("IEND", {});
    return out;
}

}  // namespace

std::vector<std::uint8_t> encode_png_gray(const raster::GrayImage& img) {
    return encode_png(img.pixels.data(), img.width, img.height, 1);
}

std::vector<std::uint8_t> encode_png_rgb(const raster::RgbImage& img) {
    return encode_png(img.pixels.data(), img.width, img.height, 3);
}

void write_png_gray(const std::filesystem::path& path, const raster::GrayImage& img) {
    const auto bytes = encode_png_gray(img);
    write_file(path, bytes.data(), bytes.size());
}

void write_png_rgb(const std::filesystem::path& path, const raster::RgbImage& img) {
    const auto bytes = encode_png_rgb(img);
    write_file(path, bytes.data(), bytes.size());
}

raster::GrayImage RasterData::gray() const {
    if (channels == 1) {
        raster::GrayImage g;
        g.width = width;
        g.height = height;
        g.pixels = pixels;
        return g;
    }
    raster::RgbImage rgb;
    rgb.width = width;
    rgb.height = height;
    rgb.pixels = pixels;
    return raster::to_gray(rgb);
}

RasterData read_image(const std::filesystem::path& path) {
    const auto bytes = read_file(path);
    if (bytes.size() >= 8 && std::memcmp(bytes.data(), kPngSig, 8) == 0) {
        return decode_png(bytes);
    }
    if (bytes.size() >= 2 && bytes[0] == 'P' && (bytes[1] == '5' || bytes[1] == '6')) {
        return decode_pnm(bytes);
    }
    throw Error("unsupported image format: " + path.string());
}

raster::GrayImage read_pgm(const std::filesystem::path& path) {
    const auto bytes = read_file(path);
    if (bytes.size() < 2 || bytes[0] != 'P' || bytes[1] != '5') throw Error("not a P5 PGM");
    const RasterData d = decode_pnm(bytes);
    raster::GrayImage g;
    g.width = d.width;
    g.height = d.height;
    g.pixels = d.pixels;
    return g;
}

raster::RgbImage read_ppm(const std::filesystem::path& path) {
    const auto bytes = read_file(path);
    if (bytes.size() < 2 || bytes[0] != 'P' || bytes[1] != '6') throw Error("not a P6 PPM");
    const RasterData d = decode_pnm(bytes);
    raster::RgbImage img;
    img.width = d.width;
    img.height = d.height;
    img.pixels = d.pixels;
    return img;
}

void write_pgm(const std::filesystem::path& path, const raster::GrayImage& img) {
    std::string header = "P5\n" + std::to_string(img.width) + " " + std::to_string(img.height) +
                         "\n255\n";
    std::vector<std::uint8_t> bytes(header.begin(), header.end());
    bytes.insert(bytes.end(), img.pixels.begin(), img.pixels.end());
    write_file(path, bytes.data(), bytes.size());
}

void write_ppm(const std::filesystem::path& path, const raster::RgbImage& img) {
    std::string header = "P6\n" + std::to_string(img.width) + " " + std::to_string(img.height) +
                         "\n255\n";
    std::vector<std::uint8_t> bytes(header.begin(), header.end());
    bytes.insert(bytes.end(), img.pixels.begin(), img.pixels.end());
    write_file(path, bytes.data(), bytes.size());
}

}  // namespace leafarch::io
