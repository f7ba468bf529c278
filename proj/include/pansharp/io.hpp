#pragma once

#include <bit>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <utility>
#include <vector>

#include "pansharp/raster.hpp"

// File formats:
//   - single band: binary PGM ("P5"), maxval 255 (1 byte/sample) or
//     65535 (2 bytes/sample, big-endian). Samples are stored as
//     integers; values are clipped to [0, maxval] and rounded at save.
//   - multi band: plain-text manifest, one "band=<relative pgm path>"
//     line per band in band order; '#' starts a comment line.
//   - debug floats: raw 32-bit little-endian samples plus a sidecar
//     text header "<path>.hdr" with width=, height=, dtype=f32.

namespace pansharp {

namespace detail {

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::string data((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
    return data;
}

inline void ensure_parent_dir(const std::filesystem::path& path) {
    if (!path.has_parent_path()) return;
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
    if (ec)
        throw IoError("cannot create directory " + path.parent_path().string() + ": " +
                      ec.message());
}

// Reads the next whitespace-delimited unsigned integer, skipping '#'
// comments that run to end of line.
inline long pgm_token(const std::string& data, std::size_t& pos,
                      const std::filesystem::path& path) {
    while (pos < data.size()) {
        const char c = data[pos];
        if (c == '#') {
            while (pos < data.size() && data[pos] != '\n') ++pos;
        } else if (std::isspace(static_cast<unsigned char>(c))) {
            ++pos;
        } else {
            break;
        }
    }
    if (pos >= data.size() || !std::isdigit(static_cast<unsigned char>(data[pos])))
        throw IoError("malformed PGM header in " + path.string());
    long value = 0;
    while (pos < data.size() && std::isdigit(static_cast<unsigned char>(data[pos]))) {
        value = value * 10 + (data[pos] - '0');
        if (value > 1 << 30) throw IoError("PGM header value out of range in " + path.string());
        ++pos;
    }
    return value;
}

}  // namespace detail

/// Loads a binary PGM (P5) band. Sample values are kept as stored.
inline RasterBand load_band(const std::filesystem::path& path) {
    const std::string data = detail::read_file(path);
    if (data.size() < 2 || data[0] != 'P' || data[1] != '5')
        throw IoError("not a binary PGM (missing P5 magic): " + path.string());
    std::size_t pos = 2;
    const long w = detail::pgm_token(data, pos, path);
    const long h = detail::pgm_token(data, pos, path);
    const long maxval = detail::pgm_token(data, pos, path);
    if (w < 1 || h < 1 || maxval < 1 || maxval > 65535)
        throw IoError("PGM header out of range in " + path.string());
    if (pos >= data.size() || !std::isspace(static_cast<unsigned char>(data[pos])))
        throw IoError("malformed PGM header in " + path.string());
    ++pos;  // single whitespace separates header from raster data

    const std::size_t count = static_cast<std::size_t>(w) * h;
    const int bytes = maxval > 255 ? 2 : 1;
    if (data.size() - pos < count * bytes)
        throw IoError("truncated PGM data in " + path.string());

    std::vector<double> samples(count);
    const unsigned char* p = reinterpret_cast<const unsigned char*>(data.data()) + pos;
    if (bytes == 1) {
        for (std::size_t i = 0; i < count; ++i) samples[i] = p[i];
    } else {
        for (std::size_t i = 0; i < count; ++i)
            samples[i] = (static_cast<unsigned>(p[2 * i]) << 8) | p[2 * i + 1];
    }
    return RasterBand(static_cast<int>(w), static_cast<int>(h), std::move(samples));
}

/// Saves a band as binary PGM, clipping to [0, maxval] and rounding to
/// the nearest integer. maxval must be 255 or 65535.
inline void save_band(const RasterBand& band, const std::filesystem::path& path,
                      int maxval = 65535) {
    if (maxval != 255 && maxval != 65535)
        throw ParameterError("PGM maxval must be 255 or 65535");
    detail::ensure_parent_dir(path);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out << "P5\n" << band.width() << " " << band.height() << "\n" << maxval << "\n";
    for (double v : band.samples()) {
        const long q = std::lround(std::min(std::max(v, 0.0), static_cast<double>(maxval)));
        if (maxval > 255) out.put(static_cast<char>((q >> 8) & 0xff));
        out.put(static_cast<char>(q & 0xff));
    }
    if (!out) throw IoError("write failed for " + path.string());
}

/// Loads a multiband image from a manifest; band paths are resolved
/// relative to the manifest's directory. All bands must share dims.
inline MultiBandImage load_multiband(const std::filesystem::path& manifest) {
    std::ifstream in(manifest);
    if (!in) throw IoError("cannot open " + manifest.string());
    const std::filesystem::path dir = manifest.parent_path();
    std::vector<RasterBand> bands;
    std::string line;
    while (std::getline(in, line)) {
        const std::size_t begin = line.find_first_not_of(" \t\r");
        if (begin == std::string::npos) continue;
        const std::size_t end = line.find_last_not_of(" \t\r");
        line = line.substr(begin, end - begin + 1);
        if (line.empty() || line[0] == '#') continue;
        if (line.rfind("band=", 0) != 0)
            throw IoError("malformed manifest line '" + line + "' in " + manifest.string());
        bands.push_back(load_band(dir / line.substr(5)));
        if (!bands.back().same_dims(bands.front()))
            throw IoError("band dimensions disagree in manifest " + manifest.string());
    }
    if (bands.empty())
        throw IoError("manifest lists no bands: " + manifest.string());
    return MultiBandImage(std::move(bands));
}

/// Writes bands as "<stem>_b<k>.pgm" next to the manifest and the
/// manifest itself listing them in band order.
inline void save_multiband(const MultiBandImage& image,
                           const std::filesystem::path& manifest, int maxval = 65535) {
    detail::ensure_parent_dir(manifest);
    const std::string stem = manifest.stem().string();
    std::ofstream out(manifest);
    if (!out) throw IoError("cannot write " + manifest.string());
    for (int i = 0; i < image.band_count(); ++i) {
        const std::string name = stem + "_b" + std::to_string(i + 1) + ".pgm";
        save_band(image.band(i), manifest.parent_path() / name, maxval);
        out << "band=" << name << "\n";
    }
    if (!out) throw IoError("write failed for " + manifest.string());
}

/// Debug export: raw little-endian float32 samples plus "<path>.hdr".
inline void save_band_f32(const RasterBand& band, const std::filesystem::path& path) {
    detail::ensure_parent_dir(path);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    for (double v : band.samples()) {
        const auto u = std::bit_cast<std::uint32_t>(static_cast<float>(v));
        for (int s = 0; s < 32; s += 8) out.put(static_cast<char>((u >> s) & 0xff));
    }
    if (!out) throw IoError("write failed for " + path.string());
    std::ofstream hdr(path.string() + ".hdr");
    if (!hdr) throw IoError("cannot write " + path.string() + ".hdr");
    hdr << "width=" << band.width() << " height=" << band.height() << " dtype=f32\n";
}

inline RasterBand load_band_f32(const std::filesystem::path& path) {
    std::ifstream hdr(path.string() + ".hdr");
    if (!hdr) throw IoError("cannot open " + path.string() + ".hdr");
    const auto parse_int = [](const std::string& text) {
        try {
            return std::stoi(text);
        } catch (...) {
            return -1;
        }
    };
    int w = -1, h = -1;
    std::string dtype;
    std::string token;
    while (hdr >> token) {
        if (token.rfind("width=", 0) == 0) w = parse_int(token.substr(6));
        else if (token.rfind("height=", 0) == 0) h = parse_int(token.substr(7));
        else if (token.rfind("dtype=", 0) == 0) dtype = token.substr(6);
    }
    if (w < 1 || h < 1 || dtype != "f32")
        throw IoError("malformed sidecar header " + path.string() + ".hdr");

    const std::string data = detail::read_file(path);
    const std::size_t count = static_cast<std::size_t>(w) * h;
    if (data.size() != count * 4)
        throw IoError("raw f32 size does not match header for " + path.string());
    std::vector<double> samples(count);
    const unsigned char* p = reinterpret_cast<const unsigned char*>(data.data());
    for (std::size_t i = 0; i < count; ++i) {
        std::uint32_t u = 0;
        for (int s = 0; s < 4; ++s) u |= static_cast<std::uint32_t>(p[4 * i + s]) << (8 * s);
        samples[i] = std::bit_cast<float>(u);
    }
    return RasterBand(w, h, std::move(samples));
}

}  // namespace pansharp
