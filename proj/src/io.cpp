#include "evmag/io.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cctype>
#include <cstring>
#include <fstream>
#include <iterator>
#include <memory>
#include <sstream>

#include "evmag/error.hpp"

namespace evmag::io {

namespace fs = std::filesystem;

namespace {

void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
    out.push_back(static_cast<std::uint8_t>(v & 0xff));
    out.push_back(static_cast<std::uint8_t>(v >> 8));
}

void put_u64(std::vector<std::uint8_t>& out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>((v >> (8 * i)) & 0xff));
}

std::uint16_t get_u16(const std::uint8_t* p) { return static_cast<std::uint16_t>(p[0] | (p[1] << 8)); }

std::uint64_t get_u64(const std::uint8_t* p) {
    std::uint64_t v = 0;
    for (int i = 7; i >= 0; --i) v = (v << 8) | p[i];
    return v;
}

TimeSpan resolve_span(const std::vector<Event>& events, std::optional<TimeSpan> span) {
    if (span) return *span;
    TimeSpan s;
    for (const Event& e : events) s.t_end = std::max(s.t_end, e.t);
    return s;
}

std::vector<std::uint8_t> slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void dump(const fs::path& path, const void* data, std::size_t n) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out.write(static_cast<const char*>(data), static_cast<std::streamsize>(n));
    if (!out) throw IoError("short write to " + path.string());
}

std::uint16_t quantize(double v, double maxval) {
    const double c = std::clamp(v, 0.0, 1.0);
    return static_cast<std::uint16_t>(std::lround(c * maxval));
}

}  // namespace

std::vector<std::uint8_t> encode_events(const EventStream& stream) {
    std::vector<std::uint8_t> out;
    out.reserve(kEventHeaderBytes + kEventRecordBytes * stream.size());
    for (const char c : {'E', 'V', 'M', 'G'}) out.push_back(static_cast<std::uint8_t>(c));
    put_u16(out, kEventFormatVersion);
    put_u16(out, static_cast<std::uint16_t>(stream.width()));
    put_u16(out, static_cast<std::uint16_t>(stream.height()));
    out.insert(out.end(), 6, 0);
    for (const Event& e : stream.events()) {
        put_u64(out, static_cast<std::uint64_t>(e.t));
        put_u16(out, e.x);
        put_u16(out, e.y);
        out.push_back(static_cast<std::uint8_t>(e.p));
        out.insert(out.end(), 3, 0);
    }
    return out;
}

EventStream decode_events(const std::vector<std::uint8_t>& bytes, std::optional<TimeSpan> span) {
    if (bytes.size() < kEventHeaderBytes || std::memcmp(bytes.data(), "EVMG", 4) != 0) {
        throw IoError("not an EVMG event file");
    }
    const std::uint16_t version = get_u16(bytes.data() + 4);
    if (version != kEventFormatVersion) throw IoError("unsupported EVMG version " + std::to_string(version));
    const int width = get_u16(bytes.data() + 6);
    const int height = get_u16(bytes.data() + 8);
    const std::size_t body = bytes.size() - kEventHeaderBytes;
    if (body % kEventRecordBytes != 0) throw IoError("truncated EVMG record");

    std::vector<Event> events(body / kEventRecordBytes);
    const std::uint8_t* p = bytes.data() + kEventHeaderBytes;
    for (Event& e : events) {
        const std::uint64_t t = get_u64(p);
        if (t > static_cast<std::uint64_t>(INT64_MAX)) throw IoError("event timestamp overflows");
        e.t = static_cast<Micros>(t);
        e.x = get_u16(p + 8);
        e.y = get_u16(p + 10);
        e.p = static_cast<std::int8_t>(p[12]);
        p += kEventRecordBytes;
    }
    const TimeSpan s = resolve_span(events, span);
    return EventStream(width, height, s.t_start, s.t_end, std::move(events));
}

void write_events(const fs::path& path, const EventStream& stream) {
    const auto bytes = encode_events(stream);
    dump(path, bytes.data(), bytes.size());
}

EventStream read_events(const fs::path& path, std::optional<TimeSpan> span) {
    return decode_events(slurp(path), span);
}

std::string events_to_csv(const EventStream& stream) {
    std::string out = "t_us,x,y,p\n";
    char line[64];
    for (const Event& e : stream.events()) {
        std::snprintf(line, sizeof line, "%lld,%u,%u,%d\n", static_cast<long long>(e.t), e.x, e.y, e.p);
        out += line;
    }
    return out;
}

EventStream events_from_csv(const std::string& text, int width, int height, std::optional<TimeSpan> span) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw IoError("empty event CSV");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "t_us,x,y,p") throw IoError("event CSV header must be t_us,x,y,p");
    std::vector<Event> events;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line == "\r") continue;
        long long t = 0;
        unsigned x = 0;
        unsigned y = 0;
        int p = 0;
        if (std::sscanf(line.c_str(), "%lld,%u,%u,%d", &t, &x, &y, &p) != 4 || t < 0 || x > 65535 || y > 65535) {
            throw IoError("malformed event CSV line " + std::to_string(lineno));
        }
        events.push_back(Event{static_cast<std::uint16_t>(x), static_cast<std::uint16_t>(y), t,
                               static_cast<std::int8_t>(p)});
    }
    const TimeSpan s = resolve_span(events, span);
    return EventStream(width, height, s.t_start, s.t_end, std::move(events));
}

EventStream read_events_any(const fs::path& path, std::optional<TimeSpan> span, int csv_width, int csv_height) {
    if (path.extension() == ".csv") {
        if (csv_width <= 0 || csv_height <= 0) throw IoError("CSV event input needs an explicit sensor extent");
        const auto bytes = slurp(path);
        return events_from_csv(std::string(bytes.begin(), bytes.end()), csv_width, csv_height, span);
    }
    return read_events(path, span);
}

// --- images ----------------------------------------------------------------

namespace {

struct FileCloser {
    void operator()(std::FILE* f) const {
        if (f) std::fclose(f);
    }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

Image read_png(const fs::path& path) {
    FilePtr fp(std::fopen(path.c_str(), "rb"));
    if (!fp) throw IoError("cannot open " + path.string());
    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw IoError("libpng initialisation failed");
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw IoError("corrupt PNG " + path.string());
    }
    png_init_io(png, fp.get());
    png_read_info(png, info);

    const int color = png_get_color_type(png, info);
    const int bits = png_get_bit_depth(png, info);
    if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
    if (color == PNG_COLOR_TYPE_GRAY && bits < 8) png_set_expand_gray_1_2_4_to_8(png);
    if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
    if (color & PNG_COLOR_MASK_ALPHA || png_get_valid(png, info, PNG_INFO_tRNS)) png_set_strip_alpha(png);
    if (bits == 16) png_set_swap(png);  // host little-endian u16
    png_read_update_info(png, info);

    Image img;
    img.width = static_cast<int>(png_get_image_width(png, info));
    img.height = static_cast<int>(png_get_image_height(png, info));
    img.channels = png_get_channels(png, info);
    const int out_bits = png_get_bit_depth(png, info);
    img.depth = out_bits == 16 ? BitDepth::k16 : BitDepth::k8;
    const std::size_t rowbytes = png_get_rowbytes(png, info);
    std::vector<std::uint8_t> raw(rowbytes * img.height);
    std::vector<png_bytep> rows(img.height);
    for (int y = 0; y < img.height; ++y) rows[y] = raw.data() + y * rowbytes;
    png_read_image(png, rows.data());
    png_destroy_read_struct(&png, &info, nullptr);

    const std::size_t n = static_cast<std::size_t>(img.width) * img.height * img.channels;
    img.data.resize(n);
    if (img.depth == BitDepth::k16) {
        for (std::size_t i = 0; i < n; ++i) {
            std::uint16_t v;
            std::memcpy(&v, raw.data() + 2 * i, 2);
            img.data[i] = v / 65535.0;
        }
    } else {
        for (std::size_t i = 0; i < n; ++i) img.data[i] = raw[i] / 255.0;
    }
    return img;
}

void write_png_raw(const fs::path& path, int width, int height, int channels, BitDepth depth,
                   const std::vector<double>& data) {
    FilePtr fp(std::fopen(path.c_str(), "wb"));
    if (!fp) throw IoError("cannot write " + path.string());
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
        png_destroy_write_struct(&png, &info);
        throw IoError("libpng initialisation failed");
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw IoError("PNG encode failed for " + path.string());
    }
    png_init_io(png, fp.get());
    const int bits = depth == BitDepth::k16 ? 16 : 8;
    png_set_IHDR(png, info, width, height, bits, channels == 3 ? PNG_COLOR_TYPE_RGB : PNG_COLOR_TYPE_GRAY,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    // Fixed compression settings keep the byte stream reproducible.
    png_set_compression_level(png, 6);
    png_write_info(png, info);

    const std::size_t row_samples = static_cast<std::size_t>(width) * channels;
    std::vector<std::uint8_t> row(row_samples * (bits / 8));
    for (int y = 0; y < height; ++y) {
        const double* src = data.data() + y * row_samples;
        if (bits == 16) {
            for (std::size_t i = 0; i < row_samples; ++i) {
                const std::uint16_t v = quantize(src[i], 65535.0);
                row[2 * i] = static_cast<std::uint8_t>(v >> 8);  // PNG is big-endian
                row[2 * i + 1] = static_cast<std::uint8_t>(v & 0xff);
            }
        } else {
            for (std::size_t i = 0; i < row_samples; ++i) row[i] = static_cast<std::uint8_t>(quantize(src[i], 255.0));
        }
        png_write_row(png, row.data());
    }
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
}

// Binary PGM (P5) / PPM (P6), 8 or 16 bit.
Image read_pnm(const fs::path& path) {
    const auto bytes = slurp(path);
    std::size_t pos = 0;
    auto token = [&]() {
        std::string tok;
        while (pos < bytes.size()) {
            const char ch = static_cast<char>(bytes[pos]);
            if (ch == '#') {
                while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
            } else if (std::isspace(static_cast<unsigned char>(ch))) {
                if (!tok.empty()) break;
                ++pos;
            } else {
                tok.push_back(ch);
                ++pos;
            }
        }
        return tok;
    };
    const std::string magic = token();
    if (magic != "P5" && magic != "P6") throw IoError("unsupported PNM variant in " + path.string());
    Image img;
    img.channels = magic == "P6" ? 3 : 1;
    try {
        img.width = std::stoi(token());
        img.height = std::stoi(token());
    } catch (const std::exception&) {
        throw IoError("malformed PNM header in " + path.string());
    }
    const int maxval = std::stoi(token());
    ++pos;  // single whitespace before raster
    if (maxval <= 0 || maxval > 65535) throw IoError("bad PNM maxval in " + path.string());
    img.depth = maxval > 255 ? BitDepth::k16 : BitDepth::k8;
    const std::size_t n = static_cast<std::size_t>(img.width) * img.height * img.channels;
    const std::size_t bps = maxval > 255 ? 2 : 1;
    if (bytes.size() < pos + n * bps) throw IoError("truncated PNM raster in " + path.string());
    img.data.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const unsigned v = bps == 2 ? (bytes[pos + 2 * i] << 8) | bytes[pos + 2 * i + 1] : bytes[pos + i];
        img.data[i] = static_cast<double>(v) / maxval;
    }
    return img;
}

}  // namespace

Image read_image(const fs::path& path) {
    if (!fs::exists(path)) throw IoError("no such file: " + path.string());
    const auto ext = path.extension().string();
    if (ext == ".png" || ext == ".PNG") return read_png(path);
    if (ext == ".pgm" || ext == ".ppm" || ext == ".pnm") return read_pnm(path);
    throw IoError("unsupported image extension: " + path.string());
}

void write_png(const fs::path& path, const Frame& frame, BitDepth depth) {
    write_png_raw(path, frame.width, frame.height, 1, depth, frame.data);
}

void write_png_rgb(const fs::path& path, const Image& image) {
    write_png_raw(path, image.width, image.height, image.channels, image.depth, image.data);
}

void write_pgm(const fs::path& path, const Frame& frame) {
    std::string header = "P5\n" + std::to_string(frame.width) + " " + std::to_string(frame.height) + "\n255\n";
    std::vector<std::uint8_t> out(header.begin(), header.end());
    for (double v : frame.data) out.push_back(static_cast<std::uint8_t>(quantize(v, 255.0)));
    dump(path, out.data(), out.size());
}

Frame to_gray(const Image& image, Micros t) {
    Frame f(image.width, image.height, t);
    if (image.channels == 1) {
        f.data = image.data;
        return f;
    }
    for (std::size_t i = 0; i < f.data.size(); ++i) {
        const double* px = image.data.data() + i * image.channels;
        f.data[i] = std::clamp(0.299 * px[0] + 0.587 * px[1] + 0.114 * px[2], 0.0, 1.0);
    }
    return f;
}

Frame channel(const Image& image, int c, Micros t) {
    if (c < 0 || c >= image.channels) throw InvalidArgument("channel index out of range");
    Frame f(image.width, image.height, t);
    for (std::size_t i = 0; i < f.data.size(); ++i) f.data[i] = image.data[i * image.channels + c];
    return f;
}

std::vector<fs::path> list_frames(const fs::path& dir) {
    if (!fs::is_directory(dir)) throw IoError("not a directory: " + dir.string());
    std::vector<fs::path> out;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (!entry.is_regular_file()) continue;
        const auto ext = entry.path().extension().string();
        if (ext == ".png" || ext == ".pgm" || ext == ".ppm") out.push_back(entry.path());
    }
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace evmag::io
