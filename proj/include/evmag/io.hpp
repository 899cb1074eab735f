#pragma once

// File formats: binary and CSV event streams, PNG/PGM frames.
//
// Binary event file (little-endian):
//   header, 16 bytes: "EVMG" | version u16 | width u16 | height u16 | 6 reserved zero bytes
//   record, 16 bytes: t u64 (microseconds) | x u16 | y u16 | p i8 | 3 pad bytes
//
// The binary header carries no time span. Readers take an explicit span or
// fall back to [0, last event timestamp].

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "evmag/event_core.hpp"

namespace evmag::io {

inline constexpr std::uint16_t kEventFormatVersion = 1;
inline constexpr std::size_t kEventHeaderBytes = 16;
inline constexpr std::size_t kEventRecordBytes = 16;

struct TimeSpan {
    Micros t_start = 0;
    Micros t_end = 0;
};

std::vector<std::uint8_t> encode_events(const EventStream& stream);
EventStream decode_events(const std::vector<std::uint8_t>& bytes, std::optional<TimeSpan> span = std::nullopt);

void write_events(const std::filesystem::path& path, const EventStream& stream);
EventStream read_events(const std::filesystem::path& path, std::optional<TimeSpan> span = std::nullopt);

// CSV with header `t_us,x,y,p`. The CSV form carries no extent, so it is
// supplied by the caller.
std::string events_to_csv(const EventStream& stream);
EventStream events_from_csv(const std::string& text, int width, int height,
                            std::optional<TimeSpan> span = std::nullopt);

// Reads any file produced by write_events or by events_to_csv (by extension:
// `.csv` means CSV, anything else binary). CSV requires width/height.
EventStream read_events_any(const std::filesystem::path& path, std::optional<TimeSpan> span = std::nullopt,
                            int csv_width = 0, int csv_height = 0);

enum class BitDepth { k8, k16 };

// Planar image as read from disk: 1 (gray) or 3 (RGB) channels, values in [0, 1].
struct Image {
    int width = 0;
    int height = 0;
    int channels = 1;
    BitDepth depth = BitDepth::k8;
    std::vector<double> data;  // interleaved
};

Image read_image(const std::filesystem::path& path);  // .png, .pgm, .ppm
void write_png(const std::filesystem::path& path, const Frame& frame, BitDepth depth = BitDepth::k8);
void write_png_rgb(const std::filesystem::path& path, const Image& image);
void write_pgm(const std::filesystem::path& path, const Frame& frame);

// Rec.601 luma for colour inputs; gray images pass through.
Frame to_gray(const Image& image, Micros t = 0);
Frame channel(const Image& image, int c, Micros t = 0);

// Lexicographically sorted image files (.png/.pgm/.ppm) in a directory.
std::vector<std::filesystem::path> list_frames(const std::filesystem::path& dir);

}  // namespace evmag::io
