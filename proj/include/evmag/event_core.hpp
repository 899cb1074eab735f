#pragma once

// Events, frames and voxel grids shared by every stage of the pipeline.
//
// Time is measured in integer microseconds everywhere. Polarities are signed
// integers so that per-pixel signed counts are plain sums.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace evmag {

using Micros = std::int64_t;

struct Event {
    std::uint16_t x = 0;
    std::uint16_t y = 0;
    Micros t = 0;
    std::int8_t p = 1;  // +1 or -1, never 0

    friend bool operator==(const Event&, const Event&) = default;
};

// Ordering used by EventStream: time, then row, then column.
inline bool event_order(const Event& a, const Event& b) {
    if (a.t != b.t) return a.t < b.t;
    if (a.y != b.y) return a.y < b.y;
    return a.x < b.x;
}

// Time-sorted, extent-checked event collection. Immutable once built.
class EventStream {
public:
    EventStream() = default;

    // Sorts `events` (stable, by t then (y, x)) and validates extent, time span
    // and polarity. Throws InvalidArgument on any violation.
    EventStream(int width, int height, Micros t_start, Micros t_end, std::vector<Event> events);

    int width() const { return width_; }
    int height() const { return height_; }
    Micros t_start() const { return t_start_; }
    Micros t_end() const { return t_end_; }
    const std::vector<Event>& events() const { return events_; }
    std::size_t size() const { return events_.size(); }
    bool empty() const { return events_.empty(); }

    bool contains(int x, int y) const { return x >= 0 && y >= 0 && x < width_ && y < height_; }

private:
    int width_ = 0;
    int height_ = 0;
    Micros t_start_ = 0;
    Micros t_end_ = 0;
    std::vector<Event> events_;
};

// Single-channel linear intensity raster, row-major, values in [0, 1].
struct Frame {
    int width = 0;
    int height = 0;
    Micros t = 0;
    std::vector<double> data;

    Frame() = default;
    Frame(int w, int h, Micros ts = 0, double fill = 0.0);

    std::size_t size() const { return data.size(); }
    double& at(int x, int y) { return data[static_cast<std::size_t>(y) * width + x]; }
    double at(int x, int y) const { return data[static_cast<std::size_t>(y) * width + x]; }
    bool same_extent(const Frame& o) const { return width == o.width && height == o.height; }
};

using FrameSequence = std::vector<Frame>;

// Throws InvalidArgument unless every intensity is finite and in [0, 1] and
// the buffer matches the declared extent.
void validate_frame(const Frame& f);

// Temporal binning with separate positive and negative channels.
// Layout of pos/neg: [bin][row][col].
struct VoxelGrid {
    int n_bins = 0;
    int width = 0;
    int height = 0;
    std::vector<double> pos;
    std::vector<double> neg;

    std::size_t index(int bin, int x, int y) const {
        return (static_cast<std::size_t>(bin) * height + y) * width + x;
    }
};

// Sign of a log-intensity change against contrast threshold c: +1, -1 or 0.
int polarity_of_change(double log_prev, double log_curr, double c);

// Signed event count at (x, y) over (t0, tau]. Events stamped exactly at the
// stream's t_start are counted when t0 == t_start, mirroring bin 0 of the
// voxel grid so that every event belongs to exactly one interval.
int accumulate_polarity(const EventStream& stream, int x, int y, Micros t0, Micros tau);

// Per-pixel signed counts over the same interval rule, for the whole sensor.
std::vector<int> polarity_sums(const EventStream& stream, Micros t0, Micros tau);

// Bin k covers (t0 + k*dt, t0 + (k+1)*dt] with dt = (t1 - t0) / n_bins; an
// event exactly at t0 lands in bin 0. Events outside [t0, t1] are ignored.
VoxelGrid build_voxel_grid(const EventStream& stream, int n_bins, Micros t0, Micros t1);

}  // namespace evmag
