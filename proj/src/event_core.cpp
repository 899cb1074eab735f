#include "evmag/event_core.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "evmag/error.hpp"

namespace evmag {

EventStream::EventStream(int width, int height, Micros t_start, Micros t_end, std::vector<Event> events)
    : width_(width), height_(height), t_start_(t_start), t_end_(t_end), events_(std::move(events)) {
    if (width <= 0 || height <= 0 || width > 65535 || height > 65535) {
        throw InvalidArgument("event stream extent must be in [1, 65535], got " + std::to_string(width) + "x" +
                              std::to_string(height));
    }
    if (t_start < 0 || t_end < t_start) {
        throw InvalidArgument("event stream span must satisfy 0 <= t_start <= t_end");
    }
    for (const Event& e : events_) {
        if (e.x >= width || e.y >= height) {
            throw InvalidArgument("event at (" + std::to_string(e.x) + ", " + std::to_string(e.y) +
                                  ") outside sensor extent");
        }
        if (e.t < t_start || e.t > t_end) {
            throw InvalidArgument("event timestamp " + std::to_string(e.t) + " outside stream span");
        }
        if (e.p != 1 && e.p != -1) {
            throw InvalidArgument("event polarity must be +1 or -1");
        }
    }
    if (!std::is_sorted(events_.begin(), events_.end(), event_order)) {
        std::stable_sort(events_.begin(), events_.end(), event_order);
    }
}

Frame::Frame(int w, int h, Micros ts, double fill)
    : width(w), height(h), t(ts), data(static_cast<std::size_t>(std::max(w, 0)) * std::max(h, 0), fill) {}

void validate_frame(const Frame& f) {
    if (f.width <= 0 || f.height <= 0) throw InvalidArgument("frame extent must be positive");
    if (f.data.size() != static_cast<std::size_t>(f.width) * f.height) {
        throw InvalidArgument("frame buffer size does not match its extent");
    }
    for (double v : f.data) {
        if (!std::isfinite(v) || v < 0.0 || v > 1.0) {
            throw InvalidArgument("frame intensities must be finite and within [0, 1]");
        }
    }
}

int polarity_of_change(double log_prev, double log_curr, double c) {
    if (!std::isfinite(log_prev) || !std::isfinite(log_curr) || !std::isfinite(c)) {
        throw InvalidArgument("polarity_of_change: non-finite input");
    }
    if (c <= 0.0) throw InvalidArgument("polarity_of_change: contrast threshold must be positive");
    const double d = log_curr - log_prev;
    if (d >= c) return 1;
    if (d <= -c) return -1;
    return 0;
}

namespace {

bool in_interval(Micros t, Micros t0, Micros tau, Micros stream_start) {
    if (t > t0) return t <= tau;
    return t == t0 && t0 == stream_start;
}

}  // namespace

int accumulate_polarity(const EventStream& stream, int x, int y, Micros t0, Micros tau) {
    if (!stream.contains(x, y)) {
        throw InvalidArgument("accumulate_polarity: pixel (" + std::to_string(x) + ", " + std::to_string(y) +
                              ") outside extent");
    }
    if (t0 > tau) throw InvalidArgument("accumulate_polarity: t0 must not exceed tau");
    const auto& ev = stream.events();
    // Events are time-sorted: only scan the candidate range.
    auto first = std::lower_bound(ev.begin(), ev.end(), t0, [](const Event& e, Micros t) { return e.t < t; });
    int sum = 0;
    for (auto it = first; it != ev.end() && it->t <= tau; ++it) {
        if (it->x == x && it->y == y && in_interval(it->t, t0, tau, stream.t_start())) sum += it->p;
    }
    return sum;
}

std::vector<int> polarity_sums(const EventStream& stream, Micros t0, Micros tau) {
    if (t0 > tau) throw InvalidArgument("polarity_sums: t0 must not exceed tau");
    std::vector<int> out(static_cast<std::size_t>(stream.width()) * stream.height(), 0);
    const auto& ev = stream.events();
    auto first = std::lower_bound(ev.begin(), ev.end(), t0, [](const Event& e, Micros t) { return e.t < t; });
    for (auto it = first; it != ev.end() && it->t <= tau; ++it) {
        if (in_interval(it->t, t0, tau, stream.t_start())) {
            out[static_cast<std::size_t>(it->y) * stream.width() + it->x] += it->p;
        }
    }
    return out;
}

VoxelGrid build_voxel_grid(const EventStream& stream, int n_bins, Micros t0, Micros t1) {
    if (n_bins < 1) throw InvalidArgument("build_voxel_grid: n_bins must be >= 1");
    if (t0 >= t1) throw InvalidArgument("build_voxel_grid: t0 must be < t1");
    VoxelGrid g;
    g.n_bins = n_bins;
    g.width = stream.width();
    g.height = stream.height();
    const std::size_t cells = static_cast<std::size_t>(n_bins) * g.width * g.height;
    g.pos.assign(cells, 0.0);
    g.neg.assign(cells, 0.0);

    const __int128 span = t1 - t0;
    for (const Event& e : stream.events()) {
        if (e.t < t0 || e.t > t1) continue;
        int bin = 0;
        if (e.t > t0) {
            // ceil(d * n / span) - 1 == floor((d * n - 1) / span) for d > 0
            const __int128 d = e.t - t0;
            bin = static_cast<int>((d * n_bins - 1) / span);
        }
        const std::size_t i = g.index(bin, e.x, e.y);
        if (e.p > 0) {
            g.pos[i] += 1.0;
        } else {
            g.neg[i] += 1.0;
        }
    }
    return g;
}

}  // namespace evmag
