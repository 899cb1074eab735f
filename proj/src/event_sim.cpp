#include "evmag/event_sim.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "evmag/error.hpp"
#include "evmag/parallel.hpp"

namespace evmag {

namespace {

// Crossing levels within this distance of the segment end still fire, so that
// an exact k*c step is not lost to rounding in log().
constexpr double kCrossTolerance = 1e-9;

void check_sequence(const FrameSequence& frames) {
    if (frames.size() < 2) throw InvalidArgument("simulate_events: need at least 2 frames");
    for (std::size_t k = 0; k < frames.size(); ++k) {
        validate_frame(frames[k]);
        if (!frames[k].same_extent(frames[0])) {
            throw InvalidArgument("simulate_events: frame " + std::to_string(k) + " extent differs from frame 0");
        }
        if (k > 0 && frames[k].t <= frames[k - 1].t) {
            throw InvalidArgument("simulate_events: timestamps must be strictly increasing (frame " +
                                  std::to_string(k) + ")");
        }
    }
    if (frames[0].t < 0) throw InvalidArgument("simulate_events: timestamps must be non-negative");
}

Micros crossing_time(Micros ta, Micros tb, double frac) {
    const Micros t = ta + static_cast<Micros>(std::llround(frac * static_cast<double>(tb - ta)));
    return std::clamp(t, ta + 1, tb);
}

}  // namespace

void SimConfig::validate() const {
    if (!(c > 0.0) || !std::isfinite(c)) throw InvalidArgument("sim.c: contrast threshold must be > 0");
    if (!(log_floor > 0.0) || !std::isfinite(log_floor)) throw InvalidArgument("sim.log_floor: must be > 0");
    if (!(noise_rate >= 0.0) || !std::isfinite(noise_rate)) throw InvalidArgument("sim.noise_rate: must be >= 0");
}

EventStream simulate_events(const FrameSequence& frames, const SimConfig& config) {
    config.validate();
    check_sequence(frames);

    const int w = frames[0].width;
    const int h = frames[0].height;
    const Micros t_start = frames.front().t;
    const Micros t_end = frames.back().t;
    const double c = config.c;

    std::vector<std::vector<Event>> per_row(h);
    parallel_for(static_cast<std::size_t>(h), [&](std::size_t y0, std::size_t y1) {
        for (std::size_t y = y0; y < y1; ++y) {
            auto& out = per_row[y];
            for (int x = 0; x < w; ++x) {
                const auto ex = static_cast<std::uint16_t>(x);
                const auto ey = static_cast<std::uint16_t>(y);
                double la = std::log(frames[0].at(x, static_cast<int>(y)) + config.log_floor);
                double ref = la;
                for (std::size_t k = 1; k < frames.size(); ++k) {
                    const double lb = std::log(frames[k].at(x, static_cast<int>(y)) + config.log_floor);
                    const Micros ta = frames[k - 1].t;
                    const Micros tb = frames[k].t;
                    if (lb > la) {
                        while (ref + c <= lb + kCrossTolerance) {
                            ref += c;
                            const double frac = std::clamp((ref - la) / (lb - la), 0.0, 1.0);
                            out.push_back(Event{ex, ey, crossing_time(ta, tb, frac), 1});
                        }
                    } else if (lb < la) {
                        while (ref - c >= lb - kCrossTolerance) {
                            ref -= c;
                            const double frac = std::clamp((la - ref) / (la - lb), 0.0, 1.0);
                            out.push_back(Event{ex, ey, crossing_time(ta, tb, frac), -1});
                        }
                    }
                    la = lb;
                }

                if (config.noise_rate > 0.0 && t_end > t_start) {
                    std::seed_seq seq{static_cast<std::uint32_t>(config.seed & 0xffffffffu),
                                      static_cast<std::uint32_t>(config.seed >> 32),
                                      static_cast<std::uint32_t>(y * w + x)};
                    std::mt19937_64 rng(seq);
                    const double mean = config.noise_rate * static_cast<double>(t_end - t_start) * 1e-6;
                    std::poisson_distribution<int> count(mean);
                    std::uniform_int_distribution<Micros> when(t_start + 1, t_end);
                    std::bernoulli_distribution sign(0.5);
                    const int n = count(rng);
                    for (int i = 0; i < n; ++i) {
                        const Micros t = when(rng);
                        out.push_back(Event{ex, ey, t, static_cast<std::int8_t>(sign(rng) ? 1 : -1)});
                    }
                }
            }
        }
    });

    std::size_t total = 0;
    for (const auto& r : per_row) total += r.size();
    std::vector<Event> events;
    events.reserve(total);
    for (auto& r : per_row) events.insert(events.end(), r.begin(), r.end());
    std::stable_sort(events.begin(), events.end(), event_order);
    return EventStream(w, h, t_start, t_end, std::move(events));
}

Frame reconstruct_intensity(const Frame& i0, const EventStream& stream, double c, Micros tau, double log_floor) {
    if (!(c > 0.0)) throw InvalidArgument("reconstruct_intensity: c must be > 0");
    if (log_floor < 0.0) throw InvalidArgument("reconstruct_intensity: log_floor must be >= 0");
    if (tau < stream.t_start() || tau > stream.t_end()) {
        throw InvalidArgument("reconstruct_intensity: tau " + std::to_string(tau) + " outside stream span");
    }
    if (i0.width != stream.width() || i0.height != stream.height()) {
        throw InvalidArgument("reconstruct_intensity: frame extent does not match stream");
    }
    const std::vector<int> sums = polarity_sums(stream, stream.t_start(), tau);
    Frame out(i0.width, i0.height, tau);
    for (std::size_t i = 0; i < out.data.size(); ++i) {
        const double v = (i0.data[i] + log_floor) * std::exp(c * sums[i]) - log_floor;
        out.data[i] = std::clamp(v, 0.0, 1.0);
    }
    return out;
}

}  // namespace evmag
