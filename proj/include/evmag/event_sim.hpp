#pragma once

// Ideal event camera: frames in, events out, and the inverse mapping used to
// check round trips.

#include <cstdint>

#include "evmag/event_core.hpp"

namespace evmag {

struct SimConfig {
    double c = 0.2;                  // contrast threshold, log-intensity units
    double log_floor = 1.0 / 255.0;  // offset added before every logarithm
    double noise_rate = 0.0;         // spurious events per pixel per second
    std::uint64_t seed = 0;          // noise RNG seed

    void validate() const;
};

// Per pixel, log(I + log_floor) is interpolated linearly between frames; every
// crossing of ref +/- c emits one event at the interpolated crossing time and
// moves ref by exactly +/- c. Sub-threshold residue carries into later frames.
// With noise_rate > 0, Poisson-distributed spurious events of random polarity
// are added, drawn per pixel from (seed, pixel index).
EventStream simulate_events(const FrameSequence& frames, const SimConfig& config);

// I0(u) * exp(c * S(u)) with S the signed event count over [t_start, tau],
// clamped to [0, 1]. A non-zero log_floor applies the same offset the simulator
// used: (I0 + floor) * exp(c * S) - floor.
Frame reconstruct_intensity(const Frame& i0, const EventStream& stream, double c, Micros tau,
                            double log_floor = 0.0);

}  // namespace evmag
