#pragma once

#include <optional>
#include <span>
#include <vector>

#include "evmag/event_core.hpp"
#include "evmag/motion_solver.hpp"

namespace evmag {

// Ideal temporal band-pass: DFT bins with |f| outside [f_lo, f_hi] are zeroed.
struct FilterSpec {
    double fps = 0.0;  // sampling rate of the series, Hz
    double f_lo = 0.0;
    double f_hi = 0.0;

    void validate() const;
};

struct MagnifyRequest {
    Frame i0;
    Frame i1;
    EventStream stream;
    double alpha = 0.0;
    int n_frames = 1;
    std::optional<FilterSpec> filter;  // fps is taken from n_frames / span when <= 0
    SolverConfig solver;
    double c = 0.2;
};

struct MagnifyResult {
    FrameSequence frames;
    std::vector<MotionField> motion;  // per output frame, after filtering (unscaled by alpha)
    std::optional<FilterSpec> filter;  // as applied, with fps resolved
    bool empty_stream = false;         // warning: no events, output is the keyframe repeated
    double valid_fraction = 0.0;
};

// Filters one series of length n >= 4.
std::vector<double> temporal_bandpass(std::span<const double> series, const FilterSpec& spec);

// Filters `count` interleaved series: sample t of series j is data[t * count + j].
// Used for per-pixel filtering of a frame stack.
std::vector<double> temporal_bandpass_stack(std::span<const double> data, std::size_t n, std::size_t count,
                                            const FilterSpec& spec);

// Backward warp I0(u - (1 + alpha) * d(u)), bilinear, border-clamped. Invalid
// pixels copy I0.
Frame warp_magnified(const Frame& i0, const MotionField& field, double alpha);

// contrast map -> motion series -> optional band-pass of dx and dy at valid
// pixels -> warp with alpha. Output frame k is stamped with the k-th motion
// step time.
MagnifyResult magnify_sequence(const MagnifyRequest& req);

// Bilinear sample with border clamping.
double sample_bilinear(const Frame& f, double x, double y);

}  // namespace evmag
