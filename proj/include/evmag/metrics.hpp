#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "evmag/event_core.hpp"

namespace evmag {

// 10*log10(peak^2 / MSE). Identical frames give +infinity.
double psnr(const Frame& a, const Frame& b, double peak = 1.0);

// Value written to files in place of an infinite PSNR.
inline constexpr double kPsnrCapDb = 100.0;
double psnr_for_output(double db);

// Mean SSIM over all fully-contained 11x11 Gaussian windows (sigma 1.5),
// K1 = 0.01, K2 = 0.03, dynamic range 1. Both sides must be >= 11.
double ssim(const Frame& a, const Frame& b);

// Pixel set whose mean intensity forms the probe series.
struct Probe {
    std::vector<std::size_t> pixels;  // row-major indices
    std::string descriptor;

    static Probe rect(int x, int y, int w, int h, int frame_width, int frame_height);
    // Top decile of per-pixel temporal variance across the sequence.
    static Probe auto_select(const FrameSequence& frames);
};

struct SpectrumBin {
    double freq_hz = 0.0;
    double amplitude = 0.0;
};

struct FrequencyReport {
    std::string probe;
    double fps = 0.0;
    double dominant_hz = 0.0;
    double resolution_hz = 0.0;
    bool zero_amplitude = false;  // series had no oscillation
    std::vector<SpectrumBin> spectrum;  // bins 0..n/2, single-sided amplitude
};

// Mean removed, then single-sided DFT amplitude; dominant = argmax over non-DC bins.
FrequencyReport dominant_frequency_of_series(std::span<const double> series, double fps);

// Probe-mean intensity per frame, then dominant_frequency_of_series. Needs >= 8 frames.
FrequencyReport dominant_frequency(const FrameSequence& frames, const Probe& probe, double fps);

// Mean over entries of ((est - truth) / truth)^2.
double rmse_freq(std::span<const double> estimated_hz, std::span<const double> truth_hz);

}  // namespace evmag
