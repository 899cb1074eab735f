#include "evmag/metrics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>

#include "evmag/error.hpp"
#include "evmag/fft.hpp"

namespace evmag {

namespace {

void require_same_extent(const Frame& a, const Frame& b, const char* who) {
    if (!a.same_extent(b) || a.data.size() != b.data.size()) {
        throw InvalidArgument(std::string(who) + ": frame extents differ (" + std::to_string(a.width) + "x" +
                              std::to_string(a.height) + " vs " + std::to_string(b.width) + "x" +
                              std::to_string(b.height) + ")");
    }
}

constexpr int kSsimWindow = 11;
constexpr double kSsimSigma = 1.5;

std::array<double, kSsimWindow> gaussian_taps() {
    std::array<double, kSsimWindow> g{};
    double sum = 0.0;
    for (int i = 0; i < kSsimWindow; ++i) {
        const double d = i - kSsimWindow / 2;
        g[i] = std::exp(-d * d / (2.0 * kSsimSigma * kSsimSigma));
        sum += g[i];
    }
    for (double& v : g) v /= sum;
    return g;
}

// Separable "valid" Gaussian filter: output is (w-10) x (h-10).
std::vector<double> filter_valid(const std::vector<double>& img, int w, int h) {
    static const auto g = gaussian_taps();
    const int ow = w - kSsimWindow + 1;
    const int oh = h - kSsimWindow + 1;
    std::vector<double> tmp(static_cast<std::size_t>(ow) * h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < ow; ++x) {
            double s = 0.0;
            for (int k = 0; k < kSsimWindow; ++k) s += g[k] * img[static_cast<std::size_t>(y) * w + x + k];
            tmp[static_cast<std::size_t>(y) * ow + x] = s;
        }
    }
    std::vector<double> out(static_cast<std::size_t>(ow) * oh);
    for (int y = 0; y < oh; ++y) {
        for (int x = 0; x < ow; ++x) {
            double s = 0.0;
            for (int k = 0; k < kSsimWindow; ++k) s += g[k] * tmp[static_cast<std::size_t>(y + k) * ow + x];
            out[static_cast<std::size_t>(y) * ow + x] = s;
        }
    }
    return out;
}

}  // namespace

double psnr(const Frame& a, const Frame& b, double peak) {
    require_same_extent(a, b, "psnr");
    if (!(peak > 0.0)) throw InvalidArgument("psnr: peak must be > 0");
    double sse = 0.0;
    for (std::size_t i = 0; i < a.data.size(); ++i) {
        const double d = a.data[i] - b.data[i];
        sse += d * d;
    }
    const double mse = sse / static_cast<double>(a.data.size());
    if (mse == 0.0) return std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(peak * peak / mse);
}

double psnr_for_output(double db) { return std::min(db, kPsnrCapDb); }

double ssim(const Frame& a, const Frame& b) {
    require_same_extent(a, b, "ssim");
    if (a.width < kSsimWindow || a.height < kSsimWindow) {
        throw InvalidArgument("ssim: frames must be at least 11x11");
    }
    const int w = a.width;
    const int h = a.height;
    const auto& x = a.data;
    const auto& y = b.data;
    std::vector<double> xx(x.size());
    std::vector<double> yy(x.size());
    std::vector<double> xy(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        xx[i] = x[i] * x[i];
        yy[i] = y[i] * y[i];
        xy[i] = x[i] * y[i];
    }
    const auto mx = filter_valid(x, w, h);
    const auto my = filter_valid(y, w, h);
    const auto sxx = filter_valid(xx, w, h);
    const auto syy = filter_valid(yy, w, h);
    const auto sxy = filter_valid(xy, w, h);

    constexpr double c1 = (0.01 * 1.0) * (0.01 * 1.0);
    constexpr double c2 = (0.03 * 1.0) * (0.03 * 1.0);
    double total = 0.0;
    for (std::size_t i = 0; i < mx.size(); ++i) {
        const double mux = mx[i];
        const double muy = my[i];
        const double vx = sxx[i] - mux * mux;
        const double vy = syy[i] - muy * muy;
        const double cov = sxy[i] - mux * muy;
        total += ((2 * mux * muy + c1) * (2 * cov + c2)) / ((mux * mux + muy * muy + c1) * (vx + vy + c2));
    }
    return total / static_cast<double>(mx.size());
}

Probe Probe::rect(int x, int y, int w, int h, int frame_width, int frame_height) {
    if (w <= 0 || h <= 0 || x < 0 || y < 0 || x + w > frame_width || y + h > frame_height) {
        throw InvalidArgument("probe rectangle " + std::to_string(x) + "," + std::to_string(y) + "," +
                              std::to_string(w) + "," + std::to_string(h) + " outside the frame");
    }
    Probe p;
    for (int yy = y; yy < y + h; ++yy) {
        for (int xx = x; xx < x + w; ++xx) p.pixels.push_back(static_cast<std::size_t>(yy) * frame_width + xx);
    }
    p.descriptor = "rect:" + std::to_string(x) + "," + std::to_string(y) + "," + std::to_string(w) + "," +
                   std::to_string(h);
    return p;
}

Probe Probe::auto_select(const FrameSequence& frames) {
    if (frames.empty()) throw InvalidArgument("auto probe: empty sequence");
    const std::size_t n = frames.front().size();
    std::vector<double> mean(n, 0.0);
    std::vector<double> var(n, 0.0);
    for (const Frame& f : frames) {
        for (std::size_t i = 0; i < n; ++i) mean[i] += f.data[i];
    }
    for (double& m : mean) m /= static_cast<double>(frames.size());
    for (const Frame& f : frames) {
        for (std::size_t i = 0; i < n; ++i) {
            const double d = f.data[i] - mean[i];
            var[i] += d * d;
        }
    }
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    const std::size_t keep = std::max<std::size_t>(1, n / 10);
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(keep), order.end(),
                      [&](std::size_t a, std::size_t b) { return var[a] > var[b] || (var[a] == var[b] && a < b); });
    Probe p;
    p.pixels.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(keep));
    std::sort(p.pixels.begin(), p.pixels.end());
    p.descriptor = "auto:top-decile-variance(" + std::to_string(keep) + " px)";
    return p;
}

FrequencyReport dominant_frequency_of_series(std::span<const double> series, double fps) {
    if (series.size() < 8) throw InvalidArgument("dominant_frequency: need at least 8 samples");
    if (!(fps > 0.0)) throw InvalidArgument("dominant_frequency: fps must be > 0");
    const std::size_t n = series.size();
    const double mean = std::accumulate(series.begin(), series.end(), 0.0) / static_cast<double>(n);
    std::vector<double> centred(series.begin(), series.end());
    for (double& v : centred) v -= mean;
    const auto bins = fft::rfft(centred);

    FrequencyReport r;
    r.fps = fps;
    r.resolution_hz = fps / static_cast<double>(n);
    r.spectrum.resize(bins.size());
    std::size_t best = 0;
    double best_amp = 0.0;
    for (std::size_t k = 0; k < bins.size(); ++k) {
        // single-sided: interior bins doubled, DC and Nyquist not
        const bool edge = k == 0 || (n % 2 == 0 && k == n / 2);
        const double amp = std::abs(bins[k]) * (edge ? 1.0 : 2.0) / static_cast<double>(n);
        r.spectrum[k] = {fft::bin_frequency(k, n, fps), amp};
        if (k > 0 && amp > best_amp) {
            best_amp = amp;
            best = k;
        }
    }
    // Anything below this is rounding residue of a constant series.
    constexpr double kZeroAmplitude = 1e-12;
    if (best == 0 || best_amp <= kZeroAmplitude) {
        r.zero_amplitude = true;
        r.dominant_hz = 0.0;
    } else {
        r.dominant_hz = r.spectrum[best].freq_hz;
    }
    return r;
}

FrequencyReport dominant_frequency(const FrameSequence& frames, const Probe& probe, double fps) {
    if (frames.size() < 8) throw InvalidArgument("dominant_frequency: need at least 8 frames");
    if (probe.pixels.empty()) throw InvalidArgument("dominant_frequency: empty probe");
    std::vector<double> series;
    series.reserve(frames.size());
    for (const Frame& f : frames) {
        double s = 0.0;
        for (std::size_t i : probe.pixels) {
            if (i >= f.data.size()) throw InvalidArgument("dominant_frequency: probe outside frame");
            s += f.data[i];
        }
        series.push_back(s / static_cast<double>(probe.pixels.size()));
    }
    FrequencyReport r = dominant_frequency_of_series(series, fps);
    r.probe = probe.descriptor;
    return r;
}

double rmse_freq(std::span<const double> estimated_hz, std::span<const double> truth_hz) {
    if (estimated_hz.size() != truth_hz.size()) throw InvalidArgument("rmse_freq: list lengths differ");
    if (truth_hz.empty()) throw InvalidArgument("rmse_freq: empty input");
    double sum = 0.0;
    for (std::size_t i = 0; i < truth_hz.size(); ++i) {
        if (!(truth_hz[i] > 0.0)) throw InvalidArgument("rmse_freq: truth entries must be > 0");
        const double rel = (estimated_hz[i] - truth_hz[i]) / truth_hz[i];
        sum += rel * rel;
    }
    return sum / static_cast<double>(truth_hz.size());
}

}  // namespace evmag
