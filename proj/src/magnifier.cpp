#include "evmag/magnifier.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "evmag/error.hpp"
#include "evmag/fft.hpp"
#include "evmag/parallel.hpp"

namespace evmag {

void FilterSpec::validate() const {
    if (!(fps > 0.0) || !std::isfinite(fps)) throw InvalidArgument("filter.fps: must be > 0");
    if (!(f_lo >= 0.0)) throw InvalidArgument("filter.f_lo: must be >= 0");
    if (!(f_hi > f_lo)) throw InvalidArgument("filter.f_hi: must exceed f_lo");
    if (f_hi > fps / 2.0) throw InvalidArgument("filter.f_hi: must not exceed fps/2 (" + std::to_string(fps / 2.0) + ")");
}

std::vector<double> temporal_bandpass_stack(std::span<const double> data, std::size_t n, std::size_t count,
                                            const FilterSpec& spec) {
    spec.validate();
    if (n < 4) throw InvalidArgument("temporal_bandpass: series must have at least 4 samples");
    if (data.size() != n * count) throw InvalidArgument("temporal_bandpass: data size mismatch");
    auto bins = fft::rfft_strided(data, n, count);
    for (std::size_t k = 0; k <= n / 2; ++k) {
        const double f = fft::bin_frequency(k, n, spec.fps);
        if (f >= spec.f_lo && f <= spec.f_hi) continue;
        std::fill_n(bins.begin() + static_cast<std::ptrdiff_t>(k * count), count, fft::Complex{});
    }
    return fft::irfft_strided(bins, n, count);
}

std::vector<double> temporal_bandpass(std::span<const double> series, const FilterSpec& spec) {
    return temporal_bandpass_stack(series, series.size(), 1, spec);
}

double sample_bilinear(const Frame& f, double x, double y) {
    x = std::clamp(x, 0.0, static_cast<double>(f.width - 1));
    y = std::clamp(y, 0.0, static_cast<double>(f.height - 1));
    const int x0 = static_cast<int>(std::floor(x));
    const int y0 = static_cast<int>(std::floor(y));
    const int x1 = std::min(x0 + 1, f.width - 1);
    const int y1 = std::min(y0 + 1, f.height - 1);
    const double ax = x - x0;
    const double ay = y - y0;
    const double top = f.at(x0, y0) * (1.0 - ax) + f.at(x1, y0) * ax;
    const double bot = f.at(x0, y1) * (1.0 - ax) + f.at(x1, y1) * ax;
    return top * (1.0 - ay) + bot * ay;
}

Frame warp_magnified(const Frame& i0, const MotionField& field, double alpha) {
    if (!(alpha >= 0.0) || !std::isfinite(alpha)) throw InvalidArgument("warp_magnified: alpha must be >= 0");
    if (i0.width != field.width || i0.height != field.height) {
        throw InvalidArgument("warp_magnified: motion field extent does not match the frame");
    }
    Frame out(i0.width, i0.height, field.tau);
    const double gain = 1.0 + alpha;
    for (int y = 0; y < i0.height; ++y) {
        for (int x = 0; x < i0.width; ++x) {
            const std::size_t i = static_cast<std::size_t>(y) * i0.width + x;
            if (!field.valid[i]) {
                out.data[i] = i0.data[i];
                continue;
            }
            out.data[i] = sample_bilinear(i0, x - gain * field.dx[i], y - gain * field.dy[i]);
        }
    }
    return out;
}

MagnifyResult magnify_sequence(const MagnifyRequest& req) {
    validate_frame(req.i0);
    validate_frame(req.i1);
    req.solver.validate();
    if (!req.i0.same_extent(req.i1)) throw InvalidArgument("magnify: keyframe extents differ");
    if (req.i0.width != req.stream.width() || req.i0.height != req.stream.height()) {
        throw InvalidArgument("magnify: keyframe extent does not match the event stream");
    }
    if (req.n_frames < 1) throw InvalidArgument("magnify: n_frames must be >= 1");
    if (!(req.alpha >= 0.0)) throw InvalidArgument("magnify: alpha must be >= 0");
    if (!(req.c > 0.0)) throw InvalidArgument("magnify: c must be > 0");
    if (req.stream.t_end() <= req.stream.t_start()) throw InvalidArgument("magnify: event stream span is empty");

    MagnifyResult result;
    result.empty_stream = req.stream.empty();
    result.motion = motion_field_series(req.i0, req.stream, req.c, req.n_frames, req.solver);

    if (req.filter) {
        FilterSpec spec = *req.filter;
        if (spec.fps <= 0.0) {
            spec.fps = req.n_frames * 1e6 / static_cast<double>(req.stream.t_end() - req.stream.t_start());
        }
        spec.validate();
        result.filter = spec;

        // Validity is fixed by the keyframe, so the valid set is the same at every step.
        const auto& valid = result.motion.front().valid;
        std::vector<std::size_t> idx;
        for (std::size_t i = 0; i < valid.size(); ++i) {
            if (valid[i]) idx.push_back(i);
        }
        const std::size_t n = result.motion.size();
        const std::size_t m = idx.size();
        if (m > 0) {
            std::vector<double> sx(n * m);
            std::vector<double> sy(n * m);
            for (std::size_t t = 0; t < n; ++t) {
                for (std::size_t j = 0; j < m; ++j) {
                    sx[t * m + j] = result.motion[t].dx[idx[j]];
                    sy[t * m + j] = result.motion[t].dy[idx[j]];
                }
            }
            const auto fx = temporal_bandpass_stack(sx, n, m, spec);
            const auto fy = temporal_bandpass_stack(sy, n, m, spec);
            for (std::size_t t = 0; t < n; ++t) {
                for (std::size_t j = 0; j < m; ++j) {
                    result.motion[t].dx[idx[j]] = fx[t * m + j];
                    result.motion[t].dy[idx[j]] = fy[t * m + j];
                }
            }
        }
    }

    result.frames.resize(result.motion.size());
    parallel_for(result.motion.size(), [&](std::size_t b, std::size_t e) {
        for (std::size_t k = b; k < e; ++k) result.frames[k] = warp_magnified(req.i0, result.motion[k], req.alpha);
    });
    result.valid_fraction =
        static_cast<double>(result.motion.front().valid_count()) / static_cast<double>(req.i0.size());
    return result;
}

}  // namespace evmag
