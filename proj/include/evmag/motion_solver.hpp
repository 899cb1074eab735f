#pragma once

// Closed-form sub-pixel motion from one keyframe plus signed event counts.
//
// Under a first-order brightness model, a pixel whose log intensity rose by
// c * S(u) after a displacement d satisfies s(u) . d = c * S(u), where
// s = -grad(I) / I is the contrast map. Assuming d constant over a square
// window, d is the least-squares solution over the window's pixels.

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "evmag/event_core.hpp"

namespace evmag {

struct SolverConfig {
    int window = 5;                        // odd side length of the square window
    double reg_lambda = 1e-6;              // Tikhonov term added to the normal matrix
    double min_eig = 1e-4;                 // validity threshold on the unregularised normal matrix
    double intensity_floor = 1.0 / 255.0;  // pixels darker than this carry no contrast

    void validate() const;
};

struct ContrastMap {
    int width = 0;
    int height = 0;
    std::vector<double> s_x;  // 1/pixel
    std::vector<double> s_y;
    std::vector<std::uint8_t> valid;
};

struct MotionField {
    int width = 0;
    int height = 0;
    Micros tau = 0;
    std::vector<double> dx;  // pixels
    std::vector<double> dy;
    std::vector<std::uint8_t> valid;

    std::size_t valid_count() const;
};

enum class Axis { X, Y };

struct Displacement1D {
    std::vector<double> delta;
    std::vector<std::uint8_t> valid;
};

// Central differences with replicated borders; s = -grad / max(I, floor).
// Pixels below the intensity floor are invalid and carry s = 0.
ContrastMap contrast_map(const Frame& i0, const SolverConfig& cfg);

// delta(u) = c * sum_P s * psum / (sum_P s^2 + lambda) along one axis.
// Windows are clipped at the image border. A pixel is invalid (delta = 0)
// when the unregularised denominator is below min_eig.
Displacement1D solve_motion_1d(const ContrastMap& cmap, std::span<const int> psum, double c, const SolverConfig& cfg,
                               Axis axis);

// Lucas-Kanade style 2x2 normal equations per window:
//   G = sum_P [sx^2, sx*sy; sx*sy, sy^2] + lambda*I,  r = c * sum_P [sx*psum; sy*psum],  d = G^-1 r.
// Invalid when the smallest eigenvalue of the unregularised G is below min_eig.
MotionField solve_motion_2d(const ContrastMap& cmap, std::span<const int> psum, double c, const SolverConfig& cfg);

// Reusable 2D solver for one contrast map: the normal matrices depend only on
// the keyframe, so they are summed once and each call only sums r.
class WindowedMotionSolver {
public:
    WindowedMotionSolver(const ContrastMap& cmap, const SolverConfig& cfg);

    MotionField solve(std::span<const int> psum, double c, Micros tau = 0) const;
    const std::vector<std::uint8_t>& valid() const { return valid_; }

private:
    int width_;
    int height_;
    int radius_;
    const ContrastMap* cmap_;
    std::vector<double> inv_xx_;  // entries of G^-1 (regularised), zero where invalid
    std::vector<double> inv_xy_;
    std::vector<double> inv_yy_;
    std::vector<std::uint8_t> valid_;
};

// Motion fields at tau_k = t_start + k*(t_end - t_start)/n_steps, k = 1..n_steps
// (integer microseconds, rounded down), each solved from the signed event counts
// accumulated since t_start. Every event is visited once.
std::vector<MotionField> motion_field_series(const Frame& i0, const EventStream& stream, double c, int n_steps,
                                             const SolverConfig& cfg);

// Window sums over a (2r+1)^2 box clipped at the border, via a summed-area
// table accumulated in extended precision.
std::vector<double> box_sum(std::span<const double> values, int width, int height, int radius);

// Export: CSV `x,y,dx,dy,valid`, and a dense raster:
//   "EVMF" | version u16 | width u16 | height u16 | pad u16 | tau i64 |
//   dx f32[h*w] | dy f32[h*w] | valid u8[h*w]     (little-endian)
std::string motion_field_csv(const MotionField& field);
void write_motion_raster(const std::filesystem::path& path, const MotionField& field);
MotionField read_motion_raster(const std::filesystem::path& path);

}  // namespace evmag
