#pragma once

// Synthetic sub-pixel motion scenes: a foreground sprite composited over a
// background at a supersampled resolution, translated by whole supersampled
// cells, then bicubic-downsampled. One supersampled cell is 1/supersample of
// an output pixel, which is how sub-pixel ground truth is produced.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "evmag/event_core.hpp"
#include "evmag/event_sim.hpp"

namespace evmag {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    friend bool operator==(const Vec2&, const Vec2&) = default;
};

struct Trajectory {
    enum class Kind { Sinusoid, Spline };

    Kind kind = Kind::Sinusoid;
    double amplitude_px = 0.25;  // output-resolution pixels
    double freq_hz = 32.0;       // sinusoid only
    double phase = 0.0;          // radians
    Vec2 direction{1.0, 0.0};    // unit vector
    int n_frames = 30;
    double fps = 960.0;
    std::uint64_t seed = 0;  // spline only
    int spline_spacing = 8;  // frames between spline control points

    void validate() const;
};

// One displacement per frame, zero at frame 0, magnitude <= amplitude_px.
// Sinusoid: A * (sin(w t + phase) - sin(phase)) / (1 + |sin(phase)|) along
// `direction`, which is A * sin(w t) for phase 0. Spline: cosine-eased path
// through seeded control points in [-A, A] along `direction`, the first one 0.
std::vector<Vec2> generate_trajectory(const Trajectory& spec);

struct SceneSpec {
    Frame background;  // supersampled: (out_width * supersample) x (out_height * supersample)
    Frame foreground;  // supersampled sprite
    Frame alpha;       // sprite coverage in [0, 1], same extent as foreground
    int fg_x = 0;      // sprite top-left on the supersampled grid at zero displacement
    int fg_y = 0;
    int supersample = 16;
    int out_width = 0;
    int out_height = 0;
    Trajectory trajectory;
    double alpha_mag = 0.0;  // magnified sequence uses (1 + alpha_mag) * displacement
    Micros t0 = 0;

    void validate() const;
};

struct RenderedScene {
    FrameSequence small;
    FrameSequence magnified;
    std::vector<Vec2> gt_motion;        // commanded displacement, output pixels
    std::vector<Vec2> realized_small;   // after rounding to whole supersampled cells
    std::vector<Vec2> realized_magnified;
};

// Timestamp of frame k: t0 + round(k * 1e6 / fps) microseconds.
Micros frame_time(Micros t0, int k, double fps);

RenderedScene render_scene(const SceneSpec& spec);

// Antialiased bicubic (Catmull-Rom) reduction by an integer factor.
Frame bicubic_downsample(const Frame& hi, int factor);

// --- procedural content -------------------------------------------------------

// Multi-octave value noise in [lo, hi].
Frame value_noise(int width, int height, double cell, int octaves, double lo, double hi, std::uint64_t seed);

struct BarSceneOptions {
    int out_width = 96;
    int out_height = 96;
    int supersample = 16;
    int bar_width = 32;   // output pixels, wider than the magnified excursion
    int bar_height = 48;  // output pixels
    double bar_level = 0.85;
    double background_lo = 0.06;
    double background_hi = 0.16;
    Trajectory trajectory;  // defaults: 0.25 px, 32 Hz, 960 fps
    double alpha_mag = 50.0;
    std::uint64_t seed = 0;  // background texture
};

// Tuning-fork style scene: a bright vertical bar over a dark textured
// background, centred, oscillating along the trajectory.
SceneSpec make_bar_scene(const BarSceneOptions& opts);

// --- dataset ----------------------------------------------------------------

struct DatasetConfig {
    int n_scenes = 1;
    std::uint64_t seed = 0;
    int out_width = 128;
    int out_height = 128;
    int supersample = 16;
    int n_frames = 30;
    double fps = 960.0;
    double alpha_min = 30.0;
    double alpha_max = 80.0;
    double amplitude_min = 0.0625;
    double amplitude_max = 0.4;
    double freq_min = 20.0;
    double freq_max = 120.0;
    double spline_fraction = 0.5;  // probability that a scene uses a spline path
    bool write_16bit = false;      // also emit small16/ and magnified16/
    SimConfig sim;
    std::optional<std::filesystem::path> background_dir;
    std::optional<std::filesystem::path> foreground_dir;

    void validate() const;
};

struct SceneRecord {
    int index = 0;
    std::string dir;
    std::uint64_t seed = 0;
    double alpha_mag = 0.0;
    Trajectory trajectory;
    std::size_t n_events = 0;
};

struct Manifest {
    DatasetConfig config;
    std::vector<SceneRecord> scenes;
};

// Random scene for dataset index `index` (deterministic in (seed, index)).
SceneSpec make_random_scene(const DatasetConfig& cfg, int index, std::uint64_t scene_seed);

// Per-scene seed derived from the dataset seed and scene index.
std::uint64_t scene_seed(std::uint64_t dataset_seed, int index);

// Writes scene_####/{small,magnified}/####.png, events.evmg, gt_motion.csv,
// scene.json, plus manifest.json at the root. I/O errors name the scene index.
Manifest generate_dataset(const DatasetConfig& cfg, const std::filesystem::path& out_dir);

std::string trajectory_kind_name(Trajectory::Kind k);

}  // namespace evmag
