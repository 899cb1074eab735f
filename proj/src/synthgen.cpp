#include "evmag/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>
#include <string>

#include "evmag/config_json.hpp"
#include "evmag/error.hpp"
#include "evmag/io.hpp"
#include "evmag/parallel.hpp"

namespace evmag {

namespace fs = std::filesystem;

// --- trajectories -------------------------------------------------------------

void Trajectory::validate() const {
    if (!(amplitude_px >= 0.0) || !std::isfinite(amplitude_px)) {
        throw InvalidArgument("amplitude_px must be finite and >= 0");
    }
    if (n_frames < 1) throw InvalidArgument("n_frames must be >= 1");
    if (!(fps > 0.0)) throw InvalidArgument("fps must be > 0");
    if (!std::isfinite(phase)) throw InvalidArgument("phase must be finite");
    const double norm = std::hypot(direction.x, direction.y);
    if (std::abs(norm - 1.0) > 1e-6) throw InvalidArgument("direction must be a unit vector");
    if (kind == Kind::Sinusoid) {
        if (!(freq_hz > 0.0)) throw InvalidArgument("freq_hz must be > 0");
        if (freq_hz >= fps / 2.0) throw InvalidArgument("freq_hz must be below fps/2 (aliased ground truth)");
    } else if (spline_spacing < 1) {
        throw InvalidArgument("spline_spacing must be >= 1");
    }
}

std::vector<Vec2> generate_trajectory(const Trajectory& spec) {
    spec.validate();
    std::vector<double> scalar(spec.n_frames, 0.0);
    if (spec.kind == Trajectory::Kind::Sinusoid) {
        const double w = 2.0 * std::numbers::pi * spec.freq_hz / spec.fps;
        const double s0 = std::sin(spec.phase);
        const double norm = 1.0 + std::abs(s0);
        for (int k = 0; k < spec.n_frames; ++k) {
            scalar[k] = spec.amplitude_px * (std::sin(w * k + spec.phase) - s0) / norm;
        }
    } else {
        std::mt19937_64 rng(spec.seed);
        std::uniform_real_distribution<double> level(-spec.amplitude_px, spec.amplitude_px);
        const int spacing = spec.spline_spacing;
        const int n_ctrl = (spec.n_frames - 1) / spacing + 2;
        std::vector<double> ctrl(n_ctrl, 0.0);
        for (int i = 1; i < n_ctrl; ++i) ctrl[i] = level(rng);
        for (int k = 0; k < spec.n_frames; ++k) {
            const int seg = k / spacing;
            const double u = static_cast<double>(k % spacing) / spacing;
            const double ease = 0.5 - 0.5 * std::cos(std::numbers::pi * u);  // C1 at control points
            scalar[k] = ctrl[seg] + (ctrl[seg + 1] - ctrl[seg]) * ease;
        }
    }
    std::vector<Vec2> out(spec.n_frames);
    // + 0.0 turns -0 into 0 so exported files stay tidy
    for (int k = 0; k < spec.n_frames; ++k)
        out[k] = {scalar[k] * spec.direction.x + 0.0, scalar[k] * spec.direction.y + 0.0};
    return out;
}

// --- rendering ----------------------------------------------------------------

namespace {

double catmull_rom(double d) {
    d = std::abs(d);
    if (d <= 1.0) return (1.5 * d - 2.5) * d * d + 1.0;
    if (d < 2.0) return ((-0.5 * d + 2.5) * d - 4.0) * d + 2.0;
    return 0.0;
}

// Taps for output pixel j: hi-res index j*factor + offset[m], weight[m].
struct DownsampleKernel {
    std::vector<int> offset;
    std::vector<double> weight;

    explicit DownsampleKernel(int factor) {
        const double centre = (factor - 1) / 2.0;
        double sum = 0.0;
        for (int m = -2 * factor; m <= 3 * factor; ++m) {
            const double w = catmull_rom((m - centre) / factor);
            if (w == 0.0) continue;
            offset.push_back(m);
            weight.push_back(w);
            sum += w;
        }
        for (double& w : weight) w /= sum;
    }
};

// Hi-res composite of background and a shifted sprite, sampled lazily.
struct Composite {
    const SceneSpec* spec;
    int sx;  // sprite top-left on the hi-res grid
    int sy;

    double operator()(int x, int y) const {
        const Frame& bg = spec->background;
        x = std::clamp(x, 0, bg.width - 1);
        y = std::clamp(y, 0, bg.height - 1);
        const double b = bg.at(x, y);
        const int fx = x - sx;
        const int fy = y - sy;
        if (fx < 0 || fy < 0 || fx >= spec->foreground.width || fy >= spec->foreground.height) return b;
        const double a = spec->alpha.at(fx, fy);
        return a * spec->foreground.at(fx, fy) + (1.0 - a) * b;
    }
};

// Downsamples the output rectangle [ox0, ox1) x [oy0, oy1) of `src` into `out`.
template <typename Source>
void downsample_rect(const Source& src, int factor, const DownsampleKernel& k, int ox0, int ox1, int oy0, int oy1,
                     Frame& out) {
    if (ox0 >= ox1 || oy0 >= oy1) return;
    const int hy0 = oy0 * factor + k.offset.front();
    const int hy1 = (oy1 - 1) * factor + k.offset.back() + 1;
    const int cols = ox1 - ox0;
    std::vector<double> rows(static_cast<std::size_t>(hy1 - hy0) * cols);
    for (int hy = hy0; hy < hy1; ++hy) {
        double* dst = rows.data() + static_cast<std::size_t>(hy - hy0) * cols;
        for (int ox = ox0; ox < ox1; ++ox) {
            double s = 0.0;
            const int base = ox * factor;
            for (std::size_t m = 0; m < k.offset.size(); ++m) s += k.weight[m] * src(base + k.offset[m], hy);
            dst[ox - ox0] = s;
        }
    }
    for (int oy = oy0; oy < oy1; ++oy) {
        for (int ox = ox0; ox < ox1; ++ox) {
            double s = 0.0;
            const int base = oy * factor;
            for (std::size_t m = 0; m < k.offset.size(); ++m) {
                s += k.weight[m] * rows[static_cast<std::size_t>(base + k.offset[m] - hy0) * cols + (ox - ox0)];
            }
            out.at(ox, oy) = std::clamp(s, 0.0, 1.0);
        }
    }
}

Frame render_frame(const SceneSpec& spec, const Frame& bg_small, const DownsampleKernel& kernel, int shift_x,
                   int shift_y, Micros t) {
    Frame out = bg_small;
    out.t = t;
    const int f = spec.supersample;
    const int x0 = spec.fg_x + shift_x;
    const int y0 = spec.fg_y + shift_y;
    const int x1 = x0 + spec.foreground.width;
    const int y1 = y0 + spec.foreground.height;
    // Output pixels whose kernel footprint touches the sprite.
    const int reach = (kernel.offset.back() - kernel.offset.front()) / f + 2;
    const int ox0 = std::max(0, x0 / f - reach);
    const int ox1 = std::min(spec.out_width, x1 / f + reach);
    const int oy0 = std::max(0, y0 / f - reach);
    const int oy1 = std::min(spec.out_height, y1 / f + reach);
    downsample_rect(Composite{&spec, x0, y0}, f, kernel, ox0, ox1, oy0, oy1, out);
    return out;
}

int cells(double px, int factor) { return static_cast<int>(std::lround(px * factor)); }

}  // namespace

Frame bicubic_downsample(const Frame& hi, int factor) {
    if (factor < 1) throw InvalidArgument("bicubic_downsample: factor must be >= 1");
    if (hi.width % factor != 0 || hi.height % factor != 0) {
        throw InvalidArgument("bicubic_downsample: extent must be a multiple of the factor");
    }
    Frame out(hi.width / factor, hi.height / factor, hi.t);
    if (factor == 1) {
        out.data = hi.data;
        return out;
    }
    const DownsampleKernel kernel(factor);
    auto src = [&hi](int x, int y) {
        return hi.at(std::clamp(x, 0, hi.width - 1), std::clamp(y, 0, hi.height - 1));
    };
    downsample_rect(src, factor, kernel, 0, out.width, 0, out.height, out);
    return out;
}

Micros frame_time(Micros t0, int k, double fps) {
    return t0 + static_cast<Micros>(std::llround(static_cast<double>(k) * 1e6 / fps));
}

void SceneSpec::validate() const {
    if (supersample < 1) throw InvalidArgument("scene.supersample: must be >= 1");
    if (out_width < 1 || out_height < 1) throw InvalidArgument("scene: output extent must be positive");
    if (background.width != out_width * supersample || background.height != out_height * supersample) {
        throw InvalidArgument("scene.background: must be out_width*supersample x out_height*supersample");
    }
    validate_frame(background);
    validate_frame(foreground);
    validate_frame(alpha);
    if (!foreground.same_extent(alpha)) throw InvalidArgument("scene.alpha: must match the foreground extent");
    if (!(alpha_mag >= 0.0)) throw InvalidArgument("scene.alpha_mag: must be >= 0");
    try {
        trajectory.validate();
    } catch (const InvalidArgument& e) {
        throw InvalidArgument(std::string("scene.trajectory: ") + e.what());
    }
    const auto path = generate_trajectory(trajectory);
    for (const Vec2& d : path) {
        for (const double gain : {1.0, 1.0 + alpha_mag}) {
            const int x0 = fg_x + cells(gain * d.x, supersample);
            const int y0 = fg_y + cells(gain * d.y, supersample);
            if (x0 < 0 || y0 < 0 || x0 + foreground.width > background.width ||
                y0 + foreground.height > background.height) {
                throw InvalidArgument("scene: displaced foreground leaves the frame (gain " + std::to_string(gain) +
                                      ")");
            }
        }
    }
}

RenderedScene render_scene(const SceneSpec& spec) {
    spec.validate();
    const int f = spec.supersample;
    const DownsampleKernel kernel(std::max(f, 1));
    Frame bg_small = bicubic_downsample(spec.background, f);

    RenderedScene r;
    r.gt_motion = generate_trajectory(spec.trajectory);
    const int n = spec.trajectory.n_frames;
    r.small.resize(n);
    r.magnified.resize(n);
    r.realized_small.resize(n);
    r.realized_magnified.resize(n);
    const double gain = 1.0 + spec.alpha_mag;

    auto render = [&](int sx, int sy, Micros t) {
        if (f == 1) {
            Frame out(spec.out_width, spec.out_height, t);
            const Composite comp{&spec, spec.fg_x + sx, spec.fg_y + sy};
            for (int y = 0; y < out.height; ++y)
                for (int x = 0; x < out.width; ++x) out.at(x, y) = std::clamp(comp(x, y), 0.0, 1.0);
            return out;
        }
        return render_frame(spec, bg_small, kernel, sx, sy, t);
    };

    parallel_for(static_cast<std::size_t>(n), [&](std::size_t b, std::size_t e) {
        for (std::size_t k = b; k < e; ++k) {
            const Vec2 d = r.gt_motion[k];
            const Micros t = frame_time(spec.t0, static_cast<int>(k), spec.trajectory.fps);
            const int sx = cells(d.x, f);
            const int sy = cells(d.y, f);
            const int mx = cells(gain * d.x, f);
            const int my = cells(gain * d.y, f);
            r.realized_small[k] = {static_cast<double>(sx) / f, static_cast<double>(sy) / f};
            r.realized_magnified[k] = {static_cast<double>(mx) / f, static_cast<double>(my) / f};
            r.small[k] = render(sx, sy, t);
            r.magnified[k] = render(mx, my, t);
        }
    });
    return r;
}

// --- procedural content -------------------------------------------------------

Frame value_noise(int width, int height, double cell, int octaves, double lo, double hi, std::uint64_t seed) {
    if (width < 1 || height < 1 || !(cell > 0.0) || octaves < 1) throw InvalidArgument("value_noise: bad arguments");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> acc(static_cast<std::size_t>(width) * height, 0.0);
    double amp = 1.0;
    double c = cell;
    for (int o = 0; o < octaves; ++o) {
        const int gw = static_cast<int>(std::ceil(width / c)) + 2;
        const int gh = static_cast<int>(std::ceil(height / c)) + 2;
        std::vector<double> grid(static_cast<std::size_t>(gw) * gh);
        for (double& g : grid) g = u(rng);
        std::vector<int> ix(width);
        std::vector<double> ex(width);
        for (int x = 0; x < width; ++x) {
            const double gx = x / c;
            ix[x] = static_cast<int>(gx);
            const double t = gx - ix[x];
            ex[x] = t * t * (3.0 - 2.0 * t);
        }
        for (int y = 0; y < height; ++y) {
            const double gy = y / c;
            const int iy = static_cast<int>(gy);
            const double ty = gy - iy;
            const double ey = ty * ty * (3.0 - 2.0 * ty);
            const double* r0 = grid.data() + static_cast<std::size_t>(iy) * gw;
            const double* r1 = r0 + gw;
            double* dst = acc.data() + static_cast<std::size_t>(y) * width;
            for (int x = 0; x < width; ++x) {
                const int i = ix[x];
                const double top = r0[i] + (r0[i + 1] - r0[i]) * ex[x];
                const double bot = r1[i] + (r1[i + 1] - r1[i]) * ex[x];
                dst[x] += amp * (top + (bot - top) * ey);
            }
        }
        amp *= 0.5;
        c = std::max(1.0, c / 2.0);
    }
    const auto [mn, mx] = std::minmax_element(acc.begin(), acc.end());
    const double span = *mx - *mn;
    Frame out(width, height);
    for (std::size_t i = 0; i < acc.size(); ++i) {
        const double t = span > 0.0 ? (acc[i] - *mn) / span : 0.5;
        out.data[i] = lo + (hi - lo) * t;
    }
    return out;
}

SceneSpec make_bar_scene(const BarSceneOptions& o) {
    const int f = o.supersample;
    SceneSpec s;
    s.supersample = f;
    s.out_width = o.out_width;
    s.out_height = o.out_height;
    s.background = value_noise(o.out_width * f, o.out_height * f, 6.0 * f, 3, o.background_lo, o.background_hi, o.seed);
    const int bw = o.bar_width * f;
    const int bh = o.bar_height * f;
    // Faint texture on the bar keeps it from being a flat plateau.
    s.foreground = value_noise(bw, bh, 4.0 * f, 2, o.bar_level - 0.05, o.bar_level + 0.05, o.seed ^ 0x9e3779b97f4a7c15ull);
    s.alpha = Frame(bw, bh, 0, 1.0);
    s.fg_x = (o.out_width * f - bw) / 2;
    s.fg_y = (o.out_height * f - bh) / 2;
    s.trajectory = o.trajectory;
    s.alpha_mag = o.alpha_mag;
    return s;
}

// --- dataset ----------------------------------------------------------------

void DatasetConfig::validate() const {
    (void)dataset_config_from_json(to_json(*this));
}

std::uint64_t scene_seed(std::uint64_t dataset_seed, int index) {
    // splitmix64 of (seed, index)
    std::uint64_t z = dataset_seed + 0x9e3779b97f4a7c15ull * (static_cast<std::uint64_t>(index) + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

namespace {

Frame resize_bilinear(const Frame& src, int w, int h) {
    Frame out(w, h);
    const double sx = static_cast<double>(src.width) / w;
    const double sy = static_cast<double>(src.height) / h;
    for (int y = 0; y < h; ++y) {
        const double fy = std::clamp((y + 0.5) * sy - 0.5, 0.0, src.height - 1.0);
        const int y0 = static_cast<int>(fy);
        const int y1 = std::min(y0 + 1, src.height - 1);
        const double ay = fy - y0;
        for (int x = 0; x < w; ++x) {
            const double fx = std::clamp((x + 0.5) * sx - 0.5, 0.0, src.width - 1.0);
            const int x0 = static_cast<int>(fx);
            const int x1 = std::min(x0 + 1, src.width - 1);
            const double ax = fx - x0;
            const double top = src.at(x0, y0) * (1 - ax) + src.at(x1, y0) * ax;
            const double bot = src.at(x0, y1) * (1 - ax) + src.at(x1, y1) * ax;
            out.at(x, y) = top * (1 - ay) + bot * ay;
        }
    }
    return out;
}

Frame pick_image(const fs::path& dir, std::mt19937_64& rng, int w, int h) {
    const auto files = io::list_frames(dir);
    if (files.empty()) throw IoError("no images in " + dir.string());
    std::uniform_int_distribution<std::size_t> pick(0, files.size() - 1);
    return resize_bilinear(io::to_gray(io::read_image(files[pick(rng)])), w, h);
}

}  // namespace

SceneSpec make_random_scene(const DatasetConfig& cfg, int index, std::uint64_t seed) {
    (void)index;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const int f = cfg.supersample;
    const int W = cfg.out_width * f;
    const int H = cfg.out_height * f;

    SceneSpec s;
    s.supersample = f;
    s.out_width = cfg.out_width;
    s.out_height = cfg.out_height;
    s.alpha_mag = cfg.alpha_min + (cfg.alpha_max - cfg.alpha_min) * u(rng);

    // Sprite: textured ellipse of 20-35% of the shorter side.
    const int short_side = std::min(cfg.out_width, cfg.out_height);
    const int rx = std::max(2, static_cast<int>((0.10 + 0.075 * u(rng)) * short_side)) * f;
    const int ry = std::max(2, static_cast<int>((0.10 + 0.075 * u(rng)) * short_side)) * f;
    const std::uint64_t tex_seed = rng();
    const std::uint64_t bg_seed = rng();

    if (cfg.background_dir) {
        s.background = pick_image(*cfg.background_dir, rng, W, H);
    } else {
        s.background = value_noise(W, H, (4.0 + 8.0 * u(rng)) * f, 3, 0.04, 0.35, bg_seed);
    }
    if (cfg.foreground_dir) {
        s.foreground = pick_image(*cfg.foreground_dir, rng, 2 * rx, 2 * ry);
    } else {
        s.foreground = value_noise(2 * rx, 2 * ry, 3.0 * f, 3, 0.55, 0.95, tex_seed);
    }
    s.alpha = Frame(2 * rx, 2 * ry, 0, 0.0);
    for (int y = 0; y < 2 * ry; ++y) {
        for (int x = 0; x < 2 * rx; ++x) {
            const double dx = (x + 0.5 - rx) / rx;
            const double dy = (y + 0.5 - ry) / ry;
            s.alpha.at(x, y) = dx * dx + dy * dy <= 1.0 ? 1.0 : 0.0;
        }
    }

    Trajectory& t = s.trajectory;
    t.kind = u(rng) < cfg.spline_fraction ? Trajectory::Kind::Spline : Trajectory::Kind::Sinusoid;
    t.amplitude_px = cfg.amplitude_min + (cfg.amplitude_max - cfg.amplitude_min) * u(rng);
    t.freq_hz = cfg.freq_min + (cfg.freq_max - cfg.freq_min) * u(rng);
    t.phase = 0.0;
    const double theta = 2.0 * std::numbers::pi * u(rng);
    t.direction = {std::cos(theta), std::sin(theta)};
    t.n_frames = cfg.n_frames;
    t.fps = cfg.fps;
    t.seed = rng();

    // Centre with jitter, keeping room for the magnified excursion. Small
    // frames cannot hold the full range, so the amplitude is clipped there.
    const double room = 0.5 * std::min(W - 2 * rx, H - 2 * ry) - 2.0;
    if ((1.0 + s.alpha_mag) * t.amplitude_px * f > room) {
        t.amplitude_px = std::max(0.0, room / ((1.0 + s.alpha_mag) * f));
    }
    const int reach = static_cast<int>(std::ceil((1.0 + s.alpha_mag) * t.amplitude_px * f)) + 1;
    const int slack_x = std::max(0, W - 2 * rx - 2 * reach);
    const int slack_y = std::max(0, H - 2 * ry - 2 * reach);
    const int jitter_x = slack_x > 0 ? static_cast<int>(u(rng) * slack_x) - slack_x / 2 : 0;
    const int jitter_y = slack_y > 0 ? static_cast<int>(u(rng) * slack_y) - slack_y / 2 : 0;
    s.fg_x = (W - 2 * rx) / 2 + jitter_x;
    s.fg_y = (H - 2 * ry) / 2 + jitter_y;
    return s;
}

Manifest generate_dataset(const DatasetConfig& cfg, const fs::path& out_dir) {
    cfg.validate();
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec || !fs::is_directory(out_dir)) throw IoError("cannot create dataset directory " + out_dir.string());

    Manifest m;
    m.config = cfg;
    m.scenes.resize(cfg.n_scenes);
    std::vector<std::string> errors(cfg.n_scenes);

    parallel_for(static_cast<std::size_t>(cfg.n_scenes), [&](std::size_t b, std::size_t e) {
        for (std::size_t i = b; i < e; ++i) {
            const int index = static_cast<int>(i);
            try {
                const std::uint64_t seed = scene_seed(cfg.seed, index);
                const SceneSpec spec = make_random_scene(cfg, index, seed);
                const RenderedScene r = render_scene(spec);

                SimConfig sim = cfg.sim;
                sim.seed = seed ^ cfg.sim.seed;
                const EventStream events = simulate_events(r.small, sim);

                char name[32];
                std::snprintf(name, sizeof name, "scene_%04d", index);
                const fs::path dir = out_dir / name;
                fs::create_directories(dir / "small");
                fs::create_directories(dir / "magnified");
                if (cfg.write_16bit) {
                    fs::create_directories(dir / "small16");
                    fs::create_directories(dir / "magnified16");
                }
                for (int k = 0; k < cfg.n_frames; ++k) {
                    char fname[32];
                    std::snprintf(fname, sizeof fname, "%04d.png", k);
                    io::write_png(dir / "small" / fname, r.small[k]);
                    io::write_png(dir / "magnified" / fname, r.magnified[k]);
                    if (cfg.write_16bit) {
                        io::write_png(dir / "small16" / fname, r.small[k], io::BitDepth::k16);
                        io::write_png(dir / "magnified16" / fname, r.magnified[k], io::BitDepth::k16);
                    }
                }
                io::write_events(dir / "events.evmg", events);

                std::string csv = "frame,dx_px,dy_px\n";
                char line[96];
                for (int k = 0; k < cfg.n_frames; ++k) {
                    std::snprintf(line, sizeof line, "%d,%.9g,%.9g\n", k, r.gt_motion[k].x, r.gt_motion[k].y);
                    csv += line;
                }
                {
                    std::FILE* fp = std::fopen((dir / "gt_motion.csv").c_str(), "wb");
                    if (!fp) throw IoError("cannot write " + (dir / "gt_motion.csv").string());
                    const std::size_t wrote = std::fwrite(csv.data(), 1, csv.size(), fp);
                    std::fclose(fp);
                    if (wrote != csv.size()) throw IoError("short write to gt_motion.csv");
                }

                Json realized = Json::array();
                for (int k = 0; k < cfg.n_frames; ++k) {
                    realized.push_back({r.realized_small[k].x, r.realized_small[k].y});
                }
                Json timestamps = Json::array();
                for (const Frame& fr : r.small) timestamps.push_back(fr.t);
                const Json scene = {{"index", index},
                                    {"seed", seed},
                                    {"supersample", spec.supersample},
                                    {"out_width", spec.out_width},
                                    {"out_height", spec.out_height},
                                    {"hires_width", spec.background.width},
                                    {"hires_height", spec.background.height},
                                    {"foreground_width", spec.foreground.width},
                                    {"foreground_height", spec.foreground.height},
                                    {"fg_x", spec.fg_x},
                                    {"fg_y", spec.fg_y},
                                    {"alpha_mag", spec.alpha_mag},
                                    {"trajectory", to_json(spec.trajectory)},
                                    {"sim", to_json(sim)},
                                    {"n_events", events.size()},
                                    {"t_start_us", events.t_start()},
                                    {"t_end_us", events.t_end()},
                                    {"timestamps_us", timestamps},
                                    {"realized_small_px", realized}};
                save_json_file((dir / "scene.json").string(), scene);

                SceneRecord& rec = m.scenes[i];
                rec.index = index;
                rec.dir = name;
                rec.seed = seed;
                rec.alpha_mag = spec.alpha_mag;
                rec.trajectory = spec.trajectory;
                rec.n_events = events.size();
            } catch (const std::exception& ex) {
                errors[i] = "scene " + std::to_string(index) + ": " + ex.what();
            }
        }
    });
    for (const auto& err : errors) {
        if (!err.empty()) throw IoError(err);
    }
    save_json_file((out_dir / "manifest.json").string(), to_json(m));
    return m;
}

}  // namespace evmag
