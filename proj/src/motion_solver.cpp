#include "evmag/motion_solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>

#include "evmag/error.hpp"

namespace evmag {

namespace {

void check_extent(const ContrastMap& cmap, std::span<const int> psum) {
    if (psum.size() != static_cast<std::size_t>(cmap.width) * cmap.height) {
        throw InvalidArgument("motion solver: polarity sums do not match the contrast map extent");
    }
}

void check_c(double c) {
    if (!(c > 0.0) || !std::isfinite(c)) throw InvalidArgument("motion solver: c must be > 0");
}

std::vector<double> product(std::span<const double> a, std::span<const double> b) {
    std::vector<double> out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] * b[i];
    return out;
}

std::vector<double> product(std::span<const double> a, std::span<const int> b) {
    std::vector<double> out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] * b[i];
    return out;
}

double min_eigenvalue(double gxx, double gxy, double gyy) {
    const double half_tr = 0.5 * (gxx + gyy);
    const double half_diff = 0.5 * (gxx - gyy);
    return half_tr - std::hypot(half_diff, gxy);
}

}  // namespace

void SolverConfig::validate() const {
    if (window < 1 || window % 2 == 0) throw InvalidArgument("solver.window: must be an odd integer >= 1");
    if (!(reg_lambda >= 0.0)) throw InvalidArgument("solver.reg_lambda: must be >= 0");
    if (!(min_eig >= 0.0)) throw InvalidArgument("solver.min_eig: must be >= 0");
    if (!(intensity_floor > 0.0)) throw InvalidArgument("solver.intensity_floor: must be > 0");
}

std::size_t MotionField::valid_count() const {
    return static_cast<std::size_t>(std::count(valid.begin(), valid.end(), std::uint8_t{1}));
}

std::vector<double> box_sum(std::span<const double> values, int width, int height, int radius) {
    const std::size_t w1 = static_cast<std::size_t>(width) + 1;
    std::vector<long double> sat(w1 * (height + 1), 0.0L);
    for (int y = 0; y < height; ++y) {
        long double row = 0.0L;
        for (int x = 0; x < width; ++x) {
            row += values[static_cast<std::size_t>(y) * width + x];
            sat[(y + 1) * w1 + x + 1] = sat[y * w1 + x + 1] + row;
        }
    }
    std::vector<double> out(static_cast<std::size_t>(width) * height);
    for (int y = 0; y < height; ++y) {
        const int y0 = std::max(0, y - radius);
        const int y1 = std::min(height, y + radius + 1);
        for (int x = 0; x < width; ++x) {
            const int x0 = std::max(0, x - radius);
            const int x1 = std::min(width, x + radius + 1);
            const long double s = sat[y1 * w1 + x1] - sat[y0 * w1 + x1] - sat[y1 * w1 + x0] + sat[y0 * w1 + x0];
            out[static_cast<std::size_t>(y) * width + x] = static_cast<double>(s);
        }
    }
    return out;
}

ContrastMap contrast_map(const Frame& i0, const SolverConfig& cfg) {
    cfg.validate();
    validate_frame(i0);
    const int w = i0.width;
    const int h = i0.height;
    ContrastMap m;
    m.width = w;
    m.height = h;
    m.s_x.assign(i0.size(), 0.0);
    m.s_y.assign(i0.size(), 0.0);
    m.valid.assign(i0.size(), 0);
    for (int y = 0; y < h; ++y) {
        const int ym = std::max(0, y - 1);
        const int yp = std::min(h - 1, y + 1);
        for (int x = 0; x < w; ++x) {
            const std::size_t i = static_cast<std::size_t>(y) * w + x;
            const double v = i0.data[i];
            if (v < cfg.intensity_floor) continue;
            const int xm = std::max(0, x - 1);
            const int xp = std::min(w - 1, x + 1);
            const double gx = 0.5 * (i0.at(xp, y) - i0.at(xm, y));
            const double gy = 0.5 * (i0.at(x, yp) - i0.at(x, ym));
            const double denom = std::max(v, cfg.intensity_floor);
            m.s_x[i] = -gx / denom;
            m.s_y[i] = -gy / denom;
            m.valid[i] = 1;
        }
    }
    return m;
}

Displacement1D solve_motion_1d(const ContrastMap& cmap, std::span<const int> psum, double c, const SolverConfig& cfg,
                               Axis axis) {
    cfg.validate();
    check_c(c);
    check_extent(cmap, psum);
    const auto& s = axis == Axis::X ? cmap.s_x : cmap.s_y;
    const int r = cfg.window / 2;
    const auto ss = box_sum(product(s, s), cmap.width, cmap.height, r);
    const auto sp = box_sum(product(s, psum), cmap.width, cmap.height, r);

    Displacement1D out;
    out.delta.assign(ss.size(), 0.0);
    out.valid.assign(ss.size(), 0);
    for (std::size_t i = 0; i < ss.size(); ++i) {
        if (ss[i] < cfg.min_eig) continue;
        out.delta[i] = c * sp[i] / (ss[i] + cfg.reg_lambda);
        out.valid[i] = 1;
    }
    return out;
}

WindowedMotionSolver::WindowedMotionSolver(const ContrastMap& cmap, const SolverConfig& cfg)
    : width_(cmap.width), height_(cmap.height), radius_(cfg.window / 2), cmap_(&cmap) {
    cfg.validate();
    const auto gxx = box_sum(product(cmap.s_x, cmap.s_x), width_, height_, radius_);
    const auto gxy = box_sum(product(cmap.s_x, cmap.s_y), width_, height_, radius_);
    const auto gyy = box_sum(product(cmap.s_y, cmap.s_y), width_, height_, radius_);
    const std::size_t n = gxx.size();
    inv_xx_.assign(n, 0.0);
    inv_xy_.assign(n, 0.0);
    inv_yy_.assign(n, 0.0);
    valid_.assign(n, 0);
    const double lam = cfg.reg_lambda;
    for (std::size_t i = 0; i < n; ++i) {
        if (min_eigenvalue(gxx[i], gxy[i], gyy[i]) < cfg.min_eig) continue;
        const double a = gxx[i] + lam;
        const double b = gxy[i];
        const double d = gyy[i] + lam;
        const double det = a * d - b * b;
        inv_xx_[i] = d / det;
        inv_xy_[i] = -b / det;
        inv_yy_[i] = a / det;
        valid_[i] = 1;
    }
}

MotionField WindowedMotionSolver::solve(std::span<const int> psum, double c, Micros tau) const {
    check_c(c);
    check_extent(*cmap_, psum);
    const auto rx = box_sum(product(cmap_->s_x, psum), width_, height_, radius_);
    const auto ry = box_sum(product(cmap_->s_y, psum), width_, height_, radius_);
    MotionField f;
    f.width = width_;
    f.height = height_;
    f.tau = tau;
    f.dx.assign(rx.size(), 0.0);
    f.dy.assign(rx.size(), 0.0);
    f.valid = valid_;
    for (std::size_t i = 0; i < rx.size(); ++i) {
        if (!valid_[i]) continue;
        f.dx[i] = c * (inv_xx_[i] * rx[i] + inv_xy_[i] * ry[i]);
        f.dy[i] = c * (inv_xy_[i] * rx[i] + inv_yy_[i] * ry[i]);
    }
    return f;
}

MotionField solve_motion_2d(const ContrastMap& cmap, std::span<const int> psum, double c, const SolverConfig& cfg) {
    check_c(c);
    check_extent(cmap, psum);
    return WindowedMotionSolver(cmap, cfg).solve(psum, c);
}

std::vector<MotionField> motion_field_series(const Frame& i0, const EventStream& stream, double c, int n_steps,
                                             const SolverConfig& cfg) {
    if (n_steps < 1) throw InvalidArgument("motion_field_series: n_steps must be >= 1");
    check_c(c);
    if (i0.width != stream.width() || i0.height != stream.height()) {
        throw InvalidArgument("motion_field_series: keyframe extent does not match the event stream");
    }
    const ContrastMap cmap = contrast_map(i0, cfg);
    const WindowedMotionSolver solver(cmap, cfg);

    std::vector<int> psum(i0.size(), 0);
    const auto& ev = stream.events();
    std::size_t next = 0;
    const Micros t0 = stream.t_start();
    const Micros span = stream.t_end() - t0;
    std::vector<MotionField> out;
    out.reserve(n_steps);
    for (int k = 1; k <= n_steps; ++k) {
        const Micros tau = t0 + static_cast<Micros>((static_cast<__int128>(span) * k) / n_steps);
        while (next < ev.size() && ev[next].t <= tau) {
            const Event& e = ev[next++];
            psum[static_cast<std::size_t>(e.y) * i0.width + e.x] += e.p;
        }
        out.push_back(solver.solve(psum, c, tau));
    }
    return out;
}

// --- export ------------------------------------------------------------------

std::string motion_field_csv(const MotionField& field) {
    std::string out = "x,y,dx,dy,valid\n";
    char line[128];
    for (int y = 0; y < field.height; ++y) {
        for (int x = 0; x < field.width; ++x) {
            const std::size_t i = static_cast<std::size_t>(y) * field.width + x;
            std::snprintf(line, sizeof line, "%d,%d,%.9g,%.9g,%d\n", x, y, field.dx[i], field.dy[i],
                          field.valid[i] ? 1 : 0);
            out += line;
        }
    }
    return out;
}

namespace {

template <typename T>
void put(std::vector<char>& out, T v) {
    char b[sizeof(T)];
    std::memcpy(b, &v, sizeof(T));  // host is little-endian (x86/ARM)
    out.insert(out.end(), b, b + sizeof(T));
}

template <typename T>
T get(const char*& p) {
    T v;
    std::memcpy(&v, p, sizeof(T));
    p += sizeof(T);
    return v;
}

}  // namespace

void write_motion_raster(const std::filesystem::path& path, const MotionField& field) {
    std::vector<char> out{'E', 'V', 'M', 'F'};
    put<std::uint16_t>(out, 1);
    put<std::uint16_t>(out, static_cast<std::uint16_t>(field.width));
    put<std::uint16_t>(out, static_cast<std::uint16_t>(field.height));
    put<std::uint16_t>(out, 0);
    put<std::int64_t>(out, field.tau);
    for (double v : field.dx) put<float>(out, static_cast<float>(v));
    for (double v : field.dy) put<float>(out, static_cast<float>(v));
    for (auto v : field.valid) out.push_back(static_cast<char>(v ? 1 : 0));
    std::ofstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot write " + path.string());
    f.write(out.data(), static_cast<std::streamsize>(out.size()));
}

MotionField read_motion_raster(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open " + path.string());
    const std::vector<char> bytes{std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
    if (bytes.size() < 20 || std::memcmp(bytes.data(), "EVMF", 4) != 0) throw IoError("not an EVMF raster");
    const char* p = bytes.data() + 4;
    if (get<std::uint16_t>(p) != 1) throw IoError("unsupported EVMF version");
    MotionField m;
    m.width = get<std::uint16_t>(p);
    m.height = get<std::uint16_t>(p);
    get<std::uint16_t>(p);
    m.tau = get<std::int64_t>(p);
    const std::size_t n = static_cast<std::size_t>(m.width) * m.height;
    if (bytes.size() != 20 + n * 9) throw IoError("truncated EVMF raster");
    m.dx.resize(n);
    m.dy.resize(n);
    m.valid.resize(n);
    for (auto& v : m.dx) v = get<float>(p);
    for (auto& v : m.dy) v = get<float>(p);
    for (auto& v : m.valid) v = static_cast<std::uint8_t>(*p++);
    return m;
}

}  // namespace evmag
