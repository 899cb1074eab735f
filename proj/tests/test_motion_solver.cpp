#include <doctest.h>

#include <chrono>
#include <fstream>
#include <random>

#include "evmag/error.hpp"
#include "evmag/event_sim.hpp"
#include "evmag/motion_solver.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace evmag;

namespace {

ContrastMap random_cmap(int w, int h, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    ContrastMap m;
    m.width = w;
    m.height = h;
    m.s_x.resize(w * h);
    m.s_y.resize(w * h);
    m.valid.assign(w * h, 1);
    for (int i = 0; i < w * h; ++i) {
        m.s_x[i] = u(rng);
        m.s_y[i] = u(rng);
    }
    return m;
}

std::vector<int> random_psum(int n, std::mt19937_64& rng) {
    std::vector<int> p(n);
    for (int& v : p) v = static_cast<int>(rng() % 11) - 5;
    return p;
}

// Rows of the clipped window around (x, y).
std::vector<int> window_pixels(int x, int y, int w, int h, int r) {
    std::vector<int> out;
    for (int v = std::max(0, y - r); v <= std::min(h - 1, y + r); ++v)
        for (int u = std::max(0, x - r); u <= std::min(w - 1, x + r); ++u) out.push_back(v * w + u);
    return out;
}

Frame blob(double cx, double cy, int w, int h, Micros t) {
    Frame f(w, h, t);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            const double r2 = (x - cx) * (x - cx) + (y - cy) * (y - cy);
            f.at(x, y) = 0.1 + 0.7 * std::exp(-r2 / (2.0 * 3.0 * 3.0));
        }
    return f;
}

}  // namespace

TEST_SUITE("motion_solver") {

TEST_CASE("contrast map of constant, ramp and dark frames") {
    SolverConfig cfg;
    auto c = contrast_map(Frame(8, 6, 0, 0.4), cfg);
    for (std::size_t i = 0; i < c.s_x.size(); ++i) {
        CHECK(c.s_x[i] == 0.0);
        CHECK(c.s_y[i] == 0.0);
        CHECK(c.valid[i] == 1);
    }

    Frame ramp(20, 5);
    for (int y = 0; y < 5; ++y)
        for (int x = 0; x < 20; ++x) ramp.at(x, y) = 0.2 + 0.01 * x;
    auto r = contrast_map(ramp, cfg);
    for (int y = 0; y < 5; ++y) {
        for (int x = 1; x < 19; ++x) {
            CHECK(r.s_x[y * 20 + x] == doctest::Approx(-0.01 / (0.2 + 0.01 * x)).epsilon(1e-12));
            CHECK(r.s_y[y * 20 + x] == 0.0);
        }
    }
    // replicated border halves the difference
    CHECK(r.s_x[0] == doctest::Approx(-0.005 / 0.2).epsilon(1e-12));

    Frame dark(6, 6, 0, 0.5);
    for (int x = 0; x < 3; ++x) dark.at(x, 2) = 0.0;
    auto d = contrast_map(dark, cfg);
    for (std::size_t i = 0; i < d.s_x.size(); ++i) {
        CHECK(std::isfinite(d.s_x[i]));
        CHECK(std::isfinite(d.s_y[i]));
    }
    CHECK(d.valid[2 * 6 + 0] == 0);
    CHECK(d.s_x[2 * 6 + 1] == 0.0);
    CHECK(d.valid[2 * 6 + 4] == 1);
}

TEST_CASE("box sums match brute force") {
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    const int w = 13;
    const int h = 9;
    std::vector<double> v(w * h);
    for (double& x : v) x = u(rng);
    for (int r : {0, 1, 2, 6, 20}) {
        auto b = box_sum(v, w, h, r);
        for (int y = 0; y < h; ++y) {
            for (int x = 0; x < w; ++x) {
                double s = 0.0;
                for (int i : window_pixels(x, y, w, h, r)) s += v[i];
                CHECK(b[y * w + x] == doctest::Approx(s).epsilon(1e-12));
            }
        }
    }
}

TEST_CASE("1D solution: zero sums, single term, oracle agreement") {
    SolverConfig cfg;
    std::mt19937_64 rng(12);
    auto cmap = random_cmap(16, 16, rng);
    std::vector<int> zero(256, 0);
    auto z = solve_motion_1d(cmap, zero, 0.2, cfg, Axis::X);
    for (double d : z.delta) CHECK(d == 0.0);

    ContrastMap one;
    one.width = one.height = 1;
    one.s_x = {-0.5};
    one.s_y = {0.0};
    one.valid = {1};
    SolverConfig w1;
    w1.window = 1;
    std::vector<int> two = {2};
    auto s = solve_motion_1d(one, two, 0.2, w1, Axis::X);
    CHECK(s.valid[0] == 1);
    CHECK(s.delta[0] == doctest::Approx(-0.2 / (0.25 + 1e-6)).epsilon(1e-15));
    CHECK(s.delta[0] == doctest::Approx(-0.7999968).epsilon(1e-6));

    for (int trial = 0; trial < 20; ++trial) {
        SolverConfig c2;
        c2.window = 1 + 2 * static_cast<int>(rng() % 4);
        auto m = random_cmap(32, 32, rng);
        auto p = random_psum(32 * 32, rng);
        const Axis axis = trial % 2 ? Axis::X : Axis::Y;
        auto sol = solve_motion_1d(m, p, 0.2, c2, axis);
        const auto& sv = axis == Axis::X ? m.s_x : m.s_y;
        for (int y = 0; y < 32; ++y) {
            for (int x = 0; x < 32; ++x) {
                const int i = y * 32 + x;
                if (!sol.valid[i]) continue;
                auto px = window_pixels(x, y, 32, 32, c2.window / 2);
                std::vector<double> a;
                std::vector<double> b;
                for (int j : px) {
                    a.push_back(sv[j]);
                    b.push_back(0.2 * p[j]);
                }
                const double ref = oracle::lstsq(a, static_cast<int>(px.size()), 1, b, c2.reg_lambda)[0];
                CHECK(std::abs(sol.delta[i] - ref) <= 1e-9 * std::max(std::abs(ref), 1e-12));
            }
        }
    }
}

TEST_CASE("2D solution agrees with a QR least-squares oracle") {
    std::mt19937_64 rng(21);
    SolverConfig cfg;
    for (int trial = 0; trial < 20; ++trial) {
        auto m = random_cmap(32, 32, rng);
        auto p = random_psum(32 * 32, rng);
        auto f = solve_motion_2d(m, p, 0.2, cfg);
        CHECK(f.valid_count() == 32u * 32u);
        for (int y = 0; y < 32; ++y) {
            for (int x = 0; x < 32; ++x) {
                auto px = window_pixels(x, y, 32, 32, cfg.window / 2);
                std::vector<double> a;
                std::vector<double> b;
                for (int j : px) {
                    a.push_back(m.s_x[j]);
                    a.push_back(m.s_y[j]);
                    b.push_back(0.2 * p[j]);
                }
                auto ref = oracle::lstsq(a, static_cast<int>(px.size()), 2, b, cfg.reg_lambda);
                const int i = y * 32 + x;
                const double err = std::hypot(f.dx[i] - ref[0], f.dy[i] - ref[1]);
                CHECK(err <= 1e-9 * std::max(std::hypot(ref[0], ref[1]), 1e-12));
            }
        }
    }
}

TEST_CASE("aperture degeneracy is flagged invalid") {
    ContrastMap m;
    m.width = 9;
    m.height = 9;
    m.s_x.assign(81, 0.3);
    m.s_y.assign(81, 0.0);
    m.valid.assign(81, 1);
    std::vector<int> p(81, 1);
    auto f = solve_motion_2d(m, p, 0.2, SolverConfig{});
    CHECK(f.valid_count() == 0);
    for (int i = 0; i < 81; ++i) {
        CHECK(f.dx[i] == 0.0);
        CHECK(f.dy[i] == 0.0);
    }
    // the 1D solver along x is fine on the same data
    auto d = solve_motion_1d(m, p, 0.2, SolverConfig{}, Axis::X);
    CHECK(d.valid[40] == 1);
    auto dy = solve_motion_1d(m, p, 0.2, SolverConfig{}, Axis::Y);
    CHECK(dy.valid[40] == 0);
}

TEST_CASE("linearity, scale and validity properties") {
    std::mt19937_64 rng(33);
    SolverConfig cfg;
    auto m = random_cmap(20, 20, rng);
    auto p = random_psum(400, rng);
    std::vector<int> neg(p.size());
    std::vector<int> twice(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) {
        neg[i] = -p[i];
        twice[i] = 2 * p[i];
    }
    auto a = solve_motion_2d(m, p, 0.2, cfg);
    auto b = solve_motion_2d(m, neg, 0.2, cfg);
    auto c = solve_motion_2d(m, twice, 0.1, cfg);
    for (std::size_t i = 0; i < p.size(); ++i) {
        CHECK(b.dx[i] == -a.dx[i]);
        CHECK(b.dy[i] == -a.dy[i]);
        CHECK(c.dx[i] == doctest::Approx(a.dx[i]).epsilon(1e-12));
        CHECK(c.dy[i] == doctest::Approx(a.dy[i]).epsilon(1e-12));
    }
    std::vector<int> zero(400, 0);
    auto z = solve_motion_2d(m, zero, 0.2, cfg);
    for (std::size_t i = 0; i < 400; ++i) CHECK((z.dx[i] == 0.0 && z.dy[i] == 0.0));

    // validity can only shrink as min_eig grows
    auto sparse = m;
    for (int i = 0; i < 400; ++i) {
        sparse.s_x[i] *= (i % 7 == 0) ? 1.0 : 0.05;
        sparse.s_y[i] *= (i % 5 == 0) ? 1.0 : 0.02;
    }
    std::vector<std::uint8_t> prev(400, 1);
    for (double me : {0.0, 1e-4, 1e-3, 1e-2, 0.05, 0.1, 0.5, 1.0}) {
        SolverConfig k;
        k.min_eig = me;
        auto f = solve_motion_2d(sparse, p, 0.2, k);
        for (int i = 0; i < 400; ++i) CHECK(f.valid[i] <= prev[i]);
        prev = f.valid;
    }
}

TEST_CASE("translating blob: recovered motion points along the motion") {
    auto a = blob(20.0, 20.0, 40, 40, 0);
    auto b = blob(20.2, 20.0, 40, 40, 10000);
    SimConfig sim;
    sim.c = 0.05;
    auto ev = simulate_events({a, b}, sim);
    REQUIRE(!ev.empty());
    auto fields = motion_field_series(a, ev, sim.c, 1, SolverConfig{});
    const auto& f = fields.back();
    double sx = 0.0;
    double sy = 0.0;
    int n = 0;
    for (std::size_t i = 0; i < f.dx.size(); ++i) {
        if (!f.valid[i]) continue;
        sx += f.dx[i];
        sy += f.dy[i];
        ++n;
    }
    REQUIRE(n > 0);
    CHECK(sx / n > 0.0);
    CHECK(std::abs(sy / n) < 0.1 * std::abs(sx / n));
}

TEST_CASE("series: empty stream, plateau after a step, event-time placement") {
    auto a = blob(15.0, 15.0, 30, 30, 0);
    EventStream empty(30, 30, 0, 1000, {});
    auto z = motion_field_series(a, empty, 0.2, 5, SolverConfig{});
    REQUIRE(z.size() == 5);
    for (const auto& f : z) {
        for (double v : f.dx) CHECK(v == 0.0);
        for (double v : f.dy) CHECK(v == 0.0);
    }
    CHECK(z[0].tau == 200);
    CHECK(z[4].tau == 1000);

    // step completed by the first sample: frames at 0, 100, 1000 with the motion in the first 100 us
    auto b = blob(15.3, 15.1, 30, 30, 100);
    auto b2 = b;
    b2.t = 1000;
    SimConfig sim;
    sim.c = 0.05;
    auto ev = simulate_events({a, b, b2}, sim);
    auto s = motion_field_series(a, ev, sim.c, 10, SolverConfig{});
    for (int k = 1; k < 10; ++k) {
        CHECK(s[k].dx == s[0].dx);
        CHECK(s[k].dy == s[0].dy);
    }
    CHECK_THROWS_AS(motion_field_series(a, ev, sim.c, 0, SolverConfig{}), InvalidArgument);
    CHECK_THROWS_AS(motion_field_series(Frame(3, 3), ev, sim.c, 2, SolverConfig{}), InvalidArgument);
}

TEST_CASE("series cost grows at most linearly with event count") {
    Frame i0 = test::random_frame(64, 64, 5, 0.2, 0.8);
    std::mt19937_64 rng(1);
    auto make = [&](int n) {
        std::vector<Event> ev;
        for (int i = 0; i < n; ++i) {
            ev.push_back({static_cast<std::uint16_t>(rng() % 64), static_cast<std::uint16_t>(rng() % 64),
                          static_cast<Micros>(rng() % 100000), static_cast<std::int8_t>(rng() % 2 ? 1 : -1)});
        }
        return EventStream(64, 64, 0, 100000, ev);
    };
    auto small = make(20000);
    auto large = make(200000);
    auto time = [&](const EventStream& s) {
        double best = 1e9;
        for (int rep = 0; rep < 3; ++rep) {
            auto t0 = std::chrono::steady_clock::now();
            auto f = motion_field_series(i0, s, 0.2, 8, SolverConfig{});
            best = std::min(best, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
            CHECK(f.size() == 8);
        }
        return best;
    };
    const double ts = time(small);
    const double tl = time(large);
    MESSAGE("20k events: " << ts << " s, 200k events: " << tl << " s");
    CHECK(tl <= 12.0 * ts + 0.01);
}

TEST_CASE("motion field export") {
    MotionField f;
    f.width = 3;
    f.height = 2;
    f.tau = 1234567;
    f.dx = {0.5, -0.25, 0, 1, 2, 3};
    f.dy = {0.125, 0, 0, -1, 0, 0.75};
    f.valid = {1, 1, 0, 1, 1, 1};
    const std::string csv = motion_field_csv(f);
    CHECK(csv.rfind("x,y,dx,dy,valid\n", 0) == 0);
    CHECK(csv.find("\n0,0,0.5,0.125,1\n") != std::string::npos);
    CHECK(csv.find("\n2,0,0,0,0\n") != std::string::npos);

    test::TempDir dir;
    write_motion_raster(dir.path / "m.evmf", f);
    CHECK(std::filesystem::file_size(dir.path / "m.evmf") == 20u + 6u * 9u);
    auto g = read_motion_raster(dir.path / "m.evmf");
    CHECK(g.width == 3);
    CHECK(g.height == 2);
    CHECK(g.tau == f.tau);
    CHECK(g.dx == f.dx);
    CHECK(g.dy == f.dy);
    CHECK(g.valid == f.valid);
    std::ofstream(dir.path / "bad.evmf") << "nope";
    CHECK_THROWS_AS(read_motion_raster(dir.path / "bad.evmf"), IoError);
}

TEST_CASE("solver argument errors") {
    std::mt19937_64 rng(2);
    auto m = random_cmap(4, 4, rng);
    std::vector<int> p(16, 0);
    CHECK_THROWS_AS(solve_motion_2d(m, p, 0.0, SolverConfig{}), InvalidArgument);
    CHECK_THROWS_AS(solve_motion_1d(m, p, -1.0, SolverConfig{}, Axis::X), InvalidArgument);
    std::vector<int> short_p(15, 0);
    CHECK_THROWS_AS(solve_motion_2d(m, short_p, 0.2, SolverConfig{}), InvalidArgument);
    SolverConfig even;
    even.window = 4;
    CHECK_THROWS_AS(solve_motion_2d(m, p, 0.2, even), InvalidArgument);
    SolverConfig neg;
    neg.min_eig = -1;
    CHECK_THROWS_AS(neg.validate(), InvalidArgument);
}

}
