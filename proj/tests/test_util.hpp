#pragma once

#include <filesystem>
#include <random>
#include <string>

#include "evmag/event_core.hpp"

namespace test {

struct TempDir {
    std::filesystem::path path;

    TempDir() {
        std::random_device rd;
        path = std::filesystem::temp_directory_path() / ("evmag_test_" + std::to_string(rd()) + std::to_string(rd()));
        std::filesystem::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;
};

inline evmag::Frame random_frame(int w, int h, std::uint64_t seed, double lo = 0.05, double hi = 0.95) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(lo, hi);
    evmag::Frame f(w, h);
    for (double& v : f.data) v = u(rng);
    return f;
}

}  // namespace test
