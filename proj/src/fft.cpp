#include "evmag/fft.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cstring>
#include <memory>
#include <mutex>

#include "evmag/error.hpp"

namespace evmag::fft {

namespace {

// FFTW's planner is not re-entrant.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

struct PlanDeleter {
    void operator()(fftw_plan_s* p) const {
        if (p) {
            std::lock_guard lock(planner_mutex());
            fftw_destroy_plan(p);
        }
    }
};
using Plan = std::unique_ptr<fftw_plan_s, PlanDeleter>;

struct BufferDeleter {
    void operator()(void* p) const { fftw_free(p); }
};
template <typename T>
using Buffer = std::unique_ptr<T[], BufferDeleter>;

template <typename T>
Buffer<T> alloc(std::size_t n) {
    auto* p = static_cast<T*>(fftw_malloc(sizeof(T) * std::max<std::size_t>(n, 1)));
    if (!p) throw std::bad_alloc();
    return Buffer<T>(p);
}

void check(fftw_plan p) {
    if (!p) throw InvalidArgument("FFTW failed to create a plan");
}

}  // namespace

std::vector<Complex> rfft(std::span<const double> x) {
    return rfft_strided(x, x.size(), 1);
}

std::vector<double> irfft(std::span<const Complex> bins, std::size_t n) {
    return irfft_strided(bins, n, 1);
}

std::vector<Complex> rfft_strided(std::span<const double> data, std::size_t n, std::size_t count) {
    if (n == 0 || data.size() != n * count) throw InvalidArgument("rfft: size mismatch");
    const std::size_t nb = n / 2 + 1;
    auto in = alloc<double>(n * count);
    auto out = alloc<fftw_complex>(nb * count);
    Plan plan;
    {
        std::lock_guard lock(planner_mutex());
        int dims[] = {static_cast<int>(n)};
        plan.reset(fftw_plan_many_dft_r2c(1, dims, static_cast<int>(count), in.get(), nullptr,
                                          static_cast<int>(count), 1, out.get(), nullptr, static_cast<int>(count),
                                          1, FFTW_ESTIMATE));
    }
    check(plan.get());
    std::memcpy(in.get(), data.data(), sizeof(double) * n * count);
    fftw_execute(plan.get());
    std::vector<Complex> result(nb * count);
    for (std::size_t i = 0; i < nb * count; ++i) result[i] = Complex(out[i][0], out[i][1]);
    return result;
}

std::vector<double> irfft_strided(std::span<const Complex> bins, std::size_t n, std::size_t count) {
    const std::size_t nb = n / 2 + 1;
    if (n == 0 || bins.size() != nb * count) throw InvalidArgument("irfft: size mismatch");
    auto in = alloc<fftw_complex>(nb * count);
    auto out = alloc<double>(n * count);
    Plan plan;
    {
        std::lock_guard lock(planner_mutex());
        int dims[] = {static_cast<int>(n)};
        plan.reset(fftw_plan_many_dft_c2r(1, dims, static_cast<int>(count), in.get(), nullptr,
                                          static_cast<int>(count), 1, out.get(), nullptr, static_cast<int>(count),
                                          1, FFTW_ESTIMATE));
    }
    check(plan.get());
    // c2r destroys its input, so copy after planning.
    for (std::size_t i = 0; i < nb * count; ++i) {
        in[i][0] = bins[i].real();
        in[i][1] = bins[i].imag();
    }
    fftw_execute(plan.get());
    std::vector<double> result(n * count);
    const double scale = 1.0 / static_cast<double>(n);
    for (std::size_t i = 0; i < n * count; ++i) result[i] = out[i] * scale;
    return result;
}

namespace {

std::vector<Complex> fft2_impl(std::span<const Complex> data, int width, int height, int sign) {
    const std::size_t n = static_cast<std::size_t>(width) * height;
    if (width <= 0 || height <= 0 || data.size() != n) throw InvalidArgument("fft2: size mismatch");
    auto buf = alloc<fftw_complex>(n);
    Plan plan;
    {
        std::lock_guard lock(planner_mutex());
        plan.reset(fftw_plan_dft_2d(height, width, buf.get(), buf.get(), sign, FFTW_ESTIMATE));
    }
    check(plan.get());
    for (std::size_t i = 0; i < n; ++i) {
        buf[i][0] = data[i].real();
        buf[i][1] = data[i].imag();
    }
    fftw_execute(plan.get());
    const double scale = sign == FFTW_BACKWARD ? 1.0 / static_cast<double>(n) : 1.0;
    std::vector<Complex> result(n);
    for (std::size_t i = 0; i < n; ++i) result[i] = Complex(buf[i][0], buf[i][1]) * scale;
    return result;
}

}  // namespace

std::vector<Complex> fft2(std::span<const Complex> data, int width, int height) {
    return fft2_impl(data, width, height, FFTW_FORWARD);
}

std::vector<Complex> ifft2(std::span<const Complex> data, int width, int height) {
    return fft2_impl(data, width, height, FFTW_BACKWARD);
}

}  // namespace evmag::fft
