#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace oracle {

namespace {

constexpr long double kTwoPi = 2.0L * std::numbers::pi_v<long double>;

// 2D DFT of a row-major w x h array, rows first.
std::vector<cplx> dft2(const std::vector<cplx>& in, int w, int h, bool inverse) {
    std::vector<cplx> tmp(in.size());
    for (int y = 0; y < h; ++y) {
        std::vector<cplx> row(in.begin() + static_cast<long>(y) * w, in.begin() + static_cast<long>(y + 1) * w);
        auto r = dft(row, inverse);
        std::copy(r.begin(), r.end(), tmp.begin() + static_cast<long>(y) * w);
    }
    std::vector<cplx> out(in.size());
    std::vector<cplx> col(h);
    for (int x = 0; x < w; ++x) {
        for (int y = 0; y < h; ++y) col[y] = tmp[static_cast<std::size_t>(y) * w + x];
        auto c = dft(col, inverse);
        for (int y = 0; y < h; ++y) out[static_cast<std::size_t>(y) * w + x] = c[y];
    }
    return out;
}

int signed_freq(int k, int n) { return k > n / 2 ? k - n : k; }

}  // namespace

std::vector<cplx> dft(const std::vector<double>& x) {
    std::vector<cplx> c(x.begin(), x.end());
    return dft(c);
}

std::vector<cplx> dft(const std::vector<cplx>& x, bool inverse) {
    const std::size_t n = x.size();
    const long double sign = inverse ? 1.0L : -1.0L;
    // twiddles indexed by (k*t) mod n keep the angle exact for long series
    std::vector<long double> tc(n);
    std::vector<long double> ts(n);
    for (std::size_t j = 0; j < n; ++j) {
        const long double ang = sign * kTwoPi * static_cast<long double>(j) / static_cast<long double>(n);
        tc[j] = std::cos(ang);
        ts[j] = std::sin(ang);
    }
    std::vector<cplx> out(n);
    for (std::size_t k = 0; k < n; ++k) {
        long double re = 0.0L;
        long double im = 0.0L;
        std::size_t j = 0;
        for (std::size_t t = 0; t < n; ++t) {
            re += x[t].real() * tc[j] - x[t].imag() * ts[j];
            im += x[t].real() * ts[j] + x[t].imag() * tc[j];
            j += k;
            if (j >= n) j -= n;
        }
        out[k] = {static_cast<double>(re), static_cast<double>(im)};
        if (inverse) out[k] /= static_cast<double>(n);
    }
    return out;
}

std::vector<double> lstsq(std::vector<double> a, int rows, int cols, std::vector<double> b, double lambda) {
    if (static_cast<int>(b.size()) != rows) throw std::invalid_argument("lstsq: size mismatch");
    if (lambda > 0.0) {
        const double r = std::sqrt(lambda);
        for (int i = 0; i < cols; ++i) {
            for (int j = 0; j < cols; ++j) a.push_back(i == j ? r : 0.0);
            b.push_back(0.0);
        }
        rows += cols;
    }
    auto A = [&](int i, int j) -> double& { return a[static_cast<std::size_t>(i) * cols + j]; };
    for (int k = 0; k < cols; ++k) {
        double norm = 0.0;
        for (int i = k; i < rows; ++i) norm += A(i, k) * A(i, k);
        norm = std::sqrt(norm);
        if (norm == 0.0) throw std::runtime_error("lstsq: rank deficient");
        const double alpha = A(k, k) > 0 ? -norm : norm;
        std::vector<double> v(rows - k);
        for (int i = k; i < rows; ++i) v[i - k] = A(i, k);
        v[0] -= alpha;
        double vv = 0.0;
        for (double e : v) vv += e * e;
        if (vv == 0.0) continue;
        for (int j = k; j < cols; ++j) {
            double d = 0.0;
            for (int i = k; i < rows; ++i) d += v[i - k] * A(i, j);
            const double f = 2.0 * d / vv;
            for (int i = k; i < rows; ++i) A(i, j) -= f * v[i - k];
        }
        double d = 0.0;
        for (int i = k; i < rows; ++i) d += v[i - k] * b[i];
        const double f = 2.0 * d / vv;
        for (int i = k; i < rows; ++i) b[i] -= f * v[i - k];
    }
    std::vector<double> x(cols);
    for (int k = cols - 1; k >= 0; --k) {
        double s = b[k];
        for (int j = k + 1; j < cols; ++j) s -= A(k, j) * x[j];
        x[k] = s / A(k, k);
    }
    return x;
}

double ssim(const std::vector<double>& a, const std::vector<double>& b, int width, int height) {
    const int win = 11;
    const double sigma = 1.5;
    double wts[11][11];
    double total = 0.0;
    for (int v = 0; v < win; ++v) {
        for (int u = 0; u < win; ++u) {
            const double r2 = (u - 5.0) * (u - 5.0) + (v - 5.0) * (v - 5.0);
            wts[v][u] = std::exp(-r2 / (2.0 * sigma * sigma));
            total += wts[v][u];
        }
    }
    for (auto& row : wts)
        for (double& w : row) w /= total;

    const double c1 = 0.01 * 0.01;
    const double c2 = 0.03 * 0.03;
    double sum = 0.0;
    int count = 0;
    for (int y0 = 0; y0 + win <= height; ++y0) {
        for (int x0 = 0; x0 + win <= width; ++x0) {
            double ma = 0.0;
            double mb = 0.0;
            for (int v = 0; v < win; ++v) {
                for (int u = 0; u < win; ++u) {
                    const std::size_t i = static_cast<std::size_t>(y0 + v) * width + x0 + u;
                    ma += wts[v][u] * a[i];
                    mb += wts[v][u] * b[i];
                }
            }
            double va = 0.0;
            double vb = 0.0;
            double cov = 0.0;
            for (int v = 0; v < win; ++v) {
                for (int u = 0; u < win; ++u) {
                    const std::size_t i = static_cast<std::size_t>(y0 + v) * width + x0 + u;
                    va += wts[v][u] * (a[i] - ma) * (a[i] - ma);
                    vb += wts[v][u] * (b[i] - mb) * (b[i] - mb);
                    cov += wts[v][u] * (a[i] - ma) * (b[i] - mb);
                }
            }
            sum += ((2 * ma * mb + c1) * (2 * cov + c2)) / ((ma * ma + mb * mb + c1) * (va + vb + c2));
            ++count;
        }
    }
    return sum / count;
}

Shift phase_correlation(const std::vector<double>& ref, const std::vector<double>& moved, int w, int h, int upsample,
                        bool whiten, bool hann, double band) {
    const std::size_t n = static_cast<std::size_t>(w) * h;
    if (ref.size() != n || moved.size() != n) throw std::invalid_argument("phase_correlation: size mismatch");
    auto prep = [&](const std::vector<double>& img) {
        double mean = 0.0;
        for (double v : img) mean += v;
        mean /= static_cast<double>(n);
        std::vector<cplx> out(n);
        for (int y = 0; y < h; ++y) {
            const double wy = hann ? 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * (y + 0.5) / h) : 1.0;
            for (int x = 0; x < w; ++x) {
                const double wx = hann ? 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * (x + 0.5) / w) : 1.0;
                out[static_cast<std::size_t>(y) * w + x] = (img[static_cast<std::size_t>(y) * w + x] - mean) * wx * wy;
            }
        }
        return out;
    };
    const auto fa = dft2(prep(ref), w, h, false);
    const auto fb = dft2(prep(moved), w, h, false);
    std::vector<cplx> cross(n);
    for (std::size_t i = 0; i < n; ++i) {
        cross[i] = std::conj(fa[i]) * fb[i];
        const double fx = signed_freq(static_cast<int>(i % w), w) / (0.5 * w);
        const double fy = signed_freq(static_cast<int>(i / w), h) / (0.5 * h);
        if (fx * fx + fy * fy > band * band) cross[i] = 0.0;
        if (whiten) {
            const double m = std::abs(cross[i]);
            cross[i] = m > 1e-300 ? cross[i] / m : 0.0;
        }
    }
    const auto corr = dft2(cross, w, h, true);
    std::size_t best = 0;
    for (std::size_t i = 1; i < n; ++i) {
        if (corr[i].real() > corr[best].real()) best = i;
    }
    const double px = signed_freq(static_cast<int>(best % w), w);
    const double py = signed_freq(static_cast<int>(best / w), h);

    // Matrix-multiply DFT over a 1.5 px neighbourhood of the integer peak.
    const int m = static_cast<int>(std::ceil(1.5 * upsample));
    const double start_x = px - 0.75;
    const double start_y = py - 0.75;
    const double step = 1.0 / upsample;
    auto kernel = [&](int len, double start) {
        std::vector<cplx> e(static_cast<std::size_t>(m) * len);
        for (int j = 0; j < m; ++j) {
            for (int k = 0; k < len; ++k) {
                const double ang = 2.0 * std::numbers::pi * signed_freq(k, len) * (start + j * step) / len;
                e[static_cast<std::size_t>(j) * len + k] = {std::cos(ang), std::sin(ang)};
            }
        }
        return e;
    };
    const auto ex = kernel(w, start_x);
    const auto ey = kernel(h, start_y);
    std::vector<cplx> partial(static_cast<std::size_t>(h) * m);
    for (int l = 0; l < h; ++l) {
        for (int j = 0; j < m; ++j) {
            cplx s = 0.0;
            for (int k = 0; k < w; ++k) s += cross[static_cast<std::size_t>(l) * w + k] * ex[static_cast<std::size_t>(j) * w + k];
            partial[static_cast<std::size_t>(l) * m + j] = s;
        }
    }
    Shift out{px, py, -1e300};
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < m; ++j) {
            cplx s = 0.0;
            for (int l = 0; l < h; ++l) s += partial[static_cast<std::size_t>(l) * m + j] * ey[static_cast<std::size_t>(i) * h + l];
            if (s.real() > out.peak) out = {start_x + j * step, start_y + i * step, s.real()};
        }
    }
    return out;
}

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
    const double n = static_cast<double>(x.size());
    double mx = 0.0;
    double my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0;
    double sxy = 0.0;
    double syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    LineFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    double ssr = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double r = y[i] - (f.intercept + f.slope * x[i]);
        ssr += r * r;
    }
    f.r2 = syy > 0.0 ? 1.0 - ssr / syy : 1.0;
    return f;
}

}  // namespace oracle
