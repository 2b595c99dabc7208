#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "qpm/constants.hpp"

namespace qpm {

using cplx = std::complex<double>;

// --- root finding -------------------------------------------------------

/// Bracketed root of a continuous function: bisection with secant
/// acceleration, absolute tolerance on x.
template <class F>
double find_root_bracketed(F&& f, double lo, double hi, double xtol = 1e-4,
                           int max_iter = 200) {
    double flo = f(lo), fhi = f(hi);
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    if ((flo > 0.0) == (fhi > 0.0))
        throw std::invalid_argument("find_root_bracketed: no sign change on ["
                                    + std::to_string(lo) + ", " + std::to_string(hi) + "]");
    for (int it = 0; it < max_iter && (hi - lo) > xtol; ++it) {
        // secant proposal, clamped away from the bracket edges
        double xs = lo - flo * (hi - lo) / (fhi - flo);
        double xm = 0.5 * (lo + hi);
        double x = (xs > lo + 0.01 * (hi - lo) && xs < hi - 0.01 * (hi - lo)) ? xs : xm;
        double fx = f(x);
        if (fx == 0.0) return x;
        if ((fx > 0.0) == (flo > 0.0)) {
            lo = x;
            flo = fx;
        } else {
            hi = x;
            fhi = fx;
        }
    }
    return 0.5 * (lo + hi);
}

// --- quadrature ----------------------------------------------------------

/// Composite Simpson on [a, b] with n panels (n rounded up to even).
template <class F>
double simpson(F&& f, double a, double b, int n) {
    if (n < 2) n = 2;
    if (n % 2) ++n;
    const double h = (b - a) / n;
    double s = f(a) + f(b);
    for (int i = 1; i < n; ++i) s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
    return s * h / 3.0;
}

template <class F>
cplx simpson_complex(F&& f, double a, double b, int n) {
    if (n < 2) n = 2;
    if (n % 2) ++n;
    const double h = (b - a) / n;
    cplx s = f(a) + f(b);
    for (int i = 1; i < n; ++i) s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
    return s * (h / 3.0);
}

// --- interpolation -------------------------------------------------------

/// Linear interpolation on a strictly increasing grid; clamps at the ends.
class LinearInterpolator {
public:
    LinearInterpolator() = default;
    LinearInterpolator(std::vector<double> x, std::vector<double> y)
        : x_(std::move(x)), y_(std::move(y)) {
        if (x_.size() != y_.size() || x_.size() < 2)
            throw std::invalid_argument("LinearInterpolator: need >= 2 matching samples");
        for (std::size_t i = 1; i < x_.size(); ++i)
            if (!(x_[i] > x_[i - 1]))
                throw std::invalid_argument("LinearInterpolator: grid not increasing");
    }

    double operator()(double x) const {
        if (x <= x_.front()) return y_.front();
        if (x >= x_.back()) return y_.back();
        auto it = std::upper_bound(x_.begin(), x_.end(), x);
        std::size_t i = static_cast<std::size_t>(it - x_.begin());
        double t = (x - x_[i - 1]) / (x_[i] - x_[i - 1]);
        return y_[i - 1] + t * (y_[i] - y_[i - 1]);
    }

    const std::vector<double>& grid() const { return x_; }

private:
    std::vector<double> x_, y_;
};

// --- FFT ------------------------------------------------------------------

namespace detail {

inline void fft_radix2(std::vector<cplx>& a, bool inverse) {
    const std::size_t n = a.size();
    if (n == 0 || (n & (n - 1)))
        throw std::invalid_argument("fft: length must be a power of two");
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double ang = (inverse ? two_pi : -two_pi) / static_cast<double>(len);
        const cplx wl(std::cos(ang), std::sin(ang));
        for (std::size_t i = 0; i < n; i += len) {
            cplx w(1.0, 0.0);
            for (std::size_t j = 0; j < len / 2; ++j) {
                cplx u = a[i + j];
                cplx v = a[i + j + len / 2] * w;
                a[i + j] = u + v;
                a[i + j + len / 2] = u - v;
                w *= wl;
            }
        }
    }
}

} // namespace detail

/// In-place forward DFT, unnormalized: X[k] = sum_j x[j] exp(-2*pi*i*j*k/n).
inline void fft(std::vector<cplx>& a) { detail::fft_radix2(a, false); }

/// In-place inverse DFT, normalized by 1/n.
inline void ifft(std::vector<cplx>& a) {
    detail::fft_radix2(a, true);
    const double s = 1.0 / static_cast<double>(a.size());
    for (auto& v : a) v *= s;
}

/// Swap halves so the zero-frequency sample moves to the center.
template <class T>
void fftshift(std::vector<T>& a) {
    std::rotate(a.begin(), a.begin() + static_cast<std::ptrdiff_t>(a.size() / 2), a.end());
}

// --- parallelism ----------------------------------------------------------

/// Worker count: QPM_THREADS env var caps it, default hardware concurrency.
inline unsigned worker_count() {
    unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("QPM_THREADS")) {
        long v = std::strtol(env, nullptr, 10);
        if (v >= 1) return std::min<unsigned>(static_cast<unsigned>(v), 256u);
    }
    return hw;
}

/// Chunked parallel loop over [0, n); body(i) must only touch disjoint state.
template <class Body>
void parallel_for(std::size_t n, Body&& body) {
    unsigned workers = std::min<std::size_t>(worker_count(), n);
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers);
    std::size_t chunk = (n + workers - 1) / workers;
    for (unsigned w = 0; w < workers; ++w) {
        std::size_t lo = w * chunk, hi = std::min(n, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([lo, hi, &body] {
            for (std::size_t i = lo; i < hi; ++i) body(i);
        });
    }
    for (auto& t : pool) t.join();
}

// --- hashing ---------------------------------------------------------------

/// FNV-1a 64-bit, used for artifact checksums in run manifests.
inline std::uint64_t fnv1a64(const void* data, std::size_t len,
                             std::uint64_t seed = 14695981039346656037ull) {
    const auto* p = static_cast<const unsigned char*>(data);
    std::uint64_t h = seed;
    for (std::size_t i = 0; i < len; ++i) {
        h ^= p[i];
        h *= 1099511628211ull;
    }
    return h;
}

inline std::string fnv1a64_hex(const std::string& s) {
    std::uint64_t h = fnv1a64(s.data(), s.size());
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return std::string(buf);
}

} // namespace qpm
