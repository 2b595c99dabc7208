#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <mutex>
#include <stdexcept>
#include <string>
#include <vector>

#include "qpm/constants.hpp"
#include "qpm/numeric.hpp"

namespace qpm {

enum class TargetKind { hermite_gauss, comb, tabulated };

/// Physicists' Hermite polynomial H_n(x).
inline double hermite(int n, double x) {
    if (n < 0) throw std::invalid_argument("hermite: order must be >= 0");
    double h0 = 1.0, h1 = 2.0 * x;
    if (n == 0) return h0;
    if (n == 1) return h1;
    for (int k = 2; k <= n; ++k) {
        double h2 = 2.0 * x * h1 - 2.0 * (k - 1) * h0;
        h0 = h1;
        h1 = h2;
    }
    return h1;
}

/// Declarative description of a desired phase-matching function, expressed in
/// wavevector space around the carrier k0 = 2*pi/Lambda.
struct TargetSpec {
    TargetKind kind = TargetKind::comb;
    double carrier_k = 0.0;          // rad/nm
    double crystal_length_nm = 3.0e7;

    // Hermite-Gauss branch
    int hg_order = 2;
    double hg_sigma_nm = 0.0;        // width sigma; default L/6

    // comb branch
    int tooth_pairs = 5;             // N; 2N teeth (or 2N+1 with carrier tooth)
    double tooth_spacing = 0.0;      // sigma-tilde, rad/nm; default k0/400
    double tooth_width_nm = 0.0;     // xi; default L/4.5
    bool carrier_tooth = false;      // odd layout: teeth at k0 + n*spacing, n=-N..N

    // tabulated branch: two columns, k (rad/nm) -> real amplitude
    std::vector<double> tab_k, tab_amplitude;

    double amplitude_scale = 0.0;    // tracker coefficient C; 0 = use default

    static TargetSpec hermite_gauss(double k0, double length_nm, int order = 2,
                                    double sigma_nm = 0.0) {
        TargetSpec s;
        s.kind = TargetKind::hermite_gauss;
        s.carrier_k = k0;
        s.crystal_length_nm = length_nm;
        s.hg_order = order;
        s.hg_sigma_nm = sigma_nm;
        s.validate();
        return s;
    }

    static TargetSpec comb(double k0, double length_nm, int pairs = 5,
                           double spacing = 0.0, double width_nm = 0.0,
                           bool with_carrier_tooth = false) {
        TargetSpec s;
        s.kind = TargetKind::comb;
        s.carrier_k = k0;
        s.crystal_length_nm = length_nm;
        s.tooth_pairs = pairs;
        s.tooth_spacing = spacing;
        s.tooth_width_nm = width_nm;
        s.carrier_tooth = with_carrier_tooth;
        s.validate();
        return s;
    }

    static TargetSpec tabulated(double k0, double length_nm, std::vector<double> k,
                                std::vector<double> amplitude, double scale = 1.0) {
        TargetSpec s;
        s.kind = TargetKind::tabulated;
        s.carrier_k = k0;
        s.crystal_length_nm = length_nm;
        s.tab_k = std::move(k);
        s.tab_amplitude = std::move(amplitude);
        s.amplitude_scale = scale;
        s.validate();
        return s;
    }

    double sigma() const { return hg_sigma_nm > 0.0 ? hg_sigma_nm : crystal_length_nm / 6.0; }
    double spacing() const { return tooth_spacing > 0.0 ? tooth_spacing : carrier_k / 400.0; }
    double xi() const { return tooth_width_nm > 0.0 ? tooth_width_nm : crystal_length_nm / 4.5; }

    /// Tracker coefficient: C = 2*sqrt(e)*sigma/pi for H-G,
    /// C = 5e4*L*sigma_tilde/pi for combs, 1 for tabulated targets.
    double scale() const {
        if (amplitude_scale != 0.0) return amplitude_scale;
        switch (kind) {
            case TargetKind::hermite_gauss:
                return 2.0 * std::sqrt(std::exp(1.0)) * sigma() / pi;
            case TargetKind::comb:
                return 5.0e4 * crystal_length_nm * spacing() / pi;
            case TargetKind::tabulated:
                return 1.0;
        }
        return 1.0;
    }

    void validate() const {
        if (!(carrier_k > 0.0)) throw std::invalid_argument("target: carrier k0 must be > 0");
        if (!(crystal_length_nm > 0.0)) throw std::invalid_argument("target: L must be > 0");
        switch (kind) {
            case TargetKind::hermite_gauss:
                if (hg_order < 0) throw std::invalid_argument("target: H-G order must be >= 0");
                if (!(sigma() > 0.0)) throw std::invalid_argument("target: sigma must be > 0");
                break;
            case TargetKind::comb:
                if (tooth_pairs < 1) throw std::invalid_argument("target: tooth pairs must be >= 1");
                if (!(spacing() > 0.0) || !(xi() > 0.0))
                    throw std::invalid_argument("target: comb spacing and width must be > 0");
                break;
            case TargetKind::tabulated:
                if (tab_k.size() != tab_amplitude.size() || tab_k.size() < 2)
                    throw std::invalid_argument("target: tabulated needs >= 2 (k, amplitude) rows");
                for (std::size_t i = 1; i < tab_k.size(); ++i)
                    if (!(tab_k[i] > tab_k[i - 1]))
                        throw std::invalid_argument("target: tabulated k column must increase");
                break;
        }
    }
};

namespace detail {

// Peak |exp(-x^2/2) H_n(x)|, located by scan + refinement. Used to normalize
// H-G orders other than 2 to the order-2 peak convention.
inline double hermite_envelope_peak(int n) {
    auto f = [n](double x) { return std::abs(std::exp(-0.5 * x * x) * hermite(n, x)); };
    double hi = std::sqrt(2.0 * n + 1.0) + 2.0;
    double best_x = 0.0, best = f(0.0);
    const int samples = 4000;
    for (int i = 0; i <= samples; ++i) {
        double x = hi * i / samples;
        double v = f(x);
        if (v > best) { best = v; best_x = x; }
    }
    double a = std::max(0.0, best_x - hi / samples), b = best_x + hi / samples;
    for (int it = 0; it < 60; ++it) {  // ternary refinement
        double m1 = a + (b - a) / 3.0, m2 = b - (b - a) / 3.0;
        if (f(m1) < f(m2)) a = m1; else b = m2;
    }
    return f(0.5 * (a + b));
}

inline double hg_prefactor(int order) {
    const double order2_prefactor = 1.0 / (2.0 * std::sqrt(2.0));
    if (order == 2) return order2_prefactor;
    static std::mutex mtx;
    static std::vector<double> cache;  // by order, 0 = unset
    std::lock_guard<std::mutex> lock(mtx);
    if (static_cast<std::size_t>(order) >= cache.size())
        cache.resize(static_cast<std::size_t>(order) + 1, 0.0);
    double& slot = cache[static_cast<std::size_t>(order)];
    if (slot == 0.0) {
        double peak2 = order2_prefactor * hermite_envelope_peak(2);
        slot = peak2 / hermite_envelope_peak(order);
    }
    return slot;
}

} // namespace detail

/// Target PMF value at k (real by construction).
inline double target_pmf_value(const TargetSpec& spec, double k) {
    const double dk = k - spec.carrier_k;
    switch (spec.kind) {
        case TargetKind::hermite_gauss: {
            const double x = spec.sigma() * dk;
            return detail::hg_prefactor(spec.hg_order)
                   * std::exp(-0.5 * x * x) * hermite(spec.hg_order, x);
        }
        case TargetKind::comb: {
            const double st = spec.spacing(), w = spec.xi();
            double sum = 0.0;
            if (spec.carrier_tooth) {
                for (int n = -spec.tooth_pairs; n <= spec.tooth_pairs; ++n) {
                    double d = dk - n * st;
                    sum += std::exp(-0.5 * w * w * d * d);
                }
            } else {
                for (int n = 0; n < spec.tooth_pairs; ++n) {
                    double off = (0.5 + n) * st;
                    double dp = dk - off, dm = dk + off;
                    sum += std::exp(-0.5 * w * w * dp * dp)
                         + std::exp(-0.5 * w * w * dm * dm);
                }
            }
            return sum;
        }
        case TargetKind::tabulated: {
            LinearInterpolator interp(spec.tab_k, spec.tab_amplitude);
            return interp(k);
        }
    }
    return 0.0;
}

/// Spatial-domain transform of the target PMF with the carrier exp(i k0 z)
/// included (inverse transform with the 1/(2*pi) convention).
inline cplx target_spatial(const TargetSpec& spec, double z) {
    return std::polar(1.0, spec.carrier_k * z) * [&]() -> cplx {
        const double u = z;
        switch (spec.kind) {
            case TargetKind::hermite_gauss: {
                const double s = spec.sigma();
                // Hermite functions are Fourier eigenfunctions:
                // (1/2pi) IFT[exp(-s^2 dk^2/2) H_n(s dk)] = i^n/(s sqrt(2pi)) exp(-u^2/2s^2) H_n(u/s)
                cplx in(1.0, 0.0);
                for (int m = 0; m < spec.hg_order % 4; ++m) in *= cplx(0.0, 1.0);
                return detail::hg_prefactor(spec.hg_order) * in
                       / (s * std::sqrt(two_pi))
                       * std::exp(-0.5 * u * u / (s * s)) * hermite(spec.hg_order, u / s);
            }
            case TargetKind::comb: {
                const double st = spec.spacing(), w = spec.xi();
                double sum = 0.0;
                double pref;
                if (spec.carrier_tooth) {
                    sum = 1.0;
                    for (int n = 1; n <= spec.tooth_pairs; ++n) sum += 2.0 * std::cos(n * st * u);
                    pref = 1.0 / w;
                } else {
                    for (int n = 0; n < spec.tooth_pairs; ++n)
                        sum += std::cos((2 * n + 1) * st * u / 2.0);
                    pref = 2.0 / w;
                }
                return pref * std::exp(-0.5 * u * u / (w * w)) * sum;
            }
            case TargetKind::tabulated: {
                // numeric envelope; fine trapezoid over the table support
                const int nk = 4096;
                double klo = spec.tab_k.front(), khi = spec.tab_k.back();
                LinearInterpolator interp(spec.tab_k, spec.tab_amplitude);
                double h = (khi - klo) / nk;
                cplx acc(0.0, 0.0);
                for (int i = 0; i <= nk; ++i) {
                    double k = klo + i * h;
                    double wgt = (i == 0 || i == nk) ? 0.5 : 1.0;
                    acc += wgt * interp(k) * std::polar(1.0, (k - spec.carrier_k) * u);
                }
                return acc * h / two_pi;
            }
        }
        return cplx(0.0, 0.0);
    }();
}

/// Spatial envelope (carrier removed), the integrand of the amplitude target.
inline cplx target_envelope(const TargetSpec& spec, double u) {
    return target_spatial(spec, u) * std::polar(1.0, -spec.carrier_k * u);
}

/// Reusable envelope closure; for tabulated targets the interpolator is built
/// once instead of per evaluation.
inline std::function<cplx(double)> make_envelope_fn(const TargetSpec& spec) {
    if (spec.kind != TargetKind::tabulated)
        return [spec](double u) { return target_envelope(spec, u); };
    auto interp = std::make_shared<LinearInterpolator>(spec.tab_k, spec.tab_amplitude);
    const double klo = spec.tab_k.front(), khi = spec.tab_k.back();
    const double k0 = spec.carrier_k;
    const int nk = 4096;
    return [interp, klo, khi, k0, nk](double u) {
        const double h = (khi - klo) / nk;
        cplx acc(0.0, 0.0);
        for (int i = 0; i <= nk; ++i) {
            double k = klo + i * h;
            double w = (i == 0 || i == nk) ? 0.5 : 1.0;
            acc += w * (*interp)(k) * std::polar(1.0, (k - k0) * u);
        }
        return acc * h / two_pi;
    };
}

/// Amplitude curve the poling tracker follows:
///   A_target(z) = C * integral_0^z envelope(z' - L/2) dz'.
/// Holds a cumulative table at every domain boundary so the tracker gets O(1)
/// lookups; arbitrary z is table + local Simpson.
class TargetAmplitude {
public:
    TargetAmplitude(const TargetSpec& spec, double step_nm, int steps)
        : spec_(spec), step_(step_nm), envelope_(make_envelope_fn(spec)) {
        if (!(step_nm > 0.0) || steps < 1)
            throw std::invalid_argument("TargetAmplitude: bad discretization");
        const double scale = spec.scale();
        table_.resize(static_cast<std::size_t>(steps) + 1);
        table_[0] = cplx(0.0, 0.0);
        std::vector<cplx> partial(static_cast<std::size_t>(steps));
        parallel_for(static_cast<std::size_t>(steps), [&](std::size_t j) {
            double a = static_cast<double>(j) * step_nm;
            partial[j] = simpson_complex(
                [&](double z) { return integrand(z); }, a, a + step_nm, 16);
        });
        for (int j = 0; j < steps; ++j)
            table_[static_cast<std::size_t>(j) + 1] =
                table_[static_cast<std::size_t>(j)] + partial[static_cast<std::size_t>(j)];
        for (auto& v : table_) v *= scale;
        scale_ = scale;
    }

    /// A_target at a domain boundary index j in [0, steps].
    cplx at_boundary(std::size_t j) const {
        if (j >= table_.size()) throw std::out_of_range("TargetAmplitude: boundary index");
        return table_[j];
    }

    std::size_t boundary_count() const { return table_.size(); }

    cplx operator()(double z) const {
        if (z < 0.0 || z > spec_.crystal_length_nm + step_)
            throw std::out_of_range("amplitude target: z outside [0, L]");
        double fidx = z / step_;
        auto j = static_cast<std::size_t>(fidx);
        if (j >= table_.size() - 1) j = table_.size() - 2;
        double a = static_cast<double>(j) * step_;
        if (z == a) return table_[j];
        return table_[j] + scale_ * simpson_complex(
            [&](double zz) { return integrand(zz); }, a, z, 16);
    }

private:
    cplx integrand(double z) const {
        return envelope_(z - spec_.crystal_length_nm / 2.0);
    }

    TargetSpec spec_;
    double step_ = 0.0;
    std::function<cplx(double)> envelope_;
    double scale_ = 1.0;
    std::vector<cplx> table_;
};

} // namespace qpm
