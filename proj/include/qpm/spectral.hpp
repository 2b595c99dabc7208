#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "qpm/constants.hpp"
#include "qpm/dispersion.hpp"
#include "qpm/numeric.hpp"
#include "qpm/poling.hpp"

namespace qpm {

/// Uniform signal x idler wavelength grid, size a power of two.
struct SpectralGrid {
    int size = 512;
    double center_nm = 3207.6;
    double span_nm = 120.0;

    void validate() const {
        if (size < 4 || (size & (size - 1)))
            throw std::invalid_argument("grid size must be a power of two >= 4");
        if (!(span_nm > 0.0) || !(center_nm > span_nm / 2.0))
            throw std::invalid_argument("grid span/center invalid");
    }

    std::vector<double> wavelengths() const {
        std::vector<double> w(static_cast<std::size_t>(size));
        double lo = center_nm - span_nm / 2.0;
        double step = span_nm / (size - 1);
        for (int i = 0; i < size; ++i) w[static_cast<std::size_t>(i)] = lo + i * step;
        return w;
    }

    /// Linearized angular-frequency spacing at the grid center, rad/fs.
    double d_omega() const {
        double dl = span_nm / (size - 1);
        return two_pi * c_nm_per_fs * dl / (center_nm * center_nm);
    }
};

struct PumpSpec {
    double center_nm = 1603.8;
    double fwhm_nm = 2.50;   // intensity FWHM in wavelength

    void validate() const {
        if (!(fwhm_nm > 0.0)) throw std::invalid_argument("pump FWHM must be > 0");
        if (!(center_nm > 0.0)) throw std::invalid_argument("pump center must be > 0");
    }

    double omega0() const { return two_pi * c_nm_per_fs / center_nm; }

    /// Amplitude-Gaussian sigma in rad/fs such that the intensity |alpha|^2
    /// has the configured FWHM in wavelength.
    double sigma_omega() const {
        double fwhm_omega = two_pi * c_nm_per_fs * fwhm_nm / (center_nm * center_nm);
        return fwhm_omega / (2.0 * std::sqrt(std::log(2.0)));
    }
};

/// alpha(omega_s + omega_i), peak 1 at the pump carrier.
inline double pump_envelope(const PumpSpec& pump, double omega_sum) {
    double d = omega_sum - pump.omega0();
    double s = pump.sigma_omega();
    return std::exp(-d * d / (2.0 * s * s));
}

/// Complex joint spectral amplitude sampled on a wavelength grid.
/// Row index = signal, column index = idler.
struct JsaGrid {
    SpectralGrid grid;
    std::vector<cplx> amplitude;  // row-major, size M*M
    bool normalized = false;

    cplx& at(int s, int i) {
        return amplitude[static_cast<std::size_t>(s) * static_cast<std::size_t>(grid.size)
                         + static_cast<std::size_t>(i)];
    }
    cplx at(int s, int i) const {
        return amplitude[static_cast<std::size_t>(s) * static_cast<std::size_t>(grid.size)
                         + static_cast<std::size_t>(i)];
    }

    double norm_squared_times_domega2() const {
        double s = 0.0;
        for (const auto& v : amplitude) s += std::norm(v);
        double dw = grid.d_omega();
        return s * dw * dw;
    }
};

/// Dense PMF sampler over the k range the grid maps to; linear interpolation
/// between samples. Covers k(lambda_s, lambda_i) = k_p - k_s - k_i.
class PmfSampler {
public:
    PmfSampler(const DomainSequence& seq, const DispersionModel& model,
               const SpectralGrid& grid, std::optional<double> omega_window,
               int samples = 16384)
        : seq_(&seq), model_(&model), window_(omega_window) {
        grid.validate();
        auto lams = grid.wavelengths();
        double kmin = 1e300, kmax = -1e300;
        // k is monotone in each argument; corners bound the range
        for (double ls : {lams.front(), lams.back()})
            for (double li : {lams.front(), lams.back()}) {
                double k = mismatch_k(ls, li);
                kmin = std::min(kmin, k);
                kmax = std::max(kmax, k);
            }
        double pad = 1e-3 * (kmax - kmin) + 1e-12;
        double lo = kmin - pad;
        double dk = (kmax - kmin + 2 * pad) / (samples - 1);
        auto pmf = achieved_pmf_uniform_grid(seq, lo, dk,
                                             static_cast<std::size_t>(samples), omega_window);
        interp_ = LinearInterpolator(std::move(pmf.k), std::move(pmf.phi));
    }

    double mismatch_k(double lambda_s, double lambda_i) const {
        double lambda_p = 1.0 / (1.0 / lambda_s + 1.0 / lambda_i);
        return two_pi * (model_->refractive_index(Polarization::ordinary, lambda_p) / lambda_p
                       - model_->refractive_index(Polarization::ordinary, lambda_s) / lambda_s
                       - model_->refractive_index(Polarization::extraordinary, lambda_i) / lambda_i);
    }

    double operator()(double lambda_s, double lambda_i) const {
        return interp_(mismatch_k(lambda_s, lambda_i));
    }

private:
    const DomainSequence* seq_;
    const DispersionModel* model_;
    std::optional<double> window_;
    LinearInterpolator interp_;
};

/// f = phi * alpha on the grid, L2-normalized so sum |f|^2 dw^2 = 1
/// (dw = center-linearized spacing; the wavelength->frequency Jacobian is
/// deliberately omitted, matching wavelength-axis plotting).
inline JsaGrid assemble_jsa(const std::function<double(double, double)>& pmf,
                            const PumpSpec& pump, const SpectralGrid& grid,
                            bool normalize = true) {
    grid.validate();
    pump.validate();
    JsaGrid jsa;
    jsa.grid = grid;
    const int m = grid.size;
    jsa.amplitude.assign(static_cast<std::size_t>(m) * static_cast<std::size_t>(m),
                         cplx(0.0, 0.0));
    auto lams = grid.wavelengths();
    std::vector<double> omegas(lams.size());
    for (std::size_t i = 0; i < lams.size(); ++i) omegas[i] = two_pi * c_nm_per_fs / lams[i];
    parallel_for(static_cast<std::size_t>(m), [&](std::size_t s) {
        for (int i = 0; i < m; ++i) {
            double phi = pmf(lams[s], lams[static_cast<std::size_t>(i)]);
            double alpha = pump_envelope(pump, omegas[s] + omegas[static_cast<std::size_t>(i)]);
            jsa.amplitude[s * static_cast<std::size_t>(m) + static_cast<std::size_t>(i)] =
                cplx(phi * alpha, 0.0);
        }
    });
    if (normalize) {
        double n2 = jsa.norm_squared_times_domega2();
        if (!(n2 > 0.0)) throw std::runtime_error("assemble_jsa: zero-norm amplitude");
        double scale = 1.0 / std::sqrt(n2);
        for (auto& v : jsa.amplitude) v *= scale;
        jsa.normalized = true;
    }
    return jsa;
}

/// Joint temporal amplitude on a centered time grid.
struct JtaGrid {
    int size = 0;
    double dt_fs = 0.0;           // spacing; axis value = (index - size/2) * dt
    std::vector<cplx> amplitude;  // row-major
};

/// Unitary centered 2-D inverse transform of the JSA:
/// sum |g|^2 dt^2 = sum |f|^2 dw^2 exactly (Parseval).
inline JtaGrid jta_from_jsa(const JsaGrid& jsa) {
    const int m = jsa.grid.size;
    const double dw = jsa.grid.d_omega();
    JtaGrid out;
    out.size = m;
    out.dt_fs = two_pi / (m * dw);
    out.amplitude.assign(jsa.amplitude.size(), cplx(0.0, 0.0));

    // rows then columns; ifftshift before, fftshift after, per axis
    auto centered_ifft = [](std::vector<cplx>& line) {
        fftshift(line);  // for even sizes ifftshift == fftshift
        ifft(line);
        fftshift(line);
    };
    std::vector<std::vector<cplx>> rows(static_cast<std::size_t>(m));
    for (int s = 0; s < m; ++s) {
        auto& line = rows[static_cast<std::size_t>(s)];
        line.assign(jsa.amplitude.begin() + static_cast<std::ptrdiff_t>(s) * m,
                    jsa.amplitude.begin() + static_cast<std::ptrdiff_t>(s + 1) * m);
    }
    parallel_for(static_cast<std::size_t>(m), [&](std::size_t s) { centered_ifft(rows[s]); });
    // transpose, transform, transpose back
    std::vector<std::vector<cplx>> cols(static_cast<std::size_t>(m),
                                        std::vector<cplx>(static_cast<std::size_t>(m)));
    for (int s = 0; s < m; ++s)
        for (int i = 0; i < m; ++i)
            cols[static_cast<std::size_t>(i)][static_cast<std::size_t>(s)] =
                rows[static_cast<std::size_t>(s)][static_cast<std::size_t>(i)];
    parallel_for(static_cast<std::size_t>(m), [&](std::size_t i) { centered_ifft(cols[i]); });

    // unitary scaling: (dw * m)^2 / (2 pi) on top of the 1/m^2-normalized ifft
    const double s2 = (dw * m) * (dw * m) / two_pi;
    for (int s = 0; s < m; ++s)
        for (int i = 0; i < m; ++i)
            out.amplitude[static_cast<std::size_t>(s) * static_cast<std::size_t>(m)
                          + static_cast<std::size_t>(i)] =
                cols[static_cast<std::size_t>(i)][static_cast<std::size_t>(s)] * s2;
    return out;
}

/// HOM coincidence probability p(tau) = 1/2 - 1/2 sum |f|^2 cos((w_s - w_i) tau) dw^2,
/// with exact per-sample angular frequencies. Requires a normalized JSA.
inline std::vector<double> hom_scan(const JsaGrid& jsa, const std::vector<double>& taus_fs) {
    if (!jsa.normalized) throw std::invalid_argument("hom_scan: JSA must be normalized");
    const int m = jsa.grid.size;
    auto lams = jsa.grid.wavelengths();
    std::vector<double> omega(lams.size());
    for (std::size_t i = 0; i < lams.size(); ++i) omega[i] = two_pi * c_nm_per_fs / lams[i];

    // collapse to weights over the frequency difference
    std::vector<double> wdiff(jsa.amplitude.size()), weight(jsa.amplitude.size());
    const double dw2 = jsa.grid.d_omega() * jsa.grid.d_omega();
    for (int s = 0; s < m; ++s)
        for (int i = 0; i < m; ++i) {
            std::size_t idx = static_cast<std::size_t>(s) * static_cast<std::size_t>(m)
                              + static_cast<std::size_t>(i);
            wdiff[idx] = omega[static_cast<std::size_t>(s)] - omega[static_cast<std::size_t>(i)];
            weight[idx] = std::norm(jsa.amplitude[idx]) * dw2;
        }
    std::vector<double> p(taus_fs.size(), 0.0);
    parallel_for(taus_fs.size(), [&](std::size_t t) {
        const double tau = taus_fs[t];
        double acc = 0.0;
        for (std::size_t idx = 0; idx < weight.size(); ++idx)
            acc += weight[idx] * std::cos(wdiff[idx] * tau);
        p[t] = 0.5 - 0.5 * acc;
    });
    return p;
}

struct SchmidtResult {
    std::vector<double> singular_values;  // descending
    std::vector<double> weights;          // p_i = s_i^2 / sum s_j^2
    double schmidt_number = 0.0;          // K = 1 / sum p_i^2
};

/// Schmidt spectrum via the Hermitian Gram matrix F F^dagger (singular values
/// are the square roots of its eigenvalues). Real-valued amplitudes take the
/// faster real-symmetric route.
inline SchmidtResult schmidt_decomposition(const JsaGrid& jsa) {
    const int m = jsa.grid.size;
    bool real_valued = true;
    for (const auto& v : jsa.amplitude)
        if (v.imag() != 0.0) {
            real_valued = false;
            break;
        }
    Eigen::VectorXd ev;
    if (real_valued) {
        Eigen::MatrixXd f(m, m);
        for (int s = 0; s < m; ++s)
            for (int i = 0; i < m; ++i) f(s, i) = jsa.at(s, i).real();
        Eigen::MatrixXd gram = f * f.transpose();
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram, Eigen::EigenvaluesOnly);
        if (es.info() != Eigen::Success)
            throw std::runtime_error("schmidt_decomposition: eigensolver failed");
        ev = es.eigenvalues();
    } else {
        using Mat = Eigen::MatrixXcd;
        Eigen::Map<const Mat> f(jsa.amplitude.data(), m, m);  // transpose view; K is basis-free
        Mat gram = f * f.adjoint();
        Eigen::SelfAdjointEigenSolver<Mat> es(gram, Eigen::EigenvaluesOnly);
        if (es.info() != Eigen::Success)
            throw std::runtime_error("schmidt_decomposition: eigensolver failed");
        ev = es.eigenvalues();
    }
    SchmidtResult r;
    double total = 0.0;
    for (int i = 0; i < ev.size(); ++i) {
        double v = std::max(0.0, ev[i]);
        total += v;
    }
    if (!(total > 0.0)) throw std::runtime_error("schmidt_decomposition: zero spectrum");
    r.singular_values.reserve(static_cast<std::size_t>(ev.size()));
    for (int i = ev.size() - 1; i >= 0; --i)
        r.singular_values.push_back(std::sqrt(std::max(0.0, ev[i])));
    double sum_p2 = 0.0;
    r.weights.reserve(r.singular_values.size());
    for (double s : r.singular_values) {
        double p = s * s / total;
        r.weights.push_back(p);
        sum_p2 += p * p;
    }
    r.schmidt_number = 1.0 / sum_p2;
    return r;
}

/// Samples along omega_s - omega_i at fixed omega_s + omega_i; sum_index is
/// the anti-diagonal index in [0, 2M-2] (M-1 = grid center).
inline std::vector<cplx> antidiagonal_profile(const std::vector<cplx>& mat, int m,
                                              int sum_index) {
    if (static_cast<std::size_t>(m) * static_cast<std::size_t>(m) != mat.size())
        throw std::invalid_argument("antidiagonal_profile: matrix must be square");
    if (sum_index < 0 || sum_index > 2 * m - 2)
        throw std::out_of_range("antidiagonal_profile: offset outside grid");
    std::vector<cplx> out;
    for (int s = 0; s < m; ++s) {
        int i = sum_index - s;
        if (i < 0 || i >= m) continue;
        out.push_back(mat[static_cast<std::size_t>(s) * static_cast<std::size_t>(m)
                          + static_cast<std::size_t>(i)]);
    }
    return out;
}

/// Local maxima above a relative floor; used for mode counting.
inline int count_peaks(const std::vector<double>& v, double rel_floor = 0.05) {
    if (v.size() < 3) return 0;
    double peak = 0.0;
    for (double x : v) peak = std::max(peak, x);
    const double floor = rel_floor * peak;
    int n = 0;
    for (std::size_t i = 1; i + 1 < v.size(); ++i)
        if (v[i] > floor && v[i] >= v[i - 1] && v[i] > v[i + 1]) ++n;
    return n;
}

} // namespace qpm
