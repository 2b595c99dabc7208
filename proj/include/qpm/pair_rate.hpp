#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include "qpm/constants.hpp"
#include "qpm/dispersion.hpp"
#include "qpm/numeric.hpp"
#include "qpm/poling.hpp"

namespace qpm {

/// Inputs of the absolute single-Gaussian-mode pair-rate estimate. Indices and
/// group indices are explicit inputs (reference tabulated values by default),
/// not derived from the dispersion model.
struct RateParams {
    double pump_power_w = 1e-3;
    double sigma_p_um = 50.0;    // pump beam width
    double sigma_1_um = 50.0;    // biphoton beam width
    double d_eff_pm_v = -3.26;
    double n_1 = 2.1302;
    double n_2 = 2.0612;
    double n_p = 2.2026;
    double n_g1 = 2.3276;
    double n_g2 = 2.2335;
    double lambda_p_nm = 1603.8;

    void validate() const {
        if (!(pump_power_w > 0.0) || !(sigma_p_um > 0.0) || !(sigma_1_um > 0.0)
            || !(n_1 > 0.0) || !(n_2 > 0.0) || !(n_p > 0.0)
            || !(n_g1 > 0.0) || !(n_g2 > 0.0) || !(lambda_p_nm > 0.0)
            || d_eff_pm_v == 0.0)
            throw std::invalid_argument("rate params: all entries must be positive "
                                        "(d_eff nonzero, signed)");
    }

    /// Pump field amplitude from P = c eps0 n_p pi sigma_p^2 |E|^2, V/m.
    double pump_field_v_per_m() const {
        double sp = sigma_p_um * 1e-6;
        return std::sqrt(pump_power_w
                         / (c_m_per_s * vacuum_permittivity * n_p * pi * sp * sp));
    }
};

struct WavelengthTriple {
    double pump_nm, signal_nm, idler_nm;
};

/// Miller-rule scaling of the effective nonlinearity between two (o,o,e)
/// processes: d scales with the product of first-order susceptibilities
/// chi1 = n^2 - 1 at the three wavelengths.
inline double miller_scaled_deff(double d_ref_pm_v, const WavelengthTriple& ref,
                                 const WavelengthTriple& target,
                                 const DispersionModel& model) {
    auto chi1 = [&](Polarization p, double lam) {
        double n = model.refractive_index(p, lam);
        return n * n - 1.0;
    };
    double num = chi1(Polarization::ordinary, target.pump_nm)
               * chi1(Polarization::ordinary, target.signal_nm)
               * chi1(Polarization::extraordinary, target.idler_nm);
    double den = chi1(Polarization::ordinary, ref.pump_nm)
               * chi1(Polarization::ordinary, ref.signal_nm)
               * chi1(Polarization::extraordinary, ref.idler_nm);
    return d_ref_pm_v * num / den;
}

/// Wavevector mismatch k(omega_s) in rad/m for a monochromatic pump:
/// k = [w_p n_p(w_p) - w_s n_o(w_s) - (w_p - w_s) n_e(w_p - w_s)] / c.
inline double rate_mismatch_k(const DispersionModel& model, double omega_s_rad_s,
                              double lambda_p_nm) {
    const double omega_p = two_pi * c_m_per_s / (lambda_p_nm * 1e-9);
    const double omega_i = omega_p - omega_s_rad_s;
    if (!(omega_s_rad_s > 0.0) || !(omega_i > 0.0))
        throw std::domain_error("rate_mismatch_k: omega_s outside (0, omega_p)");
    const double lam_s_nm = two_pi * c_m_per_s / omega_s_rad_s * 1e9;
    const double lam_i_nm = two_pi * c_m_per_s / omega_i * 1e9;
    return (omega_p * model.refractive_index(Polarization::ordinary, lambda_p_nm)
            - omega_s_rad_s * model.refractive_index(Polarization::ordinary, lam_s_nm)
            - omega_i * model.refractive_index(Polarization::extraordinary, lam_i_nm))
           / c_m_per_s;
}

/// Analytic per-domain evaluation of integral_0^L chi(z) exp(-i k z) dz for a
/// given k in rad/m; result in meters. chi(z) is the +-1 poling profile.
inline cplx transfer_integral_at_k(const DomainSequence& seq, double k) {
    cplx sum(0.0, 0.0);
    if (seq.uniform_widths()) {
        const double w_m = seq.nominal_width_nm * 1e-9;
        const cplx ratio = std::polar(1.0, -k * w_m);
        const cplx base = (k == 0.0) ? cplx(w_m, 0.0)
                                     : (ratio - cplx(1.0, 0.0)) / cplx(0.0, -k);
        cplx phase(1.0, 0.0);
        for (const auto& d : seq.domains) {
            sum += static_cast<double>(d.sign) * phase;
            phase *= ratio;
        }
        sum *= base;
    } else {
        auto z = seq.boundaries();
        cplx prev(1.0, 0.0);
        for (std::size_t j = 0; j < seq.size(); ++j) {
            const cplx cur = std::polar(1.0, -k * z[j + 1] * 1e-9);
            sum += static_cast<double>(seq.domains[j].sign) * (cur - prev);
            prev = cur;
        }
        sum /= cplx(0.0, -k);
    }
    return sum;
}

/// Transfer integral at the mismatch k(omega_s) of Eq.-(18) form.
inline cplx transfer_integral(const DomainSequence& seq, double omega_s_rad_s,
                              double lambda_p_nm, const DispersionModel& model) {
    return transfer_integral_at_k(seq, rate_mismatch_k(model, omega_s_rad_s, lambda_p_nm));
}

struct RateResult {
    double rate_per_s = 0.0;
    double rate_per_s_per_mw = 0.0;
    double band_lo_nm = 0.0, band_hi_nm = 0.0;  // signal-wavelength band used
    int quadrature_points = 0;
    bool converged = false;
    bool band_clipped = false;  // index validity window limited the band
};

/// Absolute pair rate:
///   R = P/(8 eps0 pi^2 c^3) * n_g1 n_g2/(n_1^2 n_2^2 n_p)
///       * |sigma_p/(sigma_1^2 + 2 sigma_p^2)|^2 * (4 d_eff)^2
///       * integral_0^{w_p} w_s (w_p - w_s) |transfer|^2 dw_s.
/// The quadrature band is restricted to the index validity window and to
/// where the integrand exceeds 1e-8 of its peak; the trapezoid grid doubles
/// until successive results differ by < 1%.
inline RateResult pair_rate(const DomainSequence& seq, const RateParams& params,
                            const DispersionModel& model) {
    params.validate();
    if (seq.domains.empty()) throw std::invalid_argument("pair_rate: empty sequence");

    const double omega_p = two_pi * c_m_per_s / (params.lambda_p_nm * 1e-9);
    const double omega_edge = two_pi * c_m_per_s / (DispersionModel::window_max_nm * 1e-9);
    double w_lo = omega_edge * (1.0 + 1e-9);
    double w_hi = omega_p - omega_edge * (1.0 + 1e-9);
    if (!(w_hi > w_lo)) throw std::domain_error("pair_rate: empty quadrature band");

    auto integrand = [&](double ws) {
        cplx x = transfer_integral_at_k(seq, rate_mismatch_k(model, ws, params.lambda_p_nm));
        return ws * (omega_p - ws) * std::norm(x);
    };

    // band restriction from a coarse scan
    {
        const int scan_n = 4096;
        std::vector<double> vals(scan_n + 1);
        parallel_for(static_cast<std::size_t>(scan_n + 1), [&](std::size_t i) {
            vals[i] = integrand(w_lo + (w_hi - w_lo) * static_cast<double>(i) / scan_n);
        });
        double peak = 0.0;
        for (double v : vals) peak = std::max(peak, v);
        const double floor = 1e-8 * peak;
        int lo_i = 0, hi_i = scan_n;
        while (lo_i < scan_n && vals[static_cast<std::size_t>(lo_i)] < floor) ++lo_i;
        while (hi_i > 0 && vals[static_cast<std::size_t>(hi_i)] < floor) --hi_i;
        lo_i = std::max(0, lo_i - 1);
        hi_i = std::min(scan_n, hi_i + 1);
        double new_lo = w_lo + (w_hi - w_lo) * lo_i / scan_n;
        double new_hi = w_lo + (w_hi - w_lo) * hi_i / scan_n;
        w_lo = new_lo;
        w_hi = new_hi;
    }

    RateResult res;
    res.band_clipped = true;  // the validity window always bounds the band
    res.band_lo_nm = two_pi * c_m_per_s / w_hi * 1e9;
    res.band_hi_nm = two_pi * c_m_per_s / w_lo * 1e9;

    double prev_integral = -1.0;
    double integral = 0.0;
    int n = 16384;
    const int max_doublings = 4;
    for (int attempt = 0; attempt <= max_doublings; ++attempt, n *= 2) {
        std::vector<double> vals(static_cast<std::size_t>(n) + 1);
        const double h = (w_hi - w_lo) / n;
        parallel_for(vals.size(), [&](std::size_t i) {
            vals[i] = integrand(w_lo + h * static_cast<double>(i));
        });
        double s = 0.5 * (vals.front() + vals.back());
        for (std::size_t i = 1; i + 1 < vals.size(); ++i) s += vals[i];
        integral = s * h;
        res.quadrature_points = n + 1;
        if (prev_integral >= 0.0
            && std::abs(integral - prev_integral) < 0.01 * std::abs(integral)) {
            res.converged = true;
            break;
        }
        prev_integral = integral;
    }
    if (!res.converged)
        throw std::runtime_error("pair_rate: quadrature did not converge below 1% after "
                                 + std::to_string(max_doublings) + " doublings ("
                                 + std::to_string(res.quadrature_points) + " points, last "
                                 + std::to_string(integral) + " vs "
                                 + std::to_string(prev_integral) + ")");

    const double sp = params.sigma_p_um * 1e-6, s1 = params.sigma_1_um * 1e-6;
    const double deff = params.d_eff_pm_v * 1e-12;
    const double beam = sp / (s1 * s1 + 2.0 * sp * sp);
    const double pref = params.pump_power_w
                        / (8.0 * vacuum_permittivity * pi * pi
                           * c_m_per_s * c_m_per_s * c_m_per_s)
                        * (params.n_g1 * params.n_g2)
                        / (params.n_1 * params.n_1 * params.n_2 * params.n_2 * params.n_p)
                        * beam * beam * (4.0 * deff) * (4.0 * deff);
    res.rate_per_s = pref * integral;
    res.rate_per_s_per_mw = res.rate_per_s / (params.pump_power_w / 1e-3);
    return res;
}

} // namespace qpm
