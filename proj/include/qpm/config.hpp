#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "qpm/io.hpp"
#include "qpm/pair_rate.hpp"
#include "qpm/spectral.hpp"
#include "qpm/targets.hpp"

namespace qpm {

inline constexpr const char* toolkit_version = "0.1.0";

/// All physical and numerical parameters of a design/analysis run.
/// Defaults describe the reference type-II LN source at 3207.6 nm.
struct RunConfig {
    // dispersion
    std::string dispersion_model = "ln_schlarb_1994";
    double temperature_k = 298.15;

    // pump
    PumpSpec pump{};

    // crystal
    double crystal_length_nm = 3.0e7;
    std::optional<double> poling_period_nm;  // default: solved from the model

    // target
    std::string target_kind = "comb";  // "hg" | "comb" | "tabulated"
    int hg_order = 2;
    double hg_sigma_nm = 0.0;          // 0 = L/6
    int tooth_pairs = 5;
    double tooth_spacing = 0.0;        // 0 = k0/400
    double tooth_width_nm = 0.0;       // 0 = L/4.5
    bool carrier_tooth = false;
    std::string tabulated_csv;
    double amplitude_scale = 0.0;      // 0 = coefficient default
    double omega_window = 1.457e-7;    // H-G sign window half-width, rad/nm

    // analysis grid
    SpectralGrid grid{};
    int pmf_samples = 16384;

    // HOM scan
    double tau_max_fs = 10000.0;
    int tau_points = 1601;

    // rate estimation
    RateParams rate{};
    double d_ref_pm_v = -4.6;
    WavelengthTriple miller_ref{532.0, 1064.0, 1064.0};
    bool d_eff_explicit = false;  // rate.d_eff_pm_v given directly in the config

    // tolerance study
    std::vector<double> resolutions_nm{0.0, 50.0, 100.0, 200.0, 400.0};
    int repetitions = 100;
    std::uint64_t seed = 7117;

    std::string output_dir = "out";

    void validate() const {
        pump.validate();
        grid.validate();
        if (!(crystal_length_nm > 0.0))
            throw std::invalid_argument("config: crystal.length_nm must be > 0");
        if (target_kind != "hg" && target_kind != "comb" && target_kind != "tabulated")
            throw std::invalid_argument("config: target.kind must be hg|comb|tabulated");
        if (target_kind == "tabulated" && tabulated_csv.empty())
            throw std::invalid_argument("config: target.csv required for tabulated target");
        if (!tabulated_csv.empty() && !std::filesystem::exists(tabulated_csv))
            throw std::invalid_argument("config: target.csv file not found: " + tabulated_csv);
        if (repetitions < 2)
            throw std::invalid_argument("config: tolerance.repetitions must be >= 2");
        for (double r : resolutions_nm)
            if (r < 0.0) throw std::invalid_argument("config: tolerance resolutions must be >= 0");
        if (pmf_samples < 256)
            throw std::invalid_argument("config: grid.pmf_samples must be >= 256");
        if (tau_points < 2 || !(tau_max_fs > 0.0))
            throw std::invalid_argument("config: hom.tau_points/tau_max invalid");
    }
};

namespace detail {

using nlohmann::json;

inline void reject_unknown_keys(const json& obj, const std::set<std::string>& known,
                                const std::string& path) {
    for (auto it = obj.begin(); it != obj.end(); ++it)
        if (!known.count(it.key()))
            throw std::invalid_argument("config: unknown key '" + path + it.key() + "'");
}

template <class T>
void fetch(const json& obj, const char* key, T& out, const std::string& path) {
    if (!obj.contains(key)) return;
    try {
        out = obj.at(key).get<T>();
    } catch (const json::exception&) {
        throw std::invalid_argument("config: bad value for field '" + path + key + "'");
    }
}

} // namespace detail

inline RunConfig parse_config_json(const nlohmann::json& j) {
    using detail::fetch;
    using detail::reject_unknown_keys;
    RunConfig c;
    reject_unknown_keys(j, {"dispersion", "pump", "crystal", "target", "grid", "hom",
                            "rate", "tolerance", "output_dir"}, "");
    if (j.contains("dispersion")) {
        const auto& d = j.at("dispersion");
        reject_unknown_keys(d, {"model", "temperature_k"}, "dispersion.");
        fetch(d, "model", c.dispersion_model, "dispersion.");
        fetch(d, "temperature_k", c.temperature_k, "dispersion.");
    }
    if (j.contains("pump")) {
        const auto& p = j.at("pump");
        reject_unknown_keys(p, {"center_nm", "fwhm_nm"}, "pump.");
        fetch(p, "center_nm", c.pump.center_nm, "pump.");
        fetch(p, "fwhm_nm", c.pump.fwhm_nm, "pump.");
    }
    if (j.contains("crystal")) {
        const auto& cr = j.at("crystal");
        reject_unknown_keys(cr, {"length_nm", "poling_period_nm"}, "crystal.");
        fetch(cr, "length_nm", c.crystal_length_nm, "crystal.");
        if (cr.contains("poling_period_nm")) {
            double v = 0.0;
            fetch(cr, "poling_period_nm", v, "crystal.");
            c.poling_period_nm = v;
        }
    }
    if (j.contains("target")) {
        const auto& t = j.at("target");
        reject_unknown_keys(t, {"kind", "order", "sigma_nm", "tooth_pairs", "tooth_spacing",
                                "tooth_width_nm", "carrier_tooth", "csv", "amplitude_scale",
                                "omega_window"}, "target.");
        fetch(t, "kind", c.target_kind, "target.");
        fetch(t, "order", c.hg_order, "target.");
        fetch(t, "sigma_nm", c.hg_sigma_nm, "target.");
        fetch(t, "tooth_pairs", c.tooth_pairs, "target.");
        fetch(t, "tooth_spacing", c.tooth_spacing, "target.");
        fetch(t, "tooth_width_nm", c.tooth_width_nm, "target.");
        fetch(t, "carrier_tooth", c.carrier_tooth, "target.");
        fetch(t, "csv", c.tabulated_csv, "target.");
        fetch(t, "amplitude_scale", c.amplitude_scale, "target.");
        fetch(t, "omega_window", c.omega_window, "target.");
    }
    if (j.contains("grid")) {
        const auto& g = j.at("grid");
        reject_unknown_keys(g, {"size", "center_nm", "span_nm", "pmf_samples"}, "grid.");
        fetch(g, "size", c.grid.size, "grid.");
        fetch(g, "center_nm", c.grid.center_nm, "grid.");
        fetch(g, "span_nm", c.grid.span_nm, "grid.");
        fetch(g, "pmf_samples", c.pmf_samples, "grid.");
    }
    if (j.contains("hom")) {
        const auto& h = j.at("hom");
        reject_unknown_keys(h, {"tau_max_fs", "tau_points"}, "hom.");
        fetch(h, "tau_max_fs", c.tau_max_fs, "hom.");
        fetch(h, "tau_points", c.tau_points, "hom.");
    }
    if (j.contains("rate")) {
        const auto& r = j.at("rate");
        reject_unknown_keys(r, {"pump_power_w", "sigma_p_um", "sigma_1_um", "d_ref_pm_v",
                                "d_eff_pm_v", "n_1", "n_2", "n_p", "n_g1", "n_g2",
                                "ref_pump_nm", "ref_signal_nm", "ref_idler_nm"}, "rate.");
        fetch(r, "pump_power_w", c.rate.pump_power_w, "rate.");
        fetch(r, "sigma_p_um", c.rate.sigma_p_um, "rate.");
        fetch(r, "sigma_1_um", c.rate.sigma_1_um, "rate.");
        fetch(r, "d_ref_pm_v", c.d_ref_pm_v, "rate.");
        fetch(r, "n_1", c.rate.n_1, "rate.");
        fetch(r, "n_2", c.rate.n_2, "rate.");
        fetch(r, "n_p", c.rate.n_p, "rate.");
        fetch(r, "n_g1", c.rate.n_g1, "rate.");
        fetch(r, "n_g2", c.rate.n_g2, "rate.");
        fetch(r, "ref_pump_nm", c.miller_ref.pump_nm, "rate.");
        fetch(r, "ref_signal_nm", c.miller_ref.signal_nm, "rate.");
        fetch(r, "ref_idler_nm", c.miller_ref.idler_nm, "rate.");
        if (r.contains("d_eff_pm_v")) {
            fetch(r, "d_eff_pm_v", c.rate.d_eff_pm_v, "rate.");
            c.d_eff_explicit = true;
        }
    }
    if (j.contains("tolerance")) {
        const auto& t = j.at("tolerance");
        reject_unknown_keys(t, {"resolutions_nm", "repetitions", "seed"}, "tolerance.");
        fetch(t, "resolutions_nm", c.resolutions_nm, "tolerance.");
        fetch(t, "repetitions", c.repetitions, "tolerance.");
        fetch(t, "seed", c.seed, "tolerance.");
    }
    fetch(j, "output_dir", c.output_dir, "");
    c.rate.lambda_p_nm = c.pump.center_nm;
    c.validate();
    return c;
}

inline RunConfig parse_config(const std::filesystem::path& path) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(read_text_file(path));
    } catch (const nlohmann::json::parse_error& e) {
        throw std::invalid_argument("config: JSON parse error in " + path.string()
                                    + ": " + e.what());
    }
    return parse_config_json(j);
}

/// Canonical serialization of the effective configuration (defaults filled);
/// hashed into the run manifest.
inline nlohmann::json config_to_json(const RunConfig& c) {
    nlohmann::json j;
    j["dispersion"] = {{"model", c.dispersion_model}, {"temperature_k", c.temperature_k}};
    j["pump"] = {{"center_nm", c.pump.center_nm}, {"fwhm_nm", c.pump.fwhm_nm}};
    j["crystal"]["length_nm"] = c.crystal_length_nm;
    if (c.poling_period_nm) j["crystal"]["poling_period_nm"] = *c.poling_period_nm;
    j["target"] = {{"kind", c.target_kind}, {"order", c.hg_order},
                   {"sigma_nm", c.hg_sigma_nm}, {"tooth_pairs", c.tooth_pairs},
                   {"tooth_spacing", c.tooth_spacing}, {"tooth_width_nm", c.tooth_width_nm},
                   {"carrier_tooth", c.carrier_tooth}, {"csv", c.tabulated_csv},
                   {"amplitude_scale", c.amplitude_scale}, {"omega_window", c.omega_window}};
    j["grid"] = {{"size", c.grid.size}, {"center_nm", c.grid.center_nm},
                 {"span_nm", c.grid.span_nm}, {"pmf_samples", c.pmf_samples}};
    j["hom"] = {{"tau_max_fs", c.tau_max_fs}, {"tau_points", c.tau_points}};
    j["rate"] = {{"pump_power_w", c.rate.pump_power_w}, {"sigma_p_um", c.rate.sigma_p_um},
                 {"sigma_1_um", c.rate.sigma_1_um}, {"d_ref_pm_v", c.d_ref_pm_v},
                 {"n_1", c.rate.n_1}, {"n_2", c.rate.n_2}, {"n_p", c.rate.n_p},
                 {"n_g1", c.rate.n_g1}, {"n_g2", c.rate.n_g2},
                 {"ref_pump_nm", c.miller_ref.pump_nm},
                 {"ref_signal_nm", c.miller_ref.signal_nm},
                 {"ref_idler_nm", c.miller_ref.idler_nm}};
    if (c.d_eff_explicit) j["rate"]["d_eff_pm_v"] = c.rate.d_eff_pm_v;
    j["tolerance"] = {{"resolutions_nm", c.resolutions_nm},
                      {"repetitions", c.repetitions}, {"seed", c.seed}};
    j["output_dir"] = c.output_dir;
    return j;
}

} // namespace qpm
