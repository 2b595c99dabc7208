#pragma once

#include <cmath>
#include <optional>
#include <string>

#include "qpm/config.hpp"
#include "qpm/dispersion.hpp"
#include "qpm/pair_rate.hpp"
#include "qpm/poling.hpp"
#include "qpm/spectral.hpp"
#include "qpm/targets.hpp"
#include "qpm/tolerance.hpp"

namespace qpm {

/// Config-driven orchestration of the design/analysis chain. Construction
/// resolves the dispersion model and the derived crystal discretization.
class Pipeline {
public:
    explicit Pipeline(RunConfig cfg)
        : cfg_(std::move(cfg)),
          model_(DispersionModel::by_name(cfg_.dispersion_model, cfg_.temperature_k)) {
        period_nm_ = cfg_.poling_period_nm
                         ? *cfg_.poling_period_nm
                         : solve_poling_period(model_, cfg_.pump.center_nm,
                                               cfg_.grid.center_nm, cfg_.grid.center_nm);
        k0_ = two_pi / period_nm_;
        lc_nm_ = period_nm_ / 2.0;
        domain_count_ = static_cast<std::size_t>(std::floor(cfg_.crystal_length_nm / lc_nm_));
    }

    const RunConfig& config() const { return cfg_; }
    const DispersionModel& model() const { return model_; }
    double poling_period_nm() const { return period_nm_; }
    double carrier_k() const { return k0_; }
    double domain_width_nm() const { return lc_nm_; }
    std::size_t domain_count() const { return domain_count_; }

    TargetSpec target() const {
        if (cfg_.target_kind == "hg") {
            auto s = TargetSpec::hermite_gauss(k0_, cfg_.crystal_length_nm, cfg_.hg_order,
                                               cfg_.hg_sigma_nm);
            s.amplitude_scale = cfg_.amplitude_scale;
            return s;
        }
        if (cfg_.target_kind == "comb") {
            auto s = TargetSpec::comb(k0_, cfg_.crystal_length_nm, cfg_.tooth_pairs,
                                      cfg_.tooth_spacing, cfg_.tooth_width_nm,
                                      cfg_.carrier_tooth);
            s.amplitude_scale = cfg_.amplitude_scale;
            return s;
        }
        auto csv = read_matrix_like_table(cfg_.tabulated_csv);
        return TargetSpec::tabulated(k0_, cfg_.crystal_length_nm, std::move(csv.first),
                                     std::move(csv.second),
                                     cfg_.amplitude_scale == 0.0 ? 1.0 : cfg_.amplitude_scale);
    }

    /// The sign window applies to H-G designs only.
    std::optional<double> sign_window() const {
        if (cfg_.target_kind == "hg" && cfg_.omega_window > 0.0) return cfg_.omega_window;
        return std::nullopt;
    }

    DomainSequence design() const {
        TargetAmplitude amp(target(), lc_nm_, static_cast<int>(domain_count_));
        return track_domains([&](std::size_t j) { return amp.at_boundary(j); }, k0_, lc_nm_,
                             domain_count_);
    }

    PmfSampler pmf_sampler(const DomainSequence& seq) const {
        return PmfSampler(seq, model_, cfg_.grid, sign_window(), cfg_.pmf_samples);
    }

    JsaGrid jsa_of(const DomainSequence& seq) const {
        PmfSampler sampler = pmf_sampler(seq);
        return assemble_jsa([&](double ls, double li) { return sampler(ls, li); }, cfg_.pump,
                            cfg_.grid);
    }

    double schmidt_of(const DomainSequence& seq) const {
        return schmidt_decomposition(jsa_of(seq)).schmidt_number;
    }

    /// Effective d_eff: explicit config value, or Miller scaling of d_ref from
    /// the reference triple to (pump, center, center).
    RateParams rate_params() const {
        RateParams p = cfg_.rate;
        p.lambda_p_nm = cfg_.pump.center_nm;
        if (!cfg_.d_eff_explicit) {
            WavelengthTriple tgt{cfg_.pump.center_nm, cfg_.grid.center_nm, cfg_.grid.center_nm};
            p.d_eff_pm_v = miller_scaled_deff(cfg_.d_ref_pm_v, cfg_.miller_ref, tgt, model_);
        }
        return p;
    }

private:
    static std::pair<std::vector<double>, std::vector<double>>
    read_matrix_like_table(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw std::runtime_error("tabulated target file not found: " + path);
        std::vector<double> k, a;
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty() || line[0] == '#') continue;
            for (auto& ch : line)
                if (ch == ',') ch = ' ';
            std::istringstream ls(line);
            double kk, aa;
            if (ls >> kk >> aa) {
                k.push_back(kk);
                a.push_back(aa);
            }
        }
        return {std::move(k), std::move(a)};
    }

    RunConfig cfg_;
    DispersionModel model_;
    double period_nm_ = 0.0, k0_ = 0.0, lc_nm_ = 0.0;
    std::size_t domain_count_ = 0;
};

} // namespace qpm
