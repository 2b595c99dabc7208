// Command-line surface of the crystal-design toolkit. Every subcommand is a
// thin shell over one module chain; artifacts land in the output directory
// and are recorded in manifest.json.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "qpm/config.hpp"
#include "qpm/dispersion.hpp"
#include "qpm/io.hpp"
#include "qpm/manifest.hpp"
#include "qpm/pipeline.hpp"
#include "qpm/tolerance.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct CliOptions {
    std::string config_path;
    std::string out_dir;
    std::optional<std::uint64_t> seed;
    std::optional<int> grid_size;
    std::optional<double> span_nm;
};

qpm::RunConfig load_config(const CliOptions& opt) {
    qpm::RunConfig cfg;
    if (!opt.config_path.empty()) {
        if (!fs::exists(opt.config_path))
            throw std::runtime_error("config file not found: " + opt.config_path);
        cfg = qpm::parse_config(opt.config_path);
    }
    if (!opt.out_dir.empty()) cfg.output_dir = opt.out_dir;
    if (opt.seed) cfg.seed = *opt.seed;
    if (opt.grid_size) cfg.grid.size = *opt.grid_size;
    if (opt.span_nm) cfg.grid.span_nm = *opt.span_nm;
    cfg.validate();
    return cfg;
}

fs::path sequence_path(const qpm::RunConfig& cfg) {
    return fs::path(cfg.output_dir) / "sequence.txt";
}

qpm::DomainSequence load_or_fail_sequence(const qpm::RunConfig& cfg) {
    fs::path p = sequence_path(cfg);
    if (!fs::exists(p)) {
        std::cerr << "error: sequence file not found: " << p.string() << "\n";
        std::exit(2);
    }
    return qpm::load_sequence(p);
}

std::vector<double> abs_values(const std::vector<qpm::cplx>& v) {
    std::vector<double> out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = std::abs(v[i]);
    return out;
}

// command bodies ------------------------------------------------------------

void cmd_gvm(const qpm::RunConfig& cfg) {
    auto model = qpm::DispersionModel::by_name(cfg.dispersion_model, cfg.temperature_k);
    double root = qpm::solve_gvm_wavelength(model, 2500.0, 4000.0);
    std::printf("gvm_wavelength_nm %.4f\n", root);
}

void cmd_period(const qpm::RunConfig& cfg) {
    qpm::Pipeline pl(cfg);
    std::printf("poling_period_nm %.4f\n", pl.poling_period_nm());
    std::printf("domain_width_nm %.4f\n", pl.domain_width_nm());
    std::printf("domain_count %zu\n", pl.domain_count());
}

void cmd_design(const qpm::RunConfig& cfg, qpm::RunManifest& manifest) {
    qpm::Pipeline pl(cfg);
    qpm::DomainSequence seq = pl.design();
    fs::path p = sequence_path(cfg);
    qpm::save_sequence(seq, p);
    manifest.add(p);
    std::printf("designed %zu domains, L_c = %.4f nm, k0 = %.10g rad/nm\n", seq.size(),
                seq.nominal_width_nm, seq.carrier_k);
}

// PMF export grid: covers the carrier neighbourhood wide enough for either
// target family at the configured sample count.
std::vector<double> pmf_export_grid(const qpm::Pipeline& pl, const qpm::DomainSequence& seq) {
    const auto& cfg = pl.config();
    qpm::TargetSpec t = pl.target();
    double halfwidth;
    if (cfg.target_kind == "comb") halfwidth = (cfg.tooth_pairs + 1.5) * t.spacing();
    else if (cfg.target_kind == "hg") halfwidth = 8.0 / t.sigma();
    else halfwidth = std::max(std::abs(t.tab_k.front() - t.carrier_k),
                              std::abs(t.tab_k.back() - t.carrier_k)) * 1.2;
    int n = cfg.pmf_samples;
    std::vector<double> ks(static_cast<std::size_t>(n));
    double k0 = seq.carrier_k;
    for (int i = 0; i < n; ++i)
        ks[static_cast<std::size_t>(i)] = k0 - halfwidth + 2.0 * halfwidth * i / (n - 1);
    return ks;
}

void cmd_pmf(const qpm::RunConfig& cfg, qpm::RunManifest& manifest) {
    qpm::Pipeline pl(cfg);
    qpm::DomainSequence seq = load_or_fail_sequence(cfg);
    auto pmf = qpm::achieved_pmf(seq, pmf_export_grid(pl, seq), pl.sign_window());
    fs::path p = fs::path(cfg.output_dir) / "pmf.csv";
    qpm::write_trace_csv(p, "k_rad_per_nm,phi", pmf.k, pmf.phi);
    manifest.add(p);
    std::printf("pmf written: %zu samples\n", pmf.k.size());
}

void cmd_jsa(const qpm::RunConfig& cfg, qpm::RunManifest& manifest) {
    qpm::Pipeline pl(cfg);
    qpm::DomainSequence seq = load_or_fail_sequence(cfg);
    qpm::JsaGrid jsa = pl.jsa_of(seq);
    auto lams = jsa.grid.wavelengths();
    std::vector<double> real_part(jsa.amplitude.size());
    for (std::size_t i = 0; i < jsa.amplitude.size(); ++i)
        real_part[i] = jsa.amplitude[i].real();
    fs::path pcsv = fs::path(cfg.output_dir) / "jsa.csv";
    qpm::write_matrix_csv(pcsv, "signal_nm\\idler_nm", lams, lams, real_part);
    manifest.add(pcsv);
    std::vector<double> mag(jsa.amplitude.size());
    for (std::size_t i = 0; i < jsa.amplitude.size(); ++i) mag[i] = std::abs(jsa.amplitude[i]);
    fs::path pppm = fs::path(cfg.output_dir) / "jsa.ppm";
    qpm::write_heatmap_ppm(pppm, mag, jsa.grid.size, jsa.grid.size);
    manifest.add(pppm);
    std::printf("jsa written: %dx%d grid\n", jsa.grid.size, jsa.grid.size);
}

void cmd_jta(const qpm::RunConfig& cfg, qpm::RunManifest& manifest) {
    qpm::Pipeline pl(cfg);
    qpm::DomainSequence seq = load_or_fail_sequence(cfg);
    qpm::JsaGrid jsa = pl.jsa_of(seq);
    qpm::JtaGrid jta = qpm::jta_from_jsa(jsa);
    std::vector<double> times(static_cast<std::size_t>(jta.size));
    for (int i = 0; i < jta.size; ++i)
        times[static_cast<std::size_t>(i)] = (i - jta.size / 2) * jta.dt_fs;
    auto mag = abs_values(jta.amplitude);
    fs::path pcsv = fs::path(cfg.output_dir) / "jta.csv";
    qpm::write_matrix_csv(pcsv, "t_signal_fs\\t_idler_fs", times, times, mag);
    manifest.add(pcsv);
    fs::path pppm = fs::path(cfg.output_dir) / "jta.ppm";
    qpm::write_heatmap_ppm(pppm, mag, jta.size, jta.size);
    manifest.add(pppm);
    std::printf("jta written: dt = %.4f fs\n", jta.dt_fs);
}

void cmd_hom(const qpm::RunConfig& cfg, qpm::RunManifest& manifest) {
    qpm::Pipeline pl(cfg);
    qpm::DomainSequence seq = load_or_fail_sequence(cfg);
    qpm::JsaGrid jsa = pl.jsa_of(seq);
    std::vector<double> taus(static_cast<std::size_t>(cfg.tau_points));
    for (int i = 0; i < cfg.tau_points; ++i)
        taus[static_cast<std::size_t>(i)] =
            -cfg.tau_max_fs + 2.0 * cfg.tau_max_fs * i / (cfg.tau_points - 1);
    auto p = qpm::hom_scan(jsa, taus);
    fs::path pcsv = fs::path(cfg.output_dir) / "hom.csv";
    qpm::write_trace_csv(pcsv, "tau_fs,p", taus, p);
    manifest.add(pcsv);
    std::printf("hom written: %d delays\n", cfg.tau_points);
}

void cmd_schmidt(const qpm::RunConfig& cfg, qpm::RunManifest& manifest) {
    qpm::Pipeline pl(cfg);
    qpm::DomainSequence seq = load_or_fail_sequence(cfg);
    auto res = qpm::schmidt_decomposition(pl.jsa_of(seq));
    json j;
    j["K"] = res.schmidt_number;
    j["top_weights"] = std::vector<double>(
        res.weights.begin(),
        res.weights.begin() + std::min<std::size_t>(16, res.weights.size()));
    fs::path p = fs::path(cfg.output_dir) / "schmidt.json";
    qpm::write_text_file(p, j.dump(2) + "\n");
    manifest.add(p);
    std::printf("K %.6f\n", res.schmidt_number);
}

void cmd_rate(const qpm::RunConfig& cfg, qpm::RunManifest& manifest) {
    qpm::Pipeline pl(cfg);
    qpm::DomainSequence seq = load_or_fail_sequence(cfg);
    auto res = qpm::pair_rate(seq, pl.rate_params(), pl.model());
    json j;
    j["rate_per_s_per_mW"] = res.rate_per_s_per_mw;
    j["band_nm"] = {res.band_lo_nm, res.band_hi_nm};
    j["quadrature_points"] = res.quadrature_points;
    j["converged"] = res.converged;
    fs::path p = fs::path(cfg.output_dir) / "rate.json";
    qpm::write_text_file(p, j.dump(2) + "\n");
    manifest.add(p);
    std::printf("rate %.4f /s/mW\n", res.rate_per_s_per_mw);
}

void cmd_tolerance(const qpm::RunConfig& cfg, qpm::RunManifest& manifest) {
    qpm::Pipeline pl(cfg);
    qpm::DomainSequence seq = load_or_fail_sequence(cfg);
    auto reports = qpm::schmidt_statistics(
        [&](const qpm::DomainSequence& s) { return pl.schmidt_of(s); }, seq,
        cfg.resolutions_nm, cfg.repetitions, cfg.seed);
    std::ostringstream csv;
    csv << "R_nm,rep,K\n";
    json summary = json::array();
    for (const auto& r : reports) {
        for (int i = 0; i < r.repetitions; ++i)
            csv << qpm::format_double(r.resolution_nm) << "," << i << ","
                << qpm::format_double(r.k_values[static_cast<std::size_t>(i)]) << "\n";
        summary.push_back({{"R_nm", r.resolution_nm}, {"repetitions", r.repetitions},
                           {"K_mean", r.k_mean}, {"K_sd", r.k_sd}, {"seed", r.base_seed}});
        std::printf("R=%6.1f nm  K_mean=%.4f  SD=%.4f\n", r.resolution_nm, r.k_mean, r.k_sd);
    }
    fs::path pcsv = fs::path(cfg.output_dir) / "tolerance.csv";
    qpm::write_text_file(pcsv, csv.str());
    manifest.add(pcsv);
    fs::path pjson = fs::path(cfg.output_dir) / "tolerance_summary.json";
    qpm::write_text_file(pjson, summary.dump(2) + "\n");
    manifest.add(pjson);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Quasi-phase-matching crystal design and biphoton analysis toolkit"};
    app.require_subcommand(1);

    CliOptions opt;
    app.add_option("--config", opt.config_path, "JSON run configuration");
    app.add_option("--out", opt.out_dir, "output directory (overrides config)");
    std::uint64_t seed_val = 0;
    auto* seed_opt = app.add_option("--seed", seed_val, "tolerance RNG seed override");
    int grid_val = 0;
    auto* grid_opt = app.add_option("--grid-size", grid_val, "analysis grid size override");
    double span_val = 0.0;
    auto* span_opt = app.add_option("--span-nm", span_val, "analysis grid span override");

    auto* c_gvm = app.add_subcommand("gvm", "solve the group-velocity-matched wavelength");
    auto* c_period = app.add_subcommand("period", "solve the first-order poling period");
    auto* c_design = app.add_subcommand("design", "synthesize the domain sequence");
    auto* c_pmf = app.add_subcommand("pmf", "reconstruct the PMF of the designed sequence");
    auto* c_jsa = app.add_subcommand("jsa", "assemble the joint spectral amplitude");
    auto* c_jta = app.add_subcommand("jta", "joint temporal amplitude via 2-D transform");
    auto* c_hom = app.add_subcommand("hom", "Hong-Ou-Mandel coincidence trace");
    auto* c_schmidt = app.add_subcommand("schmidt", "Schmidt spectrum and mode number");
    auto* c_rate = app.add_subcommand("rate", "absolute pair-generation rate");
    auto* c_tol = app.add_subcommand("tolerance", "fabrication-resolution Monte Carlo");
    auto* c_all = app.add_subcommand("all", "full chain: design through tolerance");

    CLI11_PARSE(app, argc, argv);

    try {
        if (seed_opt->count()) opt.seed = seed_val;
        if (grid_opt->count()) opt.grid_size = grid_val;
        if (span_opt->count()) opt.span_nm = span_val;
        qpm::RunConfig cfg = load_config(opt);

        if (c_gvm->parsed()) {
            cmd_gvm(cfg);
            return 0;
        }
        if (c_period->parsed()) {
            cmd_period(cfg);
            return 0;
        }

        qpm::OutputLock lock(cfg.output_dir);
        qpm::RunManifest manifest(cfg, cfg.output_dir);
        {
            fs::path pcfg = fs::path(cfg.output_dir) / "config.json";
            qpm::write_text_file(pcfg, qpm::config_to_json(cfg).dump(2) + "\n");
            manifest.add(pcfg);
        }

        if (c_design->parsed()) cmd_design(cfg, manifest);
        else if (c_pmf->parsed()) cmd_pmf(cfg, manifest);
        else if (c_jsa->parsed()) cmd_jsa(cfg, manifest);
        else if (c_jta->parsed()) cmd_jta(cfg, manifest);
        else if (c_hom->parsed()) cmd_hom(cfg, manifest);
        else if (c_schmidt->parsed()) cmd_schmidt(cfg, manifest);
        else if (c_rate->parsed()) cmd_rate(cfg, manifest);
        else if (c_tol->parsed()) cmd_tolerance(cfg, manifest);
        else if (c_all->parsed()) {
            cmd_design(cfg, manifest);
            cmd_pmf(cfg, manifest);
            cmd_jsa(cfg, manifest);
            cmd_jta(cfg, manifest);
            cmd_hom(cfg, manifest);
            cmd_schmidt(cfg, manifest);
            cmd_rate(cfg, manifest);
            cmd_tolerance(cfg, manifest);
        }
        manifest.write();
        return 0;
    } catch (const std::exception& ex) {
        std::string msg = ex.what();
        for (auto& ch : msg)
            if (ch == '\n') ch = ' ';
        std::cerr << "error: " << msg << "\n";
        return 1;
    }
}
