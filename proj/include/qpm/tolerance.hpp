#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <stdexcept>
#include <vector>

#include "qpm/numeric.hpp"
#include "qpm/poling.hpp"

namespace qpm {

/// Fixed fabrication offset: every domain width becomes L_c + delta,
/// signs preserved.
inline DomainSequence offset_sequence(const DomainSequence& seq, double delta_nm) {
    double w = seq.nominal_width_nm + delta_nm;
    if (!(w > 0.0))
        throw std::invalid_argument("offset_sequence: L_c + delta must be > 0");
    DomainSequence out = seq;
    for (auto& d : out.domains) d.width_nm = w;
    return out;
}

/// Random fabrication resolution: width_j = L_c + gamma_j * R with
/// gamma_j ~ Uniform(-0.5, 0.5) from a seeded mt19937_64 (deterministic).
inline DomainSequence perturb_sequence(const DomainSequence& seq, double resolution_nm,
                                       std::uint64_t seed) {
    if (resolution_nm < 0.0)
        throw std::invalid_argument("perturb_sequence: R must be >= 0");
    if (!(resolution_nm < 2.0 * seq.nominal_width_nm))
        throw std::invalid_argument("perturb_sequence: R must be < 2 L_c");
    DomainSequence out = seq;
    if (resolution_nm == 0.0) return out;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> gamma(-0.5, 0.5);
    for (auto& d : out.domains)
        d.width_nm = seq.nominal_width_nm + gamma(rng) * resolution_nm;
    return out;
}

struct ToleranceReport {
    double resolution_nm = 0.0;
    int repetitions = 0;
    double k_mean = 0.0;
    double k_sd = 0.0;               // sample standard deviation
    std::vector<double> k_values;    // per run, ordered by run index
    std::uint64_t base_seed = 0;
};

/// Monte Carlo Schmidt statistics: for each resolution R, run `reps`
/// perturbed end-to-end evaluations (per-run seed = base_seed + run index)
/// and report mean and sample SD. Runs are parallel; merge order is fixed.
inline std::vector<ToleranceReport> schmidt_statistics(
    const std::function<double(const DomainSequence&)>& schmidt_of,
    const DomainSequence& design, const std::vector<double>& resolutions_nm,
    int reps, std::uint64_t base_seed) {
    if (reps < 2) throw std::invalid_argument("schmidt_statistics: reps >= 2 required");
    std::vector<ToleranceReport> reports;
    reports.reserve(resolutions_nm.size());
    for (double r : resolutions_nm) {
        ToleranceReport rep;
        rep.resolution_nm = r;
        rep.repetitions = reps;
        rep.base_seed = base_seed;
        rep.k_values.assign(static_cast<std::size_t>(reps), 0.0);
        parallel_for(static_cast<std::size_t>(reps), [&](std::size_t run) {
            DomainSequence s = perturb_sequence(design, r, base_seed + run);
            rep.k_values[run] = schmidt_of(s);
        });
        double mean = 0.0;
        for (double k : rep.k_values) mean += k;
        mean /= reps;
        double var = 0.0;
        for (double k : rep.k_values) var += (k - mean) * (k - mean);
        var /= (reps - 1);
        rep.k_mean = mean;
        rep.k_sd = std::sqrt(var);
        reports.push_back(std::move(rep));
    }
    return reports;
}

} // namespace qpm
