#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "qpm/constants.hpp"
#include "qpm/numeric.hpp"

namespace qpm {

struct Domain {
    int sign = 1;          // +1 or -1
    double width_nm = 0.0;
};

/// Ordered ferroelectric domain pattern of a designed crystal.
struct DomainSequence {
    std::vector<Domain> domains;
    double nominal_width_nm = 0.0;  // L_c
    double carrier_k = 0.0;         // k0 = 2*pi/Lambda, rad/nm

    std::size_t size() const { return domains.size(); }

    double total_length_nm() const {
        double s = 0.0;
        for (const auto& d : domains) s += d.width_nm;
        return s;
    }

    /// z_0 = 0 .. z_N cumulative boundaries.
    std::vector<double> boundaries() const {
        std::vector<double> z(domains.size() + 1, 0.0);
        for (std::size_t j = 0; j < domains.size(); ++j)
            z[j + 1] = z[j] + domains[j].width_nm;
        return z;
    }

    bool uniform_widths() const {
        for (const auto& d : domains)
            if (d.width_nm != nominal_width_nm) return false;
        return true;
    }

    void validate() const {
        for (const auto& d : domains) {
            if (d.sign != 1 && d.sign != -1)
                throw std::invalid_argument("domain sign must be +1 or -1");
            if (!(d.width_nm > 0.0))
                throw std::invalid_argument("domain width must be > 0");
        }
    }
};

/// Alternating {+1, -1, ...} sequence: width Lambda/2, count floor(L/(Lambda/2)).
inline DomainSequence periodic_sequence(double length_nm, double period_nm) {
    if (!(length_nm > period_nm))
        throw std::invalid_argument("periodic_sequence: L must exceed Lambda");
    DomainSequence seq;
    seq.nominal_width_nm = period_nm / 2.0;
    seq.carrier_k = two_pi / period_nm;
    auto count = static_cast<std::size_t>(std::floor(length_nm / seq.nominal_width_nm));
    seq.domains.resize(count);
    for (std::size_t j = 0; j < count; ++j)
        seq.domains[j] = Domain{j % 2 == 0 ? 1 : -1, seq.nominal_width_nm};
    return seq;
}

/// Same discretization, all signs +1 (unpoled reference crystal).
inline DomainSequence unpoled_sequence(double length_nm, double period_nm) {
    DomainSequence seq = periodic_sequence(length_nm, period_nm);
    for (auto& d : seq.domains) d.sign = 1;
    return seq;
}

namespace detail {

inline double stable_sinc(double x) {
    return std::abs(x) < 1e-8 ? 1.0 - x * x / 6.0 : std::sin(x) / x;
}

} // namespace detail

/// Analytic integral of exp(ikz) over domain j (1-based) of width L_c:
///   sign * i * exp(i j k L_c) * (exp(-i k L_c) - 1) / k,
/// evaluated in the numerically stable product form; k -> 0 gives sign*L_c.
inline cplx domain_step_contribution(int j, int sign, double k, double width_nm) {
    if (j < 1) throw std::invalid_argument("domain_step_contribution: j >= 1 required");
    const double half = 0.5 * k * width_nm;
    return static_cast<double>(sign) * width_nm * detail::stable_sinc(half)
           * std::polar(1.0, k * (static_cast<double>(j) - 0.5) * width_nm);
}

namespace detail {

/// One tracking step in the accumulation convention of the amplitude curve
/// (no leading i): exp(i j k0 L_c) (exp(-i k0 L_c) - 1) / k0.
inline cplx tracking_step(int j, double k0, double width_nm) {
    return std::polar(1.0, k0 * static_cast<double>(j) * width_nm)
           * (std::polar(1.0, -k0 * width_nm) - cplx(1.0, 0.0)) / k0;
}

} // namespace detail

/// Greedy domain-sign synthesis: for j = 1..N, pick g[j] minimizing the
/// complex distance between the accumulated amplitude and the target at the
/// domain boundary. Ties prefer alternation (g[0] treated as -1).
inline DomainSequence track_domains(const std::function<cplx(std::size_t)>& target_at_boundary,
                                    double k0, double width_nm, std::size_t domain_count) {
    if (!(k0 > 0.0) || !(width_nm > 0.0) || domain_count == 0)
        throw std::invalid_argument("track_domains: bad parameters");
    DomainSequence seq;
    seq.nominal_width_nm = width_nm;
    seq.carrier_k = k0;
    seq.domains.resize(domain_count);
    cplx acc(0.0, 0.0);
    int prev = -1;
    for (std::size_t j = 1; j <= domain_count; ++j) {
        const cplx step = detail::tracking_step(static_cast<int>(j), k0, width_nm);
        const cplx tgt = target_at_boundary(j);
        const double err_plus = std::abs(acc + step - tgt);
        const double err_minus = std::abs(acc - step - tgt);
        int sign;
        if (err_plus < err_minus) sign = 1;
        else if (err_minus < err_plus) sign = -1;
        else sign = -prev;
        seq.domains[j - 1] = Domain{sign, width_nm};
        acc += static_cast<double>(sign) * step;
        prev = sign;
    }
    return seq;
}

/// Amplitude curve A(z_j) accumulated by a sequence (tracking convention);
/// index 0 is z = 0. Used for self-consistency oracles and diagnostics.
inline std::vector<cplx> accumulate_amplitude(const DomainSequence& seq) {
    std::vector<cplx> a(seq.size() + 1, cplx(0.0, 0.0));
    for (std::size_t j = 1; j <= seq.size(); ++j)
        a[j] = a[j - 1] + static_cast<double>(seq.domains[j - 1].sign)
               * detail::tracking_step(static_cast<int>(j), seq.carrier_k,
                                       seq.domains[j - 1].width_nm);
    return a;
}

/// Reconstructed phase-matching function on a k grid.
struct AchievedPmf {
    std::vector<double> k;     // rad/nm, strictly increasing
    std::vector<double> phi;   // modulus, sign-flipped inside the window if set
    std::optional<double> sign_window;  // Omega half-width, rad/nm
};

/// phi(k) = |sum_j g_j * integral_{z_{j-1}}^{z_j} exp(ikz) dz|, then negated
/// inside |k - k0| < Omega when a sign window is supplied (H-G designs).
/// Uniform sequences use an incremental phasor recurrence, O(M*N).
inline AchievedPmf achieved_pmf(const DomainSequence& seq, std::vector<double> k_grid,
                                std::optional<double> omega_window = std::nullopt) {
    if (seq.domains.empty()) throw std::invalid_argument("achieved_pmf: empty sequence");
    for (std::size_t i = 0; i < k_grid.size(); ++i) {
        if (k_grid[i] == 0.0)
            throw std::invalid_argument("achieved_pmf: k = 0 must be excluded from the grid");
        if (i > 0 && !(k_grid[i] > k_grid[i - 1]))
            throw std::invalid_argument("achieved_pmf: k grid must be strictly increasing");
    }
    AchievedPmf out;
    out.k = std::move(k_grid);
    out.phi.assign(out.k.size(), 0.0);
    out.sign_window = omega_window;

    const std::size_t n = seq.size();
    const bool uniform = seq.uniform_widths();
    std::vector<double> z;
    if (!uniform) z = seq.boundaries();

    parallel_for(out.k.size(), [&](std::size_t i) {
        const double k = out.k[i];
        cplx sum(0.0, 0.0);
        if (uniform) {
            const double w = seq.nominal_width_nm;
            const cplx ratio = std::polar(1.0, k * w);
            const cplx base = (ratio - cplx(1.0, 0.0)) / cplx(0.0, k);
            cplx phase(1.0, 0.0);  // exp(i k z_{j-1})
            for (std::size_t j = 0; j < n; ++j) {
                sum += static_cast<double>(seq.domains[j].sign) * phase;
                phase *= ratio;
            }
            sum *= base;
        } else {
            cplx prev(1.0, 0.0);
            for (std::size_t j = 0; j < n; ++j) {
                const cplx cur = std::polar(1.0, k * z[j + 1]);
                sum += static_cast<double>(seq.domains[j].sign) * (cur - prev);
                prev = cur;
            }
            sum /= cplx(0.0, k);
        }
        double v = std::abs(sum);
        if (omega_window && std::abs(k - seq.carrier_k) < *omega_window) v = -v;
        out.phi[i] = v;
    });
    return out;
}

/// achieved_pmf specialization for a uniform k grid. The segment sum is
/// telescoped to sign-flip boundaries, each contributing a geometric
/// progression across the k grid: O((flips + 2) * M) complex multiplies with
/// no per-point exp, which carries the Monte Carlo tolerance study.
inline AchievedPmf achieved_pmf_uniform_grid(const DomainSequence& seq, double k_lo,
                                             double dk, std::size_t count,
                                             std::optional<double> omega_window = std::nullopt) {
    if (seq.domains.empty()) throw std::invalid_argument("achieved_pmf: empty sequence");
    if (!(dk > 0.0) || count < 2) throw std::invalid_argument("achieved_pmf: bad k grid");
    if (k_lo <= 0.0 && k_lo + dk * static_cast<double>(count - 1) >= 0.0)
        throw std::invalid_argument("achieved_pmf: k = 0 must be excluded from the grid");

    // boundary weights: sum_j g_j (E_j - E_{j-1}) = sum_m c_m E_m
    const auto z = seq.boundaries();
    std::vector<std::pair<double, double>> weighted;  // (z_m, c_m)
    weighted.reserve(seq.size() + 1);
    weighted.emplace_back(z[0], -static_cast<double>(seq.domains[0].sign));
    for (std::size_t m = 1; m < seq.size(); ++m) {
        int c = seq.domains[m - 1].sign - seq.domains[m].sign;
        if (c != 0) weighted.emplace_back(z[m], static_cast<double>(c));
    }
    weighted.emplace_back(z[seq.size()], static_cast<double>(seq.domains.back().sign));

    std::vector<cplx> acc(count, cplx(0.0, 0.0));
    const unsigned workers = std::max(1u, std::min<unsigned>(worker_count(),
                                      static_cast<unsigned>(count / 512 + 1)));
    const std::size_t chunk = (count + workers - 1) / workers;
    parallel_for(workers, [&](std::size_t w) {
        const std::size_t lo = w * chunk, hi = std::min(count, lo + chunk);
        if (lo >= hi) return;
        const double k_first = k_lo + dk * static_cast<double>(lo);
        for (const auto& [zm, cm] : weighted) {
            cplx e = std::polar(cm, k_first * zm);
            const cplx step = std::polar(1.0, dk * zm);
            for (std::size_t i = lo; i < hi; ++i) {
                acc[i] += e;
                e *= step;
            }
        }
    });

    AchievedPmf out;
    out.k.resize(count);
    out.phi.resize(count);
    out.sign_window = omega_window;
    for (std::size_t i = 0; i < count; ++i) {
        const double k = k_lo + dk * static_cast<double>(i);
        out.k[i] = k;
        double v = std::abs(acc[i] / cplx(0.0, k));
        if (omega_window && std::abs(k - seq.carrier_k) < *omega_window) v = -v;
        out.phi[i] = v;
    }
    return out;
}

} // namespace qpm
