#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <vector>

#include "qpm/targets.hpp"

using namespace qpm;

namespace {

const double kL = 3.0e7;                 // 30 mm
const double kK0 = two_pi / 14998.9;     // reference carrier
const double kSigma = kL / 6.0;

TargetSpec hg2() { return TargetSpec::hermite_gauss(kK0, kL); }
TargetSpec comb5() { return TargetSpec::comb(kK0, kL); }

// (1/2pi) integral phi(k) exp(ikz) dk by trapezoid over [k0-W, k0+W]
cplx numeric_ift(const TargetSpec& spec, double z, double halfwidth, int n = 16384) {
    const double lo = spec.carrier_k - halfwidth, hi = spec.carrier_k + halfwidth;
    const double h = (hi - lo) / n;
    cplx acc(0.0, 0.0);
    for (int i = 0; i <= n; ++i) {
        double k = lo + i * h;
        double w = (i == 0 || i == n) ? 0.5 : 1.0;
        acc += w * target_pmf_value(spec, k) * std::polar(1.0, k * z);
    }
    return acc * h / two_pi;
}

} // namespace

TEST_CASE("H-G order-2 target values") {
    auto spec = hg2();
    CHECK(target_pmf_value(spec, kK0) == Catch::Approx(-1.0 / std::sqrt(2.0)).epsilon(1e-12));
    // zeros of -2 + 4 x^2 at x = +-1/sqrt(2)
    for (double s : {-1.0, 1.0}) {
        double k_zero = kK0 + s / (std::sqrt(2.0) * kSigma);
        CHECK(std::abs(target_pmf_value(spec, k_zero)) < 1e-12);
    }
    // even symmetry on a delta grid
    for (int i = 1; i <= 20; ++i) {
        double d = i * 0.3 / kSigma;
        CHECK(target_pmf_value(spec, kK0 + d)
              == Catch::Approx(target_pmf_value(spec, kK0 - d)).margin(1e-15));
    }
}

TEST_CASE("H-G orders share the order-2 peak normalization") {
    for (int order : {0, 1, 3, 4}) {
        auto spec = TargetSpec::hermite_gauss(kK0, kL, order);
        double peak = 0.0, peak2 = 0.0;
        for (int i = 0; i <= 20000; ++i) {
            double k = kK0 + (i - 10000) * 6.0 / (10000.0 * kSigma);
            peak = std::max(peak, std::abs(target_pmf_value(spec, k)));
            peak2 = std::max(peak2, std::abs(target_pmf_value(hg2(), k)));
        }
        CHECK(peak == Catch::Approx(peak2).epsilon(1e-6));
    }
}

TEST_CASE("H-G spatial transform closed form") {
    auto spec = hg2();
    // |envelope(0)| = 1/(2 sqrt(pi) sigma)
    CHECK(std::abs(target_spatial(spec, 0.0))
          == Catch::Approx(1.0 / (2.0 * std::sqrt(pi) * kSigma)).epsilon(1e-12));
    // envelope zeros at z = +- sigma/sqrt(2)
    for (double s : {-1.0, 1.0})
        CHECK(std::abs(target_spatial(spec, s * kSigma / std::sqrt(2.0))) < 1e-18);
    // carrier present: phase advances as exp(i k0 z)
    double z = 1.2345e6;
    cplx ratio = target_spatial(spec, z) / target_envelope(spec, z);
    CHECK(std::arg(ratio * std::polar(1.0, -kK0 * z)) == Catch::Approx(0.0).margin(1e-9));
}

TEST_CASE("numeric IFT of the sampled H-G PMF matches the closed form") {
    auto spec = hg2();
    double peak = std::abs(target_spatial(spec, 0.0));
    for (double z : {0.0, 0.3 * kSigma, 0.9 * kSigma, 2.0 * kSigma, -1.4 * kSigma}) {
        cplx numeric = numeric_ift(spec, z, 12.0 / kSigma);
        cplx analytic = target_spatial(spec, z);
        CHECK(std::abs(numeric - analytic) / peak < 1e-6);
    }
}

TEST_CASE("comb target structure") {
    auto spec = comb5();
    const double st = spec.spacing(), xi = spec.xi();
    // dense scan: exactly 2N local maxima above 1% of peak
    const int n = 40000;
    std::vector<double> vals(n + 1);
    double lo = kK0 - 6.0 * st, hi = kK0 + 6.0 * st;
    for (int i = 0; i <= n; ++i)
        vals[static_cast<std::size_t>(i)] =
            target_pmf_value(spec, lo + (hi - lo) * i / n);
    double peak = 0.0;
    for (double v : vals) peak = std::max(peak, v);
    int maxima = 0;
    for (int i = 1; i < n; ++i)
        if (vals[i] > 0.01 * peak && vals[i] >= vals[i - 1] && vals[i] > vals[i + 1]) {
            ++maxima;
            // peak location should be near k0 +- (m + 1/2) st
            double k = lo + (hi - lo) * i / n;
            double folded = std::abs(k - kK0) / st;
            CHECK(std::abs(folded - (std::floor(folded) + 0.5)) < 0.05);
        }
    CHECK(maxima == 10);
    // carrier sits in a local minimum (no tooth at k0)
    double at_k0 = target_pmf_value(spec, kK0);
    CHECK(at_k0 < target_pmf_value(spec, kK0 + 0.4 * st));
    CHECK(at_k0 < target_pmf_value(spec, kK0 - 0.4 * st));
    (void)xi;
}

TEST_CASE("comb spatial transform") {
    auto spec = comb5();
    const double xi = spec.xi();
    // at z = 0 all cosines are 1: envelope value (2/xi) * N
    CHECK(std::abs(target_spatial(spec, 0.0))
          == Catch::Approx(2.0 / xi * 5.0).epsilon(1e-12));

    // shape matches the numeric IFT up to the documented constant
    // (the verbatim 2/xi prefactor differs from the distributional IFT by
    // sqrt(2 pi)); compare peak-normalized profiles
    double peak_a = std::abs(target_spatial(spec, 0.0));
    cplx n0 = numeric_ift(spec, 0.0, 8.0 * spec.spacing());
    for (double z : {0.11 * xi, 0.45 * xi, 0.9 * xi, 1.7 * xi}) {
        cplx numeric = numeric_ift(spec, z, 8.0 * spec.spacing());
        double na = std::abs(target_spatial(spec, z)) / peak_a;
        double nn = std::abs(numeric) / std::abs(n0);
        CHECK(na == Catch::Approx(nn).margin(1e-6));
    }
}

TEST_CASE("comb cosine-sum beat nodes have spacing pi/(N spacing/..)") {
    auto spec = comb5();
    const double st = spec.spacing();
    // zeros of sum cos((2n+1) st z / 2) occur every pi/(2N * st/2) = pi/(5 st)
    auto cos_sum = [&](double z) {
        double s = 0.0;
        for (int n = 0; n < 5; ++n) s += std::cos((2 * n + 1) * st * z / 2.0);
        return s;
    };
    const double z_max = 40.0 * pi / (5.0 * st);
    const int n = 200000;
    int crossings = 0;
    double prev = cos_sum(0.0);
    for (int i = 1; i <= n; ++i) {
        double cur = cos_sum(z_max * i / n);
        if ((cur > 0) != (prev > 0)) ++crossings;
        prev = cur;
    }
    CHECK(std::abs(crossings - 40) <= 2);
}

TEST_CASE("amplitude target: zero start, even-integrand symmetry, quadrature oracle") {
    for (auto spec : {hg2(), comb5()}) {
        const double step = kL / 4000.0;
        TargetAmplitude amp(spec, step, 4000);
        CHECK(std::abs(amp(0.0)) == 0.0);
        CHECK(std::abs(amp.at_boundary(0)) == 0.0);

        cplx mid = amp(kL / 2.0);
        for (double frac : {0.1, 0.25, 0.4}) {
            double d = frac * kL;
            cplx sym = amp(kL / 2.0 + d) + amp(kL / 2.0 - d);
            CHECK(std::abs(sym - 2.0 * mid) / std::abs(mid) < 1e-9);
        }

        // trapezoid/Simpson oracle at 64 sample points
        const double scale = spec.scale();
        for (int i = 1; i <= 64; ++i) {
            double z = kL * i / 64.0;
            cplx direct = scale * simpson_complex(
                [&](double zz) { return target_envelope(spec, zz - kL / 2.0); },
                0.0, z, 4096);
            cplx table = amp(z);
            CHECK(std::abs(table - direct)
                  < 1e-8 * std::max(1.0, std::abs(direct)) + 1e-12 * std::abs(scale));
        }
    }
}

TEST_CASE("amplitude-target derivative reproduces the shifted envelope") {
    for (auto spec : {hg2(), comb5()}) {
        TargetAmplitude amp(spec, kL / 4000.0, 4000);
        const double h = kL / 1.0e5;
        double envelope_peak = 0.0;
        for (int i = 0; i <= 200; ++i)
            envelope_peak = std::max(envelope_peak,
                std::abs(target_envelope(spec, -kL / 2 + kL * i / 200.0)));
        for (double zf : {0.21, 0.5, 0.63, 0.87}) {
            double z = zf * kL;
            cplx deriv = (amp(z + h) - amp(z - h)) / (2.0 * h);
            cplx expected = spec.scale() * target_envelope(spec, z - kL / 2.0);
            CHECK(std::abs(deriv - expected)
                  < 1e-4 * spec.scale() * envelope_peak);
        }
    }
}

TEST_CASE("closed-form order-2 amplitude (erf) agrees with the table") {
    auto spec = hg2();
    const double s = kSigma, L = kL, C = spec.scale();
    auto closed = [&](double z) {
        // C/(4 sqrt(pi) s) * (2L e^{-L^2/8s^2} + e^{-(L-2z)^2/8s^2}(4z-2L)
        //   + sqrt(2 pi) s (erf((L-2z)/(2 sqrt2 s)) - erf(L/(2 sqrt2 s))))
        double t1 = 2.0 * L * std::exp(-L * L / (8.0 * s * s));
        double t2 = std::exp(-(L - 2 * z) * (L - 2 * z) / (8.0 * s * s)) * (4.0 * z - 2.0 * L);
        double t3 = std::sqrt(2.0 * pi) * s
                    * (std::erf((L - 2 * z) / (2.0 * std::sqrt(2.0) * s))
                       - std::erf(L / (2.0 * std::sqrt(2.0) * s)));
        return C / (4.0 * std::sqrt(pi) * s) * (t1 + t2 + t3);
    };
    TargetAmplitude amp(spec, L / 4000.0, 4000);
    double scale_ref = std::abs(closed(L));
    for (int i = 0; i <= 64; ++i) {
        double z = L * i / 64.0;
        CHECK(std::abs(amp(z) - closed(z)) < 1e-8 * scale_ref);
    }
}

TEST_CASE("PMF -> spatial -> PMF round trip") {
    auto spec = hg2();
    // forward transform of the analytic spatial envelope recovers the PMF
    const double zmax = 8.0 * kSigma;
    const int n = 16384;
    auto reconstruct = [&](double k) {
        const double h = 2.0 * zmax / n;
        cplx acc(0.0, 0.0);
        for (int i = 0; i <= n; ++i) {
            double z = -zmax + i * h;
            double w = (i == 0 || i == n) ? 0.5 : 1.0;
            acc += w * target_spatial(spec, z) * std::polar(1.0, -k * z);
        }
        return acc * h;
    };
    for (double dk : {0.0, 0.2, -0.4, 0.7, -1.1}) {
        double k = kK0 + dk / kSigma;
        double expected = target_pmf_value(spec, k);
        cplx got = reconstruct(k);
        CHECK(std::abs(got - expected) < 1e-6);
    }
}

TEST_CASE("H-G order-2 norm integral matches the analytic moment") {
    auto spec = hg2();
    // integral |phi|^2 dk = sqrt(pi)/sigma for the 1/(2 sqrt 2) convention
    double expected = std::sqrt(pi) / kSigma;
    double acc = 0.0;
    const int n = 200000;
    double lo = kK0 - 10.0 / kSigma, hi = kK0 + 10.0 / kSigma;
    double h = (hi - lo) / n;
    for (int i = 0; i <= n; ++i) {
        double v = target_pmf_value(spec, lo + i * h);
        acc += ((i == 0 || i == n) ? 0.5 : 1.0) * v * v;
    }
    CHECK(acc * h == Catch::Approx(expected).epsilon(1e-6));
}

TEST_CASE("amplitude target range errors") {
    TargetAmplitude amp(hg2(), kL / 4000.0, 4000);
    CHECK_THROWS_AS(amp(-1.0), std::out_of_range);
    CHECK_THROWS_AS(amp(kL * 1.5), std::out_of_range);
}

TEST_CASE("tabulated target pass-through") {
    auto comb = comb5();
    std::vector<double> ks, amps;
    for (int i = 0; i <= 2000; ++i) {
        double k = kK0 - 6.0 * comb.spacing() + 12.0 * comb.spacing() * i / 2000.0;
        ks.push_back(k);
        amps.push_back(target_pmf_value(comb, k));
    }
    auto tab = TargetSpec::tabulated(kK0, kL, ks, amps);
    for (double dk : {-4.5, -1.2, 0.0, 2.5, 4.5}) {
        double k = kK0 + dk * comb.spacing();
        CHECK(target_pmf_value(tab, k)
              == Catch::Approx(target_pmf_value(comb, k)).margin(1e-4));
    }
    CHECK(tab.scale() == 1.0);
    CHECK_THROWS_AS(TargetSpec::tabulated(kK0, kL, {1.0}, {1.0}), std::invalid_argument);
}

TEST_CASE("spec validation errors") {
    CHECK_THROWS_AS(TargetSpec::hermite_gauss(0.0, kL), std::invalid_argument);
    CHECK_THROWS_AS(TargetSpec::hermite_gauss(kK0, -1.0), std::invalid_argument);
    CHECK_THROWS_AS(TargetSpec::comb(kK0, kL, 0), std::invalid_argument);
    CHECK_THROWS_AS(TargetSpec::hermite_gauss(kK0, kL, -2), std::invalid_argument);
}
