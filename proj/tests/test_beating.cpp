#include "oracles.hpp"

#include <exciton2des/beating.hpp>

#include <gtest/gtest.h>

using namespace exciton2des;

namespace {

struct Dimer {
    ExcitonBasis basis;
    BathSpec bath;
    ModalResponse reph, nonreph;

    Dimer(const DimerParams& p, double xi, bool secular = false) : basis(exciton_basis(p)) {
        bath.xi = xi;
        bath.shift = basis.splitting();
        const Propagator prop(build_generator(basis, bath, secular));
        reph = total_response(prop, basis, DipoleConfig{}, true);
        nonreph = total_response(prop, basis, DipoleConfig{}, false);
    }
};

}  // namespace

TEST(Beating, T2KernelMatchesQuadrature) {
    const cplx p2(-41.0 * units::kappa, 280.0 * units::kappa);
    for (double w2 : {-300.0, 0.0, 250.0, 280.0}) {
        auto f = [&](double t) { return std::exp(p2 * t - I * units::kappa * w2 * t); };
        const cplx full = oracle::trapezoid(f, 3000.0, 300000);
        EXPECT_LT(std::abs(t2_kernel(p2, w2) - full), 1e-4 * std::abs(full));
        const cplx win = oracle::trapezoid(f, 150.0, 150000);
        EXPECT_LT(std::abs(t2_kernel(p2, w2, 150.0) - win), 1e-6 * std::abs(win));
    }
}

TEST(Beating, T2KernelSmallArgumentSeries) {
    // a static pole at w2 = 0 over a window T integrates to T
    EXPECT_NEAR(std::abs(t2_kernel(cplx(0.0), 0.0, 500.0) - 500.0), 0.0, 1e-9);
    const cplx tiny(-1e-12, 2e-12);
    const cplx ref = 100.0 * (1.0 + 50.0 * tiny);  // T (1 + x/2), x = 100 tiny
    EXPECT_LT(std::abs(t2_kernel(tiny, 0.0, 100.0) - ref), 1e-9);
}

TEST(Beating, OscillatoryFilter) {
    const Dimer d(heterodimer(), 1e-3);
    std::vector<std::string> warnings;
    const auto osc = oscillatory_component(d.reph, units::kappa, &warnings);
    EXPECT_TRUE(warnings.empty());
    EXPECT_LT(osc.terms.size(), d.reph.terms.size());
    for (const auto& t : osc.terms) EXPECT_GE(std::abs(t.p2.imag()), units::kappa);
    oscillatory_component(d.reph, 275.0 * units::kappa, &warnings);
    EXPECT_FALSE(warnings.empty());
}

TEST(Beating, MapMatchesPointwiseAmplitude) {
    const Dimer d(homodimer(), 1e-3);
    const auto osc = oscillatory_component(d.reph);
    const Axis w2 = Axis::linspace("w2", "cm-1", -300.0, 300.0, 50.0);
    const Axis w1 = Axis::linspace("w1", "cm-1", 12300.0, 12700.0, 100.0);
    const auto m = beating_map(osc, w2, w1, w1, d.basis.splitting(), false, 2);
    for (std::size_t q = 0; q < w2.size(); ++q)
        for (std::size_t i = 0; i < w1.size(); ++i)
            for (std::size_t j = 0; j < w1.size(); ++j) {
                const double ref = std::abs(beating_amplitude(osc, w1.values[i], w2.values[q], w1.values[j]));
                EXPECT_NEAR(m(q, i, j), ref, 1e-12 * (1.0 + ref));
            }
    const auto n = beating_map(osc, w2, w1, w1, d.basis.splitting(), true, 1);
    EXPECT_TRUE(n.normalized);
    EXPECT_NEAR(n.norm_max, *std::max_element(m.grid.data.begin(), m.grid.data.end()), 1e-12 * n.norm_max);
    EXPECT_NEAR(*std::max_element(n.grid.data.begin(), n.grid.data.end()), 1.0, 1e-15);
    const auto slice = beating_slice(osc, w2.values[2], w1, w1);
    for (std::size_t i = 0; i < w1.size(); ++i)
        for (std::size_t j = 0; j < w1.size(); ++j) EXPECT_NEAR(slice(i, j), m(2, i, j), 1e-12 * (1.0 + m(2, i, j)));
}

TEST(Beating, MapMatchesSampledTransform) {
    const Dimer d(heterodimer(), 1.0);
    const auto osc = oscillatory_component(d.reph);
    const Axis t2 = Axis::linspace("t2", "fs", 0.0, 1500.0, 1.0);
    const Axis w1 = Axis::list("w1", "cm-1", {d.basis.eps1, d.basis.eps2});
    const Axis w2 = Axis::linspace("w2", "cm-1", -450.0, 450.0, 50.0);
    const auto samples = spectra_2d(osc, t2, w1, w1);
    const auto sampled = beating_map_from_samples(samples, w2);
    const auto exact = beating_map(osc, w2, w1, w1, d.basis.splitting(), false, 1, 1500.0);
    double top = 0.0, diff = 0.0;
    for (std::size_t i = 0; i < exact.grid.data.size(); ++i) {
        top = std::max(top, exact.grid.data[i]);
        diff = std::max(diff, std::abs(exact.grid.data[i] - sampled.data[i]));
    }
    EXPECT_LT(diff, 1e-3 * top);
}

TEST(Beating, CoverageEnforced) {
    const Dimer d(heterodimer(), 1e-3);
    const Axis narrow = Axis::linspace("w2", "cm-1", -300.0, 300.0, 10.0);
    const Axis w = Axis::list("w1", "cm-1", {12400.0});
    EXPECT_THROW(beating_map(oscillatory_component(d.reph), narrow, w, w, d.basis.splitting()), std::domain_error);
}

TEST(Beating, RephasingBeatsPositiveNonRephasingNegative) {
    // R21 lives at w2 = +splitting, N-diagonal peaks at both signs
    const Dimer d(heterodimer(), 1e-3);
    const auto r = oscillatory_component(d.reph), n = oscillatory_component(d.nonreph);
    const double s = d.basis.splitting();
    const Peak r21 = Peak::parse("R21");
    EXPECT_GT(peak_amplitude(r, d.basis, r21, s), 10.0 * peak_amplitude(r, d.basis, r21, -s));
    const Peak r12 = Peak::parse("R12");
    EXPECT_GT(peak_amplitude(r, d.basis, r12, -s), 10.0 * peak_amplitude(r, d.basis, r12, s));
    EXPECT_EQ(Peak::parse("N22").name(), "N22");
    EXPECT_THROW(Peak::parse("X11"), std::invalid_argument);
    EXPECT_GT(resolved_peak_amplitude(n, d.basis, Peak::parse("N11"), -s), 0.0);
}

TEST(Beating, SecularSelectionRule) {
    const Dimer sec(heterodimer(), 1e-3, true), full(heterodimer(), 1e-3);
    const double s = sec.basis.splitting();
    const auto rs = oscillatory_component(sec.reph), ns = oscillatory_component(sec.nonreph);
    const double top = resolved_peak_amplitude(rs, sec.basis, Peak::parse("R21"), s);
    EXPECT_LT(resolved_peak_amplitude(rs, sec.basis, Peak::parse("R11"), s), 1e-6 * top);
    EXPECT_LT(resolved_peak_amplitude(ns, sec.basis, Peak::parse("N12"), -s), 1e-6 * top);
    const auto rf = oscillatory_component(full.reph);
    EXPECT_GT(resolved_peak_amplitude(rf, full.basis, Peak::parse("R11"), s),
              0.1 * resolved_peak_amplitude(rf, full.basis, Peak::parse("R21"), s));
}

TEST(Beating, PeakTraceFromMapInterpolates) {
    const Dimer d(homodimer(), 1e-3);
    const auto osc = oscillatory_component(d.reph);
    const Axis w2 = Axis::linspace("w2", "cm-1", -300.0, 300.0, 20.0);
    const Axis w1 = Axis::linspace("w1", "cm-1", 12390.0, 12610.0, 1.0);
    const auto m = beating_map(osc, w2, w1, w1, d.basis.splitting(), false);
    const Peak p = Peak::parse("R21");
    const auto from_map = peak_trace(m, d.basis, p);
    const auto direct = peak_trace(osc, d.basis, p, w2);
    for (std::size_t q = 0; q < w2.size(); ++q) EXPECT_NEAR(from_map[q], direct[q], 1e-9 * (1.0 + direct[q]));
}

TEST(Beating, OverlapPointsAreEquallySpaced) {
    const Dimer d(homodimer(), 1e-3);
    const auto osc = oscillatory_component(d.reph);
    const double w2 = 193.0;
    const auto o = overlap_diagnostic(osc, d.basis, w2);
    const double far = 2.0 * d.basis.eps2 - d.basis.eps1;
    EXPECT_DOUBLE_EQ(o.a, std::abs(beating_amplitude(osc, far, w2, d.basis.eps1)));
    EXPECT_DOUBLE_EQ(o.b, std::abs(beating_amplitude(osc, d.basis.eps1, w2, far)));
    EXPECT_GT(o.ratio(), 2.0);
}

TEST(Beating, FwhmOfLorentzianMagnitude) {
    // |1/(x + i g)| falls to half at x = +-sqrt(3) g
    const double g = 7.0;
    const double w = fwhm([&](double x) { return 1.0 / std::abs(cplx(x, g)); }, 0.01);
    EXPECT_NEAR(w, 2.0 * std::sqrt(3.0) * g, 1e-3);
    const auto lw = line_widths([&](double a, double b) { return 1.0 / std::abs(cplx(a - 5.0, g)) / std::abs(cplx(b + 2.0, 2 * g)); },
                                5.0, -2.0, 0.01);
    EXPECT_NEAR(lw.w1, 2.0 * std::sqrt(3.0) * g, 1e-3);
    EXPECT_NEAR(lw.w3, 4.0 * std::sqrt(3.0) * g, 1e-3);
    EXPECT_NEAR(lw.asymmetry(), 0.5, 1e-4);
    EXPECT_TRUE(std::isnan(fwhm([](double) { return 1.0; }, 1.0, 10.0)));
}

TEST(Beating, DisplayScale) {
    const auto v = display_scale({0.0, 1e-10, 0.5, 1.0, -0.1}, 0.1);
    EXPECT_EQ(v[0], 0.0);
    EXPECT_NEAR(v[1], 0.1, 1e-12);
    EXPECT_NEAR(v[2], std::pow(0.5, 0.1), 1e-15);
    EXPECT_EQ(v[3], 1.0);
    EXPECT_EQ(v[4], 0.0);
}
