#include "oracles.hpp"

#include <exciton2des/disorder.hpp>

#include <gtest/gtest.h>

using namespace exciton2des;

namespace {

BathSpec bath_for(const DimerParams& p, double xi) {
    BathSpec b;
    b.xi = xi;
    b.shift = exciton_basis(p).splitting();
    return b;
}

}  // namespace

TEST(Disorder, SigmaFromFwhm) {
    DisorderSpec s;
    s.fwhm = 100.0;
    EXPECT_NEAR(s.sigma(), 100.0 / 2.354820045, 1e-6);
    s.fwhm = -1.0;
    EXPECT_THROW(s.validate(), std::invalid_argument);
    EXPECT_EQ(parse_sampling("gh"), Sampling::gauss_hermite);
    EXPECT_EQ(parse_sampling("monte-carlo"), Sampling::monte_carlo);
    EXPECT_THROW(parse_sampling("latin"), std::invalid_argument);
}

TEST(Disorder, GaussHermiteMoments) {
    // E[x^2k] = (2k-1)!! for a unit normal, with x = sqrt(2) node
    const auto [x, w] = gauss_hermite(9);
    const double moments[] = {1.0, 1.0, 3.0, 15.0, 105.0, 945.0};
    for (int k = 0; k < 6; ++k) {
        double acc = 0.0, odd = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            const double z = std::sqrt(2.0) * x[i];
            acc += w[i] * std::pow(z, 2 * k);
            odd += w[i] * std::pow(z, 2 * k + 1);
        }
        EXPECT_NEAR(acc, moments[k], 1e-10 * moments[k]);
        EXPECT_NEAR(odd, 0.0, 1e-10 * moments[k]);
    }
}

TEST(Disorder, MonteCarloIsSeededAndUnbiased) {
    DisorderSpec s;
    s.fwhm = 80.0;
    s.samples = 20000;
    const auto a = sample_realizations(s, heterodimer());
    const auto b = sample_realizations(s, heterodimer());
    ASSERT_EQ(a.size(), 20000u);
    for (std::size_t i = 0; i < a.size(); i += 997) EXPECT_EQ(a[i].params.omega1, b[i].params.omega1);
    double m1 = 0, m2 = 0, v1 = 0, c12 = 0, wsum = 0;
    for (const auto& r : a) {
        m1 += r.params.omega1 / a.size();
        m2 += r.params.omega2 / a.size();
        wsum += r.weight;
    }
    for (const auto& r : a) {
        v1 += std::pow(r.params.omega1 - m1, 2) / a.size();
        c12 += (r.params.omega1 - m1) * (r.params.omega2 - m2) / a.size();
    }
    EXPECT_NEAR(wsum, 1.0, 1e-12);
    EXPECT_NEAR(m1, 12600.0, 4.0 * s.sigma() / std::sqrt(20000.0));
    EXPECT_NEAR(m2, 12400.0, 4.0 * s.sigma() / std::sqrt(20000.0));
    EXPECT_NEAR(std::sqrt(v1), s.sigma(), 0.02 * s.sigma());
    EXPECT_NEAR(c12 / v1, 0.0, 0.03);
    s.seed = 7;
    EXPECT_NE(sample_realizations(s, heterodimer())[0].params.omega1, a[0].params.omega1);
}

TEST(Disorder, ZeroWidthCollapsesToMean) {
    DisorderSpec s;
    s.samples = 3;
    for (const auto& r : sample_realizations(s, homodimer())) {
        EXPECT_EQ(r.params.omega1, 12500.0);
        EXPECT_EQ(r.params.omega2, 12500.0);
    }
}

TEST(Disorder, GridAverage) {
    const Axis a = Axis::list("w", "cm-1", {1.0, 2.0});
    Grid<cplx> g1({a}), g2({a});
    g1.data = {cplx(1, 0), cplx(0, 2)};
    g2.data = {cplx(3, 0), cplx(0, 4)};
    const auto m = ensemble_average(std::vector{g1, g2}, {0.25, 0.75});
    EXPECT_EQ(m.data[0], cplx(2.5, 0));
    EXPECT_EQ(m.data[1], cplx(0, 3.5));
    Grid<cplx> bad({Axis::list("w", "cm-1", {1.0})});
    EXPECT_THROW(ensemble_average(std::vector{g1, bad}, {0.5, 0.5}), std::invalid_argument);
    EXPECT_THROW(ensemble_average(std::vector{g1}, {0.5, 0.5}), std::invalid_argument);
}

TEST(Disorder, CoherentAverageEqualsAveragedSpectra) {
    DisorderSpec s;
    s.fwhm = 60.0;
    s.samples = 12;
    const auto mean = heterodimer();
    const auto rs = sample_realizations(s, mean);
    const auto bath = bath_for(mean, 1.0);
    const auto avg = ensemble_response(rs, bath, DipoleConfig{}, true, false, 2);
    const double w1 = 12380.0, w3 = 12630.0, t2 = 45.0;
    cplx ref = 0.0;
    for (const auto& r : rs) {
        const auto b = exciton_basis(r.params);
        ref += r.weight * total_response(Propagator(build_generator(b, bath)), b, DipoleConfig{}, true).spectrum(w1, w3, t2);
    }
    EXPECT_LT(std::abs(avg.spectrum(w1, w3, t2) - ref), 1e-12 * std::abs(ref));
    // thread count does not change the result
    const auto one = ensemble_response(rs, bath, DipoleConfig{}, true, false, 1);
    EXPECT_EQ(one.spectrum(w1, w3, t2), avg.spectrum(w1, w3, t2));
}

TEST(Disorder, IncoherentMapBoundsCoherentMap) {
    DisorderSpec s;
    s.fwhm = 50.0;
    s.samples = 8;
    const auto mean = heterodimer();
    const auto rs = sample_realizations(s, mean);
    const auto bath = bath_for(mean, 1e-3);
    const auto per = realization_responses(rs, bath, DipoleConfig{}, true);
    const Axis w2 = Axis::linspace("w2", "cm-1", -450.0, 450.0, 150.0);
    const Axis w = Axis::linspace("w1", "cm-1", 12300.0, 12700.0, 100.0);
    const double split = exciton_basis(mean).splitting();
    const auto inc = incoherent_beating_map(per, weights_of(rs), w2, w, w, split, units::kappa, false);
    const auto coh = beating_map(oscillatory_component(ensemble_average(per, weights_of(rs))), w2, w, w, split, false);
    for (std::size_t i = 0; i < inc.grid.data.size(); ++i) EXPECT_GE(inc.grid.data[i] + 1e-12, coh.grid.data[i]);
}

TEST(Disorder, CommonShiftMovesPolesRigidly) {
    const auto p = heterodimer();
    auto q = p;
    q.omega1 += 37.0;
    q.omega2 += 37.0;
    const auto bath = bath_for(p, 1e3);
    const auto bp = exciton_basis(p), bq = exciton_basis(q);
    const auto rp = oscillatory_component(total_response(Propagator(build_generator(bp, bath)), bp, DipoleConfig{}, true));
    const auto rq = oscillatory_component(total_response(Propagator(build_generator(bq, bath)), bq, DipoleConfig{}, true));
    for (double w1 : {12350.0, 12600.0})
        for (double w3 : {12400.0, 12650.0}) {
            const cplx a = beating_amplitude(rq, w1 + 37.0, 283.0, w3 + 37.0), b = beating_amplitude(rp, w1, 283.0, w3);
            EXPECT_LT(std::abs(a - b), 1e-9 * std::abs(b));
        }
}

TEST(Disorder, CellWeightsIntegrateRationalExactly) {
    // int_0^h (n0 + (n1 - n0) t/h) / (d0 + (d1 - d0) t/h) dt by fine quadrature
    const cplx d0(0.3, -2.0), d1(-0.4, 1.5), n0(1.0, 0.5), n1(-0.2, 2.0);
    const double h = 3.0;
    const auto [wa, wb] = SliceEnsemble::cell_weights(d0, d1, h);
    const cplx ref = oracle::trapezoid(
        [&](double t) { return (n0 + (n1 - n0) * (t / h)) / (d0 + (d1 - d0) * (t / h)); }, h, 200000);
    EXPECT_LT(std::abs(wa * n0 + wb * n1 - ref), 1e-8 * std::abs(ref));
    const auto [ea, eb] = SliceEnsemble::cell_weights(d0, d0, h);
    EXPECT_LT(std::abs(ea - h / (2.0 * d0)), 1e-15);
    EXPECT_LT(std::abs(eb - h / (2.0 * d0)), 1e-15);
}

TEST(Disorder, SliceQuadratureMatchesBruteForceGrid) {
    // Reference: plain tensor grid over (Omega_1, Omega_2) at 1 cm^-1 spacing with
    // Gaussian weights. The low exciton line is only ~5 cm^-1 wide, which a
    // Gauss-Hermite rule of practical size does not resolve.
    const auto mean = heterodimer();
    const auto b = exciton_basis(mean);
    const auto bath = bath_for(mean, 1e-3);
    DisorderSpec s;
    s.fwhm = 30.0;
    const double sig = s.sigma();
    std::vector<Realization> grid;
    double wsum = 0.0;
    for (double x = -4.5 * sig; x <= 4.5 * sig; x += 1.0)
        for (double y = -4.5 * sig; y <= 4.5 * sig; y += 1.0) {
            DimerParams p = mean;
            p.omega1 += x;
            p.omega2 += y;
            grid.push_back({p, std::exp(-0.5 * (x * x + y * y) / (sig * sig))});
            wsum += grid.back().weight;
        }
    for (auto& r : grid) r.weight /= wsum;
    const auto ref_resp = oscillatory_component(ensemble_response(grid, bath, DipoleConfig{}, true));
    const auto sl = slice_ensemble(s, mean, bath, DipoleConfig{}, true);
    const double w2 = b.splitting();
    const auto slice = sl.at(w2);
    double top = 0.0;
    for (double x : {-40.0, 0.0, 30.0})
        for (double y : {-20.0, 0.0, 15.0}) top = std::max(top, std::abs(beating_amplitude(ref_resp, b.eps2 + x, w2, b.eps1 + y)));
    for (double x : {-40.0, 0.0, 30.0})
        for (double y : {-20.0, 0.0, 15.0}) {
            const cplx ref = beating_amplitude(ref_resp, b.eps2 + x, w2, b.eps1 + y);
            EXPECT_LT(std::abs(slice(b.eps2 + x, b.eps1 + y) - ref), 0.01 * top) << x << ", " << y;
        }
}

TEST(Disorder, SliceWithoutDisorderIsTheCleanResponse) {
    const auto mean = homodimer();
    const auto b = exciton_basis(mean);
    const auto bath = bath_for(mean, 1e-3);
    const auto sl = slice_ensemble(DisorderSpec{}, mean, bath, DipoleConfig{}, true, false, units::kappa, 1e-4);
    const auto osc = oscillatory_component(total_response(Propagator(build_generator(b, bath)), b, DipoleConfig{}, true));
    const cplx a = sl.beating(b.eps2, 193.0, b.eps1), ref = beating_amplitude(osc, b.eps2, 193.0, b.eps1);
    EXPECT_LT(std::abs(a - ref), 1e-6 * std::abs(ref));
    const auto r21 = sl.peak(b, 2, 1);
    EXPECT_LT(r21.tracks.size(), sl.tracks.size());
}
