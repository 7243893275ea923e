#include "oracles.hpp"

#include <exciton2des/bath.hpp>

#include <gtest/gtest.h>

using namespace exciton2des;

TEST(Bath, UnitConversions) {
    EXPECT_NEAR(units::kappa, 1.883651567e-4, 1e-12);
    EXPECT_NEAR(units::thermal_energy(77.0), 53.52, 0.01);
    BathSpec b;
    EXPECT_NEAR(b.gamma_cm(), 106.18, 0.01);
}

TEST(Bath, DetailedBalance) {
    BathSpec b;
    for (double w : {1.0, 37.5, 200.0, 283.0, 650.0}) {
        const double up = spectral_function_cm(w, b), down = spectral_function_cm(-w, b);
        EXPECT_NEAR(down / up, std::exp(-w / b.kT()), 1e-10 * std::exp(-w / b.kT()));
    }
}

TEST(Bath, MatchesDefinition) {
    BathSpec b;
    b.shift = 283.0;
    for (double w : {-500.0, -120.0, -1.0, 0.5, 90.0, 400.0})
        EXPECT_NEAR(spectral_function_cm(w, b), oracle::spectral_function_cm(w, b),
                    1e-12 * oracle::spectral_function_cm(w, b));
}

TEST(Bath, ZeroFrequencyLimitIsContinuous) {
    BathSpec b;
    b.shift = 283.0;
    const double c0 = spectral_function_cm(0.0, b);
    EXPECT_NEAR(c0, 12.44, 0.01);
    EXPECT_NEAR(oracle::spectral_function_cm(1e-6, b), c0, 1e-5 * c0);
    EXPECT_NEAR(oracle::spectral_function_cm(-1e-6, b), c0, 1e-5 * c0);
}

TEST(Bath, ReorganizationEnergyFromDensity) {
    // int_0^inf J(w)/w dw = lambda for any shift: the two Lorentzians tile the real line
    BathSpec b;
    b.shift = 283.0;
    double acc = 0.0;
    const double h = 0.05;
    for (double w = 0.5 * h; w < 2e5; w += h) acc += spectral_density(w, b) / w * h;
    EXPECT_NEAR(acc, b.lambda, 0.01 * b.lambda);
}

TEST(Bath, CrossCorrelation) {
    BathSpec b;
    b.xi = 3.0;
    const double w = 150.0;
    EXPECT_DOUBLE_EQ(cross_spectral(1, 1, w, b), spectral_function(w, b));
    EXPECT_NEAR(cross_spectral(1, 2, w, b), std::exp(-1.0 / 3.0) * spectral_function(w, b), 1e-15);
    b.xi = 1e-3;
    EXPECT_EQ(cross_spectral(2, 1, w, b), 0.0);
    b.xi = 1e3;
    EXPECT_NEAR(cross_spectral(2, 1, w, b) / spectral_function(w, b), 0.999, 1e-3);
    EXPECT_THROW(cross_spectral(0, 1, w, b), std::out_of_range);
}

TEST(Bath, Validation) {
    BathSpec b;
    b.xi = 0.0;
    EXPECT_THROW(b.validate(), std::invalid_argument);
    b = BathSpec{};
    b.gamma = -1.0;
    EXPECT_THROW(b.validate(), std::invalid_argument);
    EXPECT_THROW(spectral_density(-1.0, BathSpec{}), std::domain_error);
}
