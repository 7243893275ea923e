// model.hpp — electronic dimer Hamiltonian and exciton eigensystem
#pragma once

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <stdexcept>
#include <utility>

namespace exciton2des {

// Site energies and coupling in cm^-1. Basis order is
// {|g1 g2>, |e1 g2>, |g1 e2>, |e1 e2>}.
struct DimerParams {
    double omega1 = 12500.0;
    double omega2 = 12500.0;
    double coupling = 100.0;
    double distance = 1.0;
    double dipole = 1.0;
    // true when the constructor swapped the sites to keep omega1 >= omega2
    bool relabeled = false;
};

// Builds params with the omega1 >= omega2 convention. Swapping the sites is
// harmless for equal, orthogonal dipoles and a site-symmetric bath.
inline DimerParams make_dimer(double omega1, double omega2, double coupling,
                              double distance = 1.0, double dipole = 1.0) {
    DimerParams p{omega1, omega2, coupling, distance, dipole, false};
    if (p.omega1 < p.omega2) {
        std::swap(p.omega1, p.omega2);
        p.relabeled = true;
    }
    return p;
}

inline DimerParams homodimer() { return make_dimer(12500.0, 12500.0, 100.0); }
inline DimerParams heterodimer() { return make_dimer(12600.0, 12400.0, 100.0); }

struct ExcitonBasis {
    double theta = 0.0;
    double eps_g = 0.0;
    double eps1 = 0.0;
    double eps2 = 0.0;
    double eps_f = 0.0;
    // columns: |g>, |eps1>, |eps2>, |f> expressed in the site basis
    Eigen::Matrix4d vectors = Eigen::Matrix4d::Identity();

    double splitting() const { return eps2 - eps1; }
    std::array<double, 4> energies() const { return {eps_g, eps1, eps2, eps_f}; }
    double single(int k) const { return k == 1 ? eps1 : eps2; }
};

inline Eigen::Matrix4d hamiltonian_matrix(const DimerParams& p) {
    Eigen::Matrix4d h = Eigen::Matrix4d::Zero();
    h(1, 1) = p.omega1;
    h(2, 2) = p.omega2;
    h(1, 2) = h(2, 1) = p.coupling;
    h(3, 3) = p.omega1 + p.omega2;
    return h;
}

inline ExcitonBasis exciton_basis(const DimerParams& p) {
    if (!std::isfinite(p.omega1) || !std::isfinite(p.omega2) || !std::isfinite(p.coupling))
        throw std::invalid_argument("exciton_basis: non-finite dimer parameters");
    ExcitonBasis b;
    const double delta = p.omega1 - p.omega2;
    const double root = std::hypot(delta, 2.0 * p.coupling);
    b.theta = 0.5 * std::atan2(2.0 * p.coupling, delta);
    b.eps1 = 0.5 * (p.omega1 + p.omega2 - root);
    b.eps2 = 0.5 * (p.omega1 + p.omega2 + root);
    b.eps_f = b.eps1 + b.eps2;

    const double s = std::sin(b.theta), c = std::cos(b.theta);
    b.vectors.setZero();
    b.vectors(0, 0) = 1.0;
    b.vectors(1, 1) = -s;
    b.vectors(2, 1) = c;
    b.vectors(1, 2) = c;
    b.vectors(2, 2) = s;
    b.vectors(3, 3) = 1.0;
    return b;
}

}  // namespace exciton2des
