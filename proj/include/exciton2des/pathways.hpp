// pathways.hpp — closed-form X / Y superoperators and Feynman-pathway amplitudes
#pragma once

#include "beating.hpp"
#include "liouville.hpp"
#include "response.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <iomanip>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace exciton2des {

// Optical coherences {|g><eps1|, |g><eps2|}; rad/fs.
struct XSuperoperator {
    Eigen::Matrix2cd matrix;
    EigenModes modes;  // ascending Im: low-energy peak first
};

// Single-excitation block over {rho11, rho22, rho12, rho21}; rad/fs.
struct YSuperoperator {
    Eigen::Matrix4cd matrix;
    EigenModes modes;  // oscillatory first
};

namespace detail {
struct RateSet {
    double c0, cp, cm;  // C(0), C(+delta), C(-delta), rad/fs
    double u;           // 1 - exp(-d/xi)
    double s2, s4, c2sq;
};
inline RateSet rates(const ExcitonBasis& b, const BathSpec& bath) {
    bath.validate();
    const double d = b.splitting();
    return {spectral_function(0.0, bath), spectral_function(d, bath), spectral_function(-d, bath),
            -std::expm1(-bath.distance / bath.xi), std::pow(std::sin(2 * b.theta), 2), std::sin(4 * b.theta),
            std::pow(std::cos(2 * b.theta), 2)};
}
}  // namespace detail

inline XSuperoperator build_X(const ExcitonBasis& b, const BathSpec& bath, bool secular = false,
                              double cutoff = units::kappa) {
    const auto r = detail::rates(b, bath);
    const double k = units::kappa;
    Eigen::Matrix2cd x;
    x(0, 0) = -0.25 * r.c0 * (2.0 - r.u * r.s2) - 0.25 * r.cm * r.u * r.s2 + I * k * b.eps1;
    x(1, 1) = -0.25 * r.c0 * (2.0 - r.u * r.s2) - 0.25 * r.cp * r.u * r.s2 + I * k * b.eps2;
    x(0, 1) = 0.125 * (r.c0 - r.cp) * r.u * r.s4;
    x(1, 0) = -0.125 * (r.c0 - r.cm) * r.u * r.s4;
    if (secular) x(0, 1) = x(1, 0) = 0.0;
    return {x, eigendecompose(x, cutoff, ModeOrder::ascending_imag)};
}

inline YSuperoperator build_Y(const ExcitonBasis& b, const BathSpec& bath, bool secular = false,
                              double cutoff = units::kappa) {
    const auto r = detail::rates(b, bath);
    const double k = units::kappa;
    const double sum = r.cp + r.cm;
    Eigen::Matrix4cd d;
    d << -2 * r.cm * r.s2, 2 * r.cp * r.s2, r.c0 * r.s4, r.c0 * r.s4,
         2 * r.cm * r.s2, -2 * r.cp * r.s2, -r.c0 * r.s4, -r.c0 * r.s4,
         r.cm * r.s4, -r.cp * r.s4, -sum * r.s2 - 4 * r.c0 * r.c2sq, sum * r.s2,
         r.cm * r.s4, -r.cp * r.s4, sum * r.s2, -sum * r.s2 - 4 * r.c0 * r.c2sq;
    Eigen::Matrix4cd y = 0.25 * r.u * d;
    y(2, 2) += -I * k * (b.eps1 - b.eps2);
    y(3, 3) += -I * k * (b.eps2 - b.eps1);
    if (secular)
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j)
                if (i != j && (i >= 2 || j >= 2)) y(i, j) = 0.0;
    return {y, eigendecompose(y, cutoff, ModeOrder::oscillatory_first)};
}

// One element of the Redfield tensor, d rho_ab / dt = sum R_ab,cd rho_cd, summed
// explicitly over sites and intermediate levels.
inline cplx redfield_element(const ExcitonBasis& b, const BathSpec& bath, int a, int bb, int c, int d) {
    const auto e = b.energies();
    const auto s = site_number_operators(b);
    auto q = [&](int j, int k, int n, int m) { return s[k](n, m) * 0.5 * cross_spectral(j + 1, k + 1, e[m] - e[n], bath); };
    auto qh = [&](int j, int k, int n, int m) { return s[k](n, m) * 0.5 * cross_spectral(k + 1, j + 1, e[n] - e[m], bath); };
    cplx v = 0.0;
    if (a == c && bb == d) v += -I * units::kappa * (e[a] - e[bb]);
    for (int j = 0; j < 2; ++j)
        for (int k = 0; k < 2; ++k) {
            double acc = 0.0;
            if (bb == d)
                for (int n = 0; n < 4; ++n) acc -= s[j](a, n) * q(j, k, n, c);
            acc += q(j, k, a, c) * s[j](d, bb);
            if (a == c)
                for (int n = 0; n < 4; ++n) acc -= qh(j, k, d, n) * s[j](n, bb);
            acc += s[j](a, c) * qh(j, k, d, bb);
            v += acc;
        }
    return v;
}

// Excited-state-absorption coherences {|f><eps1|, |f><eps2|}.
struct ZSuperoperator {
    Eigen::Matrix2cd matrix;
    EigenModes modes;
};

inline ZSuperoperator build_Z(const ExcitonBasis& b, const BathSpec& bath, bool secular = false,
                              double cutoff = units::kappa) {
    bath.validate();
    Eigen::Matrix2cd z;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) z(i, j) = redfield_element(b, bath, 3, i + 1, 3, j + 1);
    if (secular) z(0, 1) = z(1, 0) = 0.0;
    return {z, eigendecompose(z, cutoff, ModeOrder::ascending_imag)};
}

// ---------------------------------------------------------------------------
// Consistency with the full generator

struct ConsistencyReport {
    double x_error = 0.0, y_error = 0.0, z_error = 0.0;  // relative Frobenius
    bool passed = false;
    std::string details;
};

inline ConsistencyReport consistency_check(const XSuperoperator& x, const YSuperoperator& y,
                                           const LiouvilleGenerator& gen, double tol = 1e-9,
                                           const ZSuperoperator* z = nullptr) {
    ConsistencyReport rep;
    std::ostringstream os;
    auto compare = [&](const char* name, const Eigen::MatrixXcd& closed, const Eigen::MatrixXcd& block) {
        const double err = (closed - block).norm() / block.norm();
        if (err > tol) {
            os << name << " mismatch, relative error " << err << "\n";
            for (Eigen::Index i = 0; i < closed.rows(); ++i)
                for (Eigen::Index j = 0; j < closed.cols(); ++j)
                    if (std::abs(closed(i, j) - block(i, j)) > tol * block.norm())
                        os << "  [" << i << "," << j << "] closed " << closed(i, j) << " generator " << block(i, j)
                           << "\n";
        }
        return err;
    };
    rep.x_error = compare("X", x.matrix, gen.block(std::vector<int>{vec_index(0, 1), vec_index(0, 2)}));
    rep.y_error = compare("Y", y.matrix, gen.block(single_excitation_indices()));
    if (z) rep.z_error = compare("Z", z->matrix, gen.block(std::vector<int>{vec_index(3, 1), vec_index(3, 2)}));
    rep.details = os.str();
    rep.passed = rep.details.empty();
    if (!rep.passed) throw std::runtime_error("consistency_check failed:\n" + rep.details);
    return rep;
}

// ---------------------------------------------------------------------------
// Pathway decomposition

enum class Family { SE_R, SE_NR, ESA_R, ESA_NR };

inline std::string family_name(Family f) {
    static const char* n[] = {"SE_R", "SE_NR", "ESA_R", "ESA_NR"};
    return n[static_cast<int>(f)];
}
inline Signal family_signal(Family f) {
    static const Signal s[] = {Signal::R_SE, Signal::N_SE, Signal::R_ESA, Signal::N_ESA};
    return s[static_cast<int>(f)];
}

// A Liouville subspace spanned by |a><b| pairs with its eigenmodes.
struct ModeSpace {
    std::string symbol;  // x, x*, y, z
    std::vector<std::pair<int, int>> elems;
    EigenModes modes;

    Eigen::VectorXcd coords(const Mat4c& op) const {
        Eigen::VectorXcd v(elems.size());
        for (std::size_t r = 0; r < elems.size(); ++r) v(r) = op(elems[r].first, elems[r].second);
        return v;
    }
    // Expansion coefficients of op in the right eigenvectors (a linear solve).
    Eigen::VectorXcd expand(const Mat4c& op) const { return modes.right.partialPivLu().solve(coords(op)); }
    Mat4c mode(int k) const {
        Mat4c m = Mat4c::Zero();
        for (std::size_t r = 0; r < elems.size(); ++r) m(elems[r].first, elems[r].second) = modes.right(r, k);
        return m;
    }
};

inline EigenModes conjugate_modes(const EigenModes& m) {
    EigenModes c = m;
    c.values = m.values.conjugate();
    c.right = m.right.conjugate();
    c.left = m.left.conjugate();
    return c;
}

struct PathwayAmplitude {
    Family family = Family::SE_R;
    int k = 1, l = 1, m = 1;  // 1-based mode labels
    cplx strength;            // rotationally averaged alpha beta gamma tr[mu- x*]
    cplx p1, p2, p3;          // chi_k, upsilon_l, chi_m* (rad/fs)
    bool oscillatory = false;

    bool rephasing() const { return family == Family::SE_R || family == Family::ESA_R; }
    double center_w1() const { return std::abs(p1.imag()) / units::kappa; }
    double center_w3() const { return std::abs(p3.imag()) / units::kappa; }
    double width_w1() const { return -p1.real() / units::kappa; }
    double width_w3() const { return -p3.real() / units::kappa; }
    double beat() const { return p2.imag() / units::kappa; }
    double decay() const { return -p2.real() / units::kappa; }
    // A_klm(w1, w3) = strength / ((chi_k - i w1)(chi_m* + i w3)), sign of w1 flipped for non-rephasing.
    cplx value(double w1, double w3) const {
        const double s1 = rephasing() ? 1.0 : -1.0;
        return strength / ((p1 - s1 * I * units::kappa * w1) * (p3 + I * units::kappa * w3));
    }
};

struct Decomposition {
    XSuperoperator x;
    YSuperoperator y;
    ZSuperoperator z;
    std::vector<PathwayAmplitude> amplitudes;
    std::vector<std::string> warnings;
};

inline Decomposition pathway_decomposition(const ExcitonBasis& basis, const BathSpec& bath, const DipoleConfig& cfg,
                                           Family family, bool secular = false, double cutoff = units::kappa) {
    Decomposition out;
    out.x = build_X(basis, bath, secular, cutoff);
    try {
        out.y = build_Y(basis, bath, secular, cutoff);
    } catch (const near_defective_error& e) {
        throw near_defective_error(std::string(e.what()) + "; use full-generator propagation instead");
    }
    out.z = build_Z(basis, bath, secular, cutoff);
    for (const EigenModes* m : {&out.x.modes, &out.y.modes, &out.z.modes})
        if (m->degenerate) out.warnings.push_back("degenerate eigenvalues in pathway analysis");

    const ModeSpace ge{"x", {{0, 1}, {0, 2}}, out.x.modes};
    const ModeSpace eg{"x*", {{1, 0}, {2, 0}}, conjugate_modes(out.x.modes)};
    const ModeSpace ee{"y", {{1, 1}, {2, 2}, {1, 2}, {2, 1}}, out.y.modes};
    const ModeSpace fe{"z", {{3, 1}, {3, 2}}, out.z.modes};
    const bool reph = family == Family::SE_R || family == Family::ESA_R;
    const bool esa = family == Family::ESA_R || family == Family::ESA_NR;
    const ModeSpace& s1 = reph ? ge : eg;
    const ModeSpace& s3 = esa ? fe : eg;
    const auto chain = pathway_chain(family_signal(family));
    const std::array<Eigen::Matrix4d, 2> up{site_raising(basis, 1), site_raising(basis, 2)};

    const int n1 = s1.modes.size(), n2 = ee.modes.size(), n3 = s3.modes.size();
    std::array<Eigen::VectorXcd, 2> alpha, trace;
    std::array<Eigen::MatrixXcd, 2> beta, gamma;
    for (int a = 0; a < 2; ++a) {
        alpha[a] = s1.expand(apply_interaction(ground_state(), chain[0], up[a]));
        beta[a].resize(n1, n2);
        for (int k = 0; k < n1; ++k) beta[a].row(k) = ee.expand(apply_interaction(s1.mode(k), chain[1], up[a]));
        gamma[a].resize(n2, n3);
        for (int l = 0; l < n2; ++l) gamma[a].row(l) = s3.expand(apply_interaction(ee.mode(l), chain[2], up[a]));
        trace[a].resize(n3);
        for (int m = 0; m < n3; ++m) trace[a](m) = (up[a].transpose().cast<cplx>() * s3.mode(m)).trace();
    }
    for (int k = 0; k < n1; ++k)
        for (int l = 0; l < n2; ++l)
            for (int m = 0; m < n3; ++m) {
                cplx str = 0.0;
                for (int a = 0; a < 2; ++a)
                    for (int b = 0; b < 2; ++b)
                        for (int c = 0; c < 2; ++c)
                            for (int d = 0; d < 2; ++d) {
                                const double w = rotational_average(cfg, {a + 1, b + 1, c + 1, d + 1});
                                if (w != 0.0) str += w * alpha[a](k) * beta[b](k, l) * gamma[c](l, m) * trace[d](m);
                            }
                PathwayAmplitude p;
                p.family = family;
                p.k = k + 1;
                p.l = l + 1;
                p.m = m + 1;
                p.strength = str;
                p.p1 = s1.modes.values(k);
                p.p2 = ee.modes.values(l);
                p.p3 = s3.modes.values(m);
                p.oscillatory = ee.modes.oscillatory[l];
                out.amplitudes.push_back(p);
            }
    return out;
}

// Sum of the oscillatory A_klm(w1, w3) e^{upsilon_l t2}.
inline cplx oscillatory_sum(const std::vector<PathwayAmplitude>& amps, double w1, double w3, double t2) {
    cplx v = 0.0;
    for (const auto& a : amps)
        if (a.oscillatory) v += a.value(w1, w3) * std::exp(a.p2 * t2);
    return v;
}

// ---------------------------------------------------------------------------
// Reports

struct FeynmanEntry {
    PathwayAmplitude amp;
    std::string ladder;
    int peak_i = 1, peak_j = 1;
    bool diagonal() const { return peak_i == peak_j; }
    bool positive() const { return amp.p2.imag() > 0.0; }
    std::string peak_name() const {
        return std::string(amp.rephasing() ? "R" : "N") + char('0' + peak_i) + char('0' + peak_j);
    }
};

inline std::vector<FeynmanEntry> feynman_report(const std::vector<PathwayAmplitude>& amps, const ExcitonBasis& b) {
    std::vector<FeynmanEntry> out;
    for (const auto& a : amps) {
        const bool reph = a.rephasing();
        const bool esa = a.family == Family::ESA_R || a.family == Family::ESA_NR;
        std::ostringstream ladder;
        ladder << "|g><g| -> x" << a.k << (reph ? "" : "*") << " -> y" << a.l << " -> " << (esa ? "z" : "x") << a.m
               << (esa ? "" : "*") << " -> |g><g|";
        out.push_back({a, ladder.str(), nearest_exciton(a.p1, b), nearest_exciton(a.p3, b)});
    }
    return out;
}

inline std::string format_feynman_table(const std::vector<FeynmanEntry>& entries) {
    std::ostringstream os;
    os << std::setprecision(10);
    os << "family\tk\tl\tm\tpeak\tclass\tsign\tstrength_re\tstrength_im\tabs\tcenter_w1\tcenter_w3\twidth_w1\twidth_w3"
          "\tbeat\tdecay\tladder\n";
    for (const auto& e : entries) {
        const auto& a = e.amp;
        os << family_name(a.family) << '\t' << a.k << '\t' << a.l << '\t' << a.m << '\t' << e.peak_name() << '\t'
           << (a.oscillatory ? (e.diagonal() ? "diagonal-peak" : "cross-peak") : "non-oscillatory") << '\t'
           << (a.oscillatory ? (e.positive() ? "positive" : "negative") : "none") << '\t' << a.strength.real() << '\t'
           << a.strength.imag() << '\t' << std::abs(a.strength) << '\t' << a.center_w1() << '\t' << a.center_w3()
           << '\t' << a.width_w1() << '\t' << a.width_w3() << '\t' << a.beat() << '\t' << a.decay() << '\t'
           << e.ladder << '\n';
    }
    return os.str();
}

inline std::string format_feynman_text(const std::vector<FeynmanEntry>& entries, double rel_floor = 1e-6) {
    double top = 0.0;
    for (const auto& e : entries) top = std::max(top, std::abs(e.amp.strength));
    std::ostringstream os;
    os << std::fixed << std::setprecision(4);
    for (const auto& e : entries) {
        const auto& a = e.amp;
        if (!a.oscillatory || std::abs(a.strength) <= rel_floor * top) continue;
        os << family_name(a.family) << "  " << e.ladder << "  " << e.peak_name() << ' '
           << (e.diagonal() ? "diagonal" : "cross") << ' ' << (e.positive() ? "+" : "-") << std::abs(a.beat())
           << " cm^-1  |strength| " << std::abs(a.strength) / top << "  widths (" << a.width_w1() << ", "
           << a.width_w3() << ") cm^-1\n";
    }
    return os.str();
}

// Eigenvalues (cm^-1) and eigenvector components (amplitude, phase) of X, Y and Z.
inline std::string format_eigen_table(const Decomposition& d) {
    std::ostringstream os;
    os << std::setprecision(8);
    os << "operator\tmode\tre_cm\tim_cm\tcomponent\tamplitude\tphase\n";
    auto dump = [&](const char* name, const EigenModes& m, const std::vector<std::string>& labels) {
        for (int k = 0; k < m.size(); ++k)
            for (int r = 0; r < m.size(); ++r)
                os << name << '\t' << k + 1 << '\t' << units::wavenumber(m.values(k).real()) << '\t'
                   << units::wavenumber(m.values(k).imag()) << '\t' << labels[r] << '\t' << std::abs(m.right(r, k))
                   << '\t' << std::arg(m.right(r, k)) << '\n';
    };
    dump("X", d.x.modes, {"g1", "g2"});
    dump("Y", d.y.modes, {"11", "22", "12", "21"});
    dump("Z", d.z.modes, {"f1", "f2"});
    return os.str();
}

// For each oscillatory y-mode: largest population amplitude against the minor coherence amplitude.
inline std::vector<std::string> mixing_flags(const YSuperoperator& y) {
    std::vector<std::string> out;
    for (int l = 0; l < y.modes.size(); ++l) {
        if (!y.modes.oscillatory[l]) continue;
        const auto& v = y.modes.right.col(l);
        const double pop = std::max(std::abs(v(0)), std::abs(v(1)));
        const double coh = std::min(std::abs(v(2)), std::abs(v(3)));
        std::ostringstream os;
        os << std::setprecision(3) << "y" << l + 1 << ": coherence mixing " << coh << ", population " << pop << " -> "
           << (coh > pop ? "coherence-mixing dominant" : "population-mixing dominant");
        out.push_back(os.str());
    }
    return out;
}

}  // namespace exciton2des
