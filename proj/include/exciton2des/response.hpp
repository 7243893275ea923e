// response.hpp — third-order response functions, absorption and 2D spectra
#pragma once

#include "grid.hpp"
#include "liouville.hpp"
#include "parallel.hpp"

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace exciton2des {

// Site transition dipoles d_j = magnitude * unit(dj).
struct DipoleConfig {
    Eigen::Vector3d d1{1.0, 0.0, 0.0};
    Eigen::Vector3d d2{0.0, 1.0, 0.0};
    double magnitude = 1.0;

    Eigen::Vector3d dipole(int site) const { return magnitude * (site == 1 ? d1 : d2).normalized(); }
    static DipoleConfig orthogonal(double magnitude = 1.0) {
        DipoleConfig c;
        c.magnitude = magnitude;
        return c;
    }
};

// sigma_j^+ in the exciton basis.
inline Eigen::Matrix4d site_raising(const ExcitonBasis& b, int site) {
    Eigen::Matrix4d s = Eigen::Matrix4d::Zero();
    if (site == 1) {
        s(1, 0) = 1.0;  // |e1 g2><g1 g2|
        s(3, 2) = 1.0;  // |e1 e2><g1 e2|
    } else if (site == 2) {
        s(2, 0) = 1.0;
        s(3, 1) = 1.0;
    } else {
        throw std::out_of_range("site_raising: site must be 1 or 2");
    }
    return b.vectors.transpose() * s * b.vectors;
}

// (mu+, mu-) for polarization e, exciton basis.
inline std::pair<Eigen::Matrix4d, Eigen::Matrix4d> dipole_operators(const DipoleConfig& cfg,
                                                                    const ExcitonBasis& b,
                                                                    const Eigen::Vector3d& e) {
    if (std::abs(e.norm() - 1.0) > 1e-9) throw std::invalid_argument("dipole_operators: e must be unit");
    Eigen::Matrix4d up = e.dot(cfg.dipole(1)) * site_raising(b, 1) + e.dot(cfg.dipole(2)) * site_raising(b, 2);
    return {up, up.transpose()};
}

// Isotropic average of (e.da)(e.db)(e.dc)(e.dd) over polarization directions.
inline double rotational_average(const DipoleConfig& cfg, const std::array<int, 4>& p) {
    const Eigen::Vector3d a = cfg.dipole(p[0]), b = cfg.dipole(p[1]), c = cfg.dipole(p[2]), d = cfg.dipole(p[3]);
    return (a.dot(b) * c.dot(d) + a.dot(c) * b.dot(d) + a.dot(d) * b.dot(c)) / 15.0;
}

inline double linear_average(const DipoleConfig& cfg, int a, int b) {
    return cfg.dipole(a).dot(cfg.dipole(b)) / 3.0;
}

// ---------------------------------------------------------------------------
// Pathway definitions

enum class Signal { R_GSB, R_SE, R_ESA, N_GSB, N_SE, N_ESA };

inline constexpr std::array<Signal, 6> all_signals{Signal::R_GSB, Signal::R_SE, Signal::R_ESA,
                                                   Signal::N_GSB, Signal::N_SE, Signal::N_ESA};

constexpr bool is_rephasing(Signal s) { return s == Signal::R_GSB || s == Signal::R_SE || s == Signal::R_ESA; }
constexpr bool is_esa(Signal s) { return s == Signal::R_ESA || s == Signal::N_ESA; }
// Sign with which each family enters S = GSB + SE - ESA.
constexpr double signal_sign(Signal s) { return is_esa(s) ? -1.0 : 1.0; }

inline std::string signal_name(Signal s) {
    static const char* n[] = {"R_GSB", "R_SE", "R_ESA", "N_GSB", "N_SE", "N_ESA"};
    return n[static_cast<int>(s)];
}

struct Interaction {
    bool left;     // operator multiplies from the left (ket side)
    bool raising;  // mu+ or mu-
};

// The three interactions before the final tr[mu- .], in time order.
inline std::array<Interaction, 3> pathway_chain(Signal s) {
    constexpr Interaction Lp{true, true}, Lm{true, false}, Rp{false, true}, Rm{false, false};
    switch (s) {
        case Signal::R_GSB: return {Rm, Rp, Lp};
        case Signal::R_SE: return {Rm, Lp, Rp};
        case Signal::R_ESA: return {Rm, Lp, Lp};
        case Signal::N_GSB: return {Lp, Lm, Lp};
        case Signal::N_SE: return {Lp, Rm, Rp};
        case Signal::N_ESA: return {Lp, Rm, Lp};
    }
    throw std::logic_error("pathway_chain");
}

inline Mat4c apply_interaction(const Mat4c& rho, Interaction it, const Eigen::Matrix4d& raise) {
    const Eigen::Matrix4cd op = (it.raising ? raise : Eigen::Matrix4d(raise.transpose())).cast<cplx>();
    return it.left ? Mat4c(op * rho) : Mat4c(rho * op);
}

inline Mat4c ground_state() {
    Mat4c rho = Mat4c::Zero();
    rho(0, 0) = 1.0;
    return rho;
}

// ---------------------------------------------------------------------------
// Time-domain response by nested propagation

inline cplx response_direct(const Propagator& prop, const ExcitonBasis& basis, const DipoleConfig& cfg,
                            Signal s, double t1, double t2, double t3) {
    if (t1 < 0.0 || t2 < 0.0 || t3 < 0.0) throw std::invalid_argument("response: negative delay");
    const auto chain = pathway_chain(s);
    const std::array<Eigen::Matrix4d, 2> up{site_raising(basis, 1), site_raising(basis, 2)};
    cplx total = 0.0;
    for (int a = 1; a <= 2; ++a)
        for (int b = 1; b <= 2; ++b)
            for (int c = 1; c <= 2; ++c)
                for (int d = 1; d <= 2; ++d) {
                    const double w = rotational_average(cfg, {a, b, c, d});
                    if (w == 0.0) continue;
                    Mat4c rho = prop.apply(apply_interaction(ground_state(), chain[0], up[a - 1]), t1);
                    rho = prop.apply(apply_interaction(rho, chain[1], up[b - 1]), t2);
                    rho = prop.apply(apply_interaction(rho, chain[2], up[c - 1]), t3);
                    total += w * (up[d - 1].transpose().cast<cplx>() * rho).trace();
                }
    return total;
}

struct ThirdOrder {
    cplx gsb, se, esa;
    cplx total() const { return gsb + se - esa; }
};

inline ThirdOrder rephasing_response(const Propagator& prop, const ExcitonBasis& basis, const DipoleConfig& cfg,
                                     double t1, double t2, double t3) {
    return {response_direct(prop, basis, cfg, Signal::R_GSB, t1, t2, t3),
            response_direct(prop, basis, cfg, Signal::R_SE, t1, t2, t3),
            response_direct(prop, basis, cfg, Signal::R_ESA, t1, t2, t3)};
}

inline ThirdOrder nonrephasing_response(const Propagator& prop, const ExcitonBasis& basis,
                                        const DipoleConfig& cfg, double t1, double t2, double t3) {
    return {response_direct(prop, basis, cfg, Signal::N_GSB, t1, t2, t3),
            response_direct(prop, basis, cfg, Signal::N_SE, t1, t2, t3),
            response_direct(prop, basis, cfg, Signal::N_ESA, t1, t2, t3)};
}

// ---------------------------------------------------------------------------
// Eigenmode (pole) representation
//
// R(t1, t2, t3) = sum coef * exp(p1 t1 + p2 t2 + p3 t3), poles in rad/fs.

struct PoleTerm {
    cplx coef;
    cplx p1, p2, p3;
    int k = 0, l = 0, m = 0;  // mode indices inside the t1, t2, t3 sectors
};

struct ModalResponse {
    bool rephasing = true;
    std::string label;
    std::vector<PoleTerm> terms;

    cplx time(double t1, double t2, double t3) const {
        cplx v = 0.0;
        for (const auto& t : terms) v += t.coef * std::exp(t.p1 * t1 + t.p2 * t2 + t.p3 * t3);
        return v;
    }
    // Half-line kernel along t1: 1/(s i k w1 - p1), s = +1 rephasing, -1 otherwise.
    cplx kernel1(const PoleTerm& t, double w1) const {
        return 1.0 / ((rephasing ? 1.0 : -1.0) * I * units::kappa * w1 - t.p1);
    }
    static cplx kernel3(const PoleTerm& t, double w3) { return 1.0 / (-I * units::kappa * w3 - t.p3); }

    // S(w1, t2, w3), frequencies in cm^-1.
    cplx spectrum(double w1, double w3, double t2) const {
        cplx v = 0.0;
        for (const auto& t : terms) v += t.coef * std::exp(t.p2 * t2) * kernel1(t, w1) * kernel3(t, w3);
        return v;
    }

    void append(const ModalResponse& o, double scale) {
        if (o.rephasing != rephasing) throw std::invalid_argument("ModalResponse: mixing signal classes");
        for (auto t : o.terms) {
            t.coef *= scale;
            terms.push_back(t);
        }
    }
};

inline ModalResponse modal_response(const Propagator& prop, const ExcitonBasis& basis, const DipoleConfig& cfg,
                                    Signal s) {
    const auto chain = pathway_chain(s);
    const std::array<Eigen::Matrix4d, 2> up{site_raising(basis, 1), site_raising(basis, 2)};

    // sector reached after each interaction
    std::array<Sector, 3> sec;
    {
        Mat4c probe = ground_state();
        for (int i = 0; i < 3; ++i) {
            probe = apply_interaction(probe, chain[i], up[0] + up[1]);
            int idx = -1;
            for (int v = 0; v < 16 && idx < 0; ++v)
                if (std::abs(vec(probe)(v)) > 0.0) idx = v;
            sec[i] = sector_of(idx);
        }
    }
    const EigenModes* modes[3];
    const std::vector<int>* idx[3];
    for (int i = 0; i < 3; ++i) {
        modes[i] = &prop.modes(sec[i]);
        idx[i] = &prop.indices(sec[i]);
        if (!modes[i]->well_conditioned())
            throw near_defective_error("modal_response: sector " + sec[i].name() + " is near-defective");
    }
    auto mode_op = [&](int step, int k) {
        Vec16c v = Vec16c::Zero();
        for (std::size_t r = 0; r < idx[step]->size(); ++r) v((*idx[step])[r]) = modes[step]->right(r, k);
        return unvec(v);
    };
    auto expand = [&](int step, const Mat4c& op) {
        const Vec16c v = vec(op);
        Eigen::VectorXcd x(idx[step]->size());
        for (std::size_t r = 0; r < idx[step]->size(); ++r) x(r) = v((*idx[step])[r]);
        return Eigen::VectorXcd(modes[step]->left * x);
    };

    const int n1 = modes[0]->size(), n2 = modes[1]->size(), n3 = modes[2]->size();
    // c1[a](k), c2[b](k, l), c3[c](l, m), tr[d](m)
    std::array<Eigen::VectorXcd, 2> c1;
    std::array<Eigen::MatrixXcd, 2> c2, c3;
    std::array<Eigen::VectorXcd, 2> tr;
    for (int a = 0; a < 2; ++a) {
        c1[a] = expand(0, apply_interaction(ground_state(), chain[0], up[a]));
        c2[a].resize(n1, n2);
        for (int k = 0; k < n1; ++k) c2[a].row(k) = expand(1, apply_interaction(mode_op(0, k), chain[1], up[a]));
        c3[a].resize(n2, n3);
        for (int l = 0; l < n2; ++l) c3[a].row(l) = expand(2, apply_interaction(mode_op(1, l), chain[2], up[a]));
        tr[a].resize(n3);
        for (int m = 0; m < n3; ++m) tr[a](m) = (up[a].transpose().cast<cplx>() * mode_op(2, m)).trace();
    }

    std::vector<cplx> coef(static_cast<std::size_t>(n1 * n2 * n3), 0.0);
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
            for (int c = 0; c < 2; ++c)
                for (int d = 0; d < 2; ++d) {
                    const double w = rotational_average(cfg, {a + 1, b + 1, c + 1, d + 1});
                    if (w == 0.0) continue;
                    for (int k = 0; k < n1; ++k)
                        for (int l = 0; l < n2; ++l)
                            for (int m = 0; m < n3; ++m)
                                coef[(k * n2 + l) * n3 + m] += w * c1[a](k) * c2[b](k, l) * c3[c](l, m) * tr[d](m);
                }

    ModalResponse out;
    out.rephasing = is_rephasing(s);
    out.label = signal_name(s);
    for (int k = 0; k < n1; ++k)
        for (int l = 0; l < n2; ++l)
            for (int m = 0; m < n3; ++m) {
                const cplx c = coef[(k * n2 + l) * n3 + m];
                if (c == cplx(0.0)) continue;
                out.terms.push_back({c, modes[0]->values(k), modes[1]->values(l), modes[2]->values(m), k, l, m});
            }
    return out;
}

// GSB + SE - ESA for one signal class.
inline ModalResponse total_response(const Propagator& prop, const ExcitonBasis& basis, const DipoleConfig& cfg,
                                    bool rephasing) {
    ModalResponse out;
    out.rephasing = rephasing;
    out.label = rephasing ? "S_R" : "S_N";
    for (Signal s : all_signals)
        if (is_rephasing(s) == rephasing) out.append(modal_response(prop, basis, cfg, s), signal_sign(s));
    return out;
}

// ---------------------------------------------------------------------------
// 2D spectra

namespace detail {

// sum_t F1(i, t) * mid(t) * F3(t, j)
inline Eigen::MatrixXcd separable(const Eigen::MatrixXcd& f1, const Eigen::VectorXcd& mid,
                                  const Eigen::MatrixXcd& f3) {
    return f1 * mid.asDiagonal() * f3;
}

inline void kernel_matrices(const ModalResponse& r, const Axis& w1, const Axis& w3, Eigen::MatrixXcd& f1,
                            Eigen::MatrixXcd& f3) {
    const auto n = static_cast<Eigen::Index>(r.terms.size());
    f1.resize(static_cast<Eigen::Index>(w1.size()), n);
    f3.resize(n, static_cast<Eigen::Index>(w3.size()));
    for (Eigen::Index t = 0; t < n; ++t) {
        for (std::size_t i = 0; i < w1.size(); ++i) f1(i, t) = r.kernel1(r.terms[t], w1.values[i]);
        for (std::size_t j = 0; j < w3.size(); ++j) f3(t, j) = ModalResponse::kernel3(r.terms[t], w3.values[j]);
    }
}

inline void store_slice(Grid<cplx>& g, std::size_t i0, const Eigen::MatrixXcd& m) {
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j) g(i0, i, j) = m(i, j);
}

}  // namespace detail

// Exact half-line transforms over t1 and t3: grid axes (t2, w1, w3).
inline Grid<cplx> spectra_2d(const ModalResponse& r, const Axis& t2, const Axis& w1, const Axis& w3,
                             unsigned threads = 1) {
    Grid<cplx> g({t2, w1, w3});
    Eigen::MatrixXcd f1, f3;
    detail::kernel_matrices(r, w1, w3, f1, f3);
    parallel_for(t2.size(), threads, [&](std::size_t i) {
        Eigen::VectorXcd mid(r.terms.size());
        for (std::size_t t = 0; t < r.terms.size(); ++t)
            mid(t) = r.terms[t].coef * std::exp(r.terms[t].p2 * t2.values[i]);
        detail::store_slice(g, i, detail::separable(f1, mid, f3));
    });
    return g;
}

struct TimeGrid {
    double t1_max = 1024.0, t1_step = 4.0;
    double t3_max = 1024.0, t3_step = 4.0;
    double carrier = 12500.0;  // rotating-frame offset, cm^-1

    int n1() const { return static_cast<int>(std::floor(t1_max / t1_step + 1e-9)) + 1; }
    int n3() const { return static_cast<int>(std::floor(t3_max / t3_step + 1e-9)) + 1; }
};

// Largest rotating-frame frequency carried along t1 and t3 (cm^-1).
inline std::pair<double, double> rotated_bandwidth(const ModalResponse& r, double carrier) {
    const double s1 = r.rephasing ? 1.0 : -1.0;
    double b1 = 0.0, b3 = 0.0;
    for (const auto& t : r.terms) {
        b1 = std::max(b1, std::abs(t.p1.imag() / units::kappa - s1 * carrier));
        b3 = std::max(b3, std::abs(t.p3.imag() / units::kappa + carrier));
    }
    return {b1, b3};
}

inline double nyquist_limit(double step_fs) { return std::numbers::pi / (units::kappa * step_fs); }

inline void check_nyquist(const ModalResponse& r, const TimeGrid& tg) {
    const auto [b1, b3] = rotated_bandwidth(r, tg.carrier);
    if (b1 >= nyquist_limit(tg.t1_step) || b3 >= nyquist_limit(tg.t3_step))
        throw std::domain_error("Nyquist violation: rotating-frame bandwidth " + std::to_string(std::max(b1, b3)) +
                                " cm^-1 exceeds " + std::to_string(nyquist_limit(std::max(tg.t1_step, tg.t3_step))) +
                                " cm^-1 for the chosen time step");
}

// Trapezoid half-line transform of the sampled rotating-frame signal.
inline Grid<cplx> spectra_2d_discrete(const ModalResponse& r, const TimeGrid& tg, const Axis& t2, const Axis& w1,
                                      const Axis& w3, unsigned threads = 1) {
    check_nyquist(r, tg);
    const double s1 = r.rephasing ? 1.0 : -1.0, k = units::kappa;
    const int n1 = tg.n1(), n3 = tg.n3();
    const auto nt = static_cast<Eigen::Index>(r.terms.size());

    // samples: E1(n, t) = exp(p1 t1_n) rotated; kernels: K1(i, n) with trapezoid weights
    Eigen::MatrixXcd e1(n1, nt), e3(nt, n3), k1(w1.size(), n1), k3(n3, w3.size());
    for (int n = 0; n < n1; ++n) {
        const double t = n * tg.t1_step;
        for (Eigen::Index q = 0; q < nt; ++q)
            e1(n, q) = std::exp(r.terms[q].p1 * t) * std::exp(-s1 * I * k * tg.carrier * t);
        const double wt = (n == 0 || n == n1 - 1 ? 0.5 : 1.0) * tg.t1_step;
        for (std::size_t i = 0; i < w1.size(); ++i)
            k1(i, n) = wt * std::exp(-s1 * I * k * (w1.values[i] - tg.carrier) * t);
    }
    for (int n = 0; n < n3; ++n) {
        const double t = n * tg.t3_step;
        for (Eigen::Index q = 0; q < nt; ++q)
            e3(q, n) = std::exp(r.terms[q].p3 * t) * std::exp(I * k * tg.carrier * t);
        const double wt = (n == 0 || n == n3 - 1 ? 0.5 : 1.0) * tg.t3_step;
        for (std::size_t j = 0; j < w3.size(); ++j) k3(n, j) = wt * std::exp(I * k * (w3.values[j] - tg.carrier) * t);
    }
    const Eigen::MatrixXcd left = k1 * e1, right = e3 * k3;
    Grid<cplx> g({t2, w1, w3});
    parallel_for(t2.size(), threads, [&](std::size_t i) {
        Eigen::VectorXcd mid(nt);
        for (Eigen::Index q = 0; q < nt; ++q) mid(q) = r.terms[q].coef * std::exp(r.terms[q].p2 * t2.values[i]);
        detail::store_slice(g, i, detail::separable(left, mid, right));
    });
    return g;
}

// ---------------------------------------------------------------------------
// Linear absorption: A(w) ~ Re int_0^inf dt e^{i w t} tr[mu- u(t)[mu+ rho_eq]]

struct LinearResponse {
    std::vector<std::pair<cplx, cplx>> terms;  // (coefficient, pole)

    cplx time(double t) const {
        cplx v = 0.0;
        for (const auto& [c, p] : terms) v += c * std::exp(p * t);
        return v;
    }
    double absorption(double w) const {
        cplx v = 0.0;
        for (const auto& [c, p] : terms) v += c / (-I * units::kappa * w - p);
        return v.real();
    }
};

inline LinearResponse linear_response(const Propagator& prop, const ExcitonBasis& basis, const DipoleConfig& cfg) {
    const Sector eg{1, 0};
    const EigenModes& md = prop.modes(eg);
    if (!md.well_conditioned()) throw near_defective_error("linear_response: eg sector is near-defective");
    const auto& idx = prop.indices(eg);
    LinearResponse out;
    std::vector<cplx> coef(md.size(), 0.0);
    for (int a = 1; a <= 2; ++a)
        for (int b = 1; b <= 2; ++b) {
            const double w = linear_average(cfg, a, b);
            if (w == 0.0) continue;
            const Eigen::Matrix4d ua = site_raising(basis, a), ub = site_raising(basis, b);
            const Vec16c v = vec(Mat4c(ua.cast<cplx>() * ground_state()));
            Eigen::VectorXcd x(idx.size());
            for (std::size_t r = 0; r < idx.size(); ++r) x(r) = v(idx[r]);
            const Eigen::VectorXcd c = md.left * x;
            for (int k = 0; k < md.size(); ++k) {
                Vec16c rk = Vec16c::Zero();
                for (std::size_t r = 0; r < idx.size(); ++r) rk(idx[r]) = md.right(r, k);
                coef[k] += w * c(k) * (ub.transpose().cast<cplx>() * unvec(rk)).trace();
            }
        }
    for (int k = 0; k < md.size(); ++k) out.terms.emplace_back(coef[k], md.values(k));
    return out;
}

inline std::vector<double> absorption(const ExcitonBasis& basis, const LiouvilleGenerator& gen,
                                      const DipoleConfig& cfg, const Axis& w) {
    const LinearResponse lr = linear_response(Propagator(gen), basis, cfg);
    std::vector<double> out;
    out.reserve(w.size());
    for (double x : w.values) out.push_back(lr.absorption(x));
    return out;
}

// Trapezoid transform of the sampled rotating-frame linear response.
inline std::vector<double> absorption_discrete(const LinearResponse& lr, double t_max, double step, double carrier,
                                               const Axis& w) {
    double band = 0.0;
    for (const auto& [c, p] : lr.terms) band = std::max(band, std::abs(p.imag() / units::kappa + carrier));
    if (band >= nyquist_limit(step)) throw std::domain_error("Nyquist violation in absorption_discrete");
    const int n = static_cast<int>(std::floor(t_max / step + 1e-9)) + 1;
    std::vector<cplx> samples(n);
    for (int i = 0; i < n; ++i) samples[i] = lr.time(i * step) * std::exp(I * units::kappa * carrier * (i * step));
    std::vector<double> out;
    for (double x : w.values) {
        cplx acc = 0.0;
        for (int i = 0; i < n; ++i)
            acc += (i == 0 || i == n - 1 ? 0.5 : 1.0) * samples[i] *
                   std::exp(I * units::kappa * (x - carrier) * (i * step));
        out.push_back((acc * step).real());
    }
    return out;
}

}  // namespace exciton2des
