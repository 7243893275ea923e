// beating.hpp — oscillatory t2 components, beating maps and peak diagnostics
#pragma once

#include "grid.hpp"
#include "response.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace exciton2des {

// Keeps the terms whose t2 pole oscillates (|Im p2| >= cutoff, rad/fs).
// Modes within 10% of the cutoff are reported in `warnings`.
inline ModalResponse oscillatory_component(const ModalResponse& r, double cutoff = units::kappa,
                                           std::vector<std::string>* warnings = nullptr) {
    ModalResponse out;
    out.rephasing = r.rephasing;
    out.label = r.label + "_osc";
    for (const auto& t : r.terms) {
        const double f = std::abs(t.p2.imag());
        if (warnings && std::abs(f - cutoff) < 0.1 * cutoff)
            warnings->push_back("t2 mode at " + std::to_string(units::wavenumber(t.p2.imag())) +
                                " cm^-1 is within 10% of the oscillatory cutoff");
        if (f >= cutoff) out.terms.push_back(t);
    }
    return out;
}

// Half-line t2 transform of one pole, optionally over a finite window [0, T].
inline cplx t2_kernel(cplx p2, double w2, double window = std::numeric_limits<double>::infinity()) {
    const cplx z = p2 - I * units::kappa * w2;
    if (!std::isfinite(window)) return -1.0 / z;
    const cplx x = z * window;
    // (e^x - 1) / z without cancellation for small |x|, including z = 0
    if (std::abs(x) < 1e-5) return window * (1.0 + 0.5 * x * (1.0 + x / 3.0));
    return (std::exp(x) - 1.0) / z;
}

// Complex beating amplitude before the magnitude, frequencies in cm^-1.
inline cplx beating_amplitude(const ModalResponse& osc, double w1, double w2, double w3,
                              double window = std::numeric_limits<double>::infinity()) {
    cplx v = 0.0;
    for (const auto& t : osc.terms) v += t.coef * osc.kernel1(t, w1) * ModalResponse::kernel3(t, w3) * t2_kernel(t.p2, w2, window);
    return v;
}

struct BeatingMap {
    Grid<double> grid;        // axes (w2, w1, w3)
    double norm_max = 0.0;    // max value before normalization
    bool normalized = false;
    double display_exponent = 0.1;

    const Axis& w2() const { return grid.axes[0]; }
    const Axis& w1() const { return grid.axes[1]; }
    const Axis& w3() const { return grid.axes[2]; }
    double operator()(std::size_t i2, std::size_t i1, std::size_t i3) const { return grid(i2, i1, i3); }
};

inline void check_w2_coverage(const Axis& w2, double splitting) {
    const double need = 1.5 * std::abs(splitting);
    if (w2.front() > -need || w2.back() < need)
        throw std::domain_error("beating_map: w2 axis must cover +-" + std::to_string(need) + " cm^-1");
}

// |int_0^inf dt2 S(w1, t2, w3) e^{-i w2 t2}| on the grid, evaluated mode by mode.
inline BeatingMap beating_map(const ModalResponse& osc, const Axis& w2, const Axis& w1, const Axis& w3,
                              double splitting, bool normalize = true, unsigned threads = 1,
                              double window = std::numeric_limits<double>::infinity()) {
    check_w2_coverage(w2, splitting);
    BeatingMap map;
    map.grid = Grid<double>({w2, w1, w3});
    Eigen::MatrixXcd f1, f3;
    detail::kernel_matrices(osc, w1, w3, f1, f3);
    parallel_for(w2.size(), threads, [&](std::size_t i) {
        Eigen::VectorXcd mid(osc.terms.size());
        for (std::size_t t = 0; t < osc.terms.size(); ++t)
            mid(t) = osc.terms[t].coef * t2_kernel(osc.terms[t].p2, w2.values[i], window);
        const Eigen::MatrixXcd s = detail::separable(f1, mid, f3);
        for (Eigen::Index a = 0; a < s.rows(); ++a)
            for (Eigen::Index b = 0; b < s.cols(); ++b) map.grid(i, a, b) = std::abs(s(a, b));
    });
    for (double v : map.grid.data) map.norm_max = std::max(map.norm_max, v);
    if (normalize && map.norm_max > 0.0) {
        for (double& v : map.grid.data) v /= map.norm_max;
        map.normalized = true;
    }
    return map;
}

// One w2 plane |S(w1, w2, w3)|, axes (w1, w3), not normalized.
inline Grid<double> beating_slice(const ModalResponse& osc, double w2, const Axis& w1, const Axis& w3,
                                  double window = std::numeric_limits<double>::infinity()) {
    Grid<double> g({w1, w3});
    Eigen::MatrixXcd f1, f3;
    detail::kernel_matrices(osc, w1, w3, f1, f3);
    Eigen::VectorXcd mid(osc.terms.size());
    for (std::size_t t = 0; t < osc.terms.size(); ++t)
        mid(t) = osc.terms[t].coef * t2_kernel(osc.terms[t].p2, w2, window);
    const Eigen::MatrixXcd s = detail::separable(f1, mid, f3);
    for (Eigen::Index a = 0; a < s.rows(); ++a)
        for (Eigen::Index b = 0; b < s.cols(); ++b) g(a, b) = std::abs(s(a, b));
    return g;
}

// Discrete cross-check: trapezoid t2 transform of sampled S(w1, t2, w3).
inline Grid<double> beating_map_from_samples(const Grid<cplx>& s, const Axis& w2) {
    const Axis& t2 = s.axes[0];
    if (t2.size() < 2) throw std::invalid_argument("beating_map_from_samples: need >= 2 t2 samples");
    Grid<double> out({w2, s.axes[1], s.axes[2]});
    const std::size_t n1 = s.axes[1].size(), n3 = s.axes[2].size(), nt = t2.size();
    for (std::size_t q = 0; q < w2.size(); ++q) {
        std::vector<cplx> acc(n1 * n3, 0.0);
        for (std::size_t n = 0; n < nt; ++n) {
            const double dt_lo = n > 0 ? t2.values[n] - t2.values[n - 1] : 0.0;
            const double dt_hi = n + 1 < nt ? t2.values[n + 1] - t2.values[n] : 0.0;
            const cplx ph = 0.5 * (dt_lo + dt_hi) * std::exp(-I * units::kappa * w2.values[q] * t2.values[n]);
            for (std::size_t a = 0; a < n1 * n3; ++a) acc[a] += ph * s.data[n * n1 * n3 + a];
        }
        for (std::size_t a = 0; a < n1 * n3; ++a) out.data[q * n1 * n3 + a] = std::abs(acc[a]);
    }
    return out;
}

// Render-time display scaling S^exponent of a normalized map.
inline std::vector<double> display_scale(const std::vector<double>& v, double exponent) {
    std::vector<double> out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = std::pow(std::max(v[i], 0.0), exponent);
    return out;
}

// ---------------------------------------------------------------------------
// Peaks

struct Peak {
    bool rephasing = true;
    int i = 1;  // w1 index (eps_i)
    int j = 1;  // w3 index (eps_j)

    std::string name() const { return std::string(rephasing ? "R" : "N") + char('0' + i) + char('0' + j); }
    static Peak parse(const std::string& s) {
        if (s.size() != 3 || (s[0] != 'R' && s[0] != 'N') || (s[1] != '1' && s[1] != '2') ||
            (s[2] != '1' && s[2] != '2'))
            throw std::invalid_argument("Peak: expected R11..R22 or N11..N22, got '" + s + "'");
        return Peak{s[0] == 'R', s[1] - '0', s[2] - '0'};
    }
    double w1(const ExcitonBasis& b) const { return b.single(i); }
    double w3(const ExcitonBasis& b) const { return b.single(j); }
};

inline std::vector<Peak> all_peaks(bool rephasing) {
    return {{rephasing, 1, 1}, {rephasing, 1, 2}, {rephasing, 2, 1}, {rephasing, 2, 2}};
}

// Exciton index (1 or 2) whose energy is closest to |Im p| / kappa. For
// f <- e coherences eps_f - eps_i equals the other exciton, as it should.
inline int nearest_exciton(cplx pole, const ExcitonBasis& b) {
    const double f = std::abs(pole.imag()) / units::kappa;
    return std::abs(f - b.eps1) <= std::abs(f - b.eps2) ? 1 : 2;
}

inline ModalResponse terms_of_peak(const ModalResponse& r, const ExcitonBasis& b, int i, int j) {
    ModalResponse out;
    out.rephasing = r.rephasing;
    out.label = r.label;
    for (const auto& t : r.terms)
        if (nearest_exciton(t.p1, b) == i && nearest_exciton(t.p3, b) == j) out.terms.push_back(t);
    return out;
}

// Raw map value at (eps_i, w2, eps_j).
inline double peak_amplitude(const ModalResponse& osc, const ExcitonBasis& b, const Peak& p, double w2,
                             double window = std::numeric_limits<double>::infinity()) {
    return std::abs(beating_amplitude(osc, p.w1(b), w2, p.w3(b), window));
}

// Amplitude of the pathways that belong to the peak, without tails of neighbours.
inline double resolved_peak_amplitude(const ModalResponse& osc, const ExcitonBasis& b, const Peak& p, double w2,
                                      double window = std::numeric_limits<double>::infinity()) {
    return std::abs(beating_amplitude(terms_of_peak(osc, b, p.i, p.j), p.w1(b), w2, p.w3(b), window));
}

inline std::vector<double> peak_trace(const ModalResponse& osc, const ExcitonBasis& b, const Peak& p, const Axis& w2,
                                      bool resolved = false) {
    std::vector<double> out;
    for (double x : w2.values) out.push_back(resolved ? resolved_peak_amplitude(osc, b, p, x) : peak_amplitude(osc, b, p, x));
    return out;
}

namespace detail {
inline double interp_index(const Axis& a, double x, std::size_t& lo) {
    if (x < a.front() || x > a.back()) throw std::out_of_range("coordinate outside axis " + a.name);
    std::size_t hi = 1;
    while (hi < a.size() - 1 && a.values[hi] < x) ++hi;
    lo = hi - 1;
    return (x - a.values[lo]) / (a.values[hi] - a.values[lo]);
}
}  // namespace detail

// Trace over w2 of a stored map at (eps_i, eps_j), bilinear in (w1, w3).
inline std::vector<double> peak_trace(const BeatingMap& map, const ExcitonBasis& b, const Peak& p) {
    std::size_t i0, j0;
    const double fx = detail::interp_index(map.w1(), p.w1(b), i0);
    const double fy = detail::interp_index(map.w3(), p.w3(b), j0);
    std::vector<double> out;
    for (std::size_t q = 0; q < map.w2().size(); ++q)
        out.push_back((1 - fx) * (1 - fy) * map(q, i0, j0) + fx * (1 - fy) * map(q, i0 + 1, j0) +
                      (1 - fx) * fy * map(q, i0, j0 + 1) + fx * fy * map(q, i0 + 1, j0 + 1));
    return out;
}

struct OverlapDiagnostic {
    double r11 = 0.0, a = 0.0, b = 0.0;
    double ratio() const { return r11 / (a + b); }
};

// R11 against the points that mirror R21 and R12 away from it with equal spacing:
// A = (2 eps2 - eps1, eps1), B = (eps1, 2 eps2 - eps1).
inline OverlapDiagnostic overlap_diagnostic(const ModalResponse& osc, const ExcitonBasis& bs, double w2) {
    const double e1 = bs.eps1, far = 2.0 * bs.eps2 - bs.eps1;
    return {std::abs(beating_amplitude(osc, e1, w2, e1)), std::abs(beating_amplitude(osc, far, w2, e1)),
            std::abs(beating_amplitude(osc, e1, w2, far))};
}

// ---------------------------------------------------------------------------
// Line widths

// Full width at half maximum of |f(s)| around s = 0, scanning outwards with
// linear interpolation at the crossing. NaN if a side never drops below half.
inline double fwhm(const std::function<double(double)>& f, double step = 0.25, double span = 1000.0) {
    const double half = 0.5 * f(0.0);
    auto side = [&](double dir) {
        double prev = f(0.0);
        for (double x = step; x <= span; x += step) {
            const double v = f(dir * x);
            if (v <= half) return x - step + step * (prev - half) / (prev - v);
            prev = v;
        }
        return std::numeric_limits<double>::quiet_NaN();
    };
    return side(1.0) + side(-1.0);
}

struct LineWidths {
    double w1 = 0.0, w3 = 0.0, diagonal = 0.0, antidiagonal = 0.0;
    double asymmetry() const { return w1 / w3; }
    double elongation() const { return diagonal / antidiagonal; }
};

// Widths of |F(w1, w3)| through (c1, c3) along w1, w3 and the two diagonals.
inline LineWidths line_widths(const std::function<double(double, double)>& f, double c1, double c3,
                              double step = 0.25) {
    const double r = std::sqrt(0.5);
    LineWidths lw;
    lw.w1 = fwhm([&](double s) { return f(c1 + s, c3); }, step);
    lw.w3 = fwhm([&](double s) { return f(c1, c3 + s); }, step);
    lw.diagonal = fwhm([&](double s) { return f(c1 + r * s, c3 + r * s); }, step);
    lw.antidiagonal = fwhm([&](double s) { return f(c1 + r * s, c3 - r * s); }, step);
    return lw;
}

}  // namespace exciton2des
