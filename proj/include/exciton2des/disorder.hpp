// disorder.hpp — uncorrelated Gaussian static disorder on the site energies
#pragma once

#include "beating.hpp"
#include "grid.hpp"
#include "parallel.hpp"
#include "response.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace exciton2des {

enum class Sampling { monte_carlo, gauss_hermite };

inline std::string sampling_name(Sampling s) { return s == Sampling::monte_carlo ? "monte-carlo" : "gauss-hermite"; }
inline Sampling parse_sampling(const std::string& s) {
    if (s == "monte-carlo" || s == "mc") return Sampling::monte_carlo;
    if (s == "gauss-hermite" || s == "gh") return Sampling::gauss_hermite;
    throw std::invalid_argument("unknown sampling scheme '" + s + "'");
}

struct DisorderSpec {
    double fwhm = 0.0;  // cm^-1, shared by both sites
    int samples = 500;  // Monte Carlo draws
    std::uint64_t seed = 42;
    Sampling scheme = Sampling::monte_carlo;
    int nodes = 21;  // Gauss-Hermite nodes per site

    double sigma() const { return fwhm / (2.0 * std::sqrt(2.0 * std::numbers::ln2)); }
    void validate() const {
        if (!(fwhm >= 0.0) || !std::isfinite(fwhm)) throw std::invalid_argument("DisorderSpec: FWHM must be >= 0");
        if (samples < 1) throw std::invalid_argument("DisorderSpec: sample count must be >= 1");
        if (nodes < 1) throw std::invalid_argument("DisorderSpec: Gauss-Hermite nodes must be >= 1");
    }
};

struct Realization {
    DimerParams params;
    double weight = 1.0;
};

// Physicists' Gauss-Hermite rule via Golub-Welsch: nodes x_i and weights
// normalized to sum to one, for integrals against exp(-x^2)/sqrt(pi).
inline std::pair<std::vector<double>, std::vector<double>> gauss_hermite(int n) {
    if (n < 1) throw std::invalid_argument("gauss_hermite: n must be >= 1");
    Eigen::MatrixXd j = Eigen::MatrixXd::Zero(n, n);
    for (int k = 1; k < n; ++k) j(k, k - 1) = j(k - 1, k) = std::sqrt(0.5 * k);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(j);
    std::vector<double> x(n), w(n);
    for (int i = 0; i < n; ++i) {
        x[i] = es.eigenvalues()(i);
        w[i] = es.eigenvectors()(0, i) * es.eigenvectors()(0, i);
    }
    return {x, w};
}

// Site energies drawn around mean.omega1 / mean.omega2. Sites keep their labels
// (no reordering), so dipole directions stay attached to the right site.
inline std::vector<Realization> sample_realizations(const DisorderSpec& spec, const DimerParams& mean) {
    spec.validate();
    const double sig = spec.sigma();
    std::vector<Realization> out;
    auto make = [&](double o1, double o2, double w) {
        DimerParams p = mean;
        p.omega1 = o1;
        p.omega2 = o2;
        out.push_back({p, w});
    };
    if (spec.scheme == Sampling::monte_carlo) {
        std::mt19937_64 rng(spec.seed);
        std::normal_distribution<double> g(0.0, 1.0);
        out.reserve(spec.samples);
        for (int n = 0; n < spec.samples; ++n) {
            const double a = g(rng);
            const double b = g(rng);
            make(mean.omega1 + sig * a, mean.omega2 + sig * b, 1.0 / spec.samples);
        }
    } else {
        const auto [x, w] = gauss_hermite(spec.nodes);
        const double scale = std::numbers::sqrt2 * sig;
        for (int i = 0; i < spec.nodes; ++i)
            for (int j = 0; j < spec.nodes; ++j)
                make(mean.omega1 + scale * x[i], mean.omega2 + scale * x[j], w[i] * w[j]);
    }
    return out;
}

// Weighted mean of complex grids. Weights are used as given (they already sum
// to one for sample_realizations).
template <class T>
Grid<T> ensemble_average(const std::vector<Grid<T>>& grids, const std::vector<double>& weights) {
    if (grids.empty()) throw std::invalid_argument("ensemble_average: no realizations");
    if (grids.size() != weights.size()) throw std::invalid_argument("ensemble_average: weight count mismatch");
    Grid<T> out(grids.front().axes);
    for (std::size_t n = 0; n < grids.size(); ++n) {
        if (!grids[n].same_shape(out)) throw std::invalid_argument("ensemble_average: grid mismatch");
        for (std::size_t i = 0; i < out.data.size(); ++i) out.data[i] += weights[n] * grids[n].data[i];
    }
    return out;
}

// Weighted merge of modal responses. A pole expansion is linear in the
// coefficients, so this equals averaging the complex spectra.
inline ModalResponse ensemble_average(const std::vector<ModalResponse>& rs, const std::vector<double>& weights) {
    if (rs.empty()) throw std::invalid_argument("ensemble_average: no realizations");
    if (rs.size() != weights.size()) throw std::invalid_argument("ensemble_average: weight count mismatch");
    ModalResponse out;
    out.rephasing = rs.front().rephasing;
    out.label = rs.front().label + "_avg";
    for (std::size_t n = 0; n < rs.size(); ++n) out.append(rs[n], weights[n]);
    return out;
}

// Per-realization total responses computed in parallel, reduced in realization
// order. The bath (including its shift) is the same for every realization.
inline std::vector<ModalResponse> realization_responses(const std::vector<Realization>& rs, const BathSpec& bath,
                                                        const DipoleConfig& cfg, bool rephasing, bool secular = false,
                                                        unsigned threads = 1) {
    std::vector<ModalResponse> out(rs.size());
    parallel_for(rs.size(), threads, [&](std::size_t n) {
        const auto basis = exciton_basis(rs[n].params);
        const auto gen = build_generator(basis, bath, secular);
        const Propagator prop(gen);
        out[n] = total_response(prop, basis, cfg, rephasing);
    });
    return out;
}

inline std::vector<double> weights_of(const std::vector<Realization>& rs) {
    std::vector<double> w;
    w.reserve(rs.size());
    for (const auto& r : rs) w.push_back(r.weight);
    return w;
}

inline ModalResponse ensemble_response(const std::vector<Realization>& rs, const BathSpec& bath,
                                       const DipoleConfig& cfg, bool rephasing, bool secular = false,
                                       unsigned threads = 1) {
    return ensemble_average(realization_responses(rs, bath, cfg, rephasing, secular, threads), weights_of(rs));
}

// Non-default alternative: average of per-realization beating-map magnitudes.
inline BeatingMap incoherent_beating_map(const std::vector<ModalResponse>& rs, const std::vector<double>& weights,
                                         const Axis& w2, const Axis& w1, const Axis& w3, double splitting,
                                         double cutoff = units::kappa, bool normalize = true, unsigned threads = 1) {
    if (rs.size() != weights.size()) throw std::invalid_argument("incoherent_beating_map: weight count mismatch");
    BeatingMap out;
    out.grid = Grid<double>({w2, w1, w3});
    for (std::size_t n = 0; n < rs.size(); ++n) {
        const auto m = beating_map(oscillatory_component(rs[n], cutoff), w2, w1, w3, splitting, false, threads);
        for (std::size_t i = 0; i < out.grid.data.size(); ++i) out.grid.data[i] += weights[n] * m.grid.data[i];
    }
    for (double v : out.grid.data) out.norm_max = std::max(out.norm_max, v);
    if (normalize && out.norm_max > 0.0) {
        for (double& v : out.grid.data) v /= out.norm_max;
        out.normalized = true;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Slice quadrature for beating maps

// Deterministic ensemble average of the beating map. Site energies are written
// as Omega_1 = <Omega_1> + u + delta, Omega_2 = <Omega_2> + u - delta, with u
// and delta independent, each of width sigma / sqrt(2). A common shift u moves
// all poles rigidly, S_u(w1, w2, w3) = S_0(w1 - u, w2, w3 - u), so generators
// are only needed along delta. With long-lived coherences the t2 kernel is a
// very narrow resonance in delta; each delta cell is integrated with the
// numerator and the t2 denominator both linear in delta (exact logarithm), so
// the result does not depend on resolving that resonance with samples.
struct SliceEnsemble {
    struct Track {
        int signal = 0, k = 0, l = 0, m = 0;
        double sign = 1.0;
        std::vector<cplx> coef, p1, p2, p3;  // one entry per delta edge
    };
    bool rephasing = true;
    std::vector<double> delta;    // cell edges, cm^-1
    std::vector<double> density;  // Gaussian density of delta at each edge
    std::vector<double> u, u_weight;
    std::vector<Track> tracks;

    // Beating amplitude on one w2 slice. The delta integral reduces to fixed
    // per-edge weights, leaving a plain sum over edges and u for each pixel.
    struct Slice {
        bool rephasing = true;
        const SliceEnsemble* owner = nullptr;
        std::vector<std::vector<cplx>> weight;  // [track][edge]

        cplx operator()(double w1, double w3) const {
            const auto& o = *owner;
            const double s1 = rephasing ? 1.0 : -1.0;
            cplx total = 0.0;
            for (std::size_t t = 0; t < o.tracks.size(); ++t) {
                const auto& tr = o.tracks[t];
                const auto& w = weight[t];
                for (std::size_t q = 0; q < o.u.size(); ++q) {
                    const double a1 = s1 * units::kappa * (w1 - o.u[q]);
                    const double a3 = -units::kappa * (w3 - o.u[q]);
                    cplx acc = 0.0;
                    for (std::size_t e = 0; e < w.size(); ++e) {
                        const cplx d = cplx(-tr.p1[e].real(), a1 - tr.p1[e].imag()) *
                                       cplx(-tr.p3[e].real(), a3 - tr.p3[e].imag());
                        acc += w[e] * std::conj(d) / std::norm(d);
                    }
                    total += o.u_weight[q] * acc;
                }
            }
            return total;
        }
    };

    Slice at(double w2) const {
        Slice s;
        s.rephasing = rephasing;
        s.owner = this;
        const std::size_t ne = delta.size();
        std::vector<cplx> den(ne);
        for (const auto& tr : tracks) {
            for (std::size_t e = 0; e < ne; ++e) den[e] = I * units::kappa * w2 - tr.p2[e];
            std::vector<cplx> w(ne, 0.0);
            for (std::size_t e = 0; e + 1 < ne; ++e) {
                const auto [a, b] = cell_weights(den[e], den[e + 1], delta[e + 1] - delta[e]);
                w[e] += a;
                w[e + 1] += b;
            }
            for (std::size_t e = 0; e < ne; ++e) w[e] *= tr.sign * density[e] * tr.coef[e];
            s.weight.push_back(std::move(w));
        }
        return s;
    }

    // Complex beating amplitude at (w1, w2, w3), cm^-1.
    cplx beating(double w1, double w2, double w3) const { return at(w2)(w1, w3); }

    // int_0^h N(t) / D(t) dt = A N(0) + B N(h) for N and D linear on the cell.
    static std::pair<cplx, cplx> cell_weights(cplx da, cplx db, double h) {
        const cplx dd = db - da;
        if (std::abs(dd) < 1e-6 * std::abs(da)) return {h / (da + db), h / (da + db)};
        const cplx r = h / dd, lg = std::log(db / da);
        return {r * (lg * db / dd - 1.0), r * (1.0 - lg * da / dd)};
    }

    // Keeps the tracks whose w1 / w3 poles sit nearest to (eps_i, eps_j) of b.
    SliceEnsemble peak(const ExcitonBasis& b, int i, int j) const {
        SliceEnsemble out = *this;
        out.tracks.clear();
        const std::size_t mid = delta.size() / 2;
        for (const auto& tr : tracks)
            if (nearest_exciton(tr.p1[mid], b) == i && nearest_exciton(tr.p3[mid], b) == j) out.tracks.push_back(tr);
        return out;
    }
};

inline SliceEnsemble slice_ensemble(const DisorderSpec& spec, const DimerParams& mean, const BathSpec& bath,
                                    const DipoleConfig& cfg, bool rephasing, bool secular = false,
                                    double cutoff = units::kappa, double delta_step = 1.0, double u_step = 1.0,
                                    double span = 5.0, unsigned threads = 1) {
    spec.validate();
    if (!(delta_step > 0.0) || !(u_step > 0.0)) throw std::invalid_argument("slice_ensemble: steps must be positive");
    const double s = spec.sigma() / std::numbers::sqrt2;
    SliceEnsemble out;
    out.rephasing = rephasing;
    auto pdf = [&](double x) { return std::exp(-0.5 * x * x / (s * s)) / (s * std::sqrt(2.0 * std::numbers::pi)); };
    if (s == 0.0) {
        out.delta = {-0.5 * delta_step, 0.5 * delta_step};
        out.density = {1.0 / delta_step, 1.0 / delta_step};
        out.u = {0.0};
        out.u_weight = {1.0};
    } else {
        const int nd = static_cast<int>(std::ceil(span * s / delta_step));
        for (int e = -nd; e <= nd; ++e) {
            out.delta.push_back(e * delta_step);
            out.density.push_back(pdf(e * delta_step));
        }
        const int nu = static_cast<int>(std::ceil(span * s / u_step));
        double wsum = 0.0;
        for (int q = -nu; q <= nu; ++q) {
            out.u.push_back(q * u_step);
            out.u_weight.push_back(pdf(q * u_step));
            wsum += out.u_weight.back();
        }
        for (double& w : out.u_weight) w /= wsum;
    }

    std::vector<Signal> signals;
    for (Signal sg : all_signals)
        if (is_rephasing(sg) == rephasing) signals.push_back(sg);
    const std::size_t ne = out.delta.size();
    std::vector<std::vector<ModalResponse>> per(ne);
    parallel_for(ne, threads, [&](std::size_t e) {
        DimerParams p = mean;
        p.omega1 += out.delta[e];
        p.omega2 -= out.delta[e];
        const auto basis = exciton_basis(p);
        const Propagator prop(build_generator(basis, bath, secular));
        for (Signal sg : signals) per[e].push_back(oscillatory_component(modal_response(prop, basis, cfg, sg), cutoff));
    });

    // Tracks are keyed by (signal, k, l, m). A term missing at some edge (an
    // exactly vanishing coefficient) keeps its neighbour's poles with zero weight.
    for (std::size_t si = 0; si < signals.size(); ++si) {
        std::vector<SliceEnsemble::Track> tr;
        auto find = [&](int k, int l, int m) -> SliceEnsemble::Track& {
            for (auto& t : tr)
                if (t.k == k && t.l == l && t.m == m) return t;
            SliceEnsemble::Track t;
            t.signal = static_cast<int>(signals[si]);
            t.k = k;
            t.l = l;
            t.m = m;
            t.sign = signal_sign(signals[si]);
            t.coef.assign(ne, 0.0);
            t.p1.assign(ne, cplx(std::numeric_limits<double>::quiet_NaN()));
            t.p2 = t.p3 = t.p1;
            tr.push_back(t);
            return tr.back();
        };
        for (std::size_t e = 0; e < ne; ++e)
            for (const auto& pt : per[e][si].terms) {
                auto& t = find(pt.k, pt.l, pt.m);
                t.coef[e] = pt.coef;
                t.p1[e] = pt.p1;
                t.p2[e] = pt.p2;
                t.p3[e] = pt.p3;
            }
        for (auto& t : tr) {
            for (std::size_t e = 0; e < ne; ++e) {
                if (!std::isnan(t.p1[e].real())) continue;
                std::size_t nb = e;
                for (std::size_t d = 1; d < ne; ++d) {
                    if (e >= d && !std::isnan(t.p1[e - d].real())) { nb = e - d; break; }
                    if (e + d < ne && !std::isnan(t.p1[e + d].real())) { nb = e + d; break; }
                }
                t.p1[e] = t.p1[nb];
                t.p2[e] = t.p2[nb];
                t.p3[e] = t.p3[nb];
            }
            out.tracks.push_back(std::move(t));
        }
    }
    return out;
}

}  // namespace exciton2des
