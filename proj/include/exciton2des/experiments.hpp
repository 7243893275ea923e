// experiments.hpp — named experiments and figure recipes behind the CLI
#pragma once

#include "beating.hpp"
#include "config.hpp"
#include "disorder.hpp"
#include "gridfile.hpp"
#include "liouville.hpp"
#include "parallel.hpp"
#include "pathways.hpp"
#include "response.hpp"
#include "version.hpp"

#include <json.hpp>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

namespace exciton2des {

struct RunResult {
    std::vector<std::string> files;  // relative to the output directory
    std::vector<std::string> warnings;
    double wall_seconds = 0.0;
    nlohmann::json manifest;
};

namespace detail {

inline std::string tag(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

class Session {
public:
    Session(const RunConfig& c, unsigned threads) : cfg(c), threads(threads), dir(c.output) {
        std::filesystem::create_directories(dir);
    }

    const RunConfig& cfg;
    unsigned threads;
    std::filesystem::path dir;
    RunResult result;

    template <class T>
    void emit(const std::string& name, const Grid<T>& g, std::map<std::string, std::string> attrs = {}) {
        attrs.emplace("source", "exciton2des");
        write_grid((dir / (name + ".grid")).string(), g, attrs);
        result.files.push_back(name + ".grid");
        if (cfg.csv) {
            write_csv((dir / (name + ".csv")).string(), g);
            result.files.push_back(name + ".csv");
        }
    }

    void emit_text(const std::string& name, const std::string& text) {
        std::ofstream os(dir / name);
        if (!os) throw std::runtime_error("cannot write " + (dir / name).string());
        os << text;
        result.files.push_back(name);
    }

    void warn(const std::string& w) { result.warnings.push_back(w); }
};

// Normalizes to max |value| = 1 when requested; returns the pre-normalization max.
template <class T>
double normalize_grid(Grid<T>& g, bool normalize) {
    double top = 0.0;
    for (const auto& v : g.data) top = std::max(top, std::abs(v));
    if (normalize && top > 0.0)
        for (auto& v : g.data) v /= top;
    return top;
}

inline std::map<std::string, std::string> norm_attrs(double top, bool normalized) {
    return {{"norm_max", fmt(top)}, {"normalized", normalized ? "true" : "false"}};
}

struct Model {
    DimerParams params;
    ExcitonBasis basis;
    BathSpec bath;
    LiouvilleGenerator gen;

    Model(const DimerParams& p, const BathSpec& b, bool secular)
        : params(p), basis(exciton_basis(p)), bath(b), gen(build_generator(basis, b, secular)) {}
};

inline BathSpec bath_for(const RunConfig& c, const DimerParams& p, double xi) {
    BathSpec b = c.bath;
    b.xi = xi;
    b.distance = p.distance;
    if (c.shift_auto) b.shift = exciton_basis(p).splitting();
    return b;
}

// Total response of one class, disorder-averaged when a FWHM is set.
inline ModalResponse class_response(const RunConfig& c, const DimerParams& p, const BathSpec& bath,
                                    const DisorderSpec& dis, bool rephasing, unsigned threads) {
    if (dis.fwhm > 0.0)
        return ensemble_response(sample_realizations(dis, p), bath, c.dipoles, rephasing, c.secular, threads);
    const Model m(p, bath, c.secular);
    return total_response(Propagator(m.gen), m.basis, c.dipoles, rephasing);
}

inline std::vector<double> absorption_of(const RunConfig& c, const DimerParams& p, const BathSpec& bath,
                                         const Axis& w) {
    auto one = [&](const DimerParams& q) {
        const Model m(q, bath, c.secular);
        if (!c.discrete) return absorption(m.basis, m.gen, c.dipoles, w);
        return absorption_discrete(linear_response(Propagator(m.gen), m.basis, c.dipoles), c.time.t1_max,
                                   c.time.t1_step, c.time.carrier, w);
    };
    if (c.disorder.fwhm <= 0.0) return one(p);
    std::vector<double> acc(w.size(), 0.0);
    for (const auto& r : sample_realizations(c.disorder, p)) {
        const auto a = one(r.params);
        for (std::size_t i = 0; i < a.size(); ++i) acc[i] += r.weight * a[i];
    }
    return acc;
}

inline Grid<cplx> spectra_of(const RunConfig& c, const ModalResponse& r, const Axis& t2, unsigned threads) {
    const Axis w1 = c.w1.axis("w1", "cm-1"), w3 = c.w3.axis("w3", "cm-1");
    return c.discrete ? spectra_2d_discrete(r, c.time, t2, w1, w3, threads) : spectra_2d(r, t2, w1, w3, threads);
}

inline std::string traces_table(const BeatingMap& reph, const BeatingMap* nonreph, const ExcitonBasis& b) {
    std::ostringstream os;
    os.precision(10);
    os << "w2_cm-1";
    for (const auto& p : all_peaks(true)) os << '\t' << p.name();
    if (nonreph)
        for (const auto& p : all_peaks(false)) os << '\t' << p.name();
    os << '\n';
    std::vector<std::vector<double>> cols;
    for (const auto& p : all_peaks(true)) cols.push_back(peak_trace(reph, b, p));
    if (nonreph)
        for (const auto& p : all_peaks(false)) cols.push_back(peak_trace(*nonreph, b, p));
    for (std::size_t q = 0; q < reph.w2().size(); ++q) {
        os << reph.w2().values[q];
        for (const auto& c : cols) os << '\t' << c[q];
        os << '\n';
    }
    return os.str();
}

// ---------------------------------------------------------------------------

inline void run_absorption(Session& s) {
    const auto& c = s.cfg;
    const Axis w = c.absorption.axis("w", "cm-1");
    Grid<double> g({w});
    g.data = absorption_of(c, c.model, c.resolved_bath(), w);
    const double top = normalize_grid(g, c.normalize);
    s.emit("absorption", g, norm_attrs(top, c.normalize));
}

inline void run_spectra(Session& s, bool rephasing) {
    const auto& c = s.cfg;
    const auto r = class_response(c, c.model, c.resolved_bath(), c.disorder, rephasing, s.threads);
    auto g = spectra_of(c, r, Axis::list("t2", "fs", c.t2), s.threads);
    const double top = normalize_grid(g, c.normalize);
    auto attrs = norm_attrs(top, c.normalize);
    attrs["signal"] = rephasing ? "rephasing" : "nonrephasing";
    s.emit(rephasing ? "rephasing2d" : "nonrephasing2d", g, attrs);
}

inline BeatingMap map_of(Session& s, const DimerParams& p, const BathSpec& bath, const DisorderSpec& dis,
                         bool rephasing) {
    const auto& c = s.cfg;
    const Axis w2 = c.w2.axis("w2", "cm-1"), w1 = c.w1.axis("w1", "cm-1"), w3 = c.w3.axis("w3", "cm-1");
    const double split = exciton_basis(p).splitting();
    std::vector<std::string> warnings;
    BeatingMap m;
    if (dis.fwhm > 0.0 && !c.coherent_average) {
        const auto rs = sample_realizations(dis, p);
        const auto per = realization_responses(rs, bath, c.dipoles, rephasing, c.secular, s.threads);
        m = incoherent_beating_map(per, weights_of(rs), w2, w1, w3, split, c.cutoff_rate(), c.normalize, s.threads);
    } else {
        const auto r = class_response(c, p, bath, dis, rephasing, s.threads);
        m = beating_map(oscillatory_component(r, c.cutoff_rate(), &warnings), w2, w1, w3, split, c.normalize, s.threads,
                        c.window);
    }
    for (const auto& w : warnings) s.warn(w);
    return m;
}

inline void emit_map(Session& s, const std::string& name, const BeatingMap& m) {
    auto attrs = norm_attrs(m.norm_max, m.normalized);
    attrs["display_exponent"] = fmt(m.display_exponent);
    s.emit(name, m.grid, attrs);
}

inline void run_beatmap(Session& s) {
    const auto& c = s.cfg;
    const BathSpec bath = c.resolved_bath();
    const auto reph = map_of(s, c.model, bath, c.disorder, true);
    const auto non = map_of(s, c.model, bath, c.disorder, false);
    emit_map(s, "beatmap_rephasing", reph);
    emit_map(s, "beatmap_nonrephasing", non);
    s.emit_text("peak_traces.tsv", traces_table(reph, &non, exciton_basis(c.model)));
}

inline void run_pathway_report(Session& s) {
    const auto& c = s.cfg;
    if (c.disorder.fwhm > 0.0) s.warn("pathway-report ignores static disorder; mean parameters used");
    const Model m(c.model, c.resolved_bath(), c.secular);
    std::vector<PathwayAmplitude> all;
    Decomposition last;
    for (Family f : {Family::SE_R, Family::SE_NR, Family::ESA_R, Family::ESA_NR}) {
        last = pathway_decomposition(m.basis, m.bath, c.dipoles, f, c.secular, c.cutoff_rate());
        all.insert(all.end(), last.amplitudes.begin(), last.amplitudes.end());
        for (const auto& w : last.warnings) s.warn(w);
    }
    const auto rep = consistency_check(last.x, last.y, m.gen, 1e-9, &last.z);
    const auto entries = feynman_report(all, m.basis);
    s.emit_text("pathways.tsv", format_feynman_table(entries));
    s.emit_text("eigen.tsv", format_eigen_table(last));
    std::ostringstream txt;
    txt << "exciton energies (cm^-1): " << m.basis.eps1 << ", " << m.basis.eps2 << "  theta " << m.basis.theta << "\n";
    txt << "closed-form vs generator (relative): X " << rep.x_error << "  Y " << rep.y_error << "  Z " << rep.z_error
        << "\n\n";
    for (const auto& f : mixing_flags(last.y)) txt << f << "\n";
    txt << "\n" << format_feynman_text(entries);
    s.emit_text("pathways.txt", txt.str());
}

// ---------------------------------------------------------------------------
// Figure recipes

inline const std::vector<double>& figure_xis() {
    static const std::vector<double> v{1e-3, 3.0, 1e3};
    return v;
}

inline void run_figure2(Session& s) {
    const auto& c = s.cfg;
    const DimerParams p = homodimer();
    const Axis wa = c.absorption.axis("w", "cm-1"), w1 = c.w1.axis("w1", "cm-1"), w3 = c.w3.axis("w3", "cm-1");
    const Axis tt = c.transient.axis("t2", "fs");
    const ExcitonBasis b = exciton_basis(p);
    for (double xi : figure_xis()) {
        const std::string base = "fig2_xi" + tag(xi);
        const BathSpec bath = bath_for(c, p, xi);
        Grid<double> abs({wa});
        abs.data = absorption_of(c, p, bath, wa);
        double top = normalize_grid(abs, c.normalize);
        s.emit(base + "_absorption", abs, norm_attrs(top, c.normalize));

        const auto r = class_response(c, p, bath, c.disorder, true, s.threads);
        Grid<cplx> spec({w1, w3});
        const auto full = spectra_2d(r, Axis::list("t2", "fs", {0.0}), w1, w3, s.threads);
        spec.data = full.data;
        top = normalize_grid(spec, c.normalize);
        s.emit(base + "_rephasing_t0", spec, norm_attrs(top, c.normalize));

        Grid<cplx> tr({tt});
        for (std::size_t i = 0; i < tt.size(); ++i) tr.data[i] = r.spectrum(b.eps2, b.eps1, tt.values[i]);
        top = normalize_grid(tr, c.normalize);
        auto attrs = norm_attrs(top, c.normalize);
        attrs["peak"] = "R21";
        s.emit(base + "_R21_transient", tr, attrs);
    }
}

inline void run_figure4(Session& s) {
    const auto& c = s.cfg;
    const DimerParams p = homodimer();
    const ExcitonBasis b = exciton_basis(p);
    for (double xi : figure_xis()) {
        const std::string base = "fig4_xi" + tag(xi);
        const auto m = map_of(s, p, bath_for(c, p, xi), c.disorder, true);
        emit_map(s, base + "_beatmap", m);
        s.emit_text(base + "_traces.tsv", traces_table(m, nullptr, b));
    }
}

inline void run_figure5(Session& s) {
    const auto& c = s.cfg;
    const DimerParams p = homodimer();
    const BathSpec bath = bath_for(c, p, 1e-3);
    const Model m(p, bath, c.secular);
    const auto osc = oscillatory_component(total_response(Propagator(m.gen), m.basis, c.dipoles, true), c.cutoff_rate());
    const auto y = build_Y(m.basis, bath, c.secular, c.cutoff_rate());
    const double w2 = units::wavenumber(y.modes.values(0).imag());
    const Axis w1 = c.w1.axis("w1", "cm-1"), w3 = c.w3.axis("w3", "cm-1");
    auto slice = beating_slice(osc, w2, w1, w3);
    const double top = normalize_grid(slice, true);
    auto attrs = norm_attrs(top, true);
    attrs["w2_cm-1"] = fmt(w2);
    s.emit("fig5_slice", slice, attrs);

    Grid<double> along1({w1}), along3({w3});
    for (std::size_t i = 0; i < w1.size(); ++i)
        along1.data[i] = std::abs(beating_amplitude(osc, w1.values[i], w2, m.basis.eps1)) / top;
    for (std::size_t j = 0; j < w3.size(); ++j)
        along3.data[j] = std::abs(beating_amplitude(osc, m.basis.eps1, w2, w3.values[j])) / top;
    s.emit("fig5_cut_w1", along1, attrs);
    s.emit("fig5_cut_w3", along3, attrs);

    const auto d = overlap_diagnostic(osc, m.basis, w2);
    std::ostringstream os;
    os.precision(10);
    os << "quantity\tvalue\n"
       << "w2_cm-1\t" << w2 << "\nR11\t" << d.r11 / top << "\nA\t" << d.a / top << "\nB\t" << d.b / top
       << "\nR11_over_A_plus_B\t" << d.ratio() << '\n';
    s.emit_text("fig5_overlap.tsv", os.str());
}

inline void run_figure6(Session& s) {
    const auto& c = s.cfg;
    const Axis w1 = c.w1.axis("w1", "cm-1"), w3 = c.w3.axis("w3", "cm-1");
    for (const auto& [name, p] : {std::pair{std::string("hetero"), heterodimer()}, std::pair{std::string("homo"), homodimer()}})
        for (double xi : {1e-3, 1e3}) {
            const BathSpec bath = bath_for(c, p, xi);
            const double split = exciton_basis(p).splitting();
            for (bool reph : {true, false}) {
                const auto osc = oscillatory_component(class_response(c, p, bath, c.disorder, reph, s.threads),
                                                       c.cutoff_rate());
                for (double sign : {-1.0, 1.0}) {
                    auto g = beating_slice(osc, sign * split, w1, w3, c.window);
                    const double top = normalize_grid(g, c.normalize);
                    auto attrs = norm_attrs(top, c.normalize);
                    attrs["w2_cm-1"] = fmt(sign * split);
                    s.emit("fig6_" + name + "_xi" + tag(xi) + (reph ? "_rephasing" : "_nonrephasing") +
                               (sign > 0 ? "_w2pos" : "_w2neg"),
                           g, attrs);
                }
            }
        }
}

inline void run_figure7(Session& s) {
    const auto& c = s.cfg;
    const DimerParams p = heterodimer();
    const ExcitonBasis b = exciton_basis(p);
    const Axis w1 = c.w1.axis("w1", "cm-1"), w3 = c.w3.axis("w3", "cm-1");
    std::ostringstream metrics;
    metrics.precision(8);
    metrics << "fwhm\txi\tsignal\tpeak\tw2\tdiag_fwhm\tanti_fwhm\telongation\n";
    for (const auto& [fwhm, xi] : {std::pair{50.0, 1e-3}, std::pair{100.0, 1e-3}, std::pair{100.0, 1e3}}) {
        DisorderSpec dis = c.disorder;
        dis.fwhm = fwhm;
        BathSpec bath = bath_for(c, p, xi);  // shift fixed at the mean splitting
        for (bool reph : {true, false}) {
            const double w2 = reph ? b.splitting() : -b.splitting();
            const auto osc = oscillatory_component(class_response(c, p, bath, dis, reph, s.threads), c.cutoff_rate());
            auto g = beating_slice(osc, w2, w1, w3, c.window);
            const double top = normalize_grid(g, c.normalize);
            auto attrs = norm_attrs(top, c.normalize);
            attrs["w2_cm-1"] = fmt(w2);
            attrs["fwhm_cm-1"] = fmt(fwhm);
            const std::string name = "fig7_fwhm" + tag(fwhm) + "_xi" + tag(xi) + (reph ? "_rephasing" : "_nonrephasing");
            s.emit(name, g, attrs);
            const Peak pk{reph, 2, reph ? 1 : 2};
            const auto lw = line_widths([&](double x, double y) { return std::abs(beating_amplitude(osc, x, w2, y, c.window)); },
                                        pk.w1(b), pk.w3(b), 0.5);
            metrics << fwhm << '\t' << xi << '\t' << (reph ? "rephasing" : "nonrephasing") << '\t' << pk.name() << '\t'
                    << w2 << '\t' << lw.diagonal << '\t' << lw.antidiagonal << '\t' << lw.elongation() << '\n';
        }
    }
    s.emit_text("fig7_metrics.tsv", metrics.str());
}

inline nlohmann::json manifest_json(const RunConfig& c, const RunResult& r, unsigned threads) {
    nlohmann::json j;
    j["program"] = "exciton2des";
    j["version"] = version;
    j["experiment"] = c.experiment;
    j["config"] = config_table(c);
    const auto b = exciton_basis(c.model);
    const auto bath = c.resolved_bath();
    j["resolved"] = {{"bath_shift_cm-1", bath.shift},
                     {"kT_cm-1", bath.kT()},
                     {"correlation", bath.correlation()},
                     {"eps1_cm-1", b.eps1},
                     {"eps2_cm-1", b.eps2},
                     {"theta", b.theta},
                     {"disorder_sigma_cm-1", c.disorder.sigma()},
                     {"threads", threads}};
    j["files"] = r.files;
    j["warnings"] = r.warnings;
    j["wall_time_s"] = r.wall_seconds;
    return j;
}

}  // namespace detail

// Validates, runs the selected experiment into cfg.output and writes manifest.json.
// Invalid configurations throw config_error; numeric failures propagate.
inline RunResult run(const RunConfig& cfg) {
    const auto diags = validate(cfg);
    if (has_errors(diags)) throw config_error(diags);
    const auto t0 = std::chrono::steady_clock::now();
    const unsigned threads = resolve_threads(cfg.threads);
    detail::Session s(cfg, threads);
    for (const auto& d : diags) s.warn(d.str());

    const std::string& e = cfg.experiment;
    if (e == "absorption") detail::run_absorption(s);
    else if (e == "rephasing2d") detail::run_spectra(s, true);
    else if (e == "nonrephasing2d") detail::run_spectra(s, false);
    else if (e == "beatmap") detail::run_beatmap(s);
    else if (e == "pathway-report") detail::run_pathway_report(s);
    else if (e == "figure:2") detail::run_figure2(s);
    else if (e == "figure:4") detail::run_figure4(s);
    else if (e == "figure:5") detail::run_figure5(s);
    else if (e == "figure:6") detail::run_figure6(s);
    else if (e == "figure:7") detail::run_figure7(s);

    s.result.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    s.result.manifest = detail::manifest_json(cfg, s.result, threads);
    std::ofstream os(s.dir / "manifest.json");
    os << s.result.manifest.dump(2) << '\n';
    if (!os) throw std::runtime_error("cannot write manifest.json");
    return s.result;
}

}  // namespace exciton2des
