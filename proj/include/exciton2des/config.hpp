// config.hpp — flat sectioned key/value run configuration
#pragma once

#include "bath.hpp"
#include "disorder.hpp"
#include "grid.hpp"
#include "model.hpp"
#include "response.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace exciton2des {

struct Diagnostic {
    std::string severity;  // "error" or "warning"
    std::string field;     // section.key, empty for syntax errors
    int line = 0;          // 0 when not tied to a line
    std::string message;

    std::string str() const {
        std::ostringstream os;
        os << severity;
        if (line > 0) os << " line " << line;
        if (!field.empty()) os << " [" << field << "]";
        os << ": " << message;
        return os.str();
    }
};

inline bool has_errors(const std::vector<Diagnostic>& d) {
    for (const auto& x : d)
        if (x.severity == "error") return true;
    return false;
}

class config_error : public std::runtime_error {
public:
    explicit config_error(std::vector<Diagnostic> d) : std::runtime_error(join(d)), diagnostics(std::move(d)) {}
    std::vector<Diagnostic> diagnostics;

private:
    static std::string join(const std::vector<Diagnostic>& d) {
        std::string s;
        for (const auto& x : d) s += x.str() + "\n";
        return s;
    }
};

struct Range {
    double lo = 0.0, hi = 0.0, step = 1.0;
    Axis axis(const std::string& name, const std::string& unit) const { return Axis::linspace(name, unit, lo, hi, step); }
    bool operator==(const Range&) const = default;
};

inline const std::vector<std::string>& experiment_names() {
    static const std::vector<std::string> n{"absorption", "rephasing2d", "nonrephasing2d", "beatmap", "pathway-report",
                                            "figure:2",   "figure:4",    "figure:5",       "figure:6", "figure:7"};
    return n;
}

// Defaults are the homodimer parameter set with local baths.
struct RunConfig {
    DimerParams model = homodimer();
    DipoleConfig dipoles;
    BathSpec bath;
    bool shift_auto = true;  // bath shift follows the exciton splitting
    DisorderSpec disorder;
    bool coherent_average = true;

    Range w1{12100.0, 12900.0, 5.0};
    Range w3{12100.0, 12900.0, 5.0};
    Range w2{-450.0, 450.0, 5.0};
    std::vector<double> t2{0.0};
    Range transient{0.0, 1000.0, 5.0};
    Range absorption{12000.0, 13000.0, 1.0};
    TimeGrid time;
    bool discrete = false;  // time-domain transform instead of the pole form
    double window = std::numeric_limits<double>::infinity();

    std::string experiment = "absorption";
    std::string output = "out";
    bool secular = false;
    double cutoff = 1.0;  // cm^-1
    bool normalize = true;
    bool csv = false;
    int threads = 0;

    BathSpec resolved_bath() const {
        BathSpec b = bath;
        b.distance = model.distance;
        if (shift_auto) b.shift = exciton_basis(model).splitting();
        return b;
    }
    double cutoff_rate() const { return units::angular_frequency(cutoff); }
};

namespace detail {

inline std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

inline std::string fmt(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline double parse_double(const std::string& s) {
    if (s == "inf") return std::numeric_limits<double>::infinity();
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument("trailing characters");
    return v;
}

inline bool parse_bool(const std::string& s) {
    if (s == "true" || s == "yes" || s == "on" || s == "1") return true;
    if (s == "false" || s == "no" || s == "off" || s == "0") return false;
    throw std::invalid_argument("expected true/false");
}

inline std::vector<double> parse_list(const std::string& s) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(parse_double(trim(item)));
    if (out.empty()) throw std::invalid_argument("empty list");
    return out;
}

inline std::string fmt_list(const std::vector<double>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + fmt(v[i]);
    return s;
}

inline std::string fmt_vec(const Eigen::Vector3d& v) { return fmt_list({v.x(), v.y(), v.z()}); }

struct Field {
    std::function<void(RunConfig&, const std::string&)> set;
    std::function<std::string(const RunConfig&)> get;
};

inline Field num(double RunConfig::*m) {
    return {[m](RunConfig& c, const std::string& v) { c.*m = parse_double(v); },
            [m](const RunConfig& c) { return fmt(c.*m); }};
}
template <class S>
Field num(S RunConfig::*s, double S::*m) {
    return {[s, m](RunConfig& c, const std::string& v) { (c.*s).*m = parse_double(v); },
            [s, m](const RunConfig& c) { return fmt((c.*s).*m); }};
}
inline Field flag(bool RunConfig::*m) {
    return {[m](RunConfig& c, const std::string& v) { c.*m = parse_bool(v); },
            [m](const RunConfig& c) { return std::string(c.*m ? "true" : "false"); }};
}

// section -> key -> accessor, in serialization order
inline const std::vector<std::pair<std::string, std::vector<std::pair<std::string, Field>>>>& schema() {
    using RC = RunConfig;
    auto range = [](Range RC::*r) -> std::vector<std::pair<std::string, Field>> {
        return {{"min", num(r, &Range::lo)}, {"max", num(r, &Range::hi)}, {"step", num(r, &Range::step)}};
    };
    auto prefixed = [&](const std::string& p, Range RC::*r) {
        auto v = range(r);
        for (auto& kv : v) kv.first = p + "_" + kv.first;
        return v;
    };
    static const auto s = [&] {
        std::vector<std::pair<std::string, std::vector<std::pair<std::string, Field>>>> out;
        out.push_back({"model",
                       {{"omega1", num(&RC::model, &DimerParams::omega1)},
                        {"omega2", num(&RC::model, &DimerParams::omega2)},
                        {"coupling", num(&RC::model, &DimerParams::coupling)},
                        {"distance", num(&RC::model, &DimerParams::distance)},
                        {"dipole", num(&RC::dipoles, &DipoleConfig::magnitude)},
                        {"dipole1",
                         {[](RC& c, const std::string& v) {
                              const auto l = parse_list(v);
                              if (l.size() != 3) throw std::invalid_argument("expected 3 components");
                              c.dipoles.d1 = {l[0], l[1], l[2]};
                          },
                          [](const RC& c) { return fmt_vec(c.dipoles.d1); }}},
                        {"dipole2",
                         {[](RC& c, const std::string& v) {
                              const auto l = parse_list(v);
                              if (l.size() != 3) throw std::invalid_argument("expected 3 components");
                              c.dipoles.d2 = {l[0], l[1], l[2]};
                          },
                          [](const RC& c) { return fmt_vec(c.dipoles.d2); }}}}});
        out.push_back({"bath",
                       {{"lambda", num(&RC::bath, &BathSpec::lambda)},
                        {"gamma", num(&RC::bath, &BathSpec::gamma)},
                        {"shift",
                         {[](RC& c, const std::string& v) {
                              if (v == "auto") {
                                  c.shift_auto = true;
                              } else {
                                  c.shift_auto = false;
                                  c.bath.shift = parse_double(v);
                              }
                          },
                          [](const RC& c) { return c.shift_auto ? std::string("auto") : fmt(c.bath.shift); }}},
                        {"temperature", num(&RC::bath, &BathSpec::temperature)},
                        {"xi", num(&RC::bath, &BathSpec::xi)}}});
        out.push_back({"disorder",
                       {{"fwhm", num(&RC::disorder, &DisorderSpec::fwhm)},
                        {"samples",
                         {[](RC& c, const std::string& v) { c.disorder.samples = std::stoi(v); },
                          [](const RC& c) { return std::to_string(c.disorder.samples); }}},
                        {"seed",
                         {[](RC& c, const std::string& v) { c.disorder.seed = std::stoull(v); },
                          [](const RC& c) { return std::to_string(c.disorder.seed); }}},
                        {"scheme",
                         {[](RC& c, const std::string& v) { c.disorder.scheme = parse_sampling(v); },
                          [](const RC& c) { return sampling_name(c.disorder.scheme); }}},
                        {"nodes",
                         {[](RC& c, const std::string& v) { c.disorder.nodes = std::stoi(v); },
                          [](const RC& c) { return std::to_string(c.disorder.nodes); }}},
                        {"coherent", flag(&RC::coherent_average)}}});
        std::vector<std::pair<std::string, Field>> grid;
        for (auto& kv : prefixed("w1", &RC::w1)) grid.push_back(kv);
        for (auto& kv : prefixed("w3", &RC::w3)) grid.push_back(kv);
        for (auto& kv : prefixed("w2", &RC::w2)) grid.push_back(kv);
        grid.push_back({"t2",
                        {[](RC& c, const std::string& v) { c.t2 = parse_list(v); },
                         [](const RC& c) { return fmt_list(c.t2); }}});
        for (auto& kv : prefixed("transient", &RC::transient)) grid.push_back(kv);
        for (auto& kv : prefixed("absorption", &RC::absorption)) grid.push_back(kv);
        grid.push_back({"t1_max", num(&RC::time, &TimeGrid::t1_max)});
        grid.push_back({"t1_step", num(&RC::time, &TimeGrid::t1_step)});
        grid.push_back({"t3_max", num(&RC::time, &TimeGrid::t3_max)});
        grid.push_back({"t3_step", num(&RC::time, &TimeGrid::t3_step)});
        grid.push_back({"carrier", num(&RC::time, &TimeGrid::carrier)});
        grid.push_back({"transform",
                        {[](RC& c, const std::string& v) {
                             if (v == "analytic") c.discrete = false;
                             else if (v == "discrete") c.discrete = true;
                             else throw std::invalid_argument("expected analytic or discrete");
                         },
                         [](const RC& c) { return std::string(c.discrete ? "discrete" : "analytic"); }}});
        grid.push_back({"window", num(&RC::window)});
        out.push_back({"grid", grid});
        out.push_back({"run",
                       {{"experiment",
                         {[](RC& c, const std::string& v) { c.experiment = v; },
                          [](const RC& c) { return c.experiment; }}},
                        {"output", {[](RC& c, const std::string& v) { c.output = v; }, [](const RC& c) { return c.output; }}},
                        {"secular", flag(&RC::secular)},
                        {"cutoff", num(&RC::cutoff)},
                        {"normalize", flag(&RC::normalize)},
                        {"csv", flag(&RC::csv)},
                        {"threads",
                         {[](RC& c, const std::string& v) { c.threads = std::stoi(v); },
                          [](const RC& c) { return std::to_string(c.threads); }}}}});
        return out;
    }();
    return s;
}

}  // namespace detail

struct ParseResult {
    RunConfig config;
    std::vector<Diagnostic> diagnostics;
    bool ok() const { return !has_errors(diagnostics); }
};

// Syntax: "[section]" headers, "key = value" lines, '#' or ';' comments.
inline ParseResult parse_config(std::istream& in) {
    ParseResult r;
    std::string section, raw;
    int line = 0;
    for (; std::getline(in, raw); ++line) {
        const int ln = line + 1;
        std::string s = raw;
        if (const auto c = s.find_first_of("#;"); c != std::string::npos) s.erase(c);
        s = detail::trim(s);
        if (s.empty()) continue;
        if (s.front() == '[') {
            if (s.back() != ']') {
                r.diagnostics.push_back({"error", "", ln, "unterminated section header"});
                continue;
            }
            section = detail::trim(s.substr(1, s.size() - 2));
            bool known = false;
            for (const auto& sec : detail::schema()) known = known || sec.first == section;
            if (!known) r.diagnostics.push_back({"error", section, ln, "unknown section"});
            continue;
        }
        const auto eq = s.find('=');
        if (eq == std::string::npos) {
            r.diagnostics.push_back({"error", "", ln, "expected key = value"});
            continue;
        }
        const std::string key = detail::trim(s.substr(0, eq)), value = detail::trim(s.substr(eq + 1));
        const std::string field = section + "." + key;
        const detail::Field* f = nullptr;
        for (const auto& sec : detail::schema())
            if (sec.first == section)
                for (const auto& kv : sec.second)
                    if (kv.first == key) f = &kv.second;
        if (!f) {
            r.diagnostics.push_back({"error", field, ln, section.empty() ? "key outside any section" : "unknown key"});
            continue;
        }
        try {
            f->set(r.config, value);
        } catch (const std::exception& e) {
            r.diagnostics.push_back({"error", field, ln, "invalid value '" + value + "' (" + e.what() + ")"});
        }
    }
    return r;
}

inline ParseResult parse_config(const std::string& text) {
    std::istringstream in(text);
    return parse_config(in);
}

inline ParseResult load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        ParseResult r;
        r.diagnostics.push_back({"error", "", 0, "cannot open config file " + path});
        return r;
    }
    return parse_config(in);
}

inline std::string serialize(const RunConfig& c) {
    std::ostringstream os;
    bool first = true;
    for (const auto& sec : detail::schema()) {
        os << (first ? "" : "\n") << '[' << sec.first << "]\n";
        first = false;
        for (const auto& kv : sec.second) os << kv.first << " = " << kv.second.get(c) << '\n';
    }
    return os.str();
}

// section -> key -> value text, for the manifest.
inline std::map<std::string, std::map<std::string, std::string>> config_table(const RunConfig& c) {
    std::map<std::string, std::map<std::string, std::string>> t;
    for (const auto& sec : detail::schema())
        for (const auto& kv : sec.second) t[sec.first][kv.first] = kv.second.get(c);
    return t;
}

// ---------------------------------------------------------------------------
// Validation

inline std::vector<Diagnostic> validate(const RunConfig& c) {
    std::vector<Diagnostic> d;
    auto err = [&](const std::string& f, const std::string& m) { d.push_back({"error", f, 0, m}); };
    auto warn = [&](const std::string& f, const std::string& m) { d.push_back({"warning", f, 0, m}); };
    auto finite = [&](const std::string& f, double v) {
        if (!std::isfinite(v)) err(f, "must be finite");
        return std::isfinite(v);
    };

    finite("model.omega1", c.model.omega1);
    finite("model.omega2", c.model.omega2);
    finite("model.coupling", c.model.coupling);
    if (!(c.model.distance > 0.0)) err("model.distance", "must be > 0");
    if (!(c.dipoles.magnitude > 0.0)) err("model.dipole", "must be > 0");
    if (c.dipoles.d1.norm() == 0.0) err("model.dipole1", "zero vector");
    if (c.dipoles.d2.norm() == 0.0) err("model.dipole2", "zero vector");

    if (!(c.bath.lambda >= 0.0)) err("bath.lambda", "must be >= 0");
    if (!(c.bath.gamma > 0.0)) err("bath.gamma", "must be > 0");
    if (!(c.bath.temperature > 0.0)) err("bath.temperature", "must be > 0");
    if (!(c.bath.xi > 0.0)) err("bath.xi", "must be > 0 (d/xi)");
    if (!c.shift_auto && !(c.bath.shift >= 0.0)) err("bath.shift", "must be >= 0 or auto");

    if (!(c.disorder.fwhm >= 0.0)) err("disorder.fwhm", "must be >= 0");
    if (c.disorder.samples < 1) err("disorder.samples", "must be >= 1");
    if (c.disorder.nodes < 1) err("disorder.nodes", "must be >= 1");
    if (c.disorder.fwhm > 0.0 && c.disorder.scheme == Sampling::monte_carlo && c.disorder.samples < 100)
        warn("disorder.samples", "fewer than 100 Monte Carlo samples");

    auto check_range = [&](const std::string& name, const Range& r) {
        if (!std::isfinite(r.lo) || !std::isfinite(r.hi) || !std::isfinite(r.step)) {
            err("grid." + name, "range must be finite");
            return;
        }
        if (!(r.step > 0.0)) err("grid." + name + "_step", "must be > 0");
        if (!(r.hi > r.lo)) err("grid." + name + "_max", "must exceed " + name + "_min");
    };
    check_range("w1", c.w1);
    check_range("w3", c.w3);
    check_range("w2", c.w2);
    check_range("transient", c.transient);
    check_range("absorption", c.absorption);
    for (double t : c.t2)
        if (!(t >= 0.0) || !std::isfinite(t)) err("grid.t2", "waiting times must be finite and >= 0");
    for (std::size_t i = 1; i < c.t2.size(); ++i)
        if (!(c.t2[i] > c.t2[i - 1])) err("grid.t2", "waiting times must be strictly increasing");
    if (c.transient.lo < 0.0) err("grid.transient_min", "must be >= 0");
    if (!(c.window > 0.0)) err("grid.window", "must be > 0 or inf");
    if (!(c.time.t1_step > 0.0) || !(c.time.t3_step > 0.0)) err("grid.t1_step", "time steps must be > 0");
    if (!(c.time.t1_max > 0.0) || !(c.time.t3_max > 0.0)) err("grid.t1_max", "time ranges must be > 0");

    if (!(c.cutoff > 0.0)) err("run.cutoff", "must be > 0");
    if (c.threads < 0) err("run.threads", "must be >= 0");
    bool known = false;
    for (const auto& e : experiment_names()) known = known || e == c.experiment;
    if (!known) err("run.experiment", "unknown experiment '" + c.experiment + "'");
    if (has_errors(d)) return d;

    // Nyquist: every optical frequency relative to the carrier must be resolvable.
    const auto b = exciton_basis(c.model);
    double far = 0.0;
    for (double e : {b.eps1, b.eps2}) far = std::max(far, std::abs(e - c.time.carrier));
    far = std::max({far, std::abs(c.w1.lo - c.time.carrier), std::abs(c.w1.hi - c.time.carrier),
                    std::abs(c.w3.lo - c.time.carrier), std::abs(c.w3.hi - c.time.carrier)});
    const double step = std::max(c.time.t1_step, c.time.t3_step);
    const double limit = nyquist_limit(step);
    if (far > limit) {
        const std::string m = "Nyquist violation: |frequency - carrier| up to " + detail::fmt(far) +
                              " cm^-1 exceeds pi/(kappa dt) = " + detail::fmt(limit) + " cm^-1";
        if (c.discrete) err("grid.t1_step", m);
        else warn("grid.t1_step", m + " (only matters for transform = discrete)");
    }
    if (c.experiment == "beatmap") {
        const double need = 1.5 * b.splitting();
        if (c.w2.lo > -need || c.w2.hi < need)
            err("grid.w2_min", "w2 axis must cover +-" + detail::fmt(need) + " cm^-1 (1.5 x splitting)");
    }
    return d;
}

}  // namespace exciton2des
