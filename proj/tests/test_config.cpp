#include <exciton2des/config.hpp>

#include <gtest/gtest.h>

using namespace exciton2des;

namespace {

const Diagnostic* find(const std::vector<Diagnostic>& d, const std::string& field, const std::string& severity = "error") {
    for (const auto& x : d)
        if (x.field == field && x.severity == severity) return &x;
    return nullptr;
}

}  // namespace

TEST(Config, EmptyFileGivesDefaults) {
    const auto r = parse_config(std::string());
    EXPECT_TRUE(r.ok());
    EXPECT_TRUE(r.diagnostics.empty());
    const RunConfig& c = r.config;
    EXPECT_EQ(c.experiment, "absorption");
    EXPECT_EQ(c.model.omega1, 12500.0);
    EXPECT_EQ(c.model.omega2, 12500.0);
    EXPECT_EQ(c.model.coupling, 100.0);
    EXPECT_EQ(c.bath.lambda, 50.0);
    EXPECT_EQ(c.bath.gamma, 1.0 / 50.0);
    EXPECT_EQ(c.bath.temperature, 77.0);
    EXPECT_EQ(c.bath.xi, 1e-3);
    EXPECT_TRUE(c.shift_auto);
    EXPECT_EQ(c.resolved_bath().shift, 200.0);
    EXPECT_EQ(c.disorder.samples, 500);
    EXPECT_EQ(c.disorder.seed, 42u);
    EXPECT_TRUE(validate(c).empty());
}

TEST(Config, ParsesSectionsCommentsAndWhitespace) {
    const auto r = parse_config(R"(
# heterodimer, correlated bath
[model]
omega1 = 12600   ; site 1
omega2=12400
dipole2 = 0.5, 0.5, 0
[bath]
xi = 1000
shift = 250
[disorder]
fwhm = 100
scheme = gh
[grid]
t2 = 0, 50, 100
transform = discrete
[run]
experiment = figure:7
secular = yes
)");
    ASSERT_TRUE(r.ok()) << r.diagnostics.front().str();
    const auto& c = r.config;
    EXPECT_EQ(c.model.omega1, 12600.0);
    EXPECT_EQ(c.model.omega2, 12400.0);
    EXPECT_EQ(c.dipoles.d2, Eigen::Vector3d(0.5, 0.5, 0.0));
    EXPECT_EQ(c.bath.xi, 1000.0);
    EXPECT_FALSE(c.shift_auto);
    EXPECT_EQ(c.resolved_bath().shift, 250.0);
    EXPECT_EQ(c.disorder.scheme, Sampling::gauss_hermite);
    EXPECT_EQ(c.t2, (std::vector<double>{0.0, 50.0, 100.0}));
    EXPECT_TRUE(c.discrete);
    EXPECT_EQ(c.experiment, "figure:7");
    EXPECT_TRUE(c.secular);
}

TEST(Config, DiagnosticsCarryLineAndField) {
    const auto r = parse_config("[model]\nomega1 = abc\n[nope]\n[bath]\nfoo = 1\nnot a pair\n");
    EXPECT_FALSE(r.ok());
    const auto* bad = find(r.diagnostics, "model.omega1");
    ASSERT_NE(bad, nullptr);
    EXPECT_EQ(bad->line, 2);
    const auto* sec = find(r.diagnostics, "nope");
    ASSERT_NE(sec, nullptr);
    EXPECT_EQ(sec->line, 3);
    const auto* key = find(r.diagnostics, "bath.foo");
    ASSERT_NE(key, nullptr);
    EXPECT_EQ(key->line, 5);
    EXPECT_NE(bad->str().find("line 2"), std::string::npos);
    bool syntax = false;
    for (const auto& d : r.diagnostics) syntax = syntax || (d.line == 6 && d.field.empty());
    EXPECT_TRUE(syntax);
}

TEST(Config, RoundTripIsLossless) {
    RunConfig c;
    c.model = heterodimer();
    c.model.coupling = 87.123456789012345;
    c.bath.xi = 3.0;
    c.bath.gamma = 1.0 / 37.0;
    c.shift_auto = false;
    c.bath.shift = 283.0 + 1.0 / 3.0;
    c.dipoles.d2 = {0.1, -0.7, 1.0 / 7.0};
    c.disorder.fwhm = 50.0;
    c.disorder.seed = 18446744073709551557ull;
    c.disorder.scheme = Sampling::gauss_hermite;
    c.t2 = {0.0, 12.5, 1.0 / 3.0 + 100.0};
    c.window = 750.0;
    c.experiment = "beatmap";
    c.output = "some/dir";
    c.csv = true;
    c.threads = 3;
    const std::string text = serialize(c);
    const auto r = parse_config(text);
    ASSERT_TRUE(r.ok());
    EXPECT_EQ(serialize(r.config), text);
    EXPECT_EQ(r.config.model.coupling, c.model.coupling);
    EXPECT_EQ(r.config.bath.gamma, c.bath.gamma);
    EXPECT_EQ(r.config.dipoles.d2, c.dipoles.d2);
    EXPECT_EQ(r.config.t2, c.t2);
    EXPECT_EQ(r.config.disorder.seed, c.disorder.seed);
    EXPECT_EQ(r.config.w2, c.w2);
    // infinite window survives too
    RunConfig d;
    EXPECT_EQ(parse_config(serialize(d)).config.window, d.window);
}

TEST(Config, ValidationRanges) {
    RunConfig c;
    c.disorder.fwhm = -1.0;
    EXPECT_NE(find(validate(c), "disorder.fwhm"), nullptr);
    c = RunConfig{};
    c.bath.xi = 0.0;
    EXPECT_NE(find(validate(c), "bath.xi"), nullptr);
    c = RunConfig{};
    c.w1.hi = c.w1.lo;
    EXPECT_NE(find(validate(c), "grid.w1_max"), nullptr);
    c = RunConfig{};
    c.t2 = {10.0, 5.0};
    EXPECT_NE(find(validate(c), "grid.t2"), nullptr);
    c = RunConfig{};
    c.experiment = "figure:3";
    EXPECT_NE(find(validate(c), "run.experiment"), nullptr);
    c = RunConfig{};
    c.disorder.fwhm = 10.0;
    c.disorder.samples = 20;
    const auto d = validate(c);
    EXPECT_FALSE(has_errors(d));
    EXPECT_NE(find(d, "disorder.samples", "warning"), nullptr);
}

TEST(Config, NyquistCheck) {
    // J = 100, 4 fs steps, highest exciton 12600 cm^-1: pi/(kappa dt) ~ 4170 cm^-1
    RunConfig c;
    c.time.t1_step = c.time.t3_step = 4.0;
    c.time.carrier = 0.0;
    c.discrete = true;
    EXPECT_NE(find(validate(c), "grid.t1_step"), nullptr);
    c.time.carrier = 12500.0;
    EXPECT_EQ(find(validate(c), "grid.t1_step"), nullptr);
    c.time.carrier = 0.0;
    c.discrete = false;
    const auto d = validate(c);
    EXPECT_FALSE(has_errors(d));
    EXPECT_NE(find(d, "grid.t1_step", "warning"), nullptr);
}

TEST(Config, BeatmapNeedsW2Coverage) {
    RunConfig c;
    c.experiment = "beatmap";
    c.w2 = {-250.0, 250.0, 5.0};
    EXPECT_NE(find(validate(c), "grid.w2_min"), nullptr);
    c.w2 = {-300.0, 300.0, 5.0};
    EXPECT_EQ(find(validate(c), "grid.w2_min"), nullptr);
}

TEST(Config, TableCoversEveryKey) {
    const auto t = config_table(RunConfig{});
    EXPECT_EQ(t.at("bath").at("shift"), "auto");
    EXPECT_EQ(t.at("disorder").at("seed"), "42");
    EXPECT_EQ(t.at("run").at("experiment"), "absorption");
    std::size_t keys = 0;
    for (const auto& [s, kv] : t) keys += kv.size();
    std::size_t lines = 0;
    const auto text = serialize(RunConfig{});
    for (char ch : text) lines += ch == '=';
    EXPECT_EQ(keys, lines);
}

TEST(Config, MissingFileIsDiagnosed) {
    const auto r = load_config("/nonexistent/run.cfg");
    EXPECT_FALSE(r.ok());
}
