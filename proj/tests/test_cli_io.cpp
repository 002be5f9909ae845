#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <sstream>

#include "cascade/cli.hpp"
#include "cascade/config.hpp"
#include "cascade/io.hpp"

using namespace cascade;
namespace fs = std::filesystem;

namespace {

const char* kMinimal = R"(# minimal
[grid]
n = 1
N = 64
D = 32
[noise]
profile = band:1,1,1
[sim]
nu = 0.1
[ensemble]
base_seed = 7
)";

std::vector<std::string> violations_of(const std::string& text, const std::vector<std::string>& ov = {}) {
    try {
        parse_config(text, ov);
    } catch (const ConfigError& e) {
        return e.violations();
    }
    return {};
}

bool mentions(const std::vector<std::string>& v, const std::string& needle) {
    for (const auto& s : v)
        if (s.find(needle) != std::string::npos) return true;
    return false;
}

fs::path fresh_dir(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / "cascade_lab_tests" / name;
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

int run(const std::vector<std::string>& args, std::string* out = nullptr, std::string* err = nullptr) {
    std::ostringstream o, e;
    const int code = run_command(args, o, e);
    if (out) *out = o.str();
    if (err) *err = e.str();
    return code;
}

}  // namespace

TEST_CASE("minimal config gets documented defaults") {
    const RunConfig c = parse_config(kMinimal);
    CHECK(c.n == 1);
    CHECK(c.N == 64);
    CHECK(c.D == 32);
    CHECK(c.nu_grid == std::vector<double>{0.1});
    CHECK(c.base_seed == 7);
    CHECK_FALSE(c.dt.has_value());
    CHECK(c.scheme == Scheme::strang);
    CHECK(c.members == 64);
    CHECK(c.T_slow == 2.0);
    CHECK(c.record_every == 10);
    CHECK(c.nonlinear);
    CHECK(c.shared_slow_path);
    CHECK(c.output_dir == "runs");
    CHECK(c.step(0.1) == 0.01);
}

TEST_CASE("config violations are all reported") {
    CHECK(mentions(violations_of(std::string(kMinimal) + "[grid]\nD = 80\n"), "grid.D"));
    const auto v = violations_of("[grid]\nn = 1\nN = 8\nD = 9\nbogus = 1\n[noise]\nprofile = band:1\n[sim]\nnu = 2\n");
    CHECK(mentions(v, "grid.D must be <= grid.N"));
    CHECK(mentions(v, "grid.bogus"));
    CHECK(mentions(v, "ensemble.base_seed"));
    CHECK(mentions(v, "sim.nu"));
    CHECK(v.size() >= 4);
    CHECK(mentions(violations_of("[grid]\nn = x\n"), "grid.n"));
    CHECK(mentions(violations_of(std::string(kMinimal) + "[sim]\nscheme = rk4\n"), "sim.scheme"));
    CHECK(mentions(violations_of(std::string(kMinimal) + "[noise]\nprofile = power\n"), "noise.profile"));
    CHECK(mentions(violations_of(std::string(kMinimal) + "[experiment]\nobservables = mean(2)\n"), "observables"));
    CHECK(mentions(violations_of(kMinimal, {"grid.D=65"}), "grid.D"));
    CHECK(mentions(violations_of(kMinimal, {"nonsense"}), "override"));
}

TEST_CASE("overrides and round trip") {
    const RunConfig c = parse_config(kMinimal, {"sim.nu_grid=0.4,0.2,0.1", "ensemble.M=8", "sim.scheme=em"});
    CHECK(c.nu_grid == std::vector<double>{0.4, 0.2, 0.1});
    CHECK(c.members == 8);
    CHECK(c.scheme == Scheme::em);
    CHECK(parse_config(emit_config(c)) == c);
    CHECK(emit_config(parse_config(emit_config(c))) == emit_config(c));
}

TEST_CASE("number formatting is shortest round trip") {
    CHECK(format_double(0.1) == "0.1");
    CHECK(format_double(2.0) == "2");
    CHECK(format_double(1e-20) == "1e-20");
    for (double v : {0.1 + 0.2, 1.0 / 3.0, 6.02214076e23, -2.5e-310})
        CHECK(std::strtod(format_double(v).c_str(), nullptr) == v);
    CHECK(format_double(std::nan("")) == "nan");
}

TEST_CASE("stream CSV round trip") {
    DiagnosticsStream s;
    s.stream_id = 3;
    s.nu = 0.25;
    s.sample_dt = 0.1;
    s.norm_orders = {0.0, 1.0, 2.0};
    s.cm_order = 2;
    s.has_shells = true;
    for (int i = 0; i < 4; ++i) {
        DiagnosticsRecord r;
        r.t = 0.1 * i;
        r.tau = 0.25 * r.t;
        r.norms = {1.0 / (i + 1), 2.0 / 3.0, 3.5};
        r.sup = 0.7;
        r.cm = 1.25;
        r.shells = {0.5, 0.25};
        s.records.push_back(r);
    }
    const std::string csv = stream_csv(s);
    CHECK(csv.rfind("t,tau,norm_0,norm_1,norm_2,sup,cm,shell_1,shell_2\n", 0) == 0);
    std::istringstream is(csv);
    DiagnosticsStream back = read_stream_csv(is, 3);
    back.cm_order = 2;
    CHECK(stream_csv(back) == csv);
    CHECK(back.nu == doctest::Approx(0.25));
    std::istringstream bad("t,tau,weird\n0,0,1\n");
    CHECK_THROWS_AS(read_stream_csv(bad, 0), Error);
}

TEST_CASE("scaling CSV, hashing and atomic writes") {
    std::istringstream is("nu,q\n0.4,6.25\n0.2,25\n0.1,100\n");
    const auto pts = read_scaling_csv(is);
    REQUIRE(pts.size() == 3);
    CHECK(pts[2].q == 100.0);
    CHECK(fnv1a_hex("") == "cbf29ce484222325");
    CHECK(fnv1a_hex("a") == "af63dc4c8601ec8c");
    const fs::path dir = fresh_dir("atomic");
    atomic_write(dir / "sub" / "x.txt", "hello");
    CHECK(read_file(dir / "sub" / "x.txt") == "hello");
    CHECK_FALSE(fs::exists(dir / "sub" / "x.txt.tmp"));
    CHECK(schema_json()["schema_version"] == kSchemaVersion);
    const Json line = Json::parse(json_line("fit", Json{{"alpha", 2.0}}));
    CHECK(line["schema_version"] == kSchemaVersion);
    CHECK(line["record"] == "fit");
}

TEST_CASE("cli: fit, usage errors and selftest") {
    const fs::path dir = fresh_dir("cli_fit");
    atomic_write(dir / "q.csv", "nu,q\n0.4,6.25\n0.2,25\n0.1,100\n0.05,400\n");
    std::string out, err;
    CHECK(run({"fit", (dir / "q.csv").string()}, &out) == 0);
    CHECK(out.find("alpha = 2\n") != std::string::npos);
    CHECK(run({"frobnicate"}, &out, &err) == 2);
    CHECK(err.find("Usage") != std::string::npos);
    CHECK(run({}, &out, &err) == 2);
    CHECK(run({"simulate"}, &out, &err) == 2);
    CHECK(run({"simulate", "--config", (dir / "missing.ini").string()}, &out, &err) == 2);
    atomic_write(dir / "bad.ini", "[grid]\nn = 1\nN = 8\nD = 9\n");
    CHECK(run({"simulate", "--config", (dir / "bad.ini").string()}, &out, &err) == 2);
    CHECK(err.find("grid.D must be <= grid.N") != std::string::npos);
    atomic_write(dir / "two.csv", "0.4,1\n0.2,2\n");
    CHECK(run({"fit", (dir / "two.csv").string()}, &out, &err) == 2);
    CHECK(run({"selftest"}, &out) == 0);
    CHECK(out.find("FAIL") == std::string::npos);
    CHECK(run({"--help"}, &out) == 0);
}

TEST_CASE("cli: simulate, occupation and spectrum over a run directory") {
    const fs::path dir = fresh_dir("cli_run");
    atomic_write(dir / "c.ini", std::string(kMinimal) +
                                    "[sim]\nT_slow = 1\n[ensemble]\nM = 4\n[experiment]\nwindow_start = 0\n"
                                    "shells = true\n");
    std::string out, err;
    REQUIRE(run({"simulate", "--config", (dir / "c.ini").string(), "--out", (dir / "runs").string(), "--threads", "1"},
                &out, &err) == 0);
    fs::path runpath;
    for (const auto& e : fs::directory_iterator(dir / "runs")) runpath = e.path();
    CHECK(runpath.filename().string().rfind("run-", 0) == 0);
    const Json manifest = Json::parse(read_file(runpath / "manifest.json"));
    CHECK(manifest["schema_version"] == kSchemaVersion);
    CHECK(manifest["base_seed"] == 7);
    CHECK(manifest["stream_ids"].size() == 4);
    CHECK(fs::exists(runpath / "nu_0" / "member_0003.csv"));
    CHECK(fs::exists(runpath / "report.jsonl"));

    const int occ = run({"occupation", runpath.string()}, &out, &err);
    CHECK((occ == 0 || occ == 1));
    CHECK(fs::exists(runpath / "occupation_nu_0.jsonl"));
    CHECK(run({"spectrum", runpath.string()}, &out, &err) == 0);
    CHECK(out.rfind("k  energy  se\n", 0) == 0);
    CHECK(run({"occupation", (dir / "nowhere").string()}, &out, &err) == 2);
}
