#include "doctest.h"

#include <string>
#include <vector>

#include "json.hpp"

#include "wattline/sample_log.hpp"
#include "wattline/subprocess.hpp"

#include "test_util.hpp"

using namespace wattline;
using nlohmann::json;
using testutil::TempDir;

namespace {

const std::string kBin = WATTLINE_BIN;

struct CliResult {
    std::string out;
    int exit_code = 0;
};

CliResult run_cli(std::vector<std::string> args) {
    args.insert(args.begin(), kBin);
    CaptureResult r = run_capture(args, 30'000);
    REQUIRE_FALSE(r.timed_out);
    REQUIRE(r.term_signal == 0);
    return {r.out, r.exit_code};
}

CliResult run_sh(const std::string& script) {
    CaptureResult r = run_capture({"sh", "-c", script}, 30'000);
    REQUIRE_FALSE(r.timed_out);
    return {r.out, r.exit_code};
}

const std::string kPlatformDoc = R"({"name": "4-core cpu", "p_peak_w": 140.0})";

const std::string kSpRecords =
    "kernel,config,precision,W_flop,Q_byte,t_s,E_j\n"
    "probe,mt+simd+fma,sp,446.4e9,0,1,80\n"
    "probe,mt+simd,sp,285.1e9,0,1,75\n"
    "probe,mt,sp,147.8e9,0,1,60\n"
    "probe,base,sp,24.6e9,0,1,30\n";

const std::string kGpuPlatformDoc = R"({"name": "gpu", "p_peak_w": 222.0})";

const std::string kGpuDpRecords =
    "kernel,config,precision,W_flop,Q_byte,t_s,E_j\n"
    "probe,fma,dp,139.2e9,0,1,100\n"
    "probe,no-fma,dp,70.2e9,0,1,90\n";

// Energy per flop 1.72 / 1.11 nJ at 102 / 107 W, as one-second runs.
const std::string kGemmRecords =
    "kernel,config,precision,W_flop,Q_byte,t_s,E_j\n"
    "gemm,base,dp,59302325581.39535,0,1,102\n"
    "gemm,fma,dp,96396396396.39639,0,1,107\n";

} // namespace

TEST_CASE("cli help and usage errors") {
    CHECK(run_cli({"--help"}).exit_code == 0);
    CHECK(run_cli({"--help"}).out.find("sample") != std::string::npos);
    CHECK(run_cli({}).exit_code == 64);
    CHECK(run_cli({"frobnicate"}).exit_code == 64);
    CHECK(run_cli({"sample"}).exit_code == 64);          // missing required flags
    CHECK(run_cli({"model"}).exit_code == 64);           // missing build
    CHECK(run_cli({"integrate", "--nope", "x"}).exit_code == 64);
}

TEST_CASE("cli maps error classes to exit codes") {
    TempDir dir;
    CHECK(run_cli({"sample", "--source", "szintetic:constant:1", "--out",
                   dir.file("x.csv"), "--virtual-ms", "10"})
              .exit_code == 3);

    testutil::write_file(dir.file("garbage.csv"), "# not a log\n");
    CHECK(run_cli({"integrate", "--log", dir.file("garbage.csv")}).exit_code == 3);

    CHECK(run_cli({"sample", "--source", "rapl:/definitely/not/there", "--out",
                   dir.file("x.csv"), "--virtual-ms", "10"})
              .exit_code == 2);

    CHECK(run_cli({"analyze", "--records", dir.file("absent.csv"), "--fit"})
              .exit_code != 0);
    CHECK(run_cli({"analyze", "--records", dir.file("absent.csv")}).exit_code == 64);
}

TEST_CASE("cli error text is plain when not a tty") {
    TempDir dir;
    CliResult r = run_sh(kBin + " integrate --log " + dir.file("absent.csv") +
                         " 2>&1");
    CHECK(r.exit_code != 0);
    CHECK(r.out.find("error") != std::string::npos);
    CHECK(r.out.find('\x1b') == std::string::npos);
}

TEST_CASE("sample propagates the child outcome") {
    TempDir dir;
    CHECK(run_cli({"sample", "--source", "synthetic:constant:1000", "--out",
                   dir.file("a.csv"), "--", "sh", "-c", "exit 7"})
              .exit_code == 7);
    CHECK(run_cli({"sample", "--source", "synthetic:constant:1000", "--out",
                   dir.file("b.csv"), "--", "sh", "-c", "kill -TERM $$"})
              .exit_code == 128 + 15);

    CliResult missing = run_cli({"sample", "--source", "synthetic:constant:1000",
                                 "--out", dir.file("c.csv"), "--",
                                 "definitely-not-a-binary-qq"});
    CHECK(missing.exit_code == 127);
    // The log is still closed off and parseable.
    ParsedLog log = parse_log(dir.file("c.csv"));
    CHECK(log.regions.size() == 1);
}

TEST_CASE("sample without a child needs virtual mode") {
    TempDir dir;
    CHECK(run_cli({"sample", "--source", "synthetic:constant:1000", "--out",
                   dir.file("x.csv")})
              .exit_code == 64);
}

TEST_CASE("virtual trace runs are byte-identical") {
    TempDir dir;
    testutil::write_file(dir.file("t.csv"), "0,40000\n50000,60000\n");
    auto run = [&](const std::string& name) {
        return run_cli({"sample", "--source", "trace:" + dir.file("t.csv"), "--out",
                        dir.file(name), "--virtual-ms", "100", "--json"});
    };
    CliResult a = run("a.csv");
    CliResult b = run("b.csv");
    REQUIRE(a.exit_code == 0);
    REQUIRE(b.exit_code == 0);
    CHECK(testutil::read_file(dir.file("a.csv")) ==
          testutil::read_file(dir.file("b.csv")));

    json j = json::parse(a.out);
    CHECK(j["sample_count"] == 50);
    CHECK(j["region_count"] == 1);
    CHECK(j["region"] == "virtual");
    CHECK(j["truncated"] == false);
    CHECK(j["source_ended"] == false);
}

TEST_CASE("sample then integrate pipeline") {
    TempDir dir;
    CliResult s = run_cli({"sample", "--source", "synthetic:constant:50000", "--out",
                           dir.file("log.csv"), "--virtual-ms", "100",
                           "--region-name", "work"});
    REQUIRE(s.exit_code == 0);

    CliResult one = run_cli({"integrate", "--log", dir.file("log.csv"), "--region",
                             "work", "--json"});
    REQUIRE(one.exit_code == 0);
    json rep = json::parse(one.out);
    CHECK(rep["name"] == "work");
    CHECK(rep["duration_s"].get<double>() == doctest::Approx(0.1).epsilon(1e-9));
    CHECK(rep["energy_j"].get<double>() == doctest::Approx(5.0).epsilon(1e-9));
    CHECK(rep["avg_power_w"].get<double>() == doctest::Approx(50.0).epsilon(1e-9));

    CliResult all = run_cli({"integrate", "--log", dir.file("log.csv"), "--json"});
    REQUIRE(all.exit_code == 0);
    json arr = json::parse(all.out);
    REQUIRE(arr.is_array());
    REQUIRE(arr.size() == 1);
    CHECK(arr[0]["name"] == "work");

    CHECK(run_cli({"integrate", "--log", dir.file("log.csv"), "--region", "nope"})
              .exit_code == 5);
}

TEST_CASE("model build writes a deterministic document") {
    TempDir dir;
    testutil::write_file(dir.file("plat.json"), kPlatformDoc);
    testutil::write_file(dir.file("recs.csv"), kSpRecords);
    auto build = [&](const std::string& name) {
        return run_cli({"model", "build", "--platform", dir.file("plat.json"),
                        "--records", dir.file("recs.csv"), "--precision", "sp",
                        "--out", dir.file(name)});
    };
    CliResult a = build("m1.json");
    REQUIRE(a.exit_code == 0);
    CHECK(a.out.find("mt+simd+fma") != std::string::npos);
    REQUIRE(build("m2.json").exit_code == 0);
    std::string doc = testutil::read_file(dir.file("m1.json"));
    CHECK(doc == testutil::read_file(dir.file("m2.json")));
    CHECK(doc.find("\"schema\": \"wattline-model/v1\"") != std::string::npos);
    CHECK(doc.find("4.464000e+11") != std::string::npos);

    // Asking for a precision the records don't have is an error.
    CliResult none = run_cli({"model", "build", "--platform", dir.file("plat.json"),
                              "--records", dir.file("recs.csv"), "--precision", "dp",
                              "--out", dir.file("m3.json")});
    CHECK(none.exit_code == 1);
}

TEST_CASE("model build reads records from stdin") {
    TempDir dir;
    testutil::write_file(dir.file("plat.json"), kPlatformDoc);
    testutil::write_file(dir.file("recs.csv"), kSpRecords);
    CliResult r = run_sh("cat " + dir.file("recs.csv") + " | " + kBin +
                         " model build --platform " + dir.file("plat.json") +
                         " --records - --precision sp --out " + dir.file("m.json") +
                         " --json");
    REQUIRE(r.exit_code == 0);
    json j = json::parse(r.out);
    CHECK(j["ceilings"].size() == 4);
}

TEST_CASE("model build rate statistic flag") {
    TempDir dir;
    testutil::write_file(dir.file("plat.json"), kPlatformDoc);
    testutil::write_file(dir.file("recs.csv"),
                         "kernel,config,precision,W_flop,Q_byte,t_s,E_j\n"
                         "p,only,na,100e9,0,1,10\n"
                         "p,only,na,200e9,0,1,10\n"
                         "p,only,na,300e9,0,1,10\n");
    auto build = [&](const std::string& stat, const std::string& name) {
        return run_cli({"model", "build", "--platform", dir.file("plat.json"),
                        "--records", dir.file("recs.csv"), "--precision", "na",
                        "--out", dir.file(name), "--stat", stat});
    };
    REQUIRE(build("median", "med.json").exit_code == 0);
    REQUIRE(build("max", "max.json").exit_code == 0);
    CHECK(testutil::read_file(dir.file("med.json")).find("2.000000e+11") !=
          std::string::npos);
    CHECK(testutil::read_file(dir.file("max.json")).find("3.000000e+11") !=
          std::string::npos);
    CHECK(build("wrong", "w.json").exit_code != 0);
}

TEST_CASE("analyze places and compares kernels") {
    TempDir dir;
    testutil::write_file(dir.file("plat.json"), kGpuPlatformDoc);
    testutil::write_file(dir.file("ceil.csv"), kGpuDpRecords);
    testutil::write_file(dir.file("gemm.csv"), kGemmRecords);
    REQUIRE(run_cli({"model", "build", "--platform", dir.file("plat.json"),
                     "--records", dir.file("ceil.csv"), "--precision", "dp", "--out",
                     dir.file("m.json")})
                .exit_code == 0);

    CliResult placed = run_cli({"analyze", "--model", dir.file("m.json"), "--records",
                                dir.file("gemm.csv"), "--json"});
    REQUIRE(placed.exit_code == 0);
    json arr = json::parse(placed.out);
    REQUIRE(arr.is_array());
    REQUIRE(arr.size() == 2);
    CHECK(arr[0]["kernel"] == "gemm");
    CHECK(arr[0]["classification"] == "power_bound");
    CHECK(arr[1]["classification"] == "compute_bound");
    CHECK(arr[0]["e_w"].get<double>() == doctest::Approx(1.72e-9).epsilon(1e-9));

    CliResult cmp = run_cli({"analyze", "--model", dir.file("m.json"), "--records",
                             dir.file("gemm.csv"), "--compare", "base,fma", "--json"});
    REQUIRE(cmp.exit_code == 0);
    json j = json::parse(cmp.out);
    REQUIRE(j.contains("placements"));
    REQUIRE(j.contains("deltas"));
    REQUIRE(j["deltas"].size() == 1);
    json d = j["deltas"][0];
    CHECK(d["delta_power_w"].get<double>() == doctest::Approx(5.0).epsilon(1e-9));
    CHECK(d["ee_ratio"].get<double>() == doctest::Approx(1.72 / 1.11).epsilon(1e-9));
    CHECK(d["crossed_ridge"] == true);

    CHECK(run_cli({"analyze", "--model", dir.file("m.json"), "--records",
                   dir.file("gemm.csv"), "--compare", "base,nothere"})
              .exit_code == 5);
}

TEST_CASE("analyze fits the linear energy model") {
    TempDir dir;
    testutil::write_file(dir.file("fit.csv"),
                         "kernel,config,precision,W_flop,Q_byte,t_s,E_j\n"
                         "a,base,na,1e9,0,1,3\n"
                         "b,base,na,0,1e9,1,7\n"
                         "c,base,na,2e9,1e9,1,9\n"
                         "d,base,na,1e9,2e9,1,13\n");
    CliResult r = run_cli({"analyze", "--records", dir.file("fit.csv"), "--fit",
                           "--json"});
    REQUIRE(r.exit_code == 0);
    json j = json::parse(r.out);
    CHECK(j["eps_flop"].get<double>() == doctest::Approx(1e-9).epsilon(1e-6));
    CHECK(j["eps_mem"].get<double>() == doctest::Approx(5e-9).epsilon(1e-6));
    CHECK(j["e0"].get<double>() == doctest::Approx(2.0).epsilon(1e-6));
    CHECK(j["clamped"] == false);
}

TEST_CASE("plot writes an svg") {
    TempDir dir;
    testutil::write_file(dir.file("plat.json"), kPlatformDoc);
    testutil::write_file(dir.file("recs.csv"), kSpRecords);
    REQUIRE(run_cli({"model", "build", "--platform", dir.file("plat.json"),
                     "--records", dir.file("recs.csv"), "--precision", "sp", "--out",
                     dir.file("m.json")})
                .exit_code == 0);
    CliResult r = run_cli({"plot", "--model", dir.file("m.json"), "--records",
                           dir.file("recs.csv"), "--out", dir.file("p.svg"),
                           "--json"});
    REQUIRE(r.exit_code == 0);
    json j = json::parse(r.out);
    CHECK(j["ceilings"] == 4);
    CHECK(j["points"] == 4);
    std::string svg = testutil::read_file(dir.file("p.svg"));
    CHECK(svg.rfind("<svg", 0) == 0);
    CHECK(testutil::count_occurrences(svg, "class=\"ceiling\"") == 4);
}

TEST_CASE("real sampling around a child lands near the expected energy") {
    TempDir dir;
    CliResult s = run_cli({"sample", "--source", "synthetic:constant:50000", "--out",
                           dir.file("log.csv"), "--region-name", "nap", "--",
                           "sleep", "0.1"});
    REQUIRE(s.exit_code == 0);
    CliResult r = run_cli({"integrate", "--log", dir.file("log.csv"), "--region",
                           "nap", "--json"});
    REQUIRE(r.exit_code == 0);
    json rep = json::parse(r.out);
    // 50 W for ~0.1 s; generous envelope for scheduler overhead.
    double e = rep["energy_j"].get<double>();
    CHECK(e > 4.5);
    CHECK(e < 6.5);
    CHECK(rep["avg_power_w"].get<double>() == doctest::Approx(50.0).epsilon(1e-6));
}
