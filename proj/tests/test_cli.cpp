#include <sys/wait.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "bss/cli.hpp"
#include "bss/io.hpp"
#include "doctest.h"

namespace fs = std::filesystem;
using bss::Json;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result bss_run(std::vector<std::string> args) {
    args.insert(args.begin(), "bss");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = bss::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
    const fs::path p = fs::current_path() / "cli_scratch" / name;
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

std::size_t count_lines(const fs::path& p) {
    const std::string s = slurp(p);
    return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n'));
}

fs::path write_config(const fs::path& dir, const std::string& body) {
    const fs::path p = dir / "config.json";
    std::ofstream(p) << body;
    return p;
}

// A small scenario for the fit/compare/diagnose tests.
fs::path small_scenario(const fs::path& root) {
    const fs::path cfg = write_config(root, R"({"M": 3, "N": 6, "L": 80, "snr_db": 20, "seed": 2})");
    const fs::path dir = root / "scenario";
    const Result r = bss_run({"synth", cfg.string(), "--out", dir.string()});
    REQUIRE(r.code == 0);
    return dir;
}

}  // namespace

TEST_CASE("synth writes the expected shapes") {
    const fs::path root = scratch("synth_shapes");
    const fs::path cfg = write_config(root, R"({"M": 3, "N": 10, "L": 1000, "snr_db": 20})");
    const Result r = bss_run({"synth", cfg.string(), "--out", (root / "out").string()});
    REQUIRE(r.code == 0);
    const bss::ScenarioData d = bss::read_scenario(root / "out");
    CHECK(d.Y.rows() == 10);
    CHECK(d.Y.cols() == 1000);
    CHECK(d.C_true->cols() == 3);
    CHECK(d.S_true->rows() == 3);
    CHECK(d.manifest["schema"] == "bss.scenario");
}

TEST_CASE("synth rejects a config without M") {
    const fs::path root = scratch("synth_missing");
    const fs::path cfg = write_config(root, R"({"N": 10, "L": 1000, "snr_db": 20})");
    const Result r = bss_run({"synth", cfg.string(), "--out", (root / "out").string()});
    CHECK(r.code == bss::cli::kArgumentError);
    CHECK(r.err.find("'M'") != std::string::npos);
}

TEST_CASE("synth is deterministic in the seed") {
    const fs::path root = scratch("synth_seed");
    const fs::path cfg = write_config(root, R"({"M": 2, "N": 5, "L": 100, "snr_db": 15})");
    REQUIRE(bss_run({"synth", cfg.string(), "--seed", "9", "--out", (root / "a").string()}).code == 0);
    REQUIRE(bss_run({"synth", cfg.string(), "--seed", "9", "--out", (root / "b").string()}).code == 0);
    REQUIRE(bss_run({"synth", cfg.string(), "--seed", "10", "--out", (root / "c").string()}).code == 0);
    CHECK(slurp(root / "a" / "Y.csv") == slurp(root / "b" / "Y.csv"));
    CHECK(slurp(root / "a" / "Y.csv") != slurp(root / "c" / "Y.csv"));
}

TEST_CASE("fit argument errors") {
    const fs::path root = scratch("fit_args");
    const fs::path scen = small_scenario(root);
    const Result burn = bss_run({"fit", scen.string(), "--iters", "10", "--burn-in", "10", "--out",
                                 (root / "f").string()});
    CHECK(burn.code == bss::cli::kArgumentError);
    CHECK(burn.err.find("burn-in") != std::string::npos);
    CHECK(bss_run({"fit", scen.string(), "--prior", "laplace"}).code == bss::cli::kArgumentError);
    CHECK(bss_run({"fit", scen.string(), "--bogus"}).code == bss::cli::kArgumentError);
    CHECK(bss_run({"fit", (root / "nowhere").string(), "--out", (root / "g").string()}).code ==
          bss::cli::kDataError);
}

TEST_CASE("fit is reproducible and round-trips through compare and diagnose") {
    const fs::path root = scratch("fit_round_trip");
    const fs::path scen = small_scenario(root);
    const auto fit = [&](const std::string& out) {
        return bss_run({"fit", scen.string(), "--iters", "60", "--burn-in", "20", "--chains", "2",
                        "--seed", "7", "--threads", "2", "--out", (root / out).string()});
    };
    REQUIRE(fit("a").code == 0);
    REQUIRE(fit("b").code == 0);
    for (const char* f : {"report.json", "C_hat.csv", "S_hat.csv", "trace_chain0.jsonl",
                          "trace_chain1.jsonl", "diagnostics/psrf.csv"}) {
        CHECK_MESSAGE(slurp(root / "a" / f) == slurp(root / "b" / f), f);
    }
    CHECK(fs::exists(root / "a" / "timings.json"));

    const Json report = bss::read_json(root / "a" / "report.json");
    CHECK(report["settings"]["chains"] == 2);
    CHECK(report.contains("metrics"));
    const bss::Matrix C = bss::read_csv(root / "a" / "C_hat.csv");
    CHECK(C.rows() == 6);
    CHECK(C.cols() == 3);

    const Result cmp = bss_run({"compare", scen.string(), "--method", "gibbs=" + (root / "a").string(),
                                "--out", (root / "cmp").string()});
    REQUIRE(cmp.code == 0);
    const Json cj = bss::read_json(root / "cmp" / "comparison.json");
    CHECK(cj["methods"].size() == 1);
    CHECK(cj["methods"][0]["name"] == "gibbs");
    CHECK(count_lines(root / "cmp" / "comparison.txt") == 2);

    const Result nmf = bss_run({"compare", scen.string(), "--nmf", "--nmf-iters", "50", "--nmf-restarts",
                                "2", "--out", (root / "cmp_nmf").string()});
    REQUIRE(nmf.code == 0);
    CHECK(bss::read_json(root / "cmp_nmf" / "comparison.json")["methods"].size() == 2);

    CHECK(bss_run({"compare", scen.string(), "--out", (root / "cmp_none").string()}).code ==
          bss::cli::kArgumentError);
    CHECK(bss_run({"compare", scen.string(), "--method", "x=" + (root / "missing").string(), "--out",
                   (root / "cmp_missing").string()})
              .code == bss::cli::kDataError);
}

TEST_CASE("diagnose outputs") {
    const fs::path root = scratch("diagnose");
    const fs::path scen = small_scenario(root);
    const std::size_t chains = 10, iters = 40, burn = 10;
    REQUIRE(bss_run({"fit", scen.string(), "--iters", std::to_string(iters), "--burn-in",
                     std::to_string(burn), "--chains", std::to_string(chains), "--seed", "3", "--out",
                     (root / "fit").string()})
                .code == 0);
    std::vector<std::string> args{"diagnose"};
    for (std::size_t k = 0; k < chains; ++k) {
        args.push_back((root / "fit" / ("trace_chain" + std::to_string(k) + ".jsonl")).string());
    }
    args.insert(args.end(), {"--psrf", "--bins", "7", "--data", scen.string(), "--out",
                             (root / "diag").string()});
    const Result r = bss_run(args);
    REQUIRE(r.code == 0);

    // one PSRF row per observation plus the header
    CHECK(count_lines(root / "diag" / "psrf.csv") == 6 + 1);
    // one reconstruction-error row per p = 1 .. iters - burn_in
    CHECK(count_lines(root / "diag" / "reconstruction_error.csv") == iters - burn + 1);
    CHECK(fs::exists(root / "diag" / "series" / "chain9_sigma2_e.csv"));
    CHECK(count_lines(root / "diag" / "series" / "chain0_alpha.csv") == iters + 1);

    // the counts of every histogrammed parameter add up to the pooled sample count
    std::ifstream h(root / "diag" / "histograms" / "concentrations.csv");
    std::string line;
    std::getline(h, line);
    std::map<std::string, std::size_t> totals;
    std::size_t rows = 0;
    while (std::getline(h, line)) {
        const auto first = line.find(',');
        const auto last = line.rfind(',');
        totals[line.substr(0, first)] += std::stoul(line.substr(last + 1));
        ++rows;
    }
    CHECK(totals.size() == 18);
    CHECK(rows == 18 * 7);
    for (const auto& [name, total] : totals) CHECK_MESSAGE(total == chains * (iters - burn), name);

    const Json summary = bss::read_json(root / "diag" / "summary.json");
    CHECK(summary["psrf"].size() == 6);

    const Result single = bss_run({"diagnose", (root / "fit" / "trace_chain0.jsonl").string(), "--psrf",
                                   "--out", (root / "diag1").string()});
    CHECK(single.code == bss::cli::kArgumentError);
    CHECK(single.err.find("chain") != std::string::npos);
    const Result lenient = bss_run({"diagnose", (root / "fit" / "trace_chain0.jsonl").string(), "--out",
                                    (root / "diag2").string()});
    CHECK(lenient.code == 0);
    CHECK(!fs::exists(root / "diag2" / "psrf.csv"));
}

TEST_CASE("BSS_OUTPUT_ROOT is honored") {
    const fs::path root = scratch("output_root");
    const fs::path cfg = write_config(root, R"({"M": 2, "N": 4, "L": 40, "snr_db": 20})");
    ::setenv("BSS_OUTPUT_ROOT", (root / "elsewhere").string().c_str(), 1);
    const Result r = bss_run({"synth", cfg.string()});
    ::unsetenv("BSS_OUTPUT_ROOT");
    REQUIRE(r.code == 0);
    CHECK(fs::exists(root / "elsewhere" / "scenario" / "Y.csv"));
    CHECK(bss::cli::output_root() == fs::path("bss_output"));
}

TEST_CASE("the installed binary maps errors to exit codes") {
    const char* bin = std::getenv("BSS_TEST_BIN");
    if (!bin) return;
    const fs::path root = scratch("binary");
    const std::string missing = std::string(bin) + " fit " + (root / "nowhere").string() + " --out " +
                                (root / "f").string() + " > /dev/null 2>&1";
    const int status = std::system(missing.c_str());
    CHECK(WEXITSTATUS(status) == 3);
    const int help = std::system((std::string(bin) + " --help > /dev/null 2>&1").c_str());
    CHECK(WEXITSTATUS(help) == 0);
}
