#include <cstdio>
#include <cstdlib>
#include <sys/wait.h>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "json.hpp"
#include "rhlab/cli.hpp"
#include "rhlab/version.hpp"

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result run(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = rhlab::cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        std::vector<std::string> cells;
        std::istringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        rows.push_back(cells);
    }
    return rows;
}

std::string column(const std::vector<std::vector<std::string>>& rows, std::size_t row,
                   const std::string& name) {
    const auto& header = rows.at(0);
    for (std::size_t c = 0; c < header.size(); ++c) {
        if (header[c] == name) return rows.at(row).at(c);
    }
    FAIL("missing column " << name);
    return {};
}

double number(const std::vector<std::vector<std::string>>& rows, std::size_t row,
              const std::string& name) {
    return std::stod(column(rows, row, name));
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("dist insert-only") {
    const Result r = run({"dist", "--alpha", "0.9", "--model", "insert-only"});
    REQUIRE(r.code == 0);
    const auto rows = parse_csv(r.out);
    REQUIRE(rows.at(0) == std::vector<std::string>{"i", "p", "tail", "double_tail"});
    CHECK(number(rows, 1, "double_tail") == doctest::Approx(2.302585).epsilon(1e-6));
    CHECK(number(rows, 1, "tail") == doctest::Approx(0.9));
    CHECK(number(rows, 1, "p") == doctest::Approx(0.162178).epsilon(1e-5));
    double total = 0.0;
    for (std::size_t i = 1; i < rows.size(); ++i) total += number(rows, i, "p");
    CHECK(total == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("dist steady-state") {
    const Result r = run({"dist", "--alpha", "0.5", "--model", "steady-state"});
    REQUIRE(r.code == 0);
    const auto rows = parse_csv(r.out);
    CHECK(number(rows, 1, "double_tail") == doctest::Approx(1.0));
    CHECK(number(rows, 2, "double_tail") == doctest::Approx(0.5));
}

TEST_CASE("dist json") {
    const Result r = run({"dist", "--alpha", "0.9", "--format", "json"});
    REQUIRE(r.code == 0);
    const auto doc = nlohmann::json::parse(r.out);
    CHECK(doc.at("schema_version") == "rhlab.dist/1");
    CHECK(doc.at("library_version") == rhlab::kVersion);
    CHECK(doc.at("config").at("model") == "insert-only");
    CHECK(doc.at("rows").at(0).at("double_tail").get<double>() ==
          doctest::Approx(2.302585092994046).epsilon(1e-14));
}

TEST_CASE("argument errors exit with status 2") {
    CHECK(run({"dist", "--alpha", "1.0"}).code == 2);
    CHECK(run({"dist", "--alpha", "0"}).code == 2);
    CHECK(run({"dist"}).code == 2);
    CHECK(run({"dist", "--alpha", "0.5", "--model", "bogus"}).code == 2);
    CHECK(run({"nonsense"}).code == 2);
    CHECK(run({}).code == 2);
    CHECK(run({"simulate", "--m", "8"}).code == 2);
    CHECK(run({"simulate", "--discipline", "xyz"}).code == 2);
    CHECK(run({"figures", "--which", "fig9"}).code == 2);
    const Result bad = run({"dist", "--alpha", "1.5"});
    CHECK_FALSE(bad.err.empty());
}

TEST_CASE("help and version") {
    CHECK(run({"--help"}).code == 0);
    const Result v = run({"--version"});
    CHECK(v.code == 0);
    CHECK(v.out.find(rhlab::kVersion) != std::string::npos);
}

TEST_CASE("bounds table") {
    const Result r = run({"bounds", "--beta-grid", "10", "--model", "steady-state"});
    REQUIRE(r.code == 0);
    const auto rows = parse_csv(r.out);
    REQUIRE(rows.at(0) == std::vector<std::string>{"alpha", "beta", "mean", "variance",
                                                   "variance_upper_bound", "bound_minus_variance"});
    CHECK(number(rows, 1, "mean") == doctest::Approx(10.0));
    CHECK(number(rows, 1, "variance") == doctest::Approx(7.677374).epsilon(1e-6));
    CHECK(number(rows, 1, "variance_upper_bound") == doctest::Approx(10.0 + 1.0 / 3.0));

    const Result io = run({"bounds", "--beta-grid", "1e6", "--model", "insert-only"});
    REQUIRE(io.code == 0);
    const auto io_rows = parse_csv(io.out);
    CHECK(number(io_rows, 1, "variance_upper_bound") == doctest::Approx(3.6229842571).epsilon(1e-9));
    CHECK(number(io_rows, 1, "bound_minus_variance") > 0.0);

    const Result grid = run({"bounds"});
    REQUIRE(grid.code == 0);
    const auto grid_rows = parse_csv(grid.out);
    CHECK(grid_rows.size() == 7);
    for (std::size_t i = 1; i < grid_rows.size(); ++i) {
        CHECK(number(grid_rows, i, "bound_minus_variance") >= 0.0);
    }

    const Result js = run({"bounds", "--alpha-grid", "0.5,0.9", "--format", "json"});
    REQUIRE(js.code == 0);
    const auto doc = nlohmann::json::parse(js.out);
    CHECK(doc.at("schema_version") == "rhlab.bounds/1");
    CHECK(doc.at("rows").size() == 2);
}

TEST_CASE("simulate is deterministic and reports its checks") {
    const std::vector<std::string> args{"simulate", "--m", "4096", "--alpha", "0.8",
                                        "--replications", "3", "--seed", "7"};
    const Result a = run(args);
    const Result b = run(args);
    REQUIRE(a.code == 0);
    CHECK(a.out == b.out);
    const auto rows = parse_csv(a.out);
    CHECK(column(rows, 1, "discipline") == "rh");
    CHECK(column(rows, 1, "all_pass") == "true");
    CHECK(number(rows, 1, "n") == 3276);

    std::vector<std::string> json_args = args;
    json_args.insert(json_args.end(), {"--format", "json"});
    const auto doc = nlohmann::json::parse(run(json_args).out);
    CHECK(doc.at("schema_version") == "rhlab.simulate/1");
    CHECK_FALSE(doc.contains("wall_clock_seconds"));
    json_args.push_back("--timing");
    CHECK(nlohmann::json::parse(run(json_args).out).contains("wall_clock_seconds"));
}

TEST_CASE("simulate at zero load") {
    const Result r = run({"simulate", "--m", "64", "--alpha", "0"});
    REQUIRE(r.code == 0);
    const auto rows = parse_csv(r.out);
    CHECK(number(rows, 1, "empirical_mean") == 1.0);
    CHECK(number(rows, 1, "analytic_mean") == 1.0);
}

TEST_CASE("simulate exit status follows the comparison") {
    // FCFS under churn has geometric ages; the check passes against that law.
    const Result ok = run({"simulate", "--m", "4096", "--alpha", "0.5", "--discipline", "fcfs",
                           "--model", "steady-state", "--replications", "2"});
    CHECK(ok.code == 0);
    // An impossible tolerance must fail with status 1.
    const Result strict = run({"simulate", "--m", "256", "--alpha", "0.9", "--mean-tol", "1e-9"});
    CHECK(strict.code == 1);
}

TEST_CASE("searchbench") {
    const Result r = run({"searchbench", "--m", "20000", "--alpha", "0.5", "--sample", "5000"});
    REQUIRE(r.code == 0);
    const auto rows = parse_csv(r.out);
    REQUIRE(rows.at(0) == std::vector<std::string>{"mode", "mean_probes", "analytic_mean", "analytic_sd"});
    CHECK(column(rows, 1, "mode") == "standard");
    CHECK(column(rows, 2, "mode") == "centered");
    CHECK(number(rows, 1, "mean_probes") == doctest::Approx(1.3863).epsilon(0.02));
    CHECK(number(rows, 1, "analytic_mean") == doctest::Approx(1.3862943611).epsilon(1e-9));

    CHECK(run({"searchbench", "--m", "100", "--alpha", "0.5", "--sample", "51"}).code == 2);
    CHECK(run({"searchbench", "--m", "100", "--alpha", "0.5", "--sample", "0"}).code == 2);
}

TEST_CASE("figures") {
    const auto dir = std::filesystem::temp_directory_path() / "rhlab_test_figures";
    std::filesystem::remove_all(dir);

    REQUIRE(run({"figures", "--which", "fig1", "--out-dir", dir.string()}).code == 0);
    const auto fig1 = parse_csv(slurp(dir / "fig1.csv"));
    REQUIRE(fig1.size() == 11);
    CHECK(number(fig1, 1, "double_tail") == doctest::Approx(2.302585).epsilon(1e-6));
    CHECK(number(fig1, 2, "majorant") == doctest::Approx(1.4611502).epsilon(1e-6));
    for (std::size_t i = 1; i < fig1.size(); ++i) {
        CHECK(number(fig1, i, "double_tail") <= number(fig1, i, "majorant") + 1e-9);
    }

    REQUIRE(run({"figures", "--which", "fig4", "--out-dir", dir.string()}).code == 0);
    const auto fig4 = parse_csv(slurp(dir / "fig4.csv"));
    REQUIRE(fig4.size() == 101);
    CHECK(number(fig4, 50, "beta") == 50);
    CHECK(number(fig4, 50, "variance") == doctest::Approx(46.2624).epsilon(0.01 / 46.2624));
    CHECK(number(fig4, 1, "variance") == 0.0);

    REQUIRE(run({"figures", "--which", "fig2", "--out-dir", dir.string(), "--m", "2000"}).code == 0);
    const auto fig2 = parse_csv(slurp(dir / "fig2.csv"));
    REQUIRE(fig2.at(0) == std::vector<std::string>{"i", "fcfs_simulated", "lcfs_simulated", "rh_analytic"});
    CHECK(fig2.size() == 151);

    std::filesystem::remove_all(dir);
}

#ifdef RHLAB_CLI_PATH
TEST_CASE("installed executable") {
    const std::string cmd = std::string(RHLAB_CLI_PATH) + " dist --alpha 0.9 2>/dev/null";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::string text;
    char buf[4096];
    while (const std::size_t k = fread(buf, 1, sizeof buf, pipe)) text.append(buf, k);
    const int status = pclose(pipe);
    CHECK(status == 0);
    CHECK(text == run({"dist", "--alpha", "0.9"}).out);

    const std::string bad = std::string(RHLAB_CLI_PATH) + " dist --alpha 1.0 >/dev/null 2>&1";
    const int bad_status = std::system(bad.c_str());
    CHECK(WEXITSTATUS(bad_status) == 2);
}
#endif
