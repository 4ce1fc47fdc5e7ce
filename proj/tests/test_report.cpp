#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "gridmarket/config.hpp"
#include "gridmarket/report.hpp"
#include "gridmarket/svg.hpp"
#include "json.hpp"
#include "oracles.hpp"

using namespace gridmarket;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / ("gridmarket_" + name)) {
        fs::remove_all(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

std::vector<std::vector<std::string>> readCsv(const fs::path& p) {
    std::ifstream in(p);
    std::vector<std::vector<std::string>> rows;
    std::string line;
    while (std::getline(in, line)) {
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        rows.push_back(std::move(cells));
    }
    return rows;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
}

int countPolylines(const boost::property_tree::ptree& tree) {
    int n = 0;
    for (const auto& [key, child] : tree) {
        if (key == "polyline") ++n;
        n += countPolylines(child);
    }
    return n;
}

RunResult shortRun(int steps, std::size_t categories = 2) {
    ScenarioConfig cfg = presetConfig(categories, 40);
    cfg.totalSteps = steps;
    cfg.seed = 21;
    return runSimulation(cfg, false);
}

}  // namespace

TEST_CASE("csv row counts") {
    TempDir dir("rows");
    const RunResult run = shortRun(2);
    const RunArtifacts art = emitReports(run, dir.path);
    CHECK(art.files.size() == 9);
    const auto prices = readCsv(dir.path / "prices.csv");
    REQUIRE(prices.size() == 1 + 4);
    CHECK(prices[0] == std::vector<std::string>{"step", "category", "price"});
    CHECK(readCsv(dir.path / "utilization.csv").size() == 5);
    CHECK(readCsv(dir.path / "xi.csv").size() == 5);
    CHECK(readCsv(dir.path / "solver.csv").size() == 3);
    const std::string raw = slurp(dir.path / "prices.csv");
    CHECK(raw.find('\r') == std::string::npos);
}

TEST_CASE("summary matches the csv files") {
    TempDir dir("summary");
    const RunResult run = shortRun(60, 3);
    emitReports(run, dir.path);
    const auto summary = nlohmann::json::parse(slurp(dir.path / "summary.json"));

    std::map<int, std::vector<double>> price;
    std::map<int, std::vector<double>> util;
    std::map<int, std::vector<double>> xi;
    auto collect = [&](const char* file, std::map<int, std::vector<double>>& into) {
        const auto rows = readCsv(dir.path / file);
        for (std::size_t i = 1; i < rows.size(); ++i) into[std::stoi(rows[i][1])].push_back(std::stod(rows[i][2]));
    };
    collect("prices.csv", price);
    collect("utilization.csv", util);
    collect("xi.csv", xi);

    const auto& cats = summary.at("categories");
    REQUIRE(cats.size() == 3);
    for (const auto& c : cats) {
        const int k = c.at("category").get<int>();
        CHECK(std::abs(c.at("meanPrice").get<double>() - oracle::mean(price[k])) <= 1e-9);
        CHECK(std::abs(c.at("meanUtilization").get<double>() - oracle::mean(util[k])) <= 1e-9);
        CHECK(std::abs(c.at("meanXi").get<double>() - oracle::mean(xi[k])) <= 1e-9);
    }

    const auto solver = readCsv(dir.path / "solver.csv");
    std::vector<double> norms;
    std::vector<double> queries;
    for (std::size_t i = 1; i < solver.size(); ++i) {
        if (solver[i][1] != "1") continue;
        norms.push_back(std::stod(solver[i][4]));
        queries.push_back(std::stod(solver[i][5]));
    }
    CHECK(summary.at("pricedSteps").get<std::size_t>() == norms.size());
    CHECK(std::abs(summary.at("residualNorm").at("mean").get<double>() - oracle::mean(norms)) <= 1e-9);
    CHECK(summary.at("residualNorm").at("max").get<double>() == *std::max_element(norms.begin(), norms.end()));
    CHECK(std::abs(summary.at("meanQueries").get<double>() - oracle::mean(queries)) <= 1e-9);
    CHECK(summary.at("seed").get<std::uint64_t>() == 21);
    CHECK(summary.at("config").at("scenario.ratios").get<std::string>() == "1,2,3");

    // Key order is fixed.
    std::vector<std::string> keys;
    const auto ordered = nlohmann::ordered_json::parse(slurp(dir.path / "summary.json"));
    for (const auto& [k, v] : ordered.items()) keys.push_back(k);
    CHECK(keys.front() == "name");
    CHECK(keys.back() == "config");
}

TEST_CASE("plots are well-formed svg") {
    TempDir dir("plots");
    const RunResult run = shortRun(30, 3);
    emitReports(run, dir.path);
    for (const char* name : {"prices.svg", "utilization.svg", "spend.svg"}) {
        boost::property_tree::ptree tree;
        CHECK_NOTHROW(boost::property_tree::read_xml((dir.path / "plots" / name).string(), tree));
        const int expected = std::string(name) == "spend.svg" ? 1 : 3;
        CHECK(countPolylines(tree) == expected);
    }
}

TEST_CASE("svg escapes text") {
    const std::string svg = renderSvg(LineChart{"a < b & c", "x", "y", {ChartSeries{"\"q\"", {{0, 1}, {1, 2}}}}});
    std::istringstream in(svg);
    boost::property_tree::ptree tree;
    CHECK_NOTHROW(boost::property_tree::read_xml(in, tree));
    CHECK(svg.find("a &lt; b &amp; c") != std::string::npos);
}

TEST_CASE("empty runs still produce headers") {
    TempDir dir("empty");
    emitReports(shortRun(0), dir.path);
    CHECK(readCsv(dir.path / "prices.csv").size() == 1);
    boost::property_tree::ptree tree;
    CHECK_NOTHROW(boost::property_tree::read_xml((dir.path / "plots" / "prices.svg").string(), tree));
}

TEST_CASE("failed output is rolled back") {
    TempDir dir("rollback");
    fs::create_directories(dir.path);
    { std::ofstream(dir.path / "plots") << "in the way"; }
    CHECK_THROWS_AS(emitReports(shortRun(3), dir.path), ReportError);
    CHECK_FALSE(fs::exists(dir.path / "prices.csv"));
    CHECK_FALSE(fs::exists(dir.path / "summary.json"));
    CHECK(fs::is_regular_file(dir.path / "plots"));

    TempDir fresh("rollback_fresh");
    { std::ofstream(fresh.path) << "a file, not a directory"; }
    CHECK_THROWS_AS(emitReports(shortRun(3), fresh.path / "out"), ReportError);
}

TEST_CASE("sweep output") {
    TempDir dir("sweep");
    SweepOptions opts;
    opts.categoryCounts = {1, 2};
    opts.seeds = 2;
    opts.steps = 20;
    opts.deskScale = 40;
    opts.recordTiming = false;
    const SweepResult result = runSweep(opts, dir.path);
    CHECK(result.rows.size() == 2);
    CHECK(result.errors.empty());
    const auto rows = readCsv(dir.path / "sweep.csv");
    CHECK(rows.size() == 3);
    CHECK(fs::exists(dir.path / "runs" / "one-cat-seed1" / "summary.json"));
    CHECK(fs::exists(dir.path / "runs" / "two-cat-seed2" / "prices.csv"));
    for (const char* name : {"queries.svg", "runtime.svg", "spend.svg"}) {
        boost::property_tree::ptree tree;
        CHECK_NOTHROW(boost::property_tree::read_xml((dir.path / "plots" / name).string(), tree));
    }

    SweepOptions single = opts;
    single.categoryCounts = {3};
    CHECK_THROWS_WITH_AS(runSweep(single, dir.path / "x"), doctest::Contains(">= 2 presets required"), ConfigError);
}
