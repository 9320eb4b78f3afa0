#include "doctest.h"

#include "gasketlab/harness.hpp"
#include "gasketlab/report.hpp"
#include "gasketlab/svg.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>

using namespace gasketlab;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    return std::string(std::istreambuf_iterator<char>(in), {});
}

struct TempDir {
    std::filesystem::path path;
    TempDir() {
        path = std::filesystem::temp_directory_path() / "gasketlab_test";
        std::filesystem::create_directories(path);
    }
};

}  // namespace

TEST_CASE("sha1 known vectors") {
    CHECK(sha1_hex("") == "da39a3ee5e6b4b0d3255bfef95601890afd80709");
    CHECK(sha1_hex("abc") == "a9993e364706816aba3e25717850c26c9cd0d89d");
}

TEST_CASE("op coverage registry") {
    reset_op_coverage();
    mark_op("demo.op");
    mark_op("demo.op");
    auto cov = op_coverage();
    CHECK(cov.at("demo.op") == 2);
    reset_op_coverage();
    CHECK(op_coverage().empty());
}

TEST_CASE("run writes deterministic artifacts") {
    TempDir tmp;
    harness::ExperimentConfig cfg;
    cfg.level = 3;
    cfg.seed = 11;
    cfg.out_dir = tmp.path.string();

    CHECK(harness::run("gasket", "enumerate", cfg) == 0);
    std::string first = slurp(tmp.path / "gasket_enumerate.json");
    CHECK(harness::run("gasket", "enumerate", cfg) == 0);
    std::string second = slurp(tmp.path / "gasket_enumerate.json");
    CHECK(first == second);
    CHECK(first.find("\"count\": 13") != std::string::npos);

    CHECK(harness::run("witness", "build", cfg) == 0);
    std::string csv = slurp(tmp.path / "witness_energy.csv");
    CHECK(csv.rfind("address,level,energy,bound", 0) == 0);

    CHECK_THROWS_AS(harness::run("nonsense", "", cfg), harness::ConfigError);
}

TEST_CASE("svg renders are deterministic and well-formed") {
    std::string a = svg::render_gasket(3);
    std::string b = svg::render_gasket(3);
    CHECK(a == b);
    CHECK(a.rfind("<svg", 0) == 0);
    CHECK(a.find("</svg>") != std::string::npos);
    CHECK(a.find("<polygon") != std::string::npos);
}

TEST_CASE("full battery covers every operation") {
    TempDir tmp;
    harness::ExperimentConfig cfg;
    cfg.level = 3;
    cfg.seed = 5;
    cfg.out_dir = tmp.path.string();
    CHECK(harness::run_all(cfg) == 0);
    auto cov = op_coverage();
    CHECK(cov.size() >= 30);
    CHECK(cov.count("phi.injectivity_scan") == 1);
}
