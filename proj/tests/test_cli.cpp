// Copyright 2026 The natlm Authors.
// SPDX-License-Identifier: Apache-2.0
//
// End-to-end checks through the installed binary: exit codes, determinism,
// and the documented file formats. The binary and fixture paths arrive via
// environment variables set by CTest.
#include <doctest.h>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <string>

#include <json.hpp>

#include "natlm/util.hpp"

using namespace natlm;
namespace fs = std::filesystem;

namespace {

std::string cli_path() {
    const char* env = std::getenv("NATLM_CLI");
    REQUIRE_MESSAGE(env != nullptr, "NATLM_CLI must point at the natlm binary");
    return env;
}

std::string fixtures_dir() {
    const char* env = std::getenv("NATLM_FIXTURES");
    return env ? env : "fixtures";
}

struct CommandResult {
    int exit_code = -1;
    std::string output;
};

CommandResult run(const std::string& args) {
    std::string command = cli_path() + " " + args + " 2>&1";
    FILE* pipe = popen(command.c_str(), "r");
    REQUIRE(pipe != nullptr);
    CommandResult result;
    std::array<char, 4096> buffer;
    while (size_t n = fread(buffer.data(), 1, buffer.size(), pipe))
        result.output.append(buffer.data(), n);
    int status = pclose(pipe);
    result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return result;
}

std::string fixture_args(const std::string& name) {
    const std::string dir = fixtures_dir();
    return "--source " + dir + "/" + name + ".sol --ast " + dir + "/" + name +
           ".ast.json --bytecode " + dir + "/" + name + ".hex";
}

const std::string kWork = "cli_work";

void build_kb_once() {
    static bool done = false;
    if (done) return;
    fs::create_directories(kWork);
    auto result = run("kb build --corpus " + fixtures_dir() + " --out " + kWork +
                      "/kb.bin --jobs 2 --seed 42");
    REQUIRE_MESSAGE(result.exit_code == 0, result.output);
    done = true;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("kb build writes the store and checkpoint, skipping unlabeled fixtures") {
    build_kb_once();
    CHECK(fs::exists(kWork + "/kb.bin"));
    CHECK(fs::exists(kWork + "/kb.bin.params.json"));
    auto rebuilt = run("kb build --corpus " + fixtures_dir() + " --out " + kWork +
                       "/kb_again.bin --jobs 1 --seed 42");
    CHECK(rebuilt.exit_code == 0);
    CHECK(rebuilt.output.find("no defect labels") != std::string::npos);
    CHECK(read_file(kWork + "/kb.bin") == read_file(kWork + "/kb_again.bin"));
}

TEST_CASE("scan exit codes: vulnerable 1, safe 0, missing kb 2") {
    build_kb_once();
    auto vulnerable = run("scan " + fixture_args("open_burn") + " --kb " + kWork + "/kb.bin");
    CHECK(vulnerable.exit_code == 1);
    CHECK(vulnerable.output.find("public_burn") != std::string::npos);

    auto safe = run("scan " + fixture_args("plain_storage") + " --kb " + kWork + "/kb.bin");
    CHECK(safe.exit_code == 0);

    auto missing = run("scan " + fixture_args("open_burn") + " --kb " + kWork + "/absent.bin");
    CHECK(missing.exit_code == 2);
    CHECK(missing.output.find("error") != std::string::npos);
}

TEST_CASE("scan reports are byte-identical across runs at a fixed seed") {
    build_kb_once();
    auto first = run("scan " + fixture_args("reentrant_mint") + " --kb " + kWork +
                     "/kb.bin --seed 7 --format json --out " + kWork + "/r1.json");
    auto second = run("scan " + fixture_args("reentrant_mint") + " --kb " + kWork +
                      "/kb.bin --seed 7 --format json --out " + kWork + "/r2.json");
    REQUIRE(first.exit_code == 1);
    REQUIRE(second.exit_code == 1);
    CHECK(read_file(kWork + "/r1.json") == read_file(kWork + "/r2.json"));
}

TEST_CASE("report JSON follows the documented schema") {
    build_kb_once();
    run("scan " + fixture_args("proxy_setter") + " --kb " + kWork + "/kb.bin --out " + kWork +
        "/proxy.json");
    auto j = nlohmann::json::parse(read_file(kWork + "/proxy.json"));
    CHECK(j.contains("contract"));
    CHECK(j.contains("predictions"));
    CHECK(j.contains("dropped"));
    CHECK(j.contains("meta"));
    REQUIRE(!j["predictions"].empty());
    const auto& p = j["predictions"][0];
    CHECK(p.contains("type"));
    CHECK(p.contains("confidence"));
    CHECK(p.contains("rationale"));
    CHECK(p.contains("locations"));

    auto rendered = run("report render --in " + kWork + "/proxy.json");
    CHECK(rendered.exit_code == 0);
    CHECK(rendered.output.find("risky_mutable_proxy") != std::string::npos);
}

TEST_CASE("tau is honored end to end") {
    build_kb_once();
    auto strict = run("scan " + fixture_args("open_burn") + " --kb " + kWork +
                      "/kb.bin --tau 0.95");
    CHECK(strict.exit_code == 0);  // 0.90 < 0.95: dropped
    CHECK(strict.output.find("1 low-confidence prediction(s) dropped") != std::string::npos);
}

TEST_CASE("kb query returns scored hits as JSON") {
    build_kb_once();
    auto result = run("--format json kb query --kb " + kWork + "/kb.bin " +
                      fixture_args("open_burn") + " -k 2");
    REQUIRE(result.exit_code == 0);
    auto j = nlohmann::json::parse(result.output);
    REQUIRE(j.size() == 2);
    CHECK(j[0].contains("defect_type"));
    CHECK(j[0]["score"].get<double>() >= j[1]["score"].get<double>());
}

TEST_CASE("disasm emits text, json and dot") {
    auto text = run("disasm --bytecode " + fixtures_dir() + "/open_burn.hex");
    CHECK(text.exit_code == 0);
    CHECK(text.output.find("PUSH1") != std::string::npos);
    auto json_out = run("disasm --bytecode " + fixtures_dir() +
                        "/open_burn.hex --cfg-format json");
    auto j = nlohmann::json::parse(json_out.output);
    CHECK(j.contains("blocks"));
    CHECK(j.contains("edges"));
    auto dot = run("disasm --bytecode " + fixtures_dir() + "/open_burn.hex --cfg-format dot");
    CHECK(dot.output.find("digraph") != std::string::npos);
}

TEST_CASE("metrics from a counts file matches the reference cells") {
    fs::create_directories(kWork);
    write_file(kWork + "/counts.json", std::string(R"([
      {"defect_type":"erc721_reentrancy","tp":423,"fp":59,"fn":80},
      {"defect_type":"public_burn","tp":42,"fp":7,"fn":2},
      {"defect_type":"risky_mutable_proxy","tp":13,"fp":1,"fn":2},
      {"defect_type":"unlimited_minting","tp":712,"fp":124,"fn":69}])"));
    auto result = run("--format json metrics --counts " + kWork + "/counts.json");
    REQUIRE(result.exit_code == 0);
    auto j = nlohmann::json::parse(result.output);
    CHECK(std::abs(j["rows"][0]["precision"].get<double>() * 100 - 87.75) <= 0.05);
    CHECK(std::abs(j["rows"][1]["recall"].get<double>() * 100 - 95.45) <= 0.05);
}

TEST_CASE("config file provides defaults, CLI overrides") {
    build_kb_once();
    write_file(kWork + "/natlm.ini", std::string("[scan]\ntau=0.95\n"));
    auto from_file = run("--config " + kWork + "/natlm.ini scan " +
                         fixture_args("open_burn") + " --kb " + kWork + "/kb.bin");
    CHECK(from_file.exit_code == 0);  // file tau filters the 0.90 finding
    auto overridden = run("--config " + kWork + "/natlm.ini scan " +
                          fixture_args("open_burn") + " --kb " + kWork +
                          "/kb.bin --tau 0.5");
    CHECK(overridden.exit_code == 1);  // CLI beats the file
}

TEST_CASE("corpus filter selects ERC-721-looking sources") {
    auto result = run("corpus filter --dir " + fixtures_dir());
    CHECK(result.exit_code == 0);
    // ownerOf(uint256 appears in the checked-burn fixture.
    CHECK(result.output.find("checked_burn.sol") != std::string::npos);
}

}  // TEST_SUITE
