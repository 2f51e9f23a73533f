// Copyright 2026 The natlm Authors.
// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <random>
#include <set>

#include "natlm/bytecode.hpp"
#include "natlm/opcodes.hpp"

using namespace natlm;
using namespace natlm::evm;

namespace {

// Random but decodable EVM code: defined opcodes with proper immediates and a
// final STOP so control never falls off the end. Shared with the acceptance
// suite via duplication on purpose; the generator is the test fixture.
Bytes random_code(std::mt19937_64& rng, size_t max_instructions = 40) {
    static const std::vector<uint8_t> pool = [] {
        std::vector<uint8_t> ops;
        for (int op = 0; op < 256; ++op)
            if (is_defined(static_cast<uint8_t>(op))) ops.push_back(static_cast<uint8_t>(op));
        return ops;
    }();
    std::uniform_int_distribution<size_t> count_dist(1, max_instructions);
    std::uniform_int_distribution<size_t> op_dist(0, pool.size() - 1);
    std::uniform_int_distribution<int> byte_dist(0, 255);
    Bytes code;
    size_t n = count_dist(rng);
    for (size_t i = 0; i < n; ++i) {
        uint8_t op = pool[op_dist(rng)];
        code.push_back(op);
        for (int k = 0; k < push_width(op); ++k)
            code.push_back(static_cast<uint8_t>(byte_dist(rng)));
    }
    code.push_back(OP_STOP);
    return code;
}

void check_cfg_invariants(const Cfg& cfg, const std::vector<Instruction>& instructions) {
    // Partition: every instruction belongs to exactly one non-synthetic block.
    size_t covered = 0;
    std::set<size_t> offsets;
    for (const auto& b : cfg.blocks) {
        if (b.synthetic_halt) continue;
        REQUIRE(!b.instructions.empty());
        for (const auto& ins : b.instructions) {
            CHECK(offsets.insert(ins.offset).second);
            ++covered;
        }
    }
    CHECK(covered == instructions.size());

    for (const auto& b : cfg.blocks) {
        // Terminator property: only in final position.
        for (size_t i = 0; i + 1 < b.instructions.size(); ++i)
            CHECK(!is_terminator(b.instructions[i].opcode));
        // JUMPDEST only as the first instruction.
        for (size_t i = 1; i < b.instructions.size(); ++i)
            CHECK(b.instructions[i].opcode != OP_JUMPDEST);
        // Degree property.
        uint8_t last = b.last().opcode;
        if (last == OP_JUMPI) CHECK(cfg.out_degree(b.id) == 2);
        if (is_halt(last)) CHECK(cfg.out_degree(b.id) == 0);
    }

    for (const auto& e : cfg.edges) {
        REQUIRE(e.from >= 0);
        REQUIRE(e.to >= 0);
        REQUIRE(static_cast<size_t>(e.from) < cfg.blocks.size());
        REQUIRE(static_cast<size_t>(e.to) < cfg.blocks.size());
        if (e.kind == EdgeKind::BranchTaken || e.kind == EdgeKind::BranchNotTaken)
            CHECK(cfg.blocks[static_cast<size_t>(e.from)].last().opcode == OP_JUMPI);
        if (e.kind == EdgeKind::Jump || e.kind == EdgeKind::BranchTaken)
            CHECK(cfg.blocks[static_cast<size_t>(e.to)].instructions.front().opcode == OP_JUMPDEST);
    }
}

}  // namespace

TEST_SUITE("bytecode") {

TEST_CASE("disassemble decodes push immediates") {
    auto instructions = disassemble(parse_hex("0x6001600101"));
    REQUIRE(instructions.size() == 3);
    CHECK(instructions[0].offset == 0);
    CHECK(instructions[0].to_string() == "PUSH1 0x01");
    CHECK(instructions[1].offset == 2);
    CHECK(instructions[1].to_string() == "PUSH1 0x01");
    CHECK(instructions[2].offset == 4);
    CHECK(instructions[2].to_string() == "ADD");
}

TEST_CASE("disassemble of empty input is empty") {
    CHECK(disassemble({}).empty());
}

TEST_CASE("truncated push is zero-padded and flagged") {
    auto instructions = disassemble(parse_hex("60"));
    REQUIRE(instructions.size() == 1);
    CHECK(instructions[0].opcode == OP_PUSH1);
    CHECK(instructions[0].truncated);
    CHECK(instructions[0].immediate == Bytes{0x00});
    CHECK(instructions[0].immediate_present == 0);
}

TEST_CASE("unknown opcodes decode as INVALID placeholders") {
    auto instructions = disassemble(parse_hex("0c"));
    REQUIRE(instructions.size() == 1);
    CHECK(!is_defined(instructions[0].opcode));
    CHECK(instructions[0].to_string() == "INVALID(0x0c)");
}

TEST_CASE("decode round-trip reproduces input bytes") {
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<int> byte_dist(0, 255);
    std::uniform_int_distribution<size_t> len_dist(0, 200);
    for (int trial = 0; trial < 200; ++trial) {
        Bytes code(len_dist(rng));
        for (auto& b : code) b = static_cast<uint8_t>(byte_dist(rng));
        CHECK(serialize(disassemble(code)) == code);
    }
}

TEST_CASE("straight-line code yields one block and no edges") {
    auto cfg = build_cfg(disassemble(parse_hex("6001600201 00")));
    REQUIRE(cfg.blocks.size() == 1);
    CHECK(cfg.edges.empty());
    CHECK(cfg.entry == 0);
    CHECK(cfg.blocks[0].start_offset == 0);
}

TEST_CASE("jump over dead code reaches the JUMPDEST block") {
    // PUSH1 0x04; JUMP; INVALID; JUMPDEST; STOP
    auto instructions = disassemble(parse_hex("600456fe5b00"));
    auto cfg = build_cfg(instructions);
    REQUIRE(cfg.blocks.size() == 3);
    int reachable = 0;
    for (const auto& b : cfg.blocks) reachable += b.reachable ? 1 : 0;
    CHECK(reachable == 2);
    REQUIRE(cfg.edges.size() == 1);
    CHECK(cfg.edges[0].kind == EdgeKind::Jump);
    CHECK(cfg.blocks[static_cast<size_t>(cfg.edges[0].to)].start_offset == 4);
    CHECK(!cfg.blocks[1].reachable);  // INVALID block retained but flagged
}

TEST_CASE("JUMPI block has branch-taken and branch-not-taken edges") {
    // PUSH1 1; PUSH1 0x06; JUMPI; STOP; JUMPDEST; STOP
    auto cfg = build_cfg(disassemble(parse_hex("6001600657005b00")));
    const auto& src = cfg.blocks[0];
    CHECK(src.last().opcode == OP_JUMPI);
    CHECK(cfg.out_degree(src.id) == 2);
    std::set<EdgeKind> kinds;
    for (const auto& e : cfg.edges)
        if (e.from == src.id) kinds.insert(e.kind);
    CHECK(kinds == std::set<EdgeKind>{EdgeKind::BranchTaken, EdgeKind::BranchNotTaken});
}

TEST_CASE("computed jump stays unresolved") {
    // CALLDATALOAD; JUMP (no adjacent push)
    auto cfg = build_cfg(disassemble(parse_hex("3556")));
    REQUIRE(cfg.edges.size() == 1);
    CHECK(cfg.edges[0].kind == EdgeKind::Unresolved);
    CHECK(cfg.edges[0].from == cfg.edges[0].to);  // placeholder self-loop
}

TEST_CASE("push target that is not a JUMPDEST downgrades with a diagnostic") {
    // PUSH1 0x03; JUMP; ADD (offset 3 is not a JUMPDEST)
    auto cfg = build_cfg(disassemble(parse_hex("60035601")));
    int jump_edges = 0;
    for (const auto& e : cfg.edges)
        if (e.from == 0) {
            ++jump_edges;
            CHECK(e.kind == EdgeKind::Unresolved);
        }
    CHECK(jump_edges == 1);
    REQUIRE(!cfg.diagnostics.empty());
    CHECK(cfg.diagnostics[0].find("not a JUMPDEST") != std::string::npos);
}

TEST_CASE("resolve_jump_targets is idempotent") {
    auto instructions = disassemble(parse_hex("600456fe5b00"));
    auto cfg = build_cfg(instructions);
    auto edges_before = cfg.edges.size();
    auto diags_before = cfg.diagnostics.size();
    resolve_jump_targets(cfg, instructions);
    CHECK(cfg.edges.size() == edges_before);
    CHECK(cfg.diagnostics.size() == diags_before);
}

TEST_CASE("trailing JUMPI falls through to an implicit halt") {
    // PUSH1 1; PUSH1 0x00... JUMPI at end of code
    auto cfg = build_cfg(disassemble(parse_hex("6001600057")));
    const auto& src = cfg.blocks[0];
    CHECK(cfg.out_degree(src.id) == 2);
    bool has_halt = false;
    for (const auto& b : cfg.blocks) has_halt |= b.synthetic_halt;
    CHECK(has_halt);
}

TEST_CASE("cfg invariants hold on random code") {
    std::mt19937_64 rng(2026);
    for (int trial = 0; trial < 300; ++trial) {
        Bytes code = random_code(rng);
        auto instructions = disassemble(code);
        auto cfg = build_cfg(instructions);
        check_cfg_invariants(cfg, instructions);
        CHECK(serialize(instructions) == code);
    }
}

TEST_CASE("hex parsing accepts prefixes and whitespace") {
    CHECK(parse_hex("0x600100") == Bytes{0x60, 0x01, 0x00});
    CHECK(parse_hex("  60 01\n00 ") == Bytes{0x60, 0x01, 0x00});
    CHECK_THROWS_AS(parse_hex("60g1"), ParseError);
    CHECK_THROWS_AS(parse_hex("600"), ParseError);
}

TEST_CASE("json dump exposes blocks and edges") {
    auto cfg = build_cfg(disassemble(parse_hex("600456fe5b00")));
    std::string json = cfg_to_json(cfg);
    CHECK(json.find("\"blocks\"") != std::string::npos);
    CHECK(json.find("\"edges\"") != std::string::npos);
    CHECK(json.find("\"jump\"") != std::string::npos);
    std::string dot = cfg_to_dot(cfg);
    CHECK(dot.find("digraph") != std::string::npos);
}

}  // TEST_SUITE
