// Copyright 2026 The natlm Authors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "natlm/util.hpp"

namespace natlm::evm {

/// One decoded EVM instruction. `opcode` keeps the raw byte so that
/// re-serializing a decoded sequence reproduces the input exactly.
struct Instruction {
    size_t offset = 0;
    uint8_t opcode = 0;
    Bytes immediate;          // right-zero-padded to the push width when truncated
    int immediate_present = 0;  // bytes actually present in the code
    bool truncated = false;

    std::string to_string() const;
};

enum class EdgeKind { Fallthrough, Jump, BranchTaken, BranchNotTaken, Unresolved };

const char* edge_kind_name(EdgeKind kind);

struct CfgEdge {
    int from = 0;
    int to = 0;
    EdgeKind kind = EdgeKind::Fallthrough;
};

struct BasicBlock {
    int id = 0;
    size_t start_offset = 0;
    std::vector<Instruction> instructions;
    bool reachable = true;
    // Present only for the implicit-halt block synthesized when control can
    // run past the end of the code (EVM treats that as STOP).
    bool synthetic_halt = false;

    const Instruction& last() const { return instructions.back(); }
};

struct Cfg {
    std::vector<BasicBlock> blocks;
    std::vector<CfgEdge> edges;
    int entry = 0;
    std::vector<std::string> diagnostics;

    int out_degree(int block_id) const;
    std::optional<int> block_at_offset(size_t offset) const;
};

/// Decode raw deployed-code bytes. Total: every byte is consumed, undefined
/// opcodes become INVALID placeholders, and a PUSH immediate cut off by the
/// end of the code is zero-padded and flagged truncated.
std::vector<Instruction> disassemble(const Bytes& code);

/// Re-serialize a decoded sequence (inverse of disassemble, padding aside).
Bytes serialize(const std::vector<Instruction>& instructions);

/// Recover basic blocks and control-flow edges. Leaders are offset 0, every
/// JUMPDEST and every instruction after a terminator. Dynamic jump targets
/// are resolved with single-step push-before-jump constant propagation;
/// everything else keeps an unresolved placeholder edge (a self-loop on the
/// source block, so every edge endpoint stays a valid block id).
Cfg build_cfg(const std::vector<Instruction>& instructions);

/// The resolution pass used by build_cfg, callable on its own. Idempotent.
void resolve_jump_targets(Cfg& cfg, const std::vector<Instruction>& instructions);

std::string cfg_to_json(const Cfg& cfg);
std::string cfg_to_dot(const Cfg& cfg);

}  // namespace natlm::evm
