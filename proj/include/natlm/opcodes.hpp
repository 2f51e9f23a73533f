// Copyright 2026 The natlm Authors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>

namespace natlm::evm {

constexpr uint8_t OP_STOP = 0x00;
constexpr uint8_t OP_JUMP = 0x56;
constexpr uint8_t OP_JUMPI = 0x57;
constexpr uint8_t OP_JUMPDEST = 0x5b;
constexpr uint8_t OP_PUSH0 = 0x5f;
constexpr uint8_t OP_PUSH1 = 0x60;
constexpr uint8_t OP_PUSH32 = 0x7f;
constexpr uint8_t OP_RETURN = 0xf3;
constexpr uint8_t OP_REVERT = 0xfd;
constexpr uint8_t OP_INVALID = 0xfe;
constexpr uint8_t OP_SELFDESTRUCT = 0xff;

/// True for opcodes assigned in the EVM instruction set; unassigned bytes
/// decode as INVALID placeholders that keep their raw byte.
bool is_defined(uint8_t op);

/// Number of immediate bytes following the opcode (nonzero only for PUSH1..PUSH32).
int push_width(uint8_t op);

bool is_push(uint8_t op);

/// Instructions that end a basic block: JUMP, JUMPI, STOP, RETURN, REVERT,
/// SELFDESTRUCT and INVALID (including undefined bytes).
bool is_terminator(uint8_t op);

/// Terminators that halt execution (no successors at all).
bool is_halt(uint8_t op);

/// Mnemonic for a defined opcode; undefined bytes render as INVALID(0xNN).
std::string mnemonic(uint8_t op);

}  // namespace natlm::evm
