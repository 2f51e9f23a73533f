// Copyright 2026 The natlm Authors.
// SPDX-License-Identifier: Apache-2.0
#include "natlm/opcodes.hpp"

#include <array>
#include <cstdio>

namespace natlm::evm {

namespace {

// Shanghai-era opcode names, indexed by byte. Null for unassigned bytes.
const std::array<const char*, 256> kNames = [] {
    std::array<const char*, 256> n{};
    n[0x00] = "STOP";
    n[0x01] = "ADD";
    n[0x02] = "MUL";
    n[0x03] = "SUB";
    n[0x04] = "DIV";
    n[0x05] = "SDIV";
    n[0x06] = "MOD";
    n[0x07] = "SMOD";
    n[0x08] = "ADDMOD";
    n[0x09] = "MULMOD";
    n[0x0a] = "EXP";
    n[0x0b] = "SIGNEXTEND";
    n[0x10] = "LT";
    n[0x11] = "GT";
    n[0x12] = "SLT";
    n[0x13] = "SGT";
    n[0x14] = "EQ";
    n[0x15] = "ISZERO";
    n[0x16] = "AND";
    n[0x17] = "OR";
    n[0x18] = "XOR";
    n[0x19] = "NOT";
    n[0x1a] = "BYTE";
    n[0x1b] = "SHL";
    n[0x1c] = "SHR";
    n[0x1d] = "SAR";
    n[0x20] = "KECCAK256";
    n[0x30] = "ADDRESS";
    n[0x31] = "BALANCE";
    n[0x32] = "ORIGIN";
    n[0x33] = "CALLER";
    n[0x34] = "CALLVALUE";
    n[0x35] = "CALLDATALOAD";
    n[0x36] = "CALLDATASIZE";
    n[0x37] = "CALLDATACOPY";
    n[0x38] = "CODESIZE";
    n[0x39] = "CODECOPY";
    n[0x3a] = "GASPRICE";
    n[0x3b] = "EXTCODESIZE";
    n[0x3c] = "EXTCODECOPY";
    n[0x3d] = "RETURNDATASIZE";
    n[0x3e] = "RETURNDATACOPY";
    n[0x3f] = "EXTCODEHASH";
    n[0x40] = "BLOCKHASH";
    n[0x41] = "COINBASE";
    n[0x42] = "TIMESTAMP";
    n[0x43] = "NUMBER";
    n[0x44] = "PREVRANDAO";
    n[0x45] = "GASLIMIT";
    n[0x46] = "CHAINID";
    n[0x47] = "SELFBALANCE";
    n[0x48] = "BASEFEE";
    n[0x50] = "POP";
    n[0x51] = "MLOAD";
    n[0x52] = "MSTORE";
    n[0x53] = "MSTORE8";
    n[0x54] = "SLOAD";
    n[0x55] = "SSTORE";
    n[0x56] = "JUMP";
    n[0x57] = "JUMPI";
    n[0x58] = "PC";
    n[0x59] = "MSIZE";
    n[0x5a] = "GAS";
    n[0x5b] = "JUMPDEST";
    n[0x5f] = "PUSH0";
    static char push_names[32][7];
    for (int i = 0; i < 32; ++i) {
        std::snprintf(push_names[i], sizeof(push_names[i]), "PUSH%d", i + 1);
        n[0x60 + i] = push_names[i];
    }
    static char dup_names[16][6];
    static char swap_names[16][7];
    for (int i = 0; i < 16; ++i) {
        std::snprintf(dup_names[i], sizeof(dup_names[i]), "DUP%d", i + 1);
        std::snprintf(swap_names[i], sizeof(swap_names[i]), "SWAP%d", i + 1);
        n[0x80 + i] = dup_names[i];
        n[0x90 + i] = swap_names[i];
    }
    static char log_names[5][5];
    for (int i = 0; i < 5; ++i) {
        std::snprintf(log_names[i], sizeof(log_names[i]), "LOG%d", i);
        n[0xa0 + i] = log_names[i];
    }
    n[0xf0] = "CREATE";
    n[0xf1] = "CALL";
    n[0xf2] = "CALLCODE";
    n[0xf3] = "RETURN";
    n[0xf4] = "DELEGATECALL";
    n[0xf5] = "CREATE2";
    n[0xfa] = "STATICCALL";
    n[0xfd] = "REVERT";
    n[0xfe] = "INVALID";
    n[0xff] = "SELFDESTRUCT";
    return n;
}();

}  // namespace

bool is_defined(uint8_t op) {
    return kNames[op] != nullptr;
}

int push_width(uint8_t op) {
    return (op >= OP_PUSH1 && op <= OP_PUSH32) ? op - OP_PUSH1 + 1 : 0;
}

bool is_push(uint8_t op) {
    return op >= OP_PUSH1 && op <= OP_PUSH32;
}

bool is_terminator(uint8_t op) {
    if (!is_defined(op)) return true;  // undefined bytes behave like INVALID
    switch (op) {
    case OP_STOP:
    case OP_JUMP:
    case OP_JUMPI:
    case OP_RETURN:
    case OP_REVERT:
    case OP_INVALID:
    case OP_SELFDESTRUCT: return true;
    default: return false;
    }
}

bool is_halt(uint8_t op) {
    if (!is_defined(op)) return true;
    switch (op) {
    case OP_STOP:
    case OP_RETURN:
    case OP_REVERT:
    case OP_INVALID:
    case OP_SELFDESTRUCT: return true;
    default: return false;
    }
}

std::string mnemonic(uint8_t op) {
    if (const char* name = kNames[op]) return name;
    char buf[16];
    std::snprintf(buf, sizeof(buf), "INVALID(0x%02x)", op);
    return buf;
}

}  // namespace natlm::evm
