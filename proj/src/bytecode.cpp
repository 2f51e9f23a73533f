// Copyright 2026 The natlm Authors.
// SPDX-License-Identifier: Apache-2.0
#include "natlm/bytecode.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <set>
#include <sstream>

#include "natlm/opcodes.hpp"

#include <json.hpp>

namespace natlm::evm {

std::string Instruction::to_string() const {
    std::string s = mnemonic(opcode);
    if (!immediate.empty()) {
        s += " 0x";
        s += to_hex(immediate);
        if (truncated) s += " (truncated)";
    }
    return s;
}

const char* edge_kind_name(EdgeKind kind) {
    switch (kind) {
    case EdgeKind::Fallthrough: return "fallthrough";
    case EdgeKind::Jump: return "jump";
    case EdgeKind::BranchTaken: return "branch-taken";
    case EdgeKind::BranchNotTaken: return "branch-not-taken";
    case EdgeKind::Unresolved: return "unresolved";
    }
    return "?";
}

int Cfg::out_degree(int block_id) const {
    int n = 0;
    for (const auto& e : edges)
        if (e.from == block_id) ++n;
    return n;
}

std::optional<int> Cfg::block_at_offset(size_t offset) const {
    for (const auto& b : blocks)
        if (!b.synthetic_halt && b.start_offset == offset) return b.id;
    return std::nullopt;
}

std::vector<Instruction> disassemble(const Bytes& code) {
    std::vector<Instruction> out;
    size_t i = 0;
    while (i < code.size()) {
        Instruction ins;
        ins.offset = i;
        ins.opcode = code[i];
        ++i;
        if (int width = push_width(ins.opcode); width > 0) {
            size_t available = std::min<size_t>(static_cast<size_t>(width), code.size() - i);
            ins.immediate.assign(code.begin() + static_cast<long>(i),
                                 code.begin() + static_cast<long>(i + available));
            ins.immediate.resize(static_cast<size_t>(width), 0);  // zero-pad on the right
            ins.immediate_present = static_cast<int>(available);
            ins.truncated = available < static_cast<size_t>(width);
            i += available;
        }
        out.push_back(std::move(ins));
    }
    return out;
}

Bytes serialize(const std::vector<Instruction>& instructions) {
    Bytes out;
    for (const auto& ins : instructions) {
        out.push_back(ins.opcode);
        out.insert(out.end(), ins.immediate.begin(),
                   ins.immediate.begin() + ins.immediate_present);
    }
    return out;
}

namespace {

// Immediate value as an offset, if it fits in 64 bits.
std::optional<uint64_t> push_value(const Instruction& ins) {
    uint64_t v = 0;
    size_t n = ins.immediate.size();
    if (n > 8) {
        for (size_t i = 0; i + 8 < n; ++i)
            if (ins.immediate[i] != 0) return std::nullopt;
    }
    for (size_t i = (n > 8 ? n - 8 : 0); i < n; ++i) v = v << 8 | ins.immediate[i];
    return v;
}

void compute_reachability(Cfg& cfg) {
    for (auto& b : cfg.blocks) b.reachable = false;
    if (cfg.blocks.empty()) return;
    std::deque<int> work{cfg.entry};
    cfg.blocks[static_cast<size_t>(cfg.entry)].reachable = true;
    while (!work.empty()) {
        int v = work.front();
        work.pop_front();
        for (const auto& e : cfg.edges) {
            if (e.from != v || e.kind == EdgeKind::Unresolved) continue;
            auto& target = cfg.blocks[static_cast<size_t>(e.to)];
            if (!target.reachable) {
                target.reachable = true;
                work.push_back(e.to);
            }
        }
    }
}

}  // namespace

Cfg build_cfg(const std::vector<Instruction>& instructions) {
    Cfg cfg;
    if (instructions.empty()) return cfg;

    // Leaders: offset 0, every JUMPDEST, every instruction after a terminator.
    std::set<size_t> leaders{instructions.front().offset};
    for (size_t i = 0; i < instructions.size(); ++i) {
        const auto& ins = instructions[i];
        if (ins.opcode == OP_JUMPDEST) leaders.insert(ins.offset);
        if (is_terminator(ins.opcode) && i + 1 < instructions.size())
            leaders.insert(instructions[i + 1].offset);
    }

    for (const auto& ins : instructions) {
        if (leaders.count(ins.offset)) {
            BasicBlock b;
            b.id = static_cast<int>(cfg.blocks.size());
            b.start_offset = ins.offset;
            cfg.blocks.push_back(std::move(b));
        }
        cfg.blocks.back().instructions.push_back(ins);
    }

    // A block whose control can run past the end of the code falls into an
    // implicit STOP; materialize it once if anything needs it.
    const auto& tail = cfg.blocks.back();
    bool needs_halt =
        !is_terminator(tail.last().opcode) || tail.last().opcode == OP_JUMPI;
    int halt_id = -1;
    if (needs_halt) {
        BasicBlock halt;
        halt.id = static_cast<int>(cfg.blocks.size());
        halt.start_offset = tail.last().offset + 1 + tail.last().immediate.size();
        halt.synthetic_halt = true;
        Instruction stop;
        stop.offset = halt.start_offset;
        stop.opcode = OP_STOP;
        halt.instructions.push_back(stop);
        halt_id = halt.id;
        cfg.blocks.push_back(std::move(halt));
    }

    size_t real_blocks = cfg.blocks.size() - (needs_halt ? 1 : 0);
    for (size_t bi = 0; bi < real_blocks; ++bi) {
        const auto& b = cfg.blocks[bi];
        uint8_t op = b.last().opcode;
        int next_id = bi + 1 < real_blocks ? static_cast<int>(bi + 1) : halt_id;
        if (op == OP_JUMP) {
            cfg.edges.push_back({b.id, b.id, EdgeKind::Unresolved});
        } else if (op == OP_JUMPI) {
            cfg.edges.push_back({b.id, b.id, EdgeKind::Unresolved});
            cfg.edges.push_back({b.id, next_id, EdgeKind::BranchNotTaken});
        } else if (!is_terminator(op)) {
            cfg.edges.push_back({b.id, next_id, EdgeKind::Fallthrough});
        }
    }

    resolve_jump_targets(cfg, instructions);
    return cfg;
}

void resolve_jump_targets(Cfg& cfg, const std::vector<Instruction>& instructions) {
    std::map<size_t, size_t> index_at_offset;
    for (size_t i = 0; i < instructions.size(); ++i) index_at_offset[instructions[i].offset] = i;

    auto add_diag = [&cfg](const std::string& msg) {
        if (std::find(cfg.diagnostics.begin(), cfg.diagnostics.end(), msg) == cfg.diagnostics.end())
            cfg.diagnostics.push_back(msg);
    };

    for (auto& edge : cfg.edges) {
        if (edge.kind != EdgeKind::Unresolved) continue;
        const auto& block = cfg.blocks[static_cast<size_t>(edge.from)];
        const Instruction& jump = block.last();
        if (jump.opcode != OP_JUMP && jump.opcode != OP_JUMPI) continue;

        auto it = index_at_offset.find(jump.offset);
        if (it == index_at_offset.end() || it->second == 0) continue;
        const Instruction& prev = instructions[it->second - 1];
        if (!is_push(prev.opcode)) continue;  // no adjacent constant: stays unresolved

        auto target = push_value(prev);
        std::ostringstream diag;
        if (!target) {
            diag << "jump at offset " << jump.offset << ": pushed target exceeds code range";
            add_diag(diag.str());
            continue;
        }
        auto target_block = cfg.block_at_offset(*target);
        bool at_jumpdest =
            target_block &&
            cfg.blocks[static_cast<size_t>(*target_block)].instructions.front().opcode == OP_JUMPDEST;
        if (!at_jumpdest) {
            diag << "jump at offset " << jump.offset << ": target " << *target
                 << " is not a JUMPDEST; edge kept unresolved";
            add_diag(diag.str());
            continue;
        }
        edge.to = *target_block;
        edge.kind = jump.opcode == OP_JUMP ? EdgeKind::Jump : EdgeKind::BranchTaken;
    }

    compute_reachability(cfg);
}

std::string cfg_to_json(const Cfg& cfg) {
    nlohmann::ordered_json j;
    j["entry"] = cfg.entry;
    j["blocks"] = nlohmann::ordered_json::array();
    for (const auto& b : cfg.blocks) {
        nlohmann::ordered_json jb;
        jb["id"] = b.id;
        jb["start"] = b.start_offset;
        jb["ops"] = nlohmann::ordered_json::array();
        for (const auto& ins : b.instructions) jb["ops"].push_back(ins.to_string());
        jb["reachable"] = b.reachable;
        if (b.synthetic_halt) jb["synthetic_halt"] = true;
        j["blocks"].push_back(std::move(jb));
    }
    j["edges"] = nlohmann::ordered_json::array();
    for (const auto& e : cfg.edges)
        j["edges"].push_back({{"from", e.from}, {"to", e.to}, {"kind", edge_kind_name(e.kind)}});
    if (!cfg.diagnostics.empty()) j["diagnostics"] = cfg.diagnostics;
    return j.dump(2);
}

std::string cfg_to_dot(const Cfg& cfg) {
    std::ostringstream out;
    out << "digraph cfg {\n  node [shape=box fontname=\"monospace\"];\n";
    for (const auto& b : cfg.blocks) {
        out << "  b" << b.id << " [label=\"";
        out << "block " << b.id << " @" << b.start_offset;
        for (const auto& ins : b.instructions) out << "\\n" << ins.to_string();
        out << "\"";
        if (!b.reachable) out << " style=dashed";
        out << "];\n";
    }
    for (const auto& e : cfg.edges)
        out << "  b" << e.from << " -> b" << e.to << " [label=\"" << edge_kind_name(e.kind)
            << "\"];\n";
    out << "}\n";
    return out.str();
}

}  // namespace natlm::evm
