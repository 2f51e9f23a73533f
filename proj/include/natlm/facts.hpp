// Copyright 2026 The natlm Authors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "natlm/ast.hpp"

namespace natlm::ast {

struct ExternalCall {
    std::string callee;   // resolved member/identifier name
    SourceSpan span;
    bool low_level = false;       // call/delegatecall/staticcall/send/transfer
    bool safe_callback = false;   // ERC-721 safe-transfer family (onERC721Received)
};

struct StateWrite {
    std::string variable;
    SourceSpan span;
};

struct Comparison {
    std::vector<std::string> left_names;
    std::string op;
    std::vector<std::string> right_names;
};

/// One require/assert argument or if-condition, summarized as the names it
/// mentions plus any comparisons it contains.
struct CheckRecord {
    std::vector<std::string> names;
    std::vector<Comparison> comparisons;
};

struct FunctionEvent {
    enum class Kind { ExternalCall, StateWrite };
    Kind kind;
    size_t index;  // into external_calls / writes
    long offset;   // source position, defines call_order
};

struct FunctionFacts {
    std::string name;
    std::string visibility;
    bool is_constructor = false;
    SourceSpan span;
    std::vector<std::string> modifiers;
    std::vector<ExternalCall> external_calls;
    std::vector<std::string> internal_calls;  // callee names not classified external
    std::vector<StateWrite> writes;
    std::set<std::string> mutators;       // state variables written
    std::vector<FunctionEvent> call_order;
    std::vector<CheckRecord> checks;

    /// True when the function name or any callee name contains `primitive`
    /// (case-insensitive). Single level, no transitive closure.
    bool reaches(const std::string& primitive) const;
};

struct StateVar {
    std::string name;
    std::string type;
    std::string visibility;
    bool is_mutable = true;  // false for constant/immutable declarations
};

struct ContractFacts {
    std::string contract_name;
    std::vector<StateVar> state_vars;
    std::vector<FunctionFacts> functions;
    std::map<std::string, size_t> skipped_kinds;  // diagnostics tally

    size_t external_call_count() const;
    size_t mint_site_count() const;
    const FunctionFacts* function(const std::string& name) const;
};

/// Extract state variables, function definitions and ordered call/write
/// records from a contract definition subtree.
ContractFacts extract_facts(const AstNode& contract);

/// Convenience: facts for the named (or first) contract in a parsed tree.
ContractFacts extract_facts_from_tree(const AstNode& tree, const std::string& contract_name = "");

/// Deterministic plain-text rendering used in prompts and reports.
std::string render_facts_summary(const ContractFacts& facts);

}  // namespace natlm::ast
