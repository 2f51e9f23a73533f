// Copyright 2026 The natlm Authors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

namespace natlm::ast {

struct SourceSpan {
    long start = -1;
    long length = -1;
    bool valid() const { return start >= 0 && length >= 0; }
    long end() const { return start + length; }
};

/// Generic view of one solc AST node: the nodeType tag, flattened scalar
/// attributes, a parsed source span and the child nodes in source order.
struct AstNode {
    long id = -1;
    std::string kind;
    SourceSpan span;
    std::map<std::string, std::string> attributes;
    std::vector<std::unique_ptr<AstNode>> children;

    const std::string* attr(const std::string& key) const {
        auto it = attributes.find(key);
        return it == attributes.end() ? nullptr : &it->second;
    }
    std::string attr_or(const std::string& key, const std::string& fallback) const {
        const std::string* v = attr(key);
        return v ? *v : fallback;
    }
    size_t node_count() const;
};

/// Parse the `ast` object of Solidity-compiler standard-JSON output. Accepts
/// either a bare AST node or a full standard-JSON document (in which case the
/// first source unit's `ast` field is taken, or the one for `source_name`).
std::unique_ptr<AstNode> parse_ast(const std::string& document, const std::string& source_name = "");

/// Pre-order depth-first traversal; children are visited in source order.
std::vector<const AstNode*> linearize_dfs(const AstNode& tree);

/// Find contract definitions in a parsed tree (top level of a source unit).
std::vector<const AstNode*> find_contracts(const AstNode& tree);
const AstNode* find_contract(const AstNode& tree, const std::string& name);

}  // namespace natlm::ast
