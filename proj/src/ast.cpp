// Copyright 2026 The natlm Authors.
// SPDX-License-Identifier: Apache-2.0
#include "natlm/ast.hpp"

#include <algorithm>
#include <set>

#include <json.hpp>

#include "natlm/util.hpp"

namespace natlm::ast {

using nlohmann::json;

namespace {

SourceSpan parse_src(const std::string& src) {
    // solc encodes spans as "start:length:fileIndex".
    SourceSpan span;
    size_t a = src.find(':');
    if (a == std::string::npos) return span;
    size_t b = src.find(':', a + 1);
    try {
        span.start = std::stol(src.substr(0, a));
        span.length = std::stol(src.substr(a + 1, b - a - 1));
    } catch (const std::exception&) {
        span = SourceSpan{};
    }
    return span;
}

bool is_node_object(const json& j) {
    return j.is_object() && j.contains("nodeType") && j["nodeType"].is_string();
}

std::unique_ptr<AstNode> convert(const json& j, const std::string& path,
                                 std::set<long>& seen_ids) {
    if (!j.is_object()) throw ParseError(path + ": expected AST node object");
    if (!is_node_object(j)) throw ParseError(path + ": missing nodeType");

    auto node = std::make_unique<AstNode>();
    node->kind = j["nodeType"].get<std::string>();
    if (j.contains("id") && j["id"].is_number_integer()) {
        node->id = j["id"].get<long>();
        if (!seen_ids.insert(node->id).second)
            throw ParseError(path + ": duplicate node id " + std::to_string(node->id));
    }

    for (const auto& [key, value] : j.items()) {
        if (key == "nodeType" || key == "id") continue;
        if (value.is_string()) {
            node->attributes[key] = value.get<std::string>();
        } else if (value.is_boolean()) {
            node->attributes[key] = value.get<bool>() ? "true" : "false";
        } else if (value.is_number_integer()) {
            node->attributes[key] = std::to_string(value.get<long long>());
        } else if (value.is_number()) {
            node->attributes[key] = value.dump();
        } else if (key == "typeDescriptions" && value.is_object()) {
            if (value.contains("typeString") && value["typeString"].is_string())
                node->attributes["type_string"] = value["typeString"].get<std::string>();
        } else if (is_node_object(value)) {
            node->children.push_back(convert(value, path + "." + key, seen_ids));
        } else if (value.is_array()) {
            for (size_t i = 0; i < value.size(); ++i) {
                const auto& item = value[i];
                if (is_node_object(item))
                    node->children.push_back(
                        convert(item, path + "." + key + "[" + std::to_string(i) + "]", seen_ids));
            }
        }
    }

    if (const std::string* src = node->attr("src")) node->span = parse_src(*src);

    // Child order must follow the source, not solc's JSON key order.
    std::stable_sort(node->children.begin(), node->children.end(),
                     [](const auto& a, const auto& b) {
                         if (!a->span.valid() || !b->span.valid()) return false;
                         return a->span.start < b->span.start;
                     });
    return node;
}

}  // namespace

size_t AstNode::node_count() const {
    size_t n = 1;
    for (const auto& c : children) n += c->node_count();
    return n;
}

std::unique_ptr<AstNode> parse_ast(const std::string& document, const std::string& source_name) {
    json j;
    try {
        j = json::parse(document);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("malformed JSON: ") + e.what());
    }

    const json* root = &j;
    // Standard-JSON output wraps per-source ASTs under "sources".
    if (j.is_object() && !j.contains("nodeType") && j.contains("sources") &&
        j["sources"].is_object()) {
        const json& sources = j["sources"];
        const json* unit = nullptr;
        if (!source_name.empty()) {
            auto it = sources.find(source_name);
            if (it == sources.end())
                throw ParseError("$.sources: no source unit named '" + source_name + "'");
            unit = &*it;
        } else if (!sources.empty()) {
            unit = &*sources.begin();
        } else {
            throw ParseError("$.sources: empty");
        }
        if (!unit->contains("ast")) throw ParseError("$.sources.*: missing ast");
        root = &(*unit)["ast"];
    }

    std::set<long> seen_ids;
    return convert(*root, "$", seen_ids);
}

std::vector<const AstNode*> linearize_dfs(const AstNode& tree) {
    std::vector<const AstNode*> out;
    out.reserve(64);
    // Explicit stack; children pushed in reverse so they pop in source order.
    std::vector<const AstNode*> stack{&tree};
    while (!stack.empty()) {
        const AstNode* n = stack.back();
        stack.pop_back();
        out.push_back(n);
        for (auto it = n->children.rbegin(); it != n->children.rend(); ++it)
            stack.push_back(it->get());
    }
    return out;
}

std::vector<const AstNode*> find_contracts(const AstNode& tree) {
    std::vector<const AstNode*> out;
    for (const AstNode* n : linearize_dfs(tree))
        if (n->kind == "ContractDefinition") out.push_back(n);
    return out;
}

const AstNode* find_contract(const AstNode& tree, const std::string& name) {
    for (const AstNode* c : find_contracts(tree)) {
        if (name.empty() || c->attr_or("name", "") == name) return c;
    }
    return nullptr;
}

}  // namespace natlm::ast
