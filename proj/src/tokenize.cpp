// Copyright 2026 The natlm Authors.
// SPDX-License-Identifier: Apache-2.0
#include "natlm/tokenize.hpp"

#include <cctype>

namespace natlm::ast {

namespace {

bool is_lower(char c) { return std::islower(static_cast<unsigned char>(c)) != 0; }
bool is_upper(char c) { return std::isupper(static_cast<unsigned char>(c)) != 0; }
bool is_digit(char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; }
bool is_letter(char c) { return is_lower(c) || is_upper(c); }

}  // namespace

std::vector<std::string> split_identifier(const std::string& identifier) {
    std::vector<std::string> out;
    std::string current;
    auto flush = [&] {
        if (!current.empty()) {
            out.push_back(current);
            current.clear();
        }
    };
    for (size_t i = 0; i < identifier.size(); ++i) {
        char c = identifier[i];
        if (c == '_' || std::isspace(static_cast<unsigned char>(c))) {
            flush();
            continue;
        }
        if (!current.empty()) {
            char prev = current.back();
            bool camel = is_lower(prev) && is_upper(c);
            bool letter_digit = (is_letter(prev) && is_digit(c)) || (is_digit(prev) && is_letter(c));
            if (camel || letter_digit) flush();
        }
        current.push_back(c);
    }
    flush();
    return out;
}

TokenSequence tokenize(const std::vector<const AstNode*>& sequence,
                       const TokenizeOptions& options) {
    TokenSequence seq;
    seq.tokens.push_back(kClsToken);

    size_t body_cap = options.max_tokens >= 2 ? options.max_tokens - 1 : 1;
    auto emit = [&](const std::string& token) {
        if (token.empty()) return;
        if (seq.tokens.size() >= body_cap) {
            seq.truncated = true;
            return;
        }
        seq.tokens.push_back(token);
    };

    static const char* kIdentifierAttrs[] = {"name", "memberName", "value"};
    for (const AstNode* node : sequence) {
        emit(node->kind);
        for (const char* key : kIdentifierAttrs) {
            if (const std::string* v = node->attr(key)) {
                for (auto& sub : split_identifier(*v)) emit(sub);
            }
        }
        if (const std::string* op = node->attr("operator")) emit(*op);
    }

    seq.tokens.push_back(kSepToken);
    seq.positions.resize(seq.tokens.size());
    for (size_t i = 0; i < seq.positions.size(); ++i) seq.positions[i] = i;
    return seq;
}

}  // namespace natlm::ast
