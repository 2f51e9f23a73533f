// Copyright 2026 The natlm Authors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include "natlm/ast.hpp"

namespace natlm::ast {

inline constexpr const char* kClsToken = "[CLS]";
inline constexpr const char* kSepToken = "[SEP]";

struct TokenSequence {
    std::vector<std::string> tokens;    // [CLS] ... [SEP]
    std::vector<size_t> positions;      // 0..len-1, aligned 1:1 with tokens
    bool truncated = false;
};

/// Split an identifier into subtokens on underscores, lower-to-upper case
/// transitions and letter/digit boundaries. Fragment casing is preserved:
/// "mintTokens" -> {"mint", "Tokens"}.
std::vector<std::string> split_identifier(const std::string& identifier);

struct TokenizeOptions {
    size_t max_tokens = 2048;  // includes [CLS]/[SEP]
};

/// Turn a linearized node sequence into subtokens: each node contributes its
/// kind tag plus split name/member/operator/literal attributes.
TokenSequence tokenize(const std::vector<const AstNode*>& sequence,
                       const TokenizeOptions& options = {});

}  // namespace natlm::ast
