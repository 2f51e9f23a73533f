// Copyright 2026 The natlm Authors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include "natlm/facts.hpp"
#include "natlm/oracle.hpp"

namespace natlm::llm {

inline constexpr int kPromptTemplateVersion = 1;

struct RetrievedDefect {
    oracle::DefectType defect_type{};
    std::string snippet;
    double score = 0.0;
};

struct PromptBundle {
    std::string contract_name;
    std::string contract_source;  // possibly truncated
    std::string facts_summary;
    std::vector<RetrievedDefect> retrieved;  // descending score
    std::string instructions;
    int template_version = kPromptTemplateVersion;
    bool truncated = false;
    std::string truncation_note;

    /// Deterministic full prompt text; same bundle, same bytes.
    std::string render() const;
    std::string to_json() const;
};

struct PromptOptions {
    size_t token_budget = 4096;  // ~4 characters per token
};

/// Deterministic template instantiation. Oversized sources are truncated
/// function-by-function, lowest-relevance (fewest call/write events) first,
/// and the omissions are noted in the bundle.
PromptBundle assemble_prompt(const std::string& contract_name, const std::string& source,
                             const ast::ContractFacts& facts,
                             const std::vector<RetrievedDefect>& hits,
                             const PromptOptions& options = {});

}  // namespace natlm::llm
