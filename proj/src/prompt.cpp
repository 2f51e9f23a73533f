// Copyright 2026 The natlm Authors.
// SPDX-License-Identifier: Apache-2.0
#include "natlm/prompt.hpp"

#include <algorithm>
#include <sstream>

#include <json.hpp>

namespace natlm::llm {

namespace {

const char* kInstructions =
    "You are a smart-contract security auditor. Analyze the contract below for these "
    "NFT-specific defect classes: erc721_reentrancy, public_burn, risky_mutable_proxy, "
    "unlimited_minting. Use the static facts and the similar known defects as context. "
    "Report every defect you find as a line 'DEFECT: <class> CONFIDENCE: <0..1>' followed "
    "by a line 'RATIONALE: <one sentence>'. If the contract is clean, reply "
    "'NO DEFECTS DETECTED'.";

size_t approx_tokens(size_t chars) { return chars / 4; }

}  // namespace

std::string PromptBundle::render() const {
    std::ostringstream out;
    out << instructions << "\n\n";
    out << "=== CONTRACT: " << contract_name << " ===\n" << contract_source << "\n";
    if (truncated) out << "[note] " << truncation_note << "\n";
    out << "\n=== STATIC FACTS ===\n" << facts_summary;
    out << "\n=== SIMILAR KNOWN DEFECTS (most similar first) ===\n";
    if (retrieved.empty()) {
        out << "no similar defects retrieved\n";
    } else {
        for (size_t i = 0; i < retrieved.size(); ++i) {
            const auto& hit = retrieved[i];
            char score[32];
            std::snprintf(score, sizeof(score), "%.4f", hit.score);
            out << (i + 1) << ". defect_type=" << oracle::defect_type_name(hit.defect_type)
                << " score=" << score << "\n";
            out << hit.snippet << "\n";
        }
    }
    out << "\n=== RESPONSE FORMAT ===\n"
        << "DEFECT: <class> CONFIDENCE: <0..1>\nRATIONALE: <one sentence>\n";
    return out.str();
}

std::string PromptBundle::to_json() const {
    nlohmann::ordered_json j;
    j["contract_name"] = contract_name;
    j["contract_source"] = contract_source;
    j["facts_summary"] = facts_summary;
    j["retrieved"] = nlohmann::ordered_json::array();
    for (const auto& hit : retrieved)
        j["retrieved"].push_back({{"defect_type", oracle::defect_type_name(hit.defect_type)},
                                  {"snippet", hit.snippet},
                                  {"score", hit.score}});
    j["instructions"] = instructions;
    j["template_version"] = template_version;
    j["truncated"] = truncated;
    if (truncated) j["truncation_note"] = truncation_note;
    return j.dump(2);
}

PromptBundle assemble_prompt(const std::string& contract_name, const std::string& source,
                             const ast::ContractFacts& facts,
                             const std::vector<RetrievedDefect>& hits,
                             const PromptOptions& options) {
    PromptBundle bundle;
    bundle.contract_name = contract_name;
    bundle.contract_source = source;
    bundle.facts_summary = render_facts_summary(facts);
    bundle.retrieved = hits;
    std::stable_sort(bundle.retrieved.begin(), bundle.retrieved.end(),
                     [](const RetrievedDefect& a, const RetrievedDefect& b) {
                         return a.score > b.score;
                     });
    bundle.instructions = kInstructions;

    if (approx_tokens(bundle.render().size()) <= options.token_budget) return bundle;

    // Drop whole functions from the source, least informative first.
    struct Candidate {
        std::string name;
        long start;
        long length;
        size_t events;
    };
    std::vector<Candidate> candidates;
    for (const auto& fn : facts.functions) {
        if (!fn.span.valid()) continue;
        if (fn.span.start < 0 || fn.span.end() > static_cast<long>(source.size())) continue;
        candidates.push_back({fn.name, fn.span.start, fn.span.length, fn.call_order.size()});
    }
    std::stable_sort(candidates.begin(), candidates.end(), [](const Candidate& a,
                                                              const Candidate& b) {
        if (a.events != b.events) return a.events < b.events;
        if (a.length != b.length) return a.length > b.length;
        return a.name < b.name;
    });

    std::vector<std::pair<long, long>> cuts;  // (start, length), applied back-to-front
    std::vector<std::string> omitted;
    for (const auto& c : candidates) {
        if (approx_tokens(bundle.render().size()) <= options.token_budget) break;
        cuts.push_back({c.start, c.length});
        omitted.push_back(c.name);
        std::string truncated_source = source;
        auto ordered = cuts;
        std::sort(ordered.begin(), ordered.end(),
                  [](const auto& a, const auto& b) { return a.first > b.first; });
        for (const auto& [start, length] : ordered)
            truncated_source.replace(static_cast<size_t>(start), static_cast<size_t>(length),
                                     "/* omitted */");
        bundle.contract_source = truncated_source;
        bundle.truncated = true;
        std::ostringstream note;
        note << "source truncated to fit the prompt budget; omitted functions:";
        for (const auto& name : omitted) note << " " << name;
        bundle.truncation_note = note.str();
    }
    return bundle;
}

}  // namespace natlm::llm
