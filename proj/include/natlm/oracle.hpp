// Copyright 2026 The natlm Authors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include "natlm/facts.hpp"

namespace natlm::oracle {

enum class DefectType { Erc721Reentrancy = 0, PublicBurn = 1, RiskyMutableProxy = 2,
                        UnlimitedMinting = 3 };

inline constexpr int kDefectTypeCount = 4;

const char* defect_type_name(DefectType type);
DefectType defect_type_from_name(const std::string& name);
std::string defect_description(DefectType type);
std::string defect_remediation(DefectType type);

struct Finding {
    DefectType defect_type{};
    std::string function;
    ast::SourceSpan span;
    std::string evidence;  // which rule clause fired
};

/// Rule-based detectors for the four defect classes. Deterministic; used for
/// labeling and verification, not as the product detector.
std::vector<Finding> detect_erc721_reentrancy(const ast::ContractFacts& facts);
std::vector<Finding> detect_public_burn(const ast::ContractFacts& facts);
std::vector<Finding> detect_risky_mutable_proxy(const ast::ContractFacts& facts);
std::vector<Finding> detect_unlimited_minting(const ast::ContractFacts& facts);

/// All four detectors, concatenated in defect-type order.
std::vector<Finding> detect_all(const ast::ContractFacts& facts);

std::string findings_to_json(const std::vector<Finding>& findings);

}  // namespace natlm::oracle
