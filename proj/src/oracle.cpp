// Copyright 2026 The natlm Authors.
// SPDX-License-Identifier: Apache-2.0
#include "natlm/oracle.hpp"

#include <sstream>

#include <json.hpp>

#include "natlm/util.hpp"

namespace natlm::oracle {

using ast::CheckRecord;
using ast::ContractFacts;
using ast::FunctionFacts;

const char* defect_type_name(DefectType type) {
    switch (type) {
    case DefectType::Erc721Reentrancy: return "erc721_reentrancy";
    case DefectType::PublicBurn: return "public_burn";
    case DefectType::RiskyMutableProxy: return "risky_mutable_proxy";
    case DefectType::UnlimitedMinting: return "unlimited_minting";
    }
    return "?";
}

DefectType defect_type_from_name(const std::string& name) {
    for (int i = 0; i < kDefectTypeCount; ++i)
        if (name == defect_type_name(static_cast<DefectType>(i)))
            return static_cast<DefectType>(i);
    throw Error("unknown defect type: " + name);
}

std::string defect_description(DefectType type) {
    switch (type) {
    case DefectType::Erc721Reentrancy:
        return "state variable modified after an external invocation whose callback can re-enter";
    case DefectType::PublicBurn:
        return "token burn entry point reachable without an ownership or approval check";
    case DefectType::RiskyMutableProxy:
        return "proxy registry address writable after deployment";
    case DefectType::UnlimitedMinting:
        return "minting path without a max-supply comparison";
    }
    return "?";
}

std::string defect_remediation(DefectType type) {
    switch (type) {
    case DefectType::Erc721Reentrancy:
        return "apply a reentrancy guard or move all state updates before the external call";
    case DefectType::PublicBurn:
        return "require the caller to be the token owner or an approved operator before burning";
    case DefectType::RiskyMutableProxy:
        return "set the proxy registry once in the constructor and drop the setter";
    case DefectType::UnlimitedMinting:
        return "compare the running supply against the max supply before minting";
    }
    return "?";
}

namespace {

bool is_entry_point(const FunctionFacts& fn) {
    return !fn.is_constructor && (fn.visibility == "public" || fn.visibility == "external");
}

bool has_reentrancy_guard(const FunctionFacts& fn) {
    for (const auto& m : fn.modifiers) {
        std::string lower = to_lower(m);
        if (lower.find("reentran") != std::string::npos) return true;
        if (lower == "lock" || lower == "locked" || lower == "mutex" || lower == "noreentry")
            return true;
    }
    return false;
}

bool has_access_control_modifier(const FunctionFacts& fn) {
    for (const auto& m : fn.modifiers)
        if (to_lower(m).rfind("only", 0) == 0) return true;
    return false;
}

bool owner_or_approval_name(const std::string& name) {
    return contains_ci(name, "owner") || contains_ci(name, "approve") ||
           contains_ci(name, "approval");
}

bool has_owner_or_approval_check(const FunctionFacts& fn) {
    for (const auto& check : fn.checks)
        for (const auto& name : check.names)
            if (owner_or_approval_name(name)) return true;
    return false;
}

bool cap_like(const std::string& name) {
    return contains_ci(name, "max") || contains_ci(name, "cap") || contains_ci(name, "limit");
}

bool supply_like(const std::string& name) {
    if (cap_like(name)) return false;  // MAX_SUPPLY counts as the cap side only
    return contains_ci(name, "supply") || contains_ci(name, "minted") ||
           contains_ci(name, "counter");
}

bool comparison_guards_supply(const ast::Comparison& cmp) {
    bool has_supply = false, has_cap = false;
    for (const auto& n : cmp.left_names) {
        has_supply |= supply_like(n);
        has_cap |= cap_like(n);
    }
    for (const auto& n : cmp.right_names) {
        has_supply |= supply_like(n);
        has_cap |= cap_like(n);
    }
    return has_supply && has_cap;
}

bool has_supply_cap_check(const FunctionFacts& fn) {
    for (const auto& check : fn.checks)
        for (const auto& cmp : check.comparisons)
            if (comparison_guards_supply(cmp)) return true;
    return false;
}

bool proxy_like_state_var(const ast::StateVar& var) {
    bool address_typed = var.type.rfind("address", 0) == 0 || var.type.rfind("contract ", 0) == 0;
    bool proxy_named = contains_ci(var.name, "proxy") || contains_ci(var.name, "registry");
    return address_typed && proxy_named;
}

}  // namespace

std::vector<Finding> detect_erc721_reentrancy(const ContractFacts& facts) {
    std::vector<Finding> findings;
    for (const auto& fn : facts.functions) {
        if (has_reentrancy_guard(fn)) continue;
        // First external call, then any later state write.
        long call_offset = -1;
        std::string call_name;
        for (const auto& event : fn.call_order) {
            if (event.kind == ast::FunctionEvent::Kind::ExternalCall) {
                if (call_offset < 0) {
                    call_offset = event.offset;
                    call_name = fn.external_calls[event.index].callee;
                }
            } else if (call_offset >= 0) {
                const auto& write = fn.writes[event.index];
                std::ostringstream evidence;
                evidence << "external call " << call_name << " precedes write to "
                         << write.variable << " with no reentrancy guard";
                findings.push_back(
                    {DefectType::Erc721Reentrancy, fn.name, write.span, evidence.str()});
                break;
            }
        }
    }
    return findings;
}

std::vector<Finding> detect_public_burn(const ContractFacts& facts) {
    std::vector<Finding> findings;
    for (const auto& fn : facts.functions) {
        if (!is_entry_point(fn)) continue;
        if (!fn.reaches("burn")) continue;
        if (has_owner_or_approval_check(fn) || has_access_control_modifier(fn)) continue;
        findings.push_back({DefectType::PublicBurn, fn.name, fn.span,
                            "burn entry point without owner or approval check"});
    }
    return findings;
}

std::vector<Finding> detect_risky_mutable_proxy(const ContractFacts& facts) {
    std::vector<Finding> findings;
    for (const auto& var : facts.state_vars) {
        if (!proxy_like_state_var(var)) continue;
        for (const auto& fn : facts.functions) {
            if (fn.is_constructor) continue;
            if (!fn.mutators.count(var.name)) continue;
            ast::SourceSpan span = fn.span;
            for (const auto& write : fn.writes)
                if (write.variable == var.name) span = write.span;
            findings.push_back({DefectType::RiskyMutableProxy, fn.name, span,
                                "proxy registry variable " + var.name +
                                    " written outside the constructor"});
        }
    }
    return findings;
}

std::vector<Finding> detect_unlimited_minting(const ContractFacts& facts) {
    std::vector<Finding> findings;
    for (const auto& fn : facts.functions) {
        if (!is_entry_point(fn)) continue;
        if (!fn.reaches("mint")) continue;
        if (has_supply_cap_check(fn)) continue;
        findings.push_back({DefectType::UnlimitedMinting, fn.name, fn.span,
                            "mint path without a supply-cap comparison"});
    }
    return findings;
}

std::vector<Finding> detect_all(const ContractFacts& facts) {
    std::vector<Finding> all;
    for (auto& f : detect_erc721_reentrancy(facts)) all.push_back(f);
    for (auto& f : detect_public_burn(facts)) all.push_back(f);
    for (auto& f : detect_risky_mutable_proxy(facts)) all.push_back(f);
    for (auto& f : detect_unlimited_minting(facts)) all.push_back(f);
    return all;
}

std::string findings_to_json(const std::vector<Finding>& findings) {
    nlohmann::ordered_json j = nlohmann::ordered_json::array();
    for (const auto& f : findings) {
        j.push_back({{"defect_type", defect_type_name(f.defect_type)},
                     {"function", f.function},
                     {"span", {{"start", f.span.start}, {"length", f.span.length}}},
                     {"evidence", f.evidence}});
    }
    return j.dump(2);
}

}  // namespace natlm::oracle
