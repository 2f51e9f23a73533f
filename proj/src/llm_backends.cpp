// Copyright 2026 The natlm Authors.
// SPDX-License-Identifier: Apache-2.0
#include "natlm/llm.hpp"

#include <array>
#include <cstdio>
#include <cstdlib>
#include <sstream>

#include <httplib.h>
#include <json.hpp>

#include "natlm/oracle.hpp"
#include "natlm/util.hpp"

namespace natlm::llm {

void MockLlmBackend::script_response(std::string text) {
    std::lock_guard<std::mutex> lock(mutex_);
    script_.push_back({false, std::move(text)});
}

void MockLlmBackend::script_failure(std::string message) {
    std::lock_guard<std::mutex> lock(mutex_);
    script_.push_back({true, std::move(message)});
}

std::string MockLlmBackend::complete(const std::string& prompt, double temperature,
                                     int sample_index) {
    (void)temperature;
    (void)sample_index;
    {
        std::lock_guard<std::mutex> lock(mutex_);
        if (!script_.empty()) {
            Scripted next = std::move(script_.front());
            script_.pop_front();
            if (next.fail) throw Error("mock backend scripted failure: " + next.payload);
            return next.payload;
        }
    }
    return heuristic_response(prompt);
}

namespace {

struct ParsedFunction {
    std::string name;
    std::string visibility;
    bool is_constructor = false;
    std::string modifiers;
    std::string sequence;
    std::string calls;
    std::vector<std::string> checks;
};

struct ParsedFacts {
    std::vector<std::string> proxy_like_vars;  // mutable address vars named proxy/registry
    std::vector<ParsedFunction> functions;
};

bool starts_with(const std::string& s, const std::string& prefix) {
    return s.rfind(prefix, 0) == 0;
}

std::string after(const std::string& line, const std::string& marker) {
    auto pos = line.find(marker);
    return pos == std::string::npos ? std::string() : line.substr(pos + marker.size());
}

// Pulls the facts block back out of the rendered prompt text.
ParsedFacts parse_facts_block(const std::string& prompt) {
    ParsedFacts parsed;
    std::istringstream in(prompt);
    std::string line;
    enum class Section { None, StateVars, Functions } section = Section::None;
    ParsedFunction* current = nullptr;
    bool in_facts = false;
    while (std::getline(in, line)) {
        if (starts_with(line, "=== STATIC FACTS ===")) {
            in_facts = true;
            continue;
        }
        if (in_facts && starts_with(line, "=== ")) break;
        if (!in_facts) continue;

        if (starts_with(line, "state variables:")) {
            section = Section::StateVars;
            continue;
        }
        if (starts_with(line, "functions:")) {
            section = Section::Functions;
            continue;
        }
        if (starts_with(line, "counts:")) continue;

        if (section == Section::StateVars && starts_with(line, "  - ")) {
            // "  - name: type [visibility, mutable]"
            std::string body = line.substr(4);
            auto colon = body.find(": ");
            if (colon == std::string::npos) continue;
            std::string name = body.substr(0, colon);
            std::string rest = body.substr(colon + 2);
            bool address_typed = starts_with(rest, "address") || starts_with(rest, "contract ");
            bool is_mutable = rest.find(", mutable]") != std::string::npos;
            bool proxy_named = contains_ci(name, "proxy") || contains_ci(name, "registry");
            if (address_typed && is_mutable && proxy_named) parsed.proxy_like_vars.push_back(name);
            continue;
        }

        if (section == Section::Functions) {
            if (starts_with(line, "  function ")) {
                ParsedFunction fn;
                std::string body = line.substr(11);
                auto bracket = body.find(" [");
                fn.name = body.substr(0, bracket);
                if (bracket != std::string::npos) {
                    auto close = body.find(']', bracket);
                    fn.visibility = body.substr(bracket + 2, close - bracket - 2);
                }
                fn.is_constructor = body.find("(constructor)") != std::string::npos;
                parsed.functions.push_back(fn);
                current = &parsed.functions.back();
            } else if (current && starts_with(line, "    modifiers: ")) {
                current->modifiers = after(line, "modifiers: ");
            } else if (current && starts_with(line, "    sequence: ")) {
                current->sequence = after(line, "sequence: ");
            } else if (current && starts_with(line, "    calls: ")) {
                current->calls = after(line, "calls: ");
            } else if (current && starts_with(line, "      - ")) {
                current->checks.push_back(line);
            }
        }
    }
    return parsed;
}

bool has_guard_modifier(const std::string& modifiers) {
    std::string lower = to_lower(modifiers);
    return lower.find("reentran") != std::string::npos ||
           lower.find("lock") != std::string::npos || lower.find("mutex") != std::string::npos ||
           lower.find("noreentry") != std::string::npos;
}

bool has_only_modifier(const std::string& modifiers) {
    std::istringstream in(to_lower(modifiers));
    std::string item;
    while (std::getline(in, item, ',')) {
        while (!item.empty() && item.front() == ' ') item.erase(item.begin());
        if (starts_with(item, "only")) return true;
    }
    return false;
}

bool is_entry(const ParsedFunction& fn) {
    return !fn.is_constructor && (fn.visibility == "public" || fn.visibility == "external");
}

bool cap_like(const std::string& n) {
    return contains_ci(n, "max") || contains_ci(n, "cap") || contains_ci(n, "limit");
}
bool supply_like(const std::string& n) {
    if (cap_like(n)) return false;
    return contains_ci(n, "supply") || contains_ci(n, "minted") || contains_ci(n, "counter");
}

// Check lines look like "      - names=[a,b] cmp=[x|y <= z]".
bool checks_guard_supply(const std::vector<std::string>& checks) {
    for (const auto& line : checks) {
        size_t pos = 0;
        while ((pos = line.find("cmp=[", pos)) != std::string::npos) {
            size_t end = line.find(']', pos);
            if (end == std::string::npos) break;
            std::string cmp = line.substr(pos + 5, end - pos - 5);
            bool has_supply = false, has_cap = false;
            std::string token;
            for (char c : cmp + "|") {
                if (c == '|' || c == ' ') {
                    if (!token.empty()) {
                        has_supply |= supply_like(token);
                        has_cap |= cap_like(token);
                        token.clear();
                    }
                } else {
                    token.push_back(c);
                }
            }
            if (has_supply && has_cap) return true;
            pos = end;
        }
    }
    return false;
}

bool checks_mention_owner(const std::vector<std::string>& checks) {
    for (const auto& line : checks)
        if (contains_ci(line, "owner") || contains_ci(line, "approve") ||
            contains_ci(line, "approval"))
            return true;
    return false;
}

}  // namespace

std::string MockLlmBackend::heuristic_response(const std::string& prompt) const {
    ParsedFacts facts = parse_facts_block(prompt);

    std::array<double, oracle::kDefectTypeCount> confidence{};
    std::array<std::string, oracle::kDefectTypeCount> rationale{};
    auto note = [&](oracle::DefectType type, const std::string& why) {
        auto i = static_cast<size_t>(type);
        if (confidence[i] == 0.0) {
            confidence[i] = 0.85;
            rationale[i] = why;
        }
    };

    for (const auto& fn : facts.functions) {
        // Call-before-write with no guard.
        auto call_pos = fn.sequence.find("call(");
        auto write_pos = fn.sequence.find("write(", call_pos == std::string::npos ? 0 : call_pos);
        if (call_pos != std::string::npos && write_pos != std::string::npos &&
            write_pos > call_pos && !has_guard_modifier(fn.modifiers))
            note(oracle::DefectType::Erc721Reentrancy,
                 "function " + fn.name + " writes state after an external call");

        if (is_entry(fn) && (contains_ci(fn.name, "burn") || contains_ci(fn.calls, "burn")) &&
            !checks_mention_owner(fn.checks) && !has_only_modifier(fn.modifiers))
            note(oracle::DefectType::PublicBurn,
                 "function " + fn.name + " burns without an owner or approval check");

        for (const auto& var : facts.proxy_like_vars)
            if (!fn.is_constructor && fn.sequence.find("write(" + var + ")") != std::string::npos)
                note(oracle::DefectType::RiskyMutableProxy,
                     "function " + fn.name + " rewrites proxy registry " + var);

        if (is_entry(fn) &&
            (contains_ci(fn.name, "mint") || contains_ci(fn.calls, "mint") ||
             contains_ci(fn.sequence, "mint")) &&
            !checks_guard_supply(fn.checks))
            note(oracle::DefectType::UnlimitedMinting,
                 "function " + fn.name + " mints without a max-supply comparison");
    }

    // Retrieval context nudges confidence up a notch.
    for (int i = 0; i < oracle::kDefectTypeCount; ++i) {
        auto type = static_cast<oracle::DefectType>(i);
        std::string marker = std::string("defect_type=") + oracle::defect_type_name(type);
        if (confidence[static_cast<size_t>(i)] > 0.0 && prompt.find(marker) != std::string::npos)
            confidence[static_cast<size_t>(i)] += 0.05;
    }

    std::ostringstream out;
    bool any = false;
    for (int i = 0; i < oracle::kDefectTypeCount; ++i) {
        if (confidence[static_cast<size_t>(i)] <= 0.0) continue;
        any = true;
        char buf[16];
        std::snprintf(buf, sizeof(buf), "%.2f", confidence[static_cast<size_t>(i)]);
        out << "DEFECT: " << oracle::defect_type_name(static_cast<oracle::DefectType>(i))
            << " CONFIDENCE: " << buf << "\n";
        out << "RATIONALE: " << rationale[static_cast<size_t>(i)] << "\n";
    }
    if (!any) out << "NO DEFECTS DETECTED\n";
    return out.str();
}

std::string HttpLlmBackend::complete(const std::string& prompt, double temperature,
                                     int sample_index) {
    (void)sample_index;
    httplib::Client client(config_.base_url);
    client.set_read_timeout(config_.timeout_seconds, 0);
    client.set_connection_timeout(config_.timeout_seconds, 0);
    httplib::Headers headers;
    if (const char* key = std::getenv(config_.credential_env.c_str()))
        headers.emplace("Authorization", std::string("Bearer ") + key);

    nlohmann::json body{{"prompt", prompt}, {"temperature", temperature}, {"candidate_count", 1}};
    auto res = client.Post(config_.path, headers, body.dump(), "application/json");
    if (!res) throw Error("llm backend: no response from " + config_.base_url);
    if (res->status != 200) throw Error("llm backend: HTTP " + std::to_string(res->status));

    auto parsed = nlohmann::json::parse(res->body, nullptr, false);
    if (!parsed.is_discarded()) {
        if (parsed.contains("text") && parsed["text"].is_string())
            return parsed["text"].get<std::string>();
        if (parsed.contains("candidates") && parsed["candidates"].is_array() &&
            !parsed["candidates"].empty() && parsed["candidates"][0].contains("text"))
            return parsed["candidates"][0]["text"].get<std::string>();
    }
    return res->body;  // lenient: treat the raw body as the completion
}

}  // namespace natlm::llm
