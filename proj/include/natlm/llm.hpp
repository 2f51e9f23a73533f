// Copyright 2026 The natlm Authors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <deque>
#include <mutex>
#include <string>
#include <vector>

namespace natlm::llm {

struct BackendConfig {
    enum class Kind { Mock, Http };
    Kind kind = Kind::Mock;
    double temperature = 0.7;
    int samples = 3;  // candidates drawn per analysis
    uint64_t seed = 42;
    int max_attempts = 3;
    int backoff_ms = 100;  // doubled per retry
    // HTTP backend only.
    std::string base_url;
    std::string path = "/v1/generate";
    std::string credential_env = "NATLM_API_KEY";
    int timeout_seconds = 30;
};

/// One text-completion backend. Implementations must be safe to call from
/// multiple threads.
class LlmBackend {
public:
    virtual ~LlmBackend() = default;
    virtual std::string complete(const std::string& prompt, double temperature,
                                 int sample_index) = 0;
    virtual const char* name() const = 0;
};

/// Deterministic offline backend. Scripted responses (and failures) are
/// consumed first; once the script is empty it answers like an attentive
/// reader of the prompt: it scans the facts block for call-before-write
/// sequences, unguarded burn entry points, proxy-variable writes and
/// uncapped mint paths, and emits the structured DEFECT/CONFIDENCE block the
/// prompt instructions ask for. Output depends only on (prompt, seed).
class MockLlmBackend : public LlmBackend {
public:
    explicit MockLlmBackend(uint64_t seed = 42) : seed_(seed) {}

    void script_response(std::string text);
    void script_failure(std::string message);

    std::string complete(const std::string& prompt, double temperature,
                         int sample_index) override;
    const char* name() const override { return "mock"; }

private:
    struct Scripted {
        bool fail = false;
        std::string payload;
    };
    std::string heuristic_response(const std::string& prompt) const;

    uint64_t seed_;
    std::mutex mutex_;
    std::deque<Scripted> script_;
};

/// JSON-over-HTTP client: POST {prompt, temperature, candidate_count} to
/// base_url+path; accepts {"text": ...} or {"candidates":[{"text": ...}]}.
class HttpLlmBackend : public LlmBackend {
public:
    explicit HttpLlmBackend(BackendConfig config) : config_(std::move(config)) {}
    std::string complete(const std::string& prompt, double temperature,
                         int sample_index) override;
    const char* name() const override { return "http"; }

private:
    BackendConfig config_;
};

}  // namespace natlm::llm
