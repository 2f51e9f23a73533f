// Copyright 2026 The natlm Authors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <memory>
#include <string>

#include "natlm/nn.hpp"

namespace natlm::llm {

using nn::Vector;

/// Text-to-vector backend used for defect snippet embeddings.
class EmbeddingBackend {
public:
    virtual ~EmbeddingBackend() = default;
    virtual Vector embed_text(const std::string& snippet) = 0;
    virtual int dim() const = 0;
};

/// Offline deterministic stand-in: FNV-1a of (seed, snippet) seeds a PRNG
/// that draws the vector, which is then L2-normalized.
class MockEmbeddingBackend : public EmbeddingBackend {
public:
    explicit MockEmbeddingBackend(int dim = 256, uint64_t seed = 42) : dim_(dim), seed_(seed) {}
    Vector embed_text(const std::string& snippet) override;
    int dim() const override { return dim_; }

private:
    int dim_;
    uint64_t seed_;
};

struct HttpEmbeddingConfig {
    std::string base_url;            // e.g. http://localhost:8080
    std::string path = "/v1/embed";  // POST {"text": ...} -> {"embedding": [...]}
    std::string credential_env = "NATLM_API_KEY";
    int dim = 256;
    int timeout_seconds = 30;
};

class HttpEmbeddingBackend : public EmbeddingBackend {
public:
    explicit HttpEmbeddingBackend(HttpEmbeddingConfig config) : config_(std::move(config)) {}
    Vector embed_text(const std::string& snippet) override;
    int dim() const override { return config_.dim; }

private:
    HttpEmbeddingConfig config_;
};

}  // namespace natlm::llm
