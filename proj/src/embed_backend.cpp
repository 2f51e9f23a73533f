// Copyright 2026 The natlm Authors.
// SPDX-License-Identifier: Apache-2.0
#include "natlm/embed_backend.hpp"

#include <cstdlib>
#include <random>

#include <httplib.h>
#include <json.hpp>

#include "natlm/util.hpp"

namespace natlm::llm {

Vector MockEmbeddingBackend::embed_text(const std::string& snippet) {
    std::mt19937_64 rng(fnv1a(snippet, seed_ ^ 0x7f4a7c15u));
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    Vector v(dim_);
    for (int i = 0; i < dim_; ++i) v(i) = dist(rng);
    double norm = v.norm();
    if (norm > 0.0) v /= norm;
    return v;
}

Vector HttpEmbeddingBackend::embed_text(const std::string& snippet) {
    httplib::Client client(config_.base_url);
    client.set_read_timeout(config_.timeout_seconds, 0);
    client.set_connection_timeout(config_.timeout_seconds, 0);
    httplib::Headers headers;
    if (const char* key = std::getenv(config_.credential_env.c_str()))
        headers.emplace("Authorization", std::string("Bearer ") + key);

    nlohmann::json body{{"text", snippet}};
    auto res = client.Post(config_.path, headers, body.dump(), "application/json");
    if (!res)
        throw Error("embedding backend: no response from " + config_.base_url);
    if (res->status != 200)
        throw Error("embedding backend: HTTP " + std::to_string(res->status));
    auto parsed = nlohmann::json::parse(res->body, nullptr, false);
    if (parsed.is_discarded() || !parsed.contains("embedding") ||
        !parsed["embedding"].is_array())
        throw Error("embedding backend: malformed response body");
    const auto& arr = parsed["embedding"];
    Vector v(static_cast<Eigen::Index>(arr.size()));
    for (size_t i = 0; i < arr.size(); ++i) v(static_cast<Eigen::Index>(i)) = arr[i].get<double>();
    if (v.size() != config_.dim)
        throw Error("embedding backend: unexpected dimension " + std::to_string(v.size()));
    return v;
}

}  // namespace natlm::llm
