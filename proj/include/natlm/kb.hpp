// Copyright 2026 The natlm Authors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include "natlm/nn.hpp"
#include "natlm/oracle.hpp"

namespace natlm::kb {

using nn::Vector;

/// Cosine similarity, clamped to [-1, 1] against rounding. Zero vectors are
/// rejected: the quantity is undefined for them.
double cosine(const Vector& a, const Vector& b);

/// Plain Euclidean distance.
double euclidean(const Vector& a, const Vector& b);

struct ScoreWeights {
    double cosine_weight = 0.7;
    double distance_weight = 0.3;
};

/// Combined retrieval score; the distance term is mapped through 1/(1+d) so
/// both terms live in a bounded range.
double combined_score(double cosine_sim, double distance, const ScoreWeights& weights);

struct KbEntry {
    uint64_t id = 0;
    oracle::DefectType defect_type{};
    Vector vector;
    std::string snippet_source;
    std::string contract_name;
    std::string provenance;  // "oracle" or "manual"
};

struct RetrievalHit {
    uint64_t entry_id = 0;
    double cosine = 0.0;
    double euclidean = 0.0;
    double score = 0.0;
};

/// Flat exact-scan vector store. Many concurrent readers or one writer.
class VectorStore {
public:
    VectorStore() = default;
    explicit VectorStore(int dim) : dim_(dim) {}

    int dim() const { return dim_; }
    size_t size() const { return entries_.size(); }
    bool empty() const { return entries_.empty(); }
    const std::vector<KbEntry>& entries() const { return entries_; }
    const KbEntry& entry(uint64_t id) const;

    /// Assigns the next dense id; all vectors must share the store dim.
    uint64_t insert(KbEntry entry);

    /// Top-k by combined score, ties broken by lower entry id. Returns
    /// min(k, size) hits; throws on an empty store.
    std::vector<RetrievalHit> retrieve(const Vector& query, size_t k,
                                       const ScoreWeights& weights = {}) const;

    /// Versioned binary format: header (magic, version, dim, count), f64-LE
    /// vector records, JSON metadata trailer.
    Bytes persist() const;
    void persist_to_file(const std::string& path) const;
    static VectorStore load(const Bytes& data);
    static VectorStore load_from_file(const std::string& path);

private:
    int dim_ = 0;
    std::vector<KbEntry> entries_;
};

}  // namespace natlm::kb
