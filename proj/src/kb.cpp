// Copyright 2026 The natlm Authors.
// SPDX-License-Identifier: Apache-2.0
#include "natlm/kb.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

namespace natlm::kb {

namespace {
constexpr char kMagic[8] = {'N', 'A', 'T', 'L', 'M', 'V', 'D', 'B'};
constexpr uint32_t kVersion = 1;
}  // namespace

double cosine(const Vector& a, const Vector& b) {
    if (a.size() != b.size())
        throw Error("cosine: dimension mismatch (" + std::to_string(a.size()) + " vs " +
                    std::to_string(b.size()) + ")");
    double na = a.norm();
    double nb = b.norm();
    if (na == 0.0 || nb == 0.0) throw Error("undefined cosine for zero vector");
    return std::clamp(a.dot(b) / (na * nb), -1.0, 1.0);
}

double euclidean(const Vector& a, const Vector& b) {
    if (a.size() != b.size())
        throw Error("euclidean: dimension mismatch (" + std::to_string(a.size()) + " vs " +
                    std::to_string(b.size()) + ")");
    return (a - b).norm();
}

double combined_score(double cosine_sim, double distance, const ScoreWeights& weights) {
    return weights.cosine_weight * cosine_sim + weights.distance_weight * (1.0 / (1.0 + distance));
}

const KbEntry& VectorStore::entry(uint64_t id) const {
    if (id >= entries_.size()) throw Error("knowledge base: no entry with id " + std::to_string(id));
    return entries_[id];
}

uint64_t VectorStore::insert(KbEntry entry) {
    if (dim_ == 0) dim_ = static_cast<int>(entry.vector.size());
    if (entry.vector.size() != dim_)
        throw Error("knowledge base: vector dim " + std::to_string(entry.vector.size()) +
                    " does not match store dim " + std::to_string(dim_));
    entry.id = entries_.size();
    entries_.push_back(std::move(entry));
    return entries_.back().id;
}

std::vector<RetrievalHit> VectorStore::retrieve(const Vector& query, size_t k,
                                                const ScoreWeights& weights) const {
    if (entries_.empty()) throw Error("knowledge base empty");
    if (k < 1) throw Error("retrieve: k must be >= 1");
    std::vector<RetrievalHit> hits;
    hits.reserve(entries_.size());
    for (const auto& e : entries_) {
        RetrievalHit hit;
        hit.entry_id = e.id;
        hit.cosine = cosine(query, e.vector);
        hit.euclidean = euclidean(query, e.vector);
        hit.score = combined_score(hit.cosine, hit.euclidean, weights);
        hits.push_back(hit);
    }
    std::stable_sort(hits.begin(), hits.end(), [](const RetrievalHit& a, const RetrievalHit& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.entry_id < b.entry_id;
    });
    if (hits.size() > k) hits.resize(k);
    return hits;
}

Bytes VectorStore::persist() const {
    Bytes out;
    out.insert(out.end(), kMagic, kMagic + sizeof(kMagic));
    put_u32(out, kVersion);
    put_u32(out, static_cast<uint32_t>(dim_));
    put_u64(out, entries_.size());
    for (const auto& e : entries_)
        for (Eigen::Index i = 0; i < e.vector.size(); ++i) put_f64(out, e.vector(i));

    nlohmann::ordered_json meta = nlohmann::ordered_json::array();
    for (const auto& e : entries_) {
        meta.push_back({{"id", e.id},
                        {"defect_type", oracle::defect_type_name(e.defect_type)},
                        {"snippet_source", e.snippet_source},
                        {"contract_name", e.contract_name},
                        {"provenance", e.provenance}});
    }
    std::string trailer = meta.dump();
    out.insert(out.end(), trailer.begin(), trailer.end());
    return out;
}

void VectorStore::persist_to_file(const std::string& path) const {
    write_file(path, persist());
}

VectorStore VectorStore::load(const Bytes& data) {
    size_t pos = 0;
    if (data.size() < sizeof(kMagic) || !std::equal(kMagic, kMagic + sizeof(kMagic), data.begin()))
        throw IoError("knowledge base file: bad magic bytes");
    pos = sizeof(kMagic);
    uint32_t version = get_u32(data, pos);
    if (version != kVersion)
        throw IoError("knowledge base file: unsupported version " + std::to_string(version));
    uint32_t dim = get_u32(data, pos);
    uint64_t count = get_u64(data, pos);

    VectorStore store(static_cast<int>(dim));
    std::vector<Vector> vectors;
    vectors.reserve(count);
    for (uint64_t i = 0; i < count; ++i) {
        Vector v(dim);
        for (uint32_t d = 0; d < dim; ++d) v(d) = get_f64(data, pos);
        vectors.push_back(std::move(v));
    }

    std::string trailer(data.begin() + static_cast<long>(pos), data.end());
    nlohmann::json meta;
    try {
        meta = nlohmann::json::parse(trailer);
    } catch (const nlohmann::json::parse_error& e) {
        throw IoError(std::string("knowledge base file: bad metadata trailer: ") + e.what());
    }
    if (!meta.is_array() || meta.size() != count)
        throw IoError("knowledge base file: metadata count does not match header");

    for (uint64_t i = 0; i < count; ++i) {
        KbEntry entry;
        entry.vector = std::move(vectors[i]);
        const auto& m = meta[i];
        entry.defect_type = oracle::defect_type_from_name(m.at("defect_type").get<std::string>());
        entry.snippet_source = m.at("snippet_source").get<std::string>();
        entry.contract_name = m.at("contract_name").get<std::string>();
        entry.provenance = m.at("provenance").get<std::string>();
        store.insert(std::move(entry));
    }
    return store;
}

VectorStore VectorStore::load_from_file(const std::string& path) {
    std::string content = read_file(path);
    return load(Bytes(content.begin(), content.end()));
}

}  // namespace natlm::kb
