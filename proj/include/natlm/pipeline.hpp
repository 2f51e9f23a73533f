// Copyright 2026 The natlm Authors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <optional>

#include "natlm/ast_encoder.hpp"
#include "natlm/embed_backend.hpp"
#include "natlm/fusion.hpp"
#include "natlm/gcn.hpp"
#include "natlm/kb.hpp"
#include "natlm/llm.hpp"
#include "natlm/prompt.hpp"
#include "natlm/reasoner.hpp"
#include "natlm/textcnn.hpp"

namespace natlm::pipeline {

using nn::Vector;

struct PipelineConfig {
    uint64_t seed = 42;
    enc::TransformerConfig transformer;     // x_ast encoder
    enc::TextCnnConfig textcnn;             // block features
    enc::GcnConfig gcn;                     // X_CFG encoder
    int fused_dim = 128;                    // x_combined
    int aligned_dim = 128;                  // E_k before the count tail
    int embedding_dim = 256;                // defect snippet embeddings
    ast::TokenizeOptions tokenize;
    kb::ScoreWeights score_weights;
    size_t retrieval_k = 3;
};

/// Every learnable tensor in the encode path, deterministically derived from
/// (seed, vocabulary) and persistable as a JSON tensor container.
struct PipelineParams {
    PipelineConfig config;
    enc::AstEncoderParams ast_encoder;
    enc::EmbeddingTable instr_table;  // frozen instruction embeddings
    enc::TextCnnParams textcnn;
    enc::GcnParams gcn;
    enc::FusionParams fusion;
    enc::AlignmentParams alignment;

    static PipelineParams init(const PipelineConfig& config,
                               const std::vector<std::string>& vocab_tokens);
    void save(const std::string& path) const;
    static PipelineParams load(const std::string& path);
};

struct ContractInput {
    std::string name;           // corpus key (file stem)
    std::string source;         // Solidity text
    std::string ast_json;       // compiler AST document
    Bytes bytecode;             // deployed code bytes
    std::string contract_name;  // contract to select; empty = first
};

struct EncodedContract {
    ast::ContractFacts facts;
    ast::TokenSequence tokens;
    evm::Cfg cfg;
    Vector x_ast;
    Vector x_cfg;
    Vector x_combined;
    Vector tail;  // function / external-call / mint-site counts
};

EncodedContract encode_contract(const ContractInput& input, const PipelineParams& params);

/// Knowledge-base entry vector: align(x_combined, embed(snippet)) with the
/// three count dimensions appended.
Vector entry_vector(const EncodedContract& encoded, const std::string& snippet,
                    llm::EmbeddingBackend& embedder, const PipelineParams& params);

/// Query-side vector for a scanned contract; the snippet is the contract
/// source itself so both sides go through the same alignment map.
Vector query_vector(const EncodedContract& encoded, const ContractInput& input,
                    llm::EmbeddingBackend& embedder, const PipelineParams& params);

struct ManualLabel {
    std::string contract;  // corpus key
    oracle::DefectType defect_type{};
    std::string function;
};

struct KbBuildResult {
    kb::VectorStore store;
    std::vector<std::string> warnings;  // skipped contracts etc.
};

/// One entry per labeled defect snippet. Labels come from the rule oracle
/// unless manual labels are supplied. Deterministic under a fixed seed;
/// contracts are processed in sorted-name order and may be encoded by up to
/// `jobs` worker threads.
KbBuildResult kb_build(std::vector<ContractInput> corpus, const PipelineParams& params,
                       llm::EmbeddingBackend& embedder,
                       const std::optional<std::vector<ManualLabel>>& manual_labels = {},
                       int jobs = 1);

struct ScanOutput {
    llm::Report report;
    llm::PromptBundle bundle;
    std::vector<kb::RetrievalHit> hits;
};

ScanOutput scan_contract(const ContractInput& input, const kb::VectorStore& store,
                         const PipelineParams& params, llm::EmbeddingBackend& embedder,
                         llm::LlmBackend& backend, const llm::BackendConfig& backend_config,
                         double tau);

/// Reads name.sol / name.ast.json / name.hex from a corpus directory.
ContractInput load_contract_files(const std::string& sol_path, const std::string& ast_path,
                                  const std::string& hex_path, const std::string& contract_name);
std::vector<ContractInput> load_corpus_dir(const std::string& dir);

/// Token vocabulary for the embedding table: sorted unique subtokens of the
/// corpus, so kb build and later scans share one table.
std::vector<std::string> collect_vocabulary(const std::vector<ContractInput>& corpus,
                                            const ast::TokenizeOptions& options);

}  // namespace natlm::pipeline
