// Copyright 2026 The natlm Authors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>

#include "natlm/nn.hpp"
#include "natlm/tokenize.hpp"

namespace natlm::enc {

using nn::Matrix;
using nn::Param;
using nn::Vector;

/// Token (or instruction) embedding rows plus a reserved OOV row at index 0.
struct EmbeddingTable {
    std::map<std::string, int> vocab;
    Matrix matrix;  // (1 + vocab size) x dim

    int dim() const { return static_cast<int>(matrix.cols()); }
    int lookup(const std::string& token) const {
        auto it = vocab.find(token);
        return it == vocab.end() ? 0 : it->second;
    }

    static EmbeddingTable build(const std::vector<std::string>& tokens, int dim,
                                const nn::ParamRng& rng, const std::string& name);
};

struct ProjectionParams {
    Param W;  // 256 x 768
    Param b;  // 256 x 1

    static ProjectionParams init(int out_dim, int in_dim, const nn::ParamRng& rng);
};

struct TransformerConfig {
    int layers = 2;
    int heads = 4;
    int model_dim = 256;
    int ffn_dim = 512;
    double dropout = 0.1;
    int max_positions = 2048;
};

struct TransformerLayerParams {
    Param Wq, Wk, Wv, Wo;  // model_dim x model_dim
    Param bq, bk, bv, bo;  // model_dim x 1
    Param ln1_gain, ln1_bias, ln2_gain, ln2_bias;
    Param W1, b1;  // ffn_dim x model_dim, ffn_dim x 1
    Param W2, b2;  // ffn_dim x model_dim (applied from the right), model_dim x 1
};

struct AstEncoderParams {
    TransformerConfig config;
    EmbeddingTable table;  // 768-dim token embeddings
    Matrix positional;     // max_positions x 768
    ProjectionParams proj;
    std::vector<TransformerLayerParams> layers;

    static AstEncoderParams init(const std::vector<std::string>& vocab_tokens,
                                 const TransformerConfig& config, const nn::ParamRng& rng,
                                 int embed_dim = 768);
};

/// Collects every attention-weight row produced during a forward pass so
/// tests can assert the softmax normalization invariant.
struct AttentionTrace {
    std::vector<Matrix> head_weights;  // one row-stochastic matrix per (layer, head)
};

/// Row i = W_proj * (word_i + position_i) + b_proj.
Matrix embed_and_project(const ast::TokenSequence& tokens, const EmbeddingTable& table,
                         const Matrix& positional, const ProjectionParams& proj);

/// Pre-norm transformer encoder followed by mean pooling over positions.
/// Dropout fires only when `training`; inference needs no RNG.
Vector encode_ast(const Matrix& embedded, const AstEncoderParams& params, bool training = false,
                  std::mt19937_64* rng = nullptr, AttentionTrace* trace = nullptr);

/// Final hidden states before pooling (exposed for the pooling oracle test).
Matrix encoder_hidden_states(const Matrix& embedded, const AstEncoderParams& params,
                             AttentionTrace* trace = nullptr);

}  // namespace natlm::enc
