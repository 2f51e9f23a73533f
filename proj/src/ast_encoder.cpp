// Copyright 2026 The natlm Authors.
// SPDX-License-Identifier: Apache-2.0
#include "natlm/ast_encoder.hpp"

#include <cmath>

namespace natlm::enc {

EmbeddingTable EmbeddingTable::build(const std::vector<std::string>& tokens, int dim,
                                     const nn::ParamRng& rng, const std::string& name) {
    EmbeddingTable table;
    int next = 1;  // row 0 is OOV
    for (const auto& t : tokens)
        if (table.vocab.emplace(t, next).second) ++next;
    Param rows = nn::make_param(name, next, dim, rng);
    table.matrix = std::move(rows.value);
    return table;
}

ProjectionParams ProjectionParams::init(int out_dim, int in_dim, const nn::ParamRng& rng) {
    ProjectionParams p;
    p.W = nn::make_param("proj.W", out_dim, in_dim, rng);
    p.b = nn::make_param("proj.b", out_dim, 1, rng);
    return p;
}

AstEncoderParams AstEncoderParams::init(const std::vector<std::string>& vocab_tokens,
                                        const TransformerConfig& config, const nn::ParamRng& rng,
                                        int embed_dim) {
    if (config.model_dim % config.heads != 0)
        throw Error("model_dim must be divisible by the head count");
    AstEncoderParams p;
    p.config = config;
    p.table = EmbeddingTable::build(vocab_tokens, embed_dim, rng, "ast.token_embed");
    p.positional = nn::make_param("ast.positional", config.max_positions, embed_dim, rng).value;
    p.proj = ProjectionParams::init(config.model_dim, embed_dim, rng);
    const int d = config.model_dim;
    for (int l = 0; l < config.layers; ++l) {
        const std::string prefix = "ast.layer" + std::to_string(l) + ".";
        TransformerLayerParams layer;
        layer.Wq = nn::make_param(prefix + "Wq", d, d, rng);
        layer.Wk = nn::make_param(prefix + "Wk", d, d, rng);
        layer.Wv = nn::make_param(prefix + "Wv", d, d, rng);
        layer.Wo = nn::make_param(prefix + "Wo", d, d, rng);
        layer.bq = nn::make_zero_param(prefix + "bq", d, 1);
        layer.bk = nn::make_zero_param(prefix + "bk", d, 1);
        layer.bv = nn::make_zero_param(prefix + "bv", d, 1);
        layer.bo = nn::make_zero_param(prefix + "bo", d, 1);
        layer.ln1_gain = nn::make_zero_param(prefix + "ln1_gain", d, 1);
        layer.ln1_gain.value.setOnes();
        layer.ln1_bias = nn::make_zero_param(prefix + "ln1_bias", d, 1);
        layer.ln2_gain = nn::make_zero_param(prefix + "ln2_gain", d, 1);
        layer.ln2_gain.value.setOnes();
        layer.ln2_bias = nn::make_zero_param(prefix + "ln2_bias", d, 1);
        layer.W1 = nn::make_param(prefix + "W1", config.ffn_dim, d, rng);
        layer.b1 = nn::make_zero_param(prefix + "b1", config.ffn_dim, 1);
        layer.W2 = nn::make_param(prefix + "W2", config.ffn_dim, d, rng);
        layer.b2 = nn::make_zero_param(prefix + "b2", d, 1);
        p.layers.push_back(std::move(layer));
    }
    return p;
}

Matrix embed_and_project(const ast::TokenSequence& tokens, const EmbeddingTable& table,
                         const Matrix& positional, const ProjectionParams& proj) {
    const auto n = static_cast<Eigen::Index>(tokens.tokens.size());
    if (n > positional.rows())
        throw Error("token sequence length " + std::to_string(n) +
                    " exceeds positional table rows " + std::to_string(positional.rows()));
    if (proj.W.value.cols() != table.matrix.cols())
        throw Error("projection input dim does not match embedding dim");
    Matrix out(n, proj.W.value.rows());
    for (Eigen::Index i = 0; i < n; ++i) {
        Vector e = table.matrix.row(table.lookup(tokens.tokens[i])).transpose() +
                   positional.row(i).transpose();
        out.row(i) = (proj.W.value * e + proj.b.value).transpose();
    }
    return out;
}

namespace {

// Row-wise layer normalization with learned gain/bias.
Matrix layer_norm(const Matrix& x, const Param& gain, const Param& bias) {
    constexpr double eps = 1e-5;
    Matrix out(x.rows(), x.cols());
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        double mean = x.row(i).mean();
        double var = (x.row(i).array() - mean).square().mean();
        out.row(i) = (((x.row(i).array() - mean) / std::sqrt(var + eps)) *
                          gain.value.col(0).transpose().array() +
                      bias.value.col(0).transpose().array());
    }
    return out;
}

Matrix multi_head_attention(const Matrix& x, const TransformerLayerParams& layer, int heads,
                            AttentionTrace* trace) {
    const Eigen::Index n = x.rows();
    const Eigen::Index d = x.cols();
    const Eigen::Index dh = d / heads;
    Matrix q = x * layer.Wq.value.transpose();
    q.rowwise() += layer.bq.value.col(0).transpose();
    Matrix k = x * layer.Wk.value.transpose();
    k.rowwise() += layer.bk.value.col(0).transpose();
    Matrix v = x * layer.Wv.value.transpose();
    v.rowwise() += layer.bv.value.col(0).transpose();

    Matrix concat(n, d);
    const double scale = 1.0 / std::sqrt(static_cast<double>(dh));
    for (int h = 0; h < heads; ++h) {
        auto qh = q.middleCols(h * dh, dh);
        auto kh = k.middleCols(h * dh, dh);
        auto vh = v.middleCols(h * dh, dh);
        Matrix scores = qh * kh.transpose() * scale;
        Matrix weights(n, n);
        for (Eigen::Index i = 0; i < n; ++i)
            weights.row(i) = nn::softmax(scores.row(i).transpose()).transpose();
        if (trace) trace->head_weights.push_back(weights);
        concat.middleCols(h * dh, dh) = weights * vh;
    }
    Matrix out = concat * layer.Wo.value.transpose();
    out.rowwise() += layer.bo.value.col(0).transpose();
    return out;
}

Matrix feed_forward(const Matrix& x, const TransformerLayerParams& layer) {
    // hidden = ReLU(W1 x + b1); out = hidden^T W2 + b2.
    Matrix hidden = x * layer.W1.value.transpose();
    hidden.rowwise() += layer.b1.value.col(0).transpose();
    hidden = hidden.cwiseMax(0.0);
    Matrix out = hidden * layer.W2.value;
    out.rowwise() += layer.b2.value.col(0).transpose();
    return out;
}

Matrix run_encoder(const Matrix& embedded, const AstEncoderParams& params, bool training,
                   std::mt19937_64* rng, AttentionTrace* trace) {
    if (embedded.rows() == 0) throw Error("empty token sequence");
    std::mt19937_64 local_rng(0);
    std::mt19937_64* r = rng ? rng : &local_rng;
    Matrix x = embedded;
    for (const auto& layer : params.layers) {
        Matrix attn_in = layer_norm(x, layer.ln1_gain, layer.ln1_bias);
        Matrix attn = multi_head_attention(attn_in, layer, params.config.heads, trace);
        x += nn::dropout(attn, params.config.dropout, training, *r);
        Matrix ffn_in = layer_norm(x, layer.ln2_gain, layer.ln2_bias);
        Matrix ffn = feed_forward(ffn_in, layer);
        x += nn::dropout(ffn, params.config.dropout, training, *r);
    }
    return x;
}

}  // namespace

Matrix encoder_hidden_states(const Matrix& embedded, const AstEncoderParams& params,
                             AttentionTrace* trace) {
    return run_encoder(embedded, params, false, nullptr, trace);
}

Vector encode_ast(const Matrix& embedded, const AstEncoderParams& params, bool training,
                  std::mt19937_64* rng, AttentionTrace* trace) {
    Matrix hidden = run_encoder(embedded, params, training, rng, trace);
    return hidden.colwise().mean().transpose();
}

}  // namespace natlm::enc
