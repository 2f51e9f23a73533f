// Copyright 2026 The natlm Authors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>

#include "natlm/bytecode.hpp"
#include "natlm/nn.hpp"

namespace natlm::enc {

using nn::Matrix;
using nn::Param;
using nn::Vector;

struct GcnConfig {
    int layers = 2;
    int hidden_dim = 128;
    int heads = 2;
    int edge_dim = 16;
    int attn_dim = 16;
    double leaky_slope = 0.2;
    bool attention = true;   // multiplicative neighbor weighting; plain sum when off
    double dropout = 0.5;    // training mode only
};

struct AttentionHeadParams {
    Param P;  // attn_dim x node_dim
    Param q;  // 2*attn_dim x 1
};

struct GcnLayerParams {
    Param Wm;  // out_dim x (in_dim + edge_dim)
    Param bm;  // out_dim x 1
    Param Wv;  // out_dim x out_dim
    Param Uv;  // out_dim x in_dim
    Param bv;  // out_dim x 1
    std::vector<AttentionHeadParams> heads;
};

struct GcnParams {
    GcnConfig config;
    Param edge_embed;  // one row per EdgeKind (5 x edge_dim)
    std::vector<GcnLayerParams> layers;
    std::vector<AttentionHeadParams> pool_heads;
    Param global_query;  // final node dim x 1

    static GcnParams init(const GcnConfig& config, int input_dim, const nn::ParamRng& rng);
};

/// Attention weight vectors recorded during a forward pass, one per
/// (layer, node-with-in-edges, head), plus the graph-level pooling vectors.
struct GcnTrace {
    std::vector<Vector> node_attention;
    std::vector<Vector> pool_attention;
};

/// Edge message: m = Wm * [h_start || e] + bm.
Vector gcn_message(const Vector& h_start, const Vector& edge_vec, const Param& Wm,
                   const Param& bm);
void gcn_message_backward(const Vector& h_start, const Vector& edge_vec, Param& Wm, Param& bm,
                          const Vector& d_message, Vector* d_h = nullptr,
                          Vector* d_edge = nullptr);

/// Node update: h' = ReLU(Wv * aggregated + Uv * h + bv).
Vector gcn_update(const Vector& aggregated, const Vector& h_v, const Param& Wv, const Param& Uv,
                  const Param& bv);
void gcn_update_backward(const Vector& aggregated, const Vector& h_v, Param& Wv, Param& Uv,
                         Param& bv, const Vector& d_out, Vector* d_aggregated = nullptr,
                         Vector* d_h = nullptr);

/// Neighbor attention over an in-edge set: softmax_u LeakyReLU(q^T [P h_v || P h_u]).
Vector attention_weights(const Vector& h_v, const std::vector<Vector>& h_neighbors,
                         const AttentionHeadParams& head, double leaky_slope);
void attention_weights_backward(const Vector& h_v, const std::vector<Vector>& h_neighbors,
                                AttentionHeadParams& head, double leaky_slope,
                                const Vector& d_beta, Vector* d_h_v = nullptr,
                                std::vector<Vector>* d_h_neighbors = nullptr);

/// Full pass over a control-flow graph: L message/update rounds with
/// attention-weighted aggregation, then attention pooling into one vector.
Vector gcn_forward(const evm::Cfg& cfg, const std::map<int, Vector>& block_features,
                   const GcnParams& params, GcnTrace* trace = nullptr, bool training = false,
                   std::mt19937_64* rng = nullptr);

}  // namespace natlm::enc
