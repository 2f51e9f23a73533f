// Copyright 2026 The natlm Authors.
// SPDX-License-Identifier: Apache-2.0
#include "natlm/gcn.hpp"

#include <algorithm>

namespace natlm::enc {

GcnParams GcnParams::init(const GcnConfig& config, int input_dim, const nn::ParamRng& rng) {
    GcnParams p;
    p.config = config;
    p.edge_embed = nn::make_param("gcn.edge_embed", 5, config.edge_dim, rng);
    int in_dim = input_dim;
    for (int l = 0; l < config.layers; ++l) {
        const std::string prefix = "gcn.layer" + std::to_string(l) + ".";
        GcnLayerParams layer;
        const int out_dim = config.hidden_dim;
        layer.Wm = nn::make_param(prefix + "Wm", out_dim, in_dim + config.edge_dim, rng);
        layer.bm = nn::make_zero_param(prefix + "bm", out_dim, 1);
        layer.Wv = nn::make_param(prefix + "Wv", out_dim, out_dim, rng);
        layer.Uv = nn::make_param(prefix + "Uv", out_dim, in_dim, rng);
        layer.bv = nn::make_zero_param(prefix + "bv", out_dim, 1);
        for (int h = 0; h < config.heads; ++h) {
            AttentionHeadParams head;
            head.P = nn::make_param(prefix + "head" + std::to_string(h) + ".P", config.attn_dim,
                                    in_dim, rng);
            head.q = nn::make_param(prefix + "head" + std::to_string(h) + ".q",
                                    2 * config.attn_dim, 1, rng);
            layer.heads.push_back(std::move(head));
        }
        p.layers.push_back(std::move(layer));
        in_dim = out_dim;
    }
    for (int h = 0; h < config.heads; ++h) {
        AttentionHeadParams head;
        head.P = nn::make_param("gcn.pool.head" + std::to_string(h) + ".P", config.attn_dim,
                                in_dim, rng);
        head.q = nn::make_param("gcn.pool.head" + std::to_string(h) + ".q", 2 * config.attn_dim,
                                1, rng);
        p.pool_heads.push_back(std::move(head));
    }
    p.global_query = nn::make_param("gcn.pool.global_query", in_dim, 1, rng);
    return p;
}

Vector gcn_message(const Vector& h_start, const Vector& edge_vec, const Param& Wm,
                   const Param& bm) {
    if (h_start.size() + edge_vec.size() != Wm.value.cols())
        throw Error("gcn_message: input dims do not match Wm");
    Vector x(h_start.size() + edge_vec.size());
    x << h_start, edge_vec;
    return Wm.value * x + bm.value;
}

void gcn_message_backward(const Vector& h_start, const Vector& edge_vec, Param& Wm, Param& bm,
                          const Vector& d_message, Vector* d_h, Vector* d_edge) {
    Vector x(h_start.size() + edge_vec.size());
    x << h_start, edge_vec;
    Wm.grad += d_message * x.transpose();
    bm.grad += d_message;
    Vector dx = Wm.value.transpose() * d_message;
    if (d_h) *d_h += dx.head(h_start.size());
    if (d_edge) *d_edge += dx.tail(edge_vec.size());
}

Vector gcn_update(const Vector& aggregated, const Vector& h_v, const Param& Wv, const Param& Uv,
                  const Param& bv) {
    Vector pre = Wv.value * aggregated + Uv.value * h_v + bv.value;
    return pre.cwiseMax(0.0);
}

void gcn_update_backward(const Vector& aggregated, const Vector& h_v, Param& Wv, Param& Uv,
                         Param& bv, const Vector& d_out, Vector* d_aggregated, Vector* d_h) {
    Vector pre = Wv.value * aggregated + Uv.value * h_v + bv.value;
    Vector d_pre = (pre.array() > 0.0).select(d_out, Vector::Zero(d_out.size()));
    Wv.grad += d_pre * aggregated.transpose();
    Uv.grad += d_pre * h_v.transpose();
    bv.grad += d_pre;
    if (d_aggregated) *d_aggregated += Wv.value.transpose() * d_pre;
    if (d_h) *d_h += Uv.value.transpose() * d_pre;
}

Vector attention_weights(const Vector& h_v, const std::vector<Vector>& h_neighbors,
                         const AttentionHeadParams& head, double leaky_slope) {
    const auto attn_dim = head.P.value.rows();
    Vector pv = head.P.value * h_v;
    Vector q1 = head.q.value.col(0).head(attn_dim);
    Vector q2 = head.q.value.col(0).tail(attn_dim);
    Vector scores(static_cast<Eigen::Index>(h_neighbors.size()));
    for (size_t u = 0; u < h_neighbors.size(); ++u) {
        double z = q1.dot(pv) + q2.dot(head.P.value * h_neighbors[u]);
        scores(static_cast<Eigen::Index>(u)) = nn::leaky_relu(z, leaky_slope);
    }
    return nn::softmax(scores);
}

void attention_weights_backward(const Vector& h_v, const std::vector<Vector>& h_neighbors,
                                AttentionHeadParams& head, double leaky_slope,
                                const Vector& d_beta, Vector* d_h_v,
                                std::vector<Vector>* d_h_neighbors) {
    const auto attn_dim = head.P.value.rows();
    const auto n = static_cast<Eigen::Index>(h_neighbors.size());
    Vector pv = head.P.value * h_v;
    Vector q1 = head.q.value.col(0).head(attn_dim);
    Vector q2 = head.q.value.col(0).tail(attn_dim);

    Vector z(n);
    std::vector<Vector> pu(h_neighbors.size());
    for (Eigen::Index u = 0; u < n; ++u) {
        pu[static_cast<size_t>(u)] = head.P.value * h_neighbors[static_cast<size_t>(u)];
        z(u) = q1.dot(pv) + q2.dot(pu[static_cast<size_t>(u)]);
    }
    Vector scores = z.unaryExpr([&](double v) { return nn::leaky_relu(v, leaky_slope); });
    Vector beta = nn::softmax(scores);

    // Softmax Jacobian: ds_u = beta_u * (d_beta_u - sum_w beta_w d_beta_w).
    double mix = beta.dot(d_beta);
    Vector d_scores = (beta.array() * (d_beta.array() - mix)).matrix();
    Vector d_z(n);
    for (Eigen::Index u = 0; u < n; ++u)
        d_z(u) = d_scores(u) * nn::leaky_relu_grad(z(u), leaky_slope);

    const double d_z_total = d_z.sum();
    head.q.grad.col(0).head(attn_dim) += d_z_total * pv;
    head.P.grad += (d_z_total * q1) * h_v.transpose();
    if (d_h_v) *d_h_v += d_z_total * (head.P.value.transpose() * q1);
    for (Eigen::Index u = 0; u < n; ++u) {
        head.q.grad.col(0).tail(attn_dim) += d_z(u) * pu[static_cast<size_t>(u)];
        head.P.grad += (d_z(u) * q2) * h_neighbors[static_cast<size_t>(u)].transpose();
        if (d_h_neighbors)
            (*d_h_neighbors)[static_cast<size_t>(u)] +=
                d_z(u) * (head.P.value.transpose() * q2);
    }
}

Vector gcn_forward(const evm::Cfg& cfg, const std::map<int, Vector>& block_features,
                   const GcnParams& params, GcnTrace* trace, bool training,
                   std::mt19937_64* rng) {
    if (cfg.blocks.empty()) throw Error("gcn_forward: empty graph");

    std::vector<Vector> states;
    states.reserve(cfg.blocks.size());
    std::vector<int> ids;
    std::map<int, size_t> index_of;
    for (const auto& block : cfg.blocks) {
        auto it = block_features.find(block.id);
        if (it == block_features.end())
            throw Error("gcn_forward: missing feature for block " + std::to_string(block.id));
        index_of[block.id] = states.size();
        ids.push_back(block.id);
        states.push_back(it->second);
    }

    // Incoming edge lists per node, in edge order (deterministic).
    std::vector<std::vector<size_t>> in_edges(states.size());
    for (size_t e = 0; e < cfg.edges.size(); ++e)
        in_edges[index_of.at(cfg.edges[e].to)].push_back(e);

    std::mt19937_64 local_rng(0);
    std::mt19937_64* r = rng ? rng : &local_rng;

    for (const auto& layer : params.layers) {
        std::vector<Vector> inputs = states;
        if (training && params.config.dropout > 0.0) {
            for (auto& v : inputs) {
                Matrix m = v;
                v = nn::dropout(m, params.config.dropout, true, *r);
            }
        }

        std::vector<Vector> messages(cfg.edges.size());
        for (size_t e = 0; e < cfg.edges.size(); ++e) {
            const auto& edge = cfg.edges[e];
            Vector edge_vec =
                params.edge_embed.value.row(static_cast<int>(edge.kind)).transpose();
            messages[e] =
                gcn_message(inputs[index_of.at(edge.from)], edge_vec, layer.Wm, layer.bm);
        }

        std::vector<Vector> next(states.size());
        for (size_t v = 0; v < states.size(); ++v) {
            Vector agg = Vector::Zero(layer.Wm.value.rows());
            const auto& incoming = in_edges[v];
            if (!incoming.empty()) {
                Vector combined = Vector::Zero(static_cast<Eigen::Index>(incoming.size()));
                if (params.config.attention) {
                    std::vector<Vector> neighbor_states;
                    neighbor_states.reserve(incoming.size());
                    for (size_t e : incoming)
                        neighbor_states.push_back(inputs[index_of.at(cfg.edges[e].from)]);
                    for (const auto& head : layer.heads) {
                        Vector beta = attention_weights(inputs[v], neighbor_states, head,
                                                        params.config.leaky_slope);
                        if (trace) trace->node_attention.push_back(beta);
                        combined += beta;
                    }
                    combined /= static_cast<double>(layer.heads.size());
                } else {
                    combined.setOnes();
                }
                for (size_t i = 0; i < incoming.size(); ++i)
                    agg += combined(static_cast<Eigen::Index>(i)) * messages[incoming[i]];
            }
            next[v] = gcn_update(agg, inputs[v], layer.Wv, layer.Uv, layer.bv);
        }
        states = std::move(next);
    }

    // Attention pooling against the learned global query.
    Vector pooled = Vector::Zero(states[0].size());
    Vector combined = Vector::Zero(static_cast<Eigen::Index>(states.size()));
    for (const auto& head : params.pool_heads) {
        Vector beta = attention_weights(params.global_query.value.col(0), states, head,
                                        params.config.leaky_slope);
        if (trace) trace->pool_attention.push_back(beta);
        combined += beta;
    }
    combined /= static_cast<double>(params.pool_heads.size());
    for (size_t v = 0; v < states.size(); ++v)
        pooled += combined(static_cast<Eigen::Index>(v)) * states[v];
    return pooled;
}

}  // namespace natlm::enc
