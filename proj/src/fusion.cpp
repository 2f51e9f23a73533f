// Copyright 2026 The natlm Authors.
// SPDX-License-Identifier: Apache-2.0
#include "natlm/fusion.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace natlm::enc {

void SquashedAlpha::set(double target) {
    target = std::clamp(target, 0.0, 1.0);
    double free_value;
    if (target <= 0.0) {
        free_value = -1e4;  // sigmoid underflows to exactly 0
    } else if (target >= 1.0) {
        free_value = 1e4;  // sigmoid saturates to exactly 1
    } else {
        free_value = std::log(target / (1.0 - target));
    }
    free.value(0, 0) = free_value;
}

FusionParams FusionParams::init(int d_out, int d_ast, int d_cfg, const nn::ParamRng& rng) {
    FusionParams p;
    p.W_ast = nn::make_param("fusion.W_ast", d_out, d_ast, rng);
    p.b_ast = nn::make_zero_param("fusion.b_ast", d_out, 1);
    p.W_cfg = nn::make_param("fusion.W_cfg", d_out, d_cfg, rng);
    p.b_cfg = nn::make_zero_param("fusion.b_cfg", d_out, 1);
    p.alpha.free = nn::make_zero_param("fusion.alpha", 1, 1);  // starts at 0.5
    p.alpha.free.decay = false;                                // convex weight, not a magnitude
    return p;
}

std::vector<Param*> FusionParams::parameters() {
    return {&W_ast, &b_ast, &W_cfg, &b_cfg, &alpha.free};
}

Vector fuse(const Vector& x_ast, const Vector& x_cfg, const FusionParams& params) {
    if (x_ast.size() != params.W_ast.value.cols())
        throw Error("fuse: x_ast dim " + std::to_string(x_ast.size()) +
                    " does not match W_AST columns " + std::to_string(params.W_ast.value.cols()));
    if (x_cfg.size() != params.W_cfg.value.cols())
        throw Error("fuse: x_cfg dim " + std::to_string(x_cfg.size()) +
                    " does not match W_CFG columns " + std::to_string(params.W_cfg.value.cols()));
    const double a = params.alpha.value();
    Vector projected_ast = params.W_ast.value * x_ast + params.b_ast.value;
    Vector projected_cfg = params.W_cfg.value * x_cfg + params.b_cfg.value;
    return a * projected_ast + (1.0 - a) * projected_cfg;
}

void fuse_backward(const Vector& x_ast, const Vector& x_cfg, FusionParams& params,
                   const Vector& d_out, Vector* d_x_ast, Vector* d_x_cfg) {
    const double a = params.alpha.value();
    Vector projected_ast = params.W_ast.value * x_ast + params.b_ast.value;
    Vector projected_cfg = params.W_cfg.value * x_cfg + params.b_cfg.value;

    params.W_ast.grad += (a * d_out) * x_ast.transpose();
    params.b_ast.grad += a * d_out;
    params.W_cfg.grad += ((1.0 - a) * d_out) * x_cfg.transpose();
    params.b_cfg.grad += (1.0 - a) * d_out;

    double d_alpha = d_out.dot(projected_ast - projected_cfg);
    params.alpha.free.grad(0, 0) += params.alpha.grad_chain(d_alpha);

    if (d_x_ast) *d_x_ast += a * (params.W_ast.value.transpose() * d_out);
    if (d_x_cfg) *d_x_cfg += (1.0 - a) * (params.W_cfg.value.transpose() * d_out);
}

FusionClassifier FusionClassifier::init(int d_out, int d_ast, int d_cfg, int classes,
                                        const nn::ParamRng& rng) {
    FusionClassifier model;
    model.fusion = FusionParams::init(d_out, d_ast, d_cfg, rng);
    model.head_W = nn::make_param("fusion.head.W", classes, d_out, rng);
    model.head_b = nn::make_zero_param("fusion.head.b", classes, 1);
    return model;
}

std::vector<Param*> FusionClassifier::parameters() {
    auto out = fusion.parameters();
    out.push_back(&head_W);
    out.push_back(&head_b);
    return out;
}

TrainReport train_fusion(const std::vector<FusionSample>& dataset, FusionClassifier& model,
                         const TrainConfig& config) {
    if (dataset.empty()) throw Error("train_fusion: empty dataset");
    nn::Adam optimizer(config.learning_rate, config.weight_decay);
    auto params = model.parameters();
    std::mt19937_64 rng(config.seed);
    std::vector<size_t> order(dataset.size());
    std::iota(order.begin(), order.end(), 0);

    TrainReport report;
    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), rng);
        double epoch_loss = 0.0;
        for (size_t start = 0; start < order.size();
             start += static_cast<size_t>(config.batch_size)) {
            size_t end = std::min(order.size(), start + static_cast<size_t>(config.batch_size));
            for (auto* p : params) p->zero_grad();
            for (size_t i = start; i < end; ++i) {
                const auto& sample = dataset[order[i]];
                Vector combined = fuse(sample.x_ast, sample.x_cfg, model.fusion);
                Vector logits = model.head_W.value * combined + model.head_b.value;
                Vector dlogits;
                epoch_loss += nn::cross_entropy(logits, sample.label, &dlogits);
                dlogits /= static_cast<double>(end - start);
                model.head_W.grad += dlogits * combined.transpose();
                model.head_b.grad += dlogits;
                Vector d_combined = model.head_W.value.transpose() * dlogits;
                fuse_backward(sample.x_ast, sample.x_cfg, model.fusion, d_combined);
            }
            optimizer.step(params);
        }
        report.epoch_losses.push_back(epoch_loss / static_cast<double>(dataset.size()));
    }

    size_t correct = 0;
    for (const auto& sample : dataset) {
        Vector combined = fuse(sample.x_ast, sample.x_cfg, model.fusion);
        Vector logits = model.head_W.value * combined + model.head_b.value;
        Eigen::Index best;
        logits.maxCoeff(&best);
        if (static_cast<int>(best) == sample.label) ++correct;
    }
    report.final_accuracy = static_cast<double>(correct) / static_cast<double>(dataset.size());
    return report;
}

AlignmentParams AlignmentParams::init(int d_low, int d_combined, int d_embedding,
                                      const nn::ParamRng& rng) {
    AlignmentParams p;
    p.W_combined = nn::make_param("align.W_combined", d_low, d_combined, rng);
    p.b_combined = nn::make_zero_param("align.b_combined", d_low, 1);
    p.W_embedding = nn::make_param("align.W_embedding", d_low, d_embedding, rng);
    p.b_embedding = nn::make_zero_param("align.b_embedding", d_low, 1);
    p.alpha.free = nn::make_zero_param("align.alpha", 1, 1);
    p.alpha.free.decay = false;
    return p;
}

Vector align_and_combine(const Vector& x_combined, const Vector& d_embedding,
                         const AlignmentParams& params) {
    if (x_combined.size() != params.W_combined.value.cols())
        throw Error("align_and_combine: x_combined dim " + std::to_string(x_combined.size()) +
                    " does not match W_low_combined columns " +
                    std::to_string(params.W_combined.value.cols()));
    if (d_embedding.size() != params.W_embedding.value.cols())
        throw Error("align_and_combine: d_embedding dim " + std::to_string(d_embedding.size()) +
                    " does not match W_low_embedding columns " +
                    std::to_string(params.W_embedding.value.cols()));
    const double a = params.alpha.value();
    Vector low_combined = params.W_combined.value * x_combined + params.b_combined.value;
    Vector low_embedding = params.W_embedding.value * d_embedding + params.b_embedding.value;
    return a * low_combined + (1.0 - a) * low_embedding;
}

}  // namespace natlm::enc
