// Copyright 2026 The natlm Authors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "natlm/nn.hpp"
#include "natlm/textcnn.hpp"  // TrainConfig / TrainReport

namespace natlm::enc {

/// Learnable convex weight stored as an unconstrained scalar behind a
/// sigmoid, so optimizer steps can never leave [0, 1].
struct SquashedAlpha {
    Param free;  // 1x1

    double value() const { return nn::sigmoid(free.value(0, 0)); }
    /// Exact endpoints: targets 0 and 1 map to saturating free values.
    void set(double target);
    double grad_chain(double d_alpha) const {
        double a = value();
        return d_alpha * a * (1.0 - a);
    }
};

struct FusionParams {
    Param W_ast;  // d_out x d_ast
    Param b_ast;  // d_out x 1
    Param W_cfg;  // d_out x d_cfg
    Param b_cfg;  // d_out x 1
    SquashedAlpha alpha;

    static FusionParams init(int d_out, int d_ast, int d_cfg, const nn::ParamRng& rng);
    std::vector<Param*> parameters();
};

/// Convex fusion: alpha * (W_ast x_ast + b_ast) + (1 - alpha) * (W_cfg x_cfg + b_cfg).
Vector fuse(const Vector& x_ast, const Vector& x_cfg, const FusionParams& params);

void fuse_backward(const Vector& x_ast, const Vector& x_cfg, FusionParams& params,
                   const Vector& d_out, Vector* d_x_ast = nullptr, Vector* d_x_cfg = nullptr);

struct FusionSample {
    Vector x_ast;
    Vector x_cfg;
    int label = 0;
};

struct FusionClassifier {
    FusionParams fusion;
    Param head_W;  // classes x d_out
    Param head_b;

    static FusionClassifier init(int d_out, int d_ast, int d_cfg, int classes,
                                 const nn::ParamRng& rng);
    std::vector<Param*> parameters();
};

/// Fusion trainer: cross-entropy through a linear head over the fused vector;
/// alpha is updated jointly with the projection matrices.
TrainReport train_fusion(const std::vector<FusionSample>& dataset, FusionClassifier& model,
                         const TrainConfig& config = {});

struct AlignmentParams {
    Param W_combined;   // d_low x d_combined
    Param b_combined;
    Param W_embedding;  // d_low x d_embedding
    Param b_embedding;
    SquashedAlpha alpha;

    static AlignmentParams init(int d_low, int d_combined, int d_embedding,
                                const nn::ParamRng& rng);
};

/// Eqs 11-13: project both vectors into the shared low-dimensional space and
/// blend them with the second learnable convex weight.
Vector align_and_combine(const Vector& x_combined, const Vector& d_embedding,
                         const AlignmentParams& params);

}  // namespace natlm::enc
