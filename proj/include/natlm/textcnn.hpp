// Copyright 2026 The natlm Authors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "natlm/bytecode.hpp"
#include "natlm/nn.hpp"

namespace natlm::enc {

using nn::Matrix;
using nn::Param;
using nn::Vector;

/// Vocabulary token for one instruction: the mnemonic, with PUSH immediates
/// bucketed into {zero, small(<256), addr(20 bytes), large}.
std::string instruction_token(const evm::Instruction& instruction);

/// Every token instruction_token can produce, in deterministic order.
std::vector<std::string> standard_instruction_vocab();

struct TextCnnConfig {
    std::vector<int> kernel_heights{2, 3, 4};
    int kernels_per_height = 32;
    int embed_dim = 64;

    int output_dim() const {
        return static_cast<int>(kernel_heights.size()) * kernels_per_height;
    }
};

struct TextCnnParams {
    TextCnnConfig config;
    // One bank per kernel height; row r of weights[i] is the r-th kernel
    // flattened to length h*d.
    std::vector<Param> weights;
    std::vector<Param> biases;

    static TextCnnParams init(const TextCnnConfig& config, const nn::ParamRng& rng);
    std::vector<Param*> parameters();
};

/// Forward intermediates needed by the backward pass.
struct TextCnnTape {
    Matrix padded;                           // input zero-padded to the max kernel height
    std::vector<std::vector<int>> argmax;    // per bank, per kernel: winning position
    std::vector<std::vector<double>> best;   // per bank, per kernel: pre-ReLU value at argmax
};

/// Bank convolution: ReLU(W_k * window + b_k) per position, max-pooled,
/// outputs concatenated in fixed bank/kernel order.
Vector textcnn_forward(const Matrix& block_embeds, const TextCnnParams& params,
                       TextCnnTape* tape = nullptr);

/// Accumulates parameter gradients for upstream gradient d_out; optionally
/// returns the input gradient.
void textcnn_backward(const TextCnnTape& tape, TextCnnParams& params, const Vector& d_out,
                      Matrix* d_input = nullptr);

struct TrainConfig {
    int epochs = 30;
    double learning_rate = 3e-4;
    int batch_size = 256;
    double weight_decay = 1e-4;
    uint64_t seed = 42;
};

struct TrainReport {
    std::vector<double> epoch_losses;  // mean per-sample loss per epoch
    double final_accuracy = 0.0;
};

struct BlockClassifier {
    TextCnnParams cnn;
    Param head_W;  // classes x feature_dim
    Param head_b;  // classes x 1

    static BlockClassifier init(const TextCnnConfig& config, int classes,
                                const nn::ParamRng& rng);
    std::vector<Param*> parameters();
    Vector logits(const Matrix& block_embeds) const;
};

struct LabeledBlock {
    Matrix embeds;  // N x d
    int label = 0;
};

/// Adam-trained cross-entropy classifier over block features (batch 256,
/// learning rate 3e-4 by default).
TrainReport train_block_classifier(const std::vector<LabeledBlock>& dataset,
                                   BlockClassifier& model, const TrainConfig& config = {});

}  // namespace natlm::enc
