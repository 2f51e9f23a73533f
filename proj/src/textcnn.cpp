// Copyright 2026 The natlm Authors.
// SPDX-License-Identifier: Apache-2.0
#include "natlm/textcnn.hpp"

#include <algorithm>
#include <numeric>

#include "natlm/opcodes.hpp"

namespace natlm::enc {

std::string instruction_token(const evm::Instruction& instruction) {
    std::string token = evm::mnemonic(instruction.opcode);
    if (!evm::is_push(instruction.opcode)) {
        if (!evm::is_defined(instruction.opcode)) return "INVALID";  // bucket unknown bytes
        return token;
    }
    bool zero = std::all_of(instruction.immediate.begin(), instruction.immediate.end(),
                            [](uint8_t b) { return b == 0; });
    const char* bucket;
    if (zero) {
        bucket = "zero";
    } else if (instruction.immediate.size() == 20) {
        bucket = "addr";
    } else {
        bool small = true;
        for (size_t i = 0; i + 1 < instruction.immediate.size(); ++i)
            small &= instruction.immediate[i] == 0;
        bucket = small ? "small" : "large";
    }
    return token + "#" + bucket;
}

std::vector<std::string> standard_instruction_vocab() {
    std::vector<std::string> vocab;
    for (int op = 0; op <= 0xff; ++op) {
        auto byte = static_cast<uint8_t>(op);
        if (!evm::is_defined(byte)) continue;
        if (evm::is_push(byte)) {
            for (const char* bucket : {"zero", "small", "addr", "large"})
                vocab.push_back(evm::mnemonic(byte) + "#" + bucket);
        } else {
            vocab.push_back(evm::mnemonic(byte));
        }
    }
    return vocab;
}

TextCnnParams TextCnnParams::init(const TextCnnConfig& config, const nn::ParamRng& rng) {
    TextCnnParams p;
    p.config = config;
    for (int h : config.kernel_heights) {
        const std::string prefix = "textcnn.h" + std::to_string(h) + ".";
        p.weights.push_back(nn::make_param(prefix + "W", config.kernels_per_height,
                                           h * config.embed_dim, rng));
        p.biases.push_back(nn::make_zero_param(prefix + "b", config.kernels_per_height, 1));
    }
    return p;
}

std::vector<Param*> TextCnnParams::parameters() {
    std::vector<Param*> out;
    for (auto& w : weights) out.push_back(&w);
    for (auto& b : biases) out.push_back(&b);
    return out;
}

Vector textcnn_forward(const Matrix& block_embeds, const TextCnnParams& params,
                       TextCnnTape* tape) {
    const auto& cfg = params.config;
    if (block_embeds.rows() < 1) throw Error("textcnn: empty block");
    if (block_embeds.cols() != cfg.embed_dim)
        throw Error("textcnn: embedding dim " + std::to_string(block_embeds.cols()) +
                    " does not match configured dim " + std::to_string(cfg.embed_dim));

    int max_h = *std::max_element(cfg.kernel_heights.begin(), cfg.kernel_heights.end());
    Matrix padded = block_embeds;
    if (padded.rows() < max_h) {
        Matrix grown = Matrix::Zero(max_h, padded.cols());
        grown.topRows(padded.rows()) = padded;
        padded = std::move(grown);
    }

    Vector out(cfg.output_dim());
    if (tape) {
        tape->padded = padded;
        tape->argmax.assign(cfg.kernel_heights.size(), {});
        tape->best.assign(cfg.kernel_heights.size(), {});
    }

    int offset = 0;
    for (size_t bank = 0; bank < cfg.kernel_heights.size(); ++bank) {
        const int h = cfg.kernel_heights[bank];
        const auto positions = static_cast<int>(padded.rows()) - h + 1;
        const auto& W = params.weights[bank].value;
        const auto& b = params.biases[bank].value;
        for (int k = 0; k < cfg.kernels_per_height; ++k) {
            double best_pre = -std::numeric_limits<double>::infinity();
            int best_pos = 0;
            for (int p = 0; p < positions; ++p) {
                double pre = b(k, 0);
                for (int r = 0; r < h; ++r)
                    pre += W.row(k).segment(r * cfg.embed_dim, cfg.embed_dim)
                               .dot(padded.row(p + r));
                if (pre > best_pre) {
                    best_pre = pre;
                    best_pos = p;
                }
            }
            out(offset + k) = nn::relu(best_pre);
            if (tape) {
                tape->argmax[bank].push_back(best_pos);
                tape->best[bank].push_back(best_pre);
            }
        }
        offset += cfg.kernels_per_height;
    }
    return out;
}

void textcnn_backward(const TextCnnTape& tape, TextCnnParams& params, const Vector& d_out,
                      Matrix* d_input) {
    const auto& cfg = params.config;
    if (d_input) *d_input = Matrix::Zero(tape.padded.rows(), tape.padded.cols());
    int offset = 0;
    for (size_t bank = 0; bank < cfg.kernel_heights.size(); ++bank) {
        const int h = cfg.kernel_heights[bank];
        auto& W = params.weights[bank];
        auto& b = params.biases[bank];
        for (int k = 0; k < cfg.kernels_per_height; ++k) {
            const double g = d_out(offset + k);
            if (g == 0.0 || tape.best[bank][k] <= 0.0) continue;  // ReLU clipped or no signal
            const int p = tape.argmax[bank][k];
            b.grad(k, 0) += g;
            for (int r = 0; r < h; ++r) {
                W.grad.row(k).segment(r * cfg.embed_dim, cfg.embed_dim) +=
                    g * tape.padded.row(p + r);
                if (d_input)
                    d_input->row(p + r) +=
                        g * W.value.row(k).segment(r * cfg.embed_dim, cfg.embed_dim);
            }
        }
        offset += cfg.kernels_per_height;
    }
}

BlockClassifier BlockClassifier::init(const TextCnnConfig& config, int classes,
                                      const nn::ParamRng& rng) {
    BlockClassifier model;
    model.cnn = TextCnnParams::init(config, rng);
    model.head_W = nn::make_param("textcnn.head.W", classes, config.output_dim(), rng);
    model.head_b = nn::make_zero_param("textcnn.head.b", classes, 1);
    return model;
}

std::vector<Param*> BlockClassifier::parameters() {
    auto out = cnn.parameters();
    out.push_back(&head_W);
    out.push_back(&head_b);
    return out;
}

Vector BlockClassifier::logits(const Matrix& block_embeds) const {
    Vector features = textcnn_forward(block_embeds, cnn);
    return head_W.value * features + head_b.value;
}

TrainReport train_block_classifier(const std::vector<LabeledBlock>& dataset,
                                   BlockClassifier& model, const TrainConfig& config) {
    if (dataset.empty()) throw Error("train_block_classifier: empty dataset");
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
                TextCnnTape tape;
                Vector features = textcnn_forward(sample.embeds, model.cnn, &tape);
                Vector logits = model.head_W.value * features + model.head_b.value;
                Vector dlogits;
                epoch_loss += nn::cross_entropy(logits, sample.label, &dlogits);
                const double inv = 1.0 / static_cast<double>(end - start);
                dlogits *= inv;
                model.head_W.grad += dlogits * features.transpose();
                model.head_b.grad += dlogits;
                Vector dfeatures = model.head_W.value.transpose() * dlogits;
                textcnn_backward(tape, model.cnn, dfeatures);
            }
            optimizer.step(params);
        }
        report.epoch_losses.push_back(epoch_loss / static_cast<double>(dataset.size()));
    }

    size_t correct = 0;
    for (const auto& sample : dataset) {
        Vector logits = model.logits(sample.embeds);
        Eigen::Index best;
        logits.maxCoeff(&best);
        if (static_cast<int>(best) == sample.label) ++correct;
    }
    report.final_accuracy = static_cast<double>(correct) / static_cast<double>(dataset.size());
    return report;
}

}  // namespace natlm::enc
