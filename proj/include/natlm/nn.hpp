// Copyright 2026 The natlm Authors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "natlm/util.hpp"

namespace natlm::nn {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Deterministic parameter RNG: every tensor draws from a stream seeded by
/// (master seed, tensor name), so adding parameters never shifts existing
/// initializations.
class ParamRng {
public:
    explicit ParamRng(uint64_t master_seed) : master_(master_seed) {}

    std::mt19937_64 stream(const std::string& name) const {
        return std::mt19937_64(fnv1a(name) ^ (master_ * 0x9e3779b97f4a7c15ull));
    }

    uint64_t master_seed() const { return master_; }

private:
    uint64_t master_;
};

/// One trainable tensor (vectors are n-by-1) with its gradient accumulator.
struct Param {
    std::string name;
    Matrix value;
    Matrix grad;
    bool decay = true;  // include in L2 weight decay

    void zero_grad() { grad.setZero(); }
    Eigen::Index rows() const { return value.rows(); }
    Eigen::Index cols() const { return value.cols(); }
};

Param make_param(const std::string& name, Eigen::Index rows, Eigen::Index cols,
                 const ParamRng& rng, double scale = 0.05);
Param make_zero_param(const std::string& name, Eigen::Index rows, Eigen::Index cols);

/// Adam with L2 regularization folded into the gradient (decay 1e-4 on all
/// learnable parameters by default).
class Adam {
public:
    explicit Adam(double lr = 3e-4, double weight_decay = 1e-4, double beta1 = 0.9,
                  double beta2 = 0.999, double eps = 1e-8)
        : lr_(lr), weight_decay_(weight_decay), beta1_(beta1), beta2_(beta2), eps_(eps) {}

    void step(const std::vector<Param*>& params);

private:
    struct Slot {
        Matrix m, v;
    };
    double lr_, weight_decay_, beta1_, beta2_, eps_;
    long t_ = 0;
    std::map<const Param*, Slot> slots_;
};

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }
inline double relu(double x) { return x > 0 ? x : 0.0; }
inline double leaky_relu(double x, double slope) { return x > 0 ? x : slope * x; }
inline double leaky_relu_grad(double x, double slope) { return x > 0 ? 1.0 : slope; }

Vector softmax(const Vector& scores);

/// Softmax cross-entropy against an integer label; fills dlogits with the
/// gradient (p - onehot) when requested.
double cross_entropy(const Vector& logits, int label, Vector* dlogits = nullptr);

/// Inverted dropout; identity unless `training`.
Matrix dropout(const Matrix& x, double rate, bool training, std::mt19937_64& rng);

}  // namespace natlm::nn
