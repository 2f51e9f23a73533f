// Copyright 2026 The natlm Authors.
// SPDX-License-Identifier: Apache-2.0
#include "natlm/nn.hpp"

#include <cmath>

namespace natlm::nn {

Param make_param(const std::string& name, Eigen::Index rows, Eigen::Index cols,
                 const ParamRng& rng, double scale) {
    Param p;
    p.name = name;
    p.value.resize(rows, cols);
    p.grad = Matrix::Zero(rows, cols);
    auto stream = rng.stream(name);
    std::uniform_real_distribution<double> dist(-scale, scale);
    for (Eigen::Index c = 0; c < cols; ++c)
        for (Eigen::Index r = 0; r < rows; ++r) p.value(r, c) = dist(stream);
    return p;
}

Param make_zero_param(const std::string& name, Eigen::Index rows, Eigen::Index cols) {
    Param p;
    p.name = name;
    p.value = Matrix::Zero(rows, cols);
    p.grad = Matrix::Zero(rows, cols);
    return p;
}

void Adam::step(const std::vector<Param*>& params) {
    ++t_;
    const double bc1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
    const double bc2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
    for (Param* p : params) {
        auto& slot = slots_[p];
        if (slot.m.size() == 0) {
            slot.m = Matrix::Zero(p->value.rows(), p->value.cols());
            slot.v = Matrix::Zero(p->value.rows(), p->value.cols());
        }
        Matrix g = p->grad;
        if (p->decay && weight_decay_ > 0.0) g += weight_decay_ * p->value;
        slot.m = beta1_ * slot.m + (1.0 - beta1_) * g;
        slot.v = beta2_ * slot.v + (1.0 - beta2_) * g.cwiseProduct(g);
        Matrix m_hat = slot.m / bc1;
        Matrix v_hat = slot.v / bc2;
        p->value.array() -= lr_ * m_hat.array() / (v_hat.array().sqrt() + eps_);
    }
}

Vector softmax(const Vector& scores) {
    if (scores.size() == 0) return scores;
    Vector shifted = scores.array() - scores.maxCoeff();
    Vector exps = shifted.array().exp();
    return exps / exps.sum();
}

double cross_entropy(const Vector& logits, int label, Vector* dlogits) {
    Vector p = softmax(logits);
    const double eps = 1e-12;
    double loss = -std::log(std::max(p(label), eps));
    if (dlogits) {
        *dlogits = p;
        (*dlogits)(label) -= 1.0;
    }
    return loss;
}

Matrix dropout(const Matrix& x, double rate, bool training, std::mt19937_64& rng) {
    if (!training || rate <= 0.0) return x;
    std::bernoulli_distribution keep(1.0 - rate);
    Matrix out = x;
    const double inv_keep = 1.0 / (1.0 - rate);
    for (Eigen::Index c = 0; c < out.cols(); ++c)
        for (Eigen::Index r = 0; r < out.rows(); ++r)
            out(r, c) = keep(rng) ? out(r, c) * inv_keep : 0.0;
    return out;
}

}  // namespace natlm::nn
