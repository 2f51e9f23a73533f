// Copyright 2026 The natlm Authors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <functional>

#include "natlm/nn.hpp"

namespace natlm::test {

/// Central finite differences over every entry of `param`, compared against
/// the already-populated analytic gradient. The loss callback must be pure.
/// Returns the worst relative error.
inline double finite_difference_check(nn::Param& param,
                                      const std::function<double()>& loss,
                                      double epsilon = 1e-4) {
    double worst = 0.0;
    for (Eigen::Index c = 0; c < param.value.cols(); ++c) {
        for (Eigen::Index r = 0; r < param.value.rows(); ++r) {
            const double saved = param.value(r, c);
            param.value(r, c) = saved + epsilon;
            const double up = loss();
            param.value(r, c) = saved - epsilon;
            const double down = loss();
            param.value(r, c) = saved;
            const double numeric = (up - down) / (2.0 * epsilon);
            const double analytic = param.grad(r, c);
            const double rel = std::abs(analytic - numeric) /
                               std::max({std::abs(analytic), std::abs(numeric), 1e-8});
            worst = std::max(worst, rel);
        }
    }
    return worst;
}

}  // namespace natlm::test
