// Copyright 2026 The natlm Authors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include "natlm/oracle.hpp"

namespace natlm::metrics {

struct ConfusionCounts {
    oracle::DefectType defect_type{};
    long tp = 0;
    long fp = 0;
    long fn = 0;
};

struct MetricsRow {
    std::string label;
    long tp = 0, fp = 0, fn = 0;
    double precision = 0.0;  // in [0, 1]
    double recall = 0.0;
    double f1 = 0.0;
    bool undefined = false;  // all-zero counts: metrics reported as 0 with this flag

    static MetricsRow from_counts(const std::string& label, long tp, long fp, long fn);
};

struct MetricsTable {
    std::vector<MetricsRow> rows;   // one per defect type
    MetricsRow micro;               // micro-average over all classes
    std::vector<std::string> warnings;

    std::string to_json() const;
    std::string render_text() const;
};

MetricsTable compute_metrics(const std::vector<ConfusionCounts>& counts);

/// Per-fixture predicted defect-type sets vs. a ground-truth manifest.
/// Types predicted for a contract missing from the manifest count as FP
/// (with a warning).
struct LabeledSet {
    std::string contract;
    std::vector<oracle::DefectType> types;
};

MetricsTable score_predictions(const std::vector<LabeledSet>& predictions,
                               const std::vector<LabeledSet>& ground_truth);

}  // namespace natlm::metrics
