// Copyright 2026 The natlm Authors.
// SPDX-License-Identifier: Apache-2.0
#include "natlm/metrics.hpp"

#include <cstdio>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

#include "natlm/util.hpp"

namespace natlm::metrics {

MetricsRow MetricsRow::from_counts(const std::string& label, long tp, long fp, long fn) {
    MetricsRow row;
    row.label = label;
    row.tp = tp;
    row.fp = fp;
    row.fn = fn;
    if (tp + fp + fn == 0) {
        row.undefined = true;
        return row;
    }
    row.precision = tp + fp > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fp) : 0.0;
    row.recall = tp + fn > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fn) : 0.0;
    row.f1 = row.precision + row.recall > 0.0
                 ? 2.0 * row.precision * row.recall / (row.precision + row.recall)
                 : 0.0;
    return row;
}

MetricsTable compute_metrics(const std::vector<ConfusionCounts>& counts) {
    MetricsTable table;
    long tp = 0, fp = 0, fn = 0;
    for (const auto& c : counts) {
        table.rows.push_back(
            MetricsRow::from_counts(oracle::defect_type_name(c.defect_type), c.tp, c.fp, c.fn));
        tp += c.tp;
        fp += c.fp;
        fn += c.fn;
    }
    table.micro = MetricsRow::from_counts("micro-average", tp, fp, fn);
    return table;
}

MetricsTable score_predictions(const std::vector<LabeledSet>& predictions,
                               const std::vector<LabeledSet>& ground_truth) {
    std::map<std::string, std::set<int>> truth;
    for (const auto& g : ground_truth) {
        truth[g.contract];  // contracts with no expected defects are still known
        for (auto t : g.types) truth[g.contract].insert(static_cast<int>(t));
    }

    std::vector<std::string> warnings;
    long tp[oracle::kDefectTypeCount] = {};
    long fp[oracle::kDefectTypeCount] = {};
    long fn[oracle::kDefectTypeCount] = {};

    std::map<std::string, std::set<int>> predicted;
    for (const auto& p : predictions) {
        if (!truth.count(p.contract) && !p.types.empty())
            warnings.push_back("contract " + p.contract +
                               " absent from the manifest; its predictions count as FP");
        for (auto t : p.types) predicted[p.contract].insert(static_cast<int>(t));
    }

    for (const auto& [contract, types] : predicted) {
        auto truth_it = truth.find(contract);
        for (int t : types) {
            bool is_true = truth_it != truth.end() && truth_it->second.count(t);
            (is_true ? tp : fp)[t] += 1;
        }
    }
    for (const auto& [contract, types] : truth) {
        auto pred_it = predicted.find(contract);
        for (int t : types) {
            bool was_found = pred_it != predicted.end() && pred_it->second.count(t);
            if (!was_found) fn[t] += 1;
        }
    }

    std::vector<ConfusionCounts> counts;
    for (int i = 0; i < oracle::kDefectTypeCount; ++i)
        counts.push_back({static_cast<oracle::DefectType>(i), tp[i], fp[i], fn[i]});
    MetricsTable table = compute_metrics(counts);
    table.warnings = std::move(warnings);
    return table;
}

namespace {

nlohmann::ordered_json row_to_json(const MetricsRow& row) {
    nlohmann::ordered_json j;
    j["label"] = row.label;
    j["tp"] = row.tp;
    j["fp"] = row.fp;
    j["fn"] = row.fn;
    j["precision"] = row.precision;
    j["recall"] = row.recall;
    j["f1"] = row.f1;
    if (row.undefined) j["undefined"] = true;
    return j;
}

}  // namespace

std::string MetricsTable::to_json() const {
    nlohmann::ordered_json j;
    j["rows"] = nlohmann::ordered_json::array();
    for (const auto& row : rows) j["rows"].push_back(row_to_json(row));
    j["micro"] = row_to_json(micro);
    if (!warnings.empty()) j["warnings"] = warnings;
    return j.dump(2);
}

std::string MetricsTable::render_text() const {
    std::ostringstream out;
    auto line = [&](const MetricsRow& row) {
        char buf[160];
        if (row.undefined) {
            std::snprintf(buf, sizeof(buf), "%-22s %6ld %6ld %6ld %9s %9s %9s  (undefined)",
                          row.label.c_str(), row.tp, row.fp, row.fn, "-", "-", "-");
        } else {
            std::snprintf(buf, sizeof(buf), "%-22s %6ld %6ld %6ld %8.2f%% %8.2f%% %8.2f%%",
                          row.label.c_str(), row.tp, row.fp, row.fn, 100.0 * row.precision,
                          100.0 * row.recall, 100.0 * row.f1);
        }
        out << buf << "\n";
    };
    char header[160];
    std::snprintf(header, sizeof(header), "%-22s %6s %6s %6s %9s %9s %9s", "defect", "TP", "FP",
                  "FN", "PRE", "RE", "F1");
    out << header << "\n";
    for (const auto& row : rows) line(row);
    line(micro);
    for (const auto& w : warnings) out << "warning: " << w << "\n";
    return out.str();
}

}  // namespace natlm::metrics
