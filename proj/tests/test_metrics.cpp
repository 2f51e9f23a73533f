// Copyright 2026 The natlm Authors.
// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include "natlm/metrics.hpp"

using namespace natlm;
using namespace natlm::metrics;
using oracle::DefectType;

TEST_SUITE("metrics") {

TEST_CASE("reference confusion counts reproduce the expected percentage cells") {
    auto table = compute_metrics({{DefectType::Erc721Reentrancy, 423, 59, 80},
                                  {DefectType::PublicBurn, 42, 7, 2},
                                  {DefectType::RiskyMutableProxy, 13, 1, 2},
                                  {DefectType::UnlimitedMinting, 712, 124, 69}});
    REQUIRE(table.rows.size() == 4);
    // Tolerance 0.05 percentage points against the reference cells.
    auto near = [](double actual_fraction, double expected_percent) {
        return std::abs(actual_fraction * 100.0 - expected_percent) <= 0.05;
    };
    CHECK(near(table.rows[0].precision, 87.75));
    CHECK(near(table.rows[0].recall, 84.09));
    CHECK(near(table.rows[0].f1, 85.88));
    CHECK(near(table.rows[1].precision, 85.74));
    CHECK(near(table.rows[1].recall, 95.45));
    CHECK(near(table.rows[1].f1, 90.32));
    CHECK(near(table.rows[2].precision, 92.85));
    CHECK(near(table.rows[2].recall, 86.66));
    CHECK(near(table.rows[2].f1, 89.65));
    CHECK(near(table.rows[3].precision, 85.16));
    CHECK(near(table.rows[3].recall, 91.16));
    CHECK(near(table.rows[3].f1, 88.06));
    // Micro-average over the four classes.
    CHECK(near(table.micro.precision, 86.17));
    CHECK(near(table.micro.recall, 88.61));
}

TEST_CASE("degenerate all-zero counts are flagged, never a division error") {
    auto table = compute_metrics({{DefectType::PublicBurn, 0, 0, 0}});
    REQUIRE(table.rows.size() == 1);
    CHECK(table.rows[0].undefined);
    CHECK(table.rows[0].precision == 0.0);
    CHECK(table.rows[0].recall == 0.0);
    CHECK(table.rows[0].f1 == 0.0);
    CHECK(table.micro.undefined);
    std::string text = table.render_text();
    CHECK(text.find("undefined") != std::string::npos);
}

TEST_CASE("precision/recall edge cases") {
    auto no_fp = MetricsRow::from_counts("x", 5, 0, 5);
    CHECK(no_fp.precision == 1.0);
    CHECK(no_fp.recall == 0.5);
    auto no_tp = MetricsRow::from_counts("y", 0, 3, 4);
    CHECK(no_tp.precision == 0.0);
    CHECK(no_tp.recall == 0.0);
    CHECK(no_tp.f1 == 0.0);
    CHECK(!no_tp.undefined);
}

TEST_CASE("score_predictions counts TP/FP/FN per type") {
    std::vector<LabeledSet> truth{{"a", {DefectType::PublicBurn}},
                                  {"b", {DefectType::UnlimitedMinting, DefectType::PublicBurn}},
                                  {"c", {}}};
    std::vector<LabeledSet> predictions{
        {"a", {DefectType::PublicBurn}},                                  // TP
        {"b", {DefectType::UnlimitedMinting}},                            // TP + FN(public_burn)
        {"c", {DefectType::RiskyMutableProxy}}};                          // FP
    auto table = score_predictions(predictions, truth);
    CHECK(table.rows[static_cast<int>(DefectType::PublicBurn)].tp == 1);
    CHECK(table.rows[static_cast<int>(DefectType::PublicBurn)].fn == 1);
    CHECK(table.rows[static_cast<int>(DefectType::UnlimitedMinting)].tp == 1);
    CHECK(table.rows[static_cast<int>(DefectType::RiskyMutableProxy)].fp == 1);
    CHECK(table.warnings.empty());
}

TEST_CASE("predictions for unknown contracts count as FP with a warning") {
    std::vector<LabeledSet> truth{{"a", {DefectType::PublicBurn}}};
    std::vector<LabeledSet> predictions{{"a", {DefectType::PublicBurn}},
                                        {"ghost", {DefectType::PublicBurn}}};
    auto table = score_predictions(predictions, truth);
    CHECK(table.rows[static_cast<int>(DefectType::PublicBurn)].tp == 1);
    CHECK(table.rows[static_cast<int>(DefectType::PublicBurn)].fp == 1);
    REQUIRE(table.warnings.size() == 1);
    CHECK(table.warnings[0].find("ghost") != std::string::npos);
}

TEST_CASE("json rendering carries rows and micro") {
    auto table = compute_metrics({{DefectType::PublicBurn, 42, 7, 2}});
    std::string json = table.to_json();
    CHECK(json.find("\"micro\"") != std::string::npos);
    CHECK(json.find("public_burn") != std::string::npos);
}

}  // TEST_SUITE
