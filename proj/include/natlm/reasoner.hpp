// Copyright 2026 The natlm Authors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <optional>

#include "natlm/llm.hpp"
#include "natlm/nn.hpp"
#include "natlm/prompt.hpp"

namespace natlm::llm {

using nn::Vector;

/// Inverse-log class weights: w_i = 1 / log(1 + n_i). Natural log by default; a
/// different base only rescales all weights uniformly.
std::vector<double> class_weights(const std::vector<long>& counts, double log_base = 0.0);

/// Weighted cross-entropy: -sum w_i y_i log(yhat_i). Predictions at
/// exactly zero with a positive label are clamped to 1e-12; the clamp count
/// is reported through `clamped` when provided.
double weighted_loss(const Vector& y, const Vector& y_hat, const Vector& w,
                     size_t* clamped = nullptr);

struct DefectPrediction {
    oracle::DefectType defect_type{};
    double confidence = 0.0;  // in [0, 1]
    std::string rationale;
    std::vector<std::string> locations;
};

struct FilterResult {
    std::vector<DefectPrediction> kept;
    size_t dropped = 0;
};

/// Threshold filter: keep iff confidence >= tau (boundary inclusive);
/// input order preserved.
FilterResult filter_predictions(const std::vector<DefectPrediction>& predictions, double tau);

/// Lenient parse of a backend reply into predictions. Lines that do not
/// match the instructed DEFECT/CONFIDENCE block are skipped; a reply with no
/// parsable block yields no predictions and a diagnostic.
std::vector<DefectPrediction> parse_predictions(const std::string& reply,
                                                std::vector<std::string>* diagnostics = nullptr);

struct Report {
    std::string contract;
    std::vector<DefectPrediction> predictions;  // kept after filtering
    size_t dropped = 0;
    std::map<std::string, std::string> remediation;  // defect type -> advice
    bool analysis_unavailable = false;
    std::string error;
    // Meta header.
    std::string tool = "natlm";
    std::string version;
    uint64_t seed = 0;
    double tau = 0.5;
    std::string backend;
    int template_version = kPromptTemplateVersion;
    int samples = 0;
    double temperature = 0.0;

    std::string to_json() const;
    std::string render_text() const;
    static Report from_json(const std::string& text);
};

/// Samples the backend `config.samples` times, aggregates per-defect
/// confidences as the mean across samples (a sample that omits a defect
/// contributes zero), filters at tau, and renders the report. Backend
/// failures are retried with exponential backoff; a still-failing backend
/// produces an "analysis unavailable" report, never a silent pass.
Report analyze(const PromptBundle& bundle, LlmBackend& backend, const BackendConfig& config,
               double tau);

// --- Local calibration over retrieval features ---

struct CalibrationSample {
    Vector features;  // per-defect retrieval scores
    int label = 0;    // defect class index
};

struct CalibrationModel {
    nn::Param W;
    nn::Param b;

    static CalibrationModel init(int classes, int feature_dim, const nn::ParamRng& rng);
    Vector probabilities(const Vector& features) const;
};

/// Trains the calibration classifier with per-class inverse-log weights on
/// the cross-entropy of each sample. Returns the per-epoch mean loss.
std::vector<double> train_calibrator(const std::vector<CalibrationSample>& samples,
                                     CalibrationModel& model, int epochs = 50,
                                     double learning_rate = 0.05);

}  // namespace natlm::llm
