// Copyright 2026 The natlm Authors.
// SPDX-License-Identifier: Apache-2.0
#include "natlm/reasoner.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <thread>

#include <json.hpp>

namespace natlm::llm {

std::vector<double> class_weights(const std::vector<long>& counts, double log_base) {
    std::vector<double> weights;
    weights.reserve(counts.size());
    for (size_t i = 0; i < counts.size(); ++i) {
        if (counts[i] < 1)
            throw Error("class_weights: count for class " + std::to_string(i) +
                        " must be >= 1, got " + std::to_string(counts[i]));
        double log_value = std::log(1.0 + static_cast<double>(counts[i]));
        if (log_base > 0.0) log_value /= std::log(log_base);
        weights.push_back(1.0 / log_value);
    }
    return weights;
}

double weighted_loss(const Vector& y, const Vector& y_hat, const Vector& w, size_t* clamped) {
    if (y.size() != y_hat.size() || y.size() != w.size())
        throw Error("weighted_loss: y, y_hat and w must have equal length");
    double loss = 0.0;
    size_t clamp_count = 0;
    for (Eigen::Index i = 0; i < y.size(); ++i) {
        if (y(i) == 0.0) continue;
        double p = y_hat(i);
        if (p <= 0.0) {
            p = 1e-12;
            ++clamp_count;
        }
        loss -= w(i) * y(i) * std::log(p);
    }
    if (clamped) *clamped = clamp_count;
    return loss;
}

FilterResult filter_predictions(const std::vector<DefectPrediction>& predictions, double tau) {
    if (tau < 0.0 || tau > 1.0) throw Error("filter_predictions: tau must lie in [0, 1]");
    FilterResult result;
    for (const auto& p : predictions) {
        if (p.confidence >= tau)
            result.kept.push_back(p);
        else
            ++result.dropped;
    }
    return result;
}

std::vector<DefectPrediction> parse_predictions(const std::string& reply,
                                                std::vector<std::string>* diagnostics) {
    std::vector<DefectPrediction> predictions;
    std::istringstream in(reply);
    std::string line;
    DefectPrediction* last = nullptr;
    bool saw_defect_marker = false;
    while (std::getline(in, line)) {
        auto defect_pos = line.find("DEFECT:");
        if (defect_pos != std::string::npos) {
            saw_defect_marker = true;
            std::istringstream rest(line.substr(defect_pos + 7));
            std::string type_name;
            rest >> type_name;
            DefectPrediction pred;
            try {
                pred.defect_type = oracle::defect_type_from_name(type_name);
            } catch (const Error&) {
                if (diagnostics)
                    diagnostics->push_back("unrecognized defect name: " + type_name);
                last = nullptr;
                continue;
            }
            auto conf_pos = line.find("CONFIDENCE:");
            if (conf_pos != std::string::npos) {
                try {
                    pred.confidence = std::stod(line.substr(conf_pos + 11));
                } catch (const std::exception&) {
                    pred.confidence = 0.0;
                    if (diagnostics)
                        diagnostics->push_back("unparsable confidence for " + type_name);
                }
            } else {
                pred.confidence = 0.0;
                if (diagnostics) diagnostics->push_back("missing confidence for " + type_name);
            }
            pred.confidence = std::clamp(pred.confidence, 0.0, 1.0);
            predictions.push_back(std::move(pred));
            last = &predictions.back();
        } else if (last) {
            auto rat_pos = line.find("RATIONALE:");
            if (rat_pos != std::string::npos) {
                std::string text = line.substr(rat_pos + 10);
                if (!text.empty() && text.front() == ' ') text.erase(text.begin());
                last->rationale = text;
                last = nullptr;
            }
        }
    }
    if (!saw_defect_marker && reply.find("NO DEFECTS") == std::string::npos && diagnostics)
        diagnostics->push_back("reply had no structured defect block");
    return predictions;
}

std::string Report::to_json() const {
    nlohmann::ordered_json j;
    j["contract"] = contract;
    j["predictions"] = nlohmann::ordered_json::array();
    for (const auto& p : predictions) {
        nlohmann::ordered_json jp;
        jp["type"] = oracle::defect_type_name(p.defect_type);
        char buf[24];
        std::snprintf(buf, sizeof(buf), "%.6f", p.confidence);
        jp["confidence"] = std::stod(buf);
        jp["rationale"] = p.rationale;
        jp["locations"] = p.locations;
        j["predictions"].push_back(std::move(jp));
    }
    j["dropped"] = dropped;
    j["remediation"] = remediation;
    if (analysis_unavailable) {
        j["analysis_unavailable"] = true;
        j["error"] = error;
    }
    j["meta"] = {{"tool", tool},          {"version", version},
                 {"seed", seed},          {"tau", tau},
                 {"backend", backend},    {"template_version", template_version},
                 {"samples", samples},    {"temperature", temperature}};
    return j.dump(2);
}

std::string Report::render_text() const {
    std::ostringstream out;
    out << "== defect analysis: " << contract << " ==\n";
    out << "tool " << tool << " " << version << " | backend " << backend << " | seed " << seed
        << " | tau " << tau << "\n";
    if (analysis_unavailable) {
        out << "ANALYSIS UNAVAILABLE: " << error << "\n";
        return out.str();
    }
    if (predictions.empty()) {
        out << "no defects at or above the confidence threshold";
        out << " (" << dropped << " low-confidence prediction(s) dropped)\n";
        return out.str();
    }
    for (const auto& p : predictions) {
        char buf[16];
        std::snprintf(buf, sizeof(buf), "%.2f", p.confidence);
        out << "- " << oracle::defect_type_name(p.defect_type) << " (confidence " << buf << ")\n";
        if (!p.rationale.empty()) out << "    rationale: " << p.rationale << "\n";
        auto advice = remediation.find(oracle::defect_type_name(p.defect_type));
        if (advice != remediation.end()) out << "    remediation: " << advice->second << "\n";
    }
    out << dropped << " low-confidence prediction(s) dropped\n";
    return out.str();
}

Report Report::from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    Report report;
    report.contract = j.at("contract").get<std::string>();
    for (const auto& jp : j.at("predictions")) {
        DefectPrediction p;
        p.defect_type = oracle::defect_type_from_name(jp.at("type").get<std::string>());
        p.confidence = jp.at("confidence").get<double>();
        p.rationale = jp.value("rationale", "");
        if (jp.contains("locations"))
            p.locations = jp["locations"].get<std::vector<std::string>>();
        report.predictions.push_back(std::move(p));
    }
    report.dropped = j.at("dropped").get<size_t>();
    if (j.contains("remediation"))
        report.remediation = j["remediation"].get<std::map<std::string, std::string>>();
    report.analysis_unavailable = j.value("analysis_unavailable", false);
    report.error = j.value("error", "");
    const auto& meta = j.at("meta");
    report.tool = meta.value("tool", "natlm");
    report.version = meta.value("version", "");
    report.seed = meta.value("seed", uint64_t{0});
    report.tau = meta.value("tau", 0.5);
    report.backend = meta.value("backend", "");
    report.template_version = meta.value("template_version", kPromptTemplateVersion);
    report.samples = meta.value("samples", 0);
    report.temperature = meta.value("temperature", 0.0);
    return report;
}

Report analyze(const PromptBundle& bundle, LlmBackend& backend, const BackendConfig& config,
               double tau) {
    if (config.samples < 1) throw Error("analyze: sample count must be >= 1");
    if (config.temperature < 0.0) throw Error("analyze: temperature must be >= 0");
    Report report;
    report.contract = bundle.contract_name;
    report.version = kToolVersion;
    report.seed = config.seed;
    report.tau = tau;
    report.backend = backend.name();
    report.template_version = bundle.template_version;
    report.samples = config.samples;
    report.temperature = config.temperature;

    const std::string prompt = bundle.render();
    std::vector<std::string> replies;
    for (int sample = 0; sample < config.samples; ++sample) {
        std::string reply;
        bool ok = false;
        std::string last_error;
        for (int attempt = 0; attempt < config.max_attempts && !ok; ++attempt) {
            if (attempt > 0)
                std::this_thread::sleep_for(
                    std::chrono::milliseconds(config.backoff_ms << (attempt - 1)));
            try {
                reply = backend.complete(prompt, config.temperature, sample);
                ok = true;
            } catch (const std::exception& e) {
                last_error = e.what();
            }
        }
        if (!ok) {
            report.analysis_unavailable = true;
            report.error = "backend failed after " + std::to_string(config.max_attempts) +
                           " attempts: " + last_error;
            return report;
        }
        replies.push_back(std::move(reply));
    }

    // Mean confidence across samples; a sample that omits a defect counts 0.
    std::array<double, oracle::kDefectTypeCount> sums{};
    std::array<std::string, oracle::kDefectTypeCount> rationales{};
    std::array<bool, oracle::kDefectTypeCount> seen{};
    for (const auto& reply : replies) {
        for (const auto& pred : parse_predictions(reply)) {
            auto i = static_cast<size_t>(pred.defect_type);
            sums[i] += pred.confidence;
            seen[i] = true;
            if (rationales[i].empty()) rationales[i] = pred.rationale;
        }
    }

    std::vector<DefectPrediction> aggregated;
    for (int i = 0; i < oracle::kDefectTypeCount; ++i) {
        if (!seen[static_cast<size_t>(i)]) continue;
        DefectPrediction pred;
        pred.defect_type = static_cast<oracle::DefectType>(i);
        pred.confidence = sums[static_cast<size_t>(i)] / static_cast<double>(config.samples);
        pred.rationale = rationales[static_cast<size_t>(i)];
        aggregated.push_back(std::move(pred));
    }

    FilterResult filtered = filter_predictions(aggregated, tau);
    report.predictions = std::move(filtered.kept);
    report.dropped = filtered.dropped;
    for (const auto& p : report.predictions)
        report.remediation[oracle::defect_type_name(p.defect_type)] =
            oracle::defect_remediation(p.defect_type);
    return report;
}

CalibrationModel CalibrationModel::init(int classes, int feature_dim, const nn::ParamRng& rng) {
    CalibrationModel model;
    model.W = nn::make_param("calibration.W", classes, feature_dim, rng);
    model.b = nn::make_zero_param("calibration.b", classes, 1);
    return model;
}

Vector CalibrationModel::probabilities(const Vector& features) const {
    return nn::softmax(W.value * features + b.value);
}

std::vector<double> train_calibrator(const std::vector<CalibrationSample>& samples,
                                     CalibrationModel& model, int epochs,
                                     double learning_rate) {
    if (samples.empty()) throw Error("train_calibrator: empty dataset");
    const auto classes = model.W.value.rows();
    std::vector<long> counts(static_cast<size_t>(classes), 0);
    for (const auto& s : samples) {
        if (s.label < 0 || s.label >= classes)
            throw Error("train_calibrator: label out of range");
        ++counts[static_cast<size_t>(s.label)];
    }
    for (auto& c : counts) c = std::max<long>(c, 1);  // absent classes get weight 1/log 2
    std::vector<double> weights = class_weights(counts);

    nn::Adam optimizer(learning_rate, 1e-4);
    std::vector<nn::Param*> params{&model.W, &model.b};
    std::vector<double> losses;
    for (int epoch = 0; epoch < epochs; ++epoch) {
        model.W.zero_grad();
        model.b.zero_grad();
        double total = 0.0;
        for (const auto& s : samples) {
            Vector p = model.probabilities(s.features);
            double w = weights[static_cast<size_t>(s.label)];
            total += -w * std::log(std::max(p(s.label), 1e-12));
            Vector dlogits = p;
            dlogits(s.label) -= 1.0;
            dlogits *= w / static_cast<double>(samples.size());
            model.W.grad += dlogits * s.features.transpose();
            model.b.grad += dlogits;
        }
        optimizer.step(params);
        losses.push_back(total / static_cast<double>(samples.size()));
    }
    return losses;
}

}  // namespace natlm::llm
