// Copyright 2026 The natlm Authors.
// SPDX-License-Identifier: Apache-2.0
//
// natlm command-line front end: knowledge-base construction, contract
// scanning, disassembly, metrics and report rendering.

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <set>
#include <thread>

#include "natlm/metrics.hpp"
#include "natlm/opcodes.hpp"
#include "natlm/pipeline.hpp"

#include <CLI11.hpp>
#include <json.hpp>

namespace fs = std::filesystem;
using namespace natlm;

namespace {

uint64_t seed_from_env_or(uint64_t fallback) {
    if (const char* env = std::getenv("NATLM_SEED")) {
        try {
            return std::stoull(env);
        } catch (const std::exception&) {
            std::cerr << "warning: ignoring unparsable NATLM_SEED\n";
        }
    }
    return fallback;
}

std::string default_params_path(const std::string& kb_path) {
    return kb_path + ".params.json";
}

std::vector<pipeline::ManualLabel> load_labels_file(const std::string& path) {
    auto doc = nlohmann::json::parse(read_file(path));
    std::vector<pipeline::ManualLabel> labels;
    for (const auto& entry : doc) {
        std::string contract = entry.at("name").get<std::string>();
        for (const auto& e : entry.at("expected"))
            labels.push_back({contract,
                              oracle::defect_type_from_name(
                                  e.at("defect_type").get<std::string>()),
                              e.at("function").get<std::string>()});
    }
    return labels;
}

std::vector<metrics::LabeledSet> manifest_to_labeled_sets(const std::string& path) {
    auto doc = nlohmann::json::parse(read_file(path));
    std::vector<metrics::LabeledSet> sets;
    for (const auto& entry : doc) {
        metrics::LabeledSet set;
        set.contract = entry.at("name").get<std::string>();
        for (const auto& e : entry.at("expected"))
            set.types.push_back(
                oracle::defect_type_from_name(e.at("defect_type").get<std::string>()));
        sets.push_back(std::move(set));
    }
    return sets;
}

struct CommonScanOptions {
    std::string kb_path;
    std::string params_path;
    double tau = 0.5;
    std::string backend = "mock";
    std::string base_url;
    std::string credential_env = "NATLM_API_KEY";
    int samples = 3;
    double temperature = 0.7;
    size_t k = 3;
    uint64_t seed = 42;
    bool seed_set = false;
};

llm::BackendConfig make_backend_config(const CommonScanOptions& options) {
    llm::BackendConfig config;
    config.kind = options.backend == "http" ? llm::BackendConfig::Kind::Http
                                            : llm::BackendConfig::Kind::Mock;
    config.temperature = options.temperature;
    config.samples = options.samples;
    config.seed = options.seed;
    config.base_url = options.base_url;
    config.credential_env = options.credential_env;
    return config;
}

std::unique_ptr<llm::LlmBackend> make_backend(const llm::BackendConfig& config) {
    if (config.kind == llm::BackendConfig::Kind::Http) {
        if (config.base_url.empty())
            throw Error("http backend requires --base-url");
        return std::make_unique<llm::HttpLlmBackend>(config);
    }
    return std::make_unique<llm::MockLlmBackend>(config.seed);
}

int run_scan_one(const pipeline::ContractInput& input, const kb::VectorStore& store,
                 const pipeline::PipelineParams& params, const CommonScanOptions& options,
                 const std::string& format, const std::string& out_path) {
    llm::MockEmbeddingBackend embedder(params.config.embedding_dim, options.seed);
    auto config = make_backend_config(options);
    auto backend = make_backend(config);
    auto output = pipeline::scan_contract(input, store, params, embedder, *backend, config,
                                          options.tau);
    std::string rendered =
        format == "json" ? output.report.to_json() : output.report.render_text();
    if (!out_path.empty())
        write_file(out_path, output.report.to_json());
    else
        std::cout << rendered << "\n";
    if (output.report.analysis_unavailable) return 2;
    return output.report.predictions.empty() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"NFT smart-contract defect detection pipeline"};
    app.require_subcommand(1);
    app.fallthrough();  // global flags (--format) may follow the subcommand
    app.set_config("--config", "", "Config file (INI: key=value, [section] per subcommand)");
    app.set_version_flag("--version", std::string("natlm ") + kToolVersion);

    std::string format = "text";
    app.add_option("--format", format, "Output format")
        ->check(CLI::IsMember({"text", "json"}))
        ->capture_default_str();

    int exit_code = 0;

    // --- kb ---
    auto* kb_cmd = app.add_subcommand("kb", "Knowledge-base operations");
    kb_cmd->require_subcommand(1);

    auto* kb_build = kb_cmd->add_subcommand("build", "Build a defect knowledge base");
    struct {
        std::string corpus_dir;
        std::string out = "kb.bin";
        std::string params_path;
        std::string labels;
        uint64_t seed = 42;
        bool seed_set = false;
        int jobs = 1;
    } build_opts;
    kb_build->add_option("--corpus", build_opts.corpus_dir, "Corpus directory")->required();
    kb_build->add_option("--out", build_opts.out, "Store file")->capture_default_str();
    kb_build->add_option("--params", build_opts.params_path,
                         "Parameter checkpoint path (default <out>.params.json)");
    kb_build->add_option("--labels", build_opts.labels,
                         "Manual label manifest (JSON); defaults to oracle labels");
    kb_build->add_option("--seed", build_opts.seed, "Parameter seed")
        ->each([&](const std::string&) { build_opts.seed_set = true; });
    kb_build->add_option("--jobs", build_opts.jobs, "Worker threads")->capture_default_str();
    kb_build->callback([&] {
        uint64_t seed = build_opts.seed_set ? build_opts.seed : seed_from_env_or(build_opts.seed);
        auto corpus = pipeline::load_corpus_dir(build_opts.corpus_dir);
        pipeline::PipelineConfig config;
        config.seed = seed;
        auto vocab = pipeline::collect_vocabulary(corpus, config.tokenize);
        auto params = pipeline::PipelineParams::init(config, vocab);
        llm::MockEmbeddingBackend embedder(config.embedding_dim, seed);
        std::optional<std::vector<pipeline::ManualLabel>> labels;
        if (!build_opts.labels.empty()) labels = load_labels_file(build_opts.labels);
        auto result = pipeline::kb_build(corpus, params, embedder, labels, build_opts.jobs);
        for (const auto& warning : result.warnings) std::cerr << "warning: " << warning << "\n";
        result.store.persist_to_file(build_opts.out);
        std::string params_path = build_opts.params_path.empty()
                                      ? default_params_path(build_opts.out)
                                      : build_opts.params_path;
        params.save(params_path);
        if (format == "json") {
            nlohmann::ordered_json j{{"entries", result.store.size()},
                                     {"dim", result.store.dim()},
                                     {"store", build_opts.out},
                                     {"params", params_path},
                                     {"seed", seed}};
            std::cout << j.dump(2) << "\n";
        } else {
            std::cout << "knowledge base: " << result.store.size() << " entries (dim "
                      << result.store.dim() << ") -> " << build_opts.out << "\n";
        }
    });

    auto* kb_query = kb_cmd->add_subcommand("query", "Retrieve similar defects for a contract");
    struct {
        std::string kb_path;
        std::string params_path;
        std::string source, ast, bytecode, contract;
        size_t k = 3;
        double w_cos = 0.7, w_dist = 0.3;
        uint64_t seed = 42;
    } query_opts;
    kb_query->add_option("--kb", query_opts.kb_path, "Store file")->required();
    kb_query->add_option("--params", query_opts.params_path, "Parameter checkpoint");
    kb_query->add_option("--source", query_opts.source, "Solidity source")->required();
    kb_query->add_option("--ast", query_opts.ast, "Compiler AST JSON")->required();
    kb_query->add_option("--bytecode", query_opts.bytecode, "Bytecode hex file")->required();
    kb_query->add_option("--contract", query_opts.contract, "Contract name within the AST");
    kb_query->add_option("-k,--top", query_opts.k, "Hits to return")->capture_default_str();
    kb_query->add_option("--w-cos", query_opts.w_cos, "Cosine weight")->capture_default_str();
    kb_query->add_option("--w-dist", query_opts.w_dist, "Distance weight")
        ->capture_default_str();
    kb_query->callback([&] {
        auto params = pipeline::PipelineParams::load(query_opts.params_path.empty()
                                                         ? default_params_path(query_opts.kb_path)
                                                         : query_opts.params_path);
        auto store = kb::VectorStore::load_from_file(query_opts.kb_path);
        auto input = pipeline::load_contract_files(query_opts.source, query_opts.ast,
                                                   query_opts.bytecode, query_opts.contract);
        auto encoded = pipeline::encode_contract(input, params);
        llm::MockEmbeddingBackend embedder(params.config.embedding_dim, params.config.seed);
        auto query = pipeline::query_vector(encoded, input, embedder, params);
        kb::ScoreWeights weights{query_opts.w_cos, query_opts.w_dist};
        auto hits = store.retrieve(query, query_opts.k, weights);
        nlohmann::ordered_json j = nlohmann::ordered_json::array();
        for (const auto& hit : hits) {
            const auto& entry = store.entry(hit.entry_id);
            j.push_back({{"entry", hit.entry_id},
                         {"defect_type", oracle::defect_type_name(entry.defect_type)},
                         {"contract", entry.contract_name},
                         {"cosine", hit.cosine},
                         {"euclidean", hit.euclidean},
                         {"score", hit.score}});
        }
        if (format == "json") {
            std::cout << j.dump(2) << "\n";
        } else {
            for (const auto& hit : j)
                std::cout << hit["entry"] << "  " << hit["defect_type"].get<std::string>()
                          << "  score=" << hit["score"] << " (cos " << hit["cosine"] << ", dist "
                          << hit["euclidean"] << ") from " << hit["contract"].get<std::string>()
                          << "\n";
        }
    });

    // --- scan ---
    auto* scan_cmd = app.add_subcommand("scan", "Scan contracts for defects");
    struct {
        std::string source, ast, bytecode, contract;
        std::string dir, out, out_dir;
        int jobs = 1;
    } scan_opts;
    CommonScanOptions common;
    scan_cmd->add_option("--source", scan_opts.source, "Solidity source");
    scan_cmd->add_option("--ast", scan_opts.ast, "Compiler AST JSON");
    scan_cmd->add_option("--bytecode", scan_opts.bytecode, "Bytecode hex file");
    scan_cmd->add_option("--contract", scan_opts.contract, "Contract name within the AST");
    scan_cmd->add_option("--dir", scan_opts.dir, "Scan every contract in a corpus directory");
    scan_cmd->add_option("--out", scan_opts.out, "Write the report JSON here");
    scan_cmd->add_option("--out-dir", scan_opts.out_dir, "Directory for per-contract reports");
    scan_cmd->add_option("--jobs", scan_opts.jobs, "Worker threads for --dir scans")
        ->capture_default_str();
    scan_cmd->add_option("--kb", common.kb_path, "Knowledge-base store")->required();
    scan_cmd->add_option("--params", common.params_path, "Parameter checkpoint");
    scan_cmd->add_option("--tau", common.tau, "Confidence threshold")
        ->check(CLI::Range(0.0, 1.0))
        ->capture_default_str();
    scan_cmd->add_option("--backend", common.backend, "LLM backend")
        ->check(CLI::IsMember({"mock", "http"}))
        ->capture_default_str();
    scan_cmd->add_option("--base-url", common.base_url, "HTTP backend base URL");
    scan_cmd->add_option("--credential-env", common.credential_env,
                         "Env var holding the backend credential")
        ->capture_default_str();
    scan_cmd->add_option("--samples", common.samples, "Samples per analysis")
        ->capture_default_str();
    scan_cmd->add_option("--temperature", common.temperature, "Sampling temperature")
        ->capture_default_str();
    scan_cmd->add_option("-k,--top", common.k, "Retrieval depth")->capture_default_str();
    scan_cmd->add_option("--seed", common.seed, "Run seed")->each([&](const std::string&) {
        common.seed_set = true;
    });
    scan_cmd->callback([&] {
        common.seed = common.seed_set ? common.seed : seed_from_env_or(common.seed);
        auto params = pipeline::PipelineParams::load(
            common.params_path.empty() ? default_params_path(common.kb_path)
                                       : common.params_path);
        params.config.retrieval_k = common.k;
        auto store = kb::VectorStore::load_from_file(common.kb_path);

        if (!scan_opts.dir.empty()) {
            if (scan_opts.out_dir.empty()) throw Error("--dir scans require --out-dir");
            fs::create_directories(scan_opts.out_dir);
            auto corpus = pipeline::load_corpus_dir(scan_opts.dir);
            std::atomic<size_t> next{0};
            std::atomic<int> worst{0};
            std::vector<std::string> lines(corpus.size());
            auto worker = [&] {
                for (size_t i = next.fetch_add(1); i < corpus.size(); i = next.fetch_add(1)) {
                    std::string out_path =
                        (fs::path(scan_opts.out_dir) / (corpus[i].name + ".report.json"))
                            .string();
                    int code = 2;
                    try {
                        code = run_scan_one(corpus[i], store, params, common, format, out_path);
                        lines[i] = corpus[i].name + ": exit " + std::to_string(code);
                    } catch (const std::exception& e) {
                        lines[i] = corpus[i].name + ": error: " + e.what();
                    }
                    int prev = worst.load();
                    while (prev < code && !worst.compare_exchange_weak(prev, code)) {
                    }
                }
            };
            int jobs = std::max(1, scan_opts.jobs);
            std::vector<std::thread> threads;
            for (int t = 0; t < jobs - 1; ++t) threads.emplace_back(worker);
            worker();
            for (auto& t : threads) t.join();
            for (const auto& line : lines) std::cout << line << "\n";
            exit_code = worst.load();
            return;
        }

        if (scan_opts.source.empty() || scan_opts.ast.empty() || scan_opts.bytecode.empty())
            throw Error("scan requires --source, --ast and --bytecode (or --dir)");
        auto input = pipeline::load_contract_files(scan_opts.source, scan_opts.ast,
                                                   scan_opts.bytecode, scan_opts.contract);
        exit_code = run_scan_one(input, store, params, common, format, scan_opts.out);
    });

    // --- disasm ---
    auto* disasm_cmd = app.add_subcommand("disasm", "Disassemble bytecode and dump the CFG");
    struct {
        std::string bytecode;
        std::string disasm_format = "text";
    } disasm_opts;
    disasm_cmd->add_option("--bytecode", disasm_opts.bytecode, "Bytecode hex file")->required();
    disasm_cmd->add_option("--cfg-format", disasm_opts.disasm_format, "text, json or dot")
        ->check(CLI::IsMember({"text", "json", "dot"}))
        ->capture_default_str();
    disasm_cmd->callback([&] {
        auto code = parse_hex(read_file(disasm_opts.bytecode));
        auto instructions = evm::disassemble(code);
        auto cfg = evm::build_cfg(instructions);
        std::string wanted = disasm_opts.disasm_format;
        if (format == "json" && wanted == "text") wanted = "json";
        if (wanted == "json") {
            std::cout << evm::cfg_to_json(cfg) << "\n";
        } else if (wanted == "dot") {
            std::cout << evm::cfg_to_dot(cfg);
        } else {
            for (const auto& ins : instructions) {
                char buf[16];
                std::snprintf(buf, sizeof(buf), "%6zu: ", ins.offset);
                std::cout << buf << ins.to_string() << "\n";
            }
            std::cout << cfg.blocks.size() << " blocks, " << cfg.edges.size() << " edges\n";
            for (const auto& d : cfg.diagnostics) std::cout << "note: " << d << "\n";
        }
    });

    // --- metrics ---
    auto* metrics_cmd = app.add_subcommand("metrics", "Precision/recall/F1 from counts");
    struct {
        std::string counts;
        std::string predictions;
        std::string reports_dir;
        std::string manifest;
    } metrics_opts;
    metrics_cmd->add_option("--counts", metrics_opts.counts,
                            "JSON [{defect_type, tp, fp, fn}] file");
    metrics_cmd->add_option("--predictions", metrics_opts.predictions,
                            "JSON [{contract, types:[..]}] file");
    metrics_cmd->add_option("--reports-dir", metrics_opts.reports_dir,
                            "Directory of *.report.json scan outputs");
    metrics_cmd->add_option("--manifest", metrics_opts.manifest,
                            "Ground-truth manifest (required with predictions/reports)");
    metrics_cmd->callback([&] {
        metrics::MetricsTable table;
        if (!metrics_opts.counts.empty()) {
            auto doc = nlohmann::json::parse(read_file(metrics_opts.counts));
            std::vector<metrics::ConfusionCounts> counts;
            for (const auto& j : doc)
                counts.push_back({oracle::defect_type_from_name(
                                      j.at("defect_type").get<std::string>()),
                                  j.at("tp").get<long>(), j.at("fp").get<long>(),
                                  j.at("fn").get<long>()});
            table = metrics::compute_metrics(counts);
        } else {
            if (metrics_opts.manifest.empty())
                throw Error("metrics needs --counts, or --manifest with "
                            "--predictions/--reports-dir");
            std::vector<metrics::LabeledSet> predictions;
            if (!metrics_opts.reports_dir.empty()) {
                std::vector<fs::path> files;
                for (const auto& entry : fs::directory_iterator(metrics_opts.reports_dir))
                    if (entry.path().string().ends_with(".report.json"))
                        files.push_back(entry.path());
                std::sort(files.begin(), files.end());
                for (const auto& file : files) {
                    auto report = llm::Report::from_json(read_file(file.string()));
                    metrics::LabeledSet set;
                    std::string stem = file.filename().string();
                    set.contract = stem.substr(0, stem.size() - 12);
                    for (const auto& p : report.predictions) set.types.push_back(p.defect_type);
                    predictions.push_back(std::move(set));
                }
            } else if (!metrics_opts.predictions.empty()) {
                auto doc = nlohmann::json::parse(read_file(metrics_opts.predictions));
                for (const auto& j : doc) {
                    metrics::LabeledSet set;
                    set.contract = j.at("contract").get<std::string>();
                    for (const auto& t : j.at("types"))
                        set.types.push_back(
                            oracle::defect_type_from_name(t.get<std::string>()));
                    predictions.push_back(std::move(set));
                }
            } else {
                throw Error("metrics needs --counts, --predictions or --reports-dir");
            }
            table = metrics::score_predictions(predictions,
                                               manifest_to_labeled_sets(metrics_opts.manifest));
        }
        std::cout << (format == "json" ? table.to_json() + "\n" : table.render_text());
    });

    // --- report render ---
    auto* report_cmd = app.add_subcommand("report", "Report utilities");
    report_cmd->require_subcommand(1);
    auto* render_cmd = report_cmd->add_subcommand("render", "Render a report JSON as text");
    std::string render_in;
    render_cmd->add_option("--in", render_in, "Report JSON file")->required();
    render_cmd->callback([&] {
        std::cout << llm::Report::from_json(read_file(render_in)).render_text();
    });

    // --- corpus filter ---
    auto* corpus_cmd = app.add_subcommand("corpus", "Corpus utilities");
    corpus_cmd->require_subcommand(1);
    auto* filter_cmd =
        corpus_cmd->add_subcommand("filter", "Select ERC-721-looking sources in a directory");
    struct {
        std::string dir;
        std::vector<std::string> keywords;
    } filter_opts;
    filter_cmd->add_option("--dir", filter_opts.dir, "Directory of .sol files")->required();
    filter_cmd->add_option("--keyword", filter_opts.keywords,
                           "Extra keywords (adds to NFT / ERC721)");
    filter_cmd->callback([&] {
        std::vector<std::string> keywords{"NFT", "ERC721"};
        keywords.insert(keywords.end(), filter_opts.keywords.begin(),
                        filter_opts.keywords.end());
        std::vector<fs::path> files;
        for (const auto& entry : fs::directory_iterator(filter_opts.dir))
            if (entry.path().extension() == ".sol") files.push_back(entry.path());
        std::sort(files.begin(), files.end());
        nlohmann::ordered_json matched = nlohmann::ordered_json::array();
        for (const auto& file : files) {
            std::string text = read_file(file.string());
            bool interface_hit = text.find("supportsInterface(bytes4") != std::string::npos ||
                                 text.find("ownerOf(uint256") != std::string::npos;
            bool keyword_hit = false;
            for (const auto& k : keywords) keyword_hit |= contains_ci(text, k);
            if (interface_hit || keyword_hit) matched.push_back(file.filename().string());
        }
        if (format == "json")
            std::cout << matched.dump(2) << "\n";
        else
            for (const auto& name : matched) std::cout << name.get<std::string>() << "\n";
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return exit_code;
}
