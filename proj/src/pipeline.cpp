// Copyright 2026 The natlm Authors.
// SPDX-License-Identifier: Apache-2.0
#include "natlm/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cstring>
#include <filesystem>
#include <set>
#include <thread>

#include <json.hpp>

namespace natlm::pipeline {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

namespace {

constexpr int kCheckpointVersion = 1;

Bytes matrix_bytes(const nn::Matrix& m) {
    Bytes out;
    out.reserve(static_cast<size_t>(m.size()) * 8);
    for (Eigen::Index c = 0; c < m.cols(); ++c)
        for (Eigen::Index r = 0; r < m.rows(); ++r) put_f64(out, m(r, c));
    return out;
}

nn::Matrix matrix_from_bytes(const Bytes& data, Eigen::Index rows, Eigen::Index cols) {
    if (data.size() != static_cast<size_t>(rows * cols) * 8)
        throw IoError("checkpoint tensor has wrong byte length");
    nn::Matrix m(rows, cols);
    size_t pos = 0;
    for (Eigen::Index c = 0; c < cols; ++c)
        for (Eigen::Index r = 0; r < rows; ++r) m(r, c) = get_f64(data, pos);
    return m;
}

class TensorWriter {
public:
    void add(const std::string& name, const nn::Matrix& m) {
        ordered_json t;
        t["rows"] = m.rows();
        t["cols"] = m.cols();
        t["dtype"] = "f64le";
        t["data_b64"] = base64_encode(matrix_bytes(m));
        tensors_[name] = std::move(t);
    }
    void add(const nn::Param& p) { add(p.name, p.value); }
    ordered_json take() { return std::move(tensors_); }

private:
    ordered_json tensors_ = ordered_json::object();
};

class TensorReader {
public:
    explicit TensorReader(const json& tensors) : tensors_(tensors) {}

    nn::Matrix get(const std::string& name) const {
        auto it = tensors_.find(name);
        if (it == tensors_.end()) throw IoError("checkpoint: missing tensor " + name);
        const auto& t = *it;
        return matrix_from_bytes(base64_decode(t.at("data_b64").get<std::string>()),
                                 t.at("rows").get<Eigen::Index>(),
                                 t.at("cols").get<Eigen::Index>());
    }
    void load(nn::Param& p) const {
        p.value = get(p.name);
        p.grad = nn::Matrix::Zero(p.value.rows(), p.value.cols());
    }

private:
    const json& tensors_;
};

template <typename Fn>
void for_each_param(PipelineParams& params, Fn&& fn) {
    fn(params.ast_encoder.proj.W);
    fn(params.ast_encoder.proj.b);
    for (auto& layer : params.ast_encoder.layers) {
        for (auto* p : {&layer.Wq, &layer.Wk, &layer.Wv, &layer.Wo, &layer.bq, &layer.bk,
                        &layer.bv, &layer.bo, &layer.ln1_gain, &layer.ln1_bias, &layer.ln2_gain,
                        &layer.ln2_bias, &layer.W1, &layer.b1, &layer.W2, &layer.b2})
            fn(*p);
    }
    for (auto& w : params.textcnn.weights) fn(w);
    for (auto& b : params.textcnn.biases) fn(b);
    fn(params.gcn.edge_embed);
    for (auto& layer : params.gcn.layers) {
        for (auto* p : {&layer.Wm, &layer.bm, &layer.Wv, &layer.Uv, &layer.bv}) fn(*p);
        for (auto& head : layer.heads) {
            fn(head.P);
            fn(head.q);
        }
    }
    for (auto& head : params.gcn.pool_heads) {
        fn(head.P);
        fn(head.q);
    }
    fn(params.gcn.global_query);
    fn(params.fusion.W_ast);
    fn(params.fusion.b_ast);
    fn(params.fusion.W_cfg);
    fn(params.fusion.b_cfg);
    fn(params.fusion.alpha.free);
    fn(params.alignment.W_combined);
    fn(params.alignment.b_combined);
    fn(params.alignment.W_embedding);
    fn(params.alignment.b_embedding);
    fn(params.alignment.alpha.free);
}

}  // namespace

PipelineParams PipelineParams::init(const PipelineConfig& config,
                                    const std::vector<std::string>& vocab_tokens) {
    nn::ParamRng rng(config.seed);
    PipelineParams p{config,
                     enc::AstEncoderParams::init(vocab_tokens, config.transformer, rng),
                     enc::EmbeddingTable::build(enc::standard_instruction_vocab(),
                                                config.textcnn.embed_dim, rng, "instr.embed"),
                     enc::TextCnnParams::init(config.textcnn, rng),
                     enc::GcnParams::init(config.gcn, config.textcnn.output_dim(), rng),
                     enc::FusionParams::init(config.fused_dim, config.transformer.model_dim,
                                             config.gcn.hidden_dim, rng),
                     enc::AlignmentParams::init(config.aligned_dim, config.fused_dim,
                                                config.embedding_dim, rng)};
    return p;
}

void PipelineParams::save(const std::string& path) const {
    ordered_json j;
    j["format"] = "natlm-params";
    j["version"] = kCheckpointVersion;
    j["seed"] = config.seed;

    ordered_json cfg;
    cfg["transformer"] = {{"layers", config.transformer.layers},
                          {"heads", config.transformer.heads},
                          {"model_dim", config.transformer.model_dim},
                          {"ffn_dim", config.transformer.ffn_dim},
                          {"dropout", config.transformer.dropout},
                          {"max_positions", config.transformer.max_positions}};
    cfg["textcnn"] = {{"kernel_heights", config.textcnn.kernel_heights},
                      {"kernels_per_height", config.textcnn.kernels_per_height},
                      {"embed_dim", config.textcnn.embed_dim}};
    cfg["gcn"] = {{"layers", config.gcn.layers},       {"hidden_dim", config.gcn.hidden_dim},
                  {"heads", config.gcn.heads},         {"edge_dim", config.gcn.edge_dim},
                  {"attn_dim", config.gcn.attn_dim},   {"leaky_slope", config.gcn.leaky_slope},
                  {"attention", config.gcn.attention}, {"dropout", config.gcn.dropout}};
    cfg["fused_dim"] = config.fused_dim;
    cfg["aligned_dim"] = config.aligned_dim;
    cfg["embedding_dim"] = config.embedding_dim;
    cfg["max_tokens"] = config.tokenize.max_tokens;
    cfg["score_weights"] = {{"cosine", config.score_weights.cosine_weight},
                            {"distance", config.score_weights.distance_weight}};
    cfg["retrieval_k"] = config.retrieval_k;
    j["config"] = std::move(cfg);

    // Vocabulary in row order (row 0 is the implicit OOV slot).
    std::vector<std::string> vocab(ast_encoder.table.vocab.size());
    for (const auto& [token, row] : ast_encoder.table.vocab)
        vocab[static_cast<size_t>(row - 1)] = token;
    j["vocab"] = vocab;

    TensorWriter writer;
    writer.add("ast.token_embed", ast_encoder.table.matrix);
    writer.add("ast.positional", ast_encoder.positional);
    writer.add("instr.embed", instr_table.matrix);
    for_each_param(const_cast<PipelineParams&>(*this),
                   [&](const nn::Param& p) { writer.add(p); });
    j["tensors"] = writer.take();

    write_file(path, j.dump());
}

PipelineParams PipelineParams::load(const std::string& path) {
    json j;
    try {
        j = json::parse(read_file(path));
    } catch (const json::parse_error& e) {
        throw IoError("checkpoint " + path + ": " + e.what());
    }
    if (j.value("format", "") != "natlm-params")
        throw IoError("checkpoint " + path + ": not a natlm parameter file");
    if (j.value("version", 0) != kCheckpointVersion)
        throw IoError("checkpoint " + path + ": unsupported version");

    PipelineConfig config;
    config.seed = j.at("seed").get<uint64_t>();
    const auto& cfg = j.at("config");
    const auto& tf = cfg.at("transformer");
    config.transformer.layers = tf.at("layers").get<int>();
    config.transformer.heads = tf.at("heads").get<int>();
    config.transformer.model_dim = tf.at("model_dim").get<int>();
    config.transformer.ffn_dim = tf.at("ffn_dim").get<int>();
    config.transformer.dropout = tf.at("dropout").get<double>();
    config.transformer.max_positions = tf.at("max_positions").get<int>();
    const auto& tc = cfg.at("textcnn");
    config.textcnn.kernel_heights = tc.at("kernel_heights").get<std::vector<int>>();
    config.textcnn.kernels_per_height = tc.at("kernels_per_height").get<int>();
    config.textcnn.embed_dim = tc.at("embed_dim").get<int>();
    const auto& gc = cfg.at("gcn");
    config.gcn.layers = gc.at("layers").get<int>();
    config.gcn.hidden_dim = gc.at("hidden_dim").get<int>();
    config.gcn.heads = gc.at("heads").get<int>();
    config.gcn.edge_dim = gc.at("edge_dim").get<int>();
    config.gcn.attn_dim = gc.at("attn_dim").get<int>();
    config.gcn.leaky_slope = gc.at("leaky_slope").get<double>();
    config.gcn.attention = gc.at("attention").get<bool>();
    config.gcn.dropout = gc.at("dropout").get<double>();
    config.fused_dim = cfg.at("fused_dim").get<int>();
    config.aligned_dim = cfg.at("aligned_dim").get<int>();
    config.embedding_dim = cfg.at("embedding_dim").get<int>();
    config.tokenize.max_tokens = cfg.at("max_tokens").get<size_t>();
    config.score_weights.cosine_weight = cfg.at("score_weights").at("cosine").get<double>();
    config.score_weights.distance_weight = cfg.at("score_weights").at("distance").get<double>();
    config.retrieval_k = cfg.at("retrieval_k").get<size_t>();

    auto vocab = j.at("vocab").get<std::vector<std::string>>();
    PipelineParams params = PipelineParams::init(config, vocab);

    TensorReader reader(j.at("tensors"));
    params.ast_encoder.table.matrix = reader.get("ast.token_embed");
    params.ast_encoder.positional = reader.get("ast.positional");
    params.instr_table.matrix = reader.get("instr.embed");
    for_each_param(params, [&](nn::Param& p) { reader.load(p); });
    return params;
}

EncodedContract encode_contract(const ContractInput& input, const PipelineParams& params) {
    EncodedContract out;
    auto tree = ast::parse_ast(input.ast_json);
    out.facts = ast::extract_facts_from_tree(*tree, input.contract_name);
    out.tokens = ast::tokenize(ast::linearize_dfs(*tree), params.config.tokenize);

    nn::Matrix embedded = enc::embed_and_project(out.tokens, params.ast_encoder.table,
                                                 params.ast_encoder.positional,
                                                 params.ast_encoder.proj);
    out.x_ast = enc::encode_ast(embedded, params.ast_encoder);

    auto instructions = evm::disassemble(input.bytecode);
    out.cfg = evm::build_cfg(instructions);
    if (out.cfg.blocks.empty()) {
        out.x_cfg = Vector::Zero(params.config.gcn.hidden_dim);
    } else {
        std::map<int, Vector> features;
        for (const auto& block : out.cfg.blocks) {
            nn::Matrix rows(static_cast<Eigen::Index>(block.instructions.size()),
                            params.instr_table.dim());
            for (size_t i = 0; i < block.instructions.size(); ++i)
                rows.row(static_cast<Eigen::Index>(i)) = params.instr_table.matrix.row(
                    params.instr_table.lookup(enc::instruction_token(block.instructions[i])));
            features[block.id] = enc::textcnn_forward(rows, params.textcnn);
        }
        out.x_cfg = enc::gcn_forward(out.cfg, features, params.gcn);
    }

    out.x_combined = enc::fuse(out.x_ast, out.x_cfg, params.fusion);
    out.tail = Vector(3);
    out.tail << static_cast<double>(out.facts.functions.size()),
        static_cast<double>(out.facts.external_call_count()),
        static_cast<double>(out.facts.mint_site_count());
    return out;
}

namespace {

Vector with_tail(const Vector& aligned, const Vector& tail) {
    Vector out(aligned.size() + tail.size());
    out << aligned, tail;
    return out;
}

}  // namespace

Vector entry_vector(const EncodedContract& encoded, const std::string& snippet,
                    llm::EmbeddingBackend& embedder, const PipelineParams& params) {
    Vector embedded = embedder.embed_text(snippet);
    Vector aligned = enc::align_and_combine(encoded.x_combined, embedded, params.alignment);
    return with_tail(aligned, encoded.tail);
}

Vector query_vector(const EncodedContract& encoded, const ContractInput& input,
                    llm::EmbeddingBackend& embedder, const PipelineParams& params) {
    return entry_vector(encoded, input.source, embedder, params);
}

namespace {

std::string snippet_for_function(const ContractInput& input, const ast::ContractFacts& facts,
                                 const std::string& function) {
    for (const auto& fn : facts.functions) {
        if (fn.name != function) continue;
        if (fn.span.valid() && fn.span.start >= 0 &&
            fn.span.end() <= static_cast<long>(input.source.size()))
            return input.source.substr(static_cast<size_t>(fn.span.start),
                                       static_cast<size_t>(fn.span.length));
    }
    return input.source;
}

}  // namespace

KbBuildResult kb_build(std::vector<ContractInput> corpus, const PipelineParams& params,
                       llm::EmbeddingBackend& embedder,
                       const std::optional<std::vector<ManualLabel>>& manual_labels, int jobs) {
    if (corpus.empty()) throw Error("kb build: no labeled entries (empty corpus)");
    std::sort(corpus.begin(), corpus.end(),
              [](const ContractInput& a, const ContractInput& b) { return a.name < b.name; });

    // Encode in parallel; contracts are independent and the params are const.
    std::vector<EncodedContract> encoded(corpus.size());
    std::vector<std::string> encode_errors(corpus.size());
    {
        std::atomic<size_t> next{0};
        auto worker = [&] {
            for (size_t i = next.fetch_add(1); i < corpus.size(); i = next.fetch_add(1)) {
                try {
                    encoded[i] = encode_contract(corpus[i], params);
                } catch (const std::exception& e) {
                    encode_errors[i] = e.what();
                }
            }
        };
        int n = std::max(1, std::min<int>(jobs, static_cast<int>(corpus.size())));
        std::vector<std::thread> threads;
        for (int t = 0; t < n - 1; ++t) threads.emplace_back(worker);
        worker();
        for (auto& t : threads) t.join();
    }

    KbBuildResult result;
    result.store = kb::VectorStore(params.config.aligned_dim + 3);
    for (size_t i = 0; i < corpus.size(); ++i) {
        const auto& input = corpus[i];
        if (!encode_errors[i].empty()) {
            result.warnings.push_back("skipped " + input.name + ": " + encode_errors[i]);
            continue;
        }
        std::vector<std::pair<oracle::DefectType, std::string>> labels;  // (type, function)
        std::string provenance;
        if (manual_labels) {
            provenance = "manual";
            for (const auto& label : *manual_labels)
                if (label.contract == input.name)
                    labels.emplace_back(label.defect_type, label.function);
        } else {
            provenance = "oracle";
            for (const auto& finding : oracle::detect_all(encoded[i].facts))
                labels.emplace_back(finding.defect_type, finding.function);
        }
        if (labels.empty()) {
            result.warnings.push_back("skipped " + input.name + ": no defect labels");
            continue;
        }
        for (const auto& [type, function] : labels) {
            kb::KbEntry entry;
            entry.defect_type = type;
            entry.snippet_source = snippet_for_function(input, encoded[i].facts, function);
            entry.contract_name = input.name;
            entry.provenance = provenance;
            entry.vector = entry_vector(encoded[i], entry.snippet_source, embedder, params);
            result.store.insert(std::move(entry));
        }
    }
    if (result.store.empty()) throw Error("kb build: no labeled entries");
    return result;
}

ScanOutput scan_contract(const ContractInput& input, const kb::VectorStore& store,
                         const PipelineParams& params, llm::EmbeddingBackend& embedder,
                         llm::LlmBackend& backend, const llm::BackendConfig& backend_config,
                         double tau) {
    EncodedContract encoded = encode_contract(input, params);
    Vector query = query_vector(encoded, input, embedder, params);

    ScanOutput out;
    out.hits = store.retrieve(query, params.config.retrieval_k, params.config.score_weights);
    std::vector<llm::RetrievedDefect> retrieved;
    for (const auto& hit : out.hits) {
        const auto& entry = store.entry(hit.entry_id);
        retrieved.push_back({entry.defect_type, entry.snippet_source, hit.score});
    }
    std::string display = input.contract_name.empty()
                              ? (encoded.facts.contract_name.empty() ? input.name
                                                                     : encoded.facts.contract_name)
                              : input.contract_name;
    out.bundle = llm::assemble_prompt(display, input.source, encoded.facts, retrieved);
    out.report = llm::analyze(out.bundle, backend, backend_config, tau);
    return out;
}

ContractInput load_contract_files(const std::string& sol_path, const std::string& ast_path,
                                  const std::string& hex_path,
                                  const std::string& contract_name) {
    ContractInput input;
    input.name = fs::path(ast_path).stem().stem().string();  // name.ast.json -> name
    input.source = read_file(sol_path);
    input.ast_json = read_file(ast_path);
    input.bytecode = parse_hex(read_file(hex_path));
    input.contract_name = contract_name;
    return input;
}

std::vector<ContractInput> load_corpus_dir(const std::string& dir) {
    std::vector<ContractInput> corpus;
    if (!fs::is_directory(dir)) throw IoError("corpus directory not found: " + dir);
    std::vector<fs::path> ast_files;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (!entry.is_regular_file()) continue;
        auto name = entry.path().filename().string();
        if (name.size() > 9 && name.substr(name.size() - 9) == ".ast.json")
            ast_files.push_back(entry.path());
    }
    std::sort(ast_files.begin(), ast_files.end());
    for (const auto& ast_path : ast_files) {
        std::string stem = ast_path.filename().string();
        stem = stem.substr(0, stem.size() - 9);
        fs::path sol = ast_path.parent_path() / (stem + ".sol");
        fs::path hex = ast_path.parent_path() / (stem + ".hex");
        if (!fs::exists(sol) || !fs::exists(hex)) continue;
        corpus.push_back(
            load_contract_files(sol.string(), ast_path.string(), hex.string(), ""));
    }
    return corpus;
}

std::vector<std::string> collect_vocabulary(const std::vector<ContractInput>& corpus,
                                            const ast::TokenizeOptions& options) {
    std::set<std::string> tokens;
    for (const auto& input : corpus) {
        auto tree = ast::parse_ast(input.ast_json);
        for (const auto& token : ast::tokenize(ast::linearize_dfs(*tree), options).tokens)
            tokens.insert(token);
    }
    return {tokens.begin(), tokens.end()};
}

}  // namespace natlm::pipeline
