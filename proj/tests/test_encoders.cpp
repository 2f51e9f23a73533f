// Copyright 2026 The natlm Authors.
// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <random>

#include "gradcheck.hpp"
#include "natlm/ast_encoder.hpp"
#include "natlm/gcn.hpp"
#include "natlm/textcnn.hpp"

using namespace natlm;
using namespace natlm::enc;
using nn::Matrix;
using nn::Vector;

namespace {

ast::TokenSequence make_tokens(std::vector<std::string> tokens) {
    ast::TokenSequence seq;
    seq.tokens = std::move(tokens);
    seq.positions.resize(seq.tokens.size());
    for (size_t i = 0; i < seq.positions.size(); ++i) seq.positions[i] = i;
    return seq;
}

Matrix random_matrix(Eigen::Index rows, Eigen::Index cols, uint64_t seed, double scale = 1.0) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(-scale, scale);
    Matrix m(rows, cols);
    for (Eigen::Index c = 0; c < cols; ++c)
        for (Eigen::Index r = 0; r < rows; ++r) m(r, c) = dist(rng);
    return m;
}

Vector random_vector(Eigen::Index n, uint64_t seed, double scale = 1.0) {
    return random_matrix(n, 1, seed, scale).col(0);
}

// Two-block graph: 0 --fallthrough--> 1.
evm::Cfg chain_cfg() {
    evm::Cfg cfg;
    for (int i = 0; i < 2; ++i) {
        evm::BasicBlock b;
        b.id = i;
        b.start_offset = static_cast<size_t>(i);
        b.instructions.push_back({});
        cfg.blocks.push_back(b);
    }
    cfg.edges.push_back({0, 1, evm::EdgeKind::Fallthrough});
    return cfg;
}

}  // namespace

TEST_SUITE("encoders") {

TEST_CASE("embed_and_project: zero tables give b_proj rows") {
    nn::ParamRng rng(1);
    EmbeddingTable table = EmbeddingTable::build({"a", "b"}, 8, rng, "t");
    table.matrix.setZero();
    Matrix positional = Matrix::Zero(16, 8);
    ProjectionParams proj = ProjectionParams::init(4, 8, rng);
    auto out = embed_and_project(make_tokens({"a", "b", "zzz"}), table, positional, proj);
    REQUIRE(out.rows() == 3);
    for (Eigen::Index i = 0; i < out.rows(); ++i)
        CHECK((out.row(i).transpose() - proj.b.value.col(0)).norm() == doctest::Approx(0.0));
}

TEST_CASE("embed_and_project: leading-identity projection selects leading dims") {
    nn::ParamRng rng(2);
    EmbeddingTable table = EmbeddingTable::build({"tok"}, 8, rng, "t");
    Matrix positional = Matrix::Zero(4, 8);
    ProjectionParams proj = ProjectionParams::init(4, 8, rng);
    proj.W.value.setZero();
    for (int i = 0; i < 4; ++i) proj.W.value(i, i) = 1.0;
    proj.b.value.setZero();
    auto out = embed_and_project(make_tokens({"tok"}), table, positional, proj);
    Vector expected = table.matrix.row(table.lookup("tok")).head(4).transpose();
    CHECK((out.row(0).transpose() - expected).norm() == doctest::Approx(0.0));
}

TEST_CASE("embed_and_project matches a scalar reference") {
    nn::ParamRng rng(3);
    EmbeddingTable table = EmbeddingTable::build({"x"}, 6, rng, "t");
    Matrix positional = random_matrix(4, 6, 77);
    ProjectionParams proj = ProjectionParams::init(3, 6, rng);
    auto out = embed_and_project(make_tokens({"x"}), table, positional, proj);

    // Independent scalar loop.
    int row = table.lookup("x");
    for (int r = 0; r < 3; ++r) {
        double acc = proj.b.value(r, 0);
        for (int c = 0; c < 6; ++c)
            acc += proj.W.value(r, c) * (table.matrix(row, c) + positional(0, c));
        CHECK(out(0, r) == doctest::Approx(acc).epsilon(1e-12));
    }
}

TEST_CASE("unknown tokens hit the OOV row, never an error") {
    nn::ParamRng rng(4);
    EmbeddingTable table = EmbeddingTable::build({"known"}, 8, rng, "t");
    CHECK(table.lookup("unknown-token") == 0);
    CHECK(table.lookup("known") == 1);
}

TEST_CASE("encode_ast: zero-initialized sublayers are the identity") {
    nn::ParamRng rng(5);
    TransformerConfig config;
    config.layers = 2;
    config.heads = 2;
    config.model_dim = 8;
    config.ffn_dim = 16;
    config.max_positions = 8;
    AstEncoderParams params = AstEncoderParams::init({"a"}, config, rng, 12);
    for (auto& layer : params.layers) {
        layer.Wq.value.setZero();
        layer.Wk.value.setZero();
        layer.Wv.value.setZero();
        layer.Wo.value.setZero();
        layer.W1.value.setZero();
        layer.W2.value.setZero();
    }
    Matrix one_token = random_matrix(1, 8, 99);
    Vector x_ast = encode_ast(one_token, params);
    CHECK((x_ast - one_token.row(0).transpose()).norm() == doctest::Approx(0.0));
}

TEST_CASE("encode_ast rejects an empty sequence") {
    nn::ParamRng rng(6);
    TransformerConfig config;
    config.model_dim = 8;
    config.ffn_dim = 8;
    config.heads = 2;
    AstEncoderParams params = AstEncoderParams::init({"a"}, config, rng, 8);
    Matrix empty(0, 8);
    CHECK_THROWS_WITH_AS(encode_ast(empty, params), "empty token sequence", Error);
}

TEST_CASE("transformer attention rows sum to one") {
    nn::ParamRng rng(7);
    TransformerConfig config;
    config.layers = 2;
    config.heads = 4;
    config.model_dim = 16;
    config.ffn_dim = 24;
    AstEncoderParams params = AstEncoderParams::init({"a"}, config, rng, 16);
    std::mt19937_64 seeds(123);
    for (int trial = 0; trial < 20; ++trial) {
        Matrix input = random_matrix(1 + trial % 7, 16, seeds());
        AttentionTrace trace;
        encode_ast(input, params, false, nullptr, &trace);
        REQUIRE(trace.head_weights.size() == 8);  // layers * heads
        for (const auto& weights : trace.head_weights)
            for (Eigen::Index i = 0; i < weights.rows(); ++i)
                CHECK(weights.row(i).sum() == doctest::Approx(1.0).epsilon(1e-6));
    }
}

TEST_CASE("mean pooling equals a scalar average of final states") {
    nn::ParamRng rng(8);
    TransformerConfig config;
    config.layers = 1;
    config.heads = 2;
    config.model_dim = 8;
    config.ffn_dim = 8;
    AstEncoderParams params = AstEncoderParams::init({"a"}, config, rng, 8);
    Matrix input = random_matrix(3, 8, 31);
    Matrix hidden = encoder_hidden_states(input, params);
    Vector pooled = encode_ast(input, params);
    for (int c = 0; c < 8; ++c) {
        double acc = (hidden(0, c) + hidden(1, c) + hidden(2, c)) / 3.0;
        CHECK(pooled(c) == doctest::Approx(acc).epsilon(1e-12));
    }
}

TEST_CASE("dropout fires only in training mode") {
    nn::ParamRng rng(9);
    TransformerConfig config;
    config.layers = 1;
    config.heads = 2;
    config.model_dim = 8;
    config.ffn_dim = 8;
    config.dropout = 0.5;
    AstEncoderParams params = AstEncoderParams::init({"a"}, config, rng, 8);
    Matrix input = random_matrix(4, 8, 55);

    Vector infer1 = encode_ast(input, params);
    Vector infer2 = encode_ast(input, params);
    CHECK((infer1 - infer2).norm() == 0.0);  // bit-stable, RNG-independent

    std::mt19937_64 r1(11), r2(22);
    Vector train1 = encode_ast(input, params, true, &r1);
    Vector train2 = encode_ast(input, params, true, &r2);
    CHECK((train1 - train2).norm() > 0.0);  // masks differ across seeds
    CHECK((infer1 - train1).norm() > 0.0);
}

// --- TextCNN ---

TEST_CASE("textcnn: all-zero input with zero bias gives zeros") {
    nn::ParamRng rng(10);
    TextCnnConfig config;
    config.kernels_per_height = 4;
    config.embed_dim = 6;
    TextCnnParams params = TextCnnParams::init(config, rng);
    Vector out = textcnn_forward(Matrix::Zero(5, 6), params);
    CHECK(out.norm() == 0.0);
}

TEST_CASE("textcnn: single unit kernel max-pools the largest value") {
    TextCnnConfig config;
    config.kernel_heights = {1};
    config.kernels_per_height = 1;
    config.embed_dim = 3;
    nn::ParamRng rng(11);
    TextCnnParams params = TextCnnParams::init(config, rng);
    params.weights[0].value.setZero();
    params.weights[0].value(0, 0) = 1.0;  // weight 1 on dim 0
    params.biases[0].value.setZero();
    Matrix input = Matrix::Zero(3, 3);
    input(0, 0) = 1.0;
    input(1, 0) = 5.0;
    input(2, 0) = 3.0;
    Vector out = textcnn_forward(input, params);
    REQUIRE(out.size() == 1);
    CHECK(out(0) == doctest::Approx(5.0));
}

TEST_CASE("textcnn matches a scalar convolution reference") {
    TextCnnConfig config;
    config.kernel_heights = {2, 3};
    config.kernels_per_height = 2;
    config.embed_dim = 4;
    nn::ParamRng rng(12);
    TextCnnParams params = TextCnnParams::init(config, rng);
    Matrix input = random_matrix(4, 4, 1234);

    Vector out = textcnn_forward(input, params);

    // Independent scalar loops.
    int idx = 0;
    for (size_t bank = 0; bank < config.kernel_heights.size(); ++bank) {
        int h = config.kernel_heights[bank];
        for (int k = 0; k < config.kernels_per_height; ++k) {
            double best = -1e300;
            for (int p = 0; p + h <= 4; ++p) {
                double acc = params.biases[bank].value(k, 0);
                for (int r = 0; r < h; ++r)
                    for (int c = 0; c < 4; ++c)
                        acc += params.weights[bank].value(k, r * 4 + c) * input(p + r, c);
                best = std::max(best, acc);
            }
            double expected = best > 0 ? best : 0.0;
            CHECK(out(idx) == doctest::Approx(expected).epsilon(1e-12));
            ++idx;
        }
    }
}

TEST_CASE("textcnn short blocks are zero-padded to the kernel height") {
    TextCnnConfig config;
    config.kernel_heights = {4};
    config.kernels_per_height = 2;
    config.embed_dim = 3;
    nn::ParamRng rng(13);
    TextCnnParams params = TextCnnParams::init(config, rng);
    Vector out = textcnn_forward(random_matrix(1, 3, 5), params);  // 1 row < height 4
    CHECK(out.size() == 2);
}

TEST_CASE("textcnn gradient check (conv + ReLU + max-pool)") {
    TextCnnConfig config;
    config.kernel_heights = {2, 3};
    config.kernels_per_height = 3;
    config.embed_dim = 4;
    nn::ParamRng rng(14);
    TextCnnParams params = TextCnnParams::init(config, rng);
    // Larger-scale weights keep pre-activations away from ReLU kinks.
    for (auto* p : params.parameters()) p->value *= 10.0;
    Matrix input = random_matrix(5, 4, 4321);
    Vector probe = random_vector(config.output_dim(), 777);

    auto loss = [&] { return probe.dot(textcnn_forward(input, params)); };

    TextCnnTape tape;
    Vector out = textcnn_forward(input, params, &tape);
    (void)out;
    for (auto* p : params.parameters()) p->zero_grad();
    textcnn_backward(tape, params, probe);

    for (auto* p : params.parameters())
        CHECK(test::finite_difference_check(*p, loss) <= 1e-3);
}

TEST_CASE("instruction tokens bucket push immediates") {
    auto decode = [](const std::string& hex) { return evm::disassemble(parse_hex(hex))[0]; };
    CHECK(instruction_token(decode("6000")) == "PUSH1#zero");
    CHECK(instruction_token(decode("60ff")) == "PUSH1#small");
    CHECK(instruction_token(decode("61ffff")) == "PUSH2#large");
    CHECK(instruction_token(decode("730102030405060708090a0b0c0d0e0f1011121314")) ==
          "PUSH20#addr");
    CHECK(instruction_token(decode("01")) == "ADD");
    CHECK(instruction_token(decode("0c")) == "INVALID");
    auto vocab = standard_instruction_vocab();
    for (const auto& t : {"PUSH1#zero", "PUSH20#addr", "ADD", "JUMPDEST"})
        CHECK(std::find(vocab.begin(), vocab.end(), t) != vocab.end());
}

TEST_CASE("block classifier training: loss decreases and separable data fits") {
    TextCnnConfig config;
    config.kernel_heights = {1, 2};
    config.kernels_per_height = 4;
    config.embed_dim = 4;
    nn::ParamRng rng(15);
    BlockClassifier model = BlockClassifier::init(config, 2, rng);

    // Linearly separable toy set: class decided by the sign of dim 0.
    std::vector<LabeledBlock> dataset;
    std::mt19937_64 data_rng(99);
    std::uniform_real_distribution<double> dist(0.2, 1.0);
    for (int i = 0; i < 40; ++i) {
        Matrix block = random_matrix(3, 4, data_rng(), 0.1);
        int label = i % 2;
        for (int r = 0; r < 3; ++r) block(r, 0) = label == 0 ? dist(data_rng) : -dist(data_rng);
        dataset.push_back({block, label});
    }

    TrainConfig train;
    train.epochs = 30;
    train.learning_rate = 0.01;
    train.seed = 7;
    TrainReport report = train_block_classifier(dataset, model, train);

    REQUIRE(report.epoch_losses.size() == 30);
    for (int e = 1; e < 5; ++e) CHECK(report.epoch_losses[e] < report.epoch_losses[e - 1]);
    CHECK(report.final_accuracy == doctest::Approx(1.0));
}

TEST_CASE("train_block_classifier rejects an empty dataset") {
    TextCnnConfig config;
    nn::ParamRng rng(16);
    BlockClassifier model = BlockClassifier::init(config, 2, rng);
    CHECK_THROWS_AS(train_block_classifier({}, model), Error);
}

TEST_CASE("cross-entropy analytic values") {
    // Perfect one-hot prediction: loss 0.
    Vector logits(3);
    logits << 100.0, 0.0, 0.0;
    CHECK(nn::cross_entropy(logits, 0) == doctest::Approx(0.0).epsilon(1e-9));
    // Uniform prediction over C classes: loss ln C.
    Vector uniform = Vector::Zero(4);
    CHECK(nn::cross_entropy(uniform, 2) == doctest::Approx(std::log(4.0)));
}

// --- GCN ---

TEST_CASE("gcn: single node with no edges pools to its own state") {
    GcnConfig config;
    config.layers = 1;
    config.hidden_dim = 6;
    config.heads = 2;
    config.edge_dim = 3;
    config.attn_dim = 4;
    nn::ParamRng rng(17);
    GcnParams params = GcnParams::init(config, 5, rng);

    evm::Cfg cfg;
    evm::BasicBlock b;
    b.id = 0;
    b.instructions.push_back({});
    cfg.blocks.push_back(b);

    std::map<int, Vector> features{{0, random_vector(5, 42)}};
    GcnTrace trace;
    Vector x = gcn_forward(cfg, features, params, &trace);

    REQUIRE(trace.pool_attention.size() == 2);
    for (const auto& beta : trace.pool_attention) {
        REQUIRE(beta.size() == 1);
        CHECK(beta(0) == doctest::Approx(1.0));
    }
    // X_CFG equals the single node's final state.
    Vector expected = gcn_update(Vector::Zero(6), features[0], params.layers[0].Wv,
                                 params.layers[0].Uv, params.layers[0].bv);
    CHECK((x - expected).norm() == doctest::Approx(0.0));
}

TEST_CASE("gcn attention vectors sum to one on random graphs") {
    GcnConfig config;
    config.layers = 2;
    config.hidden_dim = 8;
    config.heads = 2;
    config.edge_dim = 4;
    config.attn_dim = 4;
    nn::ParamRng rng(18);
    GcnParams params = GcnParams::init(config, 6, rng);

    std::mt19937_64 graph_rng(2025);
    for (int trial = 0; trial < 25; ++trial) {
        int n = 1 + static_cast<int>(graph_rng() % 6);
        evm::Cfg cfg;
        for (int i = 0; i < n; ++i) {
            evm::BasicBlock b;
            b.id = i;
            b.instructions.push_back({});
            cfg.blocks.push_back(b);
        }
        int edges = static_cast<int>(graph_rng() % (2 * static_cast<unsigned>(n)));
        for (int e = 0; e < edges; ++e)
            cfg.edges.push_back({static_cast<int>(graph_rng() % static_cast<unsigned>(n)),
                                 static_cast<int>(graph_rng() % static_cast<unsigned>(n)),
                                 static_cast<evm::EdgeKind>(graph_rng() % 5)});
        std::map<int, Vector> features;
        for (int i = 0; i < n; ++i) features[i] = random_vector(6, graph_rng());

        GcnTrace trace;
        gcn_forward(cfg, features, params, &trace);
        for (const auto& beta : trace.node_attention)
            CHECK(beta.sum() == doctest::Approx(1.0).epsilon(1e-6));
        for (const auto& beta : trace.pool_attention)
            CHECK(beta.sum() == doctest::Approx(1.0).epsilon(1e-6));
    }
}

TEST_CASE("gcn missing block feature is an error naming the block") {
    GcnConfig config;
    nn::ParamRng rng(19);
    GcnParams params = GcnParams::init(config, 4, rng);
    evm::Cfg cfg = chain_cfg();
    std::map<int, Vector> features{{0, random_vector(4, 1)}};
    CHECK_THROWS_WITH_AS(gcn_forward(cfg, features, params),
                         "gcn_forward: missing feature for block 1", Error);
}

TEST_CASE("gcn two-node chain matches a scalar reference") {
    GcnConfig config;
    config.layers = 1;
    config.hidden_dim = 3;
    config.heads = 1;
    config.edge_dim = 2;
    config.attn_dim = 2;
    nn::ParamRng rng(20);
    GcnParams params = GcnParams::init(config, 2, rng);

    evm::Cfg cfg = chain_cfg();
    std::map<int, Vector> features{{0, random_vector(2, 7)}, {1, random_vector(2, 8)}};
    Vector x = gcn_forward(cfg, features, params, nullptr);

    // Scalar reference with plain loops.
    auto matvec = [](const Matrix& m, const std::vector<double>& v) {
        std::vector<double> out(static_cast<size_t>(m.rows()), 0.0);
        for (Eigen::Index r = 0; r < m.rows(); ++r)
            for (Eigen::Index c = 0; c < m.cols(); ++c)
                out[static_cast<size_t>(r)] += m(r, c) * v[static_cast<size_t>(c)];
        return out;
    };
    auto to_std = [](const Vector& v) {
        return std::vector<double>(v.data(), v.data() + v.size());
    };

    const auto& L = params.layers[0];
    std::vector<double> h0 = to_std(features[0]);
    std::vector<double> h1 = to_std(features[1]);
    std::vector<double> edge = to_std(
        params.edge_embed.value.row(static_cast<int>(evm::EdgeKind::Fallthrough)).transpose());

    // Message along the single edge 0 -> 1.
    std::vector<double> x_k = h0;
    x_k.insert(x_k.end(), edge.begin(), edge.end());
    std::vector<double> m = matvec(L.Wm.value, x_k);
    for (size_t i = 0; i < m.size(); ++i) m[i] += L.bm.value(static_cast<Eigen::Index>(i), 0);

    // Node 1 has one in-neighbor: beta = softmax(single) = 1; node 0 has none.
    auto update = [&](const std::vector<double>& agg, const std::vector<double>& h) {
        std::vector<double> a = matvec(L.Wv.value, agg);
        std::vector<double> b = matvec(L.Uv.value, h);
        std::vector<double> out(a.size());
        for (size_t i = 0; i < a.size(); ++i) {
            double pre = a[i] + b[i] + L.bv.value(static_cast<Eigen::Index>(i), 0);
            out[i] = pre > 0 ? pre : 0.0;
        }
        return out;
    };
    std::vector<double> zero3(3, 0.0);
    std::vector<double> final0 = update(zero3, h0);
    std::vector<double> final1 = update(m, h1);

    // Pooling: scores from the single pool head against the global query.
    const auto& PH = params.pool_heads[0];
    auto score = [&](const std::vector<double>& hv) {
        std::vector<double> pg = matvec(PH.P.value, to_std(params.global_query.value.col(0)));
        std::vector<double> ph = matvec(PH.P.value, hv);
        double z = 0;
        for (size_t i = 0; i < pg.size(); ++i) z += PH.q.value(static_cast<Eigen::Index>(i), 0) * pg[i];
        for (size_t i = 0; i < ph.size(); ++i)
            z += PH.q.value(static_cast<Eigen::Index>(pg.size() + i), 0) * ph[i];
        return z > 0 ? z : 0.2 * z;  // LeakyReLU(0.2)
    };
    double s0 = score(final0), s1 = score(final1);
    double mx = std::max(s0, s1);
    double e0 = std::exp(s0 - mx), e1 = std::exp(s1 - mx);
    double b0 = e0 / (e0 + e1), b1 = e1 / (e0 + e1);

    for (int i = 0; i < 3; ++i) {
        double expected = b0 * final0[static_cast<size_t>(i)] + b1 * final1[static_cast<size_t>(i)];
        CHECK(x(i) == doctest::Approx(expected).epsilon(1e-10));
    }
}

TEST_CASE("gcn output is invariant to block renumbering") {
    GcnConfig config;
    config.layers = 2;
    config.hidden_dim = 6;
    config.heads = 2;
    config.edge_dim = 3;
    config.attn_dim = 3;
    nn::ParamRng rng(21);
    GcnParams params = GcnParams::init(config, 4, rng);

    // Graph A: 0->1 (jump), 1->2 (fallthrough), 0->2 (branch-taken).
    evm::Cfg a;
    for (int i = 0; i < 3; ++i) {
        evm::BasicBlock b;
        b.id = i;
        b.instructions.push_back({});
        a.blocks.push_back(b);
    }
    a.edges.push_back({0, 1, evm::EdgeKind::Jump});
    a.edges.push_back({1, 2, evm::EdgeKind::Fallthrough});
    a.edges.push_back({0, 2, evm::EdgeKind::BranchTaken});

    // Graph B: same structure under the permutation 0->2, 1->0, 2->1.
    evm::Cfg b;
    for (int i = 0; i < 3; ++i) {
        evm::BasicBlock blk;
        blk.id = i;
        blk.instructions.push_back({});
        b.blocks.push_back(blk);
    }
    b.entry = 2;
    b.edges.push_back({2, 0, evm::EdgeKind::Jump});
    b.edges.push_back({0, 1, evm::EdgeKind::Fallthrough});
    b.edges.push_back({2, 1, evm::EdgeKind::BranchTaken});

    std::map<int, Vector> fa{{0, random_vector(4, 1)}, {1, random_vector(4, 2)},
                             {2, random_vector(4, 3)}};
    std::map<int, Vector> fb{{2, fa[0]}, {0, fa[1]}, {1, fa[2]}};

    Vector xa = gcn_forward(a, fa, params);
    Vector xb = gcn_forward(b, fb, params);
    CHECK((xa - xb).norm() == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("gcn inference is bit-stable and ignores dropout seed") {
    GcnConfig config;
    config.layers = 2;
    config.hidden_dim = 6;
    nn::ParamRng rng(22);
    GcnParams params = GcnParams::init(config, 4, rng);
    evm::Cfg cfg = chain_cfg();
    std::map<int, Vector> features{{0, random_vector(4, 10)}, {1, random_vector(4, 11)}};
    Vector x1 = gcn_forward(cfg, features, params);
    Vector x2 = gcn_forward(cfg, features, params);
    CHECK((x1 - x2).norm() == 0.0);
    std::mt19937_64 r1(1), r2(2);
    Vector t1 = gcn_forward(cfg, features, params, nullptr, true, &r1);
    Vector t2 = gcn_forward(cfg, features, params, nullptr, true, &r2);
    CHECK((t1 - t2).norm() > 0.0);
}

TEST_CASE("gcn node-update gradient check") {
    nn::ParamRng rng(23);
    Param Wv = nn::make_param("Wv", 5, 5, rng, 0.5);
    Param Uv = nn::make_param("Uv", 5, 4, rng, 0.5);
    Param bv = nn::make_param("bv", 5, 1, rng, 0.5);
    Vector agg = random_vector(5, 1), h = random_vector(4, 2), probe = random_vector(5, 3);

    auto loss = [&] { return probe.dot(gcn_update(agg, h, Wv, Uv, bv)); };
    Wv.zero_grad();
    Uv.zero_grad();
    bv.zero_grad();
    gcn_update_backward(agg, h, Wv, Uv, bv, probe);

    CHECK(test::finite_difference_check(Wv, loss) <= 1e-3);
    CHECK(test::finite_difference_check(Uv, loss) <= 1e-3);
    CHECK(test::finite_difference_check(bv, loss) <= 1e-3);
}

TEST_CASE("gcn edge-message gradient check") {
    nn::ParamRng rng(24);
    Param Wm = nn::make_param("Wm", 4, 6, rng, 0.5);
    Param bm = nn::make_param("bm", 4, 1, rng, 0.5);
    Vector h = random_vector(4, 5), e = random_vector(2, 6), probe = random_vector(4, 7);

    auto loss = [&] { return probe.dot(gcn_message(h, e, Wm, bm)); };
    Wm.zero_grad();
    bm.zero_grad();
    gcn_message_backward(h, e, Wm, bm, probe);

    CHECK(test::finite_difference_check(Wm, loss) <= 1e-3);
    CHECK(test::finite_difference_check(bm, loss) <= 1e-3);
}

TEST_CASE("gcn neighbor-attention gradient check") {
    nn::ParamRng rng(25);
    AttentionHeadParams head;
    head.P = nn::make_param("P", 3, 4, rng, 0.8);
    head.q = nn::make_param("q", 6, 1, rng, 0.8);
    Vector h_v = random_vector(4, 8);
    std::vector<Vector> neighbors{random_vector(4, 9), random_vector(4, 10),
                                  random_vector(4, 11)};
    Vector probe = random_vector(3, 12);

    auto loss = [&] { return probe.dot(attention_weights(h_v, neighbors, head, 0.2)); };
    head.P.zero_grad();
    head.q.zero_grad();
    attention_weights_backward(h_v, neighbors, head, 0.2, probe);

    CHECK(test::finite_difference_check(head.P, loss) <= 1e-3);
    CHECK(test::finite_difference_check(head.q, loss) <= 1e-3);
}

}  // TEST_SUITE
