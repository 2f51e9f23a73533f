// Copyright 2026 The natlm Authors.
// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <functional>

#include "natlm/ast.hpp"
#include "natlm/facts.hpp"
#include "natlm/tokenize.hpp"
#include "natlm/util.hpp"

using namespace natlm;
using namespace natlm::ast;

namespace {

// Hand-written slice of solc 0.8.x AST output: contract Demo with a state
// variable and a mint function that calls _safeMint before bumping the supply.
const char* kDemoAst = R"JSON({
  "nodeType": "SourceUnit", "id": 0, "src": "0:300:0",
  "nodes": [
    {
      "nodeType": "ContractDefinition", "id": 1, "src": "10:280:0",
      "name": "Demo", "contractKind": "contract",
      "nodes": [
        {
          "nodeType": "VariableDeclaration", "id": 2, "src": "30:33:0",
          "name": "totalSupply", "stateVariable": true, "visibility": "public",
          "mutability": "mutable", "constant": false,
          "typeDescriptions": {"typeString": "uint256"},
          "typeName": {"nodeType": "ElementaryTypeName", "id": 3, "src": "30:7:0", "name": "uint256",
                       "typeDescriptions": {"typeString": "uint256"}}
        },
        {
          "nodeType": "FunctionDefinition", "id": 4, "src": "70:210:0",
          "name": "mint", "kind": "function", "visibility": "public", "stateMutability": "nonpayable",
          "modifiers": [],
          "parameters": {"nodeType": "ParameterList", "id": 5, "src": "83:20:0", "parameters": [
            {"nodeType": "VariableDeclaration", "id": 6, "src": "84:10:0", "name": "to",
             "stateVariable": false, "visibility": "internal", "mutability": "mutable",
             "typeDescriptions": {"typeString": "address"},
             "typeName": {"nodeType": "ElementaryTypeName", "id": 7, "src": "84:7:0", "name": "address",
                          "typeDescriptions": {"typeString": "address"}}}
          ]},
          "returnParameters": {"nodeType": "ParameterList", "id": 8, "src": "110:0:0", "parameters": []},
          "body": {
            "nodeType": "Block", "id": 9, "src": "112:168:0",
            "statements": [
              {
                "nodeType": "ExpressionStatement", "id": 10, "src": "120:30:0",
                "expression": {
                  "nodeType": "FunctionCall", "id": 11, "src": "120:28:0", "kind": "functionCall",
                  "typeDescriptions": {"typeString": "tuple()"},
                  "expression": {"nodeType": "Identifier", "id": 12, "src": "120:9:0",
                                 "name": "_safeMint",
                                 "typeDescriptions": {"typeString": "function (address,uint256)"}},
                  "arguments": [
                    {"nodeType": "Identifier", "id": 13, "src": "130:2:0", "name": "to",
                     "typeDescriptions": {"typeString": "address"}},
                    {"nodeType": "Identifier", "id": 14, "src": "134:11:0", "name": "totalSupply",
                     "typeDescriptions": {"typeString": "uint256"}}
                  ]
                }
              },
              {
                "nodeType": "ExpressionStatement", "id": 15, "src": "160:17:0",
                "expression": {
                  "nodeType": "UnaryOperation", "id": 16, "src": "160:13:0", "operator": "++",
                  "prefix": false,
                  "typeDescriptions": {"typeString": "uint256"},
                  "subExpression": {"nodeType": "Identifier", "id": 17, "src": "160:11:0",
                                    "name": "totalSupply",
                                    "typeDescriptions": {"typeString": "uint256"}}
                }
              }
            ]
          }
        }
      ]
    }
  ]
})JSON";

bool spans_nest(const AstNode& node) {
    for (const auto& child : node.children) {
        if (node.span.valid() && child->span.valid()) {
            if (child->span.start < node.span.start || child->span.end() > node.span.end())
                return false;
        }
        if (!spans_nest(*child)) return false;
    }
    return true;
}

}  // namespace

TEST_SUITE("ast") {

TEST_CASE("parse_ast builds a tree with kinds, names and spans") {
    auto tree = parse_ast(kDemoAst);
    CHECK(tree->kind == "SourceUnit");
    auto contracts = find_contracts(*tree);
    REQUIRE(contracts.size() == 1);
    CHECK(contracts[0]->attr_or("name", "") == "Demo");
    size_t fn_count = 0;
    for (const AstNode* n : linearize_dfs(*tree))
        if (n->kind == "FunctionDefinition") ++fn_count;
    CHECK(fn_count == 1);
    CHECK(spans_nest(*tree));
}

TEST_CASE("empty object is rejected with the offending path") {
    CHECK_THROWS_WITH_AS(parse_ast("{}"), "$: missing nodeType", ParseError);
}

TEST_CASE("malformed JSON is a parse error") {
    CHECK_THROWS_AS(parse_ast("{nope"), ParseError);
}

TEST_CASE("duplicate node ids are rejected") {
    const char* doc = R"({"nodeType":"SourceUnit","id":1,"nodes":[
        {"nodeType":"PragmaDirective","id":1,"src":"0:5:0"}]})";
    CHECK_THROWS_AS(parse_ast(doc), ParseError);
}

TEST_CASE("standard-JSON wrapper is unwrapped") {
    std::string doc = std::string(R"({"sources":{"demo.sol":{"id":0,"ast":)") + kDemoAst + "}}}";
    auto tree = parse_ast(doc);
    CHECK(tree->kind == "SourceUnit");
}

TEST_CASE("linearize_dfs is pre-order in source order") {
    const char* doc = R"({"nodeType":"SourceUnit","id":0,"src":"0:100:0","nodes":[
        {"nodeType":"ContractDefinition","id":1,"src":"0:50:0","name":"a","nodes":[
            {"nodeType":"PragmaDirective","id":2,"src":"5:10:0","name":"c"}]},
        {"nodeType":"ContractDefinition","id":3,"src":"60:30:0","name":"b"}]})";
    auto tree = parse_ast(doc);
    auto seq = linearize_dfs(*tree);
    REQUIRE(seq.size() == 4);
    CHECK(seq[0]->kind == "SourceUnit");
    CHECK(seq[1]->attr_or("name", "") == "a");
    CHECK(seq[2]->attr_or("name", "") == "c");
    CHECK(seq[3]->attr_or("name", "") == "b");
}

TEST_CASE("linearize_dfs of a single node is that node") {
    auto tree = parse_ast(R"({"nodeType":"SourceUnit","id":0,"src":"0:1:0"})");
    auto seq = linearize_dfs(*tree);
    REQUIRE(seq.size() == 1);
    CHECK(seq[0]->kind == "SourceUnit");
}

TEST_CASE("linearize length equals node count and ids are unique") {
    auto tree = parse_ast(kDemoAst);
    auto seq = linearize_dfs(*tree);
    CHECK(seq.size() == tree->node_count());
    std::set<long> ids;
    for (const AstNode* n : seq)
        if (n->id >= 0) CHECK(ids.insert(n->id).second);
}

TEST_CASE("identifier splitting") {
    CHECK(split_identifier("mintTokens") == std::vector<std::string>{"mint", "Tokens"});
    CHECK(split_identifier("safe_transfer_from") ==
          std::vector<std::string>{"safe", "transfer", "from"});
    CHECK(split_identifier("ERC721") == std::vector<std::string>{"ERC", "721"});
    CHECK(split_identifier("maxSupply2") == std::vector<std::string>{"max", "Supply", "2"});
    CHECK(split_identifier("_owner") == std::vector<std::string>{"owner"});
}

TEST_CASE("identifier round-trip: concatenated fragments reproduce the identifier") {
    for (const std::string id : {"mintTokens", "safe_transfer_from", "ERC721Enumerable",
                                 "tokenURI", "a1b2c3", "setProxyRegistryAddress"}) {
        std::string recombined;
        for (const auto& frag : split_identifier(id)) recombined += frag;
        std::string stripped;
        for (char c : id)
            if (c != '_') stripped.push_back(c);
        CHECK(recombined == stripped);
    }
}

TEST_CASE("tokenize wraps with CLS/SEP and assigns positions") {
    TokenSequence empty = tokenize({});
    CHECK(empty.tokens == std::vector<std::string>{"[CLS]", "[SEP]"});
    CHECK(empty.positions == std::vector<size_t>{0, 1});

    auto tree = parse_ast(kDemoAst);
    auto seq = tokenize(linearize_dfs(*tree));
    CHECK(seq.tokens.front() == "[CLS]");
    CHECK(seq.tokens.back() == "[SEP]");
    CHECK(!seq.truncated);
    for (const auto& t : seq.tokens) CHECK(!t.empty());
    // Node kinds and split identifiers both appear.
    auto has = [&](const std::string& t) {
        return std::find(seq.tokens.begin(), seq.tokens.end(), t) != seq.tokens.end();
    };
    CHECK(has("FunctionDefinition"));
    CHECK(has("mint"));
    CHECK(has("safe"));
    CHECK(has("Mint"));
    CHECK(has("total"));
    CHECK(has("Supply"));
}

TEST_CASE("tokenize truncates at the cap with a flag") {
    auto tree = parse_ast(kDemoAst);
    TokenizeOptions opts;
    opts.max_tokens = 8;
    auto seq = tokenize(linearize_dfs(*tree), opts);
    CHECK(seq.tokens.size() == 8);
    CHECK(seq.truncated);
    CHECK(seq.tokens.front() == "[CLS]");
    CHECK(seq.tokens.back() == "[SEP]");
}

TEST_CASE("extract_facts lists state variables and functions") {
    auto tree = parse_ast(kDemoAst);
    auto facts = extract_facts_from_tree(*tree);
    CHECK(facts.contract_name == "Demo");
    REQUIRE(facts.state_vars.size() == 1);
    CHECK(facts.state_vars[0].name == "totalSupply");
    CHECK(facts.state_vars[0].type == "uint256");
    CHECK(facts.state_vars[0].is_mutable);
    REQUIRE(facts.functions.size() == 1);
    const auto& mint = facts.functions[0];
    CHECK(mint.name == "mint");
    CHECK(mint.visibility == "public");
    CHECK(mint.modifiers.empty());
    REQUIRE(mint.external_calls.size() == 1);
    CHECK(mint.external_calls[0].callee == "_safeMint");
    CHECK(mint.external_calls[0].safe_callback);
    CHECK(mint.mutators == std::set<std::string>{"totalSupply"});
}

TEST_CASE("call_order preserves source order: call before write") {
    auto tree = parse_ast(kDemoAst);
    auto facts = extract_facts_from_tree(*tree);
    const auto& order = facts.functions[0].call_order;
    REQUIRE(order.size() == 2);
    CHECK(order[0].kind == FunctionEvent::Kind::ExternalCall);
    CHECK(order[1].kind == FunctionEvent::Kind::StateWrite);
}

TEST_CASE("contract with no functions has empty function list") {
    const char* doc = R"({"nodeType":"SourceUnit","id":0,"src":"0:60:0","nodes":[
        {"nodeType":"ContractDefinition","id":1,"src":"0:50:0","name":"Empty","contractKind":"contract",
         "nodes":[{"nodeType":"VariableDeclaration","id":2,"src":"10:20:0","name":"x",
                   "stateVariable":true,"visibility":"private","mutability":"mutable",
                   "typeDescriptions":{"typeString":"uint256"}}]}]})";
    auto facts = extract_facts_from_tree(*parse_ast(doc));
    CHECK(facts.functions.empty());
    CHECK(facts.state_vars.size() == 1);
}

TEST_CASE("facts summary renders deterministically") {
    auto tree = parse_ast(kDemoAst);
    auto facts = extract_facts_from_tree(*tree);
    std::string a = render_facts_summary(facts);
    std::string b = render_facts_summary(facts);
    CHECK(a == b);
    CHECK(a.find("call(_safeMint callback)") != std::string::npos);
    CHECK(a.find("write(totalSupply)") != std::string::npos);
    CHECK(a.find("mint_sites=1") != std::string::npos);
}

}  // TEST_SUITE
