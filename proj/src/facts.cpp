// Copyright 2026 The natlm Authors.
// SPDX-License-Identifier: Apache-2.0
#include "natlm/facts.hpp"

#include <algorithm>
#include <sstream>

#include "natlm/util.hpp"

namespace natlm::ast {

namespace {

const std::set<std::string> kLowLevelMembers = {"call", "delegatecall", "staticcall", "send",
                                                "transfer"};
// Functions that hand control to the token receiver via onERC721Received.
const std::set<std::string> kSafeCallbackNames = {"safeTransferFrom", "_safeTransfer", "_safeMint",
                                                  "safeMint", "_checkOnERC721Received"};
const std::set<std::string> kBuiltinCallees = {"require", "assert",  "revert",
                                               "keccak256", "sha256", "ecrecover", "addmod",
                                               "mulmod", "selfdestruct", "payable", "type"};
const std::set<std::string> kComparisonOps = {"<", "<=", ">", ">=", "==", "!="};

const std::set<std::string> kHandledKinds = {
    "SourceUnit", "PragmaDirective", "ImportDirective", "ContractDefinition",
    "InheritanceSpecifier", "VariableDeclaration", "FunctionDefinition", "ModifierDefinition",
    "ModifierInvocation", "IdentifierPath", "ParameterList", "Block", "UncheckedBlock",
    "ExpressionStatement", "VariableDeclarationStatement", "Assignment", "BinaryOperation",
    "UnaryOperation", "FunctionCall", "FunctionCallOptions", "MemberAccess", "Identifier",
    "IndexAccess", "Literal", "IfStatement", "ForStatement", "WhileStatement", "Return",
    "EmitStatement", "EventDefinition", "ErrorDefinition", "ElementaryTypeName",
    "ElementaryTypeNameExpression", "UserDefinedTypeName", "Mapping", "ArrayTypeName",
    "TupleExpression", "PlaceholderStatement", "OverrideSpecifier", "StructuredDocumentation",
    "Conditional", "RevertStatement", "NewExpression", "EnumDefinition", "EnumValue",
    "StructDefinition", "UsingForDirective"};

const AstNode* first_child(const AstNode& n) {
    return n.children.empty() ? nullptr : n.children.front().get();
}

/// Base identifier of an assignable expression: descends through index and
/// member accesses (balances[x].y -> balances).
const AstNode* lvalue_base(const AstNode& expr) {
    const AstNode* n = &expr;
    while (n && (n->kind == "IndexAccess" || n->kind == "MemberAccess" ||
                 n->kind == "TupleExpression"))
        n = first_child(*n);
    return (n && n->kind == "Identifier") ? n : nullptr;
}

void collect_names(const AstNode& n, std::vector<std::string>& out) {
    if (n.kind == "Identifier") {
        if (const std::string* name = n.attr("name")) out.push_back(*name);
    } else if (n.kind == "MemberAccess") {
        if (const std::string* m = n.attr("memberName")) out.push_back(*m);
    }
    for (const auto& c : n.children) collect_names(*c, out);
}

void collect_comparisons(const AstNode& n, std::vector<Comparison>& out) {
    if (n.kind == "BinaryOperation") {
        const std::string op = n.attr_or("operator", "");
        if (kComparisonOps.count(op) && n.children.size() >= 2) {
            Comparison cmp;
            cmp.op = op;
            collect_names(*n.children[0], cmp.left_names);
            collect_names(*n.children[1], cmp.right_names);
            out.push_back(std::move(cmp));
        }
    }
    for (const auto& c : n.children) collect_comparisons(*c, out);
}

CheckRecord make_check(const AstNode& condition) {
    CheckRecord check;
    collect_names(condition, check.names);
    collect_comparisons(condition, check.comparisons);
    return check;
}

class FunctionWalker {
public:
    FunctionWalker(FunctionFacts& fn, const std::set<std::string>& state_vars,
                   std::map<std::string, size_t>& skipped)
        : fn_(fn), state_vars_(state_vars), skipped_(skipped) {}

    void walk(const AstNode& n) {
        if (!kHandledKinds.count(n.kind)) ++skipped_[n.kind];

        if (n.kind == "EmitStatement") return;  // event arguments are not calls or writes

        if (n.kind == "Assignment") {
            record_write(n);
        } else if (n.kind == "UnaryOperation") {
            const std::string op = n.attr_or("operator", "");
            if (op == "++" || op == "--" || op == "delete") record_write(n);
        } else if (n.kind == "FunctionCall") {
            record_call(n);
        } else if (n.kind == "IfStatement") {
            if (const AstNode* cond = first_child(n)) fn_.checks.push_back(make_check(*cond));
        }

        for (const auto& c : n.children) walk(*c);
    }

private:
    void record_write(const AstNode& n) {
        const AstNode* target = first_child(n);
        if (!target) return;
        const AstNode* base = lvalue_base(*target);
        if (!base) return;
        const std::string name = base->attr_or("name", "");
        if (!state_vars_.count(name)) return;
        fn_.writes.push_back({name, n.span});
        fn_.mutators.insert(name);
    }

    void record_call(const AstNode& call) {
        if (call.attr_or("kind", "functionCall") == "typeConversion") return;
        const AstNode* callee = first_child(call);
        if (!callee) return;

        if (callee->kind == "Identifier") {
            const std::string name = callee->attr_or("name", "");
            if (name == "require" || name == "assert") {
                // First argument is the guard condition (children: callee, args...).
                if (call.children.size() >= 2) fn_.checks.push_back(make_check(*call.children[1]));
                return;
            }
            if (kBuiltinCallees.count(name)) return;
            if (kSafeCallbackNames.count(name)) {
                add_external_call(name, call.span, /*low_level=*/false, /*callback=*/true);
            } else {
                fn_.internal_calls.push_back(name);
            }
            return;
        }

        if (callee->kind == "MemberAccess") {
            const std::string member = callee->attr_or("memberName", "");
            const AstNode* receiver = first_child(*callee);
            const std::string recv_type =
                receiver ? receiver->attr_or("type_string", "") : std::string();
            bool recv_is_this =
                receiver && receiver->kind == "Identifier" && receiver->attr_or("name", "") == "this";
            bool recv_is_address = recv_type.rfind("address", 0) == 0;
            bool recv_is_contract = recv_type.rfind("contract ", 0) == 0;

            if (kLowLevelMembers.count(member) && recv_is_address) {
                add_external_call(member, call.span, /*low_level=*/true, /*callback=*/false);
            } else if (kSafeCallbackNames.count(member) && !recv_is_this) {
                add_external_call(member, call.span, /*low_level=*/false, /*callback=*/true);
            } else if ((recv_is_contract || recv_is_address) && !recv_is_this) {
                add_external_call(member, call.span, /*low_level=*/false, /*callback=*/false);
            } else {
                fn_.internal_calls.push_back(member);
            }
        }
    }

    void add_external_call(const std::string& callee, SourceSpan span, bool low_level,
                           bool callback) {
        fn_.external_calls.push_back({callee, span, low_level, callback});
    }

    FunctionFacts& fn_;
    const std::set<std::string>& state_vars_;
    std::map<std::string, size_t>& skipped_;
};

std::string state_var_type(const AstNode& decl) {
    if (const std::string* t = decl.attr("type_string")) return *t;
    for (const auto& c : decl.children) {
        if (c->kind == "ElementaryTypeName" || c->kind == "UserDefinedTypeName" ||
            c->kind == "Mapping" || c->kind == "ArrayTypeName")
            return c->attr_or("name", c->attr_or("type_string", ""));
    }
    return "";
}

}  // namespace

size_t ContractFacts::external_call_count() const {
    size_t n = 0;
    for (const auto& f : functions) n += f.external_calls.size();
    return n;
}

size_t ContractFacts::mint_site_count() const {
    size_t n = 0;
    for (const auto& f : functions)
        if (f.reaches("mint")) ++n;
    return n;
}

const FunctionFacts* ContractFacts::function(const std::string& name) const {
    for (const auto& f : functions)
        if (f.name == name) return &f;
    return nullptr;
}

bool FunctionFacts::reaches(const std::string& primitive) const {
    if (contains_ci(name, primitive)) return true;
    for (const auto& callee : internal_calls)
        if (contains_ci(callee, primitive)) return true;
    for (const auto& call : external_calls)
        if (contains_ci(call.callee, primitive)) return true;
    return false;
}

ContractFacts extract_facts(const AstNode& contract) {
    ContractFacts facts;
    facts.contract_name = contract.attr_or("name", "");

    std::set<std::string> state_var_names;
    for (const auto& child : contract.children) {
        if (child->kind != "VariableDeclaration") continue;
        if (child->attr_or("stateVariable", "true") != "true") continue;
        StateVar var;
        var.name = child->attr_or("name", "");
        var.type = state_var_type(*child);
        var.visibility = child->attr_or("visibility", "internal");
        const std::string mutability = child->attr_or("mutability", "");
        if (!mutability.empty())
            var.is_mutable = mutability == "mutable";
        else
            var.is_mutable = child->attr_or("constant", "false") != "true";
        state_var_names.insert(var.name);
        facts.state_vars.push_back(std::move(var));
    }

    for (const auto& child : contract.children) {
        if (child->kind != "FunctionDefinition") continue;
        FunctionFacts fn;
        fn.name = child->attr_or("name", "");
        fn.visibility = child->attr_or("visibility", "internal");
        fn.span = child->span;
        fn.is_constructor = child->attr_or("kind", "function") == "constructor" ||
                            child->attr_or("isConstructor", "false") == "true";
        if (fn.is_constructor && fn.name.empty()) fn.name = "constructor";

        for (const auto& part : child->children) {
            if (part->kind == "ModifierInvocation") {
                for (const auto& mc : part->children)
                    if (mc->kind == "Identifier" || mc->kind == "IdentifierPath")
                        fn.modifiers.push_back(mc->attr_or("name", ""));
            } else if (part->kind == "Block") {
                FunctionWalker walker(fn, state_var_names, facts.skipped_kinds);
                walker.walk(*part);
            }
        }

        for (size_t i = 0; i < fn.external_calls.size(); ++i)
            fn.call_order.push_back({FunctionEvent::Kind::ExternalCall, i,
                                     fn.external_calls[i].span.start});
        for (size_t i = 0; i < fn.writes.size(); ++i)
            fn.call_order.push_back({FunctionEvent::Kind::StateWrite, i, fn.writes[i].span.start});
        std::stable_sort(fn.call_order.begin(), fn.call_order.end(),
                         [](const FunctionEvent& a, const FunctionEvent& b) {
                             return a.offset < b.offset;
                         });

        facts.functions.push_back(std::move(fn));
    }
    return facts;
}

ContractFacts extract_facts_from_tree(const AstNode& tree, const std::string& contract_name) {
    const AstNode* contract = find_contract(tree, contract_name);
    if (!contract)
        throw ParseError(contract_name.empty()
                             ? "no ContractDefinition in AST"
                             : "no contract named '" + contract_name + "' in AST");
    return extract_facts(*contract);
}

std::string render_facts_summary(const ContractFacts& facts) {
    std::ostringstream out;
    out << "contract: " << facts.contract_name << "\n";
    out << "state variables:\n";
    if (facts.state_vars.empty()) out << "  (none)\n";
    for (const auto& v : facts.state_vars)
        out << "  - " << v.name << ": " << v.type << " [" << v.visibility << ", "
            << (v.is_mutable ? "mutable" : "immutable") << "]\n";
    out << "functions:\n";
    if (facts.functions.empty()) out << "  (none)\n";
    for (const auto& f : facts.functions) {
        out << "  function " << f.name << " [" << f.visibility << "]";
        if (f.is_constructor) out << " (constructor)";
        out << "\n    modifiers: ";
        if (f.modifiers.empty()) {
            out << "none";
        } else {
            for (size_t i = 0; i < f.modifiers.size(); ++i)
                out << (i ? ", " : "") << f.modifiers[i];
        }
        out << "\n    sequence: ";
        if (f.call_order.empty()) {
            out << "none";
        } else {
            for (size_t i = 0; i < f.call_order.size(); ++i) {
                const auto& ev = f.call_order[i];
                if (i) out << " -> ";
                if (ev.kind == FunctionEvent::Kind::ExternalCall) {
                    const auto& call = f.external_calls[ev.index];
                    out << "call(" << call.callee;
                    if (call.safe_callback) out << " callback";
                    if (call.low_level) out << " lowlevel";
                    out << ")@" << ev.offset;
                } else {
                    out << "write(" << f.writes[ev.index].variable << ")@" << ev.offset;
                }
            }
        }
        out << "\n    calls: ";
        if (f.internal_calls.empty()) {
            out << "none";
        } else {
            for (size_t i = 0; i < f.internal_calls.size(); ++i)
                out << (i ? ", " : "") << f.internal_calls[i];
        }
        out << "\n    checks:";
        if (f.checks.empty()) out << " none";
        out << "\n";
        for (const auto& check : f.checks) {
            out << "      - names=[";
            for (size_t i = 0; i < check.names.size(); ++i) out << (i ? "," : "") << check.names[i];
            out << "]";
            for (const auto& cmp : check.comparisons) {
                out << " cmp=[";
                for (size_t i = 0; i < cmp.left_names.size(); ++i)
                    out << (i ? "|" : "") << cmp.left_names[i];
                out << " " << cmp.op << " ";
                for (size_t i = 0; i < cmp.right_names.size(); ++i)
                    out << (i ? "|" : "") << cmp.right_names[i];
                out << "]";
            }
            out << "\n";
        }
    }
    out << "counts: functions=" << facts.functions.size()
        << " external_calls=" << facts.external_call_count()
        << " mint_sites=" << facts.mint_site_count() << "\n";
    return out.str();
}

}  // namespace natlm::ast
