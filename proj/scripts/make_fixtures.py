#!/usr/bin/env python3
# Copyright 2026 The natlm Authors.
# SPDX-License-Identifier: Apache-2.0
"""Fixture corpus authoring tool.

Builds the Solidity sources, matching compiler-style AST JSON (with exact
source spans), deployed-bytecode hex and the ground-truth manifest under
fixtures/. Run from the repository root:

    python3 scripts/make_fixtures.py

The outputs are checked in; re-running must be byte-stable.
"""

import json
import os
import sys

OUT_DIR = os.path.join(os.path.dirname(__file__), "..", "fixtures")


class Ctx:
    """Tracks the source text being emitted and allocates node ids."""

    def __init__(self):
        self.text = []
        self.pos = 0
        self.next_id = 0

    def emit(self, s):
        start = self.pos
        self.text.append(s)
        self.pos += len(s)
        return start

    def nid(self):
        self.next_id += 1
        return self.next_id

    def source(self):
        return "".join(self.text)


def node(ctx, node_type, start, length, **fields):
    n = {"id": ctx.nid(), "nodeType": node_type, "src": f"{start}:{length}:0"}
    n.update(fields)
    return n


def td(type_string):
    return {"typeDescriptions": {"typeString": type_string}}


# ---------------------------------------------------------------- expressions


def ident(name, type_string):
    def build(ctx):
        start = ctx.emit(name)
        return node(ctx, "Identifier", start, len(name), name=name, **td(type_string))

    return build


def literal(value, type_string, kind="number"):
    text = str(value)

    def build(ctx):
        start = ctx.emit(text)
        return node(ctx, "Literal", start, len(text), kind=kind, value=str(value),
                    **td(type_string))

    return build


def member(base, member_name, type_string):
    def build(ctx):
        start = ctx.pos
        base_node = base(ctx)
        ctx.emit("." + member_name)
        return node(ctx, "MemberAccess", start, ctx.pos - start, memberName=member_name,
                    expression=base_node, **td(type_string))

    return build


def index(base, idx, type_string):
    def build(ctx):
        start = ctx.pos
        base_node = base(ctx)
        ctx.emit("[")
        idx_node = idx(ctx)
        ctx.emit("]")
        return node(ctx, "IndexAccess", start, ctx.pos - start, baseExpression=base_node,
                    indexExpression=idx_node, **td(type_string))

    return build


def call(callee, args, type_string="tuple()", kind="functionCall"):
    def build(ctx):
        start = ctx.pos
        callee_node = callee(ctx)
        ctx.emit("(")
        arg_nodes = []
        for i, arg in enumerate(args):
            if i:
                ctx.emit(", ")
            arg_nodes.append(arg(ctx))
        ctx.emit(")")
        return node(ctx, "FunctionCall", start, ctx.pos - start, kind=kind,
                    expression=callee_node, arguments=arg_nodes, **td(type_string))

    return build


def type_conversion(type_name, arg):
    def build(ctx):
        start = ctx.pos
        tn_start = ctx.emit(type_name)
        tn = node(ctx, "ElementaryTypeNameExpression", tn_start, len(type_name),
                  typeName={"id": 0, "nodeType": "ElementaryTypeName", "name": type_name,
                            "src": f"{tn_start}:{len(type_name)}:0"},
                  **td(f"type({type_name})"))
        ctx.emit("(")
        arg_node = arg(ctx)
        ctx.emit(")")
        return node(ctx, "FunctionCall", start, ctx.pos - start, kind="typeConversion",
                    expression=tn, arguments=[arg_node], **td(type_name))

    return build


def binop(left, op, right, type_string="bool"):
    def build(ctx):
        start = ctx.pos
        left_node = left(ctx)
        ctx.emit(f" {op} ")
        right_node = right(ctx)
        return node(ctx, "BinaryOperation", start, ctx.pos - start, operator=op,
                    leftExpression=left_node, rightExpression=right_node, **td(type_string))

    return build


# ----------------------------------------------------------------- statements


def stmt_expr(expr, indent="        "):
    def build(ctx):
        ctx.emit(indent)
        start = ctx.pos
        inner = expr(ctx)
        length = ctx.pos - start
        ctx.emit(";\n")
        return node(ctx, "ExpressionStatement", start, length + 1, expression=inner)

    return build


def stmt_assign(lhs, op, rhs, indent="        "):
    def build(ctx):
        ctx.emit(indent)
        start = ctx.pos
        lhs_node = lhs(ctx)
        ctx.emit(f" {op} ")
        rhs_node = rhs(ctx)
        assign = node(ctx, "Assignment", start, ctx.pos - start, operator=op,
                      leftHandSide=lhs_node, rightHandSide=rhs_node, **td("uint256"))
        length = ctx.pos - start
        ctx.emit(";\n")
        return node(ctx, "ExpressionStatement", start, length + 1, expression=assign)

    return build


def stmt_increment(target, indent="        "):
    def build(ctx):
        ctx.emit(indent)
        start = ctx.pos
        target_node = target(ctx)
        ctx.emit("++")
        unary = node(ctx, "UnaryOperation", start, ctx.pos - start, operator="++",
                     prefix=False, subExpression=target_node, **td("uint256"))
        length = ctx.pos - start
        ctx.emit(";\n")
        return node(ctx, "ExpressionStatement", start, length + 1, expression=unary)

    return build


def stmt_require(cond, message=None, indent="        "):
    args = [cond]
    if message is not None:
        args.append(literal(f'"{message}"', "string", kind="string"))
    return stmt_expr(call(ident("require", "function (bool) pure"), args), indent)


def stmt_emit(event_name, args, indent="        "):
    def build(ctx):
        ctx.emit(indent)
        start = ctx.pos
        ctx.emit("emit ")
        call_node = call(ident(event_name, f"function ()"), args)(ctx)
        length = ctx.pos - start
        ctx.emit(";\n")
        return node(ctx, "EmitStatement", start, length + 1, eventCall=call_node)

    return build


def stmt_vardecl(name, type_name, init, indent="        "):
    def build(ctx):
        ctx.emit(indent)
        start = ctx.pos
        tn_start = ctx.emit(type_name)
        tn = node(ctx, "ElementaryTypeName", tn_start, len(type_name), name=type_name,
                  **td(type_name))
        ctx.emit(" ")
        name_start = ctx.emit(name)
        decl = node(ctx, "VariableDeclaration", tn_start, ctx.pos - tn_start, name=name,
                    stateVariable=False, visibility="internal", mutability="mutable",
                    typeName=tn, **td(type_name))
        _ = name_start
        ctx.emit(" = ")
        init_node = init(ctx)
        length = ctx.pos - start
        ctx.emit(";\n")
        return node(ctx, "VariableDeclarationStatement", start, length + 1,
                    declarations=[decl], initialValue=init_node)

    return build


# ------------------------------------------------------------------- contract


def state_var(name, type_name, type_string, visibility="public", mutability="mutable",
              value=None):
    def build(ctx):
        ctx.emit("    ")
        start = ctx.pos
        tn_start = ctx.emit(type_name)
        tn = node(ctx, "ElementaryTypeName" if "(" not in type_name else "Mapping", tn_start,
                  len(type_name), name=type_name, **td(type_string))
        ctx.emit(" ")
        if visibility != "internal":
            ctx.emit(visibility + " ")
        if mutability == "constant":
            ctx.emit("constant ")
        elif mutability == "immutable":
            ctx.emit("immutable ")
        ctx.emit(name)
        extra = {}
        if value is not None:
            ctx.emit(" = ")
            extra["value"] = literal(value, type_string)(ctx)
        length = ctx.pos - start
        ctx.emit(";\n")
        return node(ctx, "VariableDeclaration", start, length, name=name, stateVariable=True,
                    visibility=visibility, mutability=mutability,
                    constant=mutability == "constant", typeName=tn, **td(type_string), **extra)

    return build


def event_def(name, params):
    def build(ctx):
        ctx.emit("    ")
        start = ctx.pos
        ctx.emit(f"event {name}(")
        plist_start = ctx.pos
        decls = []
        for i, (ptype, pname) in enumerate(params):
            if i:
                ctx.emit(", ")
            p_start = ctx.emit(ptype)
            tn = node(ctx, "ElementaryTypeName", p_start, len(ptype), name=ptype, **td(ptype))
            ctx.emit(" " + pname)
            decls.append(node(ctx, "VariableDeclaration", p_start, ctx.pos - p_start,
                              name=pname, stateVariable=False, visibility="internal",
                              mutability="mutable", typeName=tn, **td(ptype)))
        plist = node(ctx, "ParameterList", plist_start, ctx.pos - plist_start,
                     parameters=decls)
        length = ctx.pos - start + 1
        ctx.emit(");\n")
        return node(ctx, "EventDefinition", start, length, name=name, anonymous=False,
                    parameters=plist)

    return build


def modifier_def(name):
    def build(ctx):
        ctx.emit("    ")
        start = ctx.pos
        ctx.emit(f"modifier {name}() ")
        plist = node(ctx, "ParameterList", start, 0, parameters=[])
        body_start = ctx.emit("{")
        ctx.emit(" _; ")
        placeholder = node(ctx, "PlaceholderStatement", body_start + 2, 2)
        ctx.emit("}")
        body = node(ctx, "Block", body_start, ctx.pos - body_start,
                    statements=[placeholder])
        length = ctx.pos - start
        ctx.emit("\n")
        return node(ctx, "ModifierDefinition", start, length, name=name, virtual=False,
                    visibility="internal", parameters=plist, body=body)

    return build


def function_def(name, params, body_stmts, visibility="public", mutability="nonpayable",
                 modifiers=(), kind="function"):
    def build(ctx):
        ctx.emit("    ")
        start = ctx.pos
        if kind == "constructor":
            ctx.emit("constructor(")
        else:
            ctx.emit(f"function {name}(")
        plist_start = ctx.pos
        decls = []
        for i, (ptype, pname, ptype_string) in enumerate(params):
            if i:
                ctx.emit(", ")
            p_start = ctx.emit(ptype)
            tn = node(ctx, "ElementaryTypeName", p_start, len(ptype), name=ptype,
                      **td(ptype_string))
            ctx.emit(" " + pname)
            decls.append(node(ctx, "VariableDeclaration", p_start, ctx.pos - p_start,
                              name=pname, stateVariable=False, visibility="internal",
                              mutability="mutable", typeName=tn, **td(ptype_string)))
        plist = node(ctx, "ParameterList", plist_start, ctx.pos - plist_start,
                     parameters=decls)
        ctx.emit(")")
        if kind != "constructor":
            ctx.emit(" " + visibility)
        if mutability in ("view", "pure", "payable"):
            ctx.emit(" " + mutability)
        mod_nodes = []
        for mod in modifiers:
            ctx.emit(" ")
            mod_start = ctx.emit(mod)
            path = node(ctx, "IdentifierPath", mod_start, len(mod), name=mod)
            mod_nodes.append(node(ctx, "ModifierInvocation", mod_start, len(mod),
                                  modifierName=path))
        ret = node(ctx, "ParameterList", ctx.pos, 0, parameters=[])
        ctx.emit(" {\n")
        body_start = ctx.pos - 2
        stmt_nodes = [s(ctx) for s in body_stmts]
        ctx.emit("    ")
        body_end = ctx.emit("}") + 1
        body = node(ctx, "Block", body_start, body_end - body_start, statements=stmt_nodes)
        length = ctx.pos - start
        ctx.emit("\n\n")
        return node(ctx, "FunctionDefinition", start, length, name=name, kind=kind,
                    visibility=visibility, stateMutability=mutability,
                    virtual=False, implemented=True, modifiers=mod_nodes, parameters=plist,
                    returnParameters=ret, body=body)

    return build


def contract(name, members):
    def build(ctx):
        ctx.emit("// SPDX-License-Identifier: MIT\n")
        pragma_start = ctx.emit("pragma solidity ^0.8.19;")
        pragma = node(ctx, "PragmaDirective", pragma_start, 24,
                      literals=["solidity", "^", "0.8", ".19"])
        ctx.emit("\n\n")
        start = ctx.emit(f"contract {name} " + "{\n")
        member_nodes = [m(ctx) for m in members]
        end = ctx.emit("}") + 1
        ctx.emit("\n")
        cdef = node(ctx, "ContractDefinition", start, end - start, name=name,
                    contractKind="contract", abstract=False, baseContracts=[],
                    nodes=member_nodes)
        unit = node(ctx, "SourceUnit", 0, ctx.pos, nodes=[pragma, cdef])
        return unit

    return build


# ------------------------------------------------------------------- bytecode

OPS = {"STOP": 0x00, "ADD": 0x01, "SUB": 0x03, "LT": 0x10, "GT": 0x11, "EQ": 0x14,
       "ISZERO": 0x15, "SHR": 0x1c, "CALLDATALOAD": 0x35, "CALLDATASIZE": 0x36,
       "CALLER": 0x33, "CALLVALUE": 0x34, "POP": 0x50, "MLOAD": 0x51, "MSTORE": 0x52,
       "SLOAD": 0x54, "SSTORE": 0x55, "JUMP": 0x56, "JUMPI": 0x57, "JUMPDEST": 0x5b,
       "DUP1": 0x80, "DUP2": 0x81, "SWAP1": 0x90, "LOG1": 0xa1, "GAS": 0x5a,
       "CALL": 0xf1, "RETURN": 0xf3, "REVERT": 0xfd}


def assemble(program):
    """Two-pass assembler. Items: (op,), ('PUSH1', value-or-label), ('PUSH4', int),
    ('label', name)."""
    offsets = {}
    pos = 0
    for item in program:
        if item[0] == "label":
            offsets[item[1]] = pos
        elif item[0] == "PUSH1":
            pos += 2
        elif item[0] == "PUSH4":
            pos += 5
        else:
            pos += 1
    out = bytearray()
    for item in program:
        if item[0] == "label":
            out.append(OPS["JUMPDEST"])
            continue
        if item[0] == "PUSH1":
            value = item[1]
            if isinstance(value, str):
                value = offsets[value] + 0  # label points at its JUMPDEST
            assert 0 <= value <= 0xFF
            out += bytes([0x60, value])
        elif item[0] == "PUSH4":
            out += bytes([0x63]) + item[1].to_bytes(4, "big")
        else:
            out.append(OPS[item[0]])
    return bytes(out)


def selector(i):
    return 0xA0000000 + i * 0x01010101


def make_bytecode(n_functions, with_call, with_sstore, slot_seed):
    """Dispatcher with one branch per function plus a revert fallback."""
    program = [("PUSH1", 0x80), ("PUSH1", 0x40), ("MSTORE",),
               ("PUSH1", 0x00), ("CALLDATALOAD",), ("PUSH1", 0xE0), ("SHR",)]
    n = max(1, n_functions)
    for i in range(n):
        program += [("DUP1",), ("PUSH4", selector(i)), ("EQ",), ("PUSH1", f"fn{i}"),
                    ("JUMPI",)]
    program += [("PUSH1", 0x00), ("DUP1",), ("REVERT",)]
    for i in range(n):
        program += [("label", f"fn{i}")]
        slot = (slot_seed + i) % 8
        if with_sstore:
            program += [("PUSH1", slot), ("SLOAD",), ("PUSH1", 0x01), ("ADD",),
                        ("PUSH1", slot), ("SSTORE",)]
        if with_call and i == 0:
            program += [("PUSH1", 0x00), ("PUSH1", 0x00), ("PUSH1", 0x00), ("PUSH1", 0x00),
                        ("PUSH1", 0x00), ("CALLER",), ("GAS",), ("CALL",), ("POP",)]
        if i % 2 == 0:
            program += [("STOP",)]
        else:
            program += [("PUSH1", 0x20), ("PUSH1", 0x00), ("RETURN",)]
    return assemble(program)


# ------------------------------------------------------------------- fixtures

MSG_SENDER = member(ident("msg", "msg"), "sender", "address")


def fixture_reentrant_mint():
    members = [
        state_var("totalSupply", "uint256", "uint256"),
        state_var("MAX_SUPPLY", "uint256", "uint256", mutability="constant", value=10000),
        function_def("mint", [("address", "to", "address")], [
            stmt_require(binop(ident("totalSupply", "uint256"), "<",
                               ident("MAX_SUPPLY", "uint256")), "sold out"),
            stmt_expr(call(ident("_safeMint", "function (address,uint256)"),
                           [ident("to", "address"), ident("totalSupply", "uint256")])),
            stmt_assign(ident("totalSupply", "uint256"), "+=", literal(1, "uint256")),
        ]),
    ]
    return ("reentrant_mint", "ReentrantMint", members,
            [("erc721_reentrancy", "mint")], dict(with_call=True, with_sstore=True))


def fixture_reentrant_claim():
    nft = ident("rewards", "contract IERC721")
    members = [
        state_var("rewards", "IERC721", "contract IERC721"),
        state_var("claimed", "mapping(uint256 => bool)", "mapping(uint256 => bool)"),
        function_def("claim", [("uint256", "tokenId", "uint256")], [
            stmt_require(binop(index(ident("claimed", "mapping(uint256 => bool)"),
                                     ident("tokenId", "uint256"), "bool"), "==",
                               literal("false", "bool")), "already claimed"),
            stmt_expr(call(member(nft, "safeTransferFrom",
                                  "function (address,address,uint256) external"),
                           [type_conversion("address", ident("this", "contract ReentrantClaim")),
                            MSG_SENDER, ident("tokenId", "uint256")])),
            stmt_assign(index(ident("claimed", "mapping(uint256 => bool)"),
                              ident("tokenId", "uint256"), "bool"), "=",
                        literal("true", "bool")),
        ]),
    ]
    return ("reentrant_claim", "ReentrantClaim", members,
            [("erc721_reentrancy", "claim")], dict(with_call=True, with_sstore=True))


def fixture_open_burn():
    members = [
        state_var("owners", "mapping(uint256 => address)", "mapping(uint256 => address)"),
        function_def("burn", [("uint256", "tokenId", "uint256")], [
            stmt_expr(call(ident("_burn", "function (uint256)"),
                           [ident("tokenId", "uint256")])),
        ]),
        function_def("_burn", [("uint256", "tokenId", "uint256")], [
            stmt_assign(index(ident("owners", "mapping(uint256 => address)"),
                              ident("tokenId", "uint256"), "address"), "=",
                        type_conversion("address", literal(0, "int_const 0"))),
        ], visibility="internal"),
    ]
    return ("open_burn", "OpenBurn", members, [("public_burn", "burn")],
            dict(with_call=False, with_sstore=True))


def fixture_batch_burn():
    members = [
        state_var("owners", "mapping(uint256 => address)", "mapping(uint256 => address)"),
        event_def("Burned", [("uint256", "tokenId")]),
        function_def("burnBatch", [("uint256", "first", "uint256"),
                                   ("uint256", "second", "uint256")], [
            stmt_require(binop(ident("first", "uint256"), "!=", ident("second", "uint256")),
                         "duplicate id"),
            stmt_expr(call(ident("_burn", "function (uint256)"), [ident("first", "uint256")])),
            stmt_expr(call(ident("_burn", "function (uint256)"), [ident("second", "uint256")])),
            stmt_emit("Burned", [ident("first", "uint256")]),
        ], visibility="external"),
        function_def("_burn", [("uint256", "tokenId", "uint256")], [
            stmt_assign(index(ident("owners", "mapping(uint256 => address)"),
                              ident("tokenId", "uint256"), "address"), "=",
                        type_conversion("address", literal(0, "int_const 0"))),
        ], visibility="internal"),
    ]
    return ("batch_burn", "BatchBurn", members, [("public_burn", "burnBatch")],
            dict(with_call=False, with_sstore=True))


def fixture_proxy_setter():
    members = [
        state_var("proxyRegistryAddress", "address", "address"),
        function_def("", [("address", "registry", "address")], [
            stmt_assign(ident("proxyRegistryAddress", "address"), "=",
                        ident("registry", "address")),
        ], kind="constructor"),
        function_def("setProxyRegistry", [("address", "registry", "address")], [
            stmt_assign(ident("proxyRegistryAddress", "address"), "=",
                        ident("registry", "address")),
        ]),
    ]
    return ("proxy_setter", "ProxySetter", members,
            [("risky_mutable_proxy", "setProxyRegistry")],
            dict(with_call=False, with_sstore=True))


def fixture_registry_swap():
    members = [
        state_var("openSeaRegistry", "address", "address"),
        state_var("owner", "address", "address"),
        function_def("updateRegistry", [("address", "next", "address")], [
            stmt_assign(ident("openSeaRegistry", "address"), "=", ident("next", "address")),
        ], visibility="external"),
    ]
    return ("registry_swap", "RegistrySwap", members,
            [("risky_mutable_proxy", "updateRegistry")],
            dict(with_call=False, with_sstore=True))


def fixture_unlimited_reserve():
    members = [
        state_var("totalSupply", "uint256", "uint256"),
        function_def("reserveMint", [("uint256", "quantity", "uint256")], [
            stmt_vardecl("start", "uint256", ident("totalSupply", "uint256")),
            stmt_assign(ident("totalSupply", "uint256"), "=",
                        binop(ident("start", "uint256"), "+", ident("quantity", "uint256"),
                              "uint256")),
            stmt_expr(call(ident("_mint", "function (address,uint256)"),
                           [MSG_SENDER, ident("quantity", "uint256")])),
        ]),
    ]
    return ("unlimited_reserve", "UnlimitedReserve", members,
            [("unlimited_minting", "reserveMint")], dict(with_call=False, with_sstore=True))


def fixture_airdrop_mint():
    members = [
        state_var("minted", "mapping(address => uint256)", "mapping(address => uint256)"),
        function_def("airdrop", [("address", "to", "address"),
                                 ("uint256", "amount", "uint256")], [
            stmt_require(binop(ident("amount", "uint256"), ">", literal(0, "int_const 0")),
                         "empty drop"),
            stmt_assign(index(ident("minted", "mapping(address => uint256)"),
                              ident("to", "address"), "uint256"), "+=",
                        ident("amount", "uint256")),
            stmt_expr(call(ident("_mint", "function (address,uint256)"),
                           [ident("to", "address"), ident("amount", "uint256")])),
        ], visibility="external"),
    ]
    return ("airdrop_mint", "AirdropMint", members,
            [("unlimited_minting", "airdrop")], dict(with_call=False, with_sstore=True))


def fixture_guarded_mint():
    members = [
        state_var("totalSupply", "uint256", "uint256"),
        state_var("MAX_SUPPLY", "uint256", "uint256", mutability="constant", value=5000),
        modifier_def("nonReentrant"),
        function_def("mint", [("address", "to", "address")], [
            stmt_require(binop(binop(ident("totalSupply", "uint256"), "+",
                                     literal(1, "int_const 1"), "uint256"), "<=",
                               ident("MAX_SUPPLY", "uint256")), "sold out"),
            stmt_expr(call(ident("_safeMint", "function (address,uint256)"),
                           [ident("to", "address"), ident("totalSupply", "uint256")])),
            stmt_assign(ident("totalSupply", "uint256"), "+=", literal(1, "int_const 1")),
        ], modifiers=("nonReentrant",)),
    ]
    return ("guarded_mint", "GuardedMint", members, [],
            dict(with_call=True, with_sstore=True))


def fixture_checked_burn():
    members = [
        state_var("owners", "mapping(uint256 => address)", "mapping(uint256 => address)"),
        function_def("burn", [("uint256", "tokenId", "uint256")], [
            stmt_require(binop(call(ident("ownerOf", "function (uint256) view returns (address)"),
                                    [ident("tokenId", "uint256")], "address"), "==",
                               MSG_SENDER), "not owner"),
            stmt_expr(call(ident("_burn", "function (uint256)"),
                           [ident("tokenId", "uint256")])),
        ]),
        function_def("ownerOf", [("uint256", "tokenId", "uint256")], [
            stmt_vardecl("holder", "address",
                         index(ident("owners", "mapping(uint256 => address)"),
                               ident("tokenId", "uint256"), "address")),
        ], visibility="public", mutability="view"),
        function_def("_burn", [("uint256", "tokenId", "uint256")], [
            stmt_assign(index(ident("owners", "mapping(uint256 => address)"),
                              ident("tokenId", "uint256"), "address"), "=",
                        type_conversion("address", literal(0, "int_const 0"))),
        ], visibility="internal"),
    ]
    return ("checked_burn", "CheckedBurn", members, [],
            dict(with_call=False, with_sstore=True))


def fixture_approval_burn():
    members = [
        state_var("owners", "mapping(uint256 => address)", "mapping(uint256 => address)"),
        function_def("burn", [("uint256", "tokenId", "uint256")], [
            stmt_require(call(ident("_isApprovedOrOwner", "function (address,uint256) view"),
                              [MSG_SENDER, ident("tokenId", "uint256")], "bool"),
                         "not approved"),
            stmt_expr(call(ident("_burn", "function (uint256)"),
                           [ident("tokenId", "uint256")])),
        ], visibility="external"),
        function_def("_burn", [("uint256", "tokenId", "uint256")], [
            stmt_assign(index(ident("owners", "mapping(uint256 => address)"),
                              ident("tokenId", "uint256"), "address"), "=",
                        type_conversion("address", literal(0, "int_const 0"))),
        ], visibility="internal"),
    ]
    return ("approval_burn", "ApprovalBurn", members, [],
            dict(with_call=False, with_sstore=True))


def fixture_immutable_proxy():
    members = [
        state_var("proxyRegistryAddress", "address", "address"),
        function_def("", [("address", "registry", "address")], [
            stmt_assign(ident("proxyRegistryAddress", "address"), "=",
                        ident("registry", "address")),
        ], kind="constructor"),
        function_def("registry", [], [
            stmt_vardecl("current", "address", ident("proxyRegistryAddress", "address")),
        ], visibility="public", mutability="view"),
    ]
    return ("immutable_proxy", "ImmutableProxy", members, [],
            dict(with_call=False, with_sstore=True))


def fixture_capped_mint():
    members = [
        state_var("totalSupply", "uint256", "uint256"),
        state_var("maxSupply", "uint256", "uint256"),
        function_def("", [("uint256", "cap", "uint256")], [
            stmt_assign(ident("maxSupply", "uint256"), "=", ident("cap", "uint256")),
        ], kind="constructor"),
        function_def("mint", [("uint256", "quantity", "uint256")], [
            stmt_require(binop(binop(ident("totalSupply", "uint256"), "+",
                                     ident("quantity", "uint256"), "uint256"), "<=",
                               ident("maxSupply", "uint256")), "cap exceeded"),
            stmt_assign(ident("totalSupply", "uint256"), "+=", ident("quantity", "uint256")),
            stmt_expr(call(ident("_mint", "function (address,uint256)"),
                           [MSG_SENDER, ident("quantity", "uint256")])),
        ], visibility="external"),
    ]
    return ("capped_mint", "CappedMint", members, [], dict(with_call=False, with_sstore=True))


def fixture_effects_first():
    nft = ident("vault", "contract IERC721")
    members = [
        state_var("vault", "IERC721", "contract IERC721"),
        state_var("claimed", "mapping(uint256 => bool)", "mapping(uint256 => bool)"),
        function_def("claim", [("uint256", "tokenId", "uint256")], [
            stmt_require(binop(index(ident("claimed", "mapping(uint256 => bool)"),
                                     ident("tokenId", "uint256"), "bool"), "==",
                               literal("false", "bool")), "already claimed"),
            stmt_assign(index(ident("claimed", "mapping(uint256 => bool)"),
                              ident("tokenId", "uint256"), "bool"), "=",
                        literal("true", "bool")),
            stmt_expr(call(member(nft, "safeTransferFrom",
                                  "function (address,address,uint256) external"),
                           [type_conversion("address", ident("this", "contract EffectsFirst")),
                            MSG_SENDER, ident("tokenId", "uint256")])),
        ]),
    ]
    return ("effects_first", "EffectsFirst", members, [],
            dict(with_call=True, with_sstore=True))


def fixture_plain_storage():
    members = [
        state_var("value", "uint256", "uint256", visibility="private"),
        function_def("setValue", [("uint256", "next", "uint256")], [
            stmt_assign(ident("value", "uint256"), "=", ident("next", "uint256")),
        ]),
        function_def("getValue", [], [
            stmt_vardecl("current", "uint256", ident("value", "uint256")),
        ], visibility="public", mutability="view"),
    ]
    return ("plain_storage", "PlainStorage", members, [],
            dict(with_call=False, with_sstore=True))


def fixture_vanilla_nft():
    members = [
        state_var("totalSupply", "uint256", "uint256"),
        state_var("maxSupply", "uint256", "uint256"),
        state_var("owners", "mapping(uint256 => address)", "mapping(uint256 => address)"),
        event_def("Minted", [("address", "to"), ("uint256", "tokenId")]),
        function_def("", [("uint256", "cap", "uint256")], [
            stmt_assign(ident("maxSupply", "uint256"), "=", ident("cap", "uint256")),
        ], kind="constructor"),
        function_def("mint", [("address", "to", "address")], [
            stmt_require(binop(ident("totalSupply", "uint256"), "<",
                               ident("maxSupply", "uint256")), "sold out"),
            stmt_increment(ident("totalSupply", "uint256")),
            stmt_expr(call(ident("_mint", "function (address,uint256)"),
                           [ident("to", "address"), ident("totalSupply", "uint256")])),
            stmt_emit("Minted", [ident("to", "address"), ident("totalSupply", "uint256")]),
        ], visibility="external"),
        function_def("burn", [("uint256", "tokenId", "uint256")], [
            stmt_require(binop(call(ident("ownerOf",
                                          "function (uint256) view returns (address)"),
                                    [ident("tokenId", "uint256")], "address"), "==",
                               MSG_SENDER), "not owner"),
            stmt_assign(index(ident("owners", "mapping(uint256 => address)"),
                              ident("tokenId", "uint256"), "address"), "=",
                        type_conversion("address", literal(0, "int_const 0"))),
        ], visibility="external"),
        function_def("ownerOf", [("uint256", "tokenId", "uint256")], [
            stmt_vardecl("holder", "address",
                         index(ident("owners", "mapping(uint256 => address)"),
                               ident("tokenId", "uint256"), "address")),
        ], visibility="public", mutability="view"),
    ]
    return ("vanilla_nft", "VanillaNft", members, [], dict(with_call=False, with_sstore=True))


FIXTURES = [
    fixture_reentrant_mint, fixture_reentrant_claim, fixture_open_burn, fixture_batch_burn,
    fixture_proxy_setter, fixture_registry_swap, fixture_unlimited_reserve,
    fixture_airdrop_mint, fixture_guarded_mint, fixture_checked_burn, fixture_approval_burn,
    fixture_immutable_proxy, fixture_capped_mint, fixture_effects_first,
    fixture_plain_storage, fixture_vanilla_nft,
]


def main():
    os.makedirs(OUT_DIR, exist_ok=True)
    manifest = []
    for i, make in enumerate(FIXTURES):
        name, contract_name, members, expected, bytecode_opts = make()
        ctx = Ctx()
        unit = contract(contract_name, members)(ctx)
        source = ctx.source()

        with open(os.path.join(OUT_DIR, f"{name}.sol"), "w") as f:
            f.write(source)
        document = {"sources": {f"{name}.sol": {"id": 0, "ast": unit}}}
        with open(os.path.join(OUT_DIR, f"{name}.ast.json"), "w") as f:
            json.dump(document, f, indent=1)
            f.write("\n")

        n_functions = sum(1 for m in unit["nodes"][1]["nodes"]
                          if m["nodeType"] == "FunctionDefinition")
        code = make_bytecode(n_functions, slot_seed=i, **bytecode_opts)
        with open(os.path.join(OUT_DIR, f"{name}.hex"), "w") as f:
            f.write("0x" + code.hex() + "\n")

        manifest.append({
            "name": name,
            "contract": contract_name,
            "expected": [{"defect_type": d, "function": fn} for d, fn in expected],
        })

    with open(os.path.join(OUT_DIR, "manifest.json"), "w") as f:
        json.dump(manifest, f, indent=1)
        f.write("\n")
    print(f"wrote {len(FIXTURES)} fixtures to {os.path.abspath(OUT_DIR)}")


if __name__ == "__main__":
    sys.exit(main())
