// Copyright 2026 The webpol-sim Authors
//
// Licensed under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0

#ifndef WEBPOL_AST_HPP
#define WEBPOL_AST_HPP

#include "webpol/error.hpp"

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace webpol::ast {

struct Expr;
struct Stmt;
using ExprPtr = std::unique_ptr<Expr>;
using StmtPtr = std::unique_ptr<Stmt>;

enum class BinaryOp : std::uint8_t {
    Add,
    Sub,
    Mul,
    Div,
    Mod,
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
    And,
    Or,
};

enum class UnaryOp : std::uint8_t {
    Not,
    Neg,
};

std::string_view to_string(BinaryOp op);
std::string_view to_string(UnaryOp op);

struct Block {
    SourceSpan span;
    std::vector<StmtPtr> stmts;
};

// Shared so closures can outlive the program that defined them.
struct FunctionLiteral {
    SourceSpan span;
    std::string name; // empty for anonymous function expressions
    std::vector<std::string> params;
    Block body;
};
using FunctionRef = std::shared_ptr<FunctionLiteral const>;

struct NumberLit {
    double value;
};
struct StringLit {
    std::string value;
};
struct BoolLit {
    bool value;
};
struct NullLit { };
struct Ident {
    std::string name;
};
struct Binary {
    BinaryOp op;
    ExprPtr lhs;
    ExprPtr rhs;
};
struct Unary {
    UnaryOp op;
    ExprPtr operand;
};
struct Call {
    ExprPtr callee;
    std::vector<ExprPtr> args;
};
struct Member {
    ExprPtr object;
    std::string name;
};
struct Index {
    ExprPtr object;
    ExprPtr key;
};
struct FunctionExpr {
    FunctionRef fn;
};
struct ObjectLit {
    std::vector<std::pair<std::string, ExprPtr>> fields;
};

struct Expr {
    SourceSpan span;
    std::variant<NumberLit, StringLit, BoolLit, NullLit, Ident, Binary, Unary, Call, Member, Index,
        FunctionExpr, ObjectLit>
        node;
};

struct VarDecl {
    std::string name;
    ExprPtr init;
};
// target is always an Ident, Member or Index expression.
struct Assign {
    ExprPtr target;
    ExprPtr value;
};
struct If {
    ExprPtr cond;
    Block then_block;
    std::optional<Block> else_block;
    // Either branch contains a return outside nested functions.
    bool may_return = false;
};
struct While {
    ExprPtr cond;
    Block body;
    bool may_return = false;
};
struct FunctionDecl {
    FunctionRef fn;
};
struct Return {
    ExprPtr value; // null for a bare `return;`
};
struct ExprStmt {
    ExprPtr expr;
};
struct BlockStmt {
    Block block;
};

struct Stmt {
    SourceSpan span;
    std::variant<VarDecl, Assign, If, While, FunctionDecl, Return, ExprStmt, BlockStmt> node;
};

struct Program {
    std::vector<StmtPtr> stmts;
};

}

#endif
