// Copyright 2026 The webpol-sim Authors
//
// Licensed under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0

#include "webpol/parser.hpp"

#include <charconv>

namespace webpol {

namespace {

using namespace ast;

template<class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};

std::string number_text(double v)
{
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    (void)ec;
    return std::string(buf, ptr);
}

std::string quote(std::string_view s)
{
    std::string out = "\"";
    for (char c : s) {
        switch (c) {
        case '"':
            out += "\\\"";
            break;
        case '\\':
            out += "\\\\";
            break;
        case '\n':
            out += "\\n";
            break;
        case '\t':
            out += "\\t";
            break;
        default:
            out += c;
        }
    }
    return out + "\"";
}

class SourcePrinter {
public:
    std::string out;

    void program(Program const& p)
    {
        for (auto const& s : p.stmts)
            stmt(*s, 0);
    }

private:
    void indent(int depth) { out.append(static_cast<std::size_t>(depth) * 2, ' '); }

    void block(Block const& b, int depth)
    {
        out += "{\n";
        for (auto const& s : b.stmts)
            stmt(*s, depth + 1);
        indent(depth);
        out += "}";
    }

    void function(FunctionLiteral const& fn, int depth)
    {
        out += "function";
        if (!fn.name.empty())
            out += " " + fn.name;
        out += "(";
        for (std::size_t i = 0; i < fn.params.size(); ++i) {
            if (i)
                out += ", ";
            out += fn.params[i];
        }
        out += ") ";
        block(fn.body, depth);
    }

    void stmt(Stmt const& s, int depth)
    {
        indent(depth);
        std::visit(Overloaded {
                       [&](VarDecl const& v) {
                           out += "var " + v.name + " = " + expr(*v.init, depth) + ";";
                       },
                       [&](Assign const& a) {
                           out += expr(*a.target, depth) + " = " + expr(*a.value, depth) + ";";
                       },
                       [&](If const& i) {
                           out += "if (" + expr(*i.cond, depth) + ") ";
                           block(i.then_block, depth);
                           if (i.else_block) {
                               out += " else ";
                               block(*i.else_block, depth);
                           }
                       },
                       [&](While const& w) {
                           out += "while (" + expr(*w.cond, depth) + ") ";
                           block(w.body, depth);
                       },
                       [&](FunctionDecl const& f) { function(*f.fn, depth); },
                       [&](Return const& r) {
                           out += "return";
                           if (r.value)
                               out += " " + expr(*r.value, depth);
                           out += ";";
                       },
                       [&](ExprStmt const& e) { out += expr(*e.expr, depth) + ";"; },
                       [&](BlockStmt const& b) { block(b.block, depth); },
                   },
            s.node);
        out += "\n";
    }

    // `1.x` would lex as a malformed number.
    std::string operand(Expr const& e, int depth)
    {
        if (std::holds_alternative<NumberLit>(e.node))
            return "(" + expr(e, depth) + ")";
        return expr(e, depth);
    }

    std::string expr(Expr const& e, int depth)
    {
        return std::visit(Overloaded {
                              [&](NumberLit const& n) { return number_text(n.value); },
                              [&](StringLit const& s) { return quote(s.value); },
                              [&](BoolLit const& b) { return std::string(b.value ? "true" : "false"); },
                              [&](NullLit const&) { return std::string("null"); },
                              [&](Ident const& i) { return i.name; },
                              [&](Binary const& b) {
                                  return "(" + expr(*b.lhs, depth) + " " + std::string(to_string(b.op)) + " "
                                      + expr(*b.rhs, depth) + ")";
                              },
                              [&](Unary const& u) {
                                  return "(" + std::string(to_string(u.op)) + expr(*u.operand, depth) + ")";
                              },
                              [&](Call const& c) {
                                  std::string s = operand(*c.callee, depth) + "(";
                                  for (std::size_t i = 0; i < c.args.size(); ++i) {
                                      if (i)
                                          s += ", ";
                                      s += expr(*c.args[i], depth);
                                  }
                                  return s + ")";
                              },
                              [&](Member const& m) { return operand(*m.object, depth) + "." + m.name; },
                              [&](Index const& ix) {
                                  return operand(*ix.object, depth) + "[" + expr(*ix.key, depth) + "]";
                              },
                              [&](FunctionExpr const& f) {
                                  SourcePrinter inner;
                                  inner.function(*f.fn, depth);
                                  return "(" + inner.out + ")";
                              },
                              [&](ObjectLit const& o) {
                                  std::string s = "({";
                                  for (std::size_t i = 0; i < o.fields.size(); ++i) {
                                      if (i)
                                          s += ", ";
                                      s += quote(o.fields[i].first) + ": " + expr(*o.fields[i].second, depth);
                                  }
                                  return s + "})";
                              },
                          },
            e.node);
    }
};

class Dumper {
public:
    std::string out;

    void program(Program const& p)
    {
        out += "(program";
        for (auto const& s : p.stmts) {
            out += " ";
            stmt(*s);
        }
        out += ")";
    }

    void block(Block const& b)
    {
        out += "(block";
        for (auto const& s : b.stmts) {
            out += " ";
            stmt(*s);
        }
        out += ")";
    }

    void function(FunctionLiteral const& fn)
    {
        out += "(function " + (fn.name.empty() ? std::string("_") : fn.name) + " (";
        for (std::size_t i = 0; i < fn.params.size(); ++i) {
            if (i)
                out += " ";
            out += fn.params[i];
        }
        out += ") ";
        block(fn.body);
        out += ")";
    }

    void stmt(Stmt const& s)
    {
        std::visit(Overloaded {
                       [&](VarDecl const& v) {
                           out += "(var " + v.name + " ";
                           expr(*v.init);
                           out += ")";
                       },
                       [&](Assign const& a) {
                           out += "(assign ";
                           expr(*a.target);
                           out += " ";
                           expr(*a.value);
                           out += ")";
                       },
                       [&](If const& i) {
                           out += "(if ";
                           expr(*i.cond);
                           out += " ";
                           block(i.then_block);
                           if (i.else_block) {
                               out += " ";
                               block(*i.else_block);
                           }
                           out += ")";
                       },
                       [&](While const& w) {
                           out += "(while ";
                           expr(*w.cond);
                           out += " ";
                           block(w.body);
                           out += ")";
                       },
                       [&](FunctionDecl const& f) { function(*f.fn); },
                       [&](Return const& r) {
                           out += "(return";
                           if (r.value) {
                               out += " ";
                               expr(*r.value);
                           }
                           out += ")";
                       },
                       [&](ExprStmt const& e) {
                           out += "(expr ";
                           expr(*e.expr);
                           out += ")";
                       },
                       [&](BlockStmt const& b) { block(b.block); },
                   },
            s.node);
    }

    void expr(Expr const& e)
    {
        std::visit(Overloaded {
                       [&](NumberLit const& n) { out += "(num " + number_text(n.value) + ")"; },
                       [&](StringLit const& s) { out += "(str " + quote(s.value) + ")"; },
                       [&](BoolLit const& b) { out += b.value ? "(bool true)" : "(bool false)"; },
                       [&](NullLit const&) { out += "(null)"; },
                       [&](Ident const& i) { out += "(ident " + i.name + ")"; },
                       [&](Binary const& b) {
                           out += "(" + std::string(to_string(b.op)) + " ";
                           expr(*b.lhs);
                           out += " ";
                           expr(*b.rhs);
                           out += ")";
                       },
                       [&](Unary const& u) {
                           out += "(" + std::string(u.op == UnaryOp::Not ? "not" : "neg") + " ";
                           expr(*u.operand);
                           out += ")";
                       },
                       [&](Call const& c) {
                           out += "(call ";
                           expr(*c.callee);
                           for (auto const& a : c.args) {
                               out += " ";
                               expr(*a);
                           }
                           out += ")";
                       },
                       [&](Member const& m) {
                           out += "(member ";
                           expr(*m.object);
                           out += " " + m.name + ")";
                       },
                       [&](Index const& ix) {
                           out += "(index ";
                           expr(*ix.object);
                           out += " ";
                           expr(*ix.key);
                           out += ")";
                       },
                       [&](FunctionExpr const& f) { function(*f.fn); },
                       [&](ObjectLit const& o) {
                           out += "(object";
                           for (auto const& [key, value] : o.fields) {
                               out += " (" + quote(key) + " ";
                               expr(*value);
                               out += ")";
                           }
                           out += ")";
                       },
                   },
            e.node);
    }
};

}

std::string to_source(Program const& program)
{
    SourcePrinter p;
    p.program(program);
    return p.out;
}

std::string dump(Program const& program)
{
    Dumper d;
    d.program(program);
    return d.out;
}

std::string dump(Expr const& expr)
{
    Dumper d;
    d.expr(expr);
    return d.out;
}

}
