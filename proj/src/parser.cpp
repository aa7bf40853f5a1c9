// Copyright 2026 The webpol-sim Authors
//
// Licensed under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0

#include "webpol/parser.hpp"

#include <charconv>

namespace webpol {

namespace ast {

std::string_view to_string(BinaryOp op)
{
    switch (op) {
    case BinaryOp::Add:
        return "+";
    case BinaryOp::Sub:
        return "-";
    case BinaryOp::Mul:
        return "*";
    case BinaryOp::Div:
        return "/";
    case BinaryOp::Mod:
        return "%";
    case BinaryOp::Eq:
        return "==";
    case BinaryOp::Ne:
        return "!=";
    case BinaryOp::Lt:
        return "<";
    case BinaryOp::Le:
        return "<=";
    case BinaryOp::Gt:
        return ">";
    case BinaryOp::Ge:
        return ">=";
    case BinaryOp::And:
        return "&&";
    case BinaryOp::Or:
        return "||";
    }
    return "?";
}

std::string_view to_string(UnaryOp op)
{
    return op == UnaryOp::Not ? "!" : "-";
}

}

namespace {

using namespace ast;

template<typename Node>
ExprPtr make_expr(SourceSpan span, Node node)
{
    return std::make_unique<Expr>(Expr { span, std::move(node) });
}

template<typename Node>
StmtPtr make_stmt(SourceSpan span, Node node)
{
    return std::make_unique<Stmt>(Stmt { span, std::move(node) });
}

class Parser {
public:
    explicit Parser(std::span<Token const> tokens)
        : m_tokens(tokens)
    {
    }

    std::shared_ptr<Program const> parse_program()
    {
        auto program = std::make_shared<Program>();
        while (!at_end())
            program->stmts.push_back(statement());
        return program;
    }

private:
    bool at_end() const { return m_pos >= m_tokens.size(); }

    Token const* peek(std::size_t ahead = 0) const
    {
        return m_pos + ahead < m_tokens.size() ? &m_tokens[m_pos + ahead] : nullptr;
    }

    bool check(TokenKind kind, std::string_view text, std::size_t ahead = 0) const
    {
        auto const* t = peek(ahead);
        return t && t->is(kind, text);
    }

    bool check_punct(std::string_view text) const { return check(TokenKind::Punctuation, text); }
    bool check_op(std::string_view text) const { return check(TokenKind::Operator, text); }
    bool check_keyword(std::string_view text) const { return check(TokenKind::Keyword, text); }

    SourceSpan current_span() const
    {
        if (auto const* t = peek())
            return t->span;
        if (m_tokens.empty())
            return { 1, 1 };
        auto last = m_tokens.back().span;
        return { last.line, last.column + static_cast<std::uint32_t>(m_tokens.back().lexeme.size()) };
    }

    [[noreturn]] void fail(std::string_view expected) const
    {
        std::string found = at_end() ? "end of input" : "'" + peek()->lexeme + "'";
        throw Error(ErrorKind::ParseError,
            "expected " + std::string(expected) + ", found " + found, current_span());
    }

    Token const& advance() { return m_tokens[m_pos++]; }

    Token const& expect(TokenKind kind, std::string_view text)
    {
        if (!check(kind, text))
            fail("'" + std::string(text) + "'");
        return advance();
    }

    Token const& expect_punct(std::string_view text) { return expect(TokenKind::Punctuation, text); }

    std::string expect_identifier()
    {
        auto const* t = peek();
        if (!t || t->kind != TokenKind::Identifier)
            fail("identifier");
        return advance().lexeme;
    }

    StmtPtr statement()
    {
        auto span = current_span();
        if (check_keyword("var"))
            return var_decl();
        if (check_keyword("if"))
            return if_stmt();
        if (check_keyword("while"))
            return while_stmt();
        if (check_keyword("function")) {
            advance();
            auto fn = function_rest(span, expect_identifier());
            return make_stmt(span, FunctionDecl { std::move(fn) });
        }
        if (check_keyword("return"))
            return return_stmt();
        if (check_punct("{"))
            return make_stmt(span, BlockStmt { block() });
        return simple_statement();
    }

    StmtPtr var_decl()
    {
        auto span = advance().span;
        auto name = expect_identifier();
        ExprPtr init;
        if (check_op("=")) {
            advance();
            init = expression();
        } else {
            init = make_expr(span, NullLit {});
        }
        expect_punct(";");
        return make_stmt(span, VarDecl { std::move(name), std::move(init) });
    }

    StmtPtr if_stmt()
    {
        auto span = advance().span;
        auto returns_before = m_returns;
        expect_punct("(");
        auto cond = expression();
        expect_punct(")");
        auto then_block = branch_body();
        std::optional<Block> else_block;
        if (check_keyword("else")) {
            advance();
            else_block = branch_body();
        }
        bool may_return = m_returns != returns_before;
        return make_stmt(span, If { std::move(cond), std::move(then_block), std::move(else_block), may_return });
    }

    StmtPtr while_stmt()
    {
        auto span = advance().span;
        auto returns_before = m_returns;
        expect_punct("(");
        auto cond = expression();
        expect_punct(")");
        auto body = branch_body();
        bool may_return = m_returns != returns_before;
        return make_stmt(span, While { std::move(cond), std::move(body), may_return });
    }

    StmtPtr return_stmt()
    {
        auto span = advance().span;
        if (m_function_depth == 0)
            throw Error(ErrorKind::ParseError, "return outside of a function", span);
        ++m_returns;
        ExprPtr value;
        if (!check_punct(";"))
            value = expression();
        expect_punct(";");
        return make_stmt(span, Return { std::move(value) });
    }

    // A branch or loop body; a single statement is wrapped into a block.
    Block branch_body()
    {
        if (check_punct("{"))
            return block();
        auto span = current_span();
        Block b { span, {} };
        b.stmts.push_back(statement());
        return b;
    }

    Block block()
    {
        auto span = expect_punct("{").span;
        Block b { span, {} };
        while (!check_punct("}")) {
            if (at_end())
                fail("'}'");
            b.stmts.push_back(statement());
        }
        advance();
        return b;
    }

    StmtPtr simple_statement()
    {
        auto span = current_span();
        auto expr = expression();
        if (check_op("=") || check_op("+=") || check_op("-=")) {
            bool assignable = std::holds_alternative<Ident>(expr->node)
                || std::holds_alternative<Member>(expr->node) || std::holds_alternative<Index>(expr->node);
            if (!assignable)
                throw Error(ErrorKind::ParseError, "invalid assignment target", expr->span);
            auto const& op = advance();
            auto value = expression();
            if (op.lexeme != "=") {
                // x += v is sugar for x = x + v.
                auto target_copy = clone(*expr);
                auto value_span = value->span;
                value = make_expr(value_span,
                    Binary { op.lexeme == "+=" ? BinaryOp::Add : BinaryOp::Sub, std::move(target_copy), std::move(value) });
            }
            expect_punct(";");
            return make_stmt(span, Assign { std::move(expr), std::move(value) });
        }
        expect_punct(";");
        return make_stmt(span, ExprStmt { std::move(expr) });
    }

    // Only lvalue shapes are ever cloned.
    ExprPtr clone(Expr const& e)
    {
        if (auto const* id = std::get_if<Ident>(&e.node))
            return make_expr(e.span, Ident { id->name });
        if (auto const* m = std::get_if<Member>(&e.node))
            return make_expr(e.span, Member { clone(*m->object), m->name });
        if (auto const* ix = std::get_if<Index>(&e.node))
            return make_expr(e.span, Index { clone(*ix->object), clone(*ix->key) });
        if (auto const* call = std::get_if<Call>(&e.node)) {
            std::vector<ExprPtr> args;
            for (auto const& a : call->args)
                args.push_back(clone(*a));
            return make_expr(e.span, Call { clone(*call->callee), std::move(args) });
        }
        if (auto const* n = std::get_if<NumberLit>(&e.node))
            return make_expr(e.span, *n);
        if (auto const* s = std::get_if<StringLit>(&e.node))
            return make_expr(e.span, *s);
        if (auto const* b = std::get_if<BoolLit>(&e.node))
            return make_expr(e.span, *b);
        if (std::holds_alternative<NullLit>(e.node))
            return make_expr(e.span, NullLit {});
        if (auto const* u = std::get_if<Unary>(&e.node))
            return make_expr(e.span, Unary { u->op, clone(*u->operand) });
        if (auto const* bin = std::get_if<Binary>(&e.node))
            return make_expr(e.span, Binary { bin->op, clone(*bin->lhs), clone(*bin->rhs) });
        if (auto const* f = std::get_if<FunctionExpr>(&e.node))
            return make_expr(e.span, FunctionExpr { f->fn });
        throw Error(ErrorKind::ParseError, "compound assignment target too complex", e.span);
    }

    FunctionRef function_rest(SourceSpan span, std::string name)
    {
        auto fn = std::make_shared<FunctionLiteral>();
        fn->span = span;
        fn->name = std::move(name);
        expect_punct("(");
        if (!check_punct(")")) {
            while (true) {
                fn->params.push_back(expect_identifier());
                if (!check_punct(","))
                    break;
                advance();
            }
        }
        expect_punct(")");
        auto saved_returns = m_returns;
        ++m_function_depth;
        fn->body = block();
        --m_function_depth;
        m_returns = saved_returns;
        return fn;
    }

    ExprPtr expression() { return logical_or(); }

    ExprPtr logical_or()
    {
        auto lhs = logical_and();
        while (check_op("||")) {
            auto span = advance().span;
            lhs = make_expr(span, Binary { BinaryOp::Or, std::move(lhs), logical_and() });
        }
        return lhs;
    }

    ExprPtr logical_and()
    {
        auto lhs = equality();
        while (check_op("&&")) {
            auto span = advance().span;
            lhs = make_expr(span, Binary { BinaryOp::And, std::move(lhs), equality() });
        }
        return lhs;
    }

    ExprPtr equality()
    {
        auto lhs = relational();
        while (check_op("==") || check_op("!=")) {
            auto const& op = advance();
            auto kind = op.lexeme == "==" ? BinaryOp::Eq : BinaryOp::Ne;
            lhs = make_expr(op.span, Binary { kind, std::move(lhs), relational() });
        }
        return lhs;
    }

    ExprPtr relational()
    {
        auto lhs = additive();
        while (check_op("<") || check_op("<=") || check_op(">") || check_op(">=")) {
            auto const& op = advance();
            BinaryOp kind = op.lexeme == "<" ? BinaryOp::Lt
                : op.lexeme == "<="          ? BinaryOp::Le
                : op.lexeme == ">"           ? BinaryOp::Gt
                                             : BinaryOp::Ge;
            lhs = make_expr(op.span, Binary { kind, std::move(lhs), additive() });
        }
        return lhs;
    }

    ExprPtr additive()
    {
        auto lhs = multiplicative();
        while (check_op("+") || check_op("-")) {
            auto const& op = advance();
            auto kind = op.lexeme == "+" ? BinaryOp::Add : BinaryOp::Sub;
            lhs = make_expr(op.span, Binary { kind, std::move(lhs), multiplicative() });
        }
        return lhs;
    }

    ExprPtr multiplicative()
    {
        auto lhs = unary();
        while (check_op("*") || check_op("/") || check_op("%")) {
            auto const& op = advance();
            BinaryOp kind = op.lexeme == "*" ? BinaryOp::Mul : op.lexeme == "/" ? BinaryOp::Div : BinaryOp::Mod;
            lhs = make_expr(op.span, Binary { kind, std::move(lhs), unary() });
        }
        return lhs;
    }

    ExprPtr unary()
    {
        if (check_op("!") || check_op("-")) {
            auto const& op = advance();
            auto kind = op.lexeme == "!" ? UnaryOp::Not : UnaryOp::Neg;
            return make_expr(op.span, Unary { kind, unary() });
        }
        return postfix();
    }

    ExprPtr postfix()
    {
        auto expr = primary();
        while (true) {
            if (check_punct("(")) {
                auto span = advance().span;
                std::vector<ExprPtr> args;
                if (!check_punct(")")) {
                    while (true) {
                        args.push_back(expression());
                        if (!check_punct(","))
                            break;
                        advance();
                    }
                }
                expect_punct(")");
                expr = make_expr(span, Call { std::move(expr), std::move(args) });
            } else if (check_punct(".")) {
                auto span = advance().span;
                expr = make_expr(span, Member { std::move(expr), expect_identifier() });
            } else if (check_punct("[")) {
                auto span = advance().span;
                auto key = expression();
                expect_punct("]");
                expr = make_expr(span, Index { std::move(expr), std::move(key) });
            } else {
                return expr;
            }
        }
    }

    ExprPtr primary()
    {
        auto const* t = peek();
        if (!t)
            fail("expression");
        auto span = t->span;
        switch (t->kind) {
        case TokenKind::Number: {
            auto const& text = advance().lexeme;
            double value = 0;
            auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
            if (ec != std::errc {} || ptr != text.data() + text.size())
                throw Error(ErrorKind::ParseError, "invalid number literal '" + text + "'", span);
            return make_expr(span, NumberLit { value });
        }
        case TokenKind::String:
            return make_expr(span, StringLit { advance().text });
        case TokenKind::Boolean:
            return make_expr(span, BoolLit { advance().lexeme == "true" });
        case TokenKind::Identifier:
            return make_expr(span, Ident { advance().lexeme });
        case TokenKind::Keyword:
            if (t->lexeme == "null") {
                advance();
                return make_expr(span, NullLit {});
            }
            if (t->lexeme == "function") {
                advance();
                std::string name;
                if (auto const* n = peek(); n && n->kind == TokenKind::Identifier)
                    name = advance().lexeme;
                return make_expr(span, FunctionExpr { function_rest(span, std::move(name)) });
            }
            break;
        case TokenKind::Punctuation:
            if (t->lexeme == "(") {
                advance();
                auto inner = expression();
                expect_punct(")");
                return inner;
            }
            if (t->lexeme == "{")
                return object_literal();
            break;
        case TokenKind::Operator:
            break;
        }
        fail("expression");
    }

    ExprPtr object_literal()
    {
        auto span = expect_punct("{").span;
        ObjectLit obj;
        if (!check_punct("}")) {
            while (true) {
                auto const* key = peek();
                if (!key || (key->kind != TokenKind::Identifier && key->kind != TokenKind::String))
                    fail("property name");
                std::string name = key->kind == TokenKind::String ? key->text : key->lexeme;
                advance();
                expect_punct(":");
                obj.fields.emplace_back(std::move(name), expression());
                if (!check_punct(","))
                    break;
                advance();
            }
        }
        expect_punct("}");
        return make_expr(span, std::move(obj));
    }

    std::span<Token const> m_tokens;
    std::size_t m_pos = 0;
    int m_function_depth = 0;
    int m_returns = 0;
};

}

std::shared_ptr<ast::Program const> parse(std::span<Token const> tokens)
{
    return Parser(tokens).parse_program();
}

std::shared_ptr<ast::Program const> parse_source(std::string_view source)
{
    auto tokens = tokenize(source);
    return parse(tokens);
}

}
