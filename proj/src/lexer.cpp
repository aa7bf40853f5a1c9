// Copyright 2026 The webpol-sim Authors
//
// Licensed under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0

#include "webpol/lexer.hpp"

#include <array>

namespace webpol {

std::string_view to_string(TokenKind kind)
{
    switch (kind) {
    case TokenKind::Identifier:
        return "identifier";
    case TokenKind::Number:
        return "number";
    case TokenKind::String:
        return "string";
    case TokenKind::Boolean:
        return "boolean";
    case TokenKind::Keyword:
        return "keyword";
    case TokenKind::Operator:
        return "operator";
    case TokenKind::Punctuation:
        return "punctuation";
    }
    return "token";
}

namespace {

constexpr std::array keywords { "var", "if", "else", "while", "function", "return", "null" };

// Longest match first.
constexpr std::array operators { "==", "!=", "<=", ">=", "&&", "||", "+=", "-=",
    "=", "<", ">", "+", "-", "*", "/", "%", "!" };

constexpr std::string_view punctuation = "(){}[],;.:";

bool is_ident_start(char c)
{
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_' || c == '$';
}

bool is_digit(char c) { return c >= '0' && c <= '9'; }

class Lexer {
public:
    explicit Lexer(std::string_view source)
        : m_source(source)
    {
    }

    std::vector<Token> run()
    {
        std::vector<Token> tokens;
        while (true) {
            skip_trivia();
            if (at_end())
                break;
            tokens.push_back(next_token());
        }
        return tokens;
    }

private:
    bool at_end() const { return m_pos >= m_source.size(); }
    char peek(std::size_t ahead = 0) const
    {
        return m_pos + ahead < m_source.size() ? m_source[m_pos + ahead] : '\0';
    }

    char advance()
    {
        char c = m_source[m_pos++];
        if (c == '\n') {
            ++m_line;
            m_column = 1;
        } else {
            ++m_column;
        }
        return c;
    }

    SourceSpan here() const { return { m_line, m_column }; }

    void skip_trivia()
    {
        while (!at_end()) {
            char c = peek();
            if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
                advance();
            } else if (c == '/' && peek(1) == '/') {
                while (!at_end() && peek() != '\n')
                    advance();
            } else {
                break;
            }
        }
    }

    Token next_token()
    {
        auto start = here();
        char c = peek();

        if (is_ident_start(c)) {
            std::string word;
            while (!at_end() && (is_ident_start(peek()) || is_digit(peek())))
                word += advance();
            if (word == "true" || word == "false")
                return { TokenKind::Boolean, word, start };
            for (auto kw : keywords) {
                if (word == kw)
                    return { TokenKind::Keyword, word, start };
            }
            return { TokenKind::Identifier, word, start };
        }

        if (is_digit(c) || (c == '.' && is_digit(peek(1))))
            return number(start);

        if (c == '"' || c == '\'')
            return string(start);

        for (std::string_view op : operators) {
            if (m_source.substr(m_pos, op.size()) == op) {
                for (std::size_t i = 0; i < op.size(); ++i)
                    advance();
                return { TokenKind::Operator, std::string(op), start };
            }
        }

        if (punctuation.find(c) != std::string_view::npos) {
            advance();
            return { TokenKind::Punctuation, std::string(1, c), start };
        }

        throw Error(ErrorKind::LexError, "illegal character '" + std::string(1, c) + "'", start);
    }

    Token number(SourceSpan start)
    {
        std::string text;
        while (is_digit(peek()))
            text += advance();
        if (peek() == '.') {
            text += advance();
            while (is_digit(peek()))
                text += advance();
        }
        if ((peek() == 'e' || peek() == 'E')
            && (is_digit(peek(1)) || ((peek(1) == '+' || peek(1) == '-') && is_digit(peek(2))))) {
            text += advance();
            if (peek() == '+' || peek() == '-')
                text += advance();
            while (is_digit(peek()))
                text += advance();
        }
        if (is_ident_start(peek()))
            throw Error(ErrorKind::LexError, "identifier starts immediately after number", here());
        return { TokenKind::Number, text, start };
    }

    Token string(SourceSpan start)
    {
        auto begin = m_pos;
        char quote = advance();
        std::string value;
        while (true) {
            if (at_end() || peek() == '\n')
                throw Error(ErrorKind::LexError, "unterminated string literal", start);
            char c = advance();
            if (c == quote)
                break;
            if (c != '\\') {
                value += c;
                continue;
            }
            if (at_end())
                throw Error(ErrorKind::LexError, "unterminated string literal", start);
            auto escape_at = here();
            char e = advance();
            switch (e) {
            case 'n':
                value += '\n';
                break;
            case 't':
                value += '\t';
                break;
            case '"':
            case '\'':
            case '\\':
                value += e;
                break;
            default:
                throw Error(ErrorKind::LexError, "unknown escape '\\" + std::string(1, e) + "'", escape_at);
            }
        }
        return { TokenKind::String, std::string(m_source.substr(begin, m_pos - begin)), start, std::move(value) };
    }

    std::string_view m_source;
    std::size_t m_pos = 0;
    std::uint32_t m_line = 1;
    std::uint32_t m_column = 1;
};

}

std::vector<Token> tokenize(std::string_view source)
{
    return Lexer(source).run();
}

}
