// Copyright 2026 The webpol-sim Authors
//
// Licensed under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0

#ifndef WEBPOL_LEXER_HPP
#define WEBPOL_LEXER_HPP

#include "webpol/error.hpp"

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace webpol {

enum class TokenKind : std::uint8_t {
    Identifier,
    Number,
    String,
    Boolean,
    Keyword,
    Operator,
    Punctuation,
};

std::string_view to_string(TokenKind kind);

struct Token {
    TokenKind kind;
    // Raw source text, never empty. String literals keep their quotes.
    std::string lexeme;
    SourceSpan span;
    // Decoded contents of a string literal; empty for other kinds.
    std::string text {};

    bool is(TokenKind k, std::string_view text) const { return kind == k && lexeme == text; }
};

// Throws Error{LexError} on an unterminated string or an illegal character.
std::vector<Token> tokenize(std::string_view source);

}

#endif
