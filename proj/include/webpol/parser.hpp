// Copyright 2026 The webpol-sim Authors
//
// Licensed under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0

#ifndef WEBPOL_PARSER_HPP
#define WEBPOL_PARSER_HPP

#include "webpol/ast.hpp"
#include "webpol/lexer.hpp"

#include <memory>
#include <span>
#include <string>
#include <string_view>

namespace webpol {

// Throws Error{ParseError}; either the whole token stream parses or nothing does.
std::shared_ptr<ast::Program const> parse(std::span<Token const> tokens);

// tokenize + parse.
std::shared_ptr<ast::Program const> parse_source(std::string_view source);

// Source text that reparses to a structurally identical program.
std::string to_source(ast::Program const& program);

// Span-free S-expression rendering; equal strings mean equal structure.
std::string dump(ast::Program const& program);
std::string dump(ast::Expr const& expr);

}

#endif
