// Copyright 2026 The webpol-sim Authors
//
// Licensed under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0

#ifndef WEBPOL_ERROR_HPP
#define WEBPOL_ERROR_HPP

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace webpol {

enum class ErrorKind : std::uint8_t {
    LexError,
    ParseError,
    TypeError,
    UndefinedVariable,
    ImplicitFlowError,
    PrivilegeError,
    PolicyInstallError,
    ProtectedElementError,
    MalformedLabel,
    MalformedUrl,
    SchemaError,
    PolicyOriginError,
    ResourceLimit,
    IoError,
};

std::string_view to_string(ErrorKind kind);

// 1-based; a zero line means "no source position".
struct SourceSpan {
    std::uint32_t line = 0;
    std::uint32_t column = 0;

    bool operator==(SourceSpan const&) const = default;
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, std::string message, SourceSpan span = {})
        : std::runtime_error(std::move(message))
        , m_kind(kind)
        , m_span(span)
    {
    }

    ErrorKind kind() const { return m_kind; }
    SourceSpan span() const { return m_span; }

    // Attaches a position to errors raised by code that did not know it.
    void set_span_if_unknown(SourceSpan span)
    {
        if (m_span.line == 0)
            m_span = span;
    }

private:
    ErrorKind m_kind;
    SourceSpan m_span;
};

}

#endif
