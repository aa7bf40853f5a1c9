// Copyright 2026 The webpol-sim Authors
//
// Licensed under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0

#include "webpol/error.hpp"

namespace webpol {

std::string_view to_string(ErrorKind kind)
{
    switch (kind) {
    case ErrorKind::LexError:
        return "LexError";
    case ErrorKind::ParseError:
        return "ParseError";
    case ErrorKind::TypeError:
        return "TypeError";
    case ErrorKind::UndefinedVariable:
        return "UndefinedVariable";
    case ErrorKind::ImplicitFlowError:
        return "ImplicitFlowError";
    case ErrorKind::PrivilegeError:
        return "PrivilegeError";
    case ErrorKind::PolicyInstallError:
        return "PolicyInstallError";
    case ErrorKind::ProtectedElementError:
        return "ProtectedElementError";
    case ErrorKind::MalformedLabel:
        return "MalformedLabel";
    case ErrorKind::MalformedUrl:
        return "MalformedUrl";
    case ErrorKind::SchemaError:
        return "SchemaError";
    case ErrorKind::PolicyOriginError:
        return "PolicyOriginError";
    case ErrorKind::ResourceLimit:
        return "ResourceLimit";
    case ErrorKind::IoError:
        return "IoError";
    }
    return "Unknown";
}

}
