// Copyright 2026 The webpol-sim Authors
//
// Licensed under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0

#ifndef WEBPOL_VALUE_HPP
#define WEBPOL_VALUE_HPP

#include "webpol/ast.hpp"
#include "webpol/label.hpp"

#include <functional>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <variant>

namespace webpol {

class Interpreter;
class Environment;
class HostObject;
struct TaintedValue;

// Heap objects are owned by the interpreter's arena; values hold
// non-owning pointers that stay valid for the interpreter's lifetime.

struct Null {
    bool operator==(Null const&) const = default;
};

struct Object;
struct Closure;
struct NativeFunction;

// `receiver.name` looked up for a call; the receiver is either a host
// object or a string.
struct BoundMethod {
    HostObject* host = nullptr;
    std::string text;
    std::string name;
};

using Payload = std::variant<Null, double, std::string, bool, Object*, Closure*, NativeFunction*,
    HostObject*, BoundMethod>;

struct TaintedValue {
    Payload payload;
    Label label;

    bool is_null() const { return std::holds_alternative<Null>(payload); }
};

struct Object {
    std::map<std::string, TaintedValue, std::less<>> fields;
    // Which names are present. Reads of a missing field carry this label.
    Label shape;
};

struct Closure {
    ast::FunctionRef fn;
    Environment* env;
    bool privileged;
};

using NativeFn = std::function<TaintedValue(Interpreter&, std::span<TaintedValue const>)>;

struct NativeFunction {
    std::string name;
    NativeFn fn;
};

inline TaintedValue make_value(Payload payload, Label label = {})
{
    return TaintedValue { std::move(payload), std::move(label) };
}

/// A DOM-side object reachable from scripts. Member reads and writes are
/// delegated so the interpreter stays independent of the browser model.
class HostObject {
public:
    virtual ~HostObject() = default;

    virtual std::string_view class_name() const = 0;

    // `ref_label` is the label of the reference the member was read through.
    virtual TaintedValue get_member(Interpreter&, std::string_view name, Label const& ref_label) = 0;
    virtual void set_member(Interpreter&, std::string_view name, TaintedValue value, Label const& ref_label) = 0;
    virtual TaintedValue call_method(Interpreter&, std::string_view name, std::span<TaintedValue const> args,
        Label const& ref_label)
        = 0;
};

// JS-flavoured conversions.
bool truthy(Payload const& p);
double to_number(Payload const& p);
std::string to_display_string(Payload const& p);
std::string format_number(double v);

}

#endif
