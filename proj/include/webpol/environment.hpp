// Copyright 2026 The webpol-sim Authors
//
// Licensed under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0

#ifndef WEBPOL_ENVIRONMENT_HPP
#define WEBPOL_ENVIRONMENT_HPP

#include "webpol/value.hpp"

#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace webpol {

/// One lexical scope. Lookup walks the parent chain.
class Environment {
public:
    explicit Environment(Environment* parent = nullptr)
        : m_parent(parent)
    {
    }

    Environment* parent() const { return m_parent; }

    TaintedValue* find_local(std::string_view name)
    {
        auto it = m_bindings.find(std::string(name));
        return it == m_bindings.end() ? nullptr : &it->second;
    }

    TaintedValue* lookup(std::string_view name)
    {
        for (auto* env = this; env; env = env->m_parent) {
            if (auto* slot = env->find_local(name))
                return slot;
        }
        return nullptr;
    }

    // Creates or replaces the binding in this scope.
    TaintedValue& declare(std::string name, TaintedValue value)
    {
        auto [it, inserted] = m_bindings.insert_or_assign(std::move(name), std::move(value));
        return it->second;
    }

    // Sorted by name, for deterministic dumps.
    std::vector<std::pair<std::string, TaintedValue const*>> sorted_bindings() const;

    // Set once a closure holds this scope (or a descendant); the whole
    // parent chain is marked.
    bool captured() const { return m_captured; }
    void mark_captured()
    {
        for (auto* env = this; env && !env->m_captured; env = env->m_parent)
            env->m_captured = true;
    }

private:
    Environment* m_parent;
    bool m_captured = false;
    std::unordered_map<std::string, TaintedValue> m_bindings;
};

}

#endif
