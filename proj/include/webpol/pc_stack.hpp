// Copyright 2026 The webpol-sim Authors
//
// Licensed under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0

#ifndef WEBPOL_PC_STACK_HPP
#define WEBPOL_PC_STACK_HPP

#include "webpol/label.hpp"

#include <cstddef>
#include <cstdint>
#include <vector>

namespace webpol {

enum class FrameOrigin : std::uint8_t {
    Branch,
    Loop,
    HandlerEntry,
    DispatchContext,
};

/// Control-context labels. The current pc is the join of all frames;
/// a running join is cached per frame so current() is O(1).
class PcStack {
public:
    struct Frame {
        Label label;
        FrameOrigin origin;
        Label cumulative;
    };

    void push(Label label, FrameOrigin origin)
    {
        auto cumulative = m_frames.empty() ? label : join(m_frames.back().cumulative, label);
        m_frames.push_back({ std::move(label), origin, std::move(cumulative) });
    }

    void pop() { m_frames.pop_back(); }

    void truncate(std::size_t depth)
    {
        if (m_frames.size() > depth)
            m_frames.resize(depth);
    }

    Label const& current() const { return m_frames.empty() ? s_public : m_frames.back().cumulative; }
    std::size_t depth() const { return m_frames.size(); }
    bool empty() const { return m_frames.empty(); }

    std::size_t count(FrameOrigin origin) const
    {
        std::size_t n = 0;
        for (auto const& f : m_frames)
            n += f.origin == origin;
        return n;
    }

    std::vector<Frame> const& frames() const { return m_frames; }

private:
    static inline Label const s_public {};
    std::vector<Frame> m_frames;
};

// Restores the stack to its depth at construction.
class PcScope {
public:
    explicit PcScope(PcStack& stack)
        : m_stack(stack)
        , m_depth(stack.depth())
    {
    }

    PcScope(PcStack& stack, Label label, FrameOrigin origin)
        : PcScope(stack)
    {
        stack.push(std::move(label), origin);
    }

    ~PcScope() { m_stack.truncate(m_depth); }

    PcScope(PcScope const&) = delete;
    PcScope& operator=(PcScope const&) = delete;

private:
    PcStack& m_stack;
    std::size_t m_depth;
};

}

#endif
